"""Alluvial diagrams: snapshot columns of cluster blocks joined by flows.

Block height is proportional to cluster size (one height unit per
member); block colour encodes the dynamic cluster. A flow between two
blocks of consecutive snapshots carries the members present in both, so
the difference between a block's height and its summed in-flows (or
out-flows) is exactly the number of members introduced (or removed).
Output is plain SVG 1.1, byte-identical for identical inputs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .model import ClusterRef, ClusteringSequence
from .relations import RelationCache

__all__ = ["Block", "Flow", "AlluvialLayout", "build_layout", "layout_to_svg"]

# 12 fixed colours cycled by canonical DC id.
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a845", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#d37295", "#86bcb6",
)


@dataclass(frozen=True)
class Block:
    time: int
    cluster: int
    dc: int
    size: int
    y: float


@dataclass(frozen=True)
class Flow:
    time: int  # source snapshot; target is time + 1
    src_cluster: int
    dst_cluster: int
    magnitude: int
    src_y: float
    dst_y: float


@dataclass(frozen=True)
class AlluvialLayout:
    blocks: tuple[tuple[Block, ...], ...]  # per snapshot
    flows: tuple[Flow, ...]
    gap: float

    def to_json_dict(self) -> dict:
        return {
            "blocks": [[asdict(b) for b in col] for col in self.blocks],
            "flows": [asdict(f) for f in self.flows],
            "gap": self.gap,
        }


def build_layout(
    seq: ClusteringSequence,
    labels: dict[ClusterRef, int],
    gap: float = 2.0,
) -> AlluvialLayout:
    """Geometry of the diagram in member-count units.

    `gap` is the vertical spacing between blocks of one column.
    """
    columns: list[tuple[Block, ...]] = []
    tops: list[list[float]] = []
    for snap in seq.snapshots:
        col = []
        y = 0.0
        col_tops = []
        for alpha, members in enumerate(snap.clusters):
            col_tops.append(y)
            col.append(
                Block(
                    time=snap.index,
                    cluster=alpha,
                    dc=labels[ClusterRef(snap.index, alpha)],
                    size=len(members),
                    y=y,
                )
            )
            y += len(members) + gap
        columns.append(tuple(col))
        tops.append(col_tops)

    rels = RelationCache(seq)
    flows: list[Flow] = []
    for i in range(len(seq) - 1):
        pair = rels.pair(i)
        out_used = [0.0] * len(seq.snapshots[i])
        in_used = [0.0] * len(seq.snapshots[i + 1])
        for (a, b), magnitude in sorted(pair.counts.items()):
            src_y = tops[i][a] + out_used[a]
            dst_y = tops[i + 1][b] + in_used[b]
            out_used[a] += magnitude
            in_used[b] += magnitude
            flows.append(
                Flow(
                    time=i,
                    src_cluster=a,
                    dst_cluster=b,
                    magnitude=magnitude,
                    src_y=src_y,
                    dst_y=dst_y,
                )
            )
    return AlluvialLayout(blocks=tuple(columns), flows=tuple(flows), gap=gap)


def _fmt(v: float) -> str:
    # fixed-point keeps the output byte-stable
    s = f"{v:.2f}"
    return s[:-3] if s.endswith(".00") else s


def layout_to_svg(
    layout: AlluvialLayout,
    block_width: float = 20.0,
    unit: float = 1.0,
) -> str:
    """Standalone SVG 1.1 document for a layout.

    Columns are `3 * block_width` apart; one member is `unit` pixels tall.
    """
    span = 3.0 * block_width
    n_cols = len(layout.blocks)
    height = max(
        (
            (col[-1].y + col[-1].size) * unit
            for col in layout.blocks
            if col
        ),
        default=0.0,
    )
    width = n_cols * block_width + max(n_cols - 1, 0) * span
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
        ),
        '<g stroke="none">',
    ]

    def col_x(i: int) -> float:
        return i * (block_width + span)

    for flow in layout.flows:
        x0 = col_x(flow.time) + block_width
        x1 = col_x(flow.time + 1)
        xm = (x0 + x1) / 2.0
        y0a = flow.src_y * unit
        y0b = (flow.src_y + flow.magnitude) * unit
        y1a = flow.dst_y * unit
        y1b = (flow.dst_y + flow.magnitude) * unit
        src_dc = layout.blocks[flow.time][flow.src_cluster].dc
        color = PALETTE[src_dc % len(PALETTE)]
        # two quadratic segments per edge give an S-shaped ribbon
        d = (
            f"M {_fmt(x0)} {_fmt(y0a)} "
            f"Q {_fmt(xm)} {_fmt(y0a)} {_fmt(xm)} {_fmt((y0a + y1a) / 2.0)} "
            f"Q {_fmt(xm)} {_fmt(y1a)} {_fmt(x1)} {_fmt(y1a)} "
            f"L {_fmt(x1)} {_fmt(y1b)} "
            f"Q {_fmt(xm)} {_fmt(y1b)} {_fmt(xm)} {_fmt((y0b + y1b) / 2.0)} "
            f"Q {_fmt(xm)} {_fmt(y0b)} {_fmt(x0)} {_fmt(y0b)} Z"
        )
        parts.append(f'<path d="{d}" fill="{color}" fill-opacity="0.4"/>')

    for i, col in enumerate(layout.blocks):
        x = col_x(i)
        for b in col:
            color = PALETTE[b.dc % len(PALETTE)]
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(b.y * unit)}" '
                f'width="{_fmt(block_width)}" height="{_fmt(b.size * unit)}" '
                f'fill="{color}">'
                f"<title>t={b.time} cluster={b.cluster} dc={b.dc} "
                f"size={b.size}</title></rect>"
            )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
