"""Species and gene genealogies extracted from a simulated history, and Newick output."""
from __future__ import annotations

from dataclasses import dataclass, field

from .partitions import apply_marks
from .simulator import History

__all__ = ["TreeNode", "TreePair", "build_trees", "to_newick", "forest_newick"]


@dataclass
class TreeNode:
    height: float
    name: str | None = None
    children: list[TreeNode] = field(default_factory=list)

    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list[str]:
        if self.is_leaf():
            return [self.name]
        return [x for ch in self.children for x in ch.leaves()]

    def nodes(self):
        yield self
        for ch in self.children:
            yield from ch.nodes()


@dataclass
class TreePair:
    species_roots: list[TreeNode]
    gene_roots: list[TreeNode]
    leaf_map: dict[str, str]
    end_time: float | None


def build_trees(h: History) -> TreePair:
    """One internal node per species merger and per gene merger, at the event time.

    Species leaves are ``s<j>`` and gene leaves ``g<k>``, numbered by the
    initial blocks in least-element order. Lineages still separate at the end
    of the history are returned as separate roots. ``end_time`` is the
    horizon for truncated runs and None for absorbed ones.
    """
    p = h.initial
    sp_node = {blk: TreeNode(0.0, f"s{j}") for j, blk in enumerate(p.species.blocks, start=1)}
    gn_node = {blk: TreeNode(0.0, f"g{k}") for k, blk in enumerate(p.genes.blocks, start=1)}
    leaf_map = {}
    for si, members in enumerate(p.species_genes):
        for gi in members:
            leaf_map[gn_node[p.genes.blocks[gi]].name] = sp_node[p.species.blocks[si]].name
    for rec in h.events:
        z = rec.descriptor.marks()
        ms = [p.species.blocks[i] for i, x in enumerate(z.species) if x]
        mg = [p.genes.blocks[p.species_genes[i][j]] for i, x in enumerate(z.species) if x for j, y in enumerate(z.genes[i]) if y]
        if len(ms) >= 2:
            node = TreeNode(rec.time, None, [sp_node.pop(blk) for blk in ms])
            sp_node[tuple(sorted(e for blk in ms for e in blk))] = node
        if len(mg) >= 2:
            node = TreeNode(rec.time, None, [gn_node.pop(blk) for blk in mg])
            gn_node[tuple(sorted(e for blk in mg for e in blk))] = node
        p = apply_marks(p, z)
    species_roots = [sp_node[blk] for blk in p.species.blocks]
    gene_roots = [gn_node[blk] for blk in p.genes.blocks]
    return TreePair(species_roots, gene_roots, leaf_map, None if h.absorbed else h.end_time)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _newick(node: TreeNode, parent_height: float | None) -> str:
    if node.is_leaf():
        label = node.name or ""
    else:
        label = "(" + ",".join(_newick(ch, node.height) for ch in node.children) + ")"
    if parent_height is None:
        return label
    return f"{label}:{_fmt(parent_height - node.height)}"


def to_newick(root: TreeNode, end_time: float | None = None) -> str:
    """Newick string; branch lengths are parent time minus child time.

    When ``end_time`` exceeds the root height the root gets a stem reaching it.
    """
    if end_time is not None and end_time > root.height:
        return _newick(root, end_time) + ";"
    return _newick(root, None) + ";"


def forest_newick(roots: list[TreeNode], end_time: float | None = None) -> str:
    """One Newick tree per line."""
    return "".join(to_newick(r, end_time) + "\n" for r in roots)
