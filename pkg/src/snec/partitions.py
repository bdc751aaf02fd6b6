"""Partitions and nested partitions of [n], coagulation, and the mark-driven merge map.

Ground sets are 1-based everywhere in the public interface. Blocks are kept
sorted internally and ordered by their least element; two partitions compare
equal iff their canonical forms agree.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

__all__ = [
    "Partition",
    "NestedPartition",
    "RecipePair",
    "MarkArray",
    "EventDescriptor",
    "restrict",
    "coag",
    "link_partition",
    "coag2",
    "is_valid_recipe",
    "is_single_merger",
    "apply_marks",
    "descriptor_of",
    "recipe_from_marks",
    "restrict_recipe",
    "set_partitions",
    "nested_partitions",
]


@dataclass(frozen=True)
class Partition:
    """A partition of {1, ..., n}.

    ``blocks`` may be given in any order and with unsorted contents; they are
    canonicalized on construction. Empty blocks are dropped.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]
    _block_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"ground set size must be nonnegative, got {self.n}")
        canon = tuple(sorted((tuple(sorted(b)) for b in self.blocks if len(b) > 0), key=lambda b: b[0]))
        block_of = [-1] * (self.n + 1)
        for idx, b in enumerate(canon):
            for e in b:
                if not 1 <= e <= self.n:
                    raise DomainError(f"element {e} outside [1, {self.n}]")
                if block_of[e] != -1:
                    raise DomainError(f"element {e} appears in two blocks")
                block_of[e] = idx
        if any(x == -1 for x in block_of[1:]):
            missing = [e for e in range(1, self.n + 1) if block_of[e] == -1]
            raise DomainError(f"blocks do not cover [1, {self.n}]; missing {missing}")
        object.__setattr__(self, "blocks", canon)
        object.__setattr__(self, "_block_of", tuple(block_of))

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def coarsest(cls, n: int) -> Partition:
        return cls(n, (tuple(range(1, n + 1)),) if n else ())

    @classmethod
    def from_labels(cls, labels: Sequence) -> Partition:
        """Build from ``labels[i-1]`` = block label of element i."""
        groups: dict = {}
        for i, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def block_of(self, element: int) -> int:
        """0-based index of the block holding ``element``."""
        return self._block_of[element]

    def same_block(self, i: int, j: int) -> bool:
        return self._block_of[i] == self._block_of[j]

    def restrict(self, m: int) -> Partition:
        if not 0 <= m <= self.n:
            raise DomainError(f"cannot restrict a partition of [{self.n}] to [{m}]")
        return Partition(m, tuple(tuple(e for e in b if e <= m) for b in self.blocks))

    def is_simple(self) -> bool:
        return sum(1 for b in self.blocks if len(b) > 1) <= 1

    def finer_than(self, other: Partition) -> bool:
        """True iff every block of self lies inside a block of ``other``."""
        if self.n != other.n:
            return False
        return all(len({other._block_of[e] for e in b}) == 1 for b in self.blocks)

    def relabel(self, perm: Sequence[int]) -> Partition:
        """Image under the permutation ``i -> perm[i-1]`` of the ground set."""
        return Partition(self.n, tuple(tuple(perm[e - 1] for e in b) for b in self.blocks))


@dataclass(frozen=True)
class NestedPartition:
    """A pair (species, genes) with the gene partition finer than the species one."""

    species: Partition
    genes: Partition
    species_genes: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.species.n != self.genes.n:
            raise DomainError("species and gene partitions live on different ground sets")
        per_species: list[list[int]] = [[] for _ in self.species.blocks]
        for gi, gb in enumerate(self.genes.blocks):
            owners = {self.species.block_of(e) for e in gb}
            if len(owners) != 1:
                raise DomainError(f"gene block {set(gb)} straddles several species blocks")
            per_species[owners.pop()].append(gi)
        # gene blocks are globally ordered by least element, so each list is too
        object.__setattr__(self, "species_genes", tuple(tuple(x) for x in per_species))

    @classmethod
    def from_blocks(cls, species: Iterable[Iterable[int]], genes: Iterable[Iterable[int]], n: int | None = None) -> NestedPartition:
        species = tuple(tuple(b) for b in species)
        genes = tuple(tuple(b) for b in genes)
        if n is None:
            n = sum(len(b) for b in species)
        return cls(Partition(n, species), Partition(n, genes))

    @classmethod
    def singletons(cls, n: int) -> NestedPartition:
        """All genes singletons, each in its own species."""
        p = Partition.singletons(n)
        return cls(p, p)

    @classmethod
    def from_counts(cls, g: Sequence[int]) -> NestedPartition:
        """Singleton genes allocated to consecutive species of sizes ``g``."""
        blocks, start = [], 1
        for gi in g:
            if gi < 1:
                raise DomainError("every species needs at least one gene")
            blocks.append(tuple(range(start, start + gi)))
            start += gi
        n = start - 1
        return cls(Partition(n, tuple(blocks)), Partition.singletons(n))

    @classmethod
    def parse(cls, text: str) -> NestedPartition:
        """Inverse of ``str``: ``"{1,2}{3} / {1}{2}{3}"``."""
        try:
            left, right = text.split("/")
        except ValueError:
            raise DomainError(f"expected 'species / genes', got {text!r}") from None

        def blocks(s):
            found = re.findall(r"\{([^{}]*)\}", s)
            if re.sub(r"\{[^{}]*\}", "", s).strip():
                raise DomainError(f"unparsable partition text {s!r}")
            return [tuple(int(x) for x in b.split(",") if x.strip()) for b in found]

        sp, gn = blocks(left), blocks(right)
        return cls.from_blocks(sp, gn)

    @property
    def n(self) -> int:
        return self.species.n

    @property
    def gene_counts(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.species_genes)

    def __str__(self) -> str:
        return f"{self.species} / {self.genes}"

    def relabel(self, perm: Sequence[int]) -> NestedPartition:
        return NestedPartition(self.species.relabel(perm), self.genes.relabel(perm))

    def precedes(self, other: NestedPartition) -> bool:
        """Componentwise partial order: self is finer than ``other`` in both levels."""
        return self.species.finer_than(other.species) and self.genes.finer_than(other.genes)

    def is_absorbed(self) -> bool:
        return len(self.species) <= 1 and len(self.genes) <= 1


@dataclass(frozen=True)
class RecipePair:
    species: Partition
    genes: Partition

    def __post_init__(self):
        if not (self.species.is_simple() and self.genes.is_simple()):
            raise DomainError("recipe components must be simple partitions")


@dataclass(frozen=True)
class MarkArray:
    """Participation marks: ``species[i]`` = X_i, ``genes[i][j]`` = Y_ij (0-based indices)."""

    species: tuple[int, ...]
    genes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(int(x) for x in self.species))
        object.__setattr__(self, "genes", tuple(tuple(int(y) for y in row) for row in self.genes))
        if len(self.genes) != len(self.species):
            raise DomainError("one gene-mark row per species is required")
        for x, row in zip(self.species, self.genes):
            if x not in (0, 1) or any(y not in (0, 1) for y in row):
                raise DomainError("marks must be 0 or 1")
            if x == 0 and any(row):
                raise DomainError("a gene cannot be marked inside an unmarked species")

    @classmethod
    def zeros(cls, g: Sequence[int]) -> MarkArray:
        return cls(tuple(0 for _ in g), tuple(tuple(0 for _ in range(gi)) for gi in g))


@dataclass(frozen=True)
class EventDescriptor:
    """A coalescence event (g, s, c) on a configuration of ``len(g)`` species."""

    g: tuple[int, ...]
    s: tuple[int, ...]
    c: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(x) for x in self.g))
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        object.__setattr__(self, "c", tuple(tuple(int(y) for y in row) for row in self.c))
        if len(self.s) != len(self.g) or len(self.c) != len(self.g):
            raise DomainError("s and c need one entry per species")
        if any(len(row) != gi for row, gi in zip(self.c, self.g)):
            raise DomainError("c_i must have length g_i")

    @property
    def b(self) -> int:
        return len(self.g)

    @property
    def k(self) -> int:
        return sum(self.s)

    @property
    def l(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.c)

    @property
    def total_c(self) -> int:
        return sum(sum(row) for row in self.c)

    def in_event_set(self) -> bool:
        """Gene marks only inside marked species, a visible change, and never exactly one gene mark in total."""
        if any(x not in (0, 1) for x in self.s) or any(y not in (0, 1) for row in self.c for y in row):
            return False
        if any(si == 0 and any(row) for si, row in zip(self.s, self.c)):
            return False
        tc = self.total_c
        if tc < 2 and self.k < 2:
            return False
        return tc != 1

    def marks(self) -> MarkArray:
        return MarkArray(self.s, self.c)

    def key(self) -> tuple:
        return (self.s, self.c)


def restrict(p: NestedPartition, m: int) -> NestedPartition:
    if not 1 <= m <= p.n:
        raise DomainError(f"restriction size {m} outside [1, {p.n}]")
    return NestedPartition(p.species.restrict(m), p.genes.restrict(m))


def coag(p: Partition, recipe: Partition) -> Partition:
    """Block j of the result is the union of p's blocks indexed by recipe block j."""
    if recipe.n < len(p):
        raise DomainError(f"recipe on [{recipe.n}] cannot coagulate {len(p)} blocks")
    nb = len(p)
    return Partition(p.n, tuple(tuple(e for i in rb if i <= nb for e in p.blocks[i - 1]) for rb in recipe.blocks))


def link_partition(p: NestedPartition) -> Partition:
    """The partition of gene-block labels 1..|genes| grouping genes by species."""
    labels = [0] * len(p.genes)
    for si, members in enumerate(p.species_genes):
        for gi in members:
            labels[gi] = si
    return Partition.from_labels(labels)


def coag2(p: NestedPartition, r: RecipePair) -> tuple[Partition, Partition]:
    return coag(p.species, r.species), coag(p.genes, r.genes)


def is_valid_recipe(p: NestedPartition, r: RecipePair) -> bool:
    sp, gn = coag2(p, r)
    return gn.finer_than(sp)


def _merged_block(recipe: Partition) -> tuple[int, ...]:
    return next((b for b in recipe.blocks if len(b) > 1), ())


def is_single_merger(p: NestedPartition, r: RecipePair) -> bool:
    """True iff the recipe is one coalescence event of the chain.

    Stricter than ``is_valid_recipe``: a gene merger must take place inside
    the species merger when there is one, and inside a single species
    otherwise. These are exactly the recipes produced by visible mark arrays.
    """
    if not is_valid_recipe(p, r):
        return False
    sp = [i for i in _merged_block(r.species) if i <= len(p.species)]
    gn = [i for i in _merged_block(r.genes) if i <= len(p.genes)]
    if len(gn) < 2 or len(sp) < 2:
        return True
    owners = {p.species.block_of(p.genes.blocks[i - 1][0]) + 1 for i in gn}
    return owners <= set(sp)


def _check_dims(p: NestedPartition, z: MarkArray) -> None:
    g = p.gene_counts
    if len(z.species) != len(g) or any(len(row) != gi for row, gi in zip(z.genes, g)):
        raise DomainError(f"mark array shape does not match gene counts {g}")


def apply_marks(p: NestedPartition, z: MarkArray) -> NestedPartition:
    """Merge every marked species into one and every marked gene into one."""
    _check_dims(p, z)
    marked_species = [i for i, x in enumerate(z.species) if x]
    marked_genes = [p.species_genes[i][j] for i in marked_species for j, y in enumerate(z.genes[i]) if y]
    species, genes = p.species, p.genes
    if len(marked_species) >= 2:
        species = _merge(species, marked_species)
    if len(marked_genes) >= 2:
        genes = _merge(genes, marked_genes)
    if species is p.species and genes is p.genes:
        return p
    return NestedPartition(species, genes)


def _merge(p: Partition, idx: Sequence[int]) -> Partition:
    chosen = set(idx)
    merged = tuple(e for i in idx for e in p.blocks[i])
    rest = tuple(b for i, b in enumerate(p.blocks) if i not in chosen)
    return Partition(p.n, rest + (merged,))


def descriptor_of(p: NestedPartition, z: MarkArray) -> EventDescriptor | None:
    """The (g, s, c) array of a mark array, or None when the marks change nothing."""
    _check_dims(p, z)
    k = sum(z.species)
    total = sum(sum(row) for row in z.genes)
    if k == 0 or (k == 1 and total <= 1):
        return None
    c = z.genes if total >= 2 else tuple(tuple(0 for _ in row) for row in z.genes)
    return EventDescriptor(p.gene_counts, z.species, c)


def recipe_from_marks(p: NestedPartition, z: MarkArray) -> RecipePair:
    """The simple recipe pair whose coagulation equals ``apply_marks(p, z)``."""
    _check_dims(p, z)
    sp = [i + 1 for i, x in enumerate(z.species) if x]
    gn = [p.species_genes[i][j] + 1 for i, x in enumerate(z.species) if x for j, y in enumerate(z.genes[i]) if y]
    return RecipePair(_simple(len(p.species), sp), _simple(len(p.genes), gn))


def restrict_recipe(p: NestedPartition, m: int, r: RecipePair) -> RecipePair:
    """The recipe on the blocks of ``restrict(p, m)`` induced by ``r`` on the blocks of p.

    Each restricted block is identified with the full block holding its least
    element, so ``coag2(restrict(p, m), restrict_recipe(p, m, r))`` equals
    ``restrict`` of ``coag2(p, r)`` whenever the latter is nested.
    """
    small = restrict(p, m)

    def carry(full: Partition, part: Partition, recipe: Partition) -> Partition:
        return Partition.from_labels([recipe.block_of(full.block_of(b[0]) + 1) for b in part.blocks])

    return RecipePair(carry(p.species, small.species, r.species), carry(p.genes, small.genes, r.genes))


def _simple(m: int, merged: list[int]) -> Partition:
    if len(merged) < 2:
        return Partition.singletons(m)
    chosen = set(merged)
    return Partition(m, (tuple(merged),) + tuple((i,) for i in range(1, m + 1) if i not in chosen))


def set_partitions(n: int) -> Iterator[Partition]:
    """All partitions of [n], via restricted growth strings."""
    if n == 0:
        yield Partition(0, ())
        return
    labels = [0] * n

    def rec(i, top):
        if i == n:
            yield Partition.from_labels(labels)
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    labels[0] = 0
    yield from rec(1, 0)


def nested_partitions(n: int) -> Iterator[NestedPartition]:
    """All nested partitions of [n]: every species partition with every refinement of it."""
    parts = list(set_partitions(n))
    for sp in parts:
        for gn in parts:
            if gn.finer_than(sp):
                yield NestedPartition(sp, gn)
