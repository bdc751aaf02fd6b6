import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import intro_state, ten_element_state
from snec.errors import DomainError
from snec.partitions import (
    EventDescriptor,
    MarkArray,
    NestedPartition,
    Partition,
    RecipePair,
    apply_marks,
    coag,
    coag2,
    descriptor_of,
    is_single_merger,
    is_valid_recipe,
    link_partition,
    nested_partitions,
    recipe_from_marks,
    restrict,
    restrict_recipe,
    set_partitions,
)

BELL = [1, 1, 2, 5, 15, 52, 203]


def P(n, *blocks):
    return Partition(n, blocks)


def all_marks(g):
    """Every mark array on gene counts g."""
    for X in itertools.product((0, 1), repeat=len(g)):
        rows = [itertools.product((0, 1), repeat=gi) if x else [(0,) * gi] for x, gi in zip(X, g)]
        for Y in itertools.product(*rows):
            yield MarkArray(X, Y)


# --- Partition -------------------------------------------------------------


def test_partition_canonical_order():
    p = P(5, (4, 2), (5,), (3, 1))
    assert p.blocks == ((1, 3), (2, 4), (5,))
    assert str(p) == "{1,3}{2,4}{5}"
    assert p == P(5, (5,), (1, 3), (2, 4))


@pytest.mark.parametrize(
    "n, blocks",
    [(3, ((1, 2),)), (3, ((1, 2), (2, 3))), (2, ((1, 2, 3),)), (-1, ())],
)
def test_partition_rejects_bad_blocks(n, blocks):
    with pytest.raises(DomainError):
        Partition(n, blocks)


@pytest.mark.parametrize("n", range(7))
def test_set_partitions_counts_are_bell_numbers(n):
    parts = list(set_partitions(n))
    assert len(parts) == BELL[n]
    assert len(set(parts)) == BELL[n]


def test_nested_partition_rejects_straddling_gene_block():
    with pytest.raises(DomainError):
        NestedPartition(P(3, (1, 2), (3,)), P(3, (1,), (2, 3)))


def test_text_form_round_trip():
    text = "{1,5,7}{2,4,8,10}{3,6,9} / {1}{2,4}{3}{5,7}{6,9}{8}{10}"
    p = NestedPartition.parse(text)
    assert str(p) == text
    assert p.gene_counts == (2, 3, 2)


@pytest.mark.parametrize("bad", ["{1,2}{3}", "{1}{2} / {1}x{2}", "{1,2} / {1}{3}"])
def test_text_form_rejects_garbage(bad):
    with pytest.raises(DomainError):
        NestedPartition.parse(bad)


def test_from_counts_layout():
    p = NestedPartition.from_counts((2, 1, 3))
    assert str(p) == "{1,2}{3}{4,5,6} / {1}{2}{3}{4}{5}{6}"


# --- restrict --------------------------------------------------------------


def test_restrict_ten_element_state_to_four():
    r = restrict(ten_element_state(), 4)
    assert r.species == P(4, (1,), (2, 4), (3,))
    assert r.genes == P(4, (1,), (2, 4), (3,))


def test_restrict_identity_and_singleton():
    p = ten_element_state()
    assert restrict(p, p.n) == p
    assert restrict(p, 1) == NestedPartition(P(1, (1,)), P(1, (1,)))


@pytest.mark.parametrize("m", [0, 11, -3])
def test_restrict_out_of_range(m):
    with pytest.raises(DomainError):
        restrict(ten_element_state(), m)


# --- coag / link -----------------------------------------------------------


def test_coag_with_link_partition_recovers_species():
    p = ten_element_state()
    recipe = P(7, (1, 4), (2, 6, 7), (3, 5))
    assert coag(p.genes, recipe) == p.species


def test_coag_trivial_cases():
    p = ten_element_state().genes
    assert coag(p, Partition.singletons(len(p))) == p
    assert coag(Partition.singletons(3), P(3, (1, 2), (3,))) == P(3, (1, 2), (3,))


def test_coag_recipe_too_small():
    with pytest.raises(DomainError):
        coag(Partition.singletons(4), Partition.singletons(3))


def test_link_partition_examples():
    p = ten_element_state()
    assert link_partition(p) == P(7, (1, 4), (2, 6, 7), (3, 5))
    same = NestedPartition(p.species, p.species)
    assert link_partition(same) == Partition.singletons(3)
    flat = NestedPartition(Partition.coarsest(4), Partition.singletons(4))
    assert link_partition(flat) == Partition.coarsest(4)


# --- coag2 / recipe validity -----------------------------------------------


def test_coag2_can_break_nestedness():
    p = ten_element_state()
    r = RecipePair(P(3, (1, 2), (3,)), P(7, (1, 3), (2,), (4,), (5,), (6,), (7,)))
    sp, gn = coag2(p, r)
    assert not gn.finer_than(sp)
    assert not is_valid_recipe(p, r)


def test_coag2_identity():
    p = ten_element_state()
    r = RecipePair(Partition.singletons(3), Partition.singletons(7))
    assert coag2(p, r) == (p.species, p.genes)
    assert is_valid_recipe(p, r)


def transition_a():
    return RecipePair(P(3, (1, 2), (3,)), P(6, (1, 2, 3), (4,), (5,), (6,)))


def transition_c():
    return RecipePair(P(3, (1, 2), (3,)), P(6, (1,), (2,), (3,), (4,), (5, 6)))


def test_transition_a():
    p = intro_state()
    sp, gn = coag2(p, transition_a())
    assert sp == P(6, (1, 2, 3, 4), (5, 6))
    assert gn == P(6, (1, 2, 3), (4,), (5,), (6,))
    assert is_valid_recipe(p, transition_a())
    assert is_single_merger(p, transition_a())


def test_transition_c_is_nested_but_not_a_single_merger():
    # the result stays nested (genes 5, 6 share a species), but the gene
    # merger happens outside the merging species, so no event produces it
    p = intro_state()
    assert is_valid_recipe(p, transition_c())
    assert not is_single_merger(p, transition_c())


def test_recipe_pair_must_be_simple():
    with pytest.raises(DomainError):
        RecipePair(P(4, (1, 2), (3, 4)), Partition.singletons(4))


# --- marks -----------------------------------------------------------------


def test_apply_marks_transition_a():
    p = intro_state()
    z = MarkArray((1, 1, 0), ((1, 1), (1, 0), (0, 0)))
    assert apply_marks(p, z) == NestedPartition(*coag2(p, transition_a()))
    assert descriptor_of(p, z) == EventDescriptor((2, 2, 2), (1, 1, 0), ((1, 1), (1, 0), (0, 0)))


def test_apply_marks_zero_is_identity():
    p = intro_state()
    assert apply_marks(p, MarkArray.zeros(p.gene_counts)) == p
    assert descriptor_of(p, MarkArray.zeros(p.gene_counts)) is None


def test_single_gene_mark_merges_species_only():
    p = intro_state()
    z = MarkArray((1, 1, 0), ((0, 1), (0, 0), (0, 0)))
    out = apply_marks(p, z)
    assert out.species == P(6, (1, 2, 3, 4), (5, 6))
    assert out.genes == p.genes
    assert descriptor_of(p, z).c == ((0, 0), (0, 0), (0, 0))


def test_lone_species_with_one_gene_is_invisible():
    p = intro_state()
    z = MarkArray((1, 0, 0), ((1, 0), (0, 0), (0, 0)))
    assert descriptor_of(p, z) is None
    assert apply_marks(p, z) == p


def test_marks_dimension_mismatch():
    p = intro_state()
    with pytest.raises(DomainError):
        apply_marks(p, MarkArray.zeros((2, 2)))
    with pytest.raises(DomainError):
        descriptor_of(p, MarkArray.zeros((2, 2, 1)))


def test_mark_array_rejects_gene_mark_in_unmarked_species():
    with pytest.raises(DomainError):
        MarkArray((0, 1), ((1,), (0,)))


@pytest.mark.parametrize(
    "s, c, ok",
    [
        ((1, 1), ((0, 0), (0,)), True),
        ((1, 0), ((1, 1), (0,)), True),
        ((1, 0), ((1, 0), (0,)), False),  # lone species, one gene
        ((0, 1), ((1, 1), (0,)), False),  # gene mark outside marked species
        ((1, 1), ((1, 0), (0,)), False),  # exactly one gene mark
        ((1, 0), ((0, 0), (0,)), False),
    ],
)
def test_event_set_hypotheses(s, c, ok):
    assert EventDescriptor((2, 1), s, c).in_event_set() is ok


def test_descriptor_marks_round_trip():
    for z in all_marks((2, 1, 2)):
        e = descriptor_of(NestedPartition.from_counts((2, 1, 2)), z)
        if e is not None:
            assert e.in_event_set()
            if e.total_c >= 2:
                assert e.marks() == z


# --- exhaustive invariants -------------------------------------------------


def simple_recipes(m):
    """Every simple partition of [m]."""
    seen = set()
    for size in range(0, m + 1):
        for blk in itertools.combinations(range(1, m + 1), size):
            rec = Partition(m, (blk,) + tuple((i,) for i in range(1, m + 1) if i not in blk)) if size else Partition.singletons(m)
            if rec not in seen:
                seen.add(rec)
                yield rec


@pytest.mark.parametrize("n", range(1, 7))
def test_link_coag_round_trip_exhaustive(n):
    for p in nested_partitions(n):
        assert coag(p.genes, link_partition(p)) == p.species


@pytest.mark.parametrize("n", range(1, 5))
def test_valid_recipes_give_nested_coarser_states(n):
    for p in nested_partitions(n):
        for rs in simple_recipes(len(p.species)):
            for rg in simple_recipes(len(p.genes)):
                r = RecipePair(rs, rg)
                sp, gn = coag2(p, r)
                nested = gn.finer_than(sp)
                assert is_valid_recipe(p, r) == nested
                if nested:
                    assert p.precedes(NestedPartition(sp, gn))


@pytest.mark.parametrize("n", range(1, 5))
def test_visible_marks_match_recipes_and_single_mergers(n):
    for p in nested_partitions(n):
        produced = set()
        for z in all_marks(p.gene_counts):
            if descriptor_of(p, z) is None:
                continue
            r = recipe_from_marks(p, z)
            assert apply_marks(p, z) == NestedPartition(*coag2(p, r))
            assert is_single_merger(p, r)
            produced.add(apply_marks(p, z))
        for rs in simple_recipes(len(p.species)):
            for rg in simple_recipes(len(p.genes)):
                r = RecipePair(rs, rg)
                if is_single_merger(p, r):
                    out = NestedPartition(*coag2(p, r))
                    assert out == p or out in produced


@st.composite
def nested_states(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    sp_labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    gn_labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    species = Partition.from_labels(sp_labels)
    genes = Partition.from_labels(list(zip(sp_labels, gn_labels)))
    return NestedPartition(species, genes)


@given(nested_states(), st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_permutation_equivariance(p, rnd):
    perm = list(range(1, p.n + 1))
    rnd.shuffle(perm)
    q = p.relabel(perm)
    g = p.gene_counts
    X = tuple(rnd.randint(0, 1) for _ in g)
    Y = tuple(tuple(rnd.randint(0, 1) if x else 0 for _ in range(gi)) for x, gi in zip(X, g))
    z = MarkArray(X, Y)
    # carry the marks over to q block by block
    sp_map = [q.species.block_of(perm[b[0] - 1]) for b in p.species.blocks]
    X2 = [0] * len(q.species)
    Y2 = [[0] * gi for gi in q.gene_counts]
    for i, members in enumerate(p.species_genes):
        X2[sp_map[i]] = X[i]
        for j, gb in enumerate(members):
            qg = q.genes.block_of(perm[p.genes.blocks[gb][0] - 1])
            Y2[sp_map[i]][q.species_genes[sp_map[i]].index(qg)] = Y[i][j]
    z2 = MarkArray(tuple(X2), tuple(tuple(r) for r in Y2))
    assert apply_marks(p, z).relabel(perm) == apply_marks(q, z2)


@given(nested_states(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_apply_marks_always_nested_and_coarser(p, rnd):
    g = p.gene_counts
    X = tuple(rnd.randint(0, 1) for _ in g)
    Y = tuple(tuple(rnd.randint(0, 1) if x else 0 for _ in range(gi)) for x, gi in zip(X, g))
    out = apply_marks(p, MarkArray(X, Y))
    assert out.genes.finer_than(out.species)
    assert p.precedes(out)


def test_restriction_commutes_with_coag2_sample():
    # the full exhaustive version lives in the acceptance suite
    rnd = random.Random(3)
    states = list(nested_partitions(4))
    for p in rnd.sample(states, 10):
        for z in all_marks(p.gene_counts):
            out = apply_marks(p, z)
            r = recipe_from_marks(p, z)
            for m in range(1, p.n + 1):
                assert restrict(out, m) == NestedPartition(*coag2(restrict(p, m), restrict_recipe(p, m, r)))
