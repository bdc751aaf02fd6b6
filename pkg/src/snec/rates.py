"""Jump rates of the finite restrictions.

``transition_rate`` evaluates the characterization formula for one event
array (g, s, c). ``class_rates`` splits the total visible intensity into the
classes the sampler draws from; ``enumerate_transitions`` lists every event
of a small configuration and is the brute-force oracle that ties the two
together (their sums must agree).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import betaln, gammaln

from .errors import DomainError, InvalidSpecError
from .measures import Beta, Dirac, LambdaMixture, ProbLaw, SnecSpec, moment, nu_moment, p_moment
from .partitions import EventDescriptor

__all__ = [
    "ClassRates",
    "multi_mark_prob",
    "u_functional",
    "transition_rate",
    "class_rates",
    "enumerate_transitions",
    "check_enumeration_guard",
    "binomial_weights",
    "MAX_ENUM_SPECIES",
    "MAX_ENUM_GENES",
]

MAX_ENUM_SPECIES = 5
MAX_ENUM_GENES = 12


def multi_mark_prob(q: float, g: int) -> float:
    """P(at least two of g independent Bernoulli(q) marks are set)."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q = {q} outside [0, 1]")
    if g < 2:
        return 0.0
    return 1.0 - (1.0 - q) ** g - g * q * (1.0 - q) ** (g - 1)


@lru_cache(maxsize=65536)
def _moment(mu: ProbLaw, l: int, m: int) -> float:
    return moment(mu, l, m)


@lru_cache(maxsize=65536)
def _p_moment(law: ProbLaw, alpha: int, m: int) -> float:
    return p_moment(law, alpha, m)


def u_functional(mu: ProbLaw, gs: Sequence[int]) -> float:
    """Probability that independent Bernoulli(Z_i) marks, Z_i ~ mu, total exactly one."""
    gs = tuple(gs)
    if not gs:
        raise DomainError("u_functional needs at least one species")
    empty = [_moment(mu, 0, gi) for gi in gs]
    total = 0.0
    for i, gi in enumerate(gs):
        term = gi * _moment(mu, 1, gi - 1)
        if term == 0.0:
            continue
        for j, e in enumerate(empty):
            if j != i:
                term *= e
        total += term
    return total


def _p_inverse_part(comp, b: int, factor: float, j: int) -> float:
    """w * int p^-1 (1-p)^(b-1) p_law(dp) * factor, with 0 * inf = 0."""
    if factor == 0.0:
        return 0.0
    pinv = _p_moment(comp.p_law, -1, b - 1)
    if math.isinf(pinv):
        raise InvalidSpecError(
            f"species component {j + 1}: single-species events need a finite p^-1 moment "
            "when the gene-frequency law is not degenerate at 0"
        )
    return comp.weight * pinv * factor


def transition_rate(spec: SnecSpec, e: EventDescriptor) -> float:
    if not e.in_event_set():
        raise DomainError(f"event {e} violates the event-set hypotheses")
    b, k = e.b, e.k
    ls = e.l
    marked = [i for i in range(b) if e.s[i]]
    c_zero = e.total_c == 0
    rate = 0.0
    for j, comp in enumerate(spec.species):
        mu = comp.mu_law
        if k >= 2:
            inner = 1.0
            for i in marked:
                inner *= _moment(mu, ls[i], e.g[i] - ls[i])
            if c_zero:
                inner += u_functional(mu, [e.g[i] for i in marked])
            rate += comp.weight * _p_moment(comp.p_law, k - 2, b - k) * inner
        else:
            # k == 1 forces c != 0 in the event set, so the correction term never fires
            (i,) = marked
            rate += _p_inverse_part(comp, b, _moment(mu, ls[i], e.g[i] - ls[i]), j)
    if k == 2 and c_zero:
        rate += spec.a_s
    if k == 1:
        (i,) = marked
        if ls[i] == 2:
            rate += spec.a_g
        rate += nu_moment(spec.gene_lambda, ls[i], e.g[i] - ls[i])
    return rate


def binomial_weights(kingman: float, comps, g: int, shift: int) -> np.ndarray:
    """Array over k = 2..g of C(g, k) * [kingman*1{k=2} + sum_j w_j E_j[x^(k-shift) (1-x)^(g-k)]].

    ``shift = 2`` gives Lambda-coalescent merger-size rates; ``shift = 0`` gives
    the law of the number of Bernoulli marks under a probability shape.
    Terms are formed in log space so large g cannot overflow.
    """
    if g < 2:
        return np.zeros(0)
    ks = np.arange(2, g + 1)
    log_c = gammaln(g + 1) - gammaln(ks + 1) - gammaln(g - ks + 1)
    out = np.zeros(len(ks))
    if kingman:
        out[0] += kingman * g * (g - 1) / 2.0
    for w, s in comps:
        if isinstance(s, Beta):
            logm = betaln(s.a + ks - shift, s.b + g - ks) - betaln(s.a, s.b)
            out += w * np.exp(log_c + logm)
        elif isinstance(s, Dirac):
            if s.x == 1.0:
                out[-1] += w
            elif s.x > 0.0:
                logm = (ks - shift) * math.log(s.x) + (g - ks) * math.log1p(-s.x)
                out += w * np.exp(log_c + logm)
            elif shift == 0:
                continue
            else:
                raise DomainError("Dirac(0) has no Lambda-coalescent merger rates")
    return out


@lru_cache(maxsize=4096)
def _gene_only_weights(lam: LambdaMixture, g: int) -> np.ndarray:
    return binomial_weights(0.0, lam.components, g, shift=2)


@lru_cache(maxsize=4096)
def _mark_count_weights(mu: ProbLaw, g: int) -> np.ndarray:
    return binomial_weights(0.0, mu.components, g, shift=0)


@lru_cache(maxsize=4096)
def _species_size_weights(law: ProbLaw, b: int) -> np.ndarray:
    return binomial_weights(0.0, law.components, b, shift=2)


@dataclass(frozen=True)
class ClassRates:
    """Total visible intensity split by event class for a configuration ``g``.

    ``species_multi[j][k-2]`` is component j's rate of mergers of exactly k
    species (all k-subsets together); ``species_single[j][i]`` is its rate of
    gene-only events confined to species i.
    """

    g: tuple[int, ...]
    kingman_species: float
    kingman_gene: tuple[float, ...]
    gene_only: tuple[float, ...]
    species_multi: tuple[tuple[float, ...], ...]
    species_single: tuple[tuple[float, ...], ...]
    total: float


@lru_cache(maxsize=8192)
def _class_rates(spec: SnecSpec, g: tuple[int, ...]) -> ClassRates:
    b = len(g)
    ks = spec.a_s * b * (b - 1) / 2.0
    kg = tuple(spec.a_g * gi * (gi - 1) / 2.0 for gi in g)
    go = tuple(float(_gene_only_weights(spec.gene_lambda, gi).sum()) for gi in g)
    multi, single = [], []
    for j, comp in enumerate(spec.species):
        multi.append(tuple(float(x) * comp.weight for x in _species_size_weights(comp.p_law, b)))
        single.append(
            tuple(_p_inverse_part(comp, b, float(_mark_count_weights(comp.mu_law, gi).sum()), j) for gi in g)
        )
    total = ks + sum(kg) + sum(go) + sum(sum(x) for x in multi) + sum(sum(x) for x in single)
    return ClassRates(g, ks, kg, go, tuple(multi), tuple(single), total)


def class_rates(spec: SnecSpec, g: Sequence[int]) -> ClassRates:
    g = tuple(int(x) for x in g)
    if not g or any(x < 1 for x in g):
        raise DomainError(f"gene counts must be positive, got {g}")
    return _class_rates(spec, g)


def check_enumeration_guard(g: Sequence[int]) -> None:
    if len(g) > MAX_ENUM_SPECIES or sum(g) > MAX_ENUM_GENES:
        raise DomainError(
            f"enumeration limited to {MAX_ENUM_SPECIES} species and {MAX_ENUM_GENES} genes, got g={tuple(g)}"
        )


def enumerate_transitions(spec: SnecSpec, g: Sequence[int]) -> list[tuple[EventDescriptor, float]]:
    """Every event array with gene counts ``g``, paired with its rate."""
    g = tuple(int(x) for x in g)
    check_enumeration_guard(g)
    b = len(g)
    out = []
    for k in range(1, b + 1):
        for subset in itertools.combinations(range(b), k):
            s = tuple(1 if i in subset else 0 for i in range(b))
            n_marked = sum(g[i] for i in subset)
            for bits in itertools.product((0, 1), repeat=n_marked):
                total = sum(bits)
                if total == 1 or (k == 1 and total < 2):
                    continue
                c, pos = [], 0
                for i in range(b):
                    if s[i]:
                        c.append(bits[pos : pos + g[i]])
                        pos += g[i]
                    else:
                        c.append((0,) * g[i])
                e = EventDescriptor(g, s, tuple(c))
                out.append((e, transition_rate(spec, e)))
    return out
