"""Exact simulation of the restricted chain on a finite nested partition.

The Poisson point process of marks is never materialized. Holding times are
exponential at the total visible intensity and the next event is drawn
hierarchically: event class first (proportional to ``ClassRates``), then the
participating blocks. For multi-species events the species frequency p is
integrated out, so the marked species form a uniform k-subset and only the
per-species gene frequencies are drawn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .measures import Beta, ProbLaw, SnecSpec
from .partitions import EventDescriptor, MarkArray, NestedPartition, apply_marks, descriptor_of
from .rates import _gene_only_weights, _mark_count_weights, check_enumeration_guard, class_rates

__all__ = [
    "Absorbed",
    "SimState",
    "EventRecord",
    "History",
    "McEstimate",
    "replicate_rng",
    "sample_marks",
    "sample_event",
    "step",
    "run_until",
    "simulate",
    "replay",
    "mc_rate_estimate",
]


class Absorbed(Exception):
    """No visible event can occur from the current configuration."""


@dataclass(frozen=True)
class SimState:
    partition: NestedPartition
    clock: float = 0.0

    @property
    def g(self) -> tuple[int, ...]:
        return self.partition.gene_counts


@dataclass(frozen=True)
class EventRecord:
    time: float
    descriptor: EventDescriptor
    b_after: int
    g_after: int

    def to_json(self) -> dict:
        return {
            "t": self.time,
            "s": list(self.descriptor.s),
            "c": [list(row) for row in self.descriptor.c],
            "b_after": self.b_after,
            "g_after": self.g_after,
        }


@dataclass
class History:
    initial: NestedPartition
    events: list[EventRecord] = field(default_factory=list)
    seed: int | None = None
    end_time: float = 0.0
    absorbed: bool = False
    final: NestedPartition | None = None


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for replicate ``replicate`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(replicate),)))


@lru_cache(maxsize=8192)
def _class_table(spec: SnecSpec, g: tuple[int, ...]):
    cr = class_rates(spec, g)
    tags, weights = [], []

    def add(tag, w):
        if w > 0:
            tags.append(tag)
            weights.append(w)

    add(("kingman_species",), cr.kingman_species)
    for i, w in enumerate(cr.kingman_gene):
        add(("kingman_gene", i), w)
    for i, w in enumerate(cr.gene_only):
        add(("gene_only", i), w)
    for j, row in enumerate(cr.species_multi):
        for kk, w in enumerate(row):
            add(("species_multi", j, kk + 2), w)
    for j, row in enumerate(cr.species_single):
        for i, w in enumerate(row):
            add(("species_single", j, i), w)
    cum = np.cumsum(weights) if weights else np.zeros(0)
    return cr.total, tags, cum


def _pick(cum: np.ndarray, u: float) -> int:
    idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
    return min(idx, len(cum) - 1)


def _draw_weighted(weights: np.ndarray, rng: np.random.Generator) -> int:
    return _pick(np.cumsum(weights), rng.random())


def _draw_frequency(mu: ProbLaw, rng: np.random.Generator) -> float:
    comps = mu.components
    if len(comps) == 1:
        shape = comps[0][1]
    else:
        shape = comps[_draw_weighted(np.array([w for w, _ in comps]), rng)][1]
    if isinstance(shape, Beta):
        return float(rng.beta(shape.a, shape.b))
    return shape.x


def _subset(n: int, k: int, rng: np.random.Generator) -> list[int]:
    return sorted(int(x) for x in rng.permutation(n)[:k])


def sample_marks(spec: SnecSpec, g: Sequence[int], rng: np.random.Generator) -> MarkArray:
    """Draw the mark array of the next visible event from configuration ``g``."""
    g = tuple(g)
    total, tags, cum = _class_table(spec, g)
    if total <= 0 or not tags:
        raise Absorbed(f"zero total rate at g={g}")
    tag = tags[_pick(cum, rng.random())]
    b = len(g)
    X = [0] * b
    Y = [[0] * gi for gi in g]
    kind = tag[0]
    if kind == "kingman_species":
        for i in _subset(b, 2, rng):
            X[i] = 1
    elif kind == "kingman_gene":
        i = tag[1]
        X[i] = 1
        for j in _subset(g[i], 2, rng):
            Y[i][j] = 1
    elif kind == "gene_only":
        i = tag[1]
        k = 2 + _draw_weighted(_gene_only_weights(spec.gene_lambda, g[i]), rng)
        X[i] = 1
        for j in _subset(g[i], k, rng):
            Y[i][j] = 1
    elif kind == "species_multi":
        comp = spec.species[tag[1]]
        for i in _subset(b, tag[2], rng):
            X[i] = 1
            q = _draw_frequency(comp.mu_law, rng)
            if q > 0.0:
                Y[i] = [int(u < q) for u in rng.random(g[i])]
    else:  # species_single
        comp = spec.species[tag[1]]
        i = tag[2]
        m = 2 + _draw_weighted(_mark_count_weights(comp.mu_law, g[i]), rng)
        X[i] = 1
        for j in _subset(g[i], m, rng):
            Y[i][j] = 1
    return MarkArray(tuple(X), tuple(tuple(row) for row in Y))


def sample_event(spec: SnecSpec, state: SimState, rng: np.random.Generator) -> tuple[EventDescriptor, MarkArray]:
    z = sample_marks(spec, state.g, rng)
    e = descriptor_of(state.partition, z)
    assert e is not None, "sampler produced an invisible event"
    return e, z


def step(spec: SnecSpec, state: SimState, rng: np.random.Generator) -> tuple[SimState, EventRecord]:
    total = class_rates(spec, state.g).total
    if total <= 0:
        raise Absorbed(f"zero total rate at g={state.g}")
    t = state.clock + rng.exponential(1.0 / total)
    e, z = sample_event(spec, state, rng)
    p = apply_marks(state.partition, z)
    return SimState(p, t), EventRecord(t, e, len(p.species), len(p.genes))


def run_until(
    spec: SnecSpec,
    init: NestedPartition,
    horizon: float | str,
    rng: np.random.Generator,
    seed: int | None = None,
) -> History:
    """Simulate from ``init`` until ``horizon`` (exclusive) or absorption.

    ``horizon`` is a positive time, or ``"absorption"`` / ``math.inf`` to run
    until no visible event remains. ``end_time`` is the absorption time when
    the chain absorbs first, the horizon otherwise.
    """
    horizon = math.inf if horizon == "absorption" else float(horizon)
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    state = SimState(init, 0.0)
    h = History(init, seed=seed)
    while True:
        total = class_rates(spec, state.g).total
        if total <= 0:
            h.absorbed = True
            h.end_time = state.clock
            break
        t = state.clock + rng.exponential(1.0 / total)
        if t >= horizon:
            h.end_time = horizon
            break
        e, z = sample_event(spec, state, rng)
        p = apply_marks(state.partition, z)
        state = SimState(p, t)
        h.events.append(EventRecord(t, e, len(p.species), len(p.genes)))
    h.final = state.partition
    return h


def simulate(spec: SnecSpec, init: NestedPartition, horizon: float | str, seed: int, replicate: int = 0) -> History:
    return run_until(spec, init, horizon, replicate_rng(seed, replicate), seed=seed)


def replay(h: History) -> NestedPartition:
    """Re-apply the logged events to the initial state."""
    p = h.initial
    for rec in h.events:
        if rec.descriptor.g != p.gene_counts:
            raise DomainError("event log does not match the replayed configuration")
        p = apply_marks(p, rec.descriptor.marks())
    return p


@dataclass(frozen=True)
class McEstimate:
    rate: float
    se: float
    count: int


def mc_rate_estimate(
    spec: SnecSpec, g: Sequence[int], trials: int, rng: np.random.Generator
) -> dict[EventDescriptor, McEstimate]:
    """Per-event rates estimated as total rate times the empirical frequency of each first event."""
    g = tuple(g)
    check_enumeration_guard(g)
    if trials <= 0:
        return {}
    state = SimState(NestedPartition.from_counts(g))
    total = class_rates(spec, g).total
    if total <= 0:
        return {}
    counts: dict[EventDescriptor, int] = {}
    for _ in range(trials):
        e, _z = sample_event(spec, state, rng)
        counts[e] = counts.get(e, 0) + 1
    out = {}
    for e, cnt in counts.items():
        p = cnt / trials
        out[e] = McEstimate(total * p, total * math.sqrt(p * (1.0 - p) / trials), cnt)
    return out
