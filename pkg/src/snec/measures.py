"""Parametric characteristics (a_s, a_g, nu_s, nu_g) and their closed-form integrals.

Both coagulation measures are stored through their finite reweightings:
the gene measure as ``q^2 nu_g(dq)`` and each species component as
``p^2 nu_s(dp)`` (a weight times a probability shape on (0, 1]) paired with a
gene-frequency law ``mu``. Every integral the rates and the marginals need is
then a Beta-function ratio or a point evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from scipy.special import betaln

from .errors import DomainError, InvalidSpecError, SpecFormatError

__all__ = [
    "Dirac",
    "Beta",
    "ProbLaw",
    "LambdaMixture",
    "SpeciesComponent",
    "SnecSpec",
    "ValidationReport",
    "moment",
    "p_moment",
    "nu_moment",
    "second_moment",
    "validate",
    "marginal_species_lambda",
    "marginal_gene_lambda",
    "species_x_integral",
    "spec_from_dict",
    "spec_to_dict",
]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Dirac:
    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise DomainError(f"Dirac point {self.x} outside [0, 1]")

    def moment(self, l: int, m: int) -> float:
        """x^l (1-x)^m; ``l`` may be -1."""
        if l < 0 and self.x == 0.0:
            return math.inf
        return self.x**l * (1.0 - self.x) ** m


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"Beta parameters must be positive, got ({self.a}, {self.b})")

    def moment(self, l: int, m: int) -> float:
        """B(a+l, b+m) / B(a, b); infinite when a + l <= 0."""
        if self.a + l <= 0 or self.b + m <= 0:
            return math.inf
        return math.exp(betaln(self.a + l, self.b + m) - betaln(self.a, self.b))


Shape = Union[Dirac, Beta]


@dataclass(frozen=True)
class ProbLaw:
    """A probability law on [0, 1]: a convex mixture of Dirac and Beta shapes."""

    components: tuple[tuple[float, Shape], ...]

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise DomainError("a probability law needs at least one component")
        if any(w < 0 for w, _ in comps):
            raise DomainError("mixture weights must be nonnegative")
        if abs(sum(w for w, _ in comps) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"mixture weights sum to {sum(w for w, _ in comps)}, not 1")
        object.__setattr__(self, "components", tuple((w, s) for w, s in comps if w > 0))

    @classmethod
    def dirac(cls, x: float) -> ProbLaw:
        return cls(((1.0, Dirac(x)),))

    @classmethod
    def beta(cls, a: float, b: float) -> ProbLaw:
        return cls(((1.0, Beta(a, b)),))

    def atom_mass(self, x: float) -> float:
        return sum(w for w, s in self.components if isinstance(s, Dirac) and s.x == x)


def moment(mu: ProbLaw, l: int, m: int) -> float:
    """Integral of q^l (1-q)^m against ``mu``."""
    if l < 0 or m < 0:
        raise DomainError("moment exponents must be nonnegative")
    return sum(w * s.moment(l, m) for w, s in mu.components)


def p_moment(law: ProbLaw, alpha: int, m: int) -> float:
    """Integral of p^alpha (1-p)^m; ``alpha = -1`` is allowed and may be infinite."""
    total = 0.0
    for w, s in law.components:
        total += w * s.moment(alpha, m)
    return total


def second_moment(mu: ProbLaw) -> float:
    return moment(mu, 2, 0)


@dataclass(frozen=True)
class LambdaMixture:
    """Finite measure kingman * delta_0 + sum_j w_j * shape_j on [0, 1]."""

    kingman: float = 0.0
    components: tuple[tuple[float, Shape], ...] = ()

    def __post_init__(self):
        if self.kingman < 0:
            raise DomainError("Kingman coefficient must be nonnegative")
        comps = tuple((float(w), s) for w, s in self.components)
        for w, s in comps:
            if w <= 0:
                raise DomainError("component weights must be positive")
            if isinstance(s, Dirac) and s.x == 0.0:
                raise DomainError("mass at 0 belongs in the Kingman coefficient")
        object.__setattr__(self, "kingman", float(self.kingman))
        object.__setattr__(self, "components", comps)

    @property
    def mass(self) -> float:
        return self.kingman + sum(w for w, _ in self.components)

    def atom_at_one(self) -> bool:
        return any(isinstance(s, Dirac) and s.x == 1.0 for _, s in self.components)


def nu_moment(lam: LambdaMixture, l: int, m: int) -> float:
    """Integral of x^(l-2) (1-x)^m against Lambda, i.e. of x^l (1-x)^m against nu."""
    if l < 2:
        raise DomainError(f"nu_moment needs l >= 2, got {l}")
    if m < 0:
        raise DomainError("m must be nonnegative")
    total = lam.kingman if l == 2 else 0.0
    for w, s in lam.components:
        total += w * s.moment(l - 2, m)
    return total


@dataclass(frozen=True)
class SpeciesComponent:
    """Finite piece ``weight * p_law(dp)`` of p^2 nu_s, with gene-frequency law ``mu_law``."""

    weight: float
    p_law: ProbLaw
    mu_law: ProbLaw

    def __post_init__(self):
        if self.weight <= 0:
            raise DomainError("species component weight must be positive")
        if self.p_law.atom_mass(0.0) > 0:
            raise DomainError("species p-law must not charge 0")

    @property
    def gene_second_moment(self) -> float:
        return second_moment(self.mu_law)

    @property
    def p_inverse(self) -> float:
        return p_moment(self.p_law, -1, 0)


@dataclass(frozen=True)
class SnecSpec:
    a_s: float = 0.0
    a_g: float = 0.0
    gene_lambda: LambdaMixture = field(default_factory=LambdaMixture)
    species: tuple[SpeciesComponent, ...] = ()

    def __post_init__(self):
        if self.a_s < 0 or self.a_g < 0:
            raise DomainError("Kingman coefficients must be nonnegative")
        if self.gene_lambda.kingman != 0:
            raise DomainError("the gene Kingman part lives in a_g, not in gene_lambda")
        object.__setattr__(self, "a_s", float(self.a_s))
        object.__setattr__(self, "a_g", float(self.a_g))
        object.__setattr__(self, "species", tuple(self.species))


@dataclass(frozen=True)
class ValidationReport:
    species_p2_mass: float
    species_gene_condition: float
    gene_q2_mass: float
    species_atom_at_one: bool
    gene_atom_at_one: bool
    problems: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.problems

    def lines(self) -> list[str]:
        cond2 = "violated" if math.isinf(self.species_gene_condition) else f"{self.species_gene_condition:.12g}"
        out = [
            f"species p^2 mass: {self.species_p2_mass:.12g}",
            f"species p * E_mu[q^2] integral: {cond2}",
            f"gene q^2 mass: {self.gene_q2_mass:.12g}",
            f"species measure charges 1: {self.species_atom_at_one}",
            f"gene measure charges 1: {self.gene_atom_at_one}",
        ]
        out += self.problems
        out.append("valid" if self.valid else "INVALID")
        return out


def validate(spec: SnecSpec) -> ValidationReport:
    problems = []
    cond2 = 0.0
    for j, comp in enumerate(spec.species):
        m2 = comp.gene_second_moment
        if m2 == 0.0:
            continue
        pinv = comp.p_inverse
        if math.isinf(pinv):
            cond2 = math.inf
            problems.append(
                f"condition species-2 violated: component {j + 1} has E_mu[q^2] = {m2:.6g} > 0 "
                "but an infinite p^-1 moment (Beta p-shapes need a > 1)"
            )
        else:
            cond2 += comp.weight * pinv * m2
    species_one = any(c.p_law.atom_mass(1.0) > 0 for c in spec.species)
    gene_one = spec.gene_lambda.atom_at_one() or any(c.mu_law.atom_mass(1.0) > 0 for c in spec.species)
    return ValidationReport(
        species_p2_mass=sum(c.weight for c in spec.species),
        species_gene_condition=cond2,
        gene_q2_mass=spec.gene_lambda.mass,
        species_atom_at_one=species_one,
        gene_atom_at_one=gene_one,
        problems=tuple(problems),
    )


def marginal_species_lambda(spec: SnecSpec) -> LambdaMixture:
    comps = tuple((c.weight * w, s) for c in spec.species for w, s in c.p_law.components)
    return LambdaMixture(spec.a_s, comps)


def _q2_reweighted(mu: ProbLaw) -> list[tuple[float, Shape]]:
    """q^2 mu(dq) as a list of (mass, probability shape)."""
    out = []
    for w, s in mu.components:
        if isinstance(s, Dirac):
            if s.x > 0:
                out.append((w * s.x**2, s))
        else:
            out.append((w * s.moment(2, 0), Beta(s.a + 2, s.b)))
    return out


def marginal_gene_lambda(spec: SnecSpec) -> LambdaMixture:
    comps = list(spec.gene_lambda.components)
    for j, c in enumerate(spec.species):
        if c.gene_second_moment == 0.0:
            continue
        pinv = c.p_inverse
        if math.isinf(pinv):
            raise InvalidSpecError(f"species component {j + 1} makes the gene marginal infinite")
        comps += [(c.weight * pinv * m, s) for m, s in _q2_reweighted(c.mu_law) if m > 0]
    return LambdaMixture(spec.a_g, tuple(comps))


def species_x_integral(spec: SnecSpec) -> float:
    """Integral of x against the species coagulation measure; ``math.inf`` when divergent."""
    return sum(c.weight * c.p_inverse for c in spec.species)


# --- JSON schema -----------------------------------------------------------

_LAW_KEYS = {"dirac": {"kind", "x"}, "beta": {"kind", "a", "b"}, "mixture": {"kind", "components"}}


def _check_keys(d: dict, allowed: set, required: set, where: str) -> None:
    if not isinstance(d, dict):
        raise SpecFormatError(f"{where}: expected an object")
    extra = set(d) - allowed
    if extra:
        raise SpecFormatError(f"{where}: unknown keys {sorted(extra)}")
    missing = required - set(d)
    if missing:
        raise SpecFormatError(f"{where}: missing keys {sorted(missing)}")


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecFormatError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _shape_from_dict(d: dict, where: str, extra: frozenset = frozenset()) -> Shape:
    kind = d.get("kind") if isinstance(d, dict) else None
    if kind == "dirac":
        _check_keys(d, _LAW_KEYS["dirac"] | extra, _LAW_KEYS["dirac"] | extra, where)
        return Dirac(_num(d["x"], where))
    if kind == "beta":
        _check_keys(d, _LAW_KEYS["beta"] | extra, _LAW_KEYS["beta"] | extra, where)
        return Beta(_num(d["a"], where), _num(d["b"], where))
    raise SpecFormatError(f"{where}: unknown kind {kind!r}")


def _law_from_dict(d: dict, where: str) -> ProbLaw:
    if isinstance(d, dict) and d.get("kind") == "mixture":
        _check_keys(d, _LAW_KEYS["mixture"], _LAW_KEYS["mixture"], where)
        comps = []
        for i, item in enumerate(d["components"]):
            _check_keys(item, {"weight", "law"}, {"weight", "law"}, f"{where}.components[{i}]")
            comps.append((_num(item["weight"], where), _shape_from_dict(item["law"], f"{where}.components[{i}].law")))
        return ProbLaw(tuple(comps))
    return ProbLaw(((1.0, _shape_from_dict(d, where)),))


def spec_from_dict(d: dict) -> SnecSpec:
    """Parse the JSON spec schema; raises SpecFormatError on malformed input."""
    _check_keys(d, {"a_s", "a_g", "gene_lambda", "species"}, {"a_s", "a_g"}, "spec")
    try:
        gl = []
        for i, item in enumerate(d.get("gene_lambda", [])):
            w = _num(item.get("weight") if isinstance(item, dict) else None, f"gene_lambda[{i}].weight")
            gl.append((w, _shape_from_dict(item, f"gene_lambda[{i}]", frozenset({"weight"}))))
        species = []
        for i, item in enumerate(d.get("species", [])):
            where = f"species[{i}]"
            _check_keys(item, {"weight", "p_law", "mu_law"}, {"weight", "p_law", "mu_law"}, where)
            species.append(
                SpeciesComponent(
                    _num(item["weight"], where),
                    _law_from_dict(item["p_law"], where + ".p_law"),
                    _law_from_dict(item["mu_law"], where + ".mu_law"),
                )
            )
        return SnecSpec(_num(d["a_s"], "a_s"), _num(d["a_g"], "a_g"), LambdaMixture(0.0, tuple(gl)), tuple(species))
    except DomainError as e:
        raise SpecFormatError(str(e)) from e


def _shape_to_dict(s: Shape) -> dict:
    if isinstance(s, Dirac):
        return {"kind": "dirac", "x": s.x}
    return {"kind": "beta", "a": s.a, "b": s.b}


def _law_to_dict(law: ProbLaw) -> dict:
    if len(law.components) == 1:
        return _shape_to_dict(law.components[0][1])
    return {"kind": "mixture", "components": [{"weight": w, "law": _shape_to_dict(s)} for w, s in law.components]}


def spec_to_dict(spec: SnecSpec) -> dict:
    return {
        "a_s": spec.a_s,
        "a_g": spec.a_g,
        "gene_lambda": [dict(_shape_to_dict(s), weight=w) for w, s in spec.gene_lambda.components],
        "species": [
            {"weight": c.weight, "p_law": _law_to_dict(c.p_law), "mu_law": _law_to_dict(c.mu_law)}
            for c in spec.species
        ],
    }
