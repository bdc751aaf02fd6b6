"""Coming down from infinity: Lambda-coalescent criteria and the nested trichotomy.

Verdicts come from an exact rule table whenever the measure belongs to a
family it covers (Kingman atom, point masses only, a single Beta shape).
Other mixtures fall back on a numeric reading of psi; that fallback can
report INCONCLUSIVE and never certifies anything.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.special import betaln

from .errors import DomainError
from .measures import Beta, Dirac, LambdaMixture, SnecSpec, marginal_gene_lambda, marginal_species_lambda, species_x_integral, validate

__all__ = [
    "Verdict",
    "Method",
    "CdiVerdict",
    "SnecCdiCase",
    "psi",
    "psi_growth_exponent",
    "schweinsberg_partial_sums",
    "lambda_cdi",
    "snec_cdi",
    "cdi_report",
]

BETA_BOUNDARY_TOL = 1e-9
# psi is read over [Q_LO, Q_HI]; exponent thresholds as in CDI_ABOVE / NOT_CDI_BELOW
Q_LO, Q_HI = 1e3, 1e6
CDI_ABOVE = 1.05
NOT_CDI_BELOW = 1.01


class Verdict(str, Enum):
    CDI = "CDI"
    NOT_CDI = "NOT_CDI"
    INCONCLUSIVE = "INCONCLUSIVE"


class Method(str, Enum):
    RULE = "closed-form-rule"
    PSI = "psi-numeric"
    SCHWEINSBERG = "schweinsberg-partial"


@dataclass(frozen=True)
class CdiVerdict:
    value: Verdict
    method: Method
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"verdict": self.value.value, "method": self.method.value, **self.diagnostics}


@dataclass(frozen=True)
class SnecCdiCase:
    case: str  # "i", "ii", "iii", "NOT_APPLICABLE", "INCONCLUSIVE"
    gene: CdiVerdict | None
    species: CdiVerdict | None
    x_integral: float
    reason: str = ""


def _phi(y: float) -> float:
    """e^-y - 1 + y without cancellation for small y."""
    if y < 1e-3:
        return y * y * (0.5 - y * (1.0 / 6.0 - y * (1.0 / 24.0 - y / 120.0)))
    return math.expm1(-y) + y


def _kernel(q: float, x: float) -> float:
    """(e^-qx - 1 + qx) / x^2, continuous at x = 0."""
    if x == 0.0:
        return 0.5 * q * q
    return _phi(q * x) / (x * x)


def _psi_beta(s: Beta, q: float) -> float:
    lognorm = betaln(s.a, s.b)
    cut = min(1.0, 10.0 / q)
    opts = dict(epsabs=0.0, epsrel=1e-10, limit=200)
    if cut >= 1.0:
        val, _ = quad(lambda x: _kernel(q, x), 0.0, 1.0, weight="alg", wvar=(s.a - 1, s.b - 1), **opts)
        return val * math.exp(-lognorm)
    left, _ = quad(
        lambda x: _kernel(q, x) * (1.0 - x) ** (s.b - 1), 0.0, cut, weight="alg", wvar=(s.a - 1, 0.0), **opts
    )
    right, _ = quad(
        lambda x: _kernel(q, x) * x ** (s.a - 1), cut, 1.0, weight="alg", wvar=(0.0, s.b - 1), **opts
    )
    return (left + right) * math.exp(-lognorm)


def psi(lam: LambdaMixture, q: float) -> float:
    """Integral of (e^{-qx} - 1 + qx) x^-2 against Lambda; the atom at 0 contributes q^2/2."""
    if not q > 0:
        raise DomainError(f"psi needs q > 0, got {q}")
    total = lam.kingman * q * q / 2.0
    for w, s in lam.components:
        if isinstance(s, Dirac):
            total += w * _phi(q * s.x) / (s.x * s.x)
        else:
            total += w * _psi_beta(s, q)
    return total


def psi_growth_exponent(lam: LambdaMixture, q_lo: float = Q_LO, q_hi: float = Q_HI) -> tuple[float, dict]:
    """Exponent beta in psi(q)/q ~ A (log q)^beta + C, read from three points.

    1/psi is integrable at infinity iff the growth of psi(q)/q in log q beats
    a first power, so beta > 1 points to CDI and beta <= 1 to the opposite.
    The three abscissae are geometric in log q, which cancels the constant C.
    """
    u_lo, u_hi = math.log(q_lo), math.log(q_hi)
    us = [u_lo, math.sqrt(u_lo * u_hi), u_hi]
    qs = [math.exp(u) for u in us]
    ps = [psi(lam, q) for q in qs]
    ell = [p / q for p, q in zip(ps, qs)]
    d1, d2 = ell[1] - ell[0], ell[2] - ell[1]
    if d1 <= 0 and d2 <= 0:
        beta = -math.inf
    elif d1 <= 0:
        beta = math.inf
    elif d2 <= 0:
        beta = -math.inf
    else:
        beta = math.log(d2 / d1) / math.log(us[1] / us[0])
    slope = (math.log(ps[2]) - math.log(ps[0])) / (u_hi - u_lo) if ps[0] > 0 else float("nan")
    return beta, {"q": qs, "psi": ps, "growth_exponent": beta, "loglog_slope": slope}


def schweinsberg_partial_sums(lam: LambdaMixture, N: int) -> np.ndarray:
    """Partial sums S_2, ..., S_N of the reciprocal total merger-weighted rates.

    Uses the exact identity
    sum_{k=2}^n (k-1) C(n,k) x^(k-2) (1-x)^(n-k) = sum_{j=0}^{n-2} (n-1-j) (1-x)^j,
    so the inner sum at n is a double cumulative sum of m_j = int (1-x)^j Lambda(dx).
    All terms are nonnegative.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    j = np.arange(N - 1, dtype=float)
    m = np.full(N - 1, lam.kingman)
    for w, s in lam.components:
        if isinstance(s, Dirac):
            if s.x == 1.0:
                m[0] += w
            else:
                m += w * np.exp(j * math.log1p(-s.x))
        else:
            m += w * np.exp(betaln(s.a, s.b + j) - betaln(s.a, s.b))
    inner = np.cumsum(np.cumsum(m))
    with np.errstate(divide="ignore"):
        recip = np.where(inner > 0, 1.0 / np.where(inner > 0, inner, 1.0), np.inf)
    return np.cumsum(recip)


def _schweinsberg_trace(lam: LambdaMixture) -> dict:
    sums = schweinsberg_partial_sums(lam, 10**5)
    return {"schweinsberg_partial": {str(10**e): float(sums[10**e - 2]) for e in range(1, 6)}}


def lambda_cdi(lam: LambdaMixture, numeric: bool = False) -> CdiVerdict:
    """CDI verdict for a Lambda-coalescent; ``numeric=True`` skips the rule table."""
    if not numeric:
        if lam.kingman > 0:
            return CdiVerdict(Verdict.CDI, Method.RULE, {"rule": "Kingman atom"})
        if not lam.components:
            return CdiVerdict(Verdict.NOT_CDI, Method.RULE, {"rule": "no coalescence"})
        if all(isinstance(s, Dirac) for _, s in lam.components):
            return CdiVerdict(Verdict.NOT_CDI, Method.RULE, {"rule": "point masses only"})
        if len(lam.components) == 1:
            s = lam.components[0][1]
            a = 1.0 if abs(s.a - 1.0) <= BETA_BOUNDARY_TOL else s.a
            if a < 1.0:
                return CdiVerdict(Verdict.CDI, Method.RULE, {"rule": "Beta a < 1 (external-literature rule)"})
            return CdiVerdict(Verdict.NOT_CDI, Method.RULE, {"rule": "Beta a >= 1"})
    beta, diag = psi_growth_exponent(lam)
    diag.update(_schweinsberg_trace(lam))
    if beta >= CDI_ABOVE:
        value = Verdict.CDI
    elif beta <= NOT_CDI_BELOW:
        value = Verdict.NOT_CDI
    else:
        value = Verdict.INCONCLUSIVE
    return CdiVerdict(value, Method.PSI, diag)


def snec_cdi(spec: SnecSpec, numeric: bool = False) -> SnecCdiCase:
    report = validate(spec)
    x_int = species_x_integral(spec)
    if report.species_atom_at_one or report.gene_atom_at_one:
        return SnecCdiCase("NOT_APPLICABLE", None, None, x_int, "a marginal coagulation measure charges 1")
    gene = lambda_cdi(marginal_gene_lambda(spec), numeric)
    if gene.value is Verdict.INCONCLUSIVE:
        return SnecCdiCase("INCONCLUSIVE", gene, None, x_int, "gene marginal undecided")
    if gene.value is Verdict.NOT_CDI:
        return SnecCdiCase("NOT_APPLICABLE", gene, None, x_int, "gene marginal does not come down")
    species = lambda_cdi(marginal_species_lambda(spec), numeric)
    if species.value is Verdict.INCONCLUSIVE:
        return SnecCdiCase("INCONCLUSIVE", gene, species, x_int, "species marginal undecided")
    if species.value is Verdict.CDI:
        return SnecCdiCase("i", gene, species, x_int, "both marginals come down")
    if math.isinf(x_int):
        return SnecCdiCase("ii", gene, species, x_int, "infinitely many genes per species at positive times")
    return SnecCdiCase("iii", gene, species, x_int, "finitely many genes per species at positive times")


def cdi_report(spec: SnecSpec, n_points: int = 13) -> dict:
    case = snec_cdi(spec)
    lam_s = marginal_species_lambda(spec)
    qs = np.logspace(0, 6, n_points)
    out = {
        "lambda_species": case.species.to_json() if case.species else lambda_cdi(lam_s).to_json(),
        "lambda_gene": (case.gene or lambda_cdi(marginal_gene_lambda(spec))).to_json(),
        "x_integral": "infinite" if math.isinf(case.x_integral) else case.x_integral,
        "snec_case": case.case,
        "reason": case.reason,
        "psi_curve": [[float(q), psi(lam_s, float(q))] for q in qs],
    }
    return out
