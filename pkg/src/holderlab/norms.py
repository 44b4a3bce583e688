"""Singular value profiles, Schatten / weak / Ky Fan quasi-norms, p-th power
norms, and submajorization checks.

A profile is a non-increasing nonnegative float vector (the singular values
of a matrix, sorted descending).  All norms are evaluated on profiles, so the
matrix-level functions below reduce to one SVD plus vector arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral import as_matrix

SUBMAJ_TOL = 1e-10


def singular_values(x) -> np.ndarray:
    """Singular values of a matrix, sorted descending."""
    m = as_matrix(x)
    return np.linalg.svd(m, compute_uv=False)


def profile(values) -> np.ndarray:
    """Coerce a vector into a valid profile (sorted descending, >= 0)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size and v.min() < 0:
        raise ParameterError("profiles must be nonnegative")
    return np.sort(v)[::-1]


def distribution_function(values, t: float) -> int:
    """d(t) = number of profile entries strictly above t (right-continuous)."""
    if t < 0:
        raise ParameterError("distribution function is defined for t >= 0")
    return int(np.sum(np.asarray(values, dtype=float) > t))


def mu_integral(values, t: float) -> float:
    """Integral of the profile step function over [0, t]; fractional t is
    linear interpolation of the last step."""
    v = np.asarray(values, dtype=float)
    if t <= 0:
        return 0.0
    k = int(np.floor(t))
    full = float(v[: min(k, v.size)].sum())
    if k < v.size:
        full += (t - k) * float(v[k])
    return full


# --- norm specifications ----------------------------------------------------


@dataclass(frozen=True)
class Schatten:
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterError(f"Schatten exponent must be positive, got {self.p}")


@dataclass(frozen=True)
class WeakLp:
    p: float

    def __post_init__(self):
        if not (self.p > 0 and np.isfinite(self.p)):
            raise ParameterError(f"weak-Lp exponent must be finite positive, got {self.p}")


@dataclass(frozen=True)
class KyFan:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"Ky Fan index must be >= 1, got {self.k}")


@dataclass(frozen=True)
class PowerOf:
    base: "Schatten | KyFan"
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterError(f"power exponent must be positive, got {self.p}")
        if isinstance(self.base, KyFan):
            return
        if isinstance(self.base, Schatten) and self.base.p >= 1 and np.isfinite(self.base.p):
            return
        raise ParameterError(
            "PowerOf base must be fully symmetric (Ky Fan or Schatten with p >= 1)"
        )


NormSpec = Schatten | WeakLp | KyFan | PowerOf


def norm_of_profile(values, spec: NormSpec) -> float:
    v = np.asarray(values, dtype=float)
    if isinstance(spec, Schatten):
        if np.isinf(spec.p):
            return float(v[0]) if v.size else 0.0
        return float(np.sum(v ** spec.p) ** (1.0 / spec.p))
    if isinstance(spec, WeakLp):
        if not v.size:
            return 0.0
        weights = (np.arange(v.size) + 1.0) ** (1.0 / spec.p)
        return float(np.max(weights * v))
    if isinstance(spec, KyFan):
        return float(v[: spec.k].sum())
    if isinstance(spec, PowerOf):
        return float(norm_of_profile(v ** spec.p, spec.base) ** (1.0 / spec.p))
    raise ParameterError(f"unknown norm spec {spec!r}")


def norm(x, spec: NormSpec) -> float:
    return norm_of_profile(singular_values(x), spec)


def modulus_of_concavity(spec: NormSpec) -> float:
    """Smallest K with ||X+Y|| <= K(||X|| + ||Y||) for the given spec."""
    if isinstance(spec, Schatten):
        return max(2.0 ** (1.0 / spec.p - 1.0), 1.0) if np.isfinite(spec.p) else 1.0
    if isinstance(spec, WeakLp):
        return 2.0 ** (1.0 / spec.p)
    if isinstance(spec, KyFan):
        return 1.0
    if isinstance(spec, PowerOf):
        return max(2.0 ** (1.0 / spec.p - 1.0), 1.0)
    raise ParameterError(f"unknown norm spec {spec!r}")


def parse_norm_spec(text: str) -> NormSpec:
    """Parse the spec grammar: schatten:p | weak:p | kyfan:k | power:<base>:p.

    ``p`` accepts "inf" for the operator norm.
    """
    tokens = text.strip().split(":")

    def fail(pos, msg):
        raise ParameterError(f"bad norm spec {text!r} at token {pos}: {msg}")

    if not tokens or not tokens[0]:
        fail(0, "empty spec")
    kind = tokens[0].lower()
    if kind == "schatten":
        if len(tokens) != 2:
            fail(1, "expected schatten:p")
        p = np.inf if tokens[1].lower() in ("inf", "infinity") else float(tokens[1])
        return Schatten(p)
    if kind == "weak":
        if len(tokens) != 2:
            fail(1, "expected weak:p")
        return WeakLp(float(tokens[1]))
    if kind == "kyfan":
        if len(tokens) != 2:
            fail(1, "expected kyfan:k")
        return KyFan(int(tokens[1]))
    if kind == "power":
        if len(tokens) < 3:
            fail(1, "expected power:<base>:p")
        base = parse_norm_spec(":".join(tokens[1:-1]))
        if isinstance(base, (PowerOf, WeakLp)):
            fail(1, "power base must be kyfan or schatten with p >= 1")
        return PowerOf(base, float(tokens[-1]))
    fail(0, f"unknown norm kind {kind!r}")


def format_norm_spec(spec: NormSpec) -> str:
    if isinstance(spec, Schatten):
        return "schatten:inf" if np.isinf(spec.p) else f"schatten:{spec.p}"
    if isinstance(spec, WeakLp):
        return f"weak:{spec.p}"
    if isinstance(spec, KyFan):
        return f"kyfan:{spec.k}"
    if isinstance(spec, PowerOf):
        return f"power:{format_norm_spec(spec.base)}:{spec.p}"
    raise ParameterError(f"unknown norm spec {spec!r}")


# --- submajorization ---------------------------------------------------------


@dataclass(frozen=True)
class SubmajorizationReport:
    holds: bool
    worst_index: int
    margin: float  # min over k of (upper - lower) partial sums, normalized


def _pad_pair(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n = max(a.size, b.size)
    return (
        np.pad(a, (0, n - a.size)),
        np.pad(b, (0, n - b.size)),
    )


def submajorizes(upper, lower, tol: float = SUBMAJ_TOL) -> SubmajorizationReport:
    """Check that all partial sums of ``lower`` are dominated by those of
    ``upper``.  Margin is normalized by the larger total sum."""
    up, lo = _pad_pair(upper, lower)
    cu, cl = np.cumsum(up), np.cumsum(lo)
    scale = max(float(cu[-1]) if cu.size else 0.0, float(cl[-1]) if cl.size else 0.0)
    if scale <= 0.0:
        return SubmajorizationReport(holds=True, worst_index=0, margin=0.0)
    gaps = (cu - cl) / scale
    worst = int(np.argmin(gaps))
    margin = float(gaps[worst])
    return SubmajorizationReport(holds=margin >= -tol, worst_index=worst, margin=margin)


def power_submajorizes(upper, lower, p: float, tol: float = SUBMAJ_TOL) -> SubmajorizationReport:
    """Submajorization of the entrywise p-th powers."""
    if not p > 0:
        raise ParameterError(f"power must be positive, got {p}")
    up, lo = _pad_pair(upper, lower)
    return submajorizes(up ** p, lo ** p, tol=tol)


def least_domination_constant(upper, lower) -> float:
    """Smallest c >= 0 such that lower's partial sums are <= c * upper's.

    Returns inf when some partial sum of ``lower`` is positive while the
    matching partial sum of ``upper`` vanishes.
    """
    up, lo = _pad_pair(upper, lower)
    cu, cl = np.cumsum(up), np.cumsum(lo)
    c = 0.0
    for num, den in zip(cl, cu):
        if den > 0.0:
            c = max(c, num / den)
        elif num > 0.0:
            return np.inf
    return c
