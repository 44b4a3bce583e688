"""Scalar test functions with analytic derivatives, seminorm estimation over
|x|-weighted grids, divided differences, and related scalar machinery.

Catalog entries carry closed-form derivatives up to order ``MAX_ORDER`` so no
numerical differentiation happens inside the library; finite differences are
reserved for test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError, ParameterError, SingularityError

MAX_ORDER = 6
DD_SWITCH = 1e-8
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalarFunction:
    """A real function f with vectorized evaluation and analytic derivatives.

    ``derivative(k, x)`` is defined for 1 <= k <= max_order and x != 0;
    ``derivative_at_zero`` is the two-sided f'(0) when it exists, else None.
    ``exact_order_sup(k, theta)``, when present, returns the analytic value of
    sup_{x != 0} |x|^{k - theta} |f^(k)(x)|.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[int, np.ndarray], np.ndarray]
    max_order: int = MAX_ORDER
    theta_hint: Optional[float] = None
    homogeneous: bool = False
    derivative_at_zero: Optional[float] = None
    exact_order_sup: Optional[Callable[[int, float], float]] = None

    def derivative(self, k: int, x):
        if k == 0:
            return self.eval(np.asarray(x, dtype=float))
        if k > self.max_order:
            raise CapabilityError(
                f"{self.name}: derivative order {k} exceeds max_order {self.max_order}"
            )
        return self.deriv(k, np.asarray(x, dtype=float))


def _falling(theta: float, k: int) -> float:
    """theta (theta-1) ... (theta-k+1)."""
    out = 1.0
    for j in range(k):
        out *= theta - j
    return out


# --- catalog -----------------------------------------------------------------


def power(theta: float) -> ScalarFunction:
    """|t|^theta, theta in (0, 1)."""
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"power exponent must lie in (0,1), got {theta}")

    def ev(x):
        return np.abs(x) ** theta

    def dv(k, x):
        c = _falling(theta, k)
        return c * np.abs(x) ** (theta - k) * np.sign(x) ** k

    return ScalarFunction(
        name=f"power:{theta}",
        eval=ev,
        deriv=dv,
        theta_hint=theta,
        homogeneous=True,
        derivative_at_zero=None,
        exact_order_sup=lambda k, th: (abs(_falling(theta, k)) if th == theta else np.inf),
    )


def signed_power(theta: float) -> ScalarFunction:
    """sgn(t)|t|^theta, theta in (0, 1)."""
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"power exponent must lie in (0,1), got {theta}")

    def ev(x):
        return np.sign(x) * np.abs(x) ** theta

    def dv(k, x):
        c = _falling(theta, k)
        return c * np.abs(x) ** (theta - k) * np.sign(x) ** (k + 1)

    return ScalarFunction(
        name=f"spower:{theta}",
        eval=ev,
        deriv=dv,
        theta_hint=theta,
        homogeneous=True,
        derivative_at_zero=None,
        exact_order_sup=lambda k, th: (abs(_falling(theta, k)) if th == theta else np.inf),
    )


def log1p_abs() -> ScalarFunction:
    """log(1 + |t|)."""

    def ev(x):
        return np.log1p(np.abs(x))

    def dv(k, x):
        base = (-1.0) ** (k - 1) * math.factorial(k - 1) / (1.0 + np.abs(x)) ** k
        return base * np.sign(x) ** k

    return ScalarFunction(
        name="log1p", eval=ev, deriv=dv, derivative_at_zero=None
    )


def signed_log1p() -> ScalarFunction:
    """sgn(t) log(1 + |t|); inverse of sgn(t)(e^|t| - 1)."""

    def ev(x):
        return np.sign(x) * np.log1p(np.abs(x))

    def dv(k, x):
        base = (-1.0) ** (k - 1) * math.factorial(k - 1) / (1.0 + np.abs(x)) ** k
        return base * np.sign(x) ** (k + 1)

    return ScalarFunction(
        name="slog1p", eval=ev, deriv=dv, derivative_at_zero=1.0
    )


def rational_abs(r: float) -> ScalarFunction:
    """|t| / (r + |t|), r > 0."""
    if not r > 0:
        raise ParameterError(f"rational scale must be positive, got {r}")

    def ev(x):
        a = np.abs(x)
        return a / (r + a)

    def dv(k, x):
        base = (-1.0) ** (k + 1) * r * math.factorial(k) / (r + np.abs(x)) ** (k + 1)
        return base * np.sign(x) ** k

    return ScalarFunction(
        name=f"rational:{r}", eval=ev, deriv=dv, derivative_at_zero=None
    )


def rational_signed(r: float) -> ScalarFunction:
    """t / (r + |t|), r > 0."""
    if not r > 0:
        raise ParameterError(f"rational scale must be positive, got {r}")

    def ev(x):
        return x / (r + np.abs(x))

    def dv(k, x):
        base = (-1.0) ** (k + 1) * r * math.factorial(k) / (r + np.abs(x)) ** (k + 1)
        return base * np.sign(x) ** (k + 1)

    return ScalarFunction(
        name=f"srational:{r}", eval=ev, deriv=dv, derivative_at_zero=1.0 / r
    )


def signed_expm1() -> ScalarFunction:
    """sgn(t)(e^|t| - 1).  Not theta-Holder on the line (its weighted
    seminorms are infinite); present as the inverse map for the reverse
    inequalities."""

    def ev(x):
        return np.sign(x) * np.expm1(np.abs(x))

    def dv(k, x):
        return np.exp(np.abs(x)) * np.sign(x) ** (k + 1)

    return ScalarFunction(
        name="sexpm1", eval=ev, deriv=dv, derivative_at_zero=1.0
    )


def gauss_bump() -> ScalarFunction:
    """t exp(-t^2): a rapidly decaying smooth function vanishing at 0."""
    # d^k/dx^k (x e^{-x^2}) = P_k(x) e^{-x^2} with P_{k+1} = P_k' - 2x P_k.
    polys = [np.polynomial.Polynomial([0.0, 1.0])]
    for _ in range(MAX_ORDER):
        pk = polys[-1]
        polys.append(pk.deriv() - np.polynomial.Polynomial([0.0, 2.0]) * pk)

    def ev(x):
        return x * np.exp(-np.asarray(x, dtype=float) ** 2)

    def dv(k, x):
        return polys[k](x) * np.exp(-np.asarray(x, dtype=float) ** 2)

    return ScalarFunction(
        name="gauss", eval=ev, deriv=dv, derivative_at_zero=1.0
    )


def linear() -> ScalarFunction:
    def ev(x):
        return np.asarray(x, dtype=float)

    def dv(k, x):
        x = np.asarray(x, dtype=float)
        return np.ones_like(x) if k == 1 else np.zeros_like(x)

    return ScalarFunction(
        name="linear",
        eval=ev,
        deriv=dv,
        theta_hint=1.0,
        homogeneous=True,
        derivative_at_zero=1.0,
        exact_order_sup=lambda k, th: (1.0 if (th == 1.0 and k <= 1) else (0.0 if k > 1 else np.inf)),
    )


def polynomial(coeffs) -> ScalarFunction:
    """Polynomial with coefficients low to high."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    derivs = [p]
    for _ in range(MAX_ORDER):
        derivs.append(derivs[-1].deriv())

    def ev(x):
        return p(np.asarray(x, dtype=float))

    def dv(k, x):
        return derivs[k](np.asarray(x, dtype=float))

    c1 = float(p.deriv()(0.0))
    return ScalarFunction(
        name=f"poly:{list(np.asarray(coeffs, dtype=float))}",
        eval=ev,
        deriv=dv,
        derivative_at_zero=c1,
    )


def dilate_function(f: ScalarFunction, r: float) -> ScalarFunction:
    """The dilation x -> f(x / r), r > 0."""
    if not r > 0:
        raise ParameterError(f"dilation scale must be positive, got {r}")

    def ev(x):
        return f.eval(np.asarray(x, dtype=float) / r)

    def dv(k, x):
        return f.deriv(k, np.asarray(x, dtype=float) / r) / r ** k

    dz = None if f.derivative_at_zero is None else f.derivative_at_zero / r
    return ScalarFunction(
        name=f"dilate:{r}:{f.name}",
        eval=ev,
        deriv=dv,
        max_order=f.max_order,
        theta_hint=f.theta_hint,
        homogeneous=f.homogeneous,
        derivative_at_zero=dz,
    )


_CATALOG = {
    "power": (power, 1),
    "spower": (signed_power, 1),
    "log1p": (log1p_abs, 0),
    "slog1p": (signed_log1p, 0),
    "rational": (rational_abs, 1),
    "srational": (rational_signed, 1),
    "sexpm1": (signed_expm1, 0),
    "gauss": (gauss_bump, 0),
    "linear": (linear, 0),
}


def catalog() -> dict:
    """Named constructors for the built-in test functions."""
    return {name: ctor for name, (ctor, _) in _CATALOG.items()}


def parse_function_spec(text: str) -> ScalarFunction:
    """Parse e.g. "power:0.5", "log1p", "rational:1"."""
    tokens = text.strip().split(":")
    name = tokens[0].lower()
    if name not in _CATALOG:
        raise ParameterError(
            f"unknown function {name!r}; known: {sorted(_CATALOG)}"
        )
    ctor, nargs = _CATALOG[name]
    args = tokens[1:]
    if len(args) != nargs:
        raise ParameterError(
            f"function {name!r} takes {nargs} parameter(s), got {len(args)}"
        )
    return ctor(*(float(a) for a in args))


# --- seminorm estimation -----------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 2048
    x_min: float = 1e-8
    x_max: float = 1e8
    refine: bool = True


@dataclass(frozen=True)
class SeminormEstimate:
    value: float
    per_order: np.ndarray
    grid: str


def _weighted(f: ScalarFunction, k: int, theta: float, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        fx = f.eval(x) if k == 0 else f.deriv(k, x)
        return np.abs(x) ** (k - theta) * np.abs(fx)


def _refine_max(f, k, theta, sign, u_lo, u_hi) -> float:
    """Golden-section maximization of the weighted derivative on a log bracket."""
    def g(u):
        return float(_weighted(f, k, theta, np.array([sign * math.exp(u)]))[0])

    a, b = u_lo, u_hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(60):
        if gc < gd:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
        else:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
    return max(gc, gd)


def seminorm(
    f: ScalarFunction, d: int, theta: float, grid: GridSpec = GridSpec()
) -> SeminormEstimate:
    """Grid estimate (a lower bound) of max_{0<=k<=d} sup_x |x|^{k-theta}|f^(k)(x)|."""
    if d < 0:
        raise ParameterError("order d must be nonnegative")
    if d > f.max_order:
        raise CapabilityError(
            f"{f.name}: seminorm order {d} exceeds max_order {f.max_order}"
        )
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    us = np.log(np.logspace(math.log10(grid.x_min), math.log10(grid.x_max), grid.n_points))
    per_order = np.zeros(d + 1)
    for k in range(d + 1):
        best = 0.0
        for sign in (1.0, -1.0):
            xs = sign * np.exp(us)
            w = _weighted(f, k, theta, xs)
            w = np.where(np.isnan(w), 0.0, w)
            i = int(np.argmax(w))
            top = float(w[i])
            if np.isinf(top):
                best = np.inf
                break
            if grid.refine and 0 < i < us.size - 1:
                top = max(top, _refine_max(f, k, theta, sign, us[i - 1], us[i + 1]))
            best = max(best, top)
        per_order[k] = best
    return SeminormEstimate(
        value=float(np.max(per_order)),
        per_order=per_order,
        grid=f"logspace[{grid.x_min:g},{grid.x_max:g}]x{grid.n_points}/sign"
        + ("+golden" if grid.refine else ""),
    )


def holder_bound(f: ScalarFunction, theta: float, grid: GridSpec = GridSpec()) -> float:
    """(2/theta) * first-order seminorm: a Holder constant valid for all pairs."""
    if f.max_order < 1:
        raise CapabilityError(f"{f.name}: needs at least one derivative")
    return (2.0 / theta) * seminorm(f, 1, theta, grid).value


# --- divided differences -----------------------------------------------------


def divided_difference(f: ScalarFunction, x: float, y: float) -> float:
    """(f(x) - f(y)) / (x - y), extended by f' at near-coincident points."""
    x = float(x)
    y = float(y)
    if abs(x - y) > DD_SWITCH * (abs(x) + abs(y) + 1.0):
        return float((f.eval(np.array([x]))[0] - f.eval(np.array([y]))[0]) / (x - y))
    mid = 0.5 * (x + y)
    if mid == 0.0:
        if f.derivative_at_zero is None:
            raise SingularityError(
                f"{f.name}: divided difference at coincident zero has no finite value"
            )
        return f.derivative_at_zero
    val = float(f.deriv(1, np.array([mid]))[0])
    if not np.isfinite(val):
        raise SingularityError(f"{f.name}: derivative not finite at {mid}")
    return val


def divided_difference_grid(f: ScalarFunction, xs, ys, mask=None) -> np.ndarray:
    """Vectorized divided differences on a meshgrid of points.

    ``mask`` (broadcastable to the output shape) limits where values are
    needed; masked-out entries are 0 and never evaluated, so indicator
    symbols can skip singular off-support pairs.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    bshape = np.broadcast(x, y).shape
    x, y = np.broadcast_arrays(x, y)
    out = np.zeros(bshape, dtype=float)
    need = np.ones(bshape, dtype=bool) if mask is None else np.broadcast_to(mask, bshape)
    far = need & (np.abs(x - y) > DD_SWITCH * (np.abs(x) + np.abs(y) + 1.0))
    near = need & ~far
    if np.any(far):
        out[far] = (f.eval(x[far]) - f.eval(y[far])) / (x[far] - y[far])
    if np.any(near):
        mid = 0.5 * (x[near] + y[near])
        vals = np.empty_like(mid)
        at0 = mid == 0.0
        if np.any(at0):
            if f.derivative_at_zero is None:
                raise SingularityError(
                    f"{f.name}: divided difference at coincident zero has no finite value"
                )
            vals[at0] = f.derivative_at_zero
        if np.any(~at0):
            with np.errstate(divide="ignore", invalid="ignore"):
                vals[~at0] = f.deriv(1, mid[~at0])
        if not np.all(np.isfinite(vals)):
            raise SingularityError(f"{f.name}: derivative not finite on the diagonal")
        out[near] = vals
    return out


# --- d(p) and the dyadic scalar sum -------------------------------------------


def d_of_p(p: float) -> int:
    """Derivative order required at integrability p: the least integer
    strictly greater than 1/p + 2 for p <= 1, and 4 for p > 1."""
    if not p > 0:
        raise ParameterError(f"p must be positive, got {p}")
    if p > 1:
        return 4
    return int(math.floor(1.0 / p + 2.0)) + 1


@dataclass(frozen=True)
class ScalarSumResult:
    lhs: float
    rhs_constant: float
    tail_bound: float


def scalar_sum_555(theta: float, q: float, alpha: float, tol: float = 1e-12) -> ScalarSumResult:
    """Evaluate sum_l 2^{q l (1-theta)} min(alpha, 2^{1-l})^q with certified
    geometric tail bounds, together with the explicit comparison constant
    2^{q(1-theta)} (1/(1 - 2^{q(theta-1)}) + 1/(1 - 2^{-q theta}))."""
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"theta must lie in (0,1), got {theta}")
    if not q > 0:
        raise ParameterError(f"q must be positive, got {q}")
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")

    rhs_constant = 2.0 ** (q * (1.0 - theta)) * (
        1.0 / (1.0 - 2.0 ** (q * (theta - 1.0))) + 1.0 / (1.0 - 2.0 ** (-q * theta))
    )

    log2_alpha = math.log2(alpha)

    def term(l):
        # min(alpha, 2^{1-l}) without forming huge powers of two
        m = alpha if (1 - l) >= log2_alpha else 2.0 ** (1 - l)
        return 2.0 ** (q * l * (1.0 - theta)) * m ** q

    # Tails: below lmin every term is <= alpha^q 2^{q l (1-theta)} (geometric,
    # ratio 2^{-q(1-theta)} going down); above lmax every term equals
    # 2^q 2^{-q l theta} (geometric, ratio 2^{-q theta}).
    def tail_lo(lmin):
        return alpha ** q * 2.0 ** (q * (lmin - 1) * (1.0 - theta)) / (
            1.0 - 2.0 ** (-q * (1.0 - theta))
        )

    def tail_hi(lmax):
        return 2.0 ** q * 2.0 ** (-q * (lmax + 1) * theta) / (1.0 - 2.0 ** (-q * theta))

    center = int(math.floor(1.0 - math.log2(alpha)))
    lmin, lmax = center - 2, center + 2
    half = 0.5 * tol
    for _ in range(200000):
        if tail_lo(lmin) <= half:
            break
        lmin -= 8
    for _ in range(200000):
        if tail_hi(lmax) <= half:
            break
        lmax += 8
    lhs = float(sum(term(l) for l in range(lmin, lmax + 1)))
    return ScalarSumResult(lhs=lhs, rhs_constant=rhs_constant, tail_bound=tail_lo(lmin) + tail_hi(lmax))
