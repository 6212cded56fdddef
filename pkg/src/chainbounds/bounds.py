"""Upper-bound constant for the scaled longest-chain length, and its certificate.

The scaled length of the longest chain among n uniform points in [0,1]^t
concentrates at a constant in [t^2/(t!^{1/t} Gamma(1/t)), e).  This module
computes both ends of that picture:

* ``bw_lower`` -- the Bollobas-Winkler lower bound t^2/(t!^{1/t} Gamma(1/t));
* ``bar_x`` -- an upper-bound constant obtained from a Chernoff-style rate
  function, defined as the infimum of x in [e^{-gamma}, e] at which the
  growth factor (e/x)^t * q(x) drops below 1.

Here q(x) is the common value of three competing exponential-rate terms,

    rate term    rho(a)  = min_{u in (0,1)} Gamma^t(1-u) / e^{a u},
    decay term   (1+b) / e^b,
    tail term    exp(-e^{-a} / (x^t (1+b)^t)),

minimized over the tilts (a, b).  The minimum is attained at the unique point
where all three terms are equal, which pins a(x) as the root of
rho(a) = (1+b(a,x)) e^{-b(a,x)} and b(a,x) as the root of

    H(x, a, b) = log(1+b) - b + e^{-a} / (x^t (1+b)^t) = 0.

``a_root`` and ``b_root`` solve exactly these equations by bracketed
bisection.  ``bar_x`` additionally walks an x-grid with a warm-started
continuation solver (the certificate curve is smooth and monotone in its
inner parameter), which keeps a full 4096-point scan in the tens of
milliseconds; the reported certificate is always re-solved through the
plain bisection path and its defining residuals are attached to the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, NumericalError
from .specfun import EULER_GAMMA, digamma, inv_digamma_unit, log_gamma

#: Scan domain for the growth-factor crossing.
X_LEFT: float = math.exp(-EULER_GAMMA)
X_RIGHT: float = math.e


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps and grid resolution for all root finders.

    root_tol is an absolute residual tolerance: every returned root r of an
    equation F(r) = 0 satisfies |F(r)| <= root_tol.  Identical configs give
    bit-identical results everywhere in this module.
    """

    root_tol: float = 1e-10
    max_iter: int = 200
    x_grid_points: int = 4096
    bracket_growth: float = 2.0

    def __post_init__(self) -> None:
        if not (self.root_tol > 0.0):
            raise DomainError(f"root_tol must be > 0, got {self.root_tol}")
        if self.max_iter < 50:
            raise DomainError(f"max_iter must be >= 50, got {self.max_iter}")
        if self.x_grid_points < 64:
            raise DomainError(f"x_grid_points must be >= 64, got {self.x_grid_points}")
        if not (self.bracket_growth > 1.0):
            raise DomainError(f"bracket_growth must be > 1, got {self.bracket_growth}")


@dataclass(frozen=True)
class QEvaluation:
    """Certificate point of the equalized rate q(x) at one scaled length x.

    a and b are the two Chernoff tilts, u the inner stationary point of the
    rate term, q the common equalized value, and growth = (e/x)^t * q.
    """

    x: float
    t: int
    a: float
    b: float
    u: float
    q: float
    growth: float

    def __post_init__(self) -> None:
        if self.a <= EULER_GAMMA * self.t:
            raise DomainError(f"tilt a={self.a} must exceed gamma*t={EULER_GAMMA * self.t}")
        if not (self.b > 0.0):
            raise DomainError(f"tilt b={self.b} must be positive")
        if not (0.0 < self.u < 1.0):
            raise DomainError(f"stationary point u={self.u} must lie in (0, 1)")
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"equalized value q={self.q} must lie in (0, 1)")


@dataclass(frozen=True)
class BoundReport:
    """Per-dimension bound record.

    residuals is the larger of the two defining defects at the certificate:
    |H(x, a, b)| for the b-equation and |rho(a) - (1+b)e^{-b}| for the
    a-equation.  at_left_edge flags the (never observed) case where the
    growth factor is already below 1 at x = e^{-gamma}; multiple_crossings
    flags more than one sign change of growth - 1 on the scan grid, in which
    case bar_x is the first one.
    """

    t: int
    bw_lower: float
    bar_x: float
    certificate: QEvaluation
    residuals: float
    at_left_edge: bool = False
    multiple_crossings: bool = False

    def __post_init__(self) -> None:
        if not (X_LEFT <= self.bar_x < X_RIGHT):
            raise DomainError(f"bar_x={self.bar_x} outside [e^-gamma, e)")
        if not self.at_left_edge and self.bar_x <= X_LEFT:
            raise DomainError("bar_x at the left edge must carry the at_left_edge flag")
        if not (self.bw_lower < math.e):
            raise DomainError(f"lower bound {self.bw_lower} must be below e")


def _require_dim(t: int) -> int:
    if isinstance(t, bool) or int(t) != t or int(t) < 2:
        raise DomainError(f"dimension t must be an integer >= 2, got {t!r}")
    return int(t)


def _require_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"x must be a finite positive real, got {x!r}")
    return x


def rho(a: float, t: int) -> tuple[float, float]:
    """Chernoff rate of the log-Gamma term: min over u in (0,1) of Gamma^t(1-u)/e^{au}.

    Returns (rho_value, u_star).  The minimizer solves the stationarity
    condition -t*psi(1-u) - a = 0, so u_star = 1 - inv_digamma_unit(-a/t);
    the minimum is strictly below 1 exactly when a > gamma*t.  Evaluation
    goes through exp(t*log_gamma(...)) so large t cannot overflow, and the
    exponent form stays exact as u_star -> 0 where rho -> 1 from below.
    """
    t = _require_dim(t)
    a = float(a)
    if not math.isfinite(a) or a <= EULER_GAMMA * t:
        raise DomainError(f"need tilt a > gamma*t = {EULER_GAMMA * t}, got {a!r}")
    v = inv_digamma_unit(-a / t)
    u_star = 1.0 - v
    value = math.exp(t * log_gamma(v) - a * u_star)
    return value, u_star


def _h_defect(x: float, a: float, b: float, t: int) -> float:
    """H(x, a, b) = log(1+b) - b + e^{-a}/(x^t (1+b)^t), decreasing in b."""
    return math.log1p(b) - b + math.exp(-a - t * math.log(x) - t * math.log1p(b))


def b_root(x: float, a: float, t: int, cfg: SolverConfig = SolverConfig()) -> float:
    """Unique b > 0 with (1+b)/e^b = exp(-e^{-a}/(x^t (1+b)^t)).

    Equivalently the root of H(x, a, b) = 0.  H starts positive at b = 0 and
    decreases to -inf, so the root is bracketed on [0, B] with B grown by
    cfg.bracket_growth until H(B) < 0, then bisected until the bracket
    collapses; this resolves the root to machine precision even when it sits
    within 1e-9 of zero (large a), rather than stopping at the first iterate
    whose residual clears root_tol.
    """
    t = _require_dim(t)
    x = _require_x(x)
    a = float(a)
    if not math.isfinite(a):
        raise DomainError(f"tilt a must be finite, got {a!r}")
    hi = 1.0
    grown = 0
    while _h_defect(x, a, hi, t) >= 0.0:
        hi *= cfg.bracket_growth
        grown += 1
        if grown > cfg.max_iter:
            raise NumericalError(f"no sign change of H up to b = {hi} at x={x}, a={a}, t={t}")
    lo = 0.0
    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _h_defect(x, a, mid, t) > 0.0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    if abs(_h_defect(x, a, b, t)) > cfg.root_tol:
        raise NumericalError(
            f"b-bisection stalled at b={b} with residual {_h_defect(x, a, b, t)} (x={x}, a={a}, t={t})"
        )
    return b


def _decay(b: float) -> float:
    """The decay term (1+b) * exp(-b)."""
    return (1.0 + b) * math.exp(-b)


def a_root(x: float, t: int, cfg: SolverConfig = SolverConfig()) -> float:
    """Tilt a > gamma*t equalizing the rate and decay terms: rho(a) = (1+b(a,x))/e^{b(a,x)}.

    As a increases, rho(a) falls from 1 to 0 while the decay term at
    b = b_root(x, a) rises towards 1, so the difference changes sign exactly
    once.  The sign change is bracketed over a in (gamma*t, A] with A grown
    geometrically, then bisected until the residual is within cfg.root_tol.
    b is re-solved from scratch at every iterate.
    """
    t = _require_dim(t)
    x = _require_x(x)
    base = EULER_GAMMA * t

    def defect(a: float) -> float:
        value, _ = rho(a, t)
        return value - _decay(b_root(x, a, t, cfg))

    lo = base + 1e-9 * max(1.0, base)
    if defect(lo) <= 0.0:
        raise NumericalError(f"equalization defect not positive at a = gamma*t+ (x={x}, t={t})")
    hi = 2.0 * base
    grown = 0
    while defect(hi) >= 0.0:
        hi *= cfg.bracket_growth
        grown += 1
        if grown > 60:
            raise NumericalError(f"no sign change of the equalization defect up to a={hi}")
    mid = 0.5 * (lo + hi)
    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f = defect(mid)
        if abs(f) <= cfg.root_tol:
            return mid
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    if abs(defect(mid)) <= cfg.root_tol:
        return mid
    raise NumericalError(f"a-bisection did not reach residual {cfg.root_tol} at x={x}, t={t}")


def q_terms(x: float, t: int, a: float, b: float) -> tuple[float, float, float]:
    """The three competing rate terms of q(x; a, b) at an arbitrary tilt pair.

    Intended for probing around a certificate: for a <= gamma*t the rate
    term's infimum over the open unit interval equals 1 (not attained), and
    that value is returned so off-domain probes remain well defined.
    Requires b > 0, the decay term's domain.
    """
    t = _require_dim(t)
    x = _require_x(x)
    if not (b > 0.0):
        raise DomainError(f"tilt b must be positive, got {b!r}")
    if a > EULER_GAMMA * t:
        rate = rho(a, t)[0]
    else:
        rate = 1.0
    tail = math.exp(-math.exp(-a - t * math.log(x) - t * math.log1p(b)))
    return rate, _decay(b), tail


def _growth(x: float, t: int, q: float) -> float:
    """Growth factor (e/x)^t * q, evaluated in log space."""
    return math.exp(t * (1.0 - math.log(x)) + math.log(q))


def q_of_x(x: float, t: int, cfg: SolverConfig = SolverConfig()) -> QEvaluation:
    """Equalized rate q(x) with its certifying tilts (a, b) and stationary point u.

    Solves a = a_root(x, t), b = b_root(x, a), q = rho(a), and verifies that
    the three rate terms agree pairwise within 10 * cfg.root_tol before
    returning.
    """
    t = _require_dim(t)
    x = _require_x(x)
    a = a_root(x, t, cfg)
    b = b_root(x, a, t, cfg)
    value, u_star = rho(a, t)
    terms = q_terms(x, t, a, b)
    spread = max(terms) - min(terms)
    if spread > 10.0 * cfg.root_tol:
        raise NumericalError(f"rate terms not equalized at x={x}, t={t}: {terms}")
    return QEvaluation(x=x, t=t, a=a, b=b, u=u_star, q=value, growth=_growth(x, t, value))


def certificate_residuals(ev: QEvaluation) -> float:
    """Max absolute defect of the two defining equations at a certificate."""
    h = abs(_h_defect(ev.x, ev.a, ev.b, ev.t))
    eq = abs(rho(ev.a, ev.t)[0] - _decay(ev.b))
    return max(h, eq)


def bw_lower(t: int) -> float:
    """Bollobas-Winkler lower bound t^2 / (t!^{1/t} * Gamma(1/t)).

    The scaled longest-chain constant lies in [bw_lower(t), e); the left
    endpoint increases towards e as t grows.
    """
    t = _require_dim(t)
    return t * t / (math.exp(log_gamma(t + 1.0) / t) * math.exp(log_gamma(1.0 / t)))


# ----------------------------------------------------------------------------
# Certificate curve parametrized by the stationary point u.
#
# For fixed t the equalized system can be read backwards: pick u in (0,1),
# then a = -t*psi(1-u) (stationarity), q = Gamma^t(1-u) e^{-a u} (rate term),
# b from (1+b)e^{-b} = q (decay term), and finally the tail term pins x
# explicitly through x^t (1+b)^t (b - log(1+b)) = e^{-a}.  x(u) is strictly
# decreasing, so solving x(u) = x is a one-dimensional bracketed problem with
# cheap iterates; the scan in bar_x walks the x-grid with a secant
# continuation on u and falls back to bisection whenever an iterate leaves
# its bracket.  Agreement with the a_root/b_root path is tested to solver
# tolerance.
# ----------------------------------------------------------------------------

_U_MIN = 1e-9

# zeta(2) ... zeta(9), for the small-u expansion of the equalized rate
_ZETA = (
    1.6449340668482264,
    1.2020569031595943,
    1.0823232337111382,
    1.0369277551433699,
    1.0173430619844491,
    1.0083492773819228,
    1.0040773561979443,
    1.0020083928260822,
)


def _rate_exponent_small_u(u: float) -> float:
    """log Gamma(1-u) + u * psi(1-u) for u <= 0.01, free of cancellation.

    Both terms are ~gamma*u and nearly cancel; their difference has the series
    -sum_{k>=2} zeta(k) (k-1)/k u^k, which is evaluated directly.
    """
    acc = 0.0
    pw = u * u
    for k in range(2, 10):
        acc += _ZETA[k - 2] * (k - 1) / k * pw
        pw *= u
    return -acc


def _invert_decay(neg_log_q: float, max_iter: int = 100) -> float:
    """Unique b > 0 with b - log(1+b) = -log q, taking -log q directly.

    Working from L = -log q keeps the inverse exact even when q itself would
    round to 1.  Newton iteration on f(b) = log(1+b) - b + L, started from
    the small-root expansion b ~ sqrt(2L) + 2L/3 (q near 1) or from two
    fixed-point steps of b = L + log(1+b) (q small); f is concave and
    decreasing, so Newton converges monotonically once it lands right of
    the root.
    """
    L = neg_log_q
    if not (L > 0.0) or not math.isfinite(L):
        raise NumericalError(f"decay inverse needs -log q > 0, got {L!r}")
    if L < 1e-3:
        s = math.sqrt(2.0 * L)
        b = s + s * s / 3.0
    else:
        b = L + math.log1p(L + math.log1p(L))
    for _ in range(max_iter):
        f = math.log1p(b) - b + L
        step = f * (1.0 + b) / (-b)
        b_next = b - step
        if b_next <= 0.0:
            b_next = 0.5 * b
        if abs(b_next - b) <= 1e-15 * (1.0 + b_next):
            return b_next
        b = b_next
    raise NumericalError(f"decay inverse did not converge for -log q = {L}")


def _curve_point(u: float, t: int) -> tuple[float, float, float, float]:
    """Map the stationary point u in (0,1) to (x, a, b, -log q).

    q is carried as L = -log q throughout: near u = 0 the rate is so close
    to 1 that q itself is not representable below 1, while L stays exact.
    The tail-term equalization then gives x explicitly through
    x^t (1+b)^t L = e^{-a}, using b - log(1+b) = L.
    """
    v = 1.0 - u
    a = -t * digamma(v)
    if u <= 0.01:
        L = -t * _rate_exponent_small_u(u)
    else:
        L = a * u - t * log_gamma(v)
    b = _invert_decay(L)
    x = math.exp(-a / t) / ((1.0 + b) * L ** (1.0 / t))
    return x, a, b, L


def _u_max(t: int) -> float:
    # keep a*u comfortably below the exp underflow threshold
    return 1.0 - t / 500.0


def _x_of_u(u: float, t: int) -> float:
    return _curve_point(u, t)[0]


def _solve_u_bisect(x: float, t: int, lo: float, hi: float) -> float:
    """Bisect the decreasing map x(u) to x(u) = x on a known bracket."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _x_of_u(mid, t) > x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_u(x: float, t: int, u_hi: float | None = None) -> float:
    """Solve x(u) = x from scratch; optionally with a known upper bracket."""
    hi = u_hi if u_hi is not None else _u_max(t)
    lo = _U_MIN
    if _x_of_u(hi, t) > x or _x_of_u(lo, t) < x:
        raise NumericalError(f"x={x} outside the invertible certificate range at t={t}")
    return _solve_u_bisect(x, t, lo, hi)


def q_curve(t: int, xs: Sequence[float], cfg: SolverConfig = SolverConfig()) -> list[QEvaluation]:
    """Certificates along an increasing grid of x values.

    Walks the grid left to right, predicting each next u by linear
    extrapolation of the previous two curve points and polishing with secant
    steps on x(u) - x; any iterate that misbehaves falls back to plain
    bisection below the previous u (x(u) is decreasing).  Each certificate
    matches q_of_x to solver tolerance at a fraction of its cost.
    """
    t = _require_dim(t)
    out: list[QEvaluation] = []
    u_prev: float | None = None
    x_prev = 0.0
    u_prev2: float | None = None
    x_prev2 = 0.0
    for x in xs:
        x = _require_x(x)
        if u_prev is None:
            u = _solve_u(x, t)
        else:
            if x <= x_prev:
                raise DomainError("q_curve requires a strictly increasing grid")
            u = _continue_u(x, t, u_prev, x_prev, u_prev2, x_prev2)
        _, a, b, neg_log_q = _curve_point(u, t)
        growth = math.exp(t * (1.0 - math.log(x)) - neg_log_q)
        out.append(
            QEvaluation(x=x, t=t, a=a, b=b, u=u, q=math.exp(-neg_log_q), growth=growth)
        )
        u_prev2, x_prev2 = u_prev, x_prev
        u_prev, x_prev = u, x
    return out


def _continue_u(
    x: float,
    t: int,
    u_prev: float,
    x_prev: float,
    u_prev2: float | None,
    x_prev2: float,
) -> float:
    # predictor: linear extrapolation through the last two curve points
    if u_prev2 is not None and x_prev != x_prev2:
        guess = u_prev + (x - x_prev) * (u_prev - u_prev2) / (x_prev - x_prev2)
    else:
        guess = u_prev * 0.999
    if not (0.0 < guess < u_prev):
        guess = u_prev * 0.5
    ua, fa = u_prev, x_prev - x
    ub = guess
    fb = _x_of_u(ub, t) - x
    ftol = 5e-14 * x
    for _ in range(30):
        if abs(fb) <= ftol:
            return ub
        if fb == fa:
            break
        uc = ub - fb * (ub - ua) / (fb - fa)
        if not (0.0 < uc <= u_prev) or not math.isfinite(uc):
            break
        ua, fa = ub, fb
        ub = uc
        fb = _x_of_u(ub, t) - x
    return _solve_u(x, t, u_hi=u_prev)


def bar_x(t: int, cfg: SolverConfig = SolverConfig()) -> BoundReport:
    """Infimum of x in [e^{-gamma}, e] where the growth factor (e/x)^t q(x) < 1.

    Scans cfg.x_grid_points equally spaced values, locates the first grid
    point with growth below 1, and bisects the bracketing interval until
    |growth - 1| <= cfg.root_tol.  The growth factor must be below 1 at x = e
    (q(e) < 1); if it is not, something is wrong with the solver and a
    NumericalError is raised.  More than one sign change on the grid is
    flagged, and the first crossing is reported.
    """
    t = _require_dim(t)
    n = cfg.x_grid_points
    step = (X_RIGHT - X_LEFT) / (n - 1)
    xs = [X_LEFT + i * step for i in range(n)]
    xs[-1] = X_RIGHT
    evs = q_curve(t, xs, cfg)
    below = [ev.growth < 1.0 for ev in evs]
    crossings = sum(1 for i in range(1, n) if below[i] != below[i - 1])
    if not below[-1]:
        raise NumericalError(
            f"growth factor {evs[-1].growth} >= 1 at x = e for t={t}; "
            "contradicts q(e) < 1 and indicates a solver defect"
        )
    if below[0]:
        report_x = X_LEFT
        at_left_edge = True
    else:
        k = below.index(True)
        at_left_edge = False
        report_x = _refine_crossing(t, cfg, xs[k - 1], xs[k], evs[k].u, evs[k - 1].u)
    cert = q_of_x(report_x, t, cfg)
    return BoundReport(
        t=t,
        bw_lower=bw_lower(t),
        bar_x=report_x,
        certificate=cert,
        residuals=certificate_residuals(cert),
        at_left_edge=at_left_edge,
        multiple_crossings=crossings > 1,
    )


def _growth_on_curve(x: float, t: int, u_lo: float, u_hi: float) -> float:
    u = _solve_u_bisect(x, t, u_lo, u_hi)
    return math.exp(t * (1.0 - math.log(x)) - _curve_point(u, t)[3])


def _refine_crossing(
    t: int, cfg: SolverConfig, x_lo: float, x_hi: float, u_lo: float, u_hi: float
) -> float:
    # growth >= 1 at x_lo, < 1 at x_hi; u decreasing in x so u in [u_lo, u_hi]
    mid = 0.5 * (x_lo + x_hi)
    for _ in range(cfg.max_iter):
        mid = 0.5 * (x_lo + x_hi)
        if mid == x_lo or mid == x_hi:
            break
        g = _growth_on_curve(mid, t, u_lo, u_hi)
        if abs(g - 1.0) <= cfg.root_tol:
            return mid
        if g >= 1.0:
            x_lo = mid
        else:
            x_hi = mid
    if abs(_growth_on_curve(mid, t, u_lo, u_hi) - 1.0) <= cfg.root_tol:
        return mid
    raise NumericalError(f"crossing refinement stalled between {x_lo} and {x_hi} for t={t}")
