"""Closed-form security quantities and the numeric routines behind them.

Combinatorial quantities are computed in exact rational arithmetic
(fractions.Fraction); floating point only enters where the result is
genuinely transcendental (quadrature of the phase-measurement kernel,
exponential tail bounds, truncated series).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParameterError, QuadratureError
from .qcore.povm import phase_povm_density

TWO_PI = 2.0 * math.pi


# ---- verification sampling ----------------------------------------------


def untested_probability(n_voters: int, corrupt_voters: int, security_param: int) -> Fraction:
    """Probability that planted bad copies survive verification sampling.

    Pool: n_voters + n_voters * 2**security_param distribution copies, of
    which n_voters are bad.  Each honest voter in turn draws
    2**security_param copies uniformly without replacement and tests
    them; corrupt voters draw last and dodge the bad copies.  Returns
    the exact chance that no honest draw ever hits a bad copy, in which
    case exactly the bad copies survive.
    """
    n, t = int(n_voters), int(corrupt_voters)
    if n < 1 or not 0 <= t <= n or security_param < 0:
        raise ParameterError(f"bad sampling parameters n={n}, t={t}, delta0={security_param}")
    draw = 2**security_param
    pool = n + n * draw
    prob = Fraction(1)
    for k in range(n - t):
        remaining = pool - k * draw
        prob *= Fraction(math.comb(remaining - n, draw), math.comb(remaining, draw))
    return prob


def untested_probability_closed_form(n_voters: int, corrupt_voters: int, security_param: int) -> Fraction:
    """Same quantity as a telescoped product: prod_i (t*2^d + i) / (n*2^d + i)."""
    n, t = int(n_voters), int(corrupt_voters)
    if n < 1 or not 0 <= t <= n or security_param < 0:
        raise ParameterError(f"bad sampling parameters n={n}, t={t}, delta0={security_param}")
    draw = 2**security_param
    prob = Fraction(1)
    for i in range(1, n + 1):
        prob *= Fraction(t * draw + i, n * draw + i)
    return prob


# ---- adaptive quadrature -------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float  # final accumulated error estimate
    evaluations: int


_MAX_EVALS = 2_000_000


def integrate_adaptive(f, a: float, b: float, tol: float = 1e-10) -> QuadratureResult:
    """Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.

    Bisects any panel whose Richardson error estimate exceeds its share
    of the tolerance; raises QuadratureError if the evaluation budget
    runs out before convergence.
    """
    if not b > a:
        raise ParameterError(f"empty or reversed interval [{a}, {b}]")
    if tol <= 0:
        raise ParameterError("tolerance must be positive")

    evals = 0

    def eval_f(x: float) -> float:
        nonlocal evals
        evals += 1
        if evals > _MAX_EVALS:
            raise QuadratureError(f"quadrature exceeded {_MAX_EVALS} evaluations")
        return float(f(x))

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, budget, depth):
        xm = 0.5 * (x0 + x2)
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        fl, fr = eval_f(xl), eval_f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        err = (left + right - whole) / 15.0
        if abs(err) <= budget or depth >= 60:
            return left + right + err, abs(err)
        lv, le = recurse(x0, xm, f0, fl, f1, left, budget / 2.0, depth + 1)
        rv, re = recurse(xm, x2, f1, fr, f2, right, budget / 2.0, depth + 1)
        return lv + rv, le + re

    fa, fm, fb = eval_f(a), eval_f(0.5 * (a + b)), eval_f(b)
    whole = simpson(a, b, fa, fm, fb)
    value, err = recurse(a, b, fa, fm, fb, whole, tol, 0)
    return QuadratureResult(value=value, error=err, evaluations=evals)


# ---- phase-measurement interval masses ------------------------------------


def _integrate_kernel(dim: int, theta_v: float, lo: float, hi: float, tol: float) -> float:
    """Integrate the measurement density over [lo, hi] without aliasing.

    The kernel oscillates with period 2*pi/dim, which can line up with
    Simpson bisection points and fake convergence; chopping the window
    into half-lobe panels first makes each panel unimodal.
    """
    edges = [lo]
    step = math.pi / dim
    k = math.floor((lo - theta_v) / step) + 1
    while theta_v + k * step < hi - 1e-15:
        cut = theta_v + k * step
        if cut > lo + 1e-15:
            edges.append(cut)
        k += 1
    edges.append(hi)
    piece_tol = tol / max(len(edges) - 1, 1)
    dens = lambda t: phase_povm_density(t, dim, theta_v=theta_v)
    return sum(
        integrate_adaptive(dens, a, b, piece_tol).value for a, b in zip(edges, edges[1:])
    )


def interval_mass(dim: int, delta: float, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Probability that the phase measurement lands in (lo, hi).

    Angles are offsets from the grid point x_l = 2*pi*l/dim nearest
    below the state angle; delta in [0, 2*pi/dim) is the state angle's
    offset from that grid point.  The integrand's removable singularity
    at the state angle is filled with its limit value.
    """
    if dim < 2:
        raise ParameterError("dimension must be >= 2")
    if not 0.0 <= delta <= TWO_PI / dim:
        raise DomainError(f"delta {delta!r} outside [0, 2*pi/dim]")
    return _integrate_kernel(dim, delta, lo, hi, tol)


def single_bin_mass(dim: int, delta: float, tol: float = 1e-10) -> float:
    """Mass of the grid bin (x_l, x_{l+1}) containing the state angle."""
    return interval_mass(dim, delta, 0.0, TWO_PI / dim, tol)


def three_bin_mass(dim: int, delta: float, tol: float = 1e-10) -> float:
    """Mass of the three grid bins centered on the state angle's bin."""
    if dim < 3:
        raise ParameterError("three-bin window needs dimension >= 3")
    return interval_mass(dim, delta, -TWO_PI / dim, 2.0 * TWO_PI / dim, tol)


def wraparound_mass(dim: int, delta: float, level: int, tol: float = 1e-10) -> float:
    """Three-bin mass when the state angle's bin touches the angular origin.

    For level = dim-1 the window is (x_{dim-2}, x_dim) plus (x_0, x_1);
    for level = 0 it is (x_{dim-1}, x_dim) plus (x_0, x_2).  Computed as
    the two absolute-angle pieces; periodicity makes it equal the
    contiguous three-bin window, which tests assert separately.
    """
    if dim < 3:
        raise ParameterError("three-bin window needs dimension >= 3")
    if level not in (0, dim - 1):
        raise ParameterError("wraparound window is defined for level 0 and dim-1")
    if not 0.0 <= delta <= TWO_PI / dim:
        raise DomainError(f"delta {delta!r} outside [0, 2*pi/dim]")
    step = TWO_PI / dim
    theta_v = step * level + delta
    # the kernel is 2*pi-periodic, so each absolute-angle piece can be
    # integrated directly even when it sits a full period from theta_v
    if level == dim - 1:
        pieces = [(step * (dim - 2), TWO_PI), (0.0, step)]
    else:
        pieces = [(step * (dim - 1), TWO_PI), (0.0, 2.0 * step)]
    return sum(_integrate_kernel(dim, theta_v, a, b, tol / 2.0) for a, b in pieces)


def povm_total_mass(dim: int, tol: float = 1e-10) -> float:
    """Total outcome mass over a full period; should be 1."""
    return interval_mass(dim, 0.0, 0.0, TWO_PI, tol)


# ---- series and tail bounds -----------------------------------------------


def sin2_taylor_lower(x: float, terms: int = 20) -> float:
    """Truncated alternating series sum_n (-1)^(n+1) 2^(2n-1) x^(2n) / (2n)!.

    A strict lower bound for sin^2(x) on [-2*pi, 2*pi] except at 0 where
    both sides vanish.
    """
    if not -TWO_PI <= x <= TWO_PI:
        raise DomainError(f"x={x!r} outside [-2*pi, 2*pi]")
    if terms < 1:
        raise ParameterError("need at least one series term")
    total = 0.0
    term = 2.0 * x * x / 2.0  # n = 1 term: 2^1 x^2 / 2!
    for n in range(1, terms + 1):
        total += term
        term *= -4.0 * x * x / ((2 * n + 1) * (2 * n + 2))
    return total


def three_bin_taylor_value(terms: int = 20) -> float:
    """Series value of the three-bin mass lower bound at delta = 0.

    Term n is (-1)^(n+1) 2^(2n-1) pi^(2n-2) (2^(2n-1)+1) / ((2n)! (2n-1)).
    Evaluates to about 0.9264.
    """
    total = 0.0
    for n in range(1, terms + 1):
        total += (
            (-1) ** (n + 1)
            * 2.0 ** (2 * n - 1)
            * math.pi ** (2 * n - 2)
            * (2.0 ** (2 * n - 1) + 1.0)
            / (math.factorial(2 * n) * (2 * n - 1))
        )
    return total


def chernoff_lower_tail(mean: float, gamma: float) -> float:
    """Bound on Pr[X <= (1-gamma)*mean] for a binomial sum: exp(-gamma^2*mean/3)."""
    if mean <= 0:
        raise DomainError("mean must be positive")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"lower-tail deviation gamma={gamma!r} must lie in (0, 1]")
    return math.exp(-gamma * gamma * mean / 3.0)


def chernoff_upper_tail(mean: float, gamma: float) -> float:
    """Bound on Pr[X >= (1+gamma)*mean] for gamma > 1: exp(-gamma*mean/3)."""
    if mean <= 0:
        raise DomainError("mean must be positive")
    if gamma <= 1.0:
        raise DomainError(f"upper-tail form needs gamma > 1, got {gamma!r}")
    return math.exp(-gamma * mean / 3.0)


def rounds_success_floor(rounds: int) -> float:
    """(1 - 1/rounds)^rounds: worst-case success floor over repeated rounds.

    Equals 0.25 exactly at rounds=2 and increases toward 1/e.
    """
    if rounds < 2:
        raise ParameterError("rounds must be >= 2")
    return (1.0 - 1.0 / rounds) ** rounds


# ---- bound verification suite ---------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    value: float
    requirement: str


def run_bound_suite(names: list[str] | None = None, _sabotage: bool = False) -> list[BoundCheck]:
    """Evaluate every closed-form bound and report pass/fail per bound.

    names filters by check name; _sabotage deliberately corrupts one
    comparison so the failure path of callers can be exercised.
    """
    checks: list[BoundCheck] = []

    def add(name, passed, value, requirement):
        checks.append(BoundCheck(name, bool(passed), float(value), requirement))

    four_over_pi2 = 4.0 / math.pi**2

    p = untested_probability(1, 0, 1)
    add("untested-base-case", p == Fraction(1, 3), float(p), "== 1/3 exactly")

    agree = all(
        untested_probability(n, t, d) == untested_probability_closed_form(n, t, d)
        for n in range(1, 6)
        for t in range(n + 1)
        for d in range(3)
    )
    add("untested-closed-form-identity", agree, 1.0 if agree else 0.0,
        "product of draw survivals == telescoped product, exact, all n<=5")

    exceeds = all(
        untested_probability(n, t, d) > Fraction(t, 2 * n) ** n
        for n in range(1, 6)
        for t in range(1, n + 1)
        for d in range(3)
    )
    add("untested-exceeds-power-floor", exceeds, 1.0 if exceeds else 0.0,
        "strictly above (t/(2n))^n for all t >= 1, n <= 5")

    worst = min(single_bin_mass(d, 0.0) for d in (4, 8, 16, 64))
    target = four_over_pi2 - 1e-9 + (0.2 if _sabotage else 0.0)
    add("single-bin-floor-at-zero", worst >= target, worst, ">= 4/pi^2 - 1e-9, D in {4,8,16,64}")

    grid_min = min(
        single_bin_mass(d, x) for d in (4, 8, 16, 64)
        for x in np.linspace(0.0, TWO_PI / d, 33)
    )
    add("single-bin-floor-grid", grid_min >= 0.405, grid_min, ">= 0.405 on a delta grid")

    three_at_zero = three_bin_mass(64, 0.0)
    add("three-bin-value", abs(three_at_zero - 0.9263) <= 1e-3, three_at_zero,
        "within 1e-3 of 0.9263 at D=64, delta=0")

    three_min = min(
        three_bin_mass(d, x) for d in (4, 8, 16, 64)
        for x in np.linspace(0.0, TWO_PI / d, 33)
    )
    add("three-bin-floor", three_min >= 0.9, three_min, ">= 0.9 on a delta grid")

    wrap_min = min(
        wraparound_mass(d, x, lv)
        for d in (4, 8, 16)
        for lv in (0, d - 1)
        for x in np.linspace(0.0, TWO_PI / d, 17)
    )
    add("wraparound-floor", wrap_min >= 0.9, wrap_min, ">= 0.9 for edge levels")

    xs = np.linspace(-TWO_PI, TWO_PI, 4001)
    ok = all(sin2_taylor_lower(float(x)) <= math.sin(x) ** 2 + 1e-12 for x in xs)
    add("sin2-taylor-lower", ok, 1.0 if ok else 0.0, "series never exceeds sin^2 on [-2pi, 2pi]")

    taylor3 = three_bin_taylor_value()
    add("three-bin-taylor-consistency", taylor3 <= three_bin_mass(64, 0.0) and abs(taylor3 - 0.9264) < 2e-4,
        taylor3, "series value ~0.9264 and below the quadrature mass")

    gamma = 1.0 - 0.4 / 0.405
    bound = chernoff_lower_tail(0.405 * 500, gamma)
    add("chernoff-lower-instantiation", 1.0 - bound < 0.02, bound,
        "1 - exp(-gamma^2 mu / 3) < 0.02 at mu = 202.5")

    upper_ok = all(chernoff_upper_tail(0.1 * n, 3.0) < 1.0 for n in range(10, 2000, 10))
    add("chernoff-upper-instantiation", upper_ok, 1.0 if upper_ok else 0.0,
        "exp(-gamma mu / 3) < 1 for gamma=3, n >= 10")

    rho = np.arange(2, 1_000_001, dtype=float)
    floors = (1.0 - 1.0 / rho) ** rho
    rounds_ok = floors[0] == 0.25 and bool(np.all(floors[1:] > 0.25))
    add("rounds-success-floor", rounds_ok, float(floors.min()),
        "== 0.25 at rho=2, > 0.25 for 3 <= rho <= 1e6")

    total = povm_total_mass(16)
    add("povm-completeness", abs(total - 1.0) <= 1e-8, total, "density integrates to 1 within 1e-8")

    if names:
        wanted = set(names)
        unknown = wanted - {c.name for c in checks}
        if unknown:
            raise ParameterError(f"unknown bound checks: {sorted(unknown)}")
        checks = [c for c in checks if c.name in wanted]
    return checks
