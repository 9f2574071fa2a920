"""
Closed-form large-n predictions for eigenvalues and eigenfunctions, the
oscillatory functionals they are built from, and the a-priori bounds on the
shooting solution.

Notation used throughout: ``s0(n) = p1 p2 (4n-3) / (2 (p1+p2))`` is the
leading root estimate, and the four functionals are

    A(x, s) = int_0^x     (sqrt2/2) q(t) sin(s delay(t)/p1 - pi/4) dt
    B(x, s) = int_0^x     (sqrt2/2) q(t) cos(s delay(t)/p1 - pi/4) dt
    C(x, s) = int_{pi/2}^x (sqrt2/2) q(t) sin(s delay(t)/p2 - pi/4) dt
    D(x, s) = int_{pi/2}^x (sqrt2/2) q(t) cos(s delay(t)/p2 - pi/4) dt
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

import numpy as np

from .errors import DegenerateFit, OutOfDomain
from .fitting import slope_fit
from .problem import HALF_PI, ProblemSpec
from .quadrature import oscillatory_panels, simpson_nodes
from .shooting import PiecewiseSolution, coefficient_values

SQRT2 = math.sqrt(2.0)
QUARTER_PI = 0.25 * math.pi

Sign = Literal["paper", "corrected"]
Form = Literal["paper", "corrected"]


def _sigma(sign: str) -> float:
    if sign == "paper":
        return 1.0
    if sign == "corrected":
        return -1.0
    raise ValueError(f"sign must be 'paper' or 'corrected', got {sign!r}")


def leading_s(spec: ProblemSpec, n: int) -> float:
    p1, p2 = spec.p1, spec.p2
    return p1 * p2 * (4 * n - 3) / (2.0 * (p1 + p2))


# ---------------------------------------------------------------------------
# Oscillatory functionals
# ---------------------------------------------------------------------------

def _piece_of(lo):
    return "left" if lo < HALF_PI else "right"


def _weighted_integral(spec, lo, hi, kernel, panels):
    """int_lo^hi (sqrt2/2) q(t) kernel(t, delay(t)) dt by composite Simpson."""
    if hi == lo:
        return 0.0
    tau, w = simpson_nodes(lo, hi, panels)
    qv, dv = coefficient_values(spec, _piece_of(lo), tau)
    return float(np.dot(w, 0.5 * SQRT2 * qv * kernel(tau, dv)))


def functional(spec: ProblemSpec, which: str, x: float, s: float, panels: int = None) -> float:
    """One of A, B (integrated from 0) or C, D (integrated from pi/2) up to ``x``."""
    if panels is None:
        panels = oscillatory_panels(s)
    if which in "AB":
        if not 0 <= x <= HALF_PI:
            raise OutOfDomain("A and B are defined on [0, pi/2]")
        lo, p = 0.0, spec.p1
    elif which in "CD":
        if not HALF_PI <= x <= math.pi:
            raise OutOfDomain("C and D are defined on [pi/2, pi]")
        lo, p = HALF_PI, spec.p2
    else:
        raise ValueError(f"unknown functional {which!r}")
    trig = np.sin if which in "AC" else np.cos
    return _weighted_integral(spec, lo, x, lambda t, dl: trig(s * dl / p - QUARTER_PI), panels)


@dataclass(frozen=True)
class OscFunctionals:
    s: float
    A_half: float
    B_half: float
    C_pi: float
    D_pi: float
    panels: int


def functionals(spec: ProblemSpec, s: float, panels: int = None) -> OscFunctionals:
    if panels is None:
        panels = oscillatory_panels(s)
    if panels < 64 or panels % 2:
        raise ValueError("panels must be even and >= 64")
    return OscFunctionals(
        s=float(s),
        A_half=functional(spec, "A", HALF_PI, s, panels),
        B_half=functional(spec, "B", HALF_PI, s, panels),
        C_pi=functional(spec, "C", math.pi, s, panels),
        D_pi=functional(spec, "D", math.pi, s, panels),
        panels=panels,
    )


def abs_q_integrals(spec: ProblemSpec, panels: int = 2048) -> Tuple[float, float]:
    """(int_0^{pi/2} |q|, int_{pi/2}^pi |q|)."""
    out = []
    for lo, hi in ((0.0, HALF_PI), (HALF_PI, math.pi)):
        tau, w = simpson_nodes(lo, hi, panels)
        qv, _ = coefficient_values(spec, _piece_of(lo), tau)
        out.append(float(np.dot(w, np.abs(qv))))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymEstimate:
    n: int
    s_leading: float
    delta_n: float
    s_refined: float
    bracket_terms: Tuple[float, float, float]
    sign_convention: str


def correction_bound_constant(spec: ProblemSpec) -> float:
    """K with |delta_n| <= K / (4n - 3) for every n."""
    ql, qr = abs_q_integrals(spec)
    dg = abs(spec.d * spec.gamma1 / spec.delta1)
    bound_bd = 0.5 * SQRT2 * (ql / spec.p1 + qr / spec.p2)
    # 1.01 absorbs the quadrature error of the |q| integrals
    return 1.01 * 4.0 / math.pi * (abs(spec.gamma2 / spec.delta2) + dg * bound_bd)


def refined_s(spec: ProblemSpec, n: int, panels: int = None, sign: Sign = "corrected") -> AsymEstimate:
    """Leading root estimate plus the O(1/n) correction built from B and D.

    ``sign="paper"`` adds the bracket as printed in the source derivation;
    ``sign="corrected"`` subtracts it, which is what the exactly solvable
    continuous case (p1 = p2, q = 0) requires.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    sigma = _sigma(sign)
    s0 = leading_s(spec, n)
    f = functionals(spec, s0, panels)
    dg = spec.d * spec.gamma1 / spec.delta1
    terms = (spec.gamma2 / spec.delta2, dg * f.B_half / spec.p1, dg * f.D_pi / spec.p2)
    delta = sigma * 4.0 / ((4 * n - 3) * math.pi) * sum(terms)
    return AsymEstimate(n, s0, delta, s0 + delta, terms, sign)


# ---------------------------------------------------------------------------
# Decay of the rapidly oscillating integrals
# ---------------------------------------------------------------------------

def decay_integral(spec: ProblemSpec, which: int, s: float, panels: int = None) -> float:
    """Integral number ``which`` (1..4) of the O(1/s) family.

    1, 2: cos / sin of s (2t - delay)/p1 + pi/4 over [0, pi/2];
    3, 4: the same with p2 over [pi/2, pi].
    """
    if which not in (1, 2, 3, 4):
        raise ValueError("which must be 1, 2, 3 or 4")
    if panels is None:
        panels = oscillatory_panels(s)
    lo, hi, p = (0.0, HALF_PI, spec.p1) if which <= 2 else (HALF_PI, math.pi, spec.p2)
    trig = np.cos if which % 2 else np.sin
    return _weighted_integral(
        spec, lo, hi, lambda t, dl: trig(s * (2 * t - dl) / p + QUARTER_PI), panels)


def decay_check(spec: ProblemSpec, which: int, s_grid: Sequence[float], panels: int = None):
    """(slope, r2) of log|integral| against log s.

    Raises DegenerateFit when every value is below 1e-14 in magnitude.
    """
    s_grid = [float(s) for s in s_grid]
    if len(s_grid) < 6 or any(b <= a for a, b in zip(s_grid, s_grid[1:])):
        raise ValueError("s_grid must be increasing with at least 6 points")
    values = np.array([decay_integral(spec, which, s, panels) for s in s_grid])
    if np.all(np.abs(values) < 1e-14):
        raise DegenerateFit(f"decay integral {which} vanishes on the whole grid")
    slope, _, r2 = slope_fit(list(zip(s_grid, np.abs(values))))
    return slope, r2


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

def leading_eigenfunction(spec: ProblemSpec, n: int, x, side: str = "left",
                          form: Form = "corrected"):
    """Leading-order eigenfunction, normalised like w (value p1 at x = 0).

    On the right half the phase is
    ``(pi/4) + pi (p2-p1)(4n-3) / (4 (p1+p2))``, which is the leading-order
    right-half solution evaluated at s0(n).  ``form="paper"`` uses the printed
    display, whose phase term carries an extra factor 1/4; the two coincide
    when p1 == p2.  ``x`` may be an array; ``side`` resolves x == pi/2.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > math.pi):
        raise OutOfDomain("x must lie in [0, pi]")
    if form not in ("paper", "corrected"):
        raise ValueError(f"form must be 'paper' or 'corrected', got {form!r}")
    p1, p2 = spec.p1, spec.p2
    m = 4 * n - 3
    left = SQRT2 * p1 * np.cos(p2 * m * xa / (2 * (p1 + p2)) + QUARTER_PI)
    ratio = (p2 - p1) * m / (p1 + p2)
    phase = QUARTER_PI * (1 + (ratio / 4 if form == "paper" else ratio))
    amp = SQRT2 * p1 * spec.gamma1 / spec.delta1
    right = amp * np.cos(p1 * m * xa / (2 * (p1 + p2)) + phase)
    use_left = (xa < HALF_PI) | ((xa == HALF_PI) & (side == "left"))
    out = np.where(use_left, left, right)
    return float(out) if out.ndim == 0 else out


def refined_w1_asym(spec: ProblemSpec, s: float, x: float, panels: int = None,
                    form: Form = "paper") -> float:
    """Left-half solution to first order in 1/s.

    ``form="paper"``:
        cos(th) [sqrt2 p1 + A(x,s)/(s p1)] - sin(th) B(x,s)/(s p1),  th = s x/p1 + pi/4
    ``form="corrected"`` (what averaging the integral equation gives):
        cos(th) [sqrt2 p1 + S(x,s)/s] - sin(th) C(x,s)/s
    with S, C the integrals of (sqrt2/2) q sin / cos (s delay/p1), no pi/4 shift.
    """
    if not 0 <= x <= HALF_PI:
        raise OutOfDomain("x must lie in [0, pi/2]")
    p1 = spec.p1
    th = s * x / p1 + QUARTER_PI
    if panels is None:
        panels = oscillatory_panels(s)
    if form == "paper":
        a = functional(spec, "A", x, s, panels)
        b = functional(spec, "B", x, s, panels)
        return math.cos(th) * (SQRT2 * p1 + a / (s * p1)) - math.sin(th) * b / (s * p1)
    if form != "corrected":
        raise ValueError(f"form must be 'paper' or 'corrected', got {form!r}")
    sn = _weighted_integral(spec, 0.0, x, lambda t, dl: np.sin(s * dl / p1), panels)
    cs = _weighted_integral(spec, 0.0, x, lambda t, dl: np.cos(s * dl / p1), panels)
    return math.cos(th) * (SQRT2 * p1 + sn / s) - math.sin(th) * cs / s


def paper_u1n(spec: ProblemSpec, n: int, x: float, panels: int = None) -> float:
    """Printed refined left-half eigenfunction, evaluated term by term."""
    if not 0 <= x <= HALF_PI:
        raise OutOfDomain("x must lie in [0, pi/2]")
    p1, p2, g1, g2, d1, d2, d = (spec.p1, spec.p2, spec.gamma1, spec.gamma2,
                                 spec.delta1, spec.delta2, spec.d)
    m = 4 * n - 3
    s0 = leading_s(spec, n)
    if panels is None:
        panels = oscillatory_panels(s0)
    a_x = functional(spec, "A", x, s0, panels)
    b_half = functional(spec, "B", HALF_PI, s0, panels)
    d_pi = functional(spec, "D", math.pi, s0, panels)
    th = p2 * m * x / (2 * (p1 + p2)) + QUARTER_PI
    first = math.cos(th) * (SQRT2 * p1 + 2 * (p1 + p2) * a_x / (p1 ** 2 * p2 * m))
    bracket = p1 * g2 / d2 + d * g1 * b_half / d1 + d * p1 * g1 * d_pi / (p2 * d1)
    return first - math.sin(th) * (4 * SQRT2 / (m * math.pi)) * bracket


def paper_u2n(spec: ProblemSpec, n: int, x: float, panels: int = None) -> float:
    """Printed refined right-half eigenfunction, evaluated term by term."""
    if not HALF_PI <= x <= math.pi:
        raise OutOfDomain("x must lie in [pi/2, pi]")
    p1, p2, g1, g2, d1, d2, d = (spec.p1, spec.p2, spec.gamma1, spec.gamma2,
                                 spec.delta1, spec.delta2, spec.d)
    m = 4 * n - 3
    s0 = leading_s(spec, n)
    if panels is None:
        panels = oscillatory_panels(s0)
    a = functional(spec, "A", HALF_PI, s0, panels)
    b = functional(spec, "B", HALF_PI, s0, panels)
    c_x = functional(spec, "C", x, s0, panels)
    d_x = functional(spec, "D", x, s0, panels)
    d_pi = functional(spec, "D", math.pi, s0, panels)

    lin = m * p1 * x / (2 * (p1 + p2))
    psi = m * (p2 - p1) * math.pi / (4 * (p1 + p2)) + lin + QUARTER_PI
    sgn = (-1.0) ** n
    scale = 2 * (p1 + p2) / (m * p1 ** 2 * p2)

    part1 = g1 / (2 * d1) * (
        (-sgn * math.sin(lin) + math.cos(psi)) * (SQRT2 * p1 + scale * a)
        + (sgn * math.cos(lin) - math.sin(psi)) * scale * b
    )
    bracket = g2 / d2 + d * g1 * b / (p1 * d1) + d * g1 * d_pi / (p2 * d1)
    part2 = -SQRT2 * g2 * p2 / (2 * d2) * (
        -sgn * math.sin(lin)
        + 4 / (m * math.pi) * (sgn * math.cos(lin) + math.sin(psi)) * bracket
        + math.cos(psi)
    )
    part3 = g2 * (p1 + p2) / (d2 * p1 ** 3 * m) * b * (sgn * math.cos(lin) - math.sin(psi))
    part4 = 2 * g2 * (p1 + p2) * a / (d2 * p1 ** 3 * m) * (sgn * math.sin(lin) + math.cos(psi))
    part5 = -2 * g1 * (p1 + p2) / (m * d1 * p2 ** 2) * (math.sin(psi) * d_x - c_x * math.cos(psi))
    return part1 + part2 + part3 + part4 + part5


# ---------------------------------------------------------------------------
# A-priori bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    s: float
    q1: float
    q2: float
    q2_signed: float
    lambda_threshold: float
    bound14: float
    bound15: float
    observed_sup_left: float
    observed_sup_right: float

    @property
    def applies(self) -> bool:
        return self.s * self.s >= self.lambda_threshold

    @property
    def left_ok(self) -> bool:
        return self.observed_sup_left <= self.bound14

    @property
    def right_ok(self) -> bool:
        return self.observed_sup_right <= self.bound15


def lemma2_report(spec: ProblemSpec, s: float, sol: PiecewiseSolution, panels: int = 2048) -> BoundReport:
    """Bounds on max|w| per half, with sups measured on the trace nodes.

    q2 uses |q| for the threshold; the signed integral is kept as ``q2_signed``.
    """
    ql, qr = abs_q_integrals(spec, panels)
    tau, w = simpson_nodes(HALF_PI, math.pi, panels)
    qv, _ = coefficient_values(spec, "right", tau)
    q1 = ql / spec.p1
    q2 = qr / spec.p2
    p1 = abs(spec.p1)
    return BoundReport(
        s=float(s),
        q1=q1,
        q2=q2,
        q2_signed=float(np.dot(w, qv)) / spec.p2,
        lambda_threshold=max(4 * q1 * q1, 4 * q2 * q2),
        bound14=2 * SQRT2 * p1,
        bound15=4 * SQRT2 * p1 * (abs(spec.gamma1 / spec.delta1)
                                  + abs(spec.p2 * spec.gamma2 / (4 * spec.p1 * spec.delta2))),
        observed_sup_left=float(np.max(np.abs(sol.left.values))),
        observed_sup_right=float(np.max(np.abs(sol.right.values))),
    )
