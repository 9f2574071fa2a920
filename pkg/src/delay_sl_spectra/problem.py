"""Problem instances: parameters, coefficient functions and admissibility checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ConstraintViolation,
    DegenerateTransmission,
    DomainError,
    ExpressionEvalError,
    NonpositiveStiffness,
)
from .expression import CoefficientExpr, evaluate, parse

HALF_PI = 0.5 * math.pi
COUPLING_RTOL = 1e-12
MIN_GRID = 512

ExprLike = Union[str, CoefficientExpr]


def _as_expr(e: ExprLike) -> CoefficientExpr:
    return parse(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class ProblemSpec:
    """One instance of the transmission problem with retarded argument.

    ``p(x) = p1**2`` on the left half ``[0, pi/2)``, ``p2**2`` on the right half.
    """

    p1: float
    p2: float
    gamma1: float
    gamma2: float
    delta1: float
    delta2: float
    d: float
    q_expr: CoefficientExpr
    delay_expr: CoefficientExpr

    @classmethod
    def build(cls, p1, p2, gamma1, gamma2, delta1, delta2, d,
              q: ExprLike = "0", delay: ExprLike = "0") -> "ProblemSpec":
        return cls(float(p1), float(p2), float(gamma1), float(gamma2),
                   float(delta1), float(delta2), float(d),
                   _as_expr(q), _as_expr(delay))

    def replace(self, **changes) -> "ProblemSpec":
        fields = dict(self.__dict__)
        for key in ("q", "delay"):
            if key in changes:
                changes[f"{key}_expr"] = _as_expr(changes.pop(key))
        fields.update(changes)
        return ProblemSpec(**fields)

    def q(self, x):
        return evaluate(self.q_expr, x)

    def delay(self, x):
        return evaluate(self.delay_expr, x)

    def stiffness(self, piece: str) -> float:
        return self.p1 if piece == "left" else self.p2


def validate(spec: ProblemSpec) -> ProblemSpec:
    """Return ``spec`` unchanged if the standing assumptions hold, else raise."""
    if not (spec.p1 > 0 and spec.p2 > 0):
        raise NonpositiveStiffness(f"p1={spec.p1}, p2={spec.p2}: both must be > 0")
    for i, (g, dl) in enumerate(((spec.gamma1, spec.delta1),
                                 (spec.gamma2, spec.delta2)), start=1):
        if abs(g) + abs(dl) == 0:
            raise DegenerateTransmission(f"|gamma{i}| + |delta{i}| = 0")
        if dl == 0:
            raise DegenerateTransmission(
                f"delta{i} = 0; the right-hand initial data divide by delta{i}")
    lhs = spec.gamma1 * spec.delta2 * spec.p1
    rhs = spec.gamma2 * spec.delta1 * spec.p2
    if abs(lhs - rhs) > COUPLING_RTOL * max(1.0, abs(lhs)):
        raise ConstraintViolation(
            f"gamma1*delta2*p1 = {lhs!r} differs from gamma2*delta1*p2 = {rhs!r}")
    return spec


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityReport:
    delay_nonneg: bool
    range_left_ok: bool
    range_right_ok: bool
    cond_a_ok: bool
    cond_b_ok: bool
    grid_size: int
    worst_margin: float
    max_delay_slope: float
    max_q_slope: float
    max_delay_curvature: float

    @property
    def all_ok(self) -> bool:
        return (self.delay_nonneg and self.range_left_ok and self.range_right_ok
                and self.cond_a_ok and self.cond_b_ok)


def piece_grid(piece: str, size: int) -> np.ndarray:
    """Uniform grid of ``size`` points on one half, never touching the other side.

    The left grid is ``[0, pi/2)``, the right grid ``(pi/2, pi]``.
    """
    if piece == "left":
        return np.linspace(0.0, HALF_PI, size, endpoint=False)
    return HALF_PI + (np.arange(1, size + 1) * (HALF_PI / size))


def _safe_eval(expr, x, name):
    try:
        vals = evaluate(expr, x)
    except DomainError as exc:
        raise ExpressionEvalError(f"{name} cannot be evaluated: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        bad = np.asarray(x)[~np.isfinite(vals)][0]
        raise ExpressionEvalError(f"{name} is not finite at x={bad!r}")
    return vals


def _difference_slopes(expr, x, name, h):
    """Derivative estimates: central differences at interior points plus
    neighbour quotients (the latter catch kinks falling between grid points)."""
    vals = _safe_eval(expr, x, name)
    quotients = np.diff(vals) / np.diff(x)
    inner = x[(x - h > x[0]) & (x + h < x[-1])]
    central = (_safe_eval(expr, inner + h, name) - _safe_eval(expr, inner - h, name)) / (2 * h)
    return quotients, central


def check_admissibility(spec: ProblemSpec, grid_size: int = MIN_GRID,
                        deriv_bound: float = 1e3, h: float = 1e-5) -> AdmissibilityReport:
    """Grid check of the delay range assumptions and conditions a), b).

    At least ``max(grid_size, 512)`` points per half are used. Derivatives are
    finite differences; "bounded" means finite and at most ``deriv_bound``.
    """
    size = max(int(grid_size), MIN_GRID)
    margins = []
    delay_nonneg = range_left = range_right = True
    max_dslope = -math.inf
    max_qslope = 0.0
    max_dcurv = 0.0
    for piece in ("left", "right"):
        x = piece_grid(piece, size)
        dl = _safe_eval(spec.delay_expr, x, "delay")
        _safe_eval(spec.q_expr, x, "q")
        margins.append(float(dl.min()))
        delay_nonneg &= bool(np.all(dl >= 0))
        if piece == "left":
            slack = x - dl
            range_left = bool(np.all(slack >= 0))
        else:
            slack = x - dl - HALF_PI
            range_right = bool(np.all(slack >= 0))
        margins.append(float(slack.min()))

        dq, dq_c = _difference_slopes(spec.q_expr, x, "q", h)
        dd, dd_c = _difference_slopes(spec.delay_expr, x, "delay", h)
        max_qslope = max(max_qslope, float(np.max(np.abs(dq))),
                         float(np.max(np.abs(dq_c), initial=0.0)))
        max_dslope = max(max_dslope, float(dd.max()), float(np.max(dd_c, initial=-math.inf)))
        # second derivative of the delay: differences of the slope estimates
        curv = np.diff(dd) / np.diff(x)[1:]
        inner = x[(x - h > x[0]) & (x + h < x[-1])]
        curv_c = (_safe_eval(spec.delay_expr, inner + h, "delay")
                  - 2 * _safe_eval(spec.delay_expr, inner, "delay")
                  + _safe_eval(spec.delay_expr, inner - h, "delay")) / (h * h)
        max_dcurv = max(max_dcurv, float(np.max(np.abs(curv), initial=0.0)),
                        float(np.max(np.abs(curv_c), initial=0.0)))

    cond_a = max_qslope <= deriv_bound and max_dcurv <= deriv_bound
    delay_at_0 = float(_safe_eval(spec.delay_expr, np.array([0.0]), "delay")[0])
    delay_right_limit = float(_safe_eval(
        spec.delay_expr, np.array([HALF_PI + 1e-10]), "delay")[0])
    cond_b = (max_dslope <= 1.0 + 1e-9 and abs(delay_at_0) <= 1e-12
              and abs(delay_right_limit) <= 1e-8)
    margins.append(1.0 - max_dslope)
    return AdmissibilityReport(
        delay_nonneg=delay_nonneg,
        range_left_ok=range_left,
        range_right_ok=range_right,
        cond_a_ok=bool(cond_a),
        cond_b_ok=bool(cond_b),
        grid_size=size,
        worst_margin=min(margins),
        max_delay_slope=max_dslope,
        max_q_slope=max_qslope,
        max_delay_curvature=max_dcurv,
    )
