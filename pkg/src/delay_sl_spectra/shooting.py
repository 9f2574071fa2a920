"""
Shooting solution w(x, s^2) of the retarded equation, one half at a time.

The left half starts from ``w(0) = p1, w'(0) = -s``; the right half starts at
pi/2 from the transmission jumps ``(gamma1/delta1) w(pi/2-)`` and
``(gamma2/delta2) w'(pi/2-)``.  Each half is integrated with classical RK4 on
a uniform grid and carries a cubic Hermite dense output, which also supplies
the retarded values y(x - delay(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from ._rk4 import sweep
from .errors import DelayOutOfRange, DomainError, ExpressionEvalError, NonfiniteState, OutOfDomain
from .expression import evaluate
from .problem import HALF_PI, ProblemSpec
from .quadrature import simpson_nodes

PIECES = ("left", "right")
_BOUNDS = {"left": (0.0, HALF_PI), "right": (HALF_PI, math.pi)}
# inward neighbours of pi/2: coefficients are one-sided limits from each half
_INWARD = {"left": np.nextafter(HALF_PI, 0.0), "right": np.nextafter(HALF_PI, 4.0)}
_DELAY_SLACK = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    steps_per_piece: int = 2000
    delay_correction_passes: int = 2
    residual_quadrature_panels: int = 512

    def __post_init__(self):
        if self.steps_per_piece < 16:
            raise ValueError("steps_per_piece must be >= 16")
        if self.delay_correction_passes < 1:
            raise ValueError("delay_correction_passes must be >= 1")
        if self.residual_quadrature_panels < 2 or self.residual_quadrature_panels % 2:
            raise ValueError("residual_quadrature_panels must be even and >= 2")

    def refined(self, factor: int = 2) -> "IntegratorConfig":
        return IntegratorConfig(self.steps_per_piece * factor,
                                self.delay_correction_passes,
                                self.residual_quadrature_panels * factor)


DEFAULT_CONFIG = IntegratorConfig()


def coefficient_values(spec: ProblemSpec, piece: str, x):
    """(q, delay) on one half; the point pi/2 is taken as a one-sided limit."""
    x = np.asarray(x, dtype=float)
    xe = np.where(x == HALF_PI, _INWARD[piece], x)
    try:
        qv = evaluate(spec.q_expr, xe)
        dv = evaluate(spec.delay_expr, xe)
    except DomainError as exc:
        raise ExpressionEvalError(str(exc)) from exc
    return np.broadcast_to(qv, x.shape).astype(float), np.broadcast_to(dv, x.shape).astype(float)


def delayed_points(spec: ProblemSpec, piece: str, x):
    """x - delay(x), checked to stay inside [start of the half, x]."""
    a = _BOUNDS[piece][0]
    x = np.asarray(x, dtype=float)
    _, dv = coefficient_values(spec, piece, x)
    td = x - dv
    if np.any(td < a - _DELAY_SLACK) or np.any(td > x + _DELAY_SLACK) or not np.all(np.isfinite(td)):
        bad = ~((td >= a - _DELAY_SLACK) & (td <= x + _DELAY_SLACK))
        i = int(np.argmax(bad))
        raise DelayOutOfRange(
            f"x - delay(x) = {float(td.flat[i])!r} at x = {float(x.flat[i])!r} "
            f"leaves [{a!r}, x] on the {piece} half")
    return np.clip(td, a, x), dv


def _hermite_weights(theta):
    t2 = theta * theta
    t3 = t2 * theta
    return np.stack([2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + theta, -2 * t3 + 3 * t2, t3 - t2], axis=-1)


@dataclass(frozen=True, eq=False)
class _PieceTable:
    nodes: np.ndarray
    h: float
    qv: np.ndarray
    mode: np.ndarray
    jidx: np.ndarray
    wts: np.ndarray
    theta: np.ndarray
    has_cur: np.ndarray


@lru_cache(maxsize=64)
def _piece_table(spec: ProblemSpec, piece: str, steps: int) -> _PieceTable:
    a, b = _BOUNDS[piece]
    nodes = np.linspace(a, b, steps + 1)
    h = (b - a) / steps
    starts = nodes[:-1]
    t = np.stack([starts, starts + 0.5 * h, nodes[1:]], axis=1)
    qv, _ = coefficient_values(spec, piece, t)
    td, dv = delayed_points(spec, piece, t)

    k = np.broadcast_to(np.arange(steps)[:, None], t.shape)
    in_current = td >= starts[:, None]
    mode = np.where(dv == 0.0, 0, np.where(in_current, 2, 1)).astype(np.int8)
    j = np.searchsorted(nodes, td, side="right") - 1
    j = np.clip(j, 0, np.maximum(k - 1, 0))
    theta_hist = np.clip((td - nodes[j]) / h, 0.0, 1.0)
    theta_cur = np.clip((td - starts[:, None]) / h, 0.0, 1.0)
    theta = np.where(mode == 2, theta_cur, theta_hist)
    return _PieceTable(
        nodes=nodes,
        h=h,
        qv=np.ascontiguousarray(qv),
        mode=np.ascontiguousarray(mode),
        jidx=np.ascontiguousarray(j.astype(np.int64)),
        wts=np.ascontiguousarray(_hermite_weights(theta)),
        theta=np.ascontiguousarray(theta),
        has_cur=np.any(mode == 2, axis=1),
    )


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolutionTrace:
    """Nodal values of one half plus cubic Hermite dense output."""

    piece: str
    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    s: float

    @cached_property
    def hermite(self) -> np.ndarray:
        """Per-interval coefficients c0..c3 of ``sum c_i (x - x_k)^i``."""
        h = np.diff(self.nodes)
        y0, y1 = self.values[:-1], self.values[1:]
        d0, d1 = self.derivs[:-1], self.derivs[1:]
        slope = (y1 - y0) / h
        c2 = (3 * slope - 2 * d0 - d1) / h
        c3 = (d0 + d1 - 2 * slope) / (h * h)
        return np.stack([y0, d0, c2, c3], axis=1)

    @property
    def bounds(self):
        return self.nodes[0], self.nodes[-1]

    def __call__(self, x):
        """Dense output ``(y, y')`` at ``x`` (scalar or array); exact at nodes."""
        xa = np.asarray(x, dtype=float)
        a, b = self.bounds
        if np.any(xa < a) or np.any(xa > b):
            raise OutOfDomain(f"x outside [{a!r}, {b!r}] on the {self.piece} half")
        nodes = self.nodes
        j = np.clip(np.searchsorted(nodes, xa, side="right") - 1, 0, len(nodes) - 2)
        c = self.hermite[j]
        dx = xa - nodes[j]
        y = c[..., 0] + dx * (c[..., 1] + dx * (c[..., 2] + dx * c[..., 3]))
        yp = c[..., 1] + dx * (2 * c[..., 2] + 3 * dx * c[..., 3])
        on_node = xa == nodes[j + 1]
        if np.any(on_node):
            y = np.where(on_node, self.values[j + 1], y)
            yp = np.where(on_node, self.derivs[j + 1], yp)
        if xa.ndim == 0:
            return float(y), float(yp)
        return y, yp

    @property
    def end(self):
        return float(self.values[-1]), float(self.derivs[-1])

    @property
    def start(self):
        return float(self.values[0]), float(self.derivs[0])


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    left: SolutionTrace
    right: SolutionTrace
    lam: float
    s: float

    def __call__(self, x, side: str = "left"):
        return eval_solution(self, x, side)

    def transmission_defects(self, spec: ProblemSpec):
        """Relative defects of gamma1 w(pi/2-) = delta1 w(pi/2+) and the same for w'."""
        yl, ypl = self.left.end
        yr, ypr = self.right.start
        out = []
        for g, d, lv, rv in ((spec.gamma1, spec.delta1, yl, yr),
                             (spec.gamma2, spec.delta2, ypl, ypr)):
            lhs, rhs = g * lv, d * rv
            out.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
        return tuple(out)


def _run_piece(spec, piece, s, y0, v0, cfg):
    table = _piece_table(spec, piece, cfg.steps_per_piece)
    p = spec.stiffness(piece)
    y, v = sweep(float(y0), float(v0), table.h, float(s) ** 2, 1.0 / (p * p),
                 table.qv, table.mode, table.jidx, table.wts, table.theta,
                 table.has_cur, int(cfg.delay_correction_passes))
    if not (np.isfinite(y[-1]) and np.isfinite(v[-1])
            and np.all(np.isfinite(y)) and np.all(np.isfinite(v))):
        raise NonfiniteState(f"state overflowed on the {piece} half at s={s!r}")
    return SolutionTrace(piece, table.nodes, y, v, float(s))


def integrate_left(spec: ProblemSpec, s: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> SolutionTrace:
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    return _run_piece(spec, "left", s, spec.p1, -s, cfg)


def transmit(left: SolutionTrace, spec: ProblemSpec):
    """Initial data of the right half from the left half's end values."""
    y, yp = left.end
    return (spec.gamma1 / spec.delta1) * y, (spec.gamma2 / spec.delta2) * yp


def integrate_right(spec: ProblemSpec, s: float, ics, cfg: IntegratorConfig = DEFAULT_CONFIG) -> SolutionTrace:
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")
    y0, v0 = ics
    return _run_piece(spec, "right", s, y0, v0, cfg)


def solve_w(spec: ProblemSpec, s: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> PiecewiseSolution:
    left = integrate_left(spec, s, cfg)
    right = integrate_right(spec, s, transmit(left, spec), cfg)
    s = float(s)
    return PiecewiseSolution(left, right, s * s, s)


def eval_solution(sol: PiecewiseSolution, x, side: str = "left"):
    """Dense value ``(w, w')``; at x = pi/2 ``side`` picks the one-sided limit."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > math.pi):
        raise OutOfDomain("x must lie in [0, pi]")
    if side not in PIECES:
        raise ValueError("side must be 'left' or 'right'")
    if xa.ndim == 0:
        use_left = xa < HALF_PI or (xa == HALF_PI and side == "left")
        return (sol.left if use_left else sol.right)(float(xa))
    use_left = (xa < HALF_PI) | ((xa == HALF_PI) & (side == "left"))
    y = np.empty_like(xa)
    yp = np.empty_like(xa)
    if np.any(use_left):
        y[use_left], yp[use_left] = sol.left(xa[use_left])
    if np.any(~use_left):
        y[~use_left], yp[~use_left] = sol.right(xa[~use_left])
    return y, yp


# ---------------------------------------------------------------------------
# Integral-equation residuals
# ---------------------------------------------------------------------------

def _retarded_integral(spec, trace, piece, x, s, p, panels):
    a = _BOUNDS[piece][0]
    tau, w = simpson_nodes(a, x, panels)
    qv, _ = coefficient_values(spec, piece, tau)
    td, _ = delayed_points(spec, piece, tau)
    yd, _ = trace(td)
    return float(np.dot(w, qv * np.sin(s * (x - tau) / p) * yd))


def integral_residuals(sol: PiecewiseSolution, spec: ProblemSpec,
                       cfg: IntegratorConfig = DEFAULT_CONFIG, test_points: int = 33):
    """Max deviation of the computed halves from their integral-equation forms.

    Left:  w1 = sqrt2 p1 cos(s x/p1 + pi/4) - 1/(s p1) int_0^x q sin(s(x-t)/p1) w1(t - delay) dt
    Right: w2 = A0 cos(s(x-pi/2)/p2) + p2 B0/s sin(...) - 1/(s p2) int_{pi/2}^x (...) w2(t - delay) dt
    """
    s = sol.s
    panels = cfg.residual_quadrature_panels
    p1, p2 = spec.p1, spec.p2

    r1 = 0.0
    for x in np.linspace(0.0, HALF_PI, test_points)[1:]:
        lhs = sol.left(x)[0]
        rhs = math.sqrt(2.0) * p1 * math.cos(s * x / p1 + math.pi / 4)
        if not spec.q_expr.is_zero:
            rhs -= _retarded_integral(spec, sol.left, "left", x, s, p1, panels) / (s * p1)
        r1 = max(r1, abs(lhs - rhs))

    yl, ypl = sol.left.end
    a0 = spec.gamma1 / spec.delta1 * yl
    b0 = spec.gamma2 / spec.delta2 * ypl
    r2 = 0.0
    for x in np.linspace(HALF_PI, math.pi, test_points)[1:]:
        lhs = sol.right(x)[0]
        arg = s * (x - HALF_PI) / p2
        rhs = a0 * math.cos(arg) + p2 * b0 / s * math.sin(arg)
        if not spec.q_expr.is_zero:
            rhs -= _retarded_integral(spec, sol.right, "right", x, s, p2, panels) / (s * p2)
        r2 = max(r2, abs(lhs - rhs))
    return r1, r2
