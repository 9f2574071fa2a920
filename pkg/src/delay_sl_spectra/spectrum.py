"""
Eigenvalues as roots of the characteristic function

    G(s) = w'(pi, s^2) + d s^2 w(pi, s^2),

searched one asymptotic window at a time: the n-th window is centred at
p1 p2 (4n-3) / (2 (p1+p2)) with half-width p1 p2 / (p1+p2), so consecutive
windows tile the s-axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidWindow, MultipleRootsInWindow, NoRootInWindow, SpectralError
from .problem import ProblemSpec
from .shooting import DEFAULT_CONFIG, IntegratorConfig, PiecewiseSolution, solve_w

DEFAULT_SCAN_POINTS = 64
DEFAULT_TOL = 1e-8
# |G| below this (relative to 1 + s^2) at a grid node counts as a root there
NODE_ZERO_RTOL = 1e-9


@dataclass(frozen=True)
class EigenRecord:
    n: int
    s_n: float
    lambda_n: float
    window: Tuple[float, float]
    bracket: Tuple[float, float]
    simplicity_margin: float
    bisection_iters: int


@dataclass
class SpectrumReport:
    records: List[EigenRecord] = field(default_factory=list)
    failures: List[Tuple[int, SpectralError]] = field(default_factory=list)

    @property
    def s_values(self) -> np.ndarray:
        return np.array([r.s_n for r in self.records])

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.records])

    def by_n(self, n: int) -> EigenRecord:
        for r in self.records:
            if r.n == n:
                return r
        raise KeyError(n)


def characteristic(spec: ProblemSpec, s: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    sol = solve_w(spec, s, cfg)
    w, wp = sol.right.end
    return wp + spec.d * sol.lam * w


def window_for(spec: ProblemSpec, n: int):
    """(centre, half-width) of the n-th search window in s."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p1, p2 = spec.p1, spec.p2
    return p1 * p2 * (4 * n - 3) / (2.0 * (p1 + p2)), p1 * p2 / (p1 + p2)


def _sign_changes(s_grid, g):
    return [(s_grid[i], s_grid[i + 1], g[i], g[i + 1])
            for i in range(len(g) - 1) if (g[i] < 0) != (g[i + 1] < 0)]


def _bisect(f, a, b, ga, tol, max_iter=200):
    iters = 0
    while b - a > tol and iters < max_iter:
        m = 0.5 * (a + b)
        gm = f(m)
        iters += 1
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    return a, b, iters


def find_eigenvalue(spec: ProblemSpec, n: int, cfg: IntegratorConfig = DEFAULT_CONFIG,
                    scan_points: int = DEFAULT_SCAN_POINTS, tol: float = DEFAULT_TOL,
                    window: Optional[Tuple[float, float]] = None) -> EigenRecord:
    """Locate the unique sign change of G in window ``n`` and bisect it to ``tol``.

    ``window`` overrides the asymptotic window as (lo, hi) in s.
    """
    if scan_points < 16:
        raise ValueError("scan_points must be >= 16")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if window is None:
        c, hw = window_for(spec, n)
        lo, hi = c - hw, c + hw
    else:
        lo, hi = window
    if lo <= 0:
        raise InvalidWindow(f"window {n} = ({lo!r}, {hi!r}) reaches s <= 0")

    def g(s):
        return characteristic(spec, s, cfg)

    s_grid = np.linspace(lo, hi, scan_points + 1)
    values = [g(s) for s in s_grid]
    brackets = _sign_changes(s_grid, values)
    if not brackets:
        raise NoRootInWindow(f"no sign change of G in window {n} = ({lo:.6g}, {hi:.6g})")
    if len(brackets) > 1:
        where = ", ".join(f"({a:.6g}, {b:.6g})" for a, b, _, _ in brackets)
        raise MultipleRootsInWindow(f"{len(brackets)} sign changes in window {n}: {where}")

    a, b, ga, _ = brackets[0]
    a, b, iters = _bisect(g, float(a), float(b), ga, tol)
    s_n = 0.5 * (a + b)
    ds = 1e-5 * (1.0 + s_n)
    slope = (g(s_n + ds) - g(s_n - ds)) / (2 * ds)
    return EigenRecord(
        n=n,
        s_n=s_n,
        lambda_n=s_n * s_n,
        window=(float(lo), float(hi)),
        bracket=(a, b),
        simplicity_margin=abs(slope) / (1.0 + s_n * s_n),
        bisection_iters=iters,
    )


def spectrum(spec: ProblemSpec, n_min: int, n_max: int, cfg: IntegratorConfig = DEFAULT_CONFIG,
             scan_points: int = DEFAULT_SCAN_POINTS, tol: float = DEFAULT_TOL) -> SpectrumReport:
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    report = SpectrumReport()
    for n in range(n_min, n_max + 1):
        try:
            report.records.append(find_eigenvalue(spec, n, cfg, scan_points, tol))
        except SpectralError as exc:
            report.failures.append((n, exc))
    return report


def count_in_range(spec: ProblemSpec, s_max: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> int:
    """Number of roots of G in [1, s_max] seen on a grid finer than a quarter window.

    Sign flips between consecutive nonzero nodes count once each; a node where
    |G| <= 1e-9 (1 + s^2) is itself counted as a root (this matters for the
    continuous reduction, whose G vanishes exactly at s = 1).
    """
    if not s_max > 1:
        raise ValueError("s_max must exceed 1")
    _, hw = window_for(spec, 1)
    m = max(1, math.ceil((s_max - 1.0) / (hw / 4.0)))
    s_grid = np.linspace(1.0, s_max, m + 1)
    count = 0
    prev = 0
    for s in s_grid:
        g = characteristic(spec, s, cfg)
        if abs(g) <= NODE_ZERO_RTOL * (1.0 + s * s):
            count += 1
            prev = 0
            continue
        sign = 1 if g > 0 else -1
        if prev and sign != prev:
            count += 1
        prev = sign
    return count


def eigenfunction(spec: ProblemSpec, rec: EigenRecord, cfg: IntegratorConfig = DEFAULT_CONFIG) -> PiecewiseSolution:
    """w(x, lambda_n) itself; normalised by w(0) = p1."""
    return solve_w(spec, rec.s_n, cfg)
