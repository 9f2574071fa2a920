"""
Property checks run by ``delay-sl-spectra verify``.

Each check returns a :class:`Check` carrying the measured value and the
threshold it was held to; failures are data, not exceptions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Sequence

import numpy as np

from .asymptotics import (
    decay_check,
    leading_eigenfunction,
    leading_s,
    lemma2_report,
    refined_s,
)
from .errors import DegenerateFit
from .fitting import slope_fit
from .problem import ProblemSpec, check_admissibility
from .shooting import DEFAULT_CONFIG, IntegratorConfig, PiecewiseSolution, integral_residuals, solve_w
from .spectrum import (
    DEFAULT_SCAN_POINTS,
    DEFAULT_TOL,
    SpectrumReport,
    count_in_range,
    eigenfunction,
    spectrum,
    window_for,
)

LEADING_SLOPE_RANGE = (-1.35, -0.65)
REFINED_SLOPE_RANGE = (-2.4, -1.6)
DECAY_SLOPE_RANGE = (-1.3, -0.7)
RESIDUAL_TOL = 1e-5
RESIDUAL_FLOOR = 1e-12
RESIDUAL_S = (5.0, 10.0, 20.0)
SIMPLICITY_FLOOR = 1e-3
TRANSMISSION_RTOL = 1e-12
COUNT_SLOPE_RTOL = 0.10
DECAY_S = tuple(float(s) for s in range(10, 61, 5))
LAMBDA_MAX = 400.0


@dataclass
class Check:
    name: str
    status: str
    value: Any
    threshold: Any
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _in(value, bounds) -> bool:
    return bounds[0] <= value <= bounds[1]


@dataclass
class VerifyReport:
    checks: List[Check] = field(default_factory=list)
    config: str = ""

    @property
    def overall(self) -> str:
        return "fail" if any(c.status == "fail" for c in self.checks) else "pass"

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {"config": self.config, "overall": self.overall,
                "checks": [asdict(c) for c in self.checks]}


class Verifier:
    """Caches the spectrum and eigenfunctions so the checks share one solve."""

    def __init__(self, spec: ProblemSpec, cfg: IntegratorConfig = DEFAULT_CONFIG,
                 n_min: int = 5, n_max: int = 40, scan_points: int = DEFAULT_SCAN_POINTS,
                 tol: float = DEFAULT_TOL):
        self.spec = spec
        self.cfg = cfg
        self.n_min = n_min
        self.n_max = n_max
        self.scan_points = scan_points
        self.tol = tol
        self._solutions: List[PiecewiseSolution] = []

    @cached_property
    def report(self) -> SpectrumReport:
        return spectrum(self.spec, self.n_min, self.n_max, self.cfg, self.scan_points, self.tol)

    @cached_property
    def eigenfunctions(self) -> Dict[int, PiecewiseSolution]:
        out = {r.n: eigenfunction(self.spec, r, self.cfg) for r in self.report.records}
        self._solutions.extend(out.values())
        return out

    def _errors(self, estimates):
        ns = self.report.ns
        return ns, np.abs(self.report.s_values - np.asarray(estimates))

    # -- eigenvalue checks --------------------------------------------------

    def localization(self) -> Check:
        fails = [(n, type(e).__name__) for n, e in self.report.failures]
        return Check("localization", _status(not fails), len(self.report.records),
                     f"one bracket per window, n in [{self.n_min}, {self.n_max}]",
                     "; ".join(f"n={n}: {e}" for n, e in fails))

    def simplicity(self) -> Check:
        margins = [r.simplicity_margin for r in self.report.records]
        if not margins:
            return Check("simplicity", "skip", None, SIMPLICITY_FLOOR, "no eigenvalues")
        low = min(margins)
        return Check("simplicity", _status(low > SIMPLICITY_FLOOR), low, SIMPLICITY_FLOOR,
                     "minimum of |G'(s_n)| / (1 + s_n^2)")

    def leading_errors(self):
        return self._errors([leading_s(self.spec, n) for n in self.report.ns])

    def refined_errors(self, sign: str = "corrected"):
        return self._errors([refined_s(self.spec, int(n), sign=sign).s_refined
                             for n in self.report.ns])

    def leading_rate(self) -> Check:
        ns, err = self.leading_errors()
        try:
            slope, _, _ = slope_fit(zip(4 * ns - 3, err))
        except DegenerateFit as exc:
            return Check("leading_rate", "fail", None, LEADING_SLOPE_RANGE, str(exc))
        return Check("leading_rate", _status(_in(slope, LEADING_SLOPE_RANGE)), slope,
                     LEADING_SLOPE_RANGE, "slope of log|s_n - s0(n)| vs log(4n-3)")

    def refined_rate(self, sign: str = "corrected") -> Check:
        """err_refined <= err_leading for n >= 10; the slope is recorded."""
        ns, el = self.leading_errors()
        _, er = self.refined_errors(sign)
        mask = ns >= 10
        if not np.any(mask):
            return Check("refined_not_worse", "skip", None, "n >= 10", "no eigenvalues with n >= 10")
        try:
            slope = slope_fit(zip(4 * ns - 3, er))[0]
        except DegenerateFit:
            slope = None
        worse = [int(n) for n in ns[mask][er[mask] > el[mask]]]
        return Check("refined_not_worse", _status(not worse), slope,
                     "err_refined <= err_leading for n >= 10",
                     f"sign={sign}; value is the fitted slope of err_refined"
                     + (f"; worse at n={worse}" if worse else ""))

    def eigenfunction_errors(self):
        ns, sups = [], []
        for n, sol in self.eigenfunctions.items():
            left = np.abs(sol.left.values - leading_eigenfunction(self.spec, n, sol.left.nodes, "left"))
            right = np.abs(sol.right.values - leading_eigenfunction(self.spec, n, sol.right.nodes, "right"))
            ns.append(n)
            sups.append(max(left.max(), right.max()))
        return np.array(ns), np.array(sups)

    def eigenfunction_rate(self) -> Check:
        ns, sups = self.eigenfunction_errors()
        start_ok = all(sol.left.values[0] == self.spec.p1 for sol in self.eigenfunctions.values())
        try:
            slope = slope_fit(zip(ns, sups))[0]
        except DegenerateFit as exc:
            return Check("eigenfunction_rate", "fail", None, LEADING_SLOPE_RANGE, str(exc))
        return Check("eigenfunction_rate", _status(_in(slope, LEADING_SLOPE_RANGE) and start_ok),
                     slope, LEADING_SLOPE_RANGE,
                     f"sup-grid |u_n - leading| vs n; u_n(0) == p1: {start_ok}")

    def counting(self, multiples: Sequence[int] = (5, 10, 15, 20, 25, 30)) -> Check:
        c, hw = window_for(self.spec, 1)
        spacing = 2 * hw
        s_max = np.array([1.0 + spacing * (k + 0.5) for k in multiples])
        counts = np.array([count_in_range(self.spec, s, self.cfg) for s in s_max])
        slope = float(np.polyfit(s_max, counts, 1)[0])
        expected = 1.0 / spacing
        ok = abs(slope - expected) <= COUNT_SLOPE_RTOL * expected
        return Check("counting", _status(ok), slope, expected,
                     f"roots per unit s; counts={counts.tolist()} at s_max={s_max.round(4).tolist()}")

    # -- solution checks ----------------------------------------------------

    def residuals(self, s_values: Sequence[float] = RESIDUAL_S) -> Check:
        fine = self.cfg.refined()
        worst = 0.0
        rows = []
        decreasing = True
        for s in s_values:
            sol = solve_w(self.spec, s, self.cfg)
            sol_f = solve_w(self.spec, s, fine)
            self._solutions.extend([sol, sol_f])
            r = integral_residuals(sol, self.spec, self.cfg)
            rf = integral_residuals(sol_f, self.spec, fine)
            worst = max(worst, *r)
            decreasing &= all(b <= max(a, RESIDUAL_FLOOR) for a, b in zip(r, rf))
            rows.append(f"s={s:g}: r1={r[0]:.3e} r2={r[1]:.3e} -> {rf[0]:.3e} {rf[1]:.3e}")
        return Check("integral_residuals", _status(worst <= RESIDUAL_TOL and decreasing), worst,
                     RESIDUAL_TOL, "; ".join(rows))

    def solution_bounds(self, count: int = 10) -> Check:
        probe = lemma2_report(self.spec, 1.0, solve_w(self.spec, 1.0, self.cfg))
        lo = max(probe.lambda_threshold, 1.0)
        if lo > LAMBDA_MAX:
            return Check("solution_bounds", "skip", None, None,
                         f"threshold lambda {probe.lambda_threshold:.4g} exceeds {LAMBDA_MAX}")
        worst = 0.0
        ok = True
        for lam in np.geomspace(lo, LAMBDA_MAX, count):
            s = math.sqrt(lam)
            sol = solve_w(self.spec, s, self.cfg)
            self._solutions.append(sol)
            rep = lemma2_report(self.spec, s, sol)
            ok &= rep.left_ok and rep.right_ok
            worst = max(worst, rep.observed_sup_left / rep.bound14,
                        rep.observed_sup_right / rep.bound15)
        return Check("solution_bounds", _status(ok), worst, 1.0,
                     f"max observed/bound; bound14={probe.bound14:.6g}, bound15={probe.bound15:.6g}, "
                     f"threshold lambda={probe.lambda_threshold:.6g}")

    def decay(self, s_grid: Sequence[float] = DECAY_S) -> List[Check]:
        out = []
        for which in (1, 2, 3, 4):
            name = f"decay_{which}"
            try:
                slope, r2 = decay_check(self.spec, which, s_grid)
            except DegenerateFit as exc:
                out.append(Check(name, "skip", float("nan"), DECAY_SLOPE_RANGE, str(exc)))
                continue
            out.append(Check(name, _status(_in(slope, DECAY_SLOPE_RANGE)), slope,
                             DECAY_SLOPE_RANGE, f"r2={r2:.4f}"))
        return out

    def transmission(self) -> Check:
        sols = list(self.eigenfunctions.values()) + self._solutions
        worst = max((max(s.transmission_defects(self.spec)) for s in sols), default=0.0)
        return Check("transmission_identity", _status(worst <= TRANSMISSION_RTOL), worst,
                     TRANSMISSION_RTOL, f"{len(sols)} solutions")

    def admissibility(self) -> Check:
        rep = check_admissibility(self.spec)
        return Check("admissibility", _status(rep.all_ok), rep.worst_margin, 0.0,
                     f"delay_nonneg={rep.delay_nonneg} range_left={rep.range_left_ok} "
                     f"range_right={rep.range_right_ok} cond_a={rep.cond_a_ok} "
                     f"cond_b={rep.cond_b_ok} max_delay_slope={rep.max_delay_slope:.4g}")

    def run(self) -> List[Check]:
        checks = [
            self.admissibility(),
            self.localization(),
            self.simplicity(),
            self.leading_rate(),
            self.refined_rate(),
            self.eigenfunction_rate(),
            self.counting(),
            self.residuals(),
            self.solution_bounds(),
            *self.decay(),
        ]
        # last, so it sees every solution the other checks produced
        checks.append(self.transmission())
        return checks
