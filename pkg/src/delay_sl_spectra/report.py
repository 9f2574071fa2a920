"""
Solve / compare / verify pipelines and their CSV and JSON output.

Floats are written with ``repr`` (shortest round-trip decimal) and rows in
ascending n, so an identical config reproduces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .asymptotics import leading_s, refined_s
from .config import RunConfig
from .errors import DegenerateFit
from .fitting import slope_fit
from .problem import HALF_PI
from .shooting import PiecewiseSolution
from .spectrum import SpectrumReport, eigenfunction, spectrum
from .verify import Verifier, VerifyReport

SAMPLES_PER_PIECE = 401

__all__ = [
    "ComparisonRow",
    "CompareResult",
    "SAMPLES_PER_PIECE",
    "compare_rows",
    "eigenfunction_samples",
    "run_compare",
    "run_solve",
    "run_verify",
    "slope_fit",
]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: Path):
    """Rows as dicts of floats (the round-trip counterpart of :func:`write_csv`)."""
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(cfg: RunConfig, out: Optional[Path]) -> Path:
    return Path(out) if out is not None else Path(cfg.output_dir)


# -- solve -------------------------------------------------------------------

SPECTRUM_COLUMNS = ("n", "s_n", "lambda_n", "bracket_lo", "bracket_hi", "simplicity_margin", "iters")
EIGFN_COLUMNS = ("x", "y", "yp")


def eigenfunction_samples(sol: PiecewiseSolution, size: int = SAMPLES_PER_PIECE):
    """``size`` points per half; x = pi/2 appears twice (left and right limits)."""
    xl = np.linspace(0.0, HALF_PI, size)
    xr = np.linspace(HALF_PI, math.pi, size)
    # pin the ends to the integration nodes so the samples are exact there
    xl[0], xl[-1] = sol.left.nodes[0], sol.left.nodes[-1]
    xr[0], xr[-1] = sol.right.nodes[0], sol.right.nodes[-1]
    yl, ypl = sol.left(xl)
    yr, ypr = sol.right(xr)
    return np.concatenate([xl, xr]), np.concatenate([yl, yr]), np.concatenate([ypl, ypr])


def run_solve(cfg: RunConfig, out: Optional[Path] = None) -> SpectrumReport:
    out_dir = _out_dir(cfg, out)
    rep = spectrum(cfg.spec, cfg.n_min, cfg.n_max, cfg.integrator, cfg.scan_points, cfg.tol)
    write_csv(out_dir / "spectrum.csv", SPECTRUM_COLUMNS,
              ((r.n, r.s_n, r.lambda_n, r.bracket[0], r.bracket[1], r.simplicity_margin,
                r.bisection_iters) for r in rep.records))
    for r in rep.records:
        x, y, yp = eigenfunction_samples(eigenfunction(cfg.spec, r, cfg.integrator))
        write_csv(out_dir / f"eigfn_{r.n}.csv", EIGFN_COLUMNS, zip(x, y, yp))
    return rep


# -- compare -----------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    n: int
    s_numeric: float
    s_leading: float
    s_refined: float
    err_leading: float
    err_refined: float
    simplicity_margin: float


COMPARE_COLUMNS = tuple(ComparisonRow.__dataclass_fields__)


@dataclass
class CompareResult:
    rows: List[ComparisonRow]
    report: SpectrumReport
    sign: str
    slope_leading: Optional[float]
    slope_refined: Optional[float]

    def to_dict(self):
        return {
            "sign": self.sign,
            "slope_err_leading": self.slope_leading,
            "slope_err_refined": self.slope_refined,
            "abscissa": "4n-3",
            "rows": [asdict(r) for r in self.rows],
            "failures": [{"n": n, "error": type(e).__name__, "message": str(e)}
                         for n, e in self.report.failures],
        }


def compare_rows(spec, report: SpectrumReport, sign: str = "corrected") -> List[ComparisonRow]:
    rows = []
    for r in report.records:
        s0 = leading_s(spec, r.n)
        s1 = refined_s(spec, r.n, sign=sign).s_refined
        rows.append(ComparisonRow(r.n, r.s_n, s0, s1, abs(r.s_n - s0), abs(r.s_n - s1),
                                  r.simplicity_margin))
    return rows


def _slope(rows, attr):
    try:
        return slope_fit((4 * r.n - 3, getattr(r, attr)) for r in rows)[0]
    except DegenerateFit:
        return None


def run_compare(cfg: RunConfig, out: Optional[Path] = None, sign: Optional[str] = None) -> CompareResult:
    out_dir = _out_dir(cfg, out)
    sign = sign or cfg.sign
    rep = spectrum(cfg.spec, cfg.n_min, cfg.n_max, cfg.integrator, cfg.scan_points, cfg.tol)
    rows = compare_rows(cfg.spec, rep, sign)
    res = CompareResult(rows, rep, sign, _slope(rows, "err_leading"), _slope(rows, "err_refined"))
    write_csv(out_dir / "compare.csv", COMPARE_COLUMNS,
              ([getattr(r, c) for c in COMPARE_COLUMNS] for r in rows))
    write_json(out_dir / "compare.json", res.to_dict())
    return res


# -- verify ------------------------------------------------------------------

def run_verify(cfg: RunConfig, out: Optional[Path] = None) -> VerifyReport:
    out_dir = _out_dir(cfg, out)
    v = Verifier(cfg.spec, cfg.integrator, cfg.n_min, cfg.n_max, cfg.scan_points, cfg.tol)
    report = VerifyReport(v.run(), config=cfg.name)
    write_json(out_dir / "verify.json", report.to_dict())
    return report
