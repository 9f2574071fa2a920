"""Spectra of a discontinuous Sturm-Liouville problem with retarded argument."""

from .asymptotics import (
    decay_check,
    functionals,
    leading_eigenfunction,
    leading_s,
    lemma2_report,
    refined_s,
)
from .config import RunConfig, load_config, parse_config, reference_spec
from .expression import CoefficientExpr, parse
from .fitting import slope_fit
from .problem import ProblemSpec, check_admissibility, validate
from .report import ComparisonRow, run_compare, run_solve, run_verify
from .shooting import IntegratorConfig, PiecewiseSolution, integral_residuals, solve_w
from .spectrum import count_in_range, eigenfunction, find_eigenvalue, spectrum
from .verify import Verifier, VerifyReport

__version__ = "0.1.0"
