import math

import numpy as np
import pytest

from delay_sl_spectra.errors import ConstraintViolation, DegenerateTransmission, NonpositiveStiffness
from delay_sl_spectra.problem import HALF_PI, ProblemSpec, check_admissibility, piece_grid, validate


def test_coupling_identity_accepts_c2_shape():
    spec = ProblemSpec.build(1, 2, 1, 1, 1, 2, 1, q="cos(x)", delay="x/3")
    assert validate(spec) is spec


def test_coupling_identity_rejects():
    with pytest.raises(ConstraintViolation):
        validate(ProblemSpec.build(1, 2, 1, 1, 1, 1, 1))


def test_zero_delta_rejected():
    with pytest.raises(DegenerateTransmission):
        validate(ProblemSpec.build(1, 1, 1, 1, 0, 1, 1))
    with pytest.raises(DegenerateTransmission):
        validate(ProblemSpec.build(1, 1, 0, 0, 0, 0, 1))


def test_stiffness_positive():
    with pytest.raises(NonpositiveStiffness):
        validate(ProblemSpec.build(-1, 1, 1, 1, 1, 1, 1))


def test_validate_idempotent(c2):
    assert validate(validate(c2)) == validate(c2)


def test_replace_accepts_text():
    spec = ProblemSpec.build(1, 1, 1, 1, 1, 1, 1).replace(q="2*x")
    assert spec.q(1.5) == 3.0


def test_piece_grids_stay_on_their_side():
    left, right = piece_grid("left", 512), piece_grid("right", 512)
    assert left[0] == 0.0 and left[-1] < HALF_PI
    assert right[0] > HALF_PI and right[-1] == math.pi
    assert len(left) == len(right) == 512


@pytest.mark.parametrize("grid", [2, 16, 512, 1000])
def test_zero_delay_all_true(grid):
    rep = check_admissibility(ProblemSpec.build(1, 2, 1, 1, 1, 2, 1, q="cos(3*x)"), grid)
    assert rep.all_ok
    assert rep.grid_size >= 512


def test_reference_delay_admissible(c2):
    rep = check_admissibility(c2)
    assert rep.all_ok
    assert rep.max_delay_slope == pytest.approx(0.8, abs=1e-3)


def test_steep_delay_fails_condition_b(c2):
    rep = check_admissibility(c2.replace(delay="0.6*abs(sin(2*x))"))
    assert not rep.cond_b_ok
    assert rep.max_delay_slope == pytest.approx(1.2, abs=1e-3)
    assert rep.delay_nonneg
    # slope 1.2 at the origin also pushes x - delay below 0
    assert not rep.range_left_ok


def test_delay_reaching_outside_piece(c2):
    rep = check_admissibility(c2.replace(delay="0.5"))
    assert not (rep.range_left_ok and rep.range_right_ok)
    assert not rep.all_ok


def test_negative_delay():
    rep = check_admissibility(ProblemSpec.build(1, 1, 1, 1, 1, 1, 1, delay="-0.1*x"))
    assert not rep.delay_nonneg
