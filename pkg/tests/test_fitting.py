import numpy as np
import pytest

from delay_sl_spectra.errors import DegenerateFit
from delay_sl_spectra.fitting import slope_fit


def test_exact_inverse():
    x = np.arange(1, 20)
    slope, intercept, r2 = slope_fit(zip(x, 7 / x))
    assert slope == pytest.approx(-1, abs=1e-12)
    assert intercept == pytest.approx(np.log(7), abs=1e-12)
    assert r2 == pytest.approx(1, abs=1e-12)


def test_exact_inverse_square():
    x = np.linspace(2, 50, 9)
    assert slope_fit(zip(x, 3 / x**2))[0] == pytest.approx(-2, abs=1e-12)


@pytest.mark.parametrize("points", [
    [(1, 1), (2, 0.5)],
    [(1, 1), (2, 0.5), (3, 0.0), (4, 0.2)],
    [(2, 1), (2, 0.5), (2, 0.3), (2, 0.2)],
    [(-1, 1), (2, 0.5), (3, 0.3), (4, 0.2)],
])
def test_degenerate(points):
    with pytest.raises(DegenerateFit):
        slope_fit(points)
