import numpy as np

from .errors import DegenerateFit


def slope_fit(points):
    """Least-squares line through (log x, log err).

    Returns ``(slope, intercept, r2)``; needs at least 4 points with err > 0
    and not all x equal.
    """
    pts = [(float(x), float(e)) for x, e in points]
    if len(pts) < 4:
        raise DegenerateFit(f"need at least 4 points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    err = np.array([p[1] for p in pts])
    if np.any(~np.isfinite(err)) or np.any(err <= 0) or np.any(x <= 0):
        raise DegenerateFit("log-log fit needs positive, finite data")
    if np.all(x == x[0]):
        raise DegenerateFit("all abscissae are equal")
    lx, ly = np.log(x), np.log(err)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
