import numpy as np


def simpson_nodes(a, b, panels):
    """Nodes and weights of composite Simpson with ``panels`` (even) panels."""
    if panels < 2 or panels % 2:
        raise ValueError(f"Simpson needs an even number of panels, got {panels}")
    x = np.linspace(a, b, panels + 1)
    w = np.full(panels + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return x, w * ((b - a) / (3.0 * panels))


def simpson(f, a, b, panels):
    x, w = simpson_nodes(a, b, panels)
    return float(np.dot(w, f(x)))


def oscillatory_panels(s, minimum=512):
    """Panel count resolving integrands that oscillate at frequency ~ s."""
    n = max(minimum, 16 * int(np.ceil(s)))
    return n + (n % 2)
