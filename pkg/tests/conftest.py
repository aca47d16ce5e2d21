import math

import pytest


def fd2(f, x, h=1e-5):
    """Central finite differences: (f, f', f'') of a scalar callable at x.

    Used as the independent oracle for everything the jets claim to compute.
    """
    fp, fm, f0 = f(x + h), f(x - h), f(x)
    return f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)


@pytest.fixture
def fd():
    return fd2


def close(a, b, tol=1e-9):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
