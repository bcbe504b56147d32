from fractions import Fraction

import pytest

from flagsos.flagcalc import Labeling, d_theta_F
from flagsos.graphs import K3, enumerate_A_free, enumerate_flags, single_vertex_type
from flagsos.poly import MPoly


@pytest.fixture(scope="session")
def mantel_flags():
    return enumerate_flags(single_vertex_type(), 2, K3)


@pytest.fixture(scope="session")
def triangle_free_hosts3():
    return enumerate_A_free(3, K3)


@pytest.fixture(scope="session")
def mantel_q():
    h = Fraction(1, 2)
    return [[h, -h], [-h, h]]


def mantel_sos(n, flags, q):
    """E_Theta[y^T Q y] for the two degree-one flags, exact."""
    acc = MPoly.zero(n)
    for u in range(1, n + 1):
        theta = Labeling(n, (u,))
        y = [d_theta_F(fl, theta) for fl in flags]
        for i in range(2):
            for j in range(2):
                if q[i][j]:
                    acc = acc + y[i] * y[j] * q[i][j]
    return acc * Fraction(1, n)
