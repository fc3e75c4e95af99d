import numpy as np
import pytest

from signbounds.directional import sign_split
from signbounds.special import std_normal_cdf

# Four-subgroup breast-cancer trial: standardized arcsine-transformed
# differences and the implied one-sided p-values.
GAIL_Z = np.array([2.051, -1.635, -0.764, -2.708])

# Local p-values of all 15 intersections of the selected one-sided
# hypotheses (Simes), keyed by 0-based index sets, and their
# closed-testing adjusted values.  The adjusted value of {0,1,2} is the
# max-over-supersets 0.1209 (equal to its own local value).
GAIL_LOCAL = {
    (0, 1, 2, 3): 0.0271,
    (0, 1, 2): 0.1209, (0, 1, 3): 0.0203, (0, 2, 3): 0.0203, (1, 2, 3): 0.0203,
    (0, 1): 0.0806, (0, 2): 0.0806, (0, 3): 0.0135,
    (1, 2): 0.2039, (1, 3): 0.0135, (2, 3): 0.0135,
    (0,): 0.0403, (1,): 0.1020, (2,): 0.4451, (3,): 0.0068,
}
GAIL_ADJUSTED = {
    (0, 1, 2, 3): 0.0271,
    (0, 1, 2): 0.1209, (0, 1, 3): 0.0271, (0, 2, 3): 0.0271, (1, 2, 3): 0.0271,
    (0, 1): 0.1209, (0, 2): 0.1209, (0, 3): 0.0271,
    (1, 2): 0.2039, (1, 3): 0.0271, (2, 3): 0.0271,
    (0,): 0.1209, (1,): 0.2039, (2,): 0.4451, (3,): 0.0271,
}

# Adaptive orthant p-values (Simes), keyed by the set of coordinates
# claimed positive; the realized-selection orthant {0} combines nothing.
GAIL_ORTHANTS = {
    (0, 1, 2, 3): 0.0203,
    (0, 1, 2): 0.2039, (0, 1, 3): 0.0135, (0, 2, 3): 0.0135, (1, 2, 3): 0.0271,
    (0, 1): 0.1020, (0, 2): 0.4451, (0, 3): 0.0068,
    (1, 2): 0.1209, (1, 3): 0.0203, (2, 3): 0.0203,
    (0,): 1.0, (1,): 0.0806, (2,): 0.0806, (3,): 0.0135,
    (): 0.0403,
}


@pytest.fixture(scope="session")
def gail_p():
    return np.array([1.0 - std_normal_cdf(z) for z in GAIL_Z])


@pytest.fixture(scope="session")
def gail_split(gail_p):
    return sign_split(gail_p)
