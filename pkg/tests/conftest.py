import pytest

from diamond_constants.combinatorics import SubsetJ, all_subsets
from diamond_constants.params import sample


def strict_sets(primes=(29, 31, 37), fs=(1, 2, 3), seed=0, include_full=False):
    out = []
    for f in fs:
        for R in all_subsets(f):
            if R.is_full() and not include_full:
                continue
            for p in primes:
                out.append(sample(p, f, R, seed))
    return out


@pytest.fixture
def params_f3():
    return sample(29, 3, SubsetJ.of([0], 3), seed=0)
