import warnings

import pytest

from splitpool import new_params


@pytest.fixture
def small_params():
    return new_params(16, 2, C=16, Cprime=3, Ctil=1, seed=42)


def quiet_params(*args, **kwargs):
    """new_params without the small-C warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return new_params(*args, **kwargs)
