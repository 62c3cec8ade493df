"""Expected determinants of random symmetric matrices, real roots of random
polynomials and critical points on random plane curves."""

from ._core import *  # noqa: F401,F403
from ._core import RragError, DEFAULT_SEED, __doc__  # noqa: F401
