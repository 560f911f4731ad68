"""Higher-order q-Bessel calculus and q-heat polynomial expansions.

The submodules build on each other: :mod:`qcore` (bases, q-numbers, q-gamma),
:mod:`qcalc` (q-derivatives, Jackson integrals), :mod:`qspecial` (q-exponentials,
basic hypergeometric series, ``cos_r``/``sin_{r,l}``), :mod:`qbessel` (``j_alpha``
and the operator ``B``), :mod:`qharmonic` (translations, transforms, convolutions)
and :mod:`qheat` (heat polynomials, kernel, expansions).
"""

from .errors import *  # noqa: F401,F403
from .qbessel import *  # noqa: F401,F403
from .qcalc import *  # noqa: F401,F403
from .qcore import *  # noqa: F401,F403
from .qharmonic import *  # noqa: F401,F403
from .qheat import *  # noqa: F401,F403
from .qspecial import *  # noqa: F401,F403

__version__ = "0.1.0"
