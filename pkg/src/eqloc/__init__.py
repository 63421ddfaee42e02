"""Equivariant localization, Duistermaat-Heckman measures and character formulas.

The main entry points are re-exported here; see the submodules for details:

``core``          fixed-point data, chambers, multiplicity tables, configuration I/O
``localization``  fixed-point sums and Euler characteristics
``dh``            Duistermaat-Heckman measures as piecewise-polynomial measures
``roots``         root systems, Weyl groups, Freudenthal multiplicities
``characters``    Weyl characters, orbit sums, chamber-weighted characters, pairings
``oracles``       charted fixtures, quadrature, Monte Carlo and finite-difference checks
``cli``           the ``eqloc`` command
"""

from .characters import (
    Bump,
    TestFunction,
    character_weight_sum_oracle,
    noncompact_character,
    orbit_fourier_sum,
    pair_distribution,
    weyl_character,
)
from .core import (
    Chamber,
    FixedPointDatum,
    MultiplicityTable,
    Problem,
    ProblemSpec,
    load_problem,
    serialize,
    validate_regular,
)
from .dh import PiecewisePolynomialMeasure, dh_fourier, dh_measure, verify_fourier_inversion
from .errors import *  # noqa: F401,F403
from .fixtures import FIXTURE_NAMES, load_fixture
from .localization import LocalizedIntegrand, euler_characteristic, euler_factor, localize_integral
from .oracles import (
    check_hamiltonian_identity,
    monte_carlo_pushforward,
    quadrature_integral_s2,
    surface_fixture,
)
from .roots import RootSystem, weight_multiplicities, weyl_group

__version__ = "0.1.0"
