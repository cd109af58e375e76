"""Scale-independent mixing laws: power and geometric means of phase values.

The mixture value of phases with volume fractions ``a_k`` and parameter
values ``x_k`` is the power mean ``(sum a_k x_k**p)**(1/p)``, with the
geometric mean at ``p = 0`` and max/min at ``p = +-inf``. These are the only
mixing laws of the form ``f(x) = sum a_k f(x_k)`` that commute with a change
of units.
"""

__version__ = "0.1.0"

from .base import Composition, Flag, MixResult
from .characterization import (
    ResidualReport,
    Verdict,
    VinczeFit,
    check_scale_independence,
    generators_equivalent,
    scale_independence_residual,
    translation_independence_residual,
    vincze_decomposition,
)
from .errors import *  # noqa: F401,F403
from .estimator import PowerMeanMixer, PowerMeanRegressor
from .fitting import Dataset, FitReport, Sample, fit_p_global, per_sample_p, solve_p_single
from .generators import AffineLog, AffinePower, Custom, Generator
from .inversion import (
    ArchieParams,
    archie_conductivity,
    archie_saturation,
    solve_fraction_two_phase,
    solve_phase_value,
    solve_phase_value_geometric,
)
from .mean_core import (
    geometric_mean,
    power_mean,
    power_mean_complex,
    power_mean_dp,
    quasi_arithmetic_mean,
)
