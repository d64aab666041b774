"""Numerical laboratory for higher-order Melnikov analysis of planar
piecewise-linear systems switching across y = x^n.

Three independent computation routes cross-validate each other: the
crossing-time recursion (jet arithmetic plus Chebyshev sector integrals),
first-order closed forms with their ordered-family structure, and direct
event-driven integration of the Poincare return map.
"""

__version__ = "0.1.0"

from .basis import BasisFunction, family, family_G, family_H_pencil, family_H8, family_J0, u
from .certify import (AccuracyVerdict, ZeroRecord, ZeroReport, certify_family,
                      isolate_zeros, prop4_witness, prop5_witness, theorem3_bound,
                      wronskian, wronskian_scaled)
from .closedforms import (SpanFit, VCoefficients, config_from_v, cov_r_of_x,
                          cov_x_of_r, fit_to_span, m1_closed, q_denominator, q_poly,
                          sign_pattern_search, structural_span, v_coefficients,
                          v_zero_coefficients, vanishing_order_config)
from .combinatorics import CompositionSet, PartitionSet, compositions, partitions
from .config import OrderCoefficients, SystemConfig, dump_config, load_config
from .errors import (ConfigurationError, DomainError, EscapeError,
                     EventDegeneracyError, MelnlabError, NumericalError,
                     SequencingError)
from .geometry import SwitchingGeometry, crossing_abscissa, switching_angles, theta1_jet
from .polar import PolarField, build_polar_field, cartesian_field
from .recursion import ZTable, melnikov, melnikov_all, z1, z_recursive, ztable
from .series import Jet
from .simulate import (LimitCycle, PoincareResult, TrajectorySegment,
                       extract_melnikov, find_limit_cycles, integrate_return)

__all__ = [name for name in dir() if not name.startswith("_")]
