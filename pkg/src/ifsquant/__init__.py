"""Quantization of self-similar measures for infinite similarity systems.

The package computes quantization dimensions and coefficient curves for
self-similar probability measures generated by countably many contractive
similarities, and checks the asymptotics numerically: certified pressure /
temperature-function solvers, a coding-map sampler, Lloyd and constructive
word-set quantizers, and exact small-instance Wasserstein distances.
"""

__version__ = "0.1.0"

from .analysis import (CurveEntry, DistortionCurve, WitnessReport,
                       coefficient_curve, distortion_curve, estimate_dimension,
                       theorem_witness, witness_from_curve)
from .errors import (BudgetError, DivergenceError, IfsQuantError,
                     InstanceTooLargeError, InsufficientDataError, ValidationError)
from .ifs import (AmbientDomain, ContractiveSimilarity, FiniteTruncation,
                  GeometricTail, InfiniteIFS, MapFamily, PowerLawTail,
                  ProbabilityFamily, SeparationReport, StackPlacement, Word,
                  apply_word, cylinder_diameter, map_for_index, scaling_2d,
                  similarity_1d, truncate, validate_separation, word_map,
                  word_ratio)
from .quantize import (FnWordSet, Quantizer, assign, build_F_n,
                       constructive_quantizer, distortion, lloyd, r_center)
from .sampler import (EmpiricalMeasure, coding_depth, cylinder_mass,
                      draw_symbol, sample)
from .specio import load_system, save_system, system_from_dict, system_to_dict
from .systems import BUILTIN_NAMES, load_builtin, resolve_system
from .thermo import (PressureValue, TemperatureCurve, beta, converges_at,
                     kappa_residual, kappa_via_beta, pressure,
                     quantization_dimension, solve_q_r, temperature_curve,
                     theta, validate_finiteness)
from .transport import (DiscreteMeasure, best_discrete_approx, brute_force_vnr,
                        iter_partitions, transport_plan, wasserstein,
                        wasserstein_1d, wasserstein_assignment)
