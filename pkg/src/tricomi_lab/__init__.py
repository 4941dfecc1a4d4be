"""Numerical laboratory for the degenerate wave operator
d_tt - t^(2l) Laplace with the derivative nonlinearity |d_t u|^p.

The package has three layers:

* closed-form layer: exponent algebra (:mod:`~tricomi_lab.exponents`),
  special functions (:mod:`~tricomi_lab.special_functions`), and the
  explicit solution kernel (:mod:`~tricomi_lab.kernel`,
  :mod:`~tricomi_lab.linear_solver`);
* marching layer: finite-difference runs with blow-up detection
  (:mod:`~tricomi_lab.fd_solver`, :mod:`~tricomi_lab.fields`,
  :mod:`~tricomi_lab.profiles`);
* study layer: the characteristic trace (:mod:`~tricomi_lab.functional`),
  the comparison equation and lifespan sweeps
  (:mod:`~tricomi_lab.blowup_lab`), and the CLI/persistence plumbing
  (:mod:`~tricomi_lab.cli`, :mod:`~tricomi_lab.config`,
  :mod:`~tricomi_lab.persistence`, :mod:`~tricomi_lab.plotting`).
"""

from .blowup_lab import (ComparisonODE, CriticalReport, LifespanRecord,
                         OdeTrajectory, SweepReport, critical_sweep,
                         default_eps_ladder, lifespan_sweep, measure_lifespan,
                         ode_blowup_point, ode_integrate, ode_solution)
from .config import (FunctionalSpec, IoSpec, OdeSpec, RunConfig, SweepSpec,
                     load_config, parse_config)
from .errors import (ConfigError, DomainError, IntegrityError,
                     QuadratureError, SolverError)
from .exponents import (ExponentContext, LifespanLaw, conjectured_critical_p,
                        critical_condition_residual, generalized_strauss,
                        glassey, lifespan_exponent,
                        quasi_homogeneous_dimension,
                        scaling_identity_residual, sobolev_exponent)
from .fd_solver import (BlowupVerdict, DetectionConfig, GridConfig,
                        ModelParams, run, transverse_integral)
from .fields import SpaceTimeField
from .functional import (CharacteristicTrace, DataTermReport, K_constant,
                         check_data_term_bound, evaluate_U, l1_data_norm)
from .kernel import (KernelConstants, constants, in_light_cone, kernel_E,
                     kernel_E_array, phi, phi_inverse)
from .linear_solver import (duhamel_value, homogeneous_value,
                            linear_solution_slice)
from .persistence import (RunRecord, config_hash, persist_run, render_csv,
                          render_json, verify_manifest)
from .profiles import DataProfile
from .special_functions import (gamma_fn, gauss_jacobi_rule,
                                gauss_legendre_rule, gauss_limit,
                                hyp2f1_diag, hyp2f1_diag_conj)

__version__ = "0.1.0"

__all__ = [
    "BlowupVerdict",
    "CharacteristicTrace",
    "ComparisonODE",
    "ConfigError",
    "CriticalReport",
    "DataProfile",
    "DataTermReport",
    "DetectionConfig",
    "DomainError",
    "ExponentContext",
    "FunctionalSpec",
    "GridConfig",
    "IntegrityError",
    "IoSpec",
    "K_constant",
    "KernelConstants",
    "LifespanLaw",
    "LifespanRecord",
    "ModelParams",
    "OdeSpec",
    "OdeTrajectory",
    "QuadratureError",
    "RunConfig",
    "RunRecord",
    "SolverError",
    "SpaceTimeField",
    "SweepReport",
    "SweepSpec",
    "check_data_term_bound",
    "config_hash",
    "conjectured_critical_p",
    "constants",
    "critical_condition_residual",
    "critical_sweep",
    "default_eps_ladder",
    "duhamel_value",
    "evaluate_U",
    "gamma_fn",
    "gauss_jacobi_rule",
    "gauss_legendre_rule",
    "gauss_limit",
    "generalized_strauss",
    "glassey",
    "homogeneous_value",
    "hyp2f1_diag",
    "hyp2f1_diag_conj",
    "in_light_cone",
    "kernel_E",
    "kernel_E_array",
    "l1_data_norm",
    "lifespan_exponent",
    "lifespan_sweep",
    "linear_solution_slice",
    "load_config",
    "measure_lifespan",
    "ode_blowup_point",
    "ode_integrate",
    "ode_solution",
    "parse_config",
    "persist_run",
    "phi",
    "phi_inverse",
    "quasi_homogeneous_dimension",
    "render_csv",
    "render_json",
    "run",
    "scaling_identity_residual",
    "sobolev_exponent",
    "transverse_integral",
    "verify_manifest",
]
