"""Time-harmonic scalar waves in smoothly varying 2D waveguides with admittance walls."""
from .numcore import SolverError, SingularMatrix, StepFailure
from .geometry import (AdmittanceProfile, AdmittanceSegment, ConformalBlock, ExpSCMap, OuterPolygonMap,
                       StraightMap, admittance_Y, map_from_dict)
from .transverse import TransverseBasis, build_basis, solve_lambda
from .assembly import CoefficientTable, build_table
from .rt_solver import ScatteringMatrix, solve_rt
from .cascade import StraightGuide, chain, combine, propagator_U
from .dtn_solver import solve_block_field, solve_dtn_operators, reconstruct_field
from .analysis import PowerReport, power_ratio
from .pipeline import SolverSettings, solve_fields, solve_structure, rt_dtn_comparison, power_sweep
from .config import SolveConfig, ConfigError

__version__ = "0.1.0"
