"""Gas chromatography column transport: analytic and finite-difference solvers."""
from .scales import (AnalyteDimensionless, AnalyteSpec, ColumnGeometry, DimensionlessGroups,
                     DomainError, OperatingConditions, inlet_velocity, nondimensionalize,
                     ppb_to_molar)
from .flow import FlowField, outlet_pressure_from_darcy
from .chromatogram import Chromatogram

__version__ = "0.1.0"
from .config import ConfigError, RunConfig, data_path, load_config
