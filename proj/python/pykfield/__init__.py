"""Geodesic k-fields: metrics, Christoffel symbols, the force/SOPDE
correspondence, rank-1 solution sheets and scenario execution."""

try:
    # installed layout: the extension lives inside this package
    from pykfield import _pykfield as _core
except ImportError:
    # build-tree layout: the extension sits on sys.path directly
    import _pykfield as _core

DegenerateMetricError = _core.DegenerateMetricError
DimensionError = _core.DimensionError
DomainError = _core.DomainError
ExprParseError = _core.ExprParseError
Force = _core.Force
Grid = _core.Grid
Metric = _core.Metric
ScenarioError = _core.ScenarioError
Sheet = _core.Sheet
ddw_residual = _core.ddw_residual
exp_map = _core.exp_map
flat_newton_sheet = _core.flat_newton_sheet
geodesic_coefficients = _core.geodesic_coefficients
identity_residual = _core.identity_residual
newton_coefficients = _core.newton_coefficients
newton_residual = _core.newton_residual
rank1_sheet = _core.rank1_sheet
recover_force = _core.recover_force
run_scenario = _core.run_scenario

__all__ = [
    "DegenerateMetricError",
    "DimensionError",
    "DomainError",
    "ExprParseError",
    "Force",
    "Grid",
    "Metric",
    "ScenarioError",
    "Sheet",
    "ddw_residual",
    "exp_map",
    "flat_newton_sheet",
    "geodesic_coefficients",
    "identity_residual",
    "newton_coefficients",
    "newton_residual",
    "rank1_sheet",
    "recover_force",
    "run_scenario",
]
