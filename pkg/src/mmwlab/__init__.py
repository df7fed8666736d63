"""Building-aware mmWave downlink: analytic model plus Monte Carlo drops.

Dense mmWave networks lose most links to building blockage, but the same
buildings attract most of the traffic. The model here lets each base
station close to a building dedicate its cell-discovery beam to that
building's facade, trading raw coverage for load balance. The package
evaluates that trade both in closed form (`analytic`) and by simulating
drops (`simulate`), and exposes both through one CLI (`mmwlab`).
"""

from .analytic import (AnalyticReport, DomainError, InfiniteLosDistance,
                       QuadratureError, QuadratureSettings, analytic_report,
                       average_rate, coverage, coverage_far, coverage_near,
                       coverage_with_noise, effective_mainlobe_radius,
                       los_distance, mean_load_far, mean_load_near,
                       noise_power_dbm, optimal_bias_coverage,
                       optimal_bias_rate, ue_densities)
from .association import (Association, BsRole, BsState, associate_all,
                          associate_rsrp, classify_bs, classify_many, rsrp,
                          schedule)
from .geometry import (Building, BuildingField, EmptyFieldError, RegionClass,
                       Wall, Window, classify_point, classify_points,
                       discovery_angle, dump_scene_csv, los_between,
                       los_pairs, los_to_many, nearest_wall,
                       sample_buildings, sample_ppp)
from .scenario import (PRESETS, CityPreset, ConfigError, ScenarioParams,
                       ValidationOutcome, load_config, params_for_city,
                       parse_config, preset, validate)
from .simulate import (DropSample, EstimateSummary, MetricStats, SimMode,
                       estimate, realize)

__version__ = "0.1.0"

__all__ = [
    "AnalyticReport", "Association", "BsRole", "BsState", "Building",
    "BuildingField", "CityPreset", "ConfigError", "DomainError",
    "DropSample", "EmptyFieldError", "EstimateSummary", "MetricStats",
    "InfiniteLosDistance", "PRESETS", "QuadratureError", "QuadratureSettings",
    "RegionClass", "ScenarioParams", "SimMode", "ValidationOutcome", "Wall",
    "Window", "analytic_report", "associate_all", "associate_rsrp",
    "average_rate", "classify_bs", "classify_many", "classify_point",
    "classify_points", "coverage", "coverage_far", "coverage_near",
    "coverage_with_noise", "discovery_angle", "dump_scene_csv", "estimate",
    "effective_mainlobe_radius", "load_config", "los_between", "los_distance",
    "los_pairs", "los_to_many", "mean_load_far", "mean_load_near",
    "nearest_wall", "noise_power_dbm", "optimal_bias_coverage",
    "optimal_bias_rate", "params_for_city", "parse_config", "preset",
    "realize", "rsrp", "sample_buildings", "sample_ppp", "schedule",
    "ue_densities", "validate", "__version__",
]
