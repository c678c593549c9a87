"""Solar-powered UAV relay placement for hybrid RF/optical backhaul links."""

__version__ = "0.1.0"

from .channel_models import (Atmosphere, PathSegments, PointingErrorModel,
                             ScintillationModel, SCINTILLATION_PRESETS,
                             UavPosition, attenuation_gains, cloud_path_length,
                             composite_pdf, pointing_only_pdf)
from .mc_oracle import McEstimate, McSettings, mc_capacity, sample_channel_gain
from .opt2d import (Approx2DSolution, MaxMinSolution, highsnr_optimum,
                    lowsnr_optimum, maxmin_1d, maxmin_2d, nmse,
                    numeric_optimum_2d)
from .opt3d import (CouplingModel, OptimizationResult, OptimizerSettings,
                    capacity_slice, optimize_position, sweep_optimal_position)
from .quadrature import QuadratureError
from .relay_capacity import (CapacityResult, OpticalLink, RelayConfig,
                             af_average_capacity, af_conditional_capacity,
                             af_gain, average_capacity, df_average_capacity,
                             df_closed_form, df_conditional_capacity)
from .rf_uplink import (SensorField, UplinkStats, channel_gain,
                        sensor_capacity, sum_rate, uplink_stats)
from .scenario import (Scenario, ScenarioError, default_scenario,
                       dump_scenario, load_scenario, save_scenario,
                       scenario_digest)
from .solar_power import (InfeasibleAltitudeError, PowerBudget, SolarPlatform,
                          harvested_power, hover_power, min_altitude,
                          transmittance)

__all__ = [name for name in dir() if not name.startswith("_")]
