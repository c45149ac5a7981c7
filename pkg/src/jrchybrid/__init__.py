"""Energy-efficient hybrid precoding for joint radar-communication transmitters."""

__version__ = "0.1.0"

from .channel import ChannelConfig, ChannelRealization, generate_channel, steering_vector  # noqa: E402
from .config import PAPER, SystemConfig, default_system, validate  # noqa: E402
from .hybrid import HybridConfig, HybridPrecoder, design_hybrid  # noqa: E402
from .metrics import PowerModel, energy_efficiency, power_consumed, rate  # noqa: E402
from .radar import RadarScene, beampattern, build_radar_precoder  # noqa: E402
from .rfselect import RfSelectConfig, RfSelection, effective_gains, select_rf_chains  # noqa: E402

__all__ = [
    "ChannelConfig", "ChannelRealization", "generate_channel", "steering_vector",
    "PAPER", "SystemConfig", "default_system", "validate",
    "HybridConfig", "HybridPrecoder", "design_hybrid",
    "PowerModel", "energy_efficiency", "power_consumed", "rate",
    "RadarScene", "beampattern", "build_radar_precoder",
    "RfSelectConfig", "RfSelection", "effective_gains", "select_rf_chains",
]
