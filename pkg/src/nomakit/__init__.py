"""NOMA power allocation, beamforming, uplink SIC and NOMA-ALOHA throughput."""

__version__ = "0.1.0"

from .beamforming import (
    Beam,
    Cluster,
    ClusterSolution,
    constraints_satisfied,
    db_to_linear,
    fig3_experiment,
    optimize_beam,
    powers_for_beam,
    sinr_weak,
    zf_multicluster,
)
from .channel import FadingSpec, draw_channel
from .downlink import DownlinkScenario, achievable_rate, in_rate_region, reduced_region_check
from .errors import InfeasibleError, NomaError
from .power import PowerSolution, max_sum_rate_allocation, min_power_allocation, rate_region_boundary
from .random_access import (
    DecodingModel,
    RaConfig,
    ThroughputCurve,
    aloha_throughput,
    noma_aloha_throughput_2level,
    simulate_multichannel,
    throughput_curve,
)
from .uplink import UplinkScenario, feasible_rate_tuple, sic_rates, total_mutual_information
