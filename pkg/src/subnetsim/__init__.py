"""Uplink Monte-Carlo simulator for coexisting 6G in-X sub-networks.

Distributed MIMO with zero-forcing reception at each control unit,
listen-before-talk channel access and adaptive power reduction, over the
3GPP indoor-factory (InF-DL) channel at 6 GHz.
"""

from ._kernels import BACKEND
from .campaign import CampaignResult, ecdf, quantile, run_campaign, run_drop
from .config import SimConfig, dump_config, load_config, parse_config

__all__ = [
    "BACKEND",
    "CampaignResult",
    "SimConfig",
    "dump_config",
    "ecdf",
    "load_config",
    "parse_config",
    "quantile",
    "run_campaign",
    "run_drop",
]
__version__ = "0.1.0"
