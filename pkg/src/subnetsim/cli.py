"""Command-line entry point: ``subnetsim --config scenario.toml --out results/``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from . import _kernels
from .campaign import CampaignError, run_campaign, drop_streams
from .config import ConfigError, SimConfig, config_from_mapping, load_config
from .io import OutputError, write_campaign_outputs, write_topology
from .topology import PlacementInfeasibleError, build_topology

log = logging.getLogger("subnetsim")

# flag dest -> SimConfig field
_OVERRIDES = {
    "subnetworks": "num_subnetworks",
    "aps_per_subnetwork": "aps_per_subnetwork",
    "sensors_per_subnetwork": "sensors_per_subnetwork",
    "power_mode": "power_mode",
    "tx_power_dbm": "tx_power_dbm",
    "drops": "num_drops",
    "realizations": "fading_realizations_per_drop",
    "seed": "master_seed",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subnetsim",
        description="Uplink Monte-Carlo campaign for coexisting distributed-MIMO "
                    "sub-networks under listen-before-talk.",
        epilog="example: subnetsim --subnetworks 30 --aps-per-subnetwork 20 "
               "--power-mode apr --drops 1000 --seed 7 --out results/",
    )
    p.add_argument("--config", help="flat TOML scenario file")
    p.add_argument("--subnetworks", type=int, help="number of sub-networks B")
    p.add_argument("--aps-per-subnetwork", type=int, help="APs per sub-network A_b")
    p.add_argument("--sensors-per-subnetwork", type=int, help="sensors per sub-network O_b")
    p.add_argument("--power-mode", choices=("fixed", "apr"))
    p.add_argument("--tx-power-dbm", type=float, help="sensor power in fixed mode")
    p.add_argument("--drops", type=int, help="number of Monte-Carlo drops")
    p.add_argument("--realizations", type=int, help="fading realizations per drop")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--workers", type=int,
                   help="worker processes (default: $SUBNETSIM_THREADS or CPU count)")
    p.add_argument("--backend", choices=sorted(_kernels.BACKENDS),
                   help="kernel backend (default: compiled if available)")
    p.add_argument("--plot", action="store_true", help="also write cdf.svg")
    p.add_argument("--dump-topology", action="store_true",
                   help="write the first drop's topology to topology.csv")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> SimConfig:
    overrides = {field: getattr(args, dest) for dest, field in _OVERRIDES.items()
                 if getattr(args, dest) is not None}
    if args.config:
        cfg = load_config(args.config)
        return cfg.replace(**overrides) if overrides else cfg
    return config_from_mapping(overrides)


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.config and all(getattr(args, d) is None for d in _OVERRIDES):
        parser.print_usage(sys.stderr)
        print("subnetsim: error: give --config or scenario overrides "
              "(at least --subnetworks and --aps-per-subnetwork)", file=sys.stderr)
        return 2
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"subnetsim: config error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        result = run_campaign(cfg, workers=args.workers, backend=args.backend)
    except (CampaignError, PlacementInfeasibleError, ValueError) as exc:
        print(f"subnetsim: campaign failed: {exc}", file=sys.stderr)
        return 1
    log.info("campaign finished in %.1f s (%d samples)", time.perf_counter() - t0,
             result.num_samples)

    try:
        manifest = write_campaign_outputs(result, args.out, plot=args.plot)
        if args.dump_topology:
            topo = build_topology(cfg, drop_streams(cfg.master_seed, 0, 0)[0])
            manifest["topology"] = write_topology(topo, manifest["summary"].parent / "topology.csv")
    except (OutputError, OSError) as exc:
        print(f"subnetsim: output error: {exc}", file=sys.stderr)
        return 1
    except ImportError as exc:
        print(f"subnetsim: plotting unavailable: {exc}", file=sys.stderr)
        return 1
    for role, path in manifest.items():
        print(f"{role}: {path}")
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
