"""Time the compiled kernels against the numpy fallback.

Kernel-level timings on B=100 inputs, then whole-drop timings per backend.

    python benchmarks/bench_kernels.py [--repeat 20] [--drops 20]
"""

import argparse
import timeit

import numpy as np

from subnetsim import _kernels
from subnetsim.beamforming import stack_subnetwork_channel, zf_batch
from subnetsim.campaign import run_drop
from subnetsim.channel import build_channel_state
from subnetsim.config import SimConfig
from subnetsim.topology import build_topology


def kernel_inputs(B=100, A_b=20, seed=0):
    cfg = SimConfig(num_subnetworks=B, aps_per_subnetwork=A_b)
    rng = np.random.default_rng(seed)
    topo = build_topology(cfg, rng)
    state = build_channel_state(topo, cfg, rng)
    O, A = topo.num_sensors, topo.num_aps
    u = rng.random((O, A))
    z = rng.standard_normal((O, A))
    mu = np.full(O, 10 ** (-4.5))
    hstack = state.stacked()
    fh = np.conj(np.swapaxes(zf_batch(np.stack([stack_subnetwork_channel(state, b)
                                                  for b in range(B)])), 1, 2))
    radiating = np.ones(O, dtype=np.uint8)
    evaluate = np.ones(B, dtype=np.uint8)
    return {
        "large_scale_gains": (topo.sensors, topo.aps, u, z, 6.0, 2.1827, 1.94, 3.24, 1.0),
        "ap_interference": (state.gain, mu, B, cfg.antennas_per_ap),
        "zf_powers": (fh, hstack, mu, radiating, evaluate),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--drops", type=int, default=20)
    args = ap.parse_args()
    names = sorted(_kernels.BACKENDS)
    print(f"backends: {', '.join(names)}")
    inputs = kernel_inputs()
    for kernel, params in inputs.items():
        row = []
        for name in names:
            fn = getattr(_kernels.get_backend(name), kernel)
            t = min(timeit.repeat(lambda: fn(*params), number=1, repeat=args.repeat))
            row.append(f"{name} {t * 1e3:8.2f} ms")
        print(f"{kernel:<18} " + "  ".join(row))
    for B, A_b in ((30, 20), (100, 20), (100, 1)):
        cfg = SimConfig(num_subnetworks=B, aps_per_subnetwork=A_b)
        row = []
        for name in names:
            k = _kernels.get_backend(name)
            t = min(timeit.repeat(lambda: [run_drop(cfg, i, 1, k) for i in range(args.drops)],
                                  number=1, repeat=3)) / args.drops
            row.append(f"{name} {t * 1e3:8.2f} ms")
        print(f"drop B={B:<3} A_b={A_b:<2}   " + "  ".join(row))


if __name__ == "__main__":
    main()
