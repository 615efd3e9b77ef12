"""Pure-numpy implementations of the hot kernels (reference + fallback).

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Inputs are C-contiguous float64 / complex128 / int64 / uint8 arrays.
"""

import numpy as np


def large_scale_gains(sensors, aps, u_los, z_shadow, carrier_freq_ghz, los_decay_m,
                      sigma_los_db, sigma_nlos_db, min_distance_m):
    """Per-link (O, A) LOS flag, path loss [dB], shadowing [dB] and linear beta.

    ``u_los`` are U(0,1) draws (LOS iff u < P_LOS) and ``z_shadow`` standard
    normal draws scaled by the LOS/NLOS shadowing sigma.
    """
    diff = sensors[:, None, :] - aps[None, :, :]
    d2d = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
    d3d = np.maximum(np.sqrt(d2d ** 2 + diff[..., 2] ** 2), min_distance_m)
    los = u_los < np.exp(-d2d / los_decay_m)
    logd = np.log10(d3d)
    logf = np.log10(carrier_freq_ghz)
    pl_los = 31.84 + 21.5 * logd + 19.0 * logf
    pl_nlos = np.maximum(np.maximum(18.6 + 35.7 * logd + 20.0 * logf, pl_los),
                         33.0 + 25.5 * logd + 20.0 * logf)
    pathloss = np.where(los, pl_los, pl_nlos)
    shadow = z_shadow * np.where(los, sigma_los_db, sigma_nlos_db)
    beta = 10.0 ** (-(pathloss + shadow) / 10.0)
    return los.astype(np.uint8), pathloss, shadow, beta


def ap_interference(gain, mu, num_subnetworks, m_per_ap):
    """Average per-antenna uncontrolled interference at every AP, shape (A,).

    ``gain[o, a]`` is ||h_{o,a}||^2 and ``mu[o]`` the linear transmit power.
    Sensors and APs are laid out in equal contiguous blocks per sub-network.
    """
    O, A = gain.shape
    B = num_subnetworks
    per_source = np.matmul(mu.reshape(B, 1, O // B), gain.reshape(B, O // B, A))
    per_source = per_source.reshape(B, B, A // B)
    per_source[np.arange(B), np.arange(B), :] = 0.0
    return per_source.sum(axis=0).reshape(A) / m_per_ap


def zf_powers(fh, hstack, mu, radiating, evaluate):
    """Desired, intra (CI) and inter (UI) sub-network powers after ZF combining.

    fh:        (B, O_b, M) conjugate-transposed beamformers F^{b*}
    hstack:    (O, B, M) channel of every sensor stacked over each
               sub-network's APs
    mu:        (O,) linear transmit powers
    radiating: (O,) 1 if the sensor transmits (counts as an interferer)
    evaluate:  (B,) 1 if sub-network b is to be evaluated

    Returns three (O,) arrays; rows of non-evaluated sub-networks are zero.
    """
    B, O_b, _ = fh.shape
    O = hstack.shape[0]
    p_s = np.zeros(O)
    p_ci = np.zeros(O)
    p_ui = np.zeros(O)
    weight = mu * radiating
    off_diag = ~np.eye(O_b, dtype=bool)
    for b in np.flatnonzero(evaluate):
        proj = np.abs(fh[b] @ hstack[:, b, :].T) ** 2  # (O_b, O)
        own = slice(b * O_b, (b + 1) * O_b)
        own_proj = proj[:, own]
        p_s[own] = own_proj.diagonal() * mu[own]
        p_ci[own] = np.where(off_diag, own_proj * weight[own], 0.0).sum(axis=1)
        external = weight.copy()
        external[own] = 0.0
        p_ui[own] = proj @ external
    return p_s, p_ci, p_ui
