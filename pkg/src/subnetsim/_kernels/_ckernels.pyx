# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``. Same signatures, same outputs."""

import numpy as np

from libc.math cimport exp, log10, pow, sqrt


def large_scale_gains(const double[:, ::1] sensors, const double[:, ::1] aps,
                      const double[:, ::1] u_los, const double[:, ::1] z_shadow,
                      double carrier_freq_ghz, double los_decay_m,
                      double sigma_los_db, double sigma_nlos_db, double min_distance_m):
    cdef Py_ssize_t O = sensors.shape[0], A = aps.shape[0], o, a
    los_arr = np.empty((O, A), dtype=np.uint8)
    pl_arr = np.empty((O, A), dtype=np.float64)
    sh_arr = np.empty((O, A), dtype=np.float64)
    beta_arr = np.empty((O, A), dtype=np.float64)
    cdef unsigned char[:, ::1] los = los_arr
    cdef double[:, ::1] pl = pl_arr
    cdef double[:, ::1] sh = sh_arr
    cdef double[:, ::1] beta = beta_arr
    cdef double logf = log10(carrier_freq_ghz)
    cdef double c_los = 31.84 + 19.0 * logf
    cdef double c_dl = 18.6 + 20.0 * logf
    cdef double c_sl = 33.0 + 20.0 * logf
    cdef double dx, dy, dz, d2d, d3d, logd, p_los, p_nlos, p, s
    cdef bint is_los
    with nogil:
        for o in range(O):
            for a in range(A):
                dx = sensors[o, 0] - aps[a, 0]
                dy = sensors[o, 1] - aps[a, 1]
                dz = sensors[o, 2] - aps[a, 2]
                d2d = sqrt(dx * dx + dy * dy)
                d3d = sqrt(d2d * d2d + dz * dz)
                if d3d < min_distance_m:
                    d3d = min_distance_m
                is_los = u_los[o, a] < exp(-d2d / los_decay_m)
                logd = log10(d3d)
                p_los = c_los + 21.5 * logd
                if is_los:
                    p = p_los
                    s = z_shadow[o, a] * sigma_los_db
                else:
                    p = c_dl + 35.7 * logd
                    if p_los > p:
                        p = p_los
                    p_nlos = c_sl + 25.5 * logd
                    if p_nlos > p:
                        p = p_nlos
                    s = z_shadow[o, a] * sigma_nlos_db
                los[o, a] = is_los
                pl[o, a] = p
                sh[o, a] = s
                beta[o, a] = pow(10.0, -(p + s) / 10.0)
    return los_arr, pl_arr, sh_arr, beta_arr


def ap_interference(const double[:, ::1] gain, const double[::1] mu,
                    Py_ssize_t num_subnetworks, double m_per_ap):
    cdef Py_ssize_t O = gain.shape[0], A = gain.shape[1]
    cdef Py_ssize_t O_b = O // num_subnetworks, A_b = A // num_subnetworks
    cdef Py_ssize_t o, a, src, dst
    cdef double w
    out_arr = np.zeros(A, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for src in range(num_subnetworks):
            for o in range(src * O_b, (src + 1) * O_b):
                w = mu[o]
                # skip the source's own AP block
                for dst in range(num_subnetworks):
                    if dst == src:
                        continue
                    for a in range(dst * A_b, (dst + 1) * A_b):
                        out[a] += w * gain[o, a]
        for a in range(A):
            out[a] /= m_per_ap
    return out_arr


def zf_powers(const double complex[:, :, ::1] fh, const double complex[:, :, ::1] hstack,
              const double[::1] mu, const unsigned char[::1] radiating,
              const unsigned char[::1] evaluate):
    cdef Py_ssize_t B = fh.shape[0], O_b = fh.shape[1]
    cdef Py_ssize_t O = hstack.shape[0]
    cdef Py_ssize_t b, k, l, o, lo
    cdef double pw, ci, ui
    p_s_arr = np.zeros(O, dtype=np.float64)
    p_ci_arr = np.zeros(O, dtype=np.float64)
    p_ui_arr = np.zeros(O, dtype=np.float64)
    cdef double[::1] p_s = p_s_arr
    cdef double[::1] p_ci = p_ci_arr
    cdef double[::1] p_ui = p_ui_arr
    cdef double[:, ::1] proj
    fh_arr = np.asarray(fh)
    h_arr = np.asarray(hstack)
    for b in range(B):
        if not evaluate[b]:
            continue
        # projections through BLAS; a hand loop is ~2x slower than zgemm here
        g = fh_arr[b] @ h_arr[:, b, :].T
        proj = np.ascontiguousarray(g.real ** 2 + g.imag ** 2)
        lo = b * O_b
        with nogil:
            for k in range(O_b):
                o = lo + k
                ci = 0.0
                ui = 0.0
                for l in range(O):
                    if l == o or not radiating[l]:
                        continue
                    pw = mu[l] * proj[k, l]
                    if lo <= l < lo + O_b:
                        ci = ci + pw
                    else:
                        ui = ui + pw
                p_s[o] = mu[o] * proj[k, o]
                p_ci[o] = ci
                p_ui[o] = ui
    return p_s_arr, p_ci_arr, p_ui_arr
