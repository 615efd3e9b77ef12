"""Stacked sub-network channels and zero-forcing receive combiners."""

from __future__ import annotations

import numpy as np

from .channel import ChannelState

__all__ = ["RankDeficientError", "stack_subnetwork_channel", "zf_matrix", "zf_batch"]


class RankDeficientError(np.linalg.LinAlgError):
    """The Gram matrix H^* H is too ill-conditioned for zero-forcing."""

    def __init__(self, message, subnetworks=()):
        super().__init__(message)
        self.subnetworks = tuple(subnetworks)


def stack_subnetwork_channel(state: ChannelState, b: int) -> np.ndarray:
    """H^b, shape (M, O_b): column o is h_o^b for the o-th sensor of sub-network b."""
    O_b = state.sensors_per_subnetwork
    return state.stacked()[b * O_b:(b + 1) * O_b, b, :].T


def zf_batch(H: np.ndarray, max_condition: float = 1e12) -> np.ndarray:
    """Zero-forcing combiners F = H (H^* H)^{-1} for a stack of channels.

    ``H`` has shape (..., M, K) with M >= K. The Gram system is solved by LU
    rather than inverted explicitly.
    """
    H = np.asarray(H, dtype=complex)
    if H.shape[-2] < H.shape[-1]:
        raise RankDeficientError(f"zero-forcing needs M >= K, got {H.shape[-2:]}")
    Hh = np.conj(np.swapaxes(H, -1, -2))
    gram = Hh @ H
    cond = np.linalg.cond(gram)
    bad = ~(cond <= max_condition)
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad)).ravel().tolist()
        raise RankDeficientError(
            f"Gram matrix condition number {np.max(cond):.3g} exceeds {max_condition:.3g}", idx)
    # F^* = G^{-1} H^*  (G Hermitian)
    fh = np.linalg.solve(gram, Hh)
    return np.conj(np.swapaxes(fh, -1, -2))


def zf_matrix(H: np.ndarray, max_condition: float = 1e12) -> np.ndarray:
    """Zero-forcing combiner for a single (M, K) channel matrix."""
    H = np.asarray(H)
    if H.ndim != 2:
        raise ValueError(f"expected a 2-D channel matrix, got shape {H.shape}")
    return zf_batch(H, max_condition)
