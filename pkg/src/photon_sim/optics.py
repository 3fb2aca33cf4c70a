"""Beam splitters and phase shifters acting on truncated Fock states.

A beam splitter with matrix ``L`` maps creation operators as
``a_l† -> sum_k L[k, l] a_k†``, with

    L(theta, phi) = [[cos theta, -e^{i phi} sin theta],
                     [e^{-i phi} sin theta, cos theta]].

It conserves the total photon number T of the two modes, so it acts on the
Fock basis block by block.  Column ``(m, T - m)`` of block T is the image

    U |m, n> = (L11 a1† + L21 a2†)^m (L12 a1† + L22 a2†)^n |00> / sqrt(m! n!),

built one photon at a time.  Writing |m, n> = (sqrt(m) a1†|m-1, n> + sqrt(n) a2†|m, n-1>) / T
and pushing the creation operators through U gives block T from block T - 1
as a four-term combination whose weights have unit total square.  This is the
binomial routing sum evaluated in nested form; unlike the explicit sum (and
unlike one-sided nesting) it does not amplify rounding error as T grows.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import FockState

__all__ = [
    "BeamSplitterSpec",
    "TruncationWarning",
    "apply_beamsplitter",
    "apply_phase",
    "bs_blocks",
    "bs_matrix",
    "SYMMETRIC_BS",
]

# Realized leakage above this level raises TruncationWarning.
LEAKAGE_WARN = 1e-10


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Angles of a beam splitter, with optional perturbations of each angle."""

    theta: float
    phi: float
    delta1: float = 0.0
    delta2: float = 0.0

    @property
    def effective_theta(self) -> float:
        return self.theta + self.delta1

    @property
    def effective_phi(self) -> float:
        return self.phi + self.delta2

    def inverse(self) -> "BeamSplitterSpec":
        """theta -> -theta at fixed phi, which undoes the transformation."""
        return BeamSplitterSpec(-self.effective_theta, self.effective_phi)


SYMMETRIC_BS = BeamSplitterSpec(math.pi / 4, math.pi / 2)


def bs_matrix(spec: BeamSplitterSpec) -> np.ndarray:
    th, ph = spec.effective_theta, spec.effective_phi
    c, s = math.cos(th), math.sin(th)
    return np.array(
        [[c, -cmath.exp(1j * ph) * s], [cmath.exp(-1j * ph) * s, c]],
        dtype=np.complex128,
    )


@lru_cache(maxsize=8)
def _blocks(theta: float, phi: float, cut_a: int, cut_b: int) -> tuple[np.ndarray, ...]:
    lam = bs_matrix(BeamSplitterSpec(theta, phi))
    blocks = [np.ones((1, 1), dtype=np.complex128)]
    for T in range(1, cut_a + cut_b + 1):
        lo, hi = max(0, T - cut_b), min(T, cut_a)
        p = np.arange(lo, hi + 1)
        sp, sq = np.sqrt(p), np.sqrt(T - p)
        # previous block padded by one on each side; absolute index i -> i - plo + 1
        plo = max(0, T - 1 - cut_b)
        prev = np.pad(blocks[-1], 1)
        dn = p - 1 - plo + 1  # index of p - 1
        up = p - plo + 1  # index of p
        blk = (
            lam[0, 0] * np.outer(sp, sp) * prev[np.ix_(dn, dn)]
            + lam[1, 0] * np.outer(sq, sp) * prev[np.ix_(up, dn)]
            + lam[0, 1] * np.outer(sp, sq) * prev[np.ix_(dn, up)]
            + lam[1, 1] * np.outer(sq, sq) * prev[np.ix_(up, up)]
        ) / T
        blk.setflags(write=False)
        blocks.append(blk)
    return tuple(blocks)


def bs_blocks(spec: BeamSplitterSpec, cut_a: int, cut_b: int) -> tuple[np.ndarray, ...]:
    """Photon-number blocks of the beam splitter restricted to the (cut_a, cut_b) box.

    Block T has rows/columns indexed by the mode-a occupation p running over
    ``max(0, T - cut_b) .. min(T, cut_a)``; entry ``[p', p]`` is
    ``<p', T - p'| U |p, T - p>``.  Results are cached (thread-safe lookup).
    """
    return _blocks(float(spec.effective_theta), float(spec.effective_phi), int(cut_a), int(cut_b))


def apply_beamsplitter(
    state: FockState, mode_a: int, mode_b: int, spec: BeamSplitterSpec
) -> FockState:
    """Image of ``state`` under the beam splitter on (mode_a, mode_b).

    ``mode_a`` plays the role of index 1 of the beam-splitter matrix.  Output
    weight that would need more photons than a mode's cutoff is added to
    ``leakage``; a ``TruncationWarning`` is issued when that exceeds 1e-10.
    """
    n = state.num_modes
    if not (0 <= mode_a < n and 0 <= mode_b < n):
        raise ValueError(f"modes ({mode_a}, {mode_b}) out of range for {n} modes")
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")

    psi = np.moveaxis(state.amplitudes, (mode_a, mode_b), (0, 1))
    cut_a, cut_b = psi.shape[0] - 1, psi.shape[1] - 1
    rest = psi.shape[2:]
    psi = psi.reshape(cut_a + 1, cut_b + 1, -1)
    out = np.zeros_like(psi)
    blocks = bs_blocks(spec, cut_a, cut_b)

    # Inside the box the blocks are exact; leakage is the block weight that the
    # box cannot hold, i.e. input block norm² minus output block norm².
    lost = 0.0
    for T, blk in enumerate(blocks):
        lo, hi = max(0, T - cut_b), min(T, cut_a)
        p = np.arange(lo, hi + 1)
        v = psi[p, T - p]
        if not v.any():
            continue
        w = blk @ v
        out[p, T - p] = w
        lost += max(0.0, float(np.sum(np.abs(v) ** 2) - np.sum(np.abs(w) ** 2)))

    if lost > LEAKAGE_WARN:
        warnings.warn(
            f"beam splitter pushed {lost:.3g} of norm² past the cutoffs {(cut_a, cut_b)}",
            TruncationWarning,
            stacklevel=2,
        )
    out = np.moveaxis(out.reshape((cut_a + 1, cut_b + 1) + rest), (0, 1), (mode_a, mode_b))
    return FockState(out, state.leakage + lost)


def apply_phase(state: FockState, mode: int, phase: float) -> FockState:
    """Multiply the amplitude at occupation n of ``mode`` by exp(i n phase)."""
    if not 0 <= mode < state.num_modes:
        raise ValueError(f"mode {mode} out of range for {state.num_modes} modes")
    cutoff = state.cutoffs[mode]
    shape = [1] * state.num_modes
    shape[mode] = cutoff + 1
    factors = np.exp(1j * phase * np.arange(cutoff + 1)).reshape(shape)
    return FockState(state.amplitudes * factors, state.leakage)
