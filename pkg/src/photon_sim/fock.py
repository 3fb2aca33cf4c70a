"""Multimode bosonic pure states in a truncated Fock basis.

Amplitudes live in a dense complex tensor of shape ``(c_0 + 1, ..., c_{M-1} + 1)``
where ``c_m`` is the (inclusive) photon-number cutoff of mode ``m``.  Flattening
for serialization is row-major (C order): the last mode varies fastest, so the
occupation ``(n_0, ..., n_{M-1})`` sits at ``sum_m n_m * prod_{k>m} (c_k + 1)``.

Weight that an operation would push past a cutoff is never dropped silently;
its squared norm is added to ``FockState.leakage``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

__all__ = [
    "DegenerateStateError",
    "FockState",
    "amplitude",
    "apply_annihilation",
    "apply_creation",
    "basis_state",
    "from_dict",
    "from_json",
    "joint_distribution",
    "norm",
    "normalize",
    "photon_number_distribution",
    "tensor",
    "to_dict",
    "to_json",
    "vacuum",
]

# Tolerance used to decide whether a state counts as normalized.
NORMALIZED_ATOL = 1e-8


class DegenerateStateError(ValueError):
    """Raised when a zero (or numerically zero) state has to be normalized."""


@dataclass(frozen=True, eq=False)
class FockState:
    """Immutable pure state on ``num_modes`` truncated bosonic modes.

    Attributes:
        amplitudes: complex tensor, one axis per mode, axis ``m`` of length
            ``cutoffs[m] + 1``.  Stored read-only.
        leakage: squared norm estimated lost to truncation so far.
    """

    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self) -> None:
        arr = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if arr.ndim < 1:
            raise ValueError("a FockState needs at least one mode")
        if any(d < 2 for d in arr.shape):
            raise ValueError(f"every cutoff must be >= 1, got shape {arr.shape}")
        if not math.isfinite(self.leakage) or self.leakage < 0:
            raise ValueError(f"leakage must be a finite nonnegative number, got {self.leakage}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)
        object.__setattr__(self, "leakage", float(self.leakage))

    @property
    def num_modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoffs(self) -> tuple[int, ...]:
        return tuple(d - 1 for d in self.amplitudes.shape)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self) -> str:
        return (
            f"FockState(num_modes={self.num_modes}, cutoffs={list(self.cutoffs)}, "
            f"norm={math.sqrt(self.norm_squared()):.12g}, leakage={self.leakage:.3g})"
        )


def _check_cutoffs(num_modes: int, cutoffs: Sequence[int]) -> tuple[int, ...]:
    if num_modes < 1:
        raise ValueError(f"num_modes must be >= 1, got {num_modes}")
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != num_modes:
        raise ValueError(f"expected {num_modes} cutoffs, got {len(cutoffs)}")
    if any(c < 1 for c in cutoffs):
        raise ValueError(f"every cutoff must be >= 1, got {list(cutoffs)}")
    return cutoffs


def _check_mode(state: FockState, mode: int) -> int:
    if not 0 <= mode < state.num_modes:
        raise ValueError(f"mode {mode} out of range for a {state.num_modes}-mode state")
    return mode


def vacuum(num_modes: int, cutoffs: Sequence[int]) -> FockState:
    """The all-modes vacuum |0...0>."""
    cutoffs = _check_cutoffs(num_modes, cutoffs)
    arr = np.zeros(tuple(c + 1 for c in cutoffs), dtype=np.complex128)
    arr[(0,) * num_modes] = 1.0
    return FockState(arr)


def basis_state(occupations: Sequence[int], cutoffs: Sequence[int]) -> FockState:
    """The number state |n_0, ..., n_{M-1}>."""
    cutoffs = _check_cutoffs(len(occupations), cutoffs)
    occ = tuple(int(n) for n in occupations)
    if any(n < 0 or n > c for n, c in zip(occ, cutoffs)):
        raise ValueError(f"occupations {list(occ)} exceed cutoffs {list(cutoffs)}")
    arr = np.zeros(tuple(c + 1 for c in cutoffs), dtype=np.complex128)
    arr[occ] = 1.0
    return FockState(arr)


def apply_creation(state: FockState, mode: int) -> FockState:
    """Apply the creation operator of ``mode``; the result is not renormalized.

    Amplitude at n moves to n + 1 with weight sqrt(n + 1).  Whatever sat at the
    cutoff has nowhere to go and its squared norm is booked as leakage.
    """
    _check_mode(state, mode)
    a = np.moveaxis(state.amplitudes, mode, 0)
    cutoff = a.shape[0] - 1
    out = np.zeros_like(a)
    sqrt_n = np.sqrt(np.arange(1, cutoff + 1, dtype=float))
    out[1:] = a[:-1] * sqrt_n.reshape((-1,) + (1,) * (a.ndim - 1))
    lost = float(np.sum(np.abs(a[-1]) ** 2))
    return FockState(np.moveaxis(out, 0, mode), state.leakage + lost)


def apply_annihilation(state: FockState, mode: int) -> FockState:
    """Apply the annihilation operator of ``mode`` (unnormalized)."""
    _check_mode(state, mode)
    a = np.moveaxis(state.amplitudes, mode, 0)
    out = np.zeros_like(a)
    sqrt_n = np.sqrt(np.arange(1, a.shape[0], dtype=float))
    out[:-1] = a[1:] * sqrt_n.reshape((-1,) + (1,) * (a.ndim - 1))
    return FockState(np.moveaxis(out, 0, mode), state.leakage)


def tensor(a: FockState, b: FockState) -> FockState:
    """Tensor product; modes of ``a`` come first."""
    return FockState(np.multiply.outer(a.amplitudes, b.amplitudes), a.leakage + b.leakage)


def norm(state: FockState) -> float:
    return math.sqrt(state.norm_squared())


def normalize(state: FockState) -> FockState:
    """Rescale to unit norm.

    Leakage is rescaled by the same factor, so it stays a relative error budget.
    """
    n2 = state.norm_squared()
    if n2 <= 1e-300 or not math.isfinite(n2):
        raise DegenerateStateError("cannot normalize a zero state")
    return FockState(state.amplitudes / math.sqrt(n2), state.leakage / n2)


def amplitude(state: FockState, idx: Sequence[int]) -> complex:
    idx = tuple(int(i) for i in idx)
    if len(idx) != state.num_modes:
        raise ValueError(f"index {idx} has wrong length for {state.num_modes} modes")
    if any(i < 0 or i > c for i, c in zip(idx, state.cutoffs)):
        raise ValueError(f"index {idx} outside cutoffs {state.cutoffs}")
    return complex(state.amplitudes[idx])


def _require_normalized(state: FockState) -> None:
    n2 = state.norm_squared()
    if abs(n2 - 1.0) > NORMALIZED_ATOL and abs(n2 + state.leakage - 1.0) > NORMALIZED_ATOL:
        raise ValueError(
            f"state is not normalized (norm^2={n2:.12g}, leakage={state.leakage:.3g})"
        )


def photon_number_distribution(state: FockState, mode: int) -> np.ndarray:
    """Marginal photon-number probabilities of ``mode``, n = 0..cutoff.

    The state must be normalized, either to one or to ``1 - leakage``; in the
    latter case the result sums to ``1 - leakage``.
    """
    _check_mode(state, mode)
    _require_normalized(state)
    probs = np.abs(state.amplitudes) ** 2
    other = tuple(m for m in range(state.num_modes) if m != mode)
    return probs.sum(axis=other) if other else probs


def joint_distribution(state: FockState, modes: Sequence[int]) -> np.ndarray:
    """Joint photon-number probabilities of ``modes`` (axes in the given order).

    No normalization check: unnormalized input gives unnormalized weights.
    """
    modes = [_check_mode(state, m) for m in modes]
    if len(set(modes)) != len(modes):
        raise ValueError(f"repeated modes in {modes}")
    probs = np.abs(state.amplitudes) ** 2
    other = tuple(m for m in range(state.num_modes) if m not in modes)
    marg = probs.sum(axis=other) if other else probs
    kept = [m for m in range(state.num_modes) if m in modes]
    return np.transpose(marg, [kept.index(m) for m in modes])


def to_dict(state: FockState) -> dict[str, Any]:
    flat = state.amplitudes.ravel(order="C")
    return {
        "num_modes": state.num_modes,
        "cutoffs": list(state.cutoffs),
        "linearization": "row-major",
        "amplitudes": [[float(z.real), float(z.imag)] for z in flat],
        "leakage": state.leakage,
    }


def from_dict(data: dict[str, Any]) -> FockState:
    cutoffs = _check_cutoffs(int(data["num_modes"]), data["cutoffs"])
    if data.get("linearization", "row-major") != "row-major":
        raise ValueError(f"unsupported linearization {data['linearization']!r}")
    pairs = np.asarray(data["amplitudes"], dtype=float)
    shape = tuple(c + 1 for c in cutoffs)
    if pairs.shape != (math.prod(shape), 2):
        raise ValueError(f"expected {math.prod(shape)} [re, im] pairs, got shape {pairs.shape}")
    amps = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape, order="C")
    return FockState(amps, float(data.get("leakage", 0.0)))


def to_json(state: FockState) -> str:
    return json.dumps(to_dict(state))


def from_json(text: str) -> FockState:
    return from_dict(json.loads(text))
