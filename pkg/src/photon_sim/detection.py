"""Photon-number heralding and realistic single-click detectors.

An inefficient detector is an ideal photon counter behind a beam splitter that
lets each photon through with probability ``eta``; n incident photons then give
k counts with probability C(n, k) eta^k (1 - eta)^(n - k).  Dark counts are an
independent Bernoulli(p_dark) event OR'd with a genuine single count inside the
window, so the "one click" POVM element is

    Pi_1 = sum_n [p_dark + (1 - p_dark) n eta (1 - eta)^(n-1)] |n><n|.

All conditional quantities here are obtained by mixing that POVM over the
state's joint photon-number distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .fock import FockState, joint_distribution, normalize
from .optics import BeamSplitterSpec, apply_beamsplitter

__all__ = [
    "ClickOutcome",
    "DetectorModel",
    "HeraldOutcome",
    "IDEAL_DETECTOR",
    "attenuate",
    "click_conditioned",
    "click_given_n",
    "dark_click_prob",
    "dark_conditional_single_photon",
    "herald",
    "lossy_single_click",
    "single_click_povm",
]

# Herald probabilities at or below this are treated as "never happens".
DEGENERATE_PROB = 1e-28


@dataclass(frozen=True)
class DetectorModel:
    eta: float = 1.0
    p_dark: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eta", "p_dark"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


IDEAL_DETECTOR = DetectorModel()


@dataclass(frozen=True, eq=False)
class HeraldOutcome:
    """Result of projecting some modes onto photon counts.

    ``state`` and ``output_distribution`` are ``None`` when the outcome has
    (numerically) zero probability; check ``degenerate``.
    """

    probability: float
    state: FockState | None
    output_distribution: np.ndarray | None
    output_mode: int | None = None

    @property
    def degenerate(self) -> bool:
        return self.state is None


class ClickOutcome(NamedTuple):
    probability: float
    output_distribution: np.ndarray | None


def herald(
    state: FockState, detections: Mapping[int, int], output_mode: int | None = None
) -> HeraldOutcome:
    """Project ``detections`` (mode -> photon count) and keep the remaining modes.

    ``output_mode`` uses the input state's mode numbering and defaults to the
    lowest mode that is not detected.  In the returned ``state`` the detected
    modes are removed.
    """
    detected = {int(m): int(n) for m, n in detections.items()}
    if not detected:
        raise ValueError("need at least one detected mode")
    for m, n in detected.items():
        if not 0 <= m < state.num_modes:
            raise ValueError(f"detected mode {m} out of range for {state.num_modes} modes")
        if n < 0:
            raise ValueError(f"photon count must be >= 0, got {n} for mode {m}")
    survivors = [m for m in range(state.num_modes) if m not in detected]
    if not survivors:
        raise ValueError("every mode is detected; nothing is left to herald")
    if output_mode is None:
        output_mode = survivors[0]
    if output_mode in detected:
        raise ValueError(f"output mode {output_mode} is also a detected mode")
    if output_mode not in survivors:
        raise ValueError(f"output mode {output_mode} out of range")

    if any(n > state.cutoffs[m] for m, n in detected.items()):
        return HeraldOutcome(0.0, None, None, output_mode)
    index = tuple(detected.get(m, slice(None)) for m in range(state.num_modes))
    projected = state.amplitudes[index]
    prob = float(np.vdot(projected, projected).real)
    if prob <= DEGENERATE_PROB:
        return HeraldOutcome(prob, None, None, output_mode)

    # All leaked weight might belong to this branch, so keep it in full.
    out = normalize(FockState(projected, state.leakage))
    axis = survivors.index(output_mode)
    probs = np.abs(out.amplitudes) ** 2
    other = tuple(a for a in range(out.num_modes) if a != axis)
    dist = probs.sum(axis=other) if other else probs
    return HeraldOutcome(prob, out, dist, output_mode)


def click_given_n(n: int, k: int, model: DetectorModel) -> float:
    """Probability that n incident photons produce exactly k ideal counts."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    eta = model.eta
    return math.comb(n, k) * eta**k * (1.0 - eta) ** (n - k)


def single_click_povm(cutoff: int, model: DetectorModel) -> np.ndarray:
    """Diagonal of the one-click POVM element for n = 0..cutoff."""
    true_click = np.array(
        [click_given_n(n, 1, model) if n >= 1 else 0.0 for n in range(cutoff + 1)]
    )
    return model.p_dark + (1.0 - model.p_dark) * true_click


def _pick_output(state: FockState, mode: int, output_mode: int | None) -> int:
    if not 0 <= mode < state.num_modes:
        raise ValueError(f"mode {mode} out of range for {state.num_modes} modes")
    if output_mode is None:
        others = [m for m in range(state.num_modes) if m != mode]
        if not others:
            raise ValueError("a one-mode state has no output mode to condition")
        output_mode = others[0]
    if output_mode == mode:
        raise ValueError("output mode and detected mode must differ")
    return output_mode


def click_conditioned(
    state: FockState, mode: int, model: DetectorModel, output_mode: int | None = None
) -> ClickOutcome:
    """One-click probability on ``mode`` and the output-mode distribution given the click."""
    output_mode = _pick_output(state, mode, output_mode)
    joint = joint_distribution(state, [output_mode, mode])
    weights = joint @ single_click_povm(state.cutoffs[mode], model)
    total = float(weights.sum())
    if total <= DEGENERATE_PROB:
        return ClickOutcome(total, None)
    return ClickOutcome(total, weights / total)


def lossy_single_click(
    state: FockState, mode: int, model: DetectorModel, output_mode: int | None = None
) -> ClickOutcome:
    """Exactly-one-click probability of a dark-count-free inefficient detector,
    with the conditional photon-number distribution of ``output_mode``."""
    if model.p_dark != 0.0:
        raise ValueError("lossy_single_click expects p_dark = 0; use the dark-count functions")
    return click_conditioned(state, mode, model, output_mode)


def dark_click_prob(state: FockState, mode: int, model: DetectorModel) -> float:
    """Single-click probability p_d + (1 - p_d) <P_1> including dark counts."""
    if not 0 <= mode < state.num_modes:
        raise ValueError(f"mode {mode} out of range for {state.num_modes} modes")
    marginal = joint_distribution(state, [mode])
    return float(marginal @ single_click_povm(state.cutoffs[mode], model))


def dark_conditional_single_photon(
    state: FockState, mode: int, model: DetectorModel, output_mode: int | None = None
) -> float:
    """P(output holds exactly one photon | one click), by Bayes over the POVM.

    Returns NaN when the click never happens.
    """
    outcome = click_conditioned(state, mode, model, output_mode)
    if outcome.output_distribution is None:
        return math.nan
    dist = outcome.output_distribution
    return float(dist[1]) if dist.size > 1 else 0.0


def attenuate(state: FockState, mode: int, eta: float) -> FockState:
    """Route ``mode`` through a beam splitter of transmission ``eta``.

    A vacuum loss mode is appended as the last mode; a photon stays in ``mode``
    with probability eta and goes to the loss mode otherwise.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    cutoff = state.cutoffs[mode]
    loss_vac = np.zeros(cutoff + 1, dtype=np.complex128)
    loss_vac[0] = 1.0
    widened = FockState(np.multiply.outer(state.amplitudes, loss_vac), state.leakage)
    spec = BeamSplitterSpec(math.acos(math.sqrt(eta)), 0.0)
    return apply_beamsplitter(widened, mode, state.num_modes, spec)
