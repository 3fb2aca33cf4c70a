"""Truncated-Fock-space simulation of heralded single-photon sources built
from squeezed states and linear optics with photon-counting detectors."""

__version__ = "0.1.0"

from .closed_form import R_MAX
from .detection import IDEAL_DETECTOR, DetectorModel, HeraldOutcome, herald
from .fock import DegenerateStateError, FockState
from .optics import SYMMETRIC_BS, BeamSplitterSpec, TruncationWarning, apply_beamsplitter
from .schemes import (
    ThreeCopyConfig,
    optimize_herald,
    run_dsv_source,
    run_perturbed_bs,
    run_three_copy,
    squeezed_coherent_study,
    sweep,
)
from .sources import DisplaceParams, QubitAmplitudes, SqueezeParams

__all__ = [
    "BeamSplitterSpec",
    "DegenerateStateError",
    "DetectorModel",
    "DisplaceParams",
    "FockState",
    "HeraldOutcome",
    "IDEAL_DETECTOR",
    "QubitAmplitudes",
    "R_MAX",
    "SYMMETRIC_BS",
    "SqueezeParams",
    "ThreeCopyConfig",
    "TruncationWarning",
    "apply_beamsplitter",
    "herald",
    "optimize_herald",
    "run_dsv_source",
    "run_perturbed_bs",
    "run_three_copy",
    "squeezed_coherent_study",
    "sweep",
    "__version__",
]
