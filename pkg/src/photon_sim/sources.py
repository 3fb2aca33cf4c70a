"""Input states: coherent, squeezed vacuum, squeezed coherent, qubit-like and
two-mode squeezed vacuum, plus the Gaussian Wigner function.

Conventions: a squeezing parameter is ``xi = r * exp(i * varphi)`` and the
single-mode squeezed vacuum is

    |xi> = cosh(r)^(-1/2) * exp(-1/2 e^{i varphi} tanh(r) a†²) |0>,

so the amplitude of |2n> is ``cosh(r)^(-1/2) (-e^{i varphi} tanh(r)/2)^n sqrt((2n)!)/n!``.
Every constructor reports the analytically missing norm² as ``leakage``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import FockState

__all__ = [
    "DEFAULT_TAIL_TOL",
    "DisplaceParams",
    "QubitAmplitudes",
    "SqueezeParams",
    "UnvalidatedPhaseWarning",
    "coherent",
    "coherent_cutoff",
    "h2_null_displacement",
    "hermite",
    "qubit_state",
    "squeezed_coherent",
    "squeezed_coherent_amplitudes",
    "squeezed_vacuum",
    "squeezed_vacuum_cutoff",
    "two_mode_squeezed",
    "two_mode_squeezed_cutoff",
    "wigner_gaussian",
]

DEFAULT_TAIL_TOL = 1e-12
_MAX_CUTOFF = 200_000


class UnvalidatedPhaseWarning(UserWarning):
    """The squeezed-coherent series is only checked for real displacement."""


@dataclass(frozen=True)
class SqueezeParams:
    r: float
    varphi: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"squeezing magnitude r must be >= 0, got {self.r}")

    @property
    def xi(self) -> complex:
        return self.r * cmath.exp(1j * self.varphi)


@dataclass(frozen=True)
class DisplaceParams:
    alpha: complex


@dataclass(frozen=True)
class QubitAmplitudes:
    """Amplitudes of alpha0 |0> + beta1 |1>."""

    alpha0: complex
    beta1: complex

    def __post_init__(self) -> None:
        n2 = abs(self.alpha0) ** 2 + abs(self.beta1) ** 2
        if abs(n2 - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {n2!r}")

    @classmethod
    def from_beta(cls, beta: float) -> "QubitAmplitudes":
        """Real amplitudes with the given beta and alpha = sqrt(1 - beta²)."""
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        return cls(math.sqrt(max(0.0, 1.0 - beta * beta)), beta)


def _leak(amps: np.ndarray) -> float:
    return max(0.0, 1.0 - math.fsum(np.abs(amps.ravel()) ** 2))


# -- squeezed vacuum ----------------------------------------------------------


def _squeezed_vacuum_even(r: float, varphi: float, n_pairs: int) -> np.ndarray:
    """Amplitudes of |0>, |2>, ..., |2 n_pairs> by the factorial-free recurrence."""
    lam = -0.5 * cmath.exp(1j * varphi) * math.tanh(r)
    c = np.empty(n_pairs + 1, dtype=np.complex128)
    c[0] = 1.0 / math.sqrt(math.cosh(r))
    for n in range(n_pairs):
        c[n + 1] = c[n] * lam * math.sqrt((2 * n + 1) * (2 * n + 2)) / (n + 1)
    return c


def squeezed_vacuum_cutoff(r: float, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest even cutoff whose discarded squeezed-vacuum weight is below ``tol``.

    Uses |c_{2n+2}|² / |c_{2n}|² < tanh²(r), which bounds the tail after
    pair index n by |c_{2n}|² tanh²r / (1 - tanh²r).
    """
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:
        return 2
    w = 1.0 / math.cosh(r)  # |c_0|²
    n = 0
    while w * t2 / (1.0 - t2) >= tol:
        w *= t2 * (2 * n + 1) / (2 * n + 2)
        n += 1
        if 2 * n > _MAX_CUTOFF:
            raise ValueError(f"squeezing r={r} needs a cutoff above {_MAX_CUTOFF}")
    return max(2, 2 * n)


def squeezed_vacuum(params: SqueezeParams, cutoff: int | None = None) -> FockState:
    """Single-mode squeezed vacuum truncated at ``cutoff`` photons."""
    if cutoff is None:
        cutoff = squeezed_vacuum_cutoff(params.r)
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[0::2] = _squeezed_vacuum_even(params.r, params.varphi, cutoff // 2)
    return FockState(amps, _leak(amps))


# -- coherent -----------------------------------------------------------------


def coherent_cutoff(alpha: complex, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest cutoff leaving less than ``tol`` of Poisson weight behind."""
    mean = abs(alpha) ** 2
    p = math.exp(-mean)
    acc = p
    n = 0
    while 1.0 - acc >= tol or n < mean:
        n += 1
        p *= mean / n
        acc += p
        if n > _MAX_CUTOFF:
            raise ValueError(f"|alpha|={abs(alpha)} needs a cutoff above {_MAX_CUTOFF}")
        if p == 0.0 and n > mean:
            break
    return max(1, n)


def coherent(params: DisplaceParams, cutoff: int | None = None) -> FockState:
    """Coherent state with amplitudes exp(-|a|²/2) a^n / sqrt(n!)."""
    alpha = complex(params.alpha)
    if cutoff is None:
        cutoff = coherent_cutoff(alpha)
    amps = np.empty(cutoff + 1, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(cutoff):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1)
    return FockState(amps, _leak(amps))


# -- squeezed coherent --------------------------------------------------------


def hermite(n: int, x: float) -> float:
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError(f"Hermite degree must be >= 0, got {n}")
    h_prev, h = 1.0, 2.0 * x
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


def h2_null_displacement(r: float) -> float:
    """Displacement that zeroes the |2> amplitude: alpha = sqrt(sinh(2r)/2)."""
    return math.sqrt(math.sinh(2.0 * r) / 2.0)


def squeezed_coherent_amplitudes(r: float, alpha: complex, cutoff: int) -> np.ndarray:
    """Amplitudes of

        exp[-(|a|² - a² tanh r)/2] / sqrt(cosh r)
            * sum_n (tanh(r)/2)^(n/2) H_n(a / sqrt(sinh 2r)) / sqrt(n!) |n>

    for n = 0..cutoff.  The scaled Hermite terms
    u_n = (tanh(r)/2)^(n/2) H_n(x) / sqrt(n!) obey
    u_{n+1} = (2 s x u_n - 2 s² sqrt(n) u_{n-1}) / sqrt(n + 1), s = sqrt(tanh(r)/2);
    the running magnitude is pulled into a log scale whenever it grows large.
    """
    if r <= 0:
        raise ValueError("squeezed_coherent needs r > 0; use coherent() for r = 0")
    s = math.sqrt(math.tanh(r) / 2.0)
    x = alpha / math.sqrt(math.sinh(2.0 * r))
    log_pre = -0.5 * (abs(alpha) ** 2 - alpha * alpha * math.tanh(r)) - 0.5 * math.log(math.cosh(r))

    u = np.empty(cutoff + 1, dtype=np.complex128)
    log_scale = np.zeros(cutoff + 1)
    u_prev, u_cur, scale = 0.0 + 0j, 1.0 + 0j, 0.0
    u[0] = u_cur
    for n in range(cutoff):
        u_prev, u_cur = u_cur, (2 * s * x * u_cur - 2 * s * s * math.sqrt(n) * u_prev) / math.sqrt(n + 1)
        mag = abs(u_cur)
        if mag > 1e150:
            u_prev /= mag
            u_cur /= mag
            scale += math.log(mag)
        u[n + 1] = u_cur
        log_scale[n + 1] = scale
    return u * np.exp(log_pre + log_scale)


def squeezed_coherent(sq: SqueezeParams, disp: DisplaceParams, cutoff: int) -> FockState:
    """Displaced squeezed state from the Hermite series above.

    Only real displacement with ``varphi = 0`` has been validated; complex
    displacement triggers ``UnvalidatedPhaseWarning`` and a nonzero squeezing
    phase is rejected because the series carries no dependence on it.
    """
    if sq.r <= 0:
        raise ValueError("squeezed_coherent needs r > 0; use coherent() for r = 0")
    if sq.varphi != 0.0:
        raise ValueError("squeezed_coherent supports only varphi = 0")
    alpha = complex(disp.alpha)
    if alpha.imag != 0.0:
        warnings.warn(
            "squeezed_coherent is validated only for real displacement",
            UnvalidatedPhaseWarning,
            stacklevel=2,
        )
    amps = squeezed_coherent_amplitudes(sq.r, alpha, cutoff)
    return FockState(amps, _leak(amps))


# -- qubit-like and two-mode states -------------------------------------------


def qubit_state(q: QubitAmplitudes, cutoff: int = 1) -> FockState:
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[0], amps[1] = q.alpha0, q.beta1
    return FockState(amps)


def two_mode_squeezed_cutoff(r: float, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Per-mode cutoff N with tanh(r)^(2(N+1)) < tol."""
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:
        return 1
    return max(1, math.ceil(math.log(tol) / math.log(t2)))


def two_mode_squeezed(sq: SqueezeParams, cutoff: int | None = None) -> FockState:
    """(1/cosh r) exp[i e^{i varphi} tanh(r) a1† a2†] |00>, populated on |n, n> only."""
    if cutoff is None:
        cutoff = two_mode_squeezed_cutoff(sq.r)
    lam = 1j * cmath.exp(1j * sq.varphi) * math.tanh(sq.r)
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    diag = np.empty(cutoff + 1, dtype=np.complex128)
    diag[0] = 1.0 / math.cosh(sq.r)
    for n in range(cutoff):
        diag[n + 1] = diag[n] * lam
    amps[np.arange(cutoff + 1), np.arange(cutoff + 1)] = diag
    return FockState(amps, _leak(amps))


def wigner_gaussian(x1, x2, center=(0.0, 0.0), r: float = 0.0):
    """W = (2/pi) exp(-((x1 - X1)² e^{-2r} + (x2 - X2)² e^{2r}) / 2).

    r = 0 is the coherent-state Wigner function.  Accepts scalars or arrays.
    """
    d1 = np.asarray(x1, dtype=float) - center[0]
    d2 = np.asarray(x2, dtype=float) - center[1]
    w = (2.0 / math.pi) * np.exp(-0.5 * (d1**2 * math.exp(-2.0 * r) + d2**2 * math.exp(2.0 * r)))
    return float(w) if w.ndim == 0 else w
