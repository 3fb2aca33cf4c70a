"""Closed-form expressions used as oracles for the Fock-space simulation.

Formulas are transcribed verbatim, signs included.  In particular
``dark_purity_cf`` carries an overall minus sign relative to the physical
conditional probability, so callers compare it in absolute value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "R_MAX",
    "PerturbedBsAmplitudes",
    "dark_click_prob_cf",
    "dark_purity_cf",
    "herald_prob_n",
    "lossy_click_prob",
    "lossy_purity",
    "mixing_exponent",
    "stated_three_copy_max",
    "perturbed_amplitudes",
    "perturbed_prob_n",
    "perturbed_purity",
    "squeezing_lambda",
    "three_copy_angles",
    "three_copy_coefficients",
]

# argmax of tanh²r / cosh²r: tanh²r = 1/2, i.e. sinh r = 1
R_MAX = math.asinh(1.0)

_SERIES_RTOL = 1e-16
_SINGULAR_ATOL = 1e-9


def herald_prob_n(r: float, n: int) -> float:
    """Probability of n photons in one arm of a two-mode squeezed vacuum."""
    if r < 0 or n < 0:
        raise ValueError("need r >= 0 and n >= 0")
    return math.tanh(r) ** (2 * n) / math.cosh(r) ** 2


def _d(r: float, eta: float) -> float:
    return 2.0 - eta + eta * math.cosh(2.0 * r)


def lossy_click_prob(r: float, eta: float) -> float:
    return 4.0 * eta * math.sinh(r) ** 2 / _d(r, eta) ** 2


def lossy_purity(r: float, eta: float) -> float:
    return _d(r, eta) ** 2 / (4.0 * math.cosh(r) ** 4)


def dark_click_prob_cf(r: float, eta: float, p_d: float) -> float:
    d = _d(r, eta)
    return p_d + 4.0 * (p_d - 1.0) / d**2 - 2.0 * (p_d - 1.0) / d


def dark_purity_cf(r: float, eta: float, p_d: float) -> float:
    """Conditional single-photon probability with dark counts, sign kept as stated.

    Evaluates to -1 at eta = 1, p_d = 0.
    """
    c2 = math.cosh(2.0 * r)
    num = (p_d * (eta - 1.0) - eta) * _d(r, eta) ** 2 * math.tanh(r) ** 2 / math.cosh(r) ** 2
    den = (
        p_d * (4.0 + (eta - 2.0) * eta)
        - 2.0 * eta
        + eta * c2 * (2.0 - 2.0 * p_d * (eta - 1.0) + p_d * eta * c2)
    )
    return num / den


@dataclass(frozen=True)
class PerturbedBsAmplitudes:
    """Heralded output A1 a† exp(B1 a†²)|0> behind a perturbed symmetric splitter."""

    A1: complex
    B1: complex


def perturbed_amplitudes(r: float, varphi: float, delta1: float, delta2: float) -> PerturbedBsAmplitudes:
    ph = cmath.exp(1j * varphi)
    t = math.tanh(r)
    c, s = math.cos(delta1), math.sin(delta1)
    a1 = (
        1j * ph * t / (2.0 * math.cosh(r))
        * (c * c - s * s)
        * (cmath.exp(-1j * delta2) + cmath.exp(1j * delta2))
    )
    b1 = -0.25 * ph * t * ((c - s) ** 2 - cmath.exp(2j * delta2) * (c + s) ** 2)
    return PerturbedBsAmplitudes(complex(a1), complex(b1))


def _log_odd_weight(n: int) -> float:
    """log((2n+1)! / (n!)²)."""
    return math.lgamma(2 * n + 2) - 2.0 * math.lgamma(n + 1)


def perturbed_purity(amps: PerturbedBsAmplitudes) -> float:
    """1 / sum_n (2n+1)!/(n!)² |B1|^(2n); diverges for |B1| >= 1/2."""
    b2 = abs(amps.B1) ** 2
    if 4.0 * b2 >= 1.0:
        raise ValueError(f"series diverges for |B1| = {math.sqrt(b2):.6g} >= 1/2")
    total, term, n = 1.0, 1.0, 0
    while term > _SERIES_RTOL * total:
        term *= b2 * (2 * n + 3) * (2 * n + 2) / (n + 1) ** 2
        total += term
        n += 1
    return 1.0 / total


def perturbed_prob_n(amps: PerturbedBsAmplitudes, n: int) -> float:
    """Joint probability of the herald and 2n + 1 photons in the output mode."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    a2, b2 = abs(amps.A1) ** 2, abs(amps.B1) ** 2
    if a2 == 0.0:
        return 0.0
    if n == 0:
        return a2
    if b2 == 0.0:
        return 0.0
    return math.exp(_log_odd_weight(n) + n * math.log(b2) + math.log(a2))


def squeezing_lambda(r: float, varphi: float = 0.0) -> complex:
    """Exponent coefficient -1/2 e^{i varphi} tanh r of a squeezed vacuum."""
    return -0.5 * cmath.exp(1j * varphi) * math.tanh(r)


def mixing_exponent(lam1: complex, lam2: complex, bs: np.ndarray) -> tuple[complex, complex, complex]:
    """Coefficients of a1†², a1†a2†, a2†² after mixing two squeezed vacua."""
    L = bs
    return (
        lam1 * L[0, 0] ** 2 + lam2 * L[0, 1] ** 2,
        2.0 * (lam1 * L[0, 0] * L[1, 0] + lam2 * L[0, 1] * L[1, 1]),
        lam1 * L[1, 0] ** 2 + lam2 * L[1, 1] ** 2,
    )


def three_copy_angles(phi: float, nu: float) -> tuple[float, float]:
    """Splitter angles (theta, mu) that cancel the |0> term of the three-copy herald.

    theta = arctan(sin(nu + phi) / sin nu),
    mu = -arctan(sin(nu + phi) |sin nu| / (sin phi sqrt(sin²nu + sin²(phi + nu)))).

    The absolute value matters: with plain sin nu the |0> term survives
    whenever sin nu < 0.
    """
    s_nu, s_phi, s_sum = math.sin(nu), math.sin(phi), math.sin(nu + phi)
    if abs(s_nu) < _SINGULAR_ATOL:
        raise ValueError(f"sin(nu) vanishes at nu={nu}: theta is undefined")
    root = math.sqrt(s_nu**2 + s_sum**2)
    if abs(s_phi) < _SINGULAR_ATOL:
        raise ValueError(f"sin(phi) vanishes at phi={phi}: mu is undefined")
    theta = math.atan(s_sum / s_nu)
    mu = -math.atan(s_sum * abs(s_nu) / (s_phi * root))
    return theta, mu


def three_copy_coefficients(
    alpha: complex, beta: complex, theta: float, phi: float, mu: float, nu: float
) -> tuple[complex, complex]:
    """Coefficients of |0> and |1> in mode 1 after detecting 2 and 0 photons.

    The first splitter (theta, phi) mixes modes 2 and 3, the second (mu, nu)
    mixes modes 1 and 2.  These are coefficients of a1†^k a2†² in the output
    polynomial; Fock amplitudes carry a further sqrt(2 k!).
    """
    L22 = math.cos(theta)
    L23 = -cmath.exp(1j * phi) * math.sin(theta)
    P11 = math.cos(mu)
    P12 = -cmath.exp(1j * nu) * math.sin(mu)
    P21 = cmath.exp(-1j * nu) * math.sin(mu)
    P22 = math.cos(mu)
    c0 = beta**2 * P22 * alpha * (L23 * P21 + L22 * (P21 + L23 * P22))
    c1 = beta**2 * P22 * beta * L22 * L23 * (2.0 * P12 * P21 + P11 * P22)
    return complex(c0), complex(c1)


def stated_three_copy_max(beta: complex) -> float:
    """The stated maximum "2", "0" detection probability, 16|beta|³/81 (exponent unverified; the computed maximum scales as |beta|^6)."""
    return 16.0 * abs(beta) ** 3 / 81.0
