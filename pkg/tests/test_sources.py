import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from photon_sim.fock import photon_number_distribution
from photon_sim.sources import (
    DisplaceParams,
    QubitAmplitudes,
    SqueezeParams,
    UnvalidatedPhaseWarning,
    coherent,
    h2_null_displacement,
    hermite,
    qubit_state,
    squeezed_coherent,
    squeezed_vacuum,
    squeezed_vacuum_cutoff,
    two_mode_squeezed,
    wigner_gaussian,
)

mp.mp.dps = 40


def sv_oracle(r, varphi, n):
    """c_{2n} from the closed expansion, in high precision."""
    lam = -mp.mpf(1) / 2 * mp.expj(varphi) * mp.tanh(r)
    return complex(mp.power(lam, n) * mp.sqrt(mp.factorial(2 * n)) / mp.factorial(n) / mp.sqrt(mp.cosh(r)))


def test_squeezed_vacuum_r0_is_vacuum():
    s = squeezed_vacuum(SqueezeParams(0.0))
    assert s.amplitudes[0] == 1 and np.count_nonzero(s.amplitudes) == 1


def test_squeezed_vacuum_c0():
    c0 = squeezed_vacuum(SqueezeParams(0.36)).amplitudes[0]
    assert c0 == pytest.approx(1 / math.sqrt(math.cosh(0.36)), abs=1e-15)
    assert c0.real == pytest.approx(0.968774, abs=1e-6)


@pytest.mark.parametrize("r,varphi", [(0.36, 0.0), (0.8814, 1.1), (1.2, -2.0)])
def test_squeezed_vacuum_matches_factorial_form(r, varphi):
    s = squeezed_vacuum(SqueezeParams(r, varphi))
    want = [sv_oracle(r, varphi, n) for n in range(s.cutoffs[0] // 2 + 1)]
    assert np.allclose(s.amplitudes[0::2], want, rtol=1e-12, atol=1e-300)
    assert not s.amplitudes[1::2].any()


@given(st.floats(0.0, 1.2))
def test_squeezed_vacuum_default_cutoff_norm(r):
    s = squeezed_vacuum(SqueezeParams(r))
    assert abs(1 - s.norm_squared()) < 1e-10
    assert s.leakage < 1e-12


def test_tail_cutoff_values():
    assert squeezed_vacuum_cutoff(math.asinh(1)) == 72
    assert squeezed_vacuum_cutoff(1.2) == 140


def test_negative_squeezing_rejected():
    with pytest.raises(ValueError):
        SqueezeParams(-0.1)


def test_coherent():
    assert coherent(DisplaceParams(0)).amplitudes[0] == 1
    s = coherent(DisplaceParams(1.0))
    assert abs(s.amplitudes[0]) ** 2 == pytest.approx(math.exp(-1), abs=1e-15)
    p = np.abs(s.amplitudes) ** 2
    assert p @ np.arange(p.size) == pytest.approx(1.0, abs=1e-10)


def test_hermite():
    assert hermite(0, 0.3) == 1
    assert hermite(2, 1 / math.sqrt(2)) == pytest.approx(0, abs=1e-15)
    assert hermite(3, 2.0) == 40
    for n in range(12):
        assert hermite(n, 0.7) == pytest.approx(float(mp.hermite(n, 0.7)), rel=1e-12)


@pytest.mark.parametrize("r", [0.36, 0.81, 1.5])
def test_squeezed_coherent_h2_null(r):
    s = squeezed_coherent(SqueezeParams(r), DisplaceParams(h2_null_displacement(r)), 12)
    assert abs(s.amplitudes[2]) < 1e-15


@pytest.mark.parametrize("r,alpha", [(0.36, 0.6), (1.0, 1.3), (0.5, -0.4)])
def test_squeezed_coherent_matches_hermite_series(r, alpha):
    s = squeezed_coherent(SqueezeParams(r), DisplaceParams(alpha), 30)
    pre = mp.exp(-(mp.mpf(alpha) ** 2 - mp.mpf(alpha) ** 2 * mp.tanh(r)) / 2) / mp.sqrt(mp.cosh(r))
    x = alpha / mp.sqrt(2 * mp.cosh(r) * mp.sinh(r))
    want = [complex(pre * (mp.tanh(r) / 2) ** (mp.mpf(n) / 2) * mp.hermite(n, x) / mp.sqrt(mp.factorial(n)))
            for n in range(31)]
    assert np.allclose(s.amplitudes, want, rtol=1e-11, atol=1e-16)
    assert s.norm_squared() + s.leakage == pytest.approx(1.0, abs=1e-12)
    big = squeezed_coherent(SqueezeParams(r), DisplaceParams(alpha), 200)
    assert big.norm_squared() == pytest.approx(1.0, abs=1e-10)


def test_squeezed_coherent_large_r_is_finite():
    s = squeezed_coherent(SqueezeParams(5.0), DisplaceParams(h2_null_displacement(5.0)), 2000)
    assert np.all(np.isfinite(s.amplitudes))


def test_squeezed_coherent_single_state_content():
    # content P(1) / sum_{n>=1} P(n) against the dense state
    r = 0.36
    s = squeezed_coherent(SqueezeParams(r), DisplaceParams(h2_null_displacement(r)), 80)
    p = np.abs(s.amplitudes) ** 2
    content = p[1] / (p.sum() - p[0])
    t = math.tanh(r)
    p0 = math.exp(-math.sinh(r) * math.exp(-r)) / math.cosh(r)
    assert content == pytest.approx(p0 * t / (1 - p0), rel=1e-9)


def test_squeezed_coherent_errors():
    with pytest.raises(ValueError, match="coherent"):
        squeezed_coherent(SqueezeParams(0.0), DisplaceParams(1.0), 5)
    with pytest.raises(ValueError):
        squeezed_coherent(SqueezeParams(0.3, 0.5), DisplaceParams(1.0), 5)
    with pytest.warns(UnvalidatedPhaseWarning):
        squeezed_coherent(SqueezeParams(0.3), DisplaceParams(1.0 + 0.2j), 5)


def test_qubit_state():
    assert np.array_equal(qubit_state(QubitAmplitudes(1, 0)).amplitudes, [1, 0])
    assert np.array_equal(qubit_state(QubitAmplitudes(0, 1)).amplitudes, [0, 1])
    h = qubit_state(QubitAmplitudes(1 / math.sqrt(2), 1 / math.sqrt(2)), cutoff=3)
    assert h.norm_squared() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        QubitAmplitudes(1, 1)


def test_two_mode_squeezed():
    assert two_mode_squeezed(SqueezeParams(0.0)).amplitudes[0, 0] == 1
    s = two_mode_squeezed(SqueezeParams(0.88137))
    assert photon_number_distribution(s, 1)[1] == pytest.approx(0.25, abs=1e-6)
    off = s.amplitudes - np.diag(np.diag(s.amplitudes))
    assert not off.any()


def test_two_mode_squeezed_amplitudes():
    r, ph = 0.7, 0.4
    s = two_mode_squeezed(SqueezeParams(r, ph), 10)
    n = np.arange(11)
    want = (1j * np.exp(1j * ph) * math.tanh(r)) ** n / math.cosh(r)
    assert np.allclose(np.diag(s.amplitudes), want, rtol=1e-13)


def test_wigner_gaussian():
    assert wigner_gaussian(0, 0) == pytest.approx(2 / math.pi)
    assert wigner_gaussian(1, 1) == pytest.approx(2 / math.pi * math.exp(-1))
    x = np.linspace(-2, 2, 7)
    w = wigner_gaussian(x[:, None], x[None, :], center=(0.3, -0.1), r=0.5)
    flipped = wigner_gaussian(0.6 - x[:, None], -0.2 - x[None, :], center=(0.3, -0.1), r=0.5)
    assert np.allclose(w, flipped)
