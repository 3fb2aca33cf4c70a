import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photon_sim import closed_form as cf
from photon_sim.fock import FockState, basis_state, normalize, tensor
from photon_sim.optics import (
    SYMMETRIC_BS,
    BeamSplitterSpec,
    TruncationWarning,
    apply_beamsplitter,
    apply_phase,
    bs_blocks,
    bs_matrix,
)
from photon_sim.sources import SqueezeParams, squeezed_vacuum, squeezed_vacuum_cutoff, two_mode_squeezed

angles = st.floats(-math.pi, math.pi)


def routing_sum(lam, m, n, cut):
    """<p, q| U |m, n> by expanding (L11 a1† + L21 a2†)^m (L12 a1† + L22 a2†)^n."""
    out = np.zeros((cut + 1, cut + 1), dtype=complex)
    for j in range(m + 1):
        for k in range(n + 1):
            p, q = j + k, m + n - j - k
            c = (math.comb(m, j) * math.comb(n, k) * lam[0, 0] ** j * lam[1, 0] ** (m - j)
                 * lam[0, 1] ** k * lam[1, 1] ** (n - k))
            out[p, q] += c * math.sqrt(math.factorial(p) * math.factorial(q)
                                       / (math.factorial(m) * math.factorial(n)))
    return out


def random_state(rng, shape, fill):
    amps = np.zeros(shape, dtype=complex)
    box = tuple(slice(0, f) for f in fill)
    amps[box] = rng.normal(size=fill) + 1j * rng.normal(size=fill)
    return normalize(FockState(amps))


def test_bs_matrix_identity_and_symmetric():
    assert np.allclose(bs_matrix(BeamSplitterSpec(0, 1.3)), np.eye(2))
    s = 1 / math.sqrt(2)
    assert np.allclose(bs_matrix(SYMMETRIC_BS), [[s, -1j * s], [-1j * s, s]], atol=1e-16)


@given(angles, angles)
def test_bs_matrix_unitary(theta, phi):
    lam = bs_matrix(BeamSplitterSpec(theta, phi))
    assert np.max(np.abs(lam.conj().T @ lam - np.eye(2))) < 1e-14


@given(angles, angles, st.integers(0, 6), st.integers(0, 6))
def test_blocks_match_routing_sum(theta, phi, m, n):
    spec = BeamSplitterSpec(theta, phi)
    cut = 6
    out = apply_beamsplitter(basis_state([m, n], [2 * cut, 2 * cut]), 0, 1, spec)
    want = routing_sum(bs_matrix(spec), m, n, 2 * cut)
    assert np.max(np.abs(out.amplitudes - want)) < 1e-12


def test_blocks_unitary_at_large_cutoff():
    for blk in bs_blocks(BeamSplitterSpec(0.7, 0.3), 140, 140)[:141]:
        assert np.max(np.abs(blk.conj().T @ blk - np.eye(blk.shape[0]))) < 1e-12


def test_single_photon_on_symmetric_bs():
    out = apply_beamsplitter(basis_state([1, 0], [2, 2]), 0, 1, SYMMETRIC_BS)
    want = np.zeros((3, 3), dtype=complex)
    want[1, 0], want[0, 1] = 1 / math.sqrt(2), -1j / math.sqrt(2)
    assert np.allclose(out.amplitudes, want, atol=1e-16)


@pytest.mark.parametrize("spec", [SYMMETRIC_BS, BeamSplitterSpec(math.pi / 4, 0.0), BeamSplitterSpec(-math.pi / 4, 2.0)])
def test_hong_ou_mandel(spec):
    out = apply_beamsplitter(basis_state([1, 1], [2, 2]), 0, 1, spec)
    assert abs(out.amplitudes[1, 1]) < 1e-12
    assert abs(out.amplitudes[2, 0]) ** 2 == pytest.approx(0.5)


def test_identity_spec(rng):
    s = random_state(rng, (5, 5), (3, 3))
    assert np.allclose(apply_beamsplitter(s, 0, 1, BeamSplitterSpec(0, 0.4)).amplitudes, s.amplitudes)


@given(angles, angles, st.integers(0, 2**32 - 1))
def test_norm_preserved_and_inverse(theta, phi, seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, (7, 7, 3), (4, 4, 3))  # total photons in the pair <= 6 fits the box
    spec = BeamSplitterSpec(theta, phi)
    out = apply_beamsplitter(s, 0, 1, spec)
    assert abs(out.norm_squared() - 1) < 1e-10 and out.leakage < 1e-10
    back = apply_beamsplitter(out, 0, 1, spec.inverse())
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-10


@given(angles, angles, st.integers(0, 2**32 - 1))
def test_norm_plus_leakage_conserved_when_truncating(theta, phi, seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, (4, 4), (4, 4))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        out = apply_beamsplitter(s, 1, 0, BeamSplitterSpec(theta, phi))
    assert out.norm_squared() + out.leakage == pytest.approx(1.0, abs=1e-10)


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        apply_beamsplitter(basis_state([2, 2], [2, 2]), 0, 1, SYMMETRIC_BS)


def test_modes_validated():
    s = basis_state([0, 0], [1, 1])
    with pytest.raises(ValueError):
        apply_beamsplitter(s, 0, 0, SYMMETRIC_BS)
    with pytest.raises(ValueError):
        apply_beamsplitter(s, 0, 2, SYMMETRIC_BS)


def test_mode_order_matters_like_the_matrix():
    # swapping the roles of the two modes is the transposed routing
    s = basis_state([1, 0, 0], [1, 1, 1])
    out = apply_beamsplitter(s, 2, 0, BeamSplitterSpec(0.3, 0.9))
    lam = bs_matrix(BeamSplitterSpec(0.3, 0.9))
    assert out.amplitudes[0, 0, 1] == pytest.approx(lam[0, 1])
    assert out.amplitudes[1, 0, 0] == pytest.approx(lam[1, 1])


def test_phase():
    s = basis_state([1], [2])
    assert np.allclose(apply_phase(s, 0, math.pi).amplitudes, [0, -1, 0])
    assert np.array_equal(apply_phase(s, 0, 0.0).amplitudes, s.amplitudes)
    assert apply_phase(normalize(FockState(np.ones(4))), 0, 0.7).norm_squared() == pytest.approx(1.0)


@given(st.floats(0.05, 1.0), angles, st.floats(0.05, 1.0), angles, angles, angles)
def test_mixing_exponent_coefficients(r1, f1, r2, f2, theta, phi):
    a, b = squeezed_vacuum(SqueezeParams(r1, f1), 6), squeezed_vacuum(SqueezeParams(r2, f2), 6)
    spec = BeamSplitterSpec(theta, phi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        out = apply_beamsplitter(tensor(a, b), 0, 1, spec)
    c20, c11, c02 = cf.mixing_exponent(cf.squeezing_lambda(r1, f1), cf.squeezing_lambda(r2, f2), bs_matrix(spec))
    n = 1 / math.sqrt(math.cosh(r1) * math.cosh(r2))
    got = [out.amplitudes[2, 0], out.amplitudes[1, 1], out.amplitudes[0, 2]]
    assert np.allclose(got, [n * math.sqrt(2) * c20, n * c11, n * math.sqrt(2) * c02], atol=1e-12)


@pytest.mark.parametrize("r,varphi", [(0.36, 0.0), (math.asinh(1), 0.5)])
def test_two_mode_squeezed_from_splitter(r, varphi):
    n = squeezed_vacuum_cutoff(r, tol=1e-22)
    sv = squeezed_vacuum(SqueezeParams(r, varphi), n)
    built = apply_beamsplitter(tensor(sv, sv), 0, 1, SYMMETRIC_BS)
    assert np.max(np.abs(built.amplitudes - two_mode_squeezed(SqueezeParams(r, varphi), n).amplitudes)) < 1e-10


def test_block_cache_returns_read_only():
    blk = bs_blocks(SYMMETRIC_BS, 3, 3)[2]
    with pytest.raises(ValueError):
        blk[0, 0] = 0
