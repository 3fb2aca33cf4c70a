import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photon_sim.fock import (
    DegenerateStateError,
    FockState,
    amplitude,
    apply_annihilation,
    apply_creation,
    basis_state,
    from_dict,
    from_json,
    joint_distribution,
    norm,
    normalize,
    photon_number_distribution,
    tensor,
    to_dict,
    to_json,
    vacuum,
)


def test_vacuum_single_mode():
    v = vacuum(1, [4])
    assert amplitude(v, (0,)) == 1
    assert np.count_nonzero(v.amplitudes) == 1


def test_vacuum_two_modes_and_norm():
    assert amplitude(vacuum(2, [3, 3]), (0, 0)) == 1
    assert norm(vacuum(3, [2, 2, 2])) == 1


@pytest.mark.parametrize("modes,cutoffs", [(0, []), (1, [0]), (2, [3])])
def test_vacuum_rejects_bad_shape(modes, cutoffs):
    with pytest.raises(ValueError):
        vacuum(modes, cutoffs)


def test_creation_ladder():
    one = apply_creation(vacuum(1, [4]), 0)
    assert amplitude(one, (1,)) == 1
    two = apply_creation(one, 0)
    assert amplitude(two, (2,)) == math.sqrt(2)  # exact
    assert two.leakage == 0


def test_creation_at_cutoff_books_leakage():
    top = FockState(np.array([0, 0.6, 0.8j]))
    out = apply_creation(top, 0)
    assert np.allclose(out.amplitudes, [0, 0, 0.6 * math.sqrt(2)])
    assert out.leakage == pytest.approx(0.64)


def test_annihilation():
    out = apply_annihilation(basis_state([2], [3]), 0)
    assert amplitude(out, (1,)) == pytest.approx(math.sqrt(2))
    assert apply_annihilation(vacuum(1, [3]), 0).norm_squared() == 0


def test_tensor_of_vacua_is_vacuum():
    t = tensor(vacuum(1, [2]), vacuum(1, [2]))
    assert np.array_equal(t.amplitudes, vacuum(2, [2, 2]).amplitudes)


def test_tensor_adds_leakage():
    a = FockState(np.array([1, 0]), 0.1)
    b = FockState(np.array([1, 0]), 0.2)
    assert tensor(a, b).leakage == pytest.approx(0.3)


def test_normalize_and_amplitude():
    s = normalize(FockState(np.array([0, 2.0, 0])))
    assert amplitude(s, (1,)) == 1
    assert amplitude(basis_state([1, 0], [2, 2]), (0, 1)) == 0


def test_normalize_zero_raises():
    with pytest.raises(DegenerateStateError):
        normalize(FockState(np.zeros(3)))


def test_normalize_rescales_leakage():
    s = normalize(FockState(np.array([0.5, 0.5]), 0.1))
    assert s.leakage == pytest.approx(0.2)


def test_amplitude_index_checks():
    with pytest.raises(ValueError):
        amplitude(vacuum(2, [2, 2]), (0,))
    with pytest.raises(ValueError):
        amplitude(vacuum(2, [2, 2]), (3, 0))


def test_distribution_examples():
    assert np.allclose(photon_number_distribution(vacuum(1, [3]), 0), [1, 0, 0, 0])
    plus = FockState(np.array([1, 1, 0, 0]) / math.sqrt(2))
    assert np.allclose(photon_number_distribution(plus, 0), [0.5, 0.5, 0, 0])


def test_distribution_two_mode_squeezed():
    from photon_sim.sources import SqueezeParams, two_mode_squeezed

    p = photon_number_distribution(two_mode_squeezed(SqueezeParams(0.36)), 1)
    assert p[1] == pytest.approx(math.tanh(0.36) ** 2 / math.cosh(0.36) ** 2, abs=1e-15)
    assert p[1] == pytest.approx(0.10497, abs=5e-6)


def test_distribution_rejects_unnormalized():
    with pytest.raises(ValueError):
        photon_number_distribution(FockState(np.array([1.0, 1.0])), 0)


def test_distribution_accepts_leaky_state():
    s = FockState(np.array([math.sqrt(0.9), 0]), 0.1)
    assert photon_number_distribution(s, 0).sum() == pytest.approx(0.9)


def test_marginal_matches_direct_sum(rng):
    amps = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
    s = normalize(FockState(amps))
    probs = np.abs(s.amplitudes) ** 2
    assert np.array_equal(photon_number_distribution(s, 0), probs.sum(axis=1))
    assert np.array_equal(photon_number_distribution(s, 1), probs.sum(axis=0))
    assert np.array_equal(joint_distribution(s, [1, 0]), probs.T)


def test_state_is_immutable():
    s = vacuum(1, [2])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


def test_row_major_serialization():
    s = basis_state([0, 1], [1, 2])
    d = to_dict(s)
    assert d["linearization"] == "row-major"
    assert d["amplitudes"][1] == [1.0, 0.0]  # index (0, 1) is flat position 1


@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=3),
    st.floats(0, 1e-3),
    st.integers(0, 2**32 - 1),
)
def test_json_round_trip(cutoffs, leakage, seed):
    rng = np.random.default_rng(seed)
    shape = tuple(c + 1 for c in cutoffs)
    s = FockState(rng.normal(size=shape) + 1j * rng.normal(size=shape), leakage)
    back = from_json(to_json(s))
    assert back.cutoffs == s.cutoffs
    assert np.array_equal(back.amplitudes, s.amplitudes)
    assert back.leakage == s.leakage
    assert np.array_equal(from_dict(to_dict(s)).amplitudes, s.amplitudes)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_normalize_gives_unit_norm(seed, modes):
    rng = np.random.default_rng(seed)
    shape = (3,) * modes
    s = normalize(FockState(rng.normal(size=shape) + 1j * rng.normal(size=shape)))
    assert abs(s.norm_squared() - 1) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_creation_conserves_weight_budget(seed):
    # ||a† psi||² + leakage increment = <n + 1> restricted to the box, plus the cut-off tail
    rng = np.random.default_rng(seed)
    s = normalize(FockState(rng.normal(size=4) + 1j * rng.normal(size=4)))
    out = apply_creation(s, 0)
    p = np.abs(s.amplitudes) ** 2
    assert out.norm_squared() + out.leakage == pytest.approx(float(p[:-1] @ np.arange(1, 4)) + p[-1])
    assert out.leakage >= s.leakage
