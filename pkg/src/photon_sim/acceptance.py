"""Exit criteria of the package, runnable from pytest or ``photon-sim reproduce-all``.

Each ``criterion_N`` returns a list of ``Check`` rows: what was compared, the
reference value, the computed value, the tolerance and whether
it passed.  Nothing here loosens a tolerance to make a check pass.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import closed_form as cf
from .detection import DetectorModel
from .fock import FockState, basis_state, normalize, tensor
from .optics import (
    SYMMETRIC_BS,
    BeamSplitterSpec,
    TruncationWarning,
    apply_beamsplitter,
    apply_phase,
    bs_matrix,
)
from .schemes import (
    OPTIMAL_THREE_COPY_PHASES,
    ThreeCopyConfig,
    max_three_copy_probability,
    optimize_herald,
    run_dsv_source,
    run_perturbed_bs,
    run_three_copy,
    squeezed_coherent_study,
    three_copy_squeezed_coherent_output,
)
from .sources import (
    QubitAmplitudes,
    SqueezeParams,
    h2_null_displacement,
    squeezed_vacuum,
    squeezed_vacuum_cutoff,
    two_mode_squeezed,
)


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    reference: float | str
    computed: float | str
    tolerance: float | str
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] C{self.criterion} {self.name}: reference={_fmt(self.reference)} "
            f"computed={_fmt(self.computed)} tol={_fmt(self.tolerance)}"
            + (f"  ({self.note})" if self.note else "")
        )


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _close(crit: int, name: str, ref: float, got: float, tol: float, note: str = "") -> Check:
    return Check(crit, name, ref, got, tol, bool(abs(got - ref) <= tol), note)


def _max_check(crit: int, name: str, worst: float, tol: float, note: str = "") -> Check:
    return Check(crit, name, 0.0, worst, tol, bool(worst <= tol), note)


def criterion_1() -> list[Check]:
    """Herald law of the two-squeezer source with an ideal detector."""
    t0 = time.perf_counter()
    checks = []
    for r in (0.1, 0.36, 0.8814, 1.2):
        res = run_dsv_source(r)
        checks.append(_close(1, f"herald prob r={r} vs tanh²r/cosh²r", cf.herald_prob_n(r, 1), res.herald_prob, 1e-10))
    checks.append(_close(1, "herald prob r=0.36 (10.5%)", 0.105, run_dsv_source(0.36).herald_prob, 1e-3))
    checks.append(_close(1, "herald prob r=0.88137 (25%)", 0.25, run_dsv_source(0.88137).herald_prob, 1e-4))
    elapsed = time.perf_counter() - t0
    checks.append(Check(1, "runtime [s]", "< 1", elapsed, 1.0, elapsed < 1.0))
    return checks


def criterion_2() -> list[Check]:
    t0 = time.perf_counter()
    r_star, p_star = optimize_herald(0.5, 1.2, 1e-6)
    elapsed = time.perf_counter() - t0
    return [
        _close(2, "r* = arcsinh(1)", math.asinh(1.0), r_star, 1e-5),
        _close(2, "p* = 1/4", 0.25, p_star, 1e-6),
        Check(2, "runtime [s]", "< 1", elapsed, 1.0, elapsed < 1.0),
    ]


def criterion_3() -> list[Check]:
    """Three copies of alpha|0> + beta|1> herald exactly one photon."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    pairs = []
    while len(pairs) < 20:
        phi, nu = rng.uniform(0.0, 2.0 * math.pi, size=2)
        if abs(math.sin(phi)) > 0.05 and abs(math.sin(nu)) > 0.05:
            pairs.append((phi, nu))
    worst, min_prob = 0.0, 1.0
    delta = np.zeros(4)
    delta[1] = 1.0
    for beta in (0.2, 0.4, 0.6, 0.8, 1.0):
        for phi, nu in pairs:
            out = run_three_copy(ThreeCopyConfig(QubitAmplitudes.from_beta(beta), phi, nu))
            if out.degenerate:
                worst = math.inf
                continue
            worst = max(worst, float(np.max(np.abs(out.output_distribution - delta))))
            min_prob = min(min_prob, out.probability)
    elapsed = time.perf_counter() - t0
    zero = run_three_copy(ThreeCopyConfig(QubitAmplitudes.from_beta(0.0), *pairs[0]))
    return [
        _max_check(3, "max |P(n) - delta_n1| over 100 configs", worst, 1e-10,
                   f"smallest herald probability {min_prob:.3g}"),
        _close(3, "beta=0 herald probability", 0.0, zero.probability, 1e-15),
        Check(3, "runtime [s]", "< 10", elapsed, 10.0, elapsed < 10.0),
    ]


def criterion_4() -> list[Check]:
    r = cf.R_MAX
    res = run_dsv_source(r, model=DetectorModel(0.5))
    checks = [
        _close(4, "click prob (r*, eta=0.5) = 2/9", 2.0 / 9.0, res.herald_prob, 1e-10),
        _close(4, "purity (r*, eta=0.5) = 9/16", 9.0 / 16.0, res.purity, 1e-10),
        _close(4, "click prob vs closed form", cf.lossy_click_prob(r, 0.5), res.herald_prob, 1e-10),
        _close(4, "purity vs closed form", cf.lossy_purity(r, 0.5), res.purity, 1e-10),
    ]
    worst = 0.0
    for rr in np.linspace(0.1, 1.2, 10):
        for eta in np.linspace(0.1, 1.0, 10):
            out = run_dsv_source(float(rr), model=DetectorModel(float(eta)))
            target = eta * cf.herald_prob_n(rr, 1)
            worst = max(worst, abs(out.herald_prob * out.purity - target))
    checks.append(_max_check(4, "click x purity = eta tanh²r/cosh²r on 10x10 grid", worst, 1e-10))
    return checks


def criterion_5() -> list[Check]:
    worst11 = worst12 = 0.0
    for r in np.linspace(0.2, 1.2, 5):
        for eta in np.linspace(0.2, 1.0, 5):
            for pd in np.linspace(0.0, 0.1, 5):
                out = run_dsv_source(float(r), model=DetectorModel(float(eta), float(pd)))
                worst11 = max(worst11, abs(out.herald_prob - cf.dark_click_prob_cf(r, eta, pd)))
                worst12 = max(worst12, abs(out.purity - abs(cf.dark_purity_cf(r, eta, pd))))
    ideal = run_dsv_source(cf.R_MAX, model=DetectorModel(1.0, 0.0))
    formula = cf.dark_purity_cf(cf.R_MAX, 1.0, 0.0)
    return [
        _max_check(5, "dark click prob vs closed form (5x5x5)", worst11, 1e-10),
        _max_check(5, "|dark purity formula| vs Bayes (5x5x5)", worst12, 1e-10),
        _close(5, "Bayes purity at eta=1, p_d=0", 1.0, ideal.purity, 1e-10),
        _close(5, "closed-form dark purity at eta=1, p_d=0 (sign anomaly)", -1.0, formula, 1e-10,
               "formula carries an overall minus sign"),
    ]


def criterion_6() -> list[Check]:
    r = cf.R_MAX
    worst_pur = worst_n = 0.0
    vals = (0.0, 0.1, -0.1, 0.3, -0.3)
    for d1 in vals:
        for d2 in vals:
            res = run_perturbed_bs(r, 0.0, d1, d2)
            amps = cf.perturbed_amplitudes(r, 0.0, d1, d2)
            worst_pur = max(worst_pur, abs(res.purity - cf.perturbed_purity(amps)))
            odd = res.odd_probabilities(6)
            ref = np.array([cf.perturbed_prob_n(amps, n) for n in range(7)])
            worst_n = max(worst_n, float(np.max(np.abs(odd - ref))))
    ideal = run_perturbed_bs(r, 0.0, 0.0, 0.0)
    return [
        _max_check(6, "purity vs series (25 perturbations)", worst_pur, 1e-8),
        _max_check(6, "2n+1 photon probabilities vs series", worst_n, 1e-8),
        _close(6, "purity at delta=0", 1.0, ideal.purity, 1e-12),
    ]


def production_argmax(lo: float = 0.3, hi: float = 2.0, step: float = 0.005) -> float:
    config = ThreeCopyConfig(QubitAmplitudes(0.0, 1.0), *OPTIMAL_THREE_COPY_PHASES)

    def production(r: float) -> float:
        amps = three_copy_squeezed_coherent_output(r, h2_null_displacement(r), config)
        return float(np.sum(np.abs(amps) ** 2))

    grid = np.arange(lo, hi + step / 2, step)
    best = float(grid[int(np.argmax([production(r) for r in grid]))])
    res = minimize_scalar(lambda r: -production(r), bounds=(max(lo, best - step), min(hi, best + step)),
                          method="bounded", options={"xatol": 1e-6})
    return float(res.x)


def _single_production_argmax() -> float:
    # P(1) of one squeezed coherent state with the |2>-cancelling displacement
    def p1(r: float) -> float:
        return math.exp(-math.sinh(r) * math.exp(-r)) * math.sinh(r) / math.cosh(r) ** 2

    return float(minimize_scalar(lambda r: -p1(r), bounds=(0.3, 2.0), method="bounded",
                                 options={"xatol": 1e-8}).x)


def criterion_7() -> list[Check]:
    """Squeezed coherent inputs with the |2> term cancelled.

    Reproduced under the three-copy reading (the study's ``production`` and
    ``content`` columns).  The single-state reading is reported in the notes.
    """
    study = squeezed_coherent_study([0.36, 5.0])
    low, high = study.rows
    arg = production_argmax()
    single_arg = _single_production_argmax()
    return [
        _close(7, "content at r=0.36 (96.5%)", 0.965, low["content"], 0.005,
               f"single-state reading gives {low['single_content']:.4f}"),
        _close(7, "production at r=0.36 (1.2%)", 0.012, low["production"], 0.002,
               f"single-state reading gives {low['single_production']:.4f}"),
        _close(7, "content at r=5 (82% asymptote)", 0.82, high["content"], 0.01,
               f"single-state reading gives {high['single_content']:.4f}"),
        _close(7, "argmax of production (r=0.81)", 0.81, arg, 0.02,
               f"single-state reading peaks at r={single_arg:.4f}"),
    ]


def criterion_8() -> list[Check]:
    with warnings.catch_warnings():
        # the conservation check truncates on purpose
        warnings.simplefilter("ignore", TruncationWarning)
        return _structural_checks()


def _structural_checks() -> list[Check]:
    rng = np.random.default_rng(8)
    checks = []
    worst = 0.0
    for th, ph in rng.uniform(-math.pi, math.pi, size=(50, 2)):
        lam = bs_matrix(BeamSplitterSpec(th, ph))
        worst = max(worst, float(np.max(np.abs(lam.conj().T @ lam - np.eye(2)))))
    checks.append(_max_check(8, "beam-splitter unitarity", worst, 1e-14))

    # norm + leakage conservation on a random 3-mode state with room to spare
    amps = rng.normal(size=(7, 7, 7)) + 1j * rng.normal(size=(7, 7, 7))
    amps[4:, :, :] = 0
    amps[:, 4:, :] = 0
    amps[:, :, 4:] = 0
    psi = normalize(FockState(amps))
    worst = 0.0
    for th, ph in rng.uniform(-math.pi, math.pi, size=(10, 2)):
        out = apply_beamsplitter(psi, 0, 2, BeamSplitterSpec(th, ph))
        out = apply_phase(out, 1, th)
        out = apply_beamsplitter(out, 1, 0, BeamSplitterSpec(ph, th))
        worst = max(worst, abs(out.norm_squared() + out.leakage - 1.0))
    checks.append(_max_check(8, "norm + leakage conserved by optics", worst, 1e-10))

    # mixing exponent: amplitudes of |2,0>, |1,1>, |0,2> after the splitter
    worst = 0.0
    for (r1, f1, r2, f2, th, ph) in rng.uniform(0.1, 1.0, size=(5, 6)):
        a = squeezed_vacuum(SqueezeParams(r1, f1), 8)
        b = squeezed_vacuum(SqueezeParams(r2, f2), 8)
        spec = BeamSplitterSpec(th, ph)
        out = apply_beamsplitter(tensor(a, b), 0, 1, spec)
        c20, c11, c02 = cf.mixing_exponent(cf.squeezing_lambda(r1, f1), cf.squeezing_lambda(r2, f2), bs_matrix(spec))
        norm = 1.0 / math.sqrt(math.cosh(r1) * math.cosh(r2))
        got = np.array([out.amplitudes[2, 0], out.amplitudes[1, 1], out.amplitudes[0, 2]])
        want = norm * np.array([math.sqrt(2) * c20, c11, math.sqrt(2) * c02])
        worst = max(worst, float(np.max(np.abs(got - want))))
    checks.append(_max_check(8, "mixing-exponent coefficients", worst, 1e-10))

    # two-mode squeezed vacuum equals two squeezed vacua on the symmetric splitter
    worst = 0.0
    for r, phase in ((0.36, 0.0), (cf.R_MAX, 0.7), (1.0, -1.3)):
        n = squeezed_vacuum_cutoff(r, tol=1e-22)
        sv = squeezed_vacuum(SqueezeParams(r, phase), n)
        built = apply_beamsplitter(tensor(sv, sv), 0, 1, SYMMETRIC_BS)
        direct = two_mode_squeezed(SqueezeParams(r, phase), n)
        worst = max(worst, float(np.max(np.abs(built.amplitudes - direct.amplitudes))))
    checks.append(_max_check(8, "two-mode squeezed vacuum from splitter", worst, 1e-10))

    hom = apply_beamsplitter(basis_state((1, 1), (2, 2)), 0, 1, BeamSplitterSpec(math.pi / 4, 0.0))
    hom_sym = apply_beamsplitter(basis_state((1, 1), (2, 2)), 0, 1, SYMMETRIC_BS)
    checks.append(_max_check(8, "Hong-Ou-Mandel |1,1> amplitude", max(abs(hom.amplitudes[1, 1]), abs(hom_sym.amplitudes[1, 1])), 1e-12))
    return checks


def criterion_9() -> list[Check]:
    res = max_three_copy_probability(1.0, points=61)
    claim = cf.stated_three_copy_max(1.0)
    ok = math.isfinite(res["max"]) and res["max"] > 0
    note = (f"brute force {res['max']:.10f} at phi={res['phi']:.4f}, nu={res['nu']:.4f}; "
            f"16|beta|^3/81 = {claim:.10f}; probability scales as |beta|^6")
    return [Check(9, "max three-copy herald probability at beta=1 (reported)", claim, res["max"], "report", ok, note)]


CRITERIA: dict[int, Callable[[], list[Check]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_all(echo: Callable[[str], None] | None = print) -> list[Check]:
    checks: list[Check] = []
    for number, fn in CRITERIA.items():
        for check in fn():
            checks.append(check)
            if echo:
                echo(check.line())
    return checks
