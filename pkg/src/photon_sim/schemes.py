"""Experiment drivers: the three-copy heralding circuit, the two-squeezer
single-photon source (ideal, lossy, dark-count and perturbed-splitter
variants), herald-probability optimization and parameter sweeps.

Mode numbering is zero-based throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import closed_form as cf
from .detection import (
    DEGENERATE_PROB,
    IDEAL_DETECTOR,
    DetectorModel,
    HeraldOutcome,
    herald,
    single_click_povm,
)
from .fock import FockState, joint_distribution, tensor
from .optics import BeamSplitterSpec, apply_beamsplitter, bs_matrix
from .sources import (
    QubitAmplitudes,
    SqueezeParams,
    h2_null_displacement,
    qubit_state,
    squeezed_vacuum,
    squeezed_vacuum_cutoff,
)

__all__ = [
    "LEAKAGE_BOUND",
    "OPTIMAL_THREE_COPY_PHASES",
    "SourceResult",
    "SweepResult",
    "ThreeCopyConfig",
    "ThreeCopyLayout",
    "apply_three_copy_circuit",
    "default_grid",
    "max_three_copy_probability",
    "optimize_herald",
    "resolve_three_copy_layout",
    "run_dsv_source",
    "run_perturbed_bs",
    "run_three_copy",
    "squeezed_coherent_study",
    "sweep",
    "three_copy_squeezed_coherent_output",
]

# Numerical contract: experiment outputs must have leaked less than this.
LEAKAGE_BOUND = 1e-10

SWEEP_KINDS = ("eta", "dark", "perturbed")


# ---------------------------------------------------------------------------
# Three copies of alpha|0> + beta|1>
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreeCopyLayout:
    """Which modes each splitter of the three-copy circuit acts on (zero-based)."""

    first: tuple[int, int]  # splitter (theta, phi), applied first
    second: tuple[int, int]  # splitter (mu, nu), applied second

    def describe(self) -> str:
        a, b = self.first
        c, d = self.second
        return (
            f"BS(theta, phi) on modes ({a + 1},{b + 1}) then "
            f"BS(mu, nu) on modes ({c + 1},{d + 1}); herald 2 photons in mode 2, 0 in mode 3"
        )


_CANDIDATE_LAYOUTS = tuple(
    ThreeCopyLayout(first, second)
    for first in ((1, 2), (0, 1), (0, 2))
    for second in ((0, 1), (1, 2), (0, 2))
    if first != second
)


def _apply_layout(state: FockState, layout: ThreeCopyLayout, theta, phi, mu, nu) -> FockState:
    state = apply_beamsplitter(state, *layout.first, BeamSplitterSpec(theta, phi))
    return apply_beamsplitter(state, *layout.second, BeamSplitterSpec(mu, nu))


@lru_cache(maxsize=1)
def resolve_three_copy_layout() -> ThreeCopyLayout:
    """Pick the mode assignment under which the analytic angles cancel the |0> term.

    Each candidate is simulated at a few generic phases with alpha = beta; the
    unique survivor is returned.
    """
    rng = np.random.default_rng(20240601)
    phases = rng.uniform(0.3, 2.8, size=(4, 2))
    q = qubit_state(QubitAmplitudes(1 / math.sqrt(2), 1 / math.sqrt(2)), cutoff=3)
    psi = tensor(tensor(q, q), q)
    good = []
    for layout in _CANDIDATE_LAYOUTS:
        worst = 0.0
        for phi, nu in phases:
            theta, mu = cf.three_copy_angles(phi, nu)
            out = _apply_layout(psi, layout, theta, phi, mu, nu)
            worst = max(worst, abs(out.amplitudes[0, 2, 0]))
        if worst < 1e-12:
            good.append(layout)
    if len(good) != 1:
        raise RuntimeError(f"expected exactly one consistent layout, found {good}")
    return good[0]


@dataclass(frozen=True)
class ThreeCopyConfig:
    """Phases of both splitters; the angles follow from the |0>-cancelling condition."""

    qubit: QubitAmplitudes
    phi: float
    nu: float
    theta: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self) -> None:
        theta, mu = cf.three_copy_angles(self.phi, self.nu)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "mu", mu)
        c0, _ = cf.three_copy_coefficients(1.0, 1.0, theta, self.phi, mu, self.nu)
        if abs(c0) > 1e-10:
            raise ValueError(f"derived angles leave a |0> coefficient of {abs(c0):.3g}")

    def metadata(self) -> dict[str, Any]:
        return {
            "phi": self.phi,
            "nu": self.nu,
            "theta": self.theta,
            "mu": self.mu,
            "alpha": complex(self.qubit.alpha0).real,
            "beta": complex(self.qubit.beta1).real,
            "layout": resolve_three_copy_layout().describe(),
        }


# (phi, nu) that maximise the herald probability: theta = pi/4 and sin²mu = 7/9,
# reached for cos²nu = 1/28, phi = pi - 2 nu.
_NU_OPT = math.acos(1.0 / math.sqrt(28.0))
OPTIMAL_THREE_COPY_PHASES = (math.pi - 2.0 * _NU_OPT, _NU_OPT)


def apply_three_copy_circuit(state: FockState, config: ThreeCopyConfig) -> FockState:
    return _apply_layout(
        state, resolve_three_copy_layout(), config.theta, config.phi, config.mu, config.nu
    )


def run_three_copy(config: ThreeCopyConfig, cutoff: int = 3) -> HeraldOutcome:
    """Send three copies of the qubit state through both splitters and herald
    two photons in mode 1 and none in mode 2 (output on mode 0)."""
    q = qubit_state(config.qubit, cutoff=cutoff)
    psi = apply_three_copy_circuit(tensor(tensor(q, q), q), config)
    return herald(psi, {1: 2, 2: 0}, output_mode=0)


def max_three_copy_probability(
    beta: float = 1.0, points: int = 91, polish: bool = True
) -> dict[str, float]:
    """Brute-force maximum of the three-copy herald probability over (phi, nu).

    A ``points`` x ``points`` grid over (0, 2 pi)² with singular phases skipped,
    optionally refined with Nelder-Mead inside the best grid cell.
    """
    qubit = QubitAmplitudes.from_beta(beta)

    def prob(phi: float, nu: float) -> float:
        try:
            cfg = ThreeCopyConfig(qubit, phi, nu)
        except ValueError:
            return 0.0
        return run_three_copy(cfg).probability

    grid = np.linspace(0.0, 2.0 * math.pi, points, endpoint=False) + math.pi / points
    best, best_at = -1.0, (math.nan, math.nan)
    for phi in grid:
        for nu in grid:
            p = prob(phi, nu)
            if p > best:
                best, best_at = p, (phi, nu)
    best_at = (float(best_at[0]), float(best_at[1]))
    result = {"beta": beta, "grid_max": best, "grid_phi": best_at[0], "grid_nu": best_at[1]}
    if polish:
        h = 2.0 * math.pi / points
        res = minimize(lambda v: -prob(*v), np.array(best_at), method="Nelder-Mead",
                       bounds=[(best_at[0] - h, best_at[0] + h), (best_at[1] - h, best_at[1] + h)],
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        result.update(max=-float(res.fun), phi=float(res.x[0]), nu=float(res.x[1]))
    else:
        result.update(max=best, phi=best_at[0], nu=best_at[1])
    return result


def _three_copy_transfer(config: ThreeCopyConfig) -> np.ndarray:
    """Overall 3x3 mode transformation M with a_l† -> sum_k M[k, l] a_k†."""
    layout = resolve_three_copy_layout()
    total = np.eye(3, dtype=np.complex128)
    for modes, (t, p) in ((layout.first, (config.theta, config.phi)),
                          (layout.second, (config.mu, config.nu))):
        e = np.eye(3, dtype=np.complex128)
        e[np.ix_(modes, modes)] = bs_matrix(BeamSplitterSpec(t, p))
        total = e @ total
    return total


def three_copy_squeezed_coherent_output(
    r: float, alpha: float, config: ThreeCopyConfig, rtol: float = 1e-16, max_photons: int = 2_000_000
) -> np.ndarray:
    """Joint amplitudes of |k, 2, 0> for three squeezed coherent inputs, k = 0, 1, ...

    Each input is pre * exp(2 s x a† - s² a†²)|0> with s = sqrt(tanh(r)/2) and
    x = alpha / sqrt(sinh 2r), so the circuit output is a Gaussian polynomial
    generating function; its a2†² coefficient at a3† = 0 is

        pre³ exp(a1 z + b11 z²) [(a2 + b12 z)²/2 + b22]

    whose Taylor coefficients follow from a two-term recurrence.  No Fock
    truncation of the inputs is involved.  The series is cut once the newest
    terms stop contributing at relative level ``rtol``.
    """
    if r <= 0:
        raise ValueError("need r > 0")
    s = math.sqrt(math.tanh(r) / 2.0)
    x = alpha / math.sqrt(math.sinh(2.0 * r))
    log_pre = -0.5 * (alpha**2 - alpha**2 * math.tanh(r)) - 0.5 * math.log(math.cosh(r))
    lin, quad = 2.0 * x * s, -s * s
    m = _three_copy_transfer(config)
    a1, a2 = lin * m[0].sum(), lin * m[1].sum()
    b11 = quad * np.sum(m[0] ** 2)
    b12 = 2.0 * quad * np.sum(m[0] * m[1])
    b22 = quad * np.sum(m[1] ** 2)
    c0, c1, c2 = a2 * a2 / 2.0 + b22, a2 * b12, b12 * b12 / 2.0
    scale = math.sqrt(2.0) * math.exp(3.0 * log_pre)

    u = [1.0 + 0j]  # u_k = sqrt(k!) [z^k] exp(a1 z + b11 z²)
    out: list[complex] = []
    total, quiet, k = 0.0, 0, 0
    while k < max_photons:
        if k >= 1:
            nxt = a1 * u[k - 1] / math.sqrt(k)
            if k >= 2:
                nxt += 2.0 * b11 * math.sqrt((k - 1) / k) * u[k - 2]
            u.append(nxt)
        amp = c0 * u[k]
        if k >= 1:
            amp += c1 * math.sqrt(k) * u[k - 1]
        if k >= 2:
            amp += c2 * math.sqrt(k * (k - 1)) * u[k - 2]
        amp *= scale
        out.append(amp)
        w = abs(amp) ** 2
        total += w
        # stop after a long run of negligible terms once the bulk has been seen
        quiet = quiet + 1 if (total > 0 and w <= rtol * total) else 0
        if quiet >= 32 and k > 4:
            break
        k += 1
    else:
        raise RuntimeError(f"three-copy series not converged after {max_photons} terms")
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Two squeezed vacua on a splitter
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SourceResult:
    """Herald statistics of the two-squeezer source (detector on mode 1)."""

    herald_prob: float
    purity: float
    output_distribution: np.ndarray | None
    joint_click: np.ndarray  # P(output has k photons and the detector clicks)
    leakage: float
    cutoff: int
    state: FockState | None = None  # heralded output for ideal detectors
    params: Mapping[str, Any] = field(default_factory=dict)

    def odd_probabilities(self, n_max: int) -> np.ndarray:
        """Joint probabilities of 2n + 1 output photons, n = 0..n_max."""
        idx = 2 * np.arange(n_max + 1) + 1
        out = np.zeros(n_max + 1)
        ok = idx < self.joint_click.size
        out[ok] = self.joint_click[idx[ok]]
        return out


@lru_cache(maxsize=16)
def _source_state(r: float, varphi: float, cutoff: int, delta1: float, delta2: float) -> FockState:
    sv = squeezed_vacuum(SqueezeParams(r, varphi), cutoff)
    bs = BeamSplitterSpec(math.pi / 4, math.pi / 2, delta1, delta2)
    return apply_beamsplitter(tensor(sv, sv), 0, 1, bs)


def _source(r, varphi, cutoff, model, delta1=0.0, delta2=0.0) -> SourceResult:
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if cutoff is None:
        cutoff = squeezed_vacuum_cutoff(r)
    psi = _source_state(float(r), float(varphi), int(cutoff), float(delta1), float(delta2))
    joint_click = joint_distribution(psi, [0, 1]) @ single_click_povm(cutoff, model)
    prob = float(joint_click.sum())
    dist = joint_click / prob if prob > DEGENERATE_PROB else None
    state = herald(psi, {1: 1}, output_mode=0).state if model == IDEAL_DETECTOR else None
    purity = float(dist[1]) if dist is not None else math.nan
    params = {"r": r, "varphi": varphi, "eta": model.eta, "p_dark": model.p_dark,
              "delta1": delta1, "delta2": delta2, "cutoff": cutoff}
    return SourceResult(prob, purity, dist, joint_click, psi.leakage, cutoff, state, params)


def run_dsv_source(
    r: float, varphi: float = 0.0, cutoff: int | None = None, model: DetectorModel = IDEAL_DETECTOR
) -> SourceResult:
    """Two identical squeezed vacua on the symmetric splitter, one click heralded on mode 1."""
    return _source(r, varphi, cutoff, model)


def run_perturbed_bs(
    r: float, varphi: float, delta1: float, delta2: float, cutoff: int | None = None
) -> SourceResult:
    """Same source with splitter angles theta -> pi/4 + delta1, phi -> pi/2 + delta2 (ideal detector)."""
    return _source(r, varphi, cutoff, IDEAL_DETECTOR, delta1, delta2)


def optimize_herald(
    r_lo: float,
    r_hi: float,
    tol: float = 1e-6,
    objective: Callable[[float], float] | None = None,
) -> tuple[float, float]:
    """Maximize the single-photon herald probability over r in [r_lo, r_hi]."""
    if not (math.isfinite(r_lo) and math.isfinite(r_hi)) or r_lo < 0 or r_hi - r_lo <= tol:
        raise ValueError(f"invalid bracket [{r_lo}, {r_hi}] for tol {tol}")
    f = objective or (lambda r: cf.herald_prob_n(r, 1))
    res = minimize_scalar(lambda r: -f(r), bounds=(r_lo, r_hi), method="bounded",
                          options={"xatol": tol})
    r_star = float(res.x)
    if min(r_star - r_lo, r_hi - r_star) <= 2 * tol:
        raise ValueError(f"maximum lies on the bracket edge at r={r_star}; widen [{r_lo}, {r_hi}]")
    return r_star, float(f(r_star))


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepResult:
    kind: str
    axes: list[str]
    grid: dict[str, list[float]]
    columns: list[str]
    rows: list[dict[str, float]]
    metadata: dict[str, Any]

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def default_grid(kind: str, points: int = 51) -> dict[str, np.ndarray]:
    if kind == "eta":
        return {"eta": np.linspace(0.0, 1.0, points)}
    if kind == "dark":
        return {"eta": np.linspace(0.0, 1.0, points), "p_dark": np.linspace(0.0, 0.1, points)}
    if kind == "perturbed":
        d = np.linspace(-0.5, 0.5, points)
        return {"delta1": d, "delta2": d.copy()}
    raise ValueError(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")


def _perturbed_row(args) -> dict[str, float]:
    r, varphi, d1, d2, cutoff = args
    res = run_perturbed_bs(r, varphi, d1, d2, cutoff)
    amps = cf.perturbed_amplitudes(r, varphi, d1, d2)
    n_cmp = 4
    num_odd = res.odd_probabilities(n_cmp)
    cf_odd = np.array([cf.perturbed_prob_n(amps, n) for n in range(n_cmp + 1)])
    cf_pur = cf.perturbed_purity(amps)
    cf_herald = abs(amps.A1) ** 2 / cf_pur
    diff = max(abs(res.purity - cf_pur), abs(res.herald_prob - cf_herald),
               float(np.max(np.abs(num_odd - cf_odd))))
    return {"delta1": d1, "delta2": d2, "herald_prob": res.herald_prob, "purity": res.purity,
            "p1": num_odd[0], "p3": num_odd[1],
            "closed_form_herald_prob": cf_herald, "closed_form_purity": cf_pur,
            "abs_diff": diff, "leakage": res.leakage}


def sweep(
    kind: str,
    grid: Mapping[str, Sequence[float]] | None = None,
    fixed_params: Mapping[str, float] | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Tabulate source metrics over an eta, (eta, p_dark) or (delta1, delta2) grid.

    Every point carries its closed-form counterpart and the absolute difference
    (the dark-count purity formula is compared in magnitude).
    """
    if kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")
    fixed = {"r": cf.R_MAX, "varphi": 0.0, **(fixed_params or {})}
    r, varphi = float(fixed["r"]), float(fixed["varphi"])
    cutoff = int(fixed["cutoff"]) if "cutoff" in fixed else squeezed_vacuum_cutoff(r)
    grid = {k: [float(v) for v in vals] for k, vals in (grid or default_grid(kind)).items()}
    for name, vals in grid.items():
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"grid axis {name!r} must be strictly increasing")

    rows: list[dict[str, float]] = []
    if kind == "eta":
        axes = ["eta"]
        for eta in grid["eta"]:
            res = run_dsv_source(r, varphi, cutoff, DetectorModel(eta, 0.0))
            ch, cp = cf.lossy_click_prob(r, eta), cf.lossy_purity(r, eta)
            pur = res.purity if res.output_distribution is not None else math.nan
            diff = abs(res.herald_prob - ch) if math.isnan(pur) else max(abs(res.herald_prob - ch), abs(pur - cp))
            rows.append({"eta": eta, "herald_prob": res.herald_prob, "purity": pur,
                         "closed_form_herald_prob": ch,
                         "closed_form_purity": cp if eta > 0 else math.nan,
                         "abs_diff": diff, "leakage": res.leakage})
    elif kind == "dark":
        axes = ["eta", "p_dark"]
        for eta in grid["eta"]:
            for pd in grid["p_dark"]:
                res = run_dsv_source(r, varphi, cutoff, DetectorModel(eta, pd))
                ch = cf.dark_click_prob_cf(r, eta, pd)
                cp = abs(cf.dark_purity_cf(r, eta, pd)) if (eta > 0 or pd > 0) else math.nan
                pur = res.purity
                diff = abs(res.herald_prob - ch) if math.isnan(pur) else max(abs(res.herald_prob - ch), abs(pur - cp))
                rows.append({"eta": eta, "p_dark": pd, "herald_prob": res.herald_prob, "purity": pur,
                             "closed_form_herald_prob": ch, "closed_form_purity": cp,
                             "abs_diff": diff, "leakage": res.leakage})
    else:
        axes = ["delta1", "delta2"]
        jobs = [(r, varphi, d1, d2, cutoff) for d1 in grid["delta1"] for d2 in grid["delta2"]]
        if workers and workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_perturbed_row, jobs, chunksize=8))
        else:
            rows = [_perturbed_row(j) for j in jobs]

    columns = list(rows[0].keys()) if rows else axes
    meta = {"r": r, "varphi": varphi, "cutoff": cutoff,
            "leakage_max": max((row["leakage"] for row in rows), default=0.0),
            "abs_diff_max": max((row["abs_diff"] for row in rows if not math.isnan(row["abs_diff"])), default=0.0)}
    return SweepResult(kind, axes, grid, columns, rows, meta)


# ---------------------------------------------------------------------------
# Squeezed coherent inputs
# ---------------------------------------------------------------------------


def squeezed_coherent_study(
    r_grid: Sequence[float], phases: tuple[float, float] = OPTIMAL_THREE_COPY_PHASES
) -> SweepResult:
    """Squeezed coherent states with the |2>-cancelling displacement, per r.

    Two readings are tabulated side by side:

    * single state: ``single_production`` = P(1) and ``single_content`` =
      P(1) / sum_{n>=1} P(n) of one squeezed coherent state;
    * three-copy: three such states replace alpha|0> + beta|1> in the
      three-copy circuit at ``phases``; ``production`` is the probability of
      the (2, 0) detection and ``content`` the probability that the heralded
      output then holds one photon.
    """
    config = ThreeCopyConfig(QubitAmplitudes(0.0, 1.0), *phases)
    rows = []
    for r in r_grid:
        r = float(r)
        alpha = h2_null_displacement(r)
        s = math.sqrt(math.tanh(r) / 2.0)
        # |c_n|² for n = 0, 1 of a single state (H_0 = 1, H_1(x) = 2x, x² = 1/2)
        pre2 = math.exp(-(alpha**2) * (1.0 - math.tanh(r))) / math.cosh(r)
        p0, p1 = pre2, pre2 * s * s * 2.0
        amps = three_copy_squeezed_coherent_output(r, alpha, config)
        w = np.abs(amps) ** 2
        prod = float(w.sum())
        rows.append({"r": r, "alpha": alpha, "single_p0": p0, "single_production": p1,
                     "single_content": p1 / (1.0 - p0), "production": prod,
                     "content": float(w[1] / prod), "output_terms": int(w.size)})
    prod = np.array([row["production"] for row in rows])
    single = np.array([row["single_production"] for row in rows])
    meta = {
        "phases": {"phi": phases[0], "nu": phases[1], "theta": config.theta, "mu": config.mu},
        "layout": resolve_three_copy_layout().describe(),
        "argmax_production_r": rows[int(np.argmax(prod))]["r"] if rows else math.nan,
        "argmax_single_production_r": rows[int(np.argmax(single))]["r"] if rows else math.nan,
    }
    cols = list(rows[0].keys()) if rows else ["r"]
    return SweepResult("squeezed-coherent", ["r"], {"r": [float(r) for r in r_grid]}, cols, rows, meta)
