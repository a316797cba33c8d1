"""Estimators: correlation terms, the Bell parameter, visibilities, and
entanglement witnesses.

Error bars are Poisson throughout: raw coincidence counts carry sqrt(N)
uncertainties, propagated to first order.  The Bell parameter uses the
combination S = |E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2)| with local bound
2 and quantum bound 2*sqrt(2).

The witness side: for any separable bipartite state the correlation
visibilities in two mutually unbiased bases on a great circle satisfy
|V1 + V2| <= 1 (and |Vx + Vy + Vz| <= 1 over three orthogonal axes).  Unlike
the postselected Bell parameter, these bounds cannot be faked by threshold
detection plus postselection, because losses independent of the settings do
not raise a visibility.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .experiment import CHSH_SETTING_NAMES, CoincidenceTable

__all__ = [
    "InsufficientDataError",
    "FringeFitError",
    "BellEstimate",
    "VisibilityEstimate",
    "WitnessResult",
    "MacroStateSummary",
    "SeparableBoundReport",
    "correlation_term",
    "chsh",
    "visibility_direct",
    "visibility_fringe_fit",
    "fit_fringe",
    "witness_two_visibilities",
    "witness_three_visibilities",
    "check_separable_bound",
]

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


class InsufficientDataError(ValueError):
    """No conclusive coincidences to estimate from."""


class FringeFitError(RuntimeError):
    """The fringe fit did not converge to a physical visibility."""


@dataclass(frozen=True)
class BellEstimate:
    e_terms: dict[str, float]
    sigma_e: dict[str, float]
    s: float
    sigma_s: float
    success_probability: float
    trials: int
    conclusive: int


@dataclass(frozen=True)
class VisibilityEstimate:
    basis: str
    v: float
    sigma_v: float
    method: str
    angle_deg: Optional[float] = None

    def __post_init__(self) -> None:
        if abs(self.v) > 1.0 + 1e-12:
            raise ValueError(f"|V| must be <= 1, got {self.v}")


@dataclass(frozen=True)
class WitnessResult:
    components: tuple[tuple[str, float], ...]
    total: float
    sigma_total: float
    violated: bool
    bound: float = 1.0

    @property
    def significance(self) -> float:
        """(total - bound) in units of sigma_total; inf when sigma is zero."""
        if self.sigma_total == 0.0:
            return math.inf if self.total != self.bound else 0.0
        return (self.total - self.bound) / self.sigma_total


def correlation_term(table: CoincidenceTable) -> tuple[float, float]:
    """E and its Poisson uncertainty from the four coincidence cells.

    E = (N[A1,B+] + N[A2,B-] - N[A1,B-] - N[A2,B+]) / T with T the cell sum;
    sigma_E = 2 sqrt(N_same N_diff / T^3).  Invariant under uniform scaling
    of the counts (it is a ratio estimator)."""
    n1p, n1m, n2p, n2m = table.cells()
    total = table.cell_sum()
    if total == 0:
        raise InsufficientDataError(
            f"setting {table.setting.name}: no conclusive coincidences"
        )
    n_same = n1p + n2m
    n_diff = n1m + n2p
    e = (n_same - n_diff) / total
    sigma = 2.0 * math.sqrt(n_same * n_diff / total**3)
    return e, sigma


def chsh(tables: Mapping[str, CoincidenceTable]) -> BellEstimate:
    """Bell parameter from the four CHSH settings.

    Success probability is the overall conclusive fraction, which is
    independent of the basis choices for this chain."""
    for name in CHSH_SETTING_NAMES:
        if name not in tables:
            raise KeyError(f"missing CHSH setting: {name}")
    e_terms: dict[str, float] = {}
    sigma_e: dict[str, float] = {}
    for name in CHSH_SETTING_NAMES:
        e_terms[name], sigma_e[name] = correlation_term(tables[name])
    s = abs(
        e_terms["a1b1"] - e_terms["a1b2"] + e_terms["a2b1"] + e_terms["a2b2"]
    )
    sigma_s = math.sqrt(sum(v**2 for v in sigma_e.values()))
    trials = sum(tables[name].trials for name in CHSH_SETTING_NAMES)
    conclusive = sum(tables[name].conclusive for name in CHSH_SETTING_NAMES)
    if s > TSIRELSON_BOUND + max(3.0 * sigma_s, 1e-9):
        warnings.warn(
            f"S = {s:.4f} exceeds the quantum bound 2*sqrt(2) beyond counting "
            "error; check the input counts",
            RuntimeWarning,
            stacklevel=2,
        )
    return BellEstimate(
        e_terms=e_terms,
        sigma_e=sigma_e,
        s=s,
        sigma_s=sigma_s,
        success_probability=conclusive / trials,
        trials=trials,
        conclusive=conclusive,
    )


def _basis_label(angle_deg: float) -> str:
    canonical = angle_deg % 90.0
    if math.isclose(canonical, 0.0, abs_tol=1e-9) or math.isclose(
        canonical, 90.0, abs_tol=1e-9
    ):
        return "(H,V)"
    if math.isclose(canonical, 45.0, abs_tol=1e-9):
        return "(+,-)"
    return f"({angle_deg:g} deg)"


def visibility_direct(table: CoincidenceTable) -> VisibilityEstimate:
    """Correlation visibility at matched bases, signed so the singlet gives
    a positive value (V = -E)."""
    a_deg = table.setting.a.degrees
    b_deg = table.setting.b.degrees
    if not math.isclose((a_deg - b_deg) % 180.0, 0.0, abs_tol=1e-6) and not math.isclose(
        (a_deg - b_deg) % 180.0, 180.0, abs_tol=1e-6
    ):
        raise ValueError(
            f"visibility needs matched bases, got A={a_deg:g} deg, B={b_deg:g} deg"
        )
    e, sigma = correlation_term(table)
    return VisibilityEstimate(
        basis=_basis_label(b_deg),
        v=-e,
        sigma_v=sigma,
        method="direct",
        angle_deg=b_deg,
    )


@dataclass(frozen=True)
class FringeFit:
    mean: float
    visibility: float
    phase: float
    sigma_visibility: float
    chi2_reduced: float


def fit_fringe(alphas: np.ndarray, counts: np.ndarray) -> FringeFit:
    """Weighted linear least squares of N(alpha) = C [1 + V cos 2(alpha - a0)].

    The model is exactly linear in (C, P, Q) on the (1, cos 2a, sin 2a)
    design, so no iterative fitting is needed.  Weights are Poisson
    (1/max(N,1)); the parameter covariance is scaled by the reduced chi^2 so
    that noiseless input yields a near-zero uncertainty."""
    alphas = np.asarray(alphas, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if alphas.shape != counts.shape or alphas.ndim != 1:
        raise ValueError("scan must be 1D (alpha, count) series")
    if alphas.shape[0] < 8:
        raise ValueError("need at least 8 scan points")
    ordered = np.sort(alphas)
    coverage = float(np.ptp(ordered) + np.max(np.diff(ordered)))
    if coverage < math.pi - 1e-9:  # periodic grid: span + largest gap
        raise ValueError("scan must span at least 180 degrees of alpha")
    if np.any(counts < 0):
        raise ValueError("counts must be nonnegative")

    design = np.column_stack(
        [np.ones_like(alphas), np.cos(2.0 * alphas), np.sin(2.0 * alphas)]
    )
    weights = 1.0 / np.maximum(counts, 1.0)
    wd = design * weights[:, None]
    normal = design.T @ wd
    rhs = wd.T @ counts
    try:
        params = np.linalg.solve(normal, rhs)
        cov = np.linalg.inv(normal)
    except np.linalg.LinAlgError as exc:
        raise FringeFitError(f"degenerate fringe design: {exc}") from exc
    c0, p, q = params
    if c0 <= 0.0:
        raise FringeFitError(f"non-positive fitted mean count {c0:g}")

    residuals = counts - design @ params
    dof = alphas.shape[0] - 3
    chi2_red = float(np.sum(weights * residuals**2) / dof)
    cov = cov * chi2_red

    amplitude = math.hypot(p, q)
    v = amplitude / c0
    if not math.isfinite(v) or abs(v) > 1.05:
        raise FringeFitError(f"fitted visibility {v:g} outside [-1.05, 1.05]")
    if amplitude > 0.0:
        grad = np.array([-v / c0, p / (amplitude * c0), q / (amplitude * c0)])
    else:
        grad = np.array([0.0, 1.0 / c0, 1.0 / c0])
    sigma_v = float(math.sqrt(max(0.0, grad @ cov @ grad)))
    phase = 0.5 * math.atan2(q, p)
    return FringeFit(
        mean=float(c0),
        visibility=float(v),
        phase=float(phase),
        sigma_visibility=sigma_v,
        chi2_reduced=chi2_red,
    )


def visibility_fringe_fit(
    scan: Sequence[tuple[float, float]],
    basis_angle_deg: Optional[float] = None,
) -> VisibilityEstimate:
    """Visibility from an interference-fringe scan of the A analyzer angle.

    `scan` holds (alpha_radians, coincidence count) pairs at a fixed B basis.
    Agrees with visibility_direct within combined errors on simulated data."""
    alphas = np.array([a for a, _ in scan], dtype=float)
    counts = np.array([c for _, c in scan], dtype=float)
    fit = fit_fringe(alphas, counts)
    v = min(abs(fit.visibility), 1.0)
    label = (
        _basis_label(basis_angle_deg) if basis_angle_deg is not None else "scan"
    )
    return VisibilityEstimate(
        basis=label,
        v=v,
        sigma_v=fit.sigma_visibility,
        method="fringe_fit",
        angle_deg=basis_angle_deg,
    )


def _check_mutually_unbiased(v1: VisibilityEstimate, v2: VisibilityEstimate) -> None:
    if v1.angle_deg is None or v2.angle_deg is None:
        return
    separation = (v1.angle_deg - v2.angle_deg) % 90.0
    if not (
        math.isclose(separation, 45.0, abs_tol=1e-6)
    ):
        raise ValueError(
            "witness bases must be mutually unbiased on the linear great "
            f"circle (45 deg apart mod 90), got {v1.angle_deg:g} and {v2.angle_deg:g}"
        )


def witness_two_visibilities(
    v1: VisibilityEstimate, v2: VisibilityEstimate
) -> WitnessResult:
    """|V1 + V2| <= 1 for separable states, over two mutually unbiased bases.

    Violation certifies entanglement of the underlying photon pair (the
    amplifier is treated as part of the detector)."""
    _check_mutually_unbiased(v1, v2)
    total = abs(v1.v + v2.v)
    sigma = math.hypot(v1.sigma_v, v2.sigma_v)
    return WitnessResult(
        components=((v1.basis, v1.v), (v2.basis, v2.v)),
        total=total,
        sigma_total=sigma,
        violated=total > 1.0,
    )


def witness_three_visibilities(
    v1: VisibilityEstimate, v2: VisibilityEstimate, v3: VisibilityEstimate
) -> WitnessResult:
    """|Vx + Vy + Vz| <= 1 for separable states, over three orthogonal axes."""
    labels = {v.basis for v in (v1, v2, v3)}
    if len(labels) != 3:
        raise ValueError(f"need three distinct axes, got {sorted(labels)}")
    total = abs(v1.v + v2.v + v3.v)
    sigma = math.sqrt(v1.sigma_v**2 + v2.sigma_v**2 + v3.sigma_v**2)
    return WitnessResult(
        components=((v1.basis, v1.v), (v2.basis, v2.v), (v3.basis, v3.v)),
        total=total,
        sigma_total=sigma,
        violated=total > 1.0,
    )


@dataclass(frozen=True)
class MacroStateSummary:
    """Collective-polarization expectations of one macro beam: the three
    Stokes-like components and the total photon number."""

    jx: float
    jy: float
    jz: float
    n: float

    def __post_init__(self) -> None:
        if not self.n > 0.0:
            raise ValueError("photon number must be positive")
        if self.j_length() > self.n * (1.0 + 1e-12):
            raise ValueError("|J| cannot exceed the photon number")

    def j_length(self) -> float:
        return math.sqrt(self.jx**2 + self.jy**2 + self.jz**2)

    def j_plane(self) -> float:
        return math.hypot(self.jx, self.jy)


@dataclass
class SeparableBoundReport:
    samples: int
    violations: int
    max_slack: float = 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _random_macro_state(rng: np.random.Generator) -> MacroStateSummary:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    n = 10.0 ** rng.uniform(0.0, 4.0)
    length = rng.random() * n
    j = length * direction
    return MacroStateSummary(jx=j[0], jy=j[1], jz=j[2], n=n)


def check_separable_bound(
    sample_count: int, rng: np.random.Generator, rel_tol: float = 1e-9
) -> SeparableBoundReport:
    """Property check of the separable-state inequality chain.

    For product macro states,
        |Jx_A Jx_B + Jy_A Jy_B| <= |P_xy J_A||P_xy J_B|
                                <= |J_A||J_B| <= N_A N_B,
    so the two-axis correlation visibility sum can never exceed one.  Random
    product states must satisfy every link exactly (up to rounding)."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    report = SeparableBoundReport(samples=sample_count, violations=0)
    for _ in range(sample_count):
        a = _random_macro_state(rng)
        b = _random_macro_state(rng)
        lhs = abs(a.jx * b.jx + a.jy * b.jy)
        plane = a.j_plane() * b.j_plane()
        full = a.j_length() * b.j_length()
        nn = a.n * b.n
        chain = (lhs, plane, full, nn)
        for low, high in zip(chain, chain[1:]):
            slack = low - high
            if slack > rel_tol * max(abs(high), 1.0):
                report.violations += 1
                report.max_slack = max(report.max_slack, slack)
                break
    return report
