"""EPR steering parameters, steering classes, thresholds and the QPT witness."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import optimize

from .model import GdmParams, ModelError, PhaseLabel, critical_coupling
from .supermode import (
    Branch,
    CriticalPointError,
    GaussianMoments,
    QuadraticModeProblem,
    SupermodeSpectrum,
    build_normal_problem,
    build_problem,
    diagonalize,
)

THRESHOLD = 0.5
WITNESS_EPSILON = 1e-3


class SteeringMode(enum.Enum):
    # cross-correlation enters unsquared, exactly as in the closed forms
    PAPER = "paper"
    # standard conditional-variance (Reid) form with squared covariance
    REID = "reid"


class Direction(enum.Enum):
    ATOMS_TO_PHOTONS = "atoms_to_photons"
    PHOTONS_TO_ATOMS = "photons_to_atoms"


class SteeringClass(enum.Enum):
    NO_STEERING = "NoSteering"
    ONE_WAY_PHOTONS_TO_ATOMS = "OneWayPhotonsToAtoms"
    ONE_WAY_ATOMS_TO_PHOTONS = "OneWayAtomsToPhotons"
    TWO_WAY = "TwoWay"


@dataclass(frozen=True)
class SteeringPair:
    """Steering parameters E12 (atoms steer photons) and E21 (photons steer atoms)."""

    e_atoms_to_photons: float
    e_photons_to_atoms: float
    mode: SteeringMode = SteeringMode.PAPER
    criterion_threshold: float = THRESHOLD

    def value(self, which: Direction) -> float:
        if which is Direction.ATOMS_TO_PHOTONS:
            return self.e_atoms_to_photons
        return self.e_photons_to_atoms


def steering_from_moments(m: GaussianMoments, mode: SteeringMode = SteeringMode.PAPER) -> SteeringPair:
    if m.var1 <= 0 or m.var2 <= 0:
        raise ZeroDivisionError("steering parameters need strictly positive variances")
    if mode is SteeringMode.PAPER:
        e12 = m.var1 - m.cov / m.var2
        e21 = m.var2 - m.cov / m.var1
    else:
        e12 = m.var1 - m.cov * m.cov / m.var2
        e21 = m.var2 - m.cov * m.cov / m.var1
    return SteeringPair(e12, e21, mode)


def denominators(s: SupermodeSpectrum) -> tuple[float, float]:
    """``(D_a, D_p)``: the bracketed denominators of E12 and E21."""
    total = s.omega_hi + s.omega_lo
    split = s.cos2theta * (s.omega_hi - s.omega_lo)
    return total + split, total - split


def shared_numerator(s: SupermodeSpectrum) -> float:
    hi, lo = s.omega_hi, s.omega_lo
    a = s.sin2theta * (hi - lo)
    return a * (a - 4.0 * hi * lo) + 4.0 * hi * lo


def steering_closed_form(s: SupermodeSpectrum) -> SteeringPair:
    if s.critical or s.omega_lo <= 0:
        raise CriticalPointError("steering parameters diverge at the critical point")
    d_a, d_p = denominators(s)
    if d_a == 0 or d_p == 0:
        raise CriticalPointError("degenerate steering denominator")
    num = shared_numerator(s)
    scale = 4.0 * s.omega_hi * s.omega_lo
    return SteeringPair(num / (scale * d_a), num / (scale * d_p))


def classify(pair: SteeringPair) -> SteeringClass:
    a2p = pair.e_atoms_to_photons < pair.criterion_threshold
    p2a = pair.e_photons_to_atoms < pair.criterion_threshold
    if a2p and p2a:
        return SteeringClass.TWO_WAY
    if a2p:
        return SteeringClass.ONE_WAY_ATOMS_TO_PHOTONS
    if p2a:
        return SteeringClass.ONE_WAY_PHOTONS_TO_ATOMS
    return SteeringClass.NO_STEERING


@dataclass(frozen=True)
class SteeringPoint:
    lambda_coupling: float
    phase: PhaseLabel
    problem: QuadraticModeProblem
    spectrum: SupermodeSpectrum
    pair: SteeringPair


def steering_at(
    params: GdmParams,
    lam: float,
    branch: Branch,
    phase: PhaseLabel | None = None,
) -> SteeringPoint:
    """Closed-form steering pair at coupling ``lam``.

    The phase is inferred from ``lam`` against the critical coupling unless
    given explicitly.
    """
    p = params.with_lambda(lam)
    if phase is None:
        lam_c = critical_coupling(p)
        if lam == lam_c:
            raise CriticalPointError("steering parameters diverge at lambda = lambda_c")
        phase = PhaseLabel.NORMAL if lam < lam_c else PhaseLabel.SUPERRADIANT
    problem = build_problem(p, phase)
    spectrum = diagonalize(problem, branch)
    return SteeringPoint(lam, phase, problem, spectrum, steering_closed_form(spectrum))


def find_threshold(
    params: GdmParams,
    branch: Branch,
    which: Direction,
    bracket: tuple[float, float],
    xtol: float = 1e-6,
) -> float:
    """Coupling at which the selected steering parameter crosses 1/2.

    The bracket must sit inside a single phase, since the two phases use
    different closed forms.
    """
    lo, hi = sorted(float(b) for b in bracket)
    lam_c = critical_coupling(params)
    if lo < lam_c < hi or lam_c in (lo, hi):
        raise ModelError(f"bracket [{lo}, {hi}] straddles lambda_c = {lam_c}; phases must not be mixed")
    phase = PhaseLabel.NORMAL if hi < lam_c else PhaseLabel.SUPERRADIANT

    def excess(lam: float) -> float:
        return steering_at(params, lam, branch, phase).pair.value(which) - THRESHOLD

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ModelError(f"no crossing of {which.value} through 1/2 in [{lo}, {hi}]")
    return optimize.bisect(excess, lo, hi, xtol=xtol)


@dataclass(frozen=True)
class WitnessReport:
    lambda_c: float
    epsilon: float
    branch: Branch
    e_below: SteeringPair
    e_above: SteeringPair
    jump_atoms_to_photons: float
    jump_photons_to_atoms: float
    same_formula: bool = False

    @property
    def amplitude_jumps(self) -> tuple[float, float]:
        """Jumps rescaled by sqrt(epsilon).

        Both sides diverge like 1/sqrt(|lambda - lambda_c|) because the soft
        mode's variance does; the rescaled jump converges to the mismatch of
        the two divergence amplitudes as epsilon -> 0.
        """
        r = math.sqrt(self.epsilon)
        return r * self.jump_atoms_to_photons, r * self.jump_photons_to_atoms

    @property
    def dominant(self) -> Direction:
        if self.jump_atoms_to_photons >= self.jump_photons_to_atoms:
            return Direction.ATOMS_TO_PHOTONS
        return Direction.PHOTONS_TO_ATOMS


def qpt_witness(
    params: GdmParams,
    branch: Branch,
    epsilon: float = WITNESS_EPSILON,
    same_formula: bool = False,
) -> WitnessReport:
    """Steering pairs just below and above the critical coupling.

    With ``same_formula`` the normal-phase closed form is used on both sides,
    continued past lambda_c through the magnitude of the (negative) soft
    eigenvalue.  That gives the continuity baseline: a single analytic
    expression whose jump vanishes as epsilon -> 0.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    lam_c = critical_coupling(params)
    below = steering_at(params, lam_c * (1.0 - epsilon), branch, PhaseLabel.NORMAL).pair
    lam_above = lam_c * (1.0 + epsilon)
    if same_formula:
        problem = build_normal_problem(params.with_lambda(lam_above), allow_critical=True)
        above = steering_closed_form(diagonalize(problem, branch, mirror_soft_mode=True))
    else:
        above = steering_at(params, lam_above, branch, PhaseLabel.SUPERRADIANT).pair
    return WitnessReport(
        lambda_c=lam_c,
        epsilon=epsilon,
        branch=branch,
        e_below=below,
        e_above=above,
        jump_atoms_to_photons=abs(above.e_atoms_to_photons - below.e_atoms_to_photons),
        jump_photons_to_atoms=abs(above.e_photons_to_atoms - below.e_photons_to_atoms),
        same_formula=same_formula,
    )
