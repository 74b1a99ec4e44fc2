"""Two-mode quadratic problems, their super-mode diagonalization and Gaussian moments.

Both phases reduce to

    H = p1^2/2 + stiffness1 x1^2/2 + p2^2/2 + stiffness2 x2^2/2
        + cross x1 x2 + drive x1

with quadratures x = (b + b^dag)/sqrt(2 omega) scaled by the bare mode
frequencies ``omega_a`` and ``omega_b``.  The potential matrix is
``[[stiffness1, cross], [cross, stiffness2]]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (
    GdmParams,
    ModelError,
    PhaseLabel,
    SuperradiantCoeffs,
    UnstableModeError,
    critical_coupling,
    effective_frequencies,
    mean_fields,
    superradiant_coeffs,
)

CRITICAL_TOL = 1e-10


class CriticalPointError(ModelError):
    """The soft super-mode frequency vanishes (or is imaginary)."""


class Branch(enum.Enum):
    """Sign choice of sin(2 theta)."""

    SIN_POSITIVE = 1
    SIN_NEGATIVE = -1

    @property
    def sign(self) -> int:
        return self.value

    def flipped(self) -> "Branch":
        return Branch.SIN_NEGATIVE if self is Branch.SIN_POSITIVE else Branch.SIN_POSITIVE

    @classmethod
    def parse(cls, text: str) -> "Branch":
        key = text.strip().lower()
        if key in ("pos", "+", "positive", "sin_positive", "sinpositive"):
            return cls.SIN_POSITIVE
        if key in ("neg", "-", "negative", "sin_negative", "sinnegative"):
            return cls.SIN_NEGATIVE
        raise ValueError(f"unknown branch {text!r} (expected 'pos' or 'neg')")


@dataclass(frozen=True)
class QuadraticModeProblem:
    stiffness1: float
    stiffness2: float
    cross: float
    drive: float
    omega_a: float
    omega_b: float
    phase: PhaseLabel = PhaseLabel.NORMAL

    @property
    def determinant(self) -> float:
        return self.stiffness1 * self.stiffness2 - self.cross * self.cross

    @property
    def trace(self) -> float:
        return self.stiffness1 + self.stiffness2


@dataclass(frozen=True)
class SupermodeSpectrum:
    omega_hi: float
    omega_lo: float
    sin2theta: float
    cos2theta: float
    branch: Branch
    critical: bool = False
    # False when stiffness1 <= stiffness2, outside the regime the sign rule was written for
    paper_regime: bool = True

    @property
    def cos_sq(self) -> float:
        return 0.5 * (1.0 + self.cos2theta)

    @property
    def sin_sq(self) -> float:
        return 0.5 * (1.0 - self.cos2theta)

    @property
    def sin_cos(self) -> float:
        return 0.5 * self.sin2theta


@dataclass(frozen=True)
class Displacements:
    x01: float
    x0_lo: float


@dataclass(frozen=True)
class GaussianMoments:
    var1: float
    var2: float
    cov: float
    mean1: float = 0.0
    mean2: float = 0.0


def build_normal_problem(params: GdmParams, allow_critical: bool = False) -> QuadraticModeProblem:
    lam = params.lambda_coupling
    f = effective_frequencies(params)
    lam_c = 0.5 * math.sqrt(f.omega1 * f.omega2)
    if lam > lam_c and not allow_critical:
        raise ModelError(f"normal-phase problem requested above lambda_c ({lam} > {lam_c})")
    w1, w2 = f.omega1, f.omega2
    return QuadraticModeProblem(
        stiffness1=w1 * w1,
        stiffness2=w2 * w2,
        cross=2.0 * lam * math.sqrt(w1 * w2),
        drive=params.drive * math.sqrt(2.0 * w1),
        omega_a=w1,
        omega_b=w2,
        phase=PhaseLabel.NORMAL,
    )


def build_superradiant_problem(
    params: GdmParams,
    coeffs: SuperradiantCoeffs | None = None,
    coupling: str = "zeta",
) -> QuadraticModeProblem:
    """Quadratic problem of the superradiant phase.

    ``coupling="lambda"`` puts the bare coupling in place of zeta in the
    cross term; it is only used by the reconciliation report.
    """
    if coeffs is None:
        coeffs = superradiant_coeffs(params, mean_fields(params))
    w1 = effective_frequencies(params).omega1
    w3, eta = coeffs.omega3, coeffs.eta
    if w3 <= 0:
        raise UnstableModeError("shifted atomic frequency omega3 <= 0")
    stiffness2 = w3 * (w3 + 4.0 * eta)
    if stiffness2 <= 0:
        raise UnstableModeError("superradiant atomic stiffness omega3 (omega3 + 4 eta) <= 0")
    if coupling == "zeta":
        g = coeffs.zeta
    elif coupling == "lambda":
        g = params.lambda_coupling
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    return QuadraticModeProblem(
        stiffness1=w1 * w1,
        stiffness2=stiffness2,
        cross=2.0 * g * math.sqrt(w1 * w3),
        drive=params.drive * math.sqrt(2.0 * w1),
        omega_a=w1,
        omega_b=w3,
        phase=PhaseLabel.SUPERRADIANT,
    )


def build_problem(params: GdmParams, phase: PhaseLabel | None = None) -> QuadraticModeProblem:
    """Problem for the phase ``params`` sits in (or the one forced by ``phase``)."""
    if phase is None:
        lam_c = critical_coupling(params)
        phase = PhaseLabel.NORMAL if params.lambda_coupling <= lam_c else PhaseLabel.SUPERRADIANT
    if phase is PhaseLabel.SUPERRADIANT:
        return build_superradiant_problem(params)
    return build_normal_problem(params, allow_critical=phase is PhaseLabel.CRITICAL)


def _sign(x: float) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def diagonalize(
    problem: QuadraticModeProblem,
    branch: Branch,
    tol: float = CRITICAL_TOL,
    mirror_soft_mode: bool = False,
) -> SupermodeSpectrum:
    """Eigen-decompose the 2x2 potential matrix into super-mode frequencies.

    The soft eigenvalue is taken as ``det / hard eigenvalue`` so that it keeps
    full relative precision close to the critical point.  The sign of
    sin(2 theta) is set by ``branch``; cos(2 theta) follows from
    tan(2 theta) = 2 cross / (stiffness2 - stiffness1).

    ``mirror_soft_mode`` replaces a negative soft eigenvalue by its absolute
    value instead of raising.  Only the continuity baseline of the QPT
    witness uses it.
    """
    s1, s2, c = problem.stiffness1, problem.stiffness2, problem.cross
    if s1 <= 0 or s2 <= 0:
        raise UnstableModeError("stiffness must be positive on both modes")
    diff = s1 - s2
    radical = math.hypot(diff, 2.0 * c)
    hi2 = 0.5 * (s1 + s2 + radical)
    lo2 = problem.determinant / hi2
    critical = False
    if lo2 < -tol and not mirror_soft_mode:
        raise CriticalPointError("critical or unstable: lower super-mode frequency imaginary")
    if abs(lo2) <= tol:
        critical = True
        lo2 = 0.0
    lo2 = abs(lo2)

    if radical == 0.0:
        abs_sin, abs_cos, diff_sign = 0.0, 1.0, 1.0
    else:
        abs_sin = abs(2.0 * c) / radical
        abs_cos = abs(diff) / radical
        diff_sign = _sign(diff) if diff != 0 else 1.0
    cross_sign = -1.0 if c < 0 else 1.0
    sin2 = branch.sign * abs_sin
    cos2 = -branch.sign * cross_sign * diff_sign * abs_cos
    return SupermodeSpectrum(
        omega_hi=math.sqrt(hi2),
        omega_lo=math.sqrt(lo2),
        sin2theta=sin2,
        cos2theta=cos2,
        branch=branch,
        critical=critical,
        paper_regime=s1 > s2,
    )


def closed_form_frequencies(problem: QuadraticModeProblem) -> tuple[float, float]:
    """Super-mode frequencies by direct transcription of the +/- radical formula."""
    s1, s2, c = problem.stiffness1, problem.stiffness2, problem.cross
    root = math.sqrt((s1 - s2) ** 2 + 4.0 * c * c)
    return math.sqrt(0.5 * (s1 + s2 + root)), math.sqrt(max(0.5 * (s1 + s2 - root), 0.0))


def ground_state_branch(problem: QuadraticModeProblem) -> Branch:
    """The branch whose closed forms describe the actual ground state.

    Only for this sign does the rotation send the hard super-mode frequency
    onto the first rotated coordinate; the other branch pairs the rotation
    with swapped frequencies.
    """
    return Branch.SIN_NEGATIVE if problem.cross >= 0 else Branch.SIN_POSITIVE


def displacements(spectrum: SupermodeSpectrum, problem: QuadraticModeProblem) -> Displacements:
    if spectrum.omega_lo <= 0 or spectrum.critical:
        raise CriticalPointError("displacement diverges at the critical point (omega_lo = 0)")
    f = problem.drive
    return Displacements(f / spectrum.omega_hi ** 2, f / spectrum.omega_lo ** 2)


def ground_state_moments(spectrum: SupermodeSpectrum, disp: Displacements | None = None) -> GaussianMoments:
    hi, lo = spectrum.omega_hi, spectrum.omega_lo
    if lo <= 0 or spectrum.critical:
        raise CriticalPointError("ground-state moments undefined at the critical point")
    c2, s2, sc = spectrum.cos_sq, spectrum.sin_sq, spectrum.sin_cos
    denom = 2.0 * hi * lo
    var1 = (lo * c2 + hi * s2) / denom
    var2 = (lo * s2 + hi * c2) / denom
    cov = (hi - lo) * spectrum.sin2theta / (4.0 * hi * lo)
    if disp is None:
        return GaussianMoments(var1, var2, cov)
    mean1 = -(disp.x01 * c2 + disp.x0_lo * s2)
    mean2 = (disp.x01 - disp.x0_lo) * sc
    return GaussianMoments(var1, var2, cov, mean1, mean2)
