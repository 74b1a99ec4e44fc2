"""Reduced generalized Dicke model: couplings, frequencies, phases and mean fields.

All frequencies are in units of the recoil frequency (omega_r = 1 by
convention, but carried explicitly on :class:`GdmParams`), and hbar = 1.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass


class ModelError(ValueError):
    """Raised for parameter sets outside the domain of the reduced model."""


class UnstableModeError(ModelError):
    """A mode frequency or stiffness that must be positive is not."""


@dataclass(frozen=True)
class ImpurityRawParams:
    g_q: float
    omega_rabi_q: float
    omega_q: float
    omega_c: float
    omega_p: float

    @property
    def detuning_cavity(self) -> float:
        return self.omega_q - self.omega_c

    @property
    def detuning_pump(self) -> float:
        return self.omega_q - self.omega_p


def impurity_couplings(raw: ImpurityRawParams) -> tuple[float, float, float]:
    """Return ``(xi1, xi2, delta_q)`` for a dispersively coupled impurity qubit.

    ``delta_q`` only enters the bare impurity energy and is not used by any
    downstream quantity; it is returned for completeness.
    """
    d1 = raw.detuning_cavity
    d2 = raw.detuning_pump
    if d1 == 0:
        raise ModelError("impurity-cavity detuning omega_q - omega_c vanishes")
    if d2 == 0:
        raise ModelError("impurity-pump detuning omega_q - omega_p vanishes")
    g, rabi = raw.g_q, raw.omega_rabi_q
    xi1 = g * g / d1
    xi2 = g * rabi / d1 + g * rabi / d2
    delta_q = d2 + g * g / d1 + 2.0 * rabi * rabi / d2
    return xi1, xi2, delta_q


@dataclass(frozen=True)
class GdmParams:
    """Physical constants of the reduced model.

    ``delta`` is the impurity population <sigma_z> and is dimensionless.
    When ``impurity_on`` is false the impurity couplings ``kappa``, ``xi1``
    and ``xi2`` are ignored (treated as zero) but kept on the object so a
    scenario can be toggled without losing them.
    """

    omega: float
    chi: float = 0.0
    chi_pp: float = 0.0
    kappa: float = 0.0
    xi1: float = 0.0
    xi2: float = 0.0
    delta: float = 0.0
    lambda_coupling: float = 0.0
    impurity_on: bool = True
    omega_r: float = 1.0

    def __post_init__(self):
        for name in ("omega", "chi", "chi_pp", "kappa", "xi1", "xi2", "delta",
                     "lambda_coupling", "omega_r"):
            if not math.isfinite(getattr(self, name)):
                raise ModelError(f"{name} must be finite")
        if self.omega <= 0:
            raise ModelError("omega must be positive")
        if self.omega_r <= 0:
            raise ModelError("omega_r must be positive")
        if self.lambda_coupling < 0:
            raise ModelError("lambda_coupling must be non-negative")
        if not -1.0 <= self.delta <= 1.0:
            raise ModelError("delta must lie in [-1, 1]")

    @property
    def kappa_eff(self) -> float:
        return self.kappa if self.impurity_on else 0.0

    @property
    def xi1_eff(self) -> float:
        return self.xi1 if self.impurity_on else 0.0

    @property
    def xi2_eff(self) -> float:
        return self.xi2 if self.impurity_on else 0.0

    @property
    def drive(self) -> float:
        """Amplitude xi2*delta of the linear cavity drive."""
        return self.xi2_eff * self.delta

    def with_lambda(self, lam: float) -> "GdmParams":
        return dataclasses.replace(self, lambda_coupling=float(lam))


@dataclass(frozen=True)
class EffectiveFrequencies:
    omega1: float
    omega2: float


@dataclass(frozen=True)
class MeanField:
    alpha: float
    beta: float
    k_factor: float


@dataclass(frozen=True)
class SuperradiantCoeffs:
    omega3: float
    zeta: float
    eta: float


class PhaseLabel(enum.Enum):
    NORMAL = "Normal"
    CRITICAL = "Critical"
    SUPERRADIANT = "Superradiant"


def effective_frequencies(params: GdmParams, atomic_reference: str = "recoil") -> EffectiveFrequencies:
    """Effective cavity and atomic frequencies ``(omega1, omega2)``.

    The atomic frequency is referenced to the recoil frequency:
    ``omega2 = omega_r - chi'' - kappa (1 + delta)``. ``atomic_reference="cavity"``
    substitutes the cavity frequency ``omega`` for ``omega_r``; it exists only
    for the threshold reconciliation report.
    """
    if atomic_reference == "recoil":
        ref = params.omega_r
    elif atomic_reference == "cavity":
        ref = params.omega
    else:
        raise ValueError(f"unknown atomic_reference {atomic_reference!r}")
    omega1 = params.omega + params.xi1_eff * params.delta
    omega2 = ref - params.chi_pp - params.kappa_eff * (1.0 + params.delta)
    if omega1 <= 0:
        raise UnstableModeError("cavity mode unstable for these parameters (omega1 <= 0)")
    if omega2 <= 0:
        raise UnstableModeError("atomic mode unstable for these parameters (omega2 <= 0)")
    return EffectiveFrequencies(omega1, omega2)


def critical_coupling(params: GdmParams, atomic_reference: str = "recoil") -> float:
    f = effective_frequencies(params, atomic_reference)
    return 0.5 * math.sqrt(f.omega1 * f.omega2)


def classify_phase(params: GdmParams, tol: float = 1e-9) -> PhaseLabel:
    lam_c = critical_coupling(params)
    lam = params.lambda_coupling
    if lam < lam_c * (1.0 - tol):
        return PhaseLabel.NORMAL
    if lam > lam_c * (1.0 + tol):
        return PhaseLabel.SUPERRADIANT
    return PhaseLabel.CRITICAL


def mean_fields(params: GdmParams, atomic_reference: str = "recoil") -> MeanField:
    """Positive-root mean-field displacements of the superradiant phase."""
    f = effective_frequencies(params, atomic_reference)
    w1, w2 = f.omega1, f.omega2
    lam = params.lambda_coupling
    chi = params.chi
    if lam < 0.5 * math.sqrt(w1 * w2):
        raise ModelError("mean fields undefined in normal phase (lambda < lambda_c)")
    lam2 = lam * lam
    # rounding at lambda == lambda_c can leave a negative ulp
    excess = max(4.0 * lam2 - w1 * w2, 0.0)
    beta2 = excess / (2.0 * chi * w1 + 8.0 * lam2)
    alpha2 = (lam2 * excess * (4.0 * lam2 + w1 * w2 + 2.0 * chi * w1)
              / (w1 * w1 * (chi * w1 + 4.0 * lam2) ** 2))
    if not 0.0 <= beta2 < 1.0 or alpha2 < 0.0:
        raise ModelError(f"mean fields outside physical range (beta^2={beta2}, alpha^2={alpha2})")
    return MeanField(math.sqrt(alpha2), math.sqrt(beta2), math.sqrt(1.0 - beta2))


def superradiant_coeffs(params: GdmParams, mf: MeanField) -> SuperradiantCoeffs:
    """Shifted atomic frequency, effective coupling and squeezing coefficient.

    The bare part of ``omega3`` is always referenced to ``omega_r``.
    """
    k = mf.k_factor
    if k <= 0.0:
        raise ModelError("K = sqrt(1 - beta^2) vanishes; superradiant coefficients singular")
    lam = params.lambda_coupling
    a, b = mf.alpha, mf.beta
    b2 = b * b
    bare = params.omega_r - params.chi_pp - params.kappa_eff * (1.0 + params.delta)
    omega3 = bare + 2.0 * params.chi * b2 + lam * a * b / k
    zeta = lam * (k - b2 / k)
    eta = params.chi * b2 + lam * a * b * (2.0 + b2) / (2.0 * k ** 3)
    return SuperradiantCoeffs(omega3, zeta, eta)
