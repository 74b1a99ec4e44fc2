"""Brute-force check of the closed forms in a truncated two-mode Fock space.

The phase Hamiltonians are assembled directly from ladder operators in the
product number basis |n1, n2> (row-major, n2 fastest), the lowest eigenpair
is extracted numerically and quadrature moments are evaluated on the state
vector.  Nothing here goes through the super-mode rotation, so agreement is
an independent confirmation of the analytic pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import (
    GdmParams,
    ModelError,
    PhaseLabel,
    classify_phase,
    effective_frequencies,
    mean_fields,
    superradiant_coeffs,
)
from .steering import SteeringPair, steering_closed_form, steering_from_moments
from .supermode import (
    Branch,
    GaussianMoments,
    build_problem,
    diagonalize,
    displacements,
    ground_state_branch,
    ground_state_moments,
)

DENSE_MAX_DIM = 1500
RESIDUAL_TOL = 1e-10
NEAR_CRITICAL = 0.02


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class FockConfig:
    cutoff1: int = 8
    cutoff2: int = 8
    growth: float = 1.5
    conv_tol: float = 1e-8
    max_dim: int = 40000
    # a mode whose top level carries less weight than this is not enlarged
    tail_tol: float = 1e-16

    def __post_init__(self):
        if self.cutoff1 < 4 or self.cutoff2 < 4:
            raise ValueError("cutoffs must be at least 4")
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")
        if (self.cutoff1 + 1) * (self.cutoff2 + 1) > self.max_dim:
            raise ValueError("initial Fock dimension exceeds max_dim")


@dataclass
class OracleReport:
    moments: GaussianMoments
    steering: SteeringPair
    ground_energy: float
    cutoffs_used: tuple[int, int]
    converged: bool
    deltas: dict[str, float]
    branch: Branch
    phase: PhaseLabel
    history: list[tuple[tuple[int, int], float]] = field(default_factory=list)

    @property
    def max_delta(self) -> float:
        return max(self.deltas.values())


def _quadrature(cutoff: int) -> sp.csr_matrix:
    """Truncated (b + b^dag) on levels 0..cutoff."""
    off = np.sqrt(np.arange(1, cutoff + 1, dtype=float))
    return sp.diags([off, off], [-1, 1], format="csr")


def _number(cutoff: int) -> sp.csr_matrix:
    return sp.diags(np.arange(cutoff + 1, dtype=float), format="csr")


def phase_terms(params: GdmParams, phase: PhaseLabel) -> dict[str, float]:
    """Coefficients of the Fock-space Hamiltonian for ``phase``."""
    f = effective_frequencies(params)
    terms = {"omega1": f.omega1, "drive": params.drive, "eta": 0.0}
    if phase is PhaseLabel.SUPERRADIANT:
        c = superradiant_coeffs(params, mean_fields(params))
        terms.update(omega2=c.omega3, coupling=c.zeta, eta=c.eta)
    else:
        terms.update(omega2=f.omega2, coupling=params.lambda_coupling)
    return terms


def build_hamiltonian_matrix(
    params: GdmParams,
    phase: PhaseLabel,
    cutoffs: tuple[int, int],
    max_dim: int = 40000,
) -> sp.csr_matrix:
    """Sparse real-symmetric matrix of the normal or superradiant Hamiltonian.

    normal:       w1 d^dag d + w2 b^dag b + lam (d + d^dag)(b + b^dag) + xi2 delta (d + d^dag)
    superradiant: w1 d^dag d + w3 b^dag b + zeta (d + d^dag)(b + b^dag)
                  + eta (b + b^dag)^2 + xi2 delta (d + d^dag)
    """
    c1, c2 = cutoffs
    if (c1 + 1) * (c2 + 1) > max_dim:
        raise OracleError(f"Fock dimension {(c1 + 1) * (c2 + 1)} exceeds cap {max_dim}")
    t = phase_terms(params, phase)
    x1, x2 = _quadrature(c1), _quadrature(c2)
    id1, id2 = sp.identity(c1 + 1, format="csr"), sp.identity(c2 + 1, format="csr")
    h = (t["omega1"] * sp.kron(_number(c1), id2)
         + t["omega2"] * sp.kron(id1, _number(c2))
         + t["coupling"] * sp.kron(x1, x2)
         + t["drive"] * sp.kron(x1, id2))
    if t["eta"]:
        h = h + t["eta"] * sp.kron(id1, x2 @ x2)
    return sp.csr_matrix(h)


def ground_state(matrix) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; dense LAPACK below ``DENSE_MAX_DIM``, shift-invert Lanczos above."""
    n = matrix.shape[0]
    if n <= DENSE_MAX_DIM:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        if not np.all(np.isfinite(dense)):
            raise OracleError("matrix has non-finite entries")
        w, v = scipy.linalg.eigh(dense, subset_by_index=[0, 0])
        energy, vec = float(w[0]), v[:, 0]
    else:
        m = sp.csr_matrix(matrix)
        diag = m.diagonal()
        radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
        # Gershgorin lower bound: the nearest eigenvalue to it is the lowest one
        sigma = float(np.min(diag - radius)) - 1.0
        try:
            w, v = spla.eigsh(m, k=1, sigma=sigma, which="LM", tol=0)
        except (spla.ArpackError, RuntimeError) as exc:
            raise OracleError(f"sparse eigensolver failed: {exc}") from exc
        energy, vec = float(w[0]), v[:, 0]
    vec = vec / np.linalg.norm(vec)
    norm = abs(matrix).sum(axis=1).max() if sp.issparse(matrix) else np.abs(matrix).sum(axis=1).max()
    residual = np.linalg.norm(matrix @ vec - energy * vec)
    if residual > RESIDUAL_TOL * max(float(norm), 1.0):
        raise OracleError(f"eigenpair residual {residual:.3e} above tolerance")
    # fix the global sign for reproducible dumps
    k = int(np.argmax(np.abs(vec)))
    if vec[k] < 0:
        vec = -vec
    return energy, vec


def quadrature_moments(
    statevector: np.ndarray,
    cutoffs: tuple[int, int],
    omega_a: float,
    omega_b: float,
) -> GaussianMoments:
    c1, c2 = cutoffs
    psi = np.asarray(statevector, dtype=float).reshape(c1 + 1, c2 + 1)
    x1 = (_quadrature(c1) @ psi) / math.sqrt(2.0 * omega_a)
    x2 = (_quadrature(c2) @ psi.T).T / math.sqrt(2.0 * omega_b)
    m1 = float(np.sum(psi * x1))
    m2 = float(np.sum(psi * x2))
    var1 = float(np.sum(x1 * x1)) - m1 * m1
    var2 = float(np.sum(x2 * x2)) - m2 * m2
    # x1 and x2 act on different modes, so <x1 x2> is already symmetric
    cov = float(np.sum(x1 * x2)) - m1 * m2
    return GaussianMoments(var1, var2, cov, m1, m2)


def moment_deltas(num: GaussianMoments, ref: GaussianMoments) -> dict[str, float]:
    """Normalized differences of two moment sets.

    Variances are compared relatively; the covariance in units of
    sqrt(var1 var2) and each mean in units of its mode's standard deviation,
    so vanishing references (no drive, decoupled modes) stay well defined.
    """
    sd1, sd2 = math.sqrt(ref.var1), math.sqrt(ref.var2)
    return {
        "var1": abs(num.var1 - ref.var1) / ref.var1,
        "var2": abs(num.var2 - ref.var2) / ref.var2,
        "cov": abs(num.cov - ref.cov) / (sd1 * sd2),
        "mean1": abs(num.mean1 - ref.mean1) / sd1,
        "mean2": abs(num.mean2 - ref.mean2) / sd2,
    }


def steering_deltas(num: SteeringPair, ref: SteeringPair, ref_m: GaussianMoments) -> dict[str, float]:
    """Differences of steering parameters relative to the size of their terms.

    E = var - cov/var' can cancel to near zero, so the scale is
    var + |cov/var'| rather than |E|.
    """
    scale12 = ref_m.var1 + abs(ref_m.cov / ref_m.var2)
    scale21 = ref_m.var2 + abs(ref_m.cov / ref_m.var1)
    return {
        "e_atoms_to_photons": abs(num.e_atoms_to_photons - ref.e_atoms_to_photons) / scale12,
        "e_photons_to_atoms": abs(num.e_photons_to_atoms - ref.e_photons_to_atoms) / scale21,
    }


def _grow(cutoff: int, growth: float) -> int:
    return max(cutoff + 1, int(math.ceil(cutoff * growth)))


def compare(
    params: GdmParams,
    branch: Branch | None = None,
    config: FockConfig = FockConfig(),
) -> OracleReport:
    """Refine the Fock truncation until the moments settle and compare with the closed forms.

    ``branch=None`` selects the branch that describes the true ground state,
    which is the only one the oracle can confirm.
    """
    phase = classify_phase(params)
    if phase is PhaseLabel.CRITICAL:
        raise ModelError("oracle comparison undefined at the critical point")
    problem = build_problem(params, phase)
    if branch is None:
        branch = ground_state_branch(problem)
    spectrum = diagonalize(problem, branch)
    closed = ground_state_moments(spectrum, displacements(spectrum, problem))
    closed_pair = steering_closed_form(spectrum)

    cutoffs = (config.cutoff1, config.cutoff2)
    history: list[tuple[tuple[int, int], float]] = []
    previous: GaussianMoments | None = None
    converged = False
    energy, moments = math.nan, None
    while True:
        matrix = build_hamiltonian_matrix(params, phase, cutoffs, config.max_dim)
        energy, vec = ground_state(matrix)
        moments = quadrature_moments(vec, cutoffs, problem.omega_a, problem.omega_b)
        history.append((cutoffs, energy))
        if previous is not None and max(moment_deltas(moments, previous).values()) <= config.conv_tol:
            converged = True
            break
        previous = moments
        psi = vec.reshape(cutoffs[0] + 1, cutoffs[1] + 1)
        tail1 = float(np.sum(psi[-1, :] ** 2))
        tail2 = float(np.sum(psi[:, -1] ** 2))
        nxt = (
            _grow(cutoffs[0], config.growth) if tail1 > config.tail_tol else cutoffs[0],
            _grow(cutoffs[1], config.growth) if tail2 > config.tail_tol else cutoffs[1],
        )
        if nxt == cutoffs:
            # both tails negligible: one more step on each to confirm
            nxt = (_grow(cutoffs[0], config.growth), _grow(cutoffs[1], config.growth))
        if (nxt[0] + 1) * (nxt[1] + 1) > config.max_dim:
            break
        cutoffs = nxt

    pair = steering_from_moments(moments)
    deltas = moment_deltas(moments, closed)
    deltas.update(steering_deltas(pair, closed_pair, closed))
    return OracleReport(
        moments=moments,
        steering=pair,
        ground_energy=energy,
        cutoffs_used=cutoffs,
        converged=converged,
        deltas=deltas,
        branch=branch,
        phase=phase,
        history=history,
    )


def zero_point_energy(params: GdmParams) -> float:
    """Closed-form ground energy of the drive-free normal problem, (W_hi + W_lo - w1 - w2)/2."""
    problem = build_problem(params, PhaseLabel.NORMAL)
    s = diagonalize(problem, Branch.SIN_NEGATIVE)
    return 0.5 * (s.omega_hi + s.omega_lo - problem.omega_a - problem.omega_b)


def dump_matrix(matrix, path) -> None:
    """Write the non-zero entries as ``row col value`` lines, row-major, 17 significant digits."""
    m = sp.csr_matrix(matrix, copy=True)
    # sums of kron terms keep structural zeros such as the vacuum diagonal
    m.eliminate_zeros()
    m = m.tocoo()
    order = np.lexsort((m.col, m.row))
    with open(path, "w") as fh:
        for k in order:
            fh.write(f"{m.row[k]} {m.col[k]} {m.data[k]:.17g}\n")
