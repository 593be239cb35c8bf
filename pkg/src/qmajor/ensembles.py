"""Pure-state ensemble decompositions of density matrices.

A weight vector p can appear in a mixture rho = sum_i p_i |psi_i><psi_i| iff
p is majorized by the spectrum of rho.  Both directions are implemented: the
compatibility test, and an explicit synthesis that mixes the scaled
eigenvectors of rho through an ortho-stochastic witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkernel import (
    TOL_NORM,
    TOL_PROB,
    DensityMatrix,
    ValidationError,
    validate_density,
)
from .majorize import (
    MajorizationError,
    SchurReport,
    as_prob_vector,
    check_schur_inequalities,
    horn_orthogonal,
    is_majorized_by,
    majorization_violation,
)


# Eigenvalues at or below this are treated as exact zeros when scaling
# eigenvectors for synthesis; matches the Schmidt rank cutoff.
_RANK_FLOOR = 1e-12


@dataclass(frozen=True)
class Ensemble:
    """Weighted collection of pure states realizing a density matrix.

    ``states`` holds one state per row, aligned with ``weights``.  Members
    flagged in ``synthetic`` carry weight zero and a placeholder basis state;
    they exist only to keep the member count equal to the requested weight
    vector's length.
    """

    weights: np.ndarray
    states: np.ndarray
    synthetic: np.ndarray

    def __post_init__(self):
        w = as_prob_vector(self.weights, name="ensemble weights")
        s = np.array(self.states, dtype=np.complex128)
        if s.ndim != 2:
            raise ValidationError(f"ensemble states must be a 2-D array, got ndim={s.ndim}")
        if s.shape[0] != w.shape[0]:
            raise ValidationError(
                f"{w.shape[0]} weights but {s.shape[0]} states"
            )
        if not (np.all(np.isfinite(s.real)) and np.all(np.isfinite(s.imag))):
            raise ValidationError("ensemble states contain non-finite entries")
        flags = np.array(self.synthetic, dtype=bool)
        if flags.shape != w.shape:
            raise ValidationError("synthetic flags must align with weights")
        norms = np.linalg.norm(s, axis=1)
        bad = np.nonzero((w > TOL_PROB) & (np.abs(norms - 1.0) > TOL_NORM))[0]
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"ensemble member {i} with weight {w[i]!r} has norm {norms[i]!r}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "synthetic", flags)

    @classmethod
    def from_members(cls, members) -> "Ensemble":
        """Build from an iterable of (weight, state) pairs."""
        weights = [m[0] for m in members]
        states = [np.asarray(m[1], dtype=np.complex128) for m in members]
        return cls(
            weights=np.array(weights, dtype=np.float64),
            states=np.array(states, dtype=np.complex128),
            synthetic=np.zeros(len(weights), dtype=bool),
        )

    @property
    def dim(self) -> int:
        return int(self.states.shape[1])

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def members(self):
        for i in range(len(self)):
            yield float(self.weights[i]), self.states[i]


def mixture_matrix(ensemble: Ensemble) -> np.ndarray:
    """Raw weighted sum of projectors, without density validation."""
    return (ensemble.states.T * ensemble.weights) @ ensemble.states.conj()


def density_from_ensemble(ensemble: Ensemble, tol: float = 1e-9) -> DensityMatrix:
    """Assemble and validate sum_i w_i |psi_i><psi_i|."""
    return validate_density(mixture_matrix(ensemble), tol=tol)


def is_compatible(p, rho: DensityMatrix, tol: float = TOL_PROB) -> bool:
    """Can p appear as the weights of a pure-state mixture of rho?

    Equivalent to p being majorized by the spectrum of rho, with the shorter
    vector zero-padded.
    """
    weights = as_prob_vector(p, name="weights")
    return is_majorized_by(weights, rho.eigenvalues(), tol)


def synthesize_ensemble(rho: DensityMatrix, p) -> Ensemble:
    """Construct an ensemble for rho with the exact weight vector p.

    The eigenvectors of rho, scaled so each has squared norm equal to its
    eigenvalue, are mixed through the orthogonal witness W of
    horn_orthogonal(p, spectrum); the i-th mix has norm sqrt(p_i), so
    normalizing it gives the i-th unit state.  Zero-weight entries get a
    flagged placeholder basis state so the output length equals len(p).
    """
    weights = as_prob_vector(p, name="weights")
    lam = rho.eigenvalues()
    violation = majorization_violation(weights, lam)
    if violation is not None:
        raise MajorizationError(*violation)

    dim = rho.dim
    n = max(weights.size, dim)
    lam_ext = np.concatenate([lam, np.zeros(n - lam.size)])
    w_ext = np.concatenate([weights, np.zeros(n - weights.size)])
    witness = horn_orthogonal(w_ext, lam_ext)

    # Columns are eigenvectors scaled to squared norm lambda_j, padded with
    # zero vectors when there are more members than eigenvectors.  Noise-level
    # eigenvalues are zeroed outright so their sqrt cannot smear ~1e-8
    # amplitudes across the synthesized states.
    lam_clean = np.where(lam > _RANK_FLOOR, lam, 0.0)
    scaled = rho.spectrum().eigenvectors * np.sqrt(lam_clean)
    scaled = np.concatenate([scaled, np.zeros((dim, n - lam.size))], axis=1)

    m = weights.size
    states = np.zeros((m, dim), dtype=np.complex128)
    synthetic = np.zeros(m, dtype=bool)
    mixed = scaled @ witness.orthogonal.T  # column i = sum_j W_ij e_j
    for i in range(m):
        if weights[i] > TOL_PROB:
            # The mix has norm sqrt(p_i) by construction; normalizing by the
            # actual norm is the same state with the roundoff scrubbed.
            norm = float(np.linalg.norm(mixed[:, i]))
            if norm <= 0.0:
                raise ValidationError(f"degenerate mix for member {i} with weight {weights[i]!r}")
            states[i] = mixed[:, i] / norm
        else:
            states[i, 0] = 1.0
            synthetic[i] = True
    return Ensemble(weights=weights, states=states, synthetic=synthetic)


def rank_of(rho: DensityMatrix, tol: float = 1e-9) -> int:
    """Number of eigenvalues above tol."""
    return int(np.sum(rho.eigenvalues() > tol))


def uniform_ensemble(rho: DensityMatrix, m: int) -> Ensemble:
    """Equal-weight ensemble of m pure states realizing rho.

    Exists exactly when m >= rank(rho); smaller m fails the majorization
    precondition.
    """
    if m < 1:
        raise ValidationError(f"ensemble size must be positive, got {m}")
    r = rank_of(rho)
    if m < r:
        lam = rho.eigenvalues()
        raise MajorizationError(m, 1.0, float(np.sum(lam[:m])))
    return synthesize_ensemble(rho, np.full(m, 1.0 / m))


@dataclass(frozen=True)
class EnsembleAudit:
    """Round-trip audit of an ensemble against a target density matrix."""

    frobenius_error: float
    majorization_ok: bool
    majorization_violation: tuple | None
    norm_deviations: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        max_norm = float(self.norm_deviations.max()) if self.norm_deviations.size else 0.0
        return self.majorization_ok and self.frobenius_error <= self.tol and max_norm <= self.tol


def verify_ensemble(ensemble: Ensemble, rho: DensityMatrix, tol: float = 1e-8) -> EnsembleAudit:
    """Report reconstruction error, weight majorization, and member norms.

    Never raises for a failing ensemble; the audit carries the failures.
    """
    err = float(np.linalg.norm(mixture_matrix(ensemble) - rho.matrix))
    violation = majorization_violation(ensemble.weights, rho.eigenvalues(), max(tol, TOL_PROB))
    live = ensemble.weights > TOL_PROB
    deviations = np.abs(np.linalg.norm(ensemble.states[live], axis=1) - 1.0)
    return EnsembleAudit(
        frobenius_error=err,
        majorization_ok=violation is None,
        majorization_violation=violation,
        norm_deviations=deviations,
        tol=tol,
    )


def shannon_entropy(weights) -> float:
    """Shannon entropy in nats, with 0 log 0 := 0."""
    w = np.asarray(weights, dtype=np.float64)
    pos = w[w > 0.0]
    return float(-np.sum(pos * np.log(pos)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy of the spectrum, in nats."""
    return shannon_entropy(rho.eigenvalues())


@dataclass(frozen=True)
class EntropyReport:
    """Mixing entropy of the weights against the entropy of the realized state."""

    shannon: float
    von_neumann: float
    schur: SchurReport

    @property
    def gap(self) -> float:
        return self.shannon - self.von_neumann


def entropy_report(ensemble: Ensemble, tol: float = 1e-9) -> EntropyReport:
    """Shannon vs von Neumann entropy for an ensemble, plus the full
    Schur-convex comparison of weights against the spectrum.

    The mixing entropy can never fall below the state entropy; a violation
    beyond tol raises.
    """
    rho = density_from_ensemble(ensemble)
    h = shannon_entropy(ensemble.weights)
    s = von_neumann_entropy(rho)
    if h < s - tol:
        raise ValidationError(f"mixing entropy {h!r} fell below state entropy {s!r}")
    schur = check_schur_inequalities(ensemble.weights, rho.eigenvalues(), tol=tol)
    return EntropyReport(shannon=h, von_neumann=s, schur=schur)
