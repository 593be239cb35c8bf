"""Schmidt decomposition, purifications, and rewriting bipartite states.

A bipartite pure state can be rewritten as sum_i sqrt(q_i) |i_A'> |psi_i>
with an orthonormal A-side basis exactly when q is majorized by its Schmidt
coefficients.  The constructive path goes through an ensemble for the B-side
reduced density matrix and the unitary relating two purifications.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkernel import (
    TOL_NORM,
    DensityMatrix,
    DomainError,
    ValidationError,
    complete_basis,
    hermitian_eig,
    validate_density,
)
from .majorize import MajorizationError, as_prob_vector, majorization_violation
from .ensembles import Ensemble, mixture_matrix, synthesize_ensemble

# Schmidt coefficients below this are treated as zero when deciding rank.
SCHMIDT_RANK_CUTOFF = 1e-12

# Coefficients closer than this are treated as one degenerate group when
# matching the Schmidt bases of two purifications.
DEGENERACY_GROUP_TOL = 1e-8


@dataclass(frozen=True)
class BipartiteState:
    """Pure state of a composite system, amplitudes indexed (a, b)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        m = np.array(self.amplitudes, dtype=np.complex128)
        if m.ndim != 2:
            raise ValidationError(f"bipartite amplitudes must be 2-D, got ndim={m.ndim}")
        if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
            raise ValidationError("bipartite amplitudes contain non-finite entries")
        object.__setattr__(self, "amplitudes", m)

    @property
    def dim_a(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def dim_b(self) -> int:
        return int(self.amplitudes.shape[1])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _require_unit(psi: BipartiteState, tol: float = TOL_NORM) -> None:
    norm = psi.norm()
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"state norm {norm!r} deviates from 1 by more than {tol}")


def embed_state(psi: BipartiteState, dim_a: int, dim_b: int) -> BipartiteState:
    """Zero-pad a bipartite state into a larger composite space."""
    if dim_a < psi.dim_a or dim_b < psi.dim_b:
        raise ValidationError("embedding dimensions must not shrink the state")
    m = np.zeros((dim_a, dim_b), dtype=np.complex128)
    m[: psi.dim_a, : psi.dim_b] = psi.amplitudes
    return BipartiteState(amplitudes=m)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Coefficients sorted decreasing with matching orthonormal bases.

    ``basis_a`` and ``basis_b`` hold one vector per column; only coefficients
    above the rank cutoff are kept, so the column count equals the Schmidt
    rank.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.coefficients.shape[0])

    def reconstruct(self) -> np.ndarray:
        """Amplitude matrix sum_i sqrt(p_i) |i_A><i_B|^T."""
        return (self.basis_a * np.sqrt(self.coefficients)) @ self.basis_b.T


def schmidt(psi: BipartiteState) -> SchmidtDecomposition:
    """Schmidt decomposition via the A-side reduced density matrix.

    Coefficients are the shared spectrum of the two reduced density matrices;
    phases and tie order are inherited from the deterministic eigensolver.
    """
    _require_unit(psi)
    m = psi.amplitudes
    rho_a = m @ m.conj().T
    spect = hermitian_eig((rho_a + rho_a.conj().T) / 2.0)
    lam = spect.eigenvalues
    keep = lam > SCHMIDT_RANK_CUTOFF
    dropped = float(np.sum(np.clip(lam[~keep], 0.0, None)))
    lam = lam[keep]
    basis_a = spect.eigenvectors[:, keep]
    # B-side partners follow from the A-side basis: <i_A| psi / sqrt(p_i).
    basis_b = (m.T @ basis_a.conj()) / np.sqrt(lam)
    decomp = SchmidtDecomposition(coefficients=lam, basis_a=basis_a, basis_b=basis_b)
    err = float(np.linalg.norm(decomp.reconstruct() - m))
    # Weight below the rank cutoff is honestly unreconstructable; budget for it.
    allowance = float(np.sqrt(dropped + 1e-15 * m.shape[0]))
    if err > 1e-9 + allowance:
        raise ValidationError(f"Schmidt reconstruction defect {err:.3e}")
    return decomp


def reduced_density(psi: BipartiteState, side: str) -> DensityMatrix:
    """Partial trace onto subsystem ``side`` ("A" or "B")."""
    _require_unit(psi)
    m = psi.amplitudes
    if side.upper() == "A":
        raw = m @ m.conj().T
    elif side.upper() == "B":
        raw = m.T @ m.conj()
    else:
        raise ValidationError(f"side must be 'A' or 'B', got {side!r}")
    return validate_density((raw + raw.conj().T) / 2.0)


def purify(rho: DensityMatrix, weights, states, tol: float = 1e-8) -> BipartiteState:
    """Purification sum_i sqrt(w_i) |i_A> |psi_i> of an ensemble for rho.

    The reference system A has one dimension per ensemble member; tracing it
    out returns rho.  The ensemble must actually realize rho within ``tol``.
    """
    w = as_prob_vector(weights, name="weights")
    s = np.array(states, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != w.shape[0]:
        raise ValidationError("states must be a 2-D array aligned with weights")
    ens = Ensemble(weights=w, states=s, synthetic=np.zeros(w.shape[0], dtype=bool))
    mismatch = float(np.linalg.norm(mixture_matrix(ens) - rho.matrix))
    if mismatch > tol:
        raise DomainError(
            f"ensemble does not realize the density matrix: Frobenius mismatch {mismatch:.3e}"
        )
    amps = np.sqrt(w)[:, None] * s
    return BipartiteState(amplitudes=amps)


def _group_by_gaps(values: np.ndarray, tol: float):
    """Split a decreasing sequence into runs whose consecutive gaps are <= tol."""
    groups = []
    start = 0
    for j in range(1, values.size + 1):
        if j == values.size or values[j - 1] - values[j] > tol:
            groups.append(list(range(start, j)))
            start = j
    return groups


def _polar_unitary(g: np.ndarray) -> np.ndarray:
    """Closest unitary to g, via the inverse square root of g^dagger g."""
    h = g.conj().T @ g
    spect = hermitian_eig((h + h.conj().T) / 2.0)
    mu = spect.eigenvalues
    if mu[-1] <= 1e-24:
        raise ValidationError("Gram block is singular; bases do not span matching subspaces")
    v = spect.eigenvectors
    inv_sqrt = (v / np.sqrt(mu)) @ v.conj().T
    return g @ inv_sqrt


def relate_purifications(phi: BipartiteState, psi: BipartiteState, tol: float = 1e-8) -> np.ndarray:
    """Unitary U on system A with (U x I) phi = psi.

    Exists exactly when the two states share a B-side reduced density matrix.
    Degenerate Schmidt coefficients are handled per group: the Gram matrix of
    the two B-side bases on each degenerate subspace is block-unitary and
    prescribes how the A-side bases must map; the complement is completed
    deterministically.
    """
    _require_unit(phi)
    _require_unit(psi)
    if phi.dim_a != psi.dim_a or phi.dim_b != psi.dim_b:
        raise ValidationError(
            f"dimension mismatch: {phi.dim_a}x{phi.dim_b} vs {psi.dim_a}x{psi.dim_b}"
        )
    rho_phi = reduced_density(phi, "B")
    rho_psi = reduced_density(psi, "B")
    gap = float(np.linalg.norm(rho_phi.matrix - rho_psi.matrix))
    if gap > tol:
        raise DomainError(
            f"not co-purifications: B-side reduced densities differ by {gap:.3e} (Frobenius)"
        )

    dec_phi = schmidt(phi)
    dec_psi = schmidt(psi)
    r = min(dec_phi.rank, dec_psi.rank)
    coeffs = dec_phi.coefficients[:r]

    mapped_cols = []
    for group in _group_by_gaps(coeffs, DEGENERACY_GROUP_TOL):
        b_phi = dec_phi.basis_b[:, group]
        b_psi = dec_psi.basis_b[:, group]
        gram = b_psi.conj().T @ b_phi
        gram = _polar_unitary(gram)
        # v^phi_i = sum_j gram[j, i] v^psi_j forces U to carry the matching
        # combination of phi's A-basis onto psi's A-basis vectors.
        mapped_cols.append(dec_phi.basis_a[:, group] @ gram.T)
    n_a = phi.dim_a
    if mapped_cols:
        source = np.concatenate(mapped_cols, axis=1)
    else:
        source = np.zeros((n_a, 0), dtype=np.complex128)
    target = dec_psi.basis_a[:, :r]

    source_full = complete_basis(source, n_a)
    target_full = complete_basis(target, n_a)
    u = target_full @ source_full.conj().T

    # Align the residual global phase so the mapped state matches psi itself.
    mapped = u @ phi.amplitudes
    overlap = complex(np.vdot(psi.amplitudes, mapped))
    if abs(overlap) > 1e-12:
        u = u * (overlap.conjugate() / abs(overlap))
        mapped = u @ phi.amplitudes

    unitarity = float(np.linalg.norm(u @ u.conj().T - np.eye(n_a)))
    if unitarity > 1e-9:
        raise ValidationError(f"constructed map has unitarity defect {unitarity:.3e}")
    # Sub-cutoff Schmidt weight rides through the completion unmatched.
    slack = sum(
        float(np.sqrt(max(0.0, 1.0 - dec.coefficients.sum()) + 1e-15 * n_a))
        for dec in (dec_phi, dec_psi)
    )
    residual = float(np.linalg.norm(mapped - psi.amplitudes))
    if residual > tol + slack:
        raise ValidationError(f"purification map residual {residual:.3e} exceeds {tol}")
    return u


@dataclass(frozen=True)
class Cor4Decomposition:
    """Rewriting of a bipartite state with a prescribed weight vector.

    ``basis_a`` columns are orthonormal; ``states_b`` rows are unit states,
    not necessarily orthogonal.  The state equals
    sum_i sqrt(q_i) |basis_a_i> |states_b_i>.
    """

    weights: np.ndarray
    basis_a: np.ndarray
    states_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis_a * np.sqrt(self.weights)) @ self.states_b


def corollary4_decompose(psi: BipartiteState, q) -> Cor4Decomposition:
    """Rewrite psi as sum_i sqrt(q_i) |i_A'> |psi_i> for prescribed weights q.

    Possible exactly when q is majorized by the Schmidt coefficients of psi;
    a violation raises with the failing partial sum.  When q has more entries
    than psi's A dimension, the A space is enlarged to len(q) and the returned
    basis vectors live in the enlarged space.
    """
    _require_unit(psi)
    weights = as_prob_vector(q, name="weights")
    p = schmidt(psi).coefficients
    violation = majorization_violation(weights, p)
    if violation is not None:
        raise MajorizationError(*violation)

    n_a = max(psi.dim_a, weights.size)
    psi_e = embed_state(psi, n_a, psi.dim_b)
    rho_b = reduced_density(psi_e, "B")
    ens = synthesize_ensemble(rho_b, weights)
    phi = embed_state(purify(rho_b, ens.weights, ens.states), n_a, psi.dim_b)
    u = relate_purifications(phi, psi_e)
    decomp = Cor4Decomposition(
        weights=weights,
        basis_a=u[:, : weights.size],
        states_b=ens.states,
    )
    err = float(np.linalg.norm(decomp.reconstruct() - psi_e.amplitudes))
    slack = float(np.sqrt(max(0.0, 1.0 - p.sum()) + 1e-15 * n_a))
    if err > 1e-8 + slack:
        raise ValidationError(f"decomposition reconstruction defect {err:.3e}")
    return decomp


__all__ = [
    "BipartiteState",
    "Cor4Decomposition",
    "SchmidtDecomposition",
    "SCHMIDT_RANK_CUTOFF",
    "corollary4_decompose",
    "embed_state",
    "purify",
    "reduced_density",
    "relate_purifications",
    "schmidt",
]
