"""Dense complex linear algebra primitives and validated domain values.

Everything downstream (majorization witnesses, ensemble synthesis, Schmidt
machinery, the conversion protocol) is built on the validators and the
deterministic Hermitian eigensolver defined here.  All functions are pure;
returned arrays are fresh and never alias their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default tolerances.  Every operation that checks one of these accepts a
# per-call override.
TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_ORTH = 1e-9
TOL_RECON = 1e-8
TOL_NORM = 1e-9
TOL_PROB = 1e-9

# Jacobi sweep termination: off-diagonal Frobenius norm target and sweep cap.
_JACOBI_OFF_TARGET = 1e-12
_JACOBI_MAX_SWEEPS = 100

# Components smaller than this are ignored when fixing eigenvector phases.
_PHASE_FLOOR = 1e-12


class ValidationError(ValueError):
    """An input value violates a structural invariant (shape, norm, bound)."""


class DomainError(Exception):
    """A well-formed input is rejected by an operation's mathematical precondition."""


def as_complex_matrix(entries, name: str = "matrix") -> np.ndarray:
    """Coerce to a fresh 2-D complex128 array, rejecting non-finite entries."""
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValidationError(f"{name} contains non-finite entries")
    return m


def as_vector(entries, name: str = "vector") -> np.ndarray:
    """Coerce to a fresh 1-D complex128 array with finite entries."""
    v = np.array(entries, dtype=np.complex128)
    if v.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got ndim={v.ndim}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValidationError(f"{name} contains non-finite entries")
    return v


def as_state_vector(entries, tol: float = TOL_NORM, name: str = "state") -> np.ndarray:
    """Validate a unit vector: Euclidean norm within ``tol`` of 1."""
    v = as_vector(entries, name)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} norm {norm!r} deviates from 1 by more than {tol}")
    return v


def frobenius_distance(a, b) -> float:
    """Frobenius norm of the difference of two equal-shape matrices."""
    am = as_complex_matrix(a, "first operand")
    bm = as_complex_matrix(b, "second operand")
    if am.shape != bm.shape:
        raise ValidationError(f"shape mismatch: {am.shape} vs {bm.shape}")
    return float(np.linalg.norm(am - bm))


def fix_global_phase(v: np.ndarray, floor: float = _PHASE_FLOOR) -> np.ndarray:
    """Multiply by a unit phase so the largest-magnitude entry is real positive.

    Returns the input unchanged when every entry is below ``floor``.  Works on
    arrays of any shape; the convention picks the first entry attaining the
    maximum magnitude in C-order, which makes equality assertions well-defined.
    """
    flat = np.asarray(v, dtype=np.complex128).reshape(-1)
    idx = int(np.argmax(np.abs(flat)))
    pivot = flat[idx]
    if abs(pivot) <= floor:
        return np.array(v, dtype=np.complex128)
    return np.asarray(v, dtype=np.complex128) * (pivot.conjugate() / abs(pivot))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted decreasing with matching orthonormal eigenvectors.

    ``eigenvectors`` holds one eigenvector per column, aligned with
    ``eigenvalues``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        """Assemble sum(lambda_j v_j v_j^dagger)."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a complex plane rotation, updating a and v in place.

    Accumulates the rotation into the eigenvector matrix v (as columns).
    """
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    # Smaller-magnitude root of t^2 + 2*tau*t - 1 = 0, stable for large |tau|.
    t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    sp = s * phase
    spc = s * phase.conjugate()

    # Column update: A <- A J with J acting on columns (p, q).
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - spc * col_q
    a[:, q] = sp * col_p + c * col_q
    # Row update: A <- J^dagger A.
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - sp * row_q
    a[q, :] = spc * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vcol_p = v[:, p].copy()
    vcol_q = v[:, q].copy()
    v[:, p] = c * vcol_p - spc * vcol_q
    v[:, q] = sp * vcol_p + c * vcol_q


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(h, tol: float = TOL_HERM) -> Spectrum:
    """Deterministic eigendecomposition of a Hermitian matrix.

    Uses cyclic Jacobi rotations in a fixed (row-major) sweep order until the
    off-diagonal Frobenius norm drops below 1e-12 or 100 sweeps elapse, so the
    output is a pure function of the input.  Eigenvectors carry a canonical
    phase (first component above 1e-12 made real positive) and exact eigenvalue
    ties are ordered by decreasing lexicographic order of the phase-fixed
    eigenvectors.
    """
    m = as_complex_matrix(h, "Hermitian input")
    n, cols = m.shape
    if n != cols:
        raise ValidationError(f"Hermitian input must be square, got shape {m.shape}")
    defect = _hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(
            f"Hermiticity violated: max |M_ij - conj(M_ji)| = {defect:.3e} exceeds {tol}"
        )

    a = (m + m.conj().T) / 2.0
    v = np.eye(n, dtype=np.complex128)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _off_norm(a) <= _JACOBI_OFF_TARGET:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 0.0:
                    _jacobi_rotate(a, v, p, q)

    eigvals = np.diag(a).real.copy()

    # Canonical phases before tie-breaking so the sort key is well-defined.
    for j in range(n):
        col = v[:, j]
        nz = np.nonzero(np.abs(col) > _PHASE_FLOOR)[0]
        if nz.size:
            pivot = col[nz[0]]
            v[:, j] = col * (pivot.conjugate() / abs(pivot))

    def sort_key(j: int):
        col = v[:, j]
        parts = np.empty(2 * n)
        parts[0::2] = -col.real
        parts[1::2] = -col.imag
        return (-eigvals[j], tuple(parts))

    order = sorted(range(n), key=sort_key)
    eigvals = eigvals[order]
    vecs = v[:, order]

    gram_defect = float(np.linalg.norm(vecs.conj().T @ vecs - np.eye(n)))
    if gram_defect > TOL_ORTH * max(1.0, float(np.linalg.norm(m))):
        raise ValidationError(f"eigenvector orthonormality defect {gram_defect:.3e}")
    recon = float(np.linalg.norm((vecs * eigvals) @ vecs.conj().T - m))
    if recon > TOL_RECON * max(1.0, float(np.linalg.norm(m))):
        raise ValidationError(f"eigendecomposition reconstruction defect {recon:.3e}")
    return Spectrum(eigenvalues=eigvals, eigenvectors=vecs)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-1 matrix.

    Construct through :func:`validate_density` (or the generators in this
    module); the constructor itself only checks shape.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def spectrum(self) -> Spectrum:
        """Eigendecomposition, cached after the first call."""
        cached = self.__dict__.get("_spectrum")
        if cached is None:
            cached = hermitian_eig(self.matrix)
            object.__setattr__(self, "_spectrum", cached)
        return cached

    def eigenvalues(self) -> np.ndarray:
        return self.spectrum().eigenvalues


def validate_density(m, tol: float = TOL_HERM) -> DensityMatrix:
    """Validate and canonicalize a candidate density matrix.

    Hermiticity, unit trace and positivity are each enforced within ``tol``;
    eigenvalues in [-tol, 0) are clipped to zero and the trace is renormalized
    to exactly 1.  Violations beyond ``tol`` raise a descriptive
    :class:`ValidationError`.
    """
    mat = as_complex_matrix(m, "density matrix")
    n, cols = mat.shape
    if n != cols:
        raise ValidationError(f"density matrix must be square, got shape {mat.shape}")
    defect = _hermiticity_defect(mat)
    if defect > tol:
        raise ValidationError(
            f"Hermiticity violated: max |M_ij - conj(M_ji)| = {defect:.3e} exceeds {tol}"
        )
    trace = complex(np.trace(mat))
    if abs(trace - 1.0) > tol:
        raise ValidationError(f"trace {trace.real!r} deviates from 1 by more than {tol}")

    spect = hermitian_eig(mat, tol=tol)
    lam = spect.eigenvalues
    if lam[-1] < -tol:
        raise ValidationError(f"eigenvalue {lam[-1]!r} < -{tol}: matrix is not positive semidefinite")
    lam = np.where(lam < 0.0, 0.0, lam)
    lam = lam / lam.sum()
    vecs = spect.eigenvectors
    clean = (vecs * lam) @ vecs.conj().T
    clean = (clean + clean.conj().T) / 2.0
    rho = DensityMatrix(matrix=clean)
    object.__setattr__(rho, "_spectrum", Spectrum(eigenvalues=lam, eigenvectors=vecs))
    return rho


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Seeded random density matrix of the requested dimension and rank.

    Draws a complex Gaussian G of shape (dim, rank) and returns
    G G^dagger / trace(G G^dagger), so exactly ``rank`` eigenvalues are
    positive (almost surely) and identical seeds give identical matrices.
    """
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank must satisfy 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return validate_density(m)


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Seeded Haar-random unitary via QR of a complex Gaussian matrix."""
    if dim < 1:
        raise ValidationError(f"dimension must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def complete_basis(columns: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full deterministic orthonormal basis.

    Candidates are the standard basis vectors in index order; each is
    orthogonalized against the accepted columns and kept when the residual is
    numerically independent.
    """
    cols = [np.asarray(c, dtype=np.complex128) for c in np.atleast_2d(columns).T] if columns.size else []
    out = list(cols)
    for j in range(dim):
        if len(out) == dim:
            break
        cand = np.zeros(dim, dtype=np.complex128)
        cand[j] = 1.0
        for b in out:
            cand = cand - b * (b.conj() @ cand)
        norm = float(np.linalg.norm(cand))
        if norm > 1e-6:
            out.append(cand / norm)
    if len(out) != dim:
        raise ValidationError("could not complete orthonormal basis: input columns are degenerate")
    return np.column_stack(out)
