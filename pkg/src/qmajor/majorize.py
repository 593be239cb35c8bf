"""Majorization predicate, T-transform chains, ortho-stochastic witnesses, Schur functions.

The constructive pieces follow the classical inductive recipe: repeatedly
average the largest remaining component of the more-ordered vector into the
target value, which yields at most d-1 two-coordinate averaging transforms,
and lift each transform to a plane rotation whose entrywise square is the
transform.  The product of the lifts is then an orthogonal matrix W with
(W o W) y = x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numkernel import TOL_PROB, DomainError, ValidationError, as_complex_matrix


class MajorizationError(DomainError):
    """x is not majorized by y; carries the first failing partial sum."""

    def __init__(self, k: int, lhs: float, rhs: float):
        self.k = k
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"majorization violated at k={k}: {lhs:.6g} > {rhs:.6g}")


def as_prob_vector(weights, tol: float = TOL_PROB, name: str = "probability vector") -> np.ndarray:
    """Validate a probability vector: entries >= -tol (clipped to 0), sum within tol of 1."""
    w = np.array(weights, dtype=np.float64)
    if w.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got ndim={w.ndim}")
    if w.size == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(w)):
        raise ValidationError(f"{name} contains non-finite entries")
    low = float(w.min())
    if low < -tol:
        raise ValidationError(f"{name} entry {low!r} is negative beyond -{tol}")
    w = np.where(w < 0.0, 0.0, w)
    total = float(w.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"{name} sum {total!r} deviates from 1 by more than {tol}")
    return w


def _padded_pair(x, y, tol: float):
    """Coerce to float vectors, reject deep negatives, zero-pad to equal length."""
    xv = np.asarray(x, dtype=np.float64).reshape(-1)
    yv = np.asarray(y, dtype=np.float64).reshape(-1)
    for name, v in (("x", xv), ("y", yv)):
        if v.size == 0:
            raise ValidationError(f"{name} must be non-empty")
        if not np.all(np.isfinite(v)):
            raise ValidationError(f"{name} contains non-finite entries")
        if float(v.min()) < -tol:
            raise ValidationError(f"{name} entry {float(v.min())!r} is negative beyond -{tol}")
    d = max(xv.size, yv.size)
    xv = np.concatenate([np.clip(xv, 0.0, None), np.zeros(d - xv.size)])
    yv = np.concatenate([np.clip(yv, 0.0, None), np.zeros(d - yv.size)])
    return xv, yv


def majorization_violation(x, y, tol: float = TOL_PROB):
    """First failing partial sum of the majorization comparison, or None.

    Returns ``(k, lhs, rhs)`` with 1-based k; k == len(x) flags a total
    mismatch.  Vectors of unequal length are zero-padded.
    """
    xv, yv = _padded_pair(x, y, tol)
    xs = np.sort(xv)[::-1]
    ys = np.sort(yv)[::-1]
    cx = np.cumsum(xs)
    cy = np.cumsum(ys)
    d = xs.size
    for k in range(d - 1):
        if cx[k] > cy[k] + tol:
            return k + 1, float(cx[k]), float(cy[k])
    if abs(cx[-1] - cy[-1]) > tol:
        return d, float(cx[-1]), float(cy[-1])
    return None


def is_majorized_by(x, y, tol: float = TOL_PROB) -> bool:
    """True iff every sorted partial sum of x stays below y's and totals agree."""
    return majorization_violation(x, y, tol) is None


def _require_majorized(x, y, tol: float = TOL_PROB) -> None:
    violation = majorization_violation(x, y, tol)
    if violation is not None:
        raise MajorizationError(*violation)


@dataclass(frozen=True)
class TTransform:
    """Two-coordinate averaging transform: identity except on (i, k).

    On the pair it acts as [[t, 1-t], [1-t, t]] with 0 <= t <= 1.  Indices are
    0-based.
    """

    i: int
    k: int
    t: float

    def __post_init__(self):
        if self.i == self.k:
            raise ValidationError("TTransform indices must differ")
        if self.i < 0 or self.k < 0:
            raise ValidationError("TTransform indices must be non-negative")
        if not 0.0 <= self.t <= 1.0:
            raise ValidationError(f"TTransform parameter t={self.t!r} outside [0, 1]")

    def matrix(self, dim: int) -> np.ndarray:
        """Dense doubly stochastic matrix of the transform."""
        m = np.eye(dim)
        m[self.i, self.i] = m[self.k, self.k] = self.t
        m[self.i, self.k] = m[self.k, self.i] = 1.0 - self.t
        return m

    def orthogonal_lift(self, dim: int) -> np.ndarray:
        """Plane rotation whose entrywise square is the transform matrix."""
        g = np.eye(dim)
        c = float(np.sqrt(self.t))
        s = float(np.sqrt(1.0 - self.t))
        g[self.i, self.i] = g[self.k, self.k] = c
        g[self.i, self.k] = -s
        g[self.k, self.i] = s
        return g


@dataclass(frozen=True)
class TChain:
    """T-transform witness that y can be mixed into x.

    ``transforms`` are listed in application order and act on coordinates of
    the sorted copy of y.  ``source_permutation`` sorts y decreasing
    (w = y[source_permutation]); after applying the transforms the values of
    sorted x sit in a recorded arrangement, and ``target_permutation`` reads
    them back in x's original order (x = w_final[target_permutation]).
    """

    transforms: tuple[TTransform, ...]
    source_permutation: np.ndarray
    target_permutation: np.ndarray

    @classmethod
    def plain(cls, transforms, dim: int) -> "TChain":
        """Chain with identity bookkeeping, for hand-built transform lists."""
        return cls(
            transforms=tuple(transforms),
            source_permutation=np.arange(dim),
            target_permutation=np.arange(dim),
        )

    @property
    def dim(self) -> int:
        return int(self.source_permutation.shape[0])

    def __len__(self) -> int:
        return len(self.transforms)


def _chain_construction(x, y, tol: float = TOL_PROB):
    """Shared constructive core for t_transform_chain and horn_orthogonal.

    Returns (transforms, perm_x, perm_y, placement) where the transforms act
    on coordinates of ys = y[perm_y], and after applying them in order the
    value xs[j] (xs = x[perm_x]) sits at coordinate placement[j].
    """
    _require_majorized(x, y, tol)
    xv, yv = _padded_pair(x, y, tol)
    d = xv.size
    perm_x = np.argsort(-xv, kind="stable")
    perm_y = np.argsort(-yv, kind="stable")
    xs = xv[perm_x]
    w = yv[perm_y].copy()

    # Positions still in play, kept sorted by decreasing current value.  Ties
    # keep insertion order, so the whole walk is deterministic.
    order = list(range(d))
    placement = np.empty(d, dtype=np.intp)
    transforms: list[TTransform] = []

    for step in range(d):
        target = xs[step]
        if len(order) == 1:
            placement[step] = order[0]
            break
        a = order[0]
        # Pair the largest remaining component with the deepest component that
        # does not exceed the target value.
        ge_count = 0
        for pos in order:
            if w[pos] >= target:
                ge_count += 1
            else:
                break
        k = min(ge_count + 1, len(order))
        b = order[k - 1]
        wa, wb = w[a], w[b]
        if wa > wb:
            t = (target - wb) / (wa - wb)
            t = min(1.0, max(0.0, float(t)))
        else:
            t = 1.0
        placement[step] = a
        order.pop(0)
        if t < 1.0:
            transforms.append(TTransform(i=int(a), k=int(b), t=t))
            w[a] = t * wa + (1.0 - t) * wb
            w[b] = (1.0 - t) * wa + t * wb
            # b's value grew: move it left to keep the order sorted, landing
            # before any equal values so the walk stays deterministic.
            order.remove(b)
            lo, hi = 0, len(order)
            while lo < hi:
                mid = (lo + hi) // 2
                if w[order[mid]] > w[b]:
                    lo = mid + 1
                else:
                    hi = mid
            order.insert(lo, b)
    return transforms, perm_x, perm_y, placement


def t_transform_chain(x, y, tol: float = TOL_PROB) -> TChain:
    """Constructive witness for x majorized by y, at most d-1 transforms long.

    Raises :class:`MajorizationError` naming the first failing partial sum
    when the precondition does not hold.
    """
    transforms, perm_x, perm_y, placement = _chain_construction(x, y, tol)
    d = perm_x.size
    target_permutation = np.empty(d, dtype=np.intp)
    target_permutation[perm_x] = placement
    return TChain(
        transforms=tuple(transforms),
        source_permutation=perm_y,
        target_permutation=target_permutation,
    )


def apply_t_chain(chain: TChain, y) -> np.ndarray:
    """Apply a chain (with its recorded permutations) to y.

    The result is a probability-like vector: averaging transforms preserve
    nonnegativity and the total.
    """
    yv = np.asarray(y, dtype=np.float64).reshape(-1)
    d = chain.dim
    if yv.size > d:
        raise ValidationError(f"vector of length {yv.size} exceeds chain dimension {d}")
    if yv.size < d:
        yv = np.concatenate([yv, np.zeros(d - yv.size)])
    w = yv[chain.source_permutation].copy()
    for tr in chain.transforms:
        wa, wb = w[tr.i], w[tr.k]
        w[tr.i] = tr.t * wa + (1.0 - tr.t) * wb
        w[tr.k] = (1.0 - tr.t) * wa + tr.t * wb
    return w[chain.target_permutation]


@dataclass(frozen=True)
class HornWitness:
    """Orthogonal matrix whose entrywise square carries y onto x.

    ``doubly_stochastic`` equals ``orthogonal`` squared entry by entry (the
    square of each component, not of the matrix), and maps y to x in their
    original orderings.
    """

    orthogonal: np.ndarray
    doubly_stochastic: np.ndarray


def horn_orthogonal(x, y, tol: float = TOL_PROB) -> HornWitness:
    """Build an ortho-stochastic witness D = W o W with D y = x.

    The transform chain for (x, y) is lifted rotation by rotation; because
    each step retires the coordinate it fixes, the product of the lifts
    squares entrywise to the product of the transforms.  Sorting and
    placement bookkeeping enter as permutation matrices, which commute with
    the entrywise square.
    """
    transforms, perm_x, perm_y, placement = _chain_construction(x, y, tol)
    d = perm_x.size
    w0 = np.eye(d)
    for tr in transforms:
        w0 = tr.orthogonal_lift(d) @ w0
    # Read the placement arrangement back into sorted-x order, then undo both
    # sorts so the witness acts on the original orderings.
    s0 = np.zeros((d, d))
    s0[np.arange(d), placement] = 1.0
    p_x = np.zeros((d, d))
    p_x[np.arange(d), perm_x] = 1.0
    p_y = np.zeros((d, d))
    p_y[np.arange(d), perm_y] = 1.0
    w = p_x.T @ s0 @ w0 @ p_y
    witness = HornWitness(orthogonal=w, doubly_stochastic=w * w)

    gram = float(np.linalg.norm(w @ w.T - np.eye(d)))
    if gram > 1e-10:
        raise ValidationError(f"orthogonality defect {gram:.3e} in constructed witness")
    return witness


def unitary_to_stochastic(u, tol: float = 1e-9) -> np.ndarray:
    """Entrywise squared moduli of a unitary matrix; doubly stochastic."""
    m = as_complex_matrix(u, "unitary")
    n, cols = m.shape
    if n != cols:
        raise ValidationError(f"unitary must be square, got shape {m.shape}")
    defect = float(np.linalg.norm(m @ m.conj().T - np.eye(n)))
    if defect > tol:
        raise ValidationError(f"unitarity defect {defect:.3e} exceeds {tol}")
    d = np.abs(m) ** 2
    return d


def _neg_entropy(x: np.ndarray) -> float:
    pos = x[x > 0.0]
    return float(np.sum(pos * np.log(pos)))


def _xlogx(u: float) -> float:
    return u * np.log(u) if u > 0.0 else 0.0


SCHUR_FUNCTION_NAMES = ("neg_entropy", "power_sum", "neg_product", "neg_max")

# Convex scalar functions f; each induces the Schur-convex map
# x -> sum_i f(x_i) on probability vectors.
CONVEX_SCALAR_REGISTRY: dict[str, Callable[[float], float]] = {
    "square": lambda u: u * u,
    "cube": lambda u: u * u * u,
    "exp": np.exp,
    "xlogx": _xlogx,
    "neg_sqrt": lambda u: -np.sqrt(u),
}


def schur_value(name: str, x, k: float | None = None) -> float:
    """Evaluate a built-in Schur-convex function on a probability vector.

    ``neg_entropy`` is sum(x log x) with 0 log 0 := 0 (natural log);
    ``power_sum`` is sum(x**k) and requires k >= 1; ``neg_product`` is
    -prod(x); ``neg_max`` is minus the largest component.
    """
    w = as_prob_vector(x, name="x")
    if name == "neg_entropy":
        return _neg_entropy(w)
    if name == "power_sum":
        if k is None:
            raise ValidationError("power_sum requires the exponent k")
        if k < 1.0:
            raise ValidationError(f"power_sum exponent k={k!r} must be >= 1")
        return float(np.sum(w**k))
    if name == "neg_product":
        return float(-np.prod(w))
    if name == "neg_max":
        return float(-np.max(w))
    raise ValidationError(f"unknown Schur-convex function id {name!r}")


@dataclass(frozen=True)
class SchurEntry:
    name: str
    value_x: float
    value_y: float

    @property
    def slack(self) -> float:
        return self.value_y - self.value_x


@dataclass(frozen=True)
class SchurReport:
    """All built-in Schur-convex comparisons for a majorized pair."""

    entries: tuple[SchurEntry, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(e.value_x <= e.value_y + self.tol for e in self.entries)


_POWER_SUM_EXPONENTS = (1.5, 2.0, 3.0)


def check_schur_inequalities(x, y, tol: float = 1e-9) -> SchurReport:
    """Evaluate every built-in Schur-convex function on a majorized pair.

    Requires x majorized by y and asserts f(x) <= f(y) + tol for each
    function; a violation raises, since it would contradict the order.  Note
    the largest component enters with a plus sign: max is Schur-convex
    (its negation is not, despite being a popular disorder measure).
    """
    _require_majorized(x, y, tol=max(tol, TOL_PROB))
    xv, yv = _padded_pair(x, y, max(tol, TOL_PROB))
    entries: list[SchurEntry] = []
    entries.append(SchurEntry("neg_entropy", _neg_entropy(xv), _neg_entropy(yv)))
    for k in _POWER_SUM_EXPONENTS:
        entries.append(
            SchurEntry(f"power_sum[k={k:g}]", float(np.sum(xv**k)), float(np.sum(yv**k)))
        )
    entries.append(SchurEntry("neg_product", float(-np.prod(xv)), float(-np.prod(yv))))
    entries.append(SchurEntry("max_component", float(np.max(xv)), float(np.max(yv))))
    for fname, f in CONVEX_SCALAR_REGISTRY.items():
        entries.append(
            SchurEntry(
                f"sum[{fname}]",
                float(sum(f(u) for u in xv)),
                float(sum(f(u) for u in yv)),
            )
        )
    report = SchurReport(entries=tuple(entries), tol=tol)
    if not report.passed:
        worst = min(report.entries, key=lambda e: e.slack)
        raise ValidationError(
            f"Schur-convex inequality violated for {worst.name}: "
            f"{worst.value_x!r} > {worst.value_y!r} + {tol}"
        )
    return report
