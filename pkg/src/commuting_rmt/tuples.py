"""Commuting matrix tuples: arithmetic, joint spectra and dimension counts.

A d-tuple of n x n matrices is stored as a complex array of shape (d, n, n).
Joint eigenvalues are stored as an (n, d) array, one row per eigenvalue.
Configurations are compared as multisets; no ordering is ever implied.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    CommutatorTooLarge,
    DegenerateCombination,
    InvalidBanner,
    NotHermitian,
    NotUnitary,
)

ALGEBRAIC_TOL = 1e-12
SPECTRAL_TOL = 1e-8


def _is_self_adjoint(m: np.ndarray, tol: float) -> bool:
    scale = max(1.0, float(np.linalg.norm(m)))
    return float(np.linalg.norm(m - m.conj().T)) <= tol * scale


@dataclass(frozen=True)
class MatrixTuple:
    """An immutable d-tuple (X^1, ..., X^d) of n x n complex matrices."""

    matrices: np.ndarray
    hermitian_flag: bool = False

    def __post_init__(self):
        m = np.array(self.matrices, dtype=complex)
        if m.ndim == 2:
            m = m[None]
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValueError(f"expected shape (d, n, n), got {m.shape}")
        if self.hermitian_flag:
            for r, comp in enumerate(m):
                if not _is_self_adjoint(comp, ALGEBRAIC_TOL):
                    raise NotHermitian(f"component {r} is not self-adjoint")
        m.setflags(write=False)
        object.__setattr__(self, "matrices", m)

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __getitem__(self, r: int) -> np.ndarray:
        return self.matrices[r]

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.matrices) ** 2)))

    def conjugate_by(self, U: np.ndarray) -> MatrixTuple:
        """Return (U X^1 U*, ..., U X^d U*)."""
        m = U @ self.matrices @ U.conj().T
        return MatrixTuple(m, self.hermitian_flag)


@dataclass(frozen=True)
class EigenConfig:
    """n joint eigenvalues, each a point of R^d or C^d (rows of ``points``)."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2:
            raise ValueError(f"expected shape (n, d), got {p.shape}")
        if np.iscomplexobj(p) and np.all(p.imag == 0):
            p = p.real
        p = np.array(p, dtype=complex if np.iscomplexobj(p) else float)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.points)

    def permuted(self, perm: Sequence[int]) -> EigenConfig:
        return EigenConfig(self.points[np.asarray(perm)])


@dataclass(frozen=True)
class Banner:
    """Multiplicity pattern r_1 >= ... >= r_p >= 1 of a self-adjoint matrix."""

    multiplicities: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        mult = tuple(int(r) for r in self.multiplicities)
        if not mult or any(r < 1 for r in mult):
            raise InvalidBanner(f"multiplicities must be positive: {mult}")
        if any(a < b for a, b in zip(mult, mult[1:])):
            raise InvalidBanner(f"multiplicities must be non-increasing: {mult}")
        object.__setattr__(self, "multiplicities", mult)

    @property
    def p(self) -> int:
        return len(self.multiplicities)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)


class Irreducibility(enum.Enum):
    IRREDUCIBLE = "Irreducible"
    REDUCIBLE = "Reducible"
    UNKNOWN = "Unknown"


def commutator_defect(X: MatrixTuple) -> float:
    """Largest Frobenius norm of a pairwise commutator [X^r, X^s], r < s."""
    worst = 0.0
    for r in range(X.d):
        for s in range(r + 1, X.d):
            c = X[r] @ X[s] - X[s] @ X[r]
            worst = max(worst, float(np.linalg.norm(c)))
    return worst


def haar_unitary(n: int, rng=None) -> np.ndarray:
    """Draw an n x n unitary from Haar measure.

    QR of a complex Ginibre matrix, with each column of Q rotated by the phase
    of the matching diagonal entry of R so that R has a positive diagonal.
    """
    rng = np.random.default_rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases[None, :]


def _check_unitary(U: np.ndarray, tol: float) -> None:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotUnitary(f"not a square matrix: shape {U.shape}")
    err = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if err > tol:
        raise NotUnitary(f"||U*U - I||_F = {err:.3e} exceeds {tol:.1e}")


def reconstruct_tuple(lam: EigenConfig, U: np.ndarray, tol: float = ALGEBRAIC_TOL) -> MatrixTuple:
    """Build the commuting tuple (U diag(lam^1) U*, ..., U diag(lam^d) U*)."""
    U = np.asarray(U, dtype=complex)
    _check_unitary(U, tol)
    if U.shape[0] != lam.n:
        raise ValueError(f"U is {U.shape[0]}x{U.shape[0]} but lam has {lam.n} points")
    pts = lam.points
    mats = np.einsum("ij,rj,kj->rik", U, pts.T, U.conj())
    hermitian = lam.is_real
    if hermitian:
        mats = 0.5 * (mats + np.swapaxes(mats, 1, 2).conj())
    return MatrixTuple(mats, hermitian)


def multi_spectrum(
    X: MatrixTuple,
    tol: float = SPECTRAL_TOL,
    rng=None,
    max_tries: int = 8,
) -> EigenConfig:
    """Joint eigenvalues of a commuting tuple, read off a simultaneous Schur form.

    One complex Schur decomposition of sum_r c_r X^r, with c uniform on the
    unit sphere, supplies a unitary that triangularizes every component. A
    draw of c that leaves some component visibly non-triangular, or that
    merges two distinct joint eigenvalues, is discarded and redrawn.
    """
    defect = commutator_defect(X)
    if defect > tol:
        raise CommutatorTooLarge(f"commutator defect {defect:.3e} exceeds {tol:.1e}")
    rng = np.random.default_rng(rng)
    scale = max(X.frobenius_norm(), np.finfo(float).tiny)
    lower_mask = np.tril(np.ones((X.n, X.n), dtype=bool), -1)
    iu = np.triu_indices(X.n, 1)

    for _ in range(max_tries):
        c = rng.standard_normal(X.d)
        c /= np.linalg.norm(c)
        combo = np.tensordot(c, X.matrices, axes=1)
        T, U = scipy.linalg.schur(combo, output="complex")
        tri = U.conj().T @ X.matrices @ U
        residual = np.linalg.norm(tri[:, lower_mask]) / scale
        pts = np.diagonal(tri, axis1=1, axis2=2).T
        if X.hermitian_flag:
            pts = pts.real
        if residual > 1e-6:
            continue
        if X.n > 1:
            joint_gap = np.linalg.norm(pts[iu[0]] - pts[iu[1]], axis=1)
            combo_gap = np.abs(np.diagonal(T)[iu[0]] - np.diagonal(T)[iu[1]])
            merged = (joint_gap > 1e-8 * scale) & (combo_gap < 1e-6 * joint_gap)
            if np.any(merged):
                continue
        return EigenConfig(pts)
    raise DegenerateCombination(f"no separating combination found in {max_tries} tries")


def multiset_distance(a: EigenConfig, b: EigenConfig) -> float:
    """Largest point distance under the best matching of two configurations."""
    if a.points.shape != b.points.shape:
        raise ValueError("configurations differ in shape")
    pa, pb = a.points, b.points
    if a.is_real and b.is_real and a.d == 1:
        return float(np.max(np.abs(np.sort(pa[:, 0]) - np.sort(pb[:, 0])), initial=0.0))
    cost = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols], initial=0.0))


def same_multiset(a: EigenConfig, b: EigenConfig, rtol: float = SPECTRAL_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(a.points), initial=0.0)))
    return multiset_distance(a, b) <= rtol * scale


def hoffman_wielandt_gap(A: np.ndarray, B: np.ndarray) -> tuple[float, float]:
    """Both sides of the Hoffman-Wielandt inequality for self-adjoint A, B.

    Returns (sum_j |mu_j(A) - mu_j(B)|^2, ||A - B||_F^2) with both spectra
    sorted in descending order. The first never exceeds the second.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    for name, m in (("A", A), ("B", B)):
        if not _is_self_adjoint(m, ALGEBRAIC_TOL):
            raise NotHermitian(f"{name} is not self-adjoint")
    mu_a = np.linalg.eigvalsh(A)[::-1]
    mu_b = np.linalg.eigvalsh(B)[::-1]
    lhs = float(np.sum((mu_a - mu_b) ** 2))
    rhs = float(np.linalg.norm(A - B) ** 2)
    return lhs, rhs


def dim_banner_stratum(n: int, d: int, banner: Banner | Sequence[int]) -> int:
    """Real dimension of the Hermitian tuples whose first component has ``banner``."""
    if not isinstance(banner, Banner):
        banner = Banner(tuple(banner))
    if banner.total != n:
        raise InvalidBanner(f"banner {banner.multiplicities} does not sum to n={n}")
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return n * n - sum(r * r for r in banner.multiplicities) + banner.p
    return n * n + (d - 2) * n + banner.p


def dim_variety(n: int, d: int, hermitian: bool) -> int:
    """Dimension of the commuting variety: real if hermitian, else complex.

    Both equal n^2 + (d-1)n; the non-Hermitian count assumes irreducibility.
    The real dimension of a non-Hermitian variety is twice the return value.
    """
    return n * n + (d - 1) * n


def irreducibility_status(d: int, n: int) -> Irreducibility:
    """Known irreducibility of the variety of commuting d-tuples of n x n matrices.

    A lookup table of the classical results, not a decision procedure.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    if d <= 2 or n <= 3:
        return Irreducibility.IRREDUCIBLE
    if d == 3:
        if n <= 10:
            return Irreducibility.IRREDUCIBLE
        if n >= 29:
            return Irreducibility.REDUCIBLE
        return Irreducibility.UNKNOWN
    # d >= 4, n >= 4: V^4_4 is reducible and the defect embeds upward
    return Irreducibility.REDUCIBLE
