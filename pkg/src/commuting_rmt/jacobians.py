"""Tangent spaces, Jacobian factors and finite-difference Gram oracles.

Charts are evaluated in ambient real coordinates: the real and imaginary
parts of every entry of every component, flattened. One Gram formula then
serves Hermitian and general tuples. For a complex-linear chart
derivative J the real Gram determinant sqrt(det(J_R^T J_R)) equals
|det(J* J)|, which is how complex Jacobian factors are compared with it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateEigenvalues,
    ShapeMismatch,
    UnstableDerivative,
    UnsupportedSize,
    WrongCase,
)
from .tuples import EigenConfig, MatrixTuple


def realify(mats: np.ndarray) -> np.ndarray:
    """Flatten a complex array to its real coordinates (real parts, then imaginary)."""
    mats = np.asarray(mats, dtype=complex).ravel()
    return np.concatenate([mats.real, mats.imag])


def _as_array(X) -> np.ndarray:
    return X.matrices if isinstance(X, MatrixTuple) else np.asarray(X, dtype=complex)


def _constraint_residual(Q: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Stack of [Q^r, Z^s] - [Q^s, Z^r] over r < s, shape (pairs, n, n)."""
    d = Q.shape[0]
    out = []
    for r in range(d):
        for s in range(r + 1, d):
            out.append(Q[r] @ Z[s] - Z[s] @ Q[r] - Q[s] @ Z[r] + Z[r] @ Q[s])
    if not out:
        return np.zeros((0,) + Q.shape[1:], dtype=complex)
    return np.array(out)


def tangent_check(Q, Z, tol: float = 1e-10) -> bool:
    """True if Z satisfies [Q^r, Z^s] = [Q^s, Z^r] for all r != s, within tol."""
    Qa, Za = _as_array(Q), _as_array(Z)
    if Qa.shape != Za.shape:
        raise ShapeMismatch(f"{Qa.shape} vs {Za.shape}")
    res = _constraint_residual(Qa, Za)
    if res.shape[0] == 0:
        return True
    return bool(np.max(np.linalg.norm(res, axis=(1, 2))) <= tol)


def tangent_from_generator(lam: EigenConfig, B: np.ndarray, E: np.ndarray | None = None) -> np.ndarray:
    """Tangent vector [B, D] + E at the diagonal tuple D = diag(lam).

    Component r has off-diagonal entries B_ij (lam_j^r - lam_i^r) and the
    diagonal of E^r.
    """
    pts = np.asarray(lam.points, dtype=complex)
    n, d = pts.shape
    B = np.array(B, dtype=complex)
    np.fill_diagonal(B, 0)
    Z = B[None] * (pts.T[:, None, :] - pts.T[:, :, None])
    if E is not None:
        E = np.asarray(E, dtype=complex).reshape(d, n)
        Z = Z + np.einsum("ri,ij->rij", E, np.eye(n))
    return Z


def _space_basis(n: int, d: int, triangular: bool, hermitian: bool) -> np.ndarray:
    """Real basis of the tuple space, shape (dim, d, n, n)."""
    basis = []
    for r in range(d):
        for i in range(n):
            for j in range(n):
                if triangular and j < i:
                    continue
                if hermitian:
                    if j < i:
                        continue
                    m = np.zeros((d, n, n), dtype=complex)
                    if i == j:
                        m[r, i, i] = 1.0
                        basis.append(m)
                        continue
                    m[r, i, j] = m[r, j, i] = 1.0
                    basis.append(m)
                    m = np.zeros((d, n, n), dtype=complex)
                    m[r, i, j], m[r, j, i] = 1j, -1j
                    basis.append(m)
                    continue
                for unit in (1.0, 1j):
                    m = np.zeros((d, n, n), dtype=complex)
                    m[r, i, j] = unit
                    basis.append(m)
    return np.array(basis)


def _null_dimension(Q: np.ndarray, basis: np.ndarray, rel_tol: float = 1e-9) -> int:
    if Q.shape[0] < 2:
        return basis.shape[0]
    cols = np.array([realify(_constraint_residual(Q, b)) for b in basis]).T
    sv = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(sv > rel_tol * sv[0])) if sv.size and sv[0] > 0 else 0
    return basis.shape[0] - rank


def _check_distinct(pts: np.ndarray) -> None:
    n = pts.shape[0]
    scale = max(1.0, float(np.max(np.abs(pts), initial=0.0)))
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) <= 1e-9 * scale:
                raise DegenerateEigenvalues(f"joint eigenvalues {i} and {j} coincide")


def tangent_dimension(D, triangular_only: bool = False, hermitian: bool = False) -> int:
    """Real dimension of the tangent space at a diagonal tuple D.

    The solution space of [D^r, Z^s] = [D^s, Z^r] over complex Z (or
    self-adjoint Z with ``hermitian``), optionally restricted to upper
    triangular Z, measured by numerical rank.
    """
    Da = _as_array(D)
    d, n, _ = Da.shape
    off = Da.copy()
    for r in range(d):
        np.fill_diagonal(off[r], 0)
    if np.linalg.norm(off) > 1e-12 * max(1.0, float(np.linalg.norm(Da))):
        raise ValueError("D must be diagonal")
    _check_distinct(np.diagonal(Da, axis1=1, axis2=2).T)
    basis = _space_basis(n, d, triangular_only, hermitian)
    return _null_dimension(Da, basis)


class KappaCase(enum.Enum):
    DIAGONAL = "Diagonal"
    D1 = "D1"
    N2 = "N2"


def _vandermonde_sq(pts: np.ndarray) -> float:
    n = pts.shape[0]
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            out *= float(np.sum(np.abs(pts[i] - pts[j]) ** 2))
    return out


def kappa_closed_form(case: KappaCase | str, data) -> float:
    """Jacobian factor kappa with its unknown constant set to 1.

    Diagonal: ``data`` is the diagonal tuple or its EigenConfig.
    D1: ``data`` is a single matrix (or 1-tuple); its eigenvalues are used.
    N2: ``data`` is a pair (lambda1, lambda2) of points of C^d, or a 2 x 2 tuple.
    """
    case = KappaCase(case) if not isinstance(case, KappaCase) else case
    if case is KappaCase.DIAGONAL:
        if isinstance(data, EigenConfig):
            return _vandermonde_sq(data.points)
        Da = _as_array(data)
        if Da.ndim != 3 or np.any(Da * (1 - np.eye(Da.shape[1])) != 0):
            raise WrongCase("Diagonal case needs a diagonal tuple")
        return _vandermonde_sq(np.diagonal(Da, axis1=1, axis2=2).T)
    if case is KappaCase.D1:
        m = _as_array(data)
        if m.ndim == 3:
            if m.shape[0] != 1:
                raise WrongCase("D1 case needs a single matrix")
            m = m[0]
        return _vandermonde_sq(np.linalg.eigvals(m)[:, None])
    if isinstance(data, MatrixTuple) or (isinstance(data, np.ndarray) and data.ndim == 3):
        m = _as_array(data)
        if m.shape[1] != 2:
            raise WrongCase("N2 case needs 2 x 2 matrices")
        pts = np.diagonal(m, axis1=1, axis2=2).T
        return _vandermonde_sq(pts)
    l1, l2 = (np.atleast_1d(np.asarray(v, dtype=complex)) for v in data)
    return float(np.sum(np.abs(l2 - l1) ** 2))


def gamma_matrix_2x2(lambda1, lambda2, alpha: complex) -> np.ndarray:
    """The Hermitian matrix dG* dG for (D, A) -> A D A^-1 at n = 2.

    Basis order: xi_1^1..xi_1^d, xi_2^1..xi_2^d, E_12.
    """
    l1 = np.atleast_1d(np.asarray(lambda1, dtype=complex))
    l2 = np.atleast_1d(np.asarray(lambda2, dtype=complex))
    d = l1.shape[0]
    delta = l2 - l1
    a2 = abs(alpha) ** 2
    eye = np.eye(d)
    G = np.zeros((2 * d + 1, 2 * d + 1), dtype=complex)
    G[:d, :d] = (1 + a2) * eye
    G[d : 2 * d, d : 2 * d] = (1 + a2) * eye
    G[:d, d : 2 * d] = -a2 * eye
    G[d : 2 * d, :d] = -a2 * eye
    G[:d, -1] = -np.conj(alpha) * delta
    G[d : 2 * d, -1] = np.conj(alpha) * delta
    G[-1, :d] = -alpha * np.conj(delta)
    G[-1, d : 2 * d] = alpha * np.conj(delta)
    G[-1, -1] = np.sum(np.abs(delta) ** 2)
    return G


def gamma_det_closed(d: int, lambda1, lambda2, alpha: complex) -> float:
    """det Gamma = (1 + 2|alpha|^2)^(d-1) |lambda2 - lambda1|^2 via a Schur complement.

    The leading 2d x 2d block is d copies of [[1+a, -a], [-a, 1+a]], a = |alpha|^2,
    each of determinant 1 + 2a. Its coupling to E_12 in slot r is
    alpha-bar (lambda2^r - lambda1^r) (-1, 1), an eigenvector of the block
    with eigenvalue 1 + 2a.
    """
    l1 = np.atleast_1d(np.asarray(lambda1, dtype=complex)).reshape(d)
    l2 = np.atleast_1d(np.asarray(lambda2, dtype=complex)).reshape(d)
    a2 = abs(alpha) ** 2
    s2 = float(np.sum(np.abs(l2 - l1) ** 2))
    block = np.array([[1 + a2, -a2], [-a2, 1 + a2]])
    block_inv = np.array([[1 + a2, a2], [a2, 1 + a2]]) / (1 + 2 * a2)
    leading = float(np.linalg.det(block)) ** d
    complement = s2
    for r in range(d):
        v = np.conj(alpha) * (l2[r] - l1[r]) * np.array([-1.0, 1.0])
        complement -= float(np.real(np.conj(v) @ block_inv @ v))
    return leading * complement


@dataclass(frozen=True)
class UnipotentParam:
    """Upper triangular matrix with unit diagonal, stored by its strict upper part.

    ``entries`` follow ``numpy.triu_indices(n, 1)`` order.
    """

    n: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex).ravel()
        if e.shape[0] != self.n * (self.n - 1) // 2:
            raise ValueError("wrong number of strictly upper entries")
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_alpha(cls, alpha: complex) -> UnipotentParam:
        return cls(2, np.array([alpha]))

    def matrix(self) -> np.ndarray:
        A = np.eye(self.n, dtype=complex)
        A[np.triu_indices(self.n, 1)] = self.entries
        return A


def conjugate_diagonal(lam: EigenConfig | np.ndarray, A: np.ndarray) -> np.ndarray:
    """Ad_A(D) = A D A^-1 for D = diag(lam), shape (d, n, n)."""
    pts = np.asarray(lam.points if isinstance(lam, EigenConfig) else lam, dtype=complex)
    Ainv = np.linalg.inv(A)
    return np.einsum("ij,rj,jk->rik", A, pts.T, Ainv)


def gamma_matrix(lam: EigenConfig, A: UnipotentParam) -> np.ndarray:
    """dG* dG for G(D, A) = A D A^-1 at general n, from the exact derivative.

    dG(E, B) = Ad_A([A^-1 B, D]) + Ad_A(E) with basis xi_p^r (p-major),
    then E_ij for i < j.
    """
    pts = np.asarray(lam.points, dtype=complex)
    n, d = pts.shape
    Am = A.matrix()
    Ainv = np.linalg.inv(Am)
    cols = []
    for p in range(n):
        for r in range(d):
            v = np.zeros((d, n, n), dtype=complex)
            v[r] = np.outer(Am[:, p], Ainv[p, :])
            cols.append(v.ravel())
    D = np.einsum("rj,jk->rjk", pts.T, np.eye(n))
    for i, j in zip(*np.triu_indices(n, 1)):
        B = np.zeros((n, n), dtype=complex)
        B[i, j] = 1.0
        X = Ainv @ B
        comm = X[None] @ D - D @ X[None]
        cols.append((Am[None] @ comm @ Ainv[None]).ravel())
    J = np.array(cols).T
    return J.conj().T @ J


@dataclass(frozen=True)
class ChartMap:
    """A smooth map from R^domain_dim into ambient real coordinates."""

    domain_dim: int
    embedding: Callable[[np.ndarray], np.ndarray]
    base_point: np.ndarray

    def jacobian(self, step: float) -> np.ndarray:
        x0 = np.asarray(self.base_point, dtype=float)
        cols = []
        for k in range(self.domain_dim):
            e = np.zeros(self.domain_dim)
            e[k] = step
            cols.append((self.embedding(x0 + e) - self.embedding(x0 - e)) / (2 * step))
        return np.array(cols).T


def _gram(J: np.ndarray) -> float:
    sign, logdet = np.linalg.slogdet(J.T @ J)
    return math.exp(0.5 * logdet) if sign > 0 else 0.0


def numeric_gram_jacobian(chart: ChartMap, step: float = 1e-5, check: float = 1e-3) -> float:
    """sqrt(det(J^T J)) from central differences, Richardson-extrapolated.

    Raises UnstableDerivative when halving the step moves the estimate by
    more than ``check`` relative.
    """
    if not 1e-7 <= step <= 1e-3:
        raise ValueError("step must lie in [1e-7, 1e-3]")
    g1 = _gram(chart.jacobian(step))
    g2 = _gram(chart.jacobian(step / 2))
    if g2 == 0.0:
        return 0.0
    if abs(g1 - g2) > check * abs(g2):
        raise UnstableDerivative(f"Gram estimate moved by {abs(g1 - g2) / g2:.2e} on step halving")
    return (4.0 * g2 - g1) / 3.0


def _skew_basis(n: int) -> list[np.ndarray]:
    """R_ij = (E_ij - E_ji)/sqrt2 and S_ij = i(E_ij + E_ji)/sqrt2 for i < j."""
    out = []
    for i, j in zip(*np.triu_indices(n, 1)):
        R = np.zeros((n, n), dtype=complex)
        R[i, j], R[j, i] = 1, -1
        S = np.zeros((n, n), dtype=complex)
        S[i, j] = S[j, i] = 1j
        out += [R / math.sqrt(2), S / math.sqrt(2)]
    return out


def hermitian_chart(lam: EigenConfig) -> ChartMap:
    """(theta, S) -> e^S (D + D_theta) e^-S around the real diagonal tuple D = diag(lam).

    Parameters: theta in R^(dn) (component-major), then one real coordinate
    per R_ij and S_ij.
    """
    pts = np.asarray(lam.points, dtype=float)
    n, d = pts.shape
    skew = _skew_basis(n)

    def embed(x):
        theta = x[: d * n].reshape(d, n)
        S = sum((c * b for c, b in zip(x[d * n :], skew)), np.zeros((n, n), dtype=complex))
        U = scipy.linalg.expm(S)
        diag = pts.T + theta
        X = np.einsum("ij,rj,kj->rik", U, diag, U.conj())
        return realify(X)

    return ChartMap(d * n + n * (n - 1), embed, np.zeros(d * n + n * (n - 1)))


def triangular_chart(lam: EigenConfig, A: UnipotentParam) -> ChartMap:
    """(D~, A~) -> A~ D~ A~^-1 based at (diag(lam), A), in real coordinates."""
    pts = np.asarray(lam.points, dtype=complex)
    n, d = pts.shape
    m = n * (n - 1) // 2
    base = np.concatenate([pts.T.ravel().real, pts.T.ravel().imag, A.entries.real, A.entries.imag])

    def embed(x):
        k = d * n
        diag = (x[:k] + 1j * x[k : 2 * k]).reshape(d, n)
        ent = x[2 * k : 2 * k + m] + 1j * x[2 * k + m :]
        Am = UnipotentParam(n, ent).matrix()
        return realify(conjugate_diagonal(diag.T, Am))

    return ChartMap(base.shape[0], embed, base)


def _tangent_projectors(Q: np.ndarray):
    """Orthonormal bases (ambient real coordinates) of T_Q V and T_Q T."""
    d, n, _ = Q.shape

    def null_basis(basis):
        coords = np.array([realify(b) for b in basis]).T
        if d < 2:
            return scipy.linalg.orth(coords)
        cons = np.array([realify(_constraint_residual(Q, b)) for b in basis]).T
        ns = scipy.linalg.null_space(cons, rcond=1e-9)
        return scipy.linalg.orth(coords @ ns)

    full = null_basis(_space_basis(n, d, False, False))
    tri = null_basis(_space_basis(n, d, True, False))
    return full, tri


def kappa_numeric(Q) -> float:
    """sqrt|det Lambda_Q| at an upper triangular commuting tuple Q.

    Lambda_Q(S1, S2) = <P_perp ad_Q S1, ad_Q S2> on skew-Hermitian S with
    zero diagonal, P_perp projecting onto the complement of the triangular
    tangent space inside the full tangent space.
    """
    Qa = _as_array(Q)
    d, n, _ = Qa.shape
    full, tri = _tangent_projectors(Qa)
    vecs = []
    for S in _skew_basis(n):
        v = realify(Qa @ S - S @ Qa)
        vecs.append(full @ (full.T @ v) - tri @ (tri.T @ v))
    V = np.array(vecs)
    ad = np.array([realify(Qa @ S - S @ Qa) for S in _skew_basis(n)])
    Lam = V @ ad.T
    return math.sqrt(abs(np.linalg.det(Lam)))


def log_integrand_thmd2(lam: EigenConfig, A: UnipotentParam, gamma: float) -> float:
    """log of w1(||D||^2) w2(||Ad_A(D) - D||^2) kappa |det Gamma| for Gaussian weights.

    Integrating exp of this over the unipotent parameters gives the
    eigenvalue density up to a constant. n = 2 uses the closed forms;
    n = 3 evaluates kappa and Gamma numerically.
    """
    pts = np.asarray(lam.points, dtype=complex)
    n, d = pts.shape
    if n > 3:
        raise UnsupportedSize("integrand is available for n <= 3 only")
    Am = A.matrix()
    Q = conjugate_diagonal(pts, Am)
    D = np.einsum("rj,jk->rjk", pts.T, np.eye(n))
    w1 = -gamma * float(np.sum(np.abs(pts) ** 2))
    w2 = -gamma * float(np.sum(np.abs(Q - D) ** 2))
    if n == 2:
        kappa = kappa_closed_form(KappaCase.N2, (pts[0], pts[1]))
        det_gamma = gamma_det_closed(d, pts[0], pts[1], A.entries[0])
    else:
        kappa = kappa_numeric(Q)
        det_gamma = abs(float(np.real(np.linalg.det(gamma_matrix(EigenConfig(pts), A)))))
    if kappa <= 0 or det_gamma <= 0:
        return -math.inf
    return w1 + w2 + math.log(kappa) + math.log(det_gamma)
