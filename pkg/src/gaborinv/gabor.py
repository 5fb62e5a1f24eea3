"""Finite Gabor model on C^L.

Conventions (fixed throughout the package):

* translation   (T_t f)[n] = f[n - t]  (cyclic),
* modulation    (M_m f)[n] = exp(2*pi*i*m*n/L) f[n],
* TF shift      pi(t, m) = T_t M_m = exp(-2*pi*i*t*m/L) M_m T_t.

A system is the family {pi(k*a, l*b) g} with a | L and b | L, so there are
N = L/a time positions and M = L/b modulations.  The continuous parameters
map as alpha <-> a samples, beta <-> b bins, and the adjoint lattice
(1/beta, 1/alpha) <-> (L/b samples, L/a bins); the product alpha*beta
corresponds to a*b/L.

Dense L x L matrices throughout; matrices are never mutated after
construction and all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InvalidLattice, InvalidParameter, ZeroWindow

DEFAULT_RANK_TOL = 1e-8

__all__ = [
    "FiniteGaborSystem",
    "WalnutCoefficients",
    "SubspaceBasis",
    "FrameBounds",
    "DualWindowResult",
    "tf_shift",
    "shift_operator",
    "gabor_matrix",
    "frame_operator_direct",
    "frame_operator_walnut",
    "canonical_dual",
    "frame_bounds",
    "cross_frame_operator",
    "janssen_representation",
    "periodized_gaussian",
    "support_space",
    "is_hermitian",
    "orthonormal_range",
]


def tf_shift(f: np.ndarray, t: int, m: int) -> np.ndarray:
    """Apply pi(t, m) = T_t M_m to a length-L signal (indices mod L)."""
    f = np.asarray(f)
    L = f.shape[0]
    n = np.arange(L)
    return np.roll(np.exp(2j * np.pi * (m % L) * n / L) * f, t % L)


def shift_operator(L: int, t: int, m: int) -> np.ndarray:
    """The L x L matrix of pi(t, m)."""
    n = np.arange(L)
    D = np.exp(2j * np.pi * (m % L) * n / L)
    P = np.roll(np.eye(L), t % L, axis=0)
    return P * D[np.newaxis, :]


def is_hermitian(A: np.ndarray, rtol: float = 1e-10) -> bool:
    """Hermitian flag: ||A^H - A||_F <= rtol * ||A||_F."""
    nrm = np.linalg.norm(A)
    if nrm == 0:
        return True
    return np.linalg.norm(A.conj().T - A) <= rtol * nrm


@dataclass(frozen=True)
class FiniteGaborSystem:
    """Window plus integer lattice steps (a, b), both dividing L."""

    L: int
    a: int
    b: int
    window: np.ndarray

    def __post_init__(self):
        if self.L < 1:
            raise InvalidLattice("L must be positive")
        if self.a < 1 or self.b < 1 or self.L % self.a or self.L % self.b:
            raise InvalidLattice(
                f"steps must divide L: L={self.L}, a={self.a}, b={self.b}"
            )
        w = np.asarray(self.window, dtype=complex)
        if w.shape != (self.L,):
            raise InvalidLattice("window length must equal L")
        object.__setattr__(self, "window", w)

    @property
    def n_time(self) -> int:
        return self.L // self.a

    @property
    def n_freq(self) -> int:
        return self.L // self.b

    @property
    def redundancy(self) -> float:
        return self.L / (self.a * self.b)


@dataclass(frozen=True)
class WalnutCoefficients:
    """Coefficient vectors G_q, q = 0..b-1, of S = scale * sum_q diag(G_q) T_{qL/b}.

    G_0 = sum_k |T_{ka} g|^2 is real, non-negative and a-periodic; `scale`
    records the constant (L/b) that makes the representation match the
    directly assembled frame operator.
    """

    G: np.ndarray  # (b, L) complex
    scale: float


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace, with the rank tolerance used."""

    columns: np.ndarray  # (L, r)
    rank_tol: float

    def __post_init__(self):
        q = np.asarray(self.columns, dtype=complex)
        object.__setattr__(self, "columns", q)
        if q.size:
            gram = q.conj().T @ q
            if np.linalg.norm(gram - np.eye(q.shape[1])) > 1e-10 * max(
                1.0, np.sqrt(q.shape[1])
            ):
                raise ValueError("columns are not orthonormal")

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def project(self, f: np.ndarray) -> np.ndarray:
        return self.columns @ (self.columns.conj().T @ f)

    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T


class FrameBounds(NamedTuple):
    lower: float
    upper: float
    rank: int
    is_riesz_sequence: bool


class DualWindowResult(NamedTuple):
    gamma: np.ndarray
    S_pinv: np.ndarray
    span: SubspaceBasis


def gabor_matrix(sys: FiniteGaborSystem) -> np.ndarray:
    """Synthesis matrix, one column pi(k*a, l*b) g per lattice point.

    Column order: index l*N + k (time index k fastest), N = L/a.
    """
    L, a, b, g = sys.L, sys.a, sys.b, sys.window
    N, M = L // a, L // b
    n = np.arange(L)
    cols = np.empty((L, N * M), dtype=complex)
    for l in range(M):
        mod = np.exp(2j * np.pi * (l * b) * n / L) * g
        for k in range(N):
            cols[:, l * N + k] = np.roll(mod, k * a)
    return cols


def frame_operator_direct(sys: FiniteGaborSystem) -> np.ndarray:
    """S = D D^H for the synthesis matrix D; Hermitian positive semidefinite."""
    D = gabor_matrix(sys)
    return D @ D.conj().T


def frame_operator_walnut(
    sys: FiniteGaborSystem,
) -> tuple[np.ndarray, WalnutCoefficients]:
    """Assemble S as (L/b) * sum_{q=0}^{b-1} diag(G_q) T_{q L/b}.

    G_q[n] = sum_{k=0}^{N-1} g[n - k a] conj(g[n - q L/b - k a]); the result
    equals `frame_operator_direct` up to rounding (the scale L/b is the
    finite counterpart of 1/beta).
    """
    L, a, b, g = sys.L, sys.a, sys.b, sys.window
    N = L // a
    step = L // b
    G = np.empty((b, L), dtype=complex)
    shifts = np.stack([np.roll(g, k * a) for k in range(N)])  # (N, L)
    for q in range(b):
        G[q] = np.einsum("kn,kn->n", shifts, np.conj(np.roll(shifts, q * step, axis=1)))
    S = np.zeros((L, L), dtype=complex)
    eye = np.eye(L)
    for q in range(b):
        # diag(G_q) @ T_{q step}; rolling rows down by s realizes T_s
        S += G[q][:, None] * np.roll(eye, q * step, axis=0)
    scale = L / b
    return scale * S, WalnutCoefficients(G=G, scale=scale)


def orthonormal_range(
    A: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL
) -> SubspaceBasis:
    """Orthonormal basis of the numerical column space of A."""
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return SubspaceBasis(np.zeros((A.shape[0], 0), dtype=complex), rank_tol)
    r = int(np.sum(s > rank_tol * s[0]))
    return SubspaceBasis(U[:, :r], rank_tol)


def numerical_rank(A: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def canonical_dual(
    sys: FiniteGaborSystem, rank_tol: float = DEFAULT_RANK_TOL
) -> DualWindowResult:
    """Dual window gamma = S^+ g via the spectral pseudoinverse of S.

    Eigenvalues above rank_tol * lambda_max are inverted, the rest dropped;
    the retained eigenvectors span ran(S), the space the system spans.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    S = frame_operator_direct(sys)
    lam, V = np.linalg.eigh(S)
    if lam[-1] <= 0:
        raise ZeroWindow("frame operator is zero")
    keep = lam > rank_tol * lam[-1]
    Vk = V[:, keep]
    S_pinv = (Vk / lam[keep]) @ Vk.conj().T
    gamma = S_pinv @ sys.window
    return DualWindowResult(gamma, S_pinv, SubspaceBasis(Vk, rank_tol))


def frame_bounds(
    sys: FiniteGaborSystem, rank_tol: float = DEFAULT_RANK_TOL
) -> FrameBounds:
    """Spectral frame bounds on the span and a Gram-based Riesz-sequence test.

    A, B are the extreme eigenvalues of S above rank_tol * lambda_max; the
    system is flagged a Riesz sequence iff the Gram matrix D^H D has its
    smallest eigenvalue above the same relative threshold (uniform linear
    independence).
    """
    D = gabor_matrix(sys)
    lam = np.linalg.eigvalsh(D @ D.conj().T)
    if lam[-1] <= 0:
        raise ZeroWindow("frame operator is zero")
    kept = lam[lam > rank_tol * lam[-1]]
    gram_ev = np.linalg.eigvalsh(D.conj().T @ D)
    riesz = bool(gram_ev[0] > rank_tol * gram_ev[-1])
    return FrameBounds(float(kept[0]), float(kept[-1]), int(kept.size), riesz)


def cross_frame_operator(
    gamma: np.ndarray, g: np.ndarray, t_step: int, f_step: int
) -> np.ndarray:
    """S_{gamma,g} f = sum_{k,l} <f, pi(k t_step, l f_step) gamma> pi(...) g."""
    gamma = np.asarray(gamma, dtype=complex)
    g = np.asarray(g, dtype=complex)
    L = g.shape[0]
    if t_step < 1 or f_step < 1 or L % t_step or L % f_step:
        raise InvalidLattice(
            f"steps must divide L: L={L}, t_step={t_step}, f_step={f_step}"
        )
    Dg = gabor_matrix(FiniteGaborSystem(L, t_step, f_step, g))
    Dgam = gabor_matrix(FiniteGaborSystem(L, t_step, f_step, gamma))
    return Dg @ Dgam.conj().T


def janssen_representation(
    gamma: np.ndarray,
    g: np.ndarray,
    t_step: int,
    f_step: int,
    coefficient_cutoff: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Expand S_{gamma,g} over the adjoint lattice (L/f_step, L/t_step).

    Returns (S, coefficients, constant) with

        S = constant * sum_{m,n} <g, pi(m L/f_step, n L/t_step) gamma> pi(...),

    constant = L/(t_step*f_step), the finite counterpart of alpha*beta/nu.
    The (f_step, t_step) coefficient array is returned for decay inspection;
    terms with |coefficient| <= coefficient_cutoff are skipped.
    """
    gamma = np.asarray(gamma, dtype=complex)
    g = np.asarray(g, dtype=complex)
    L = g.shape[0]
    if t_step < 1 or f_step < 1 or L % t_step or L % f_step:
        raise InvalidLattice(
            f"steps must divide L: L={L}, t_step={t_step}, f_step={f_step}"
        )
    tau, phi = L // f_step, L // t_step  # adjoint steps: time tau, frequency phi
    constant = L / (t_step * f_step)
    S = np.zeros((L, L), dtype=complex)
    coef = np.empty((f_step, t_step), dtype=complex)
    for m in range(f_step):
        for n in range(t_step):
            shifted = tf_shift(gamma, m * tau, n * phi)
            c = np.vdot(shifted, g)  # <g, pi(mu) gamma>
            coef[m, n] = c
            if abs(c) > coefficient_cutoff:
                S += c * shift_operator(L, m * tau, n * phi)
    return constant * S, coef, constant


def periodized_gaussian(L: int, c: float) -> np.ndarray:
    """Unit-norm periodization of exp(-c x^2) sampled at x = n/sqrt(L).

    Terms are added symmetrically until the next one falls below 1e-17 of
    the running maximum.  For c = pi the result is DFT-invariant.
    """
    if L < 4:
        raise InvalidParameter(f"L must be >= 4, got {L}")
    if c <= 0:
        raise InvalidParameter(f"Gaussian width c must be positive, got {c}")
    n = np.arange(L)
    centered = ((n + L // 2) % L) - L // 2
    g = np.exp(-c * (centered / np.sqrt(L)) ** 2)
    j = 1
    while True:
        term = np.exp(-c * ((centered + j * L) / np.sqrt(L)) ** 2) + np.exp(
            -c * ((centered - j * L) / np.sqrt(L)) ** 2
        )
        g += term
        if term.max() < 1e-17 * g.max():
            break
        j += 1
    return g / np.linalg.norm(g)


def support_space(
    window: np.ndarray, a: int, tol: float = 1e-12
) -> tuple[SubspaceBasis, np.ndarray]:
    """Coordinate subspace on E = {n : h[n] > tol * max h}, h = sum_k |T_{ka} g|^2.

    h is the q = 0 Walnut coefficient of the system with time step a; under
    full modulation invariance the span of the system is exactly the set of
    signals supported on E.  Returns the basis and h itself.
    """
    g = np.asarray(window, dtype=complex)
    L = g.shape[0]
    if a < 1 or L % a:
        raise InvalidLattice(f"time step must divide L: L={L}, a={a}")
    if not np.any(g):
        raise ZeroWindow("window is zero")
    h = np.zeros(L)
    for k in range(L // a):
        h += np.abs(np.roll(g, k * a)) ** 2
    idx = np.nonzero(h > tol * h.max())[0]
    cols = np.zeros((L, idx.size), dtype=complex)
    cols[idx, np.arange(idx.size)] = 1.0
    return SubspaceBasis(cols, tol), h
