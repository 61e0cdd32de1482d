"""Dark/bright basis construction for the N-plus-one level system.

The arrow-shaped Hamiltonian has N-1 zero eigenvalues at every instant.  A
time-independent real orthogonal matrix W built from the corresponding dark
states, the bright state (components chi_n/chi on the ground levels) and the
excited state maps the full problem onto N-1 frozen amplitudes plus one
effective two-state system with coupling chi*f(t) and detuning Delta(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CouplingSet

__all__ = ["MsBasis", "EigenvalueSet", "hamiltonian", "build_ms_basis",
           "transform_hamiltonian", "eigenvalues"]


def hamiltonian(chis: CouplingSet, f_t: float, delta_t: float) -> np.ndarray:
    """Instantaneous (N+1) x (N+1) Hamiltonian.

    Ground-excited couplings chi_n f(t)/2 sit on the last row/column and the
    detuning on the excited diagonal; the ground block is zero.
    """
    n = chis.n_ground
    h = np.zeros((n + 1, n + 1), dtype=float)
    h[:n, n] = 0.5 * chis.chis * f_t
    h[n, :n] = h[:n, n]
    h[n, n] = delta_t
    return h


@dataclass(frozen=True)
class MsBasis:
    """Dark states, bright state and the orthogonal change-of-basis matrix W.

    W columns are ordered [dark_1 .. dark_{N-1}, bright, excited] so that the
    transformed Hamiltonian is zero outside its lower-right 2x2 block.
    """

    dark: np.ndarray    # (N-1, N+1), each row a dark state
    bright: np.ndarray  # (N+1,)
    W: np.ndarray       # (N+1, N+1)


@dataclass(frozen=True)
class EigenvalueSet:
    """Instantaneous spectrum: N-1 zeros plus lambda_± = (Delta ± sqrt(Delta^2+Omega^2))/2."""

    zeros: int
    lam_plus: float
    lam_minus: float

    def all_values(self) -> np.ndarray:
        return np.concatenate([np.zeros(self.zeros), [self.lam_minus, self.lam_plus]])


def build_ms_basis(chis: CouplingSet) -> MsBasis:
    """Construct the dark states, the bright state and W.

    The dark states follow the canonical chained form

        dark_k = [chi_1 chi_{k+1}, .., chi_k chi_{k+1}, -X_k^2, 0, ..] / (X_k X_{k+1})

    with X_k the partial norms.  When leading couplings vanish the chained
    form is 0/0; the ground indices are then stably permuted so nonzero
    couplings come first, the basis is built on the permuted set and permuted
    back, which extends the closed form continuously.
    """
    c = chis.chis
    n = chis.n_ground
    if not np.any(c > 0):
        raise ValueError("no bright state: all couplings vanish")

    order = np.argsort(c == 0, kind="stable")  # nonzero couplings first
    cp = c[order]
    x = np.sqrt(np.cumsum(cp ** 2))

    dark_p = np.zeros((max(n - 1, 0), n))
    for k in range(1, n):  # dark_k couples ground levels 1..k+1 (1-based)
        dark_p[k - 1, :k] = cp[:k] * cp[k] / (x[k - 1] * x[k])
        dark_p[k - 1, k] = -x[k - 1] / x[k]
    bright_p = cp / x[-1]

    inv = np.empty(n, dtype=int)
    inv[order] = np.arange(n)
    dark = np.zeros((max(n - 1, 0), n + 1))
    dark[:, :n] = dark_p[:, inv]
    bright = np.zeros(n + 1)
    bright[:n] = bright_p[inv]

    w = np.zeros((n + 1, n + 1))
    for k in range(n - 1):
        w[:, k] = dark[k]
    w[:, n - 1] = bright
    w[n, n] = 1.0
    return MsBasis(dark=dark, bright=bright, W=w)


def transform_hamiltonian(chis: CouplingSet, f_t: float, delta_t: float) -> np.ndarray:
    """W^T H(t) W: zero except the lower-right block [[0, Omega/2], [Omega/2, Delta]]."""
    basis = build_ms_basis(chis)
    h = hamiltonian(chis, f_t, delta_t)
    return basis.W.T @ h @ basis.W


def eigenvalues(chis: CouplingSet, f_t: float, delta_t: float) -> EigenvalueSet:
    """N-1 zeros and the two split eigenvalues of the instantaneous Hamiltonian."""
    omega = chis.chi * f_t
    root = np.hypot(delta_t, omega)
    return EigenvalueSet(zeros=chis.n_ground - 1,
                         lam_plus=0.5 * (delta_t + root),
                         lam_minus=0.5 * (delta_t - root))
