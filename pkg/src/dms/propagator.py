"""Full (N+1)-state transfer matrix and closed-form population laws.

Given the reduced two-state parameters (a, b), the diabatic transfer matrix
has the rank-one structure

    U_mn      = delta_mn + (a - 1) chi_m chi_n / chi^2     (ground block)
    U_{n,N+1} = b chi_n / chi,   U_{N+1,n} = -b* chi_n / chi
    U_{N+1,N+1} = a*

so all single-state final populations are elementary functions of a and the
coupling ratios.  The linear-crossing special case (a = exp(-Lambda)) and the
ladder-of-crossings product probabilities are also provided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CayleyKlein, CouplingSet, PopulationDistribution, Propagator, StateVector

__all__ = [
    "assemble_propagator",
    "apply_propagator",
    "populations_from_ground",
    "populations_from_excited",
    "population_ratio",
    "lz_propagator_entries",
    "lz_populations",
    "DOGrid",
    "do_probabilities",
]


def assemble_propagator(chis: CouplingSet, ck: CayleyKlein) -> Propagator:
    """Build the (N+1) x (N+1) unitary from (a, b) and the couplings."""
    w = chis.weights()
    n = chis.n_ground
    u = np.zeros((n + 1, n + 1), dtype=complex)
    u[:n, :n] = np.eye(n) + (ck.a - 1.0) * np.outer(w, w)
    u[:n, n] = ck.b * w
    u[n, :n] = -np.conj(ck.b) * w
    u[n, n] = np.conj(ck.a)
    return Propagator(u)


def apply_propagator(chis: CouplingSet, ck: CayleyKlein, state: StateVector) -> StateVector:
    """Apply the transfer matrix to an initial state.

    Single-basis-state inputs are always allowed (their populations do not
    involve the phase of b).  Superposition inputs require b_phase_exact,
    since the convention-reconstructed b would silently give wrong coherences.
    """
    amp = state.amplitudes
    if amp.size != chis.n_ground + 1:
        raise ValueError("state dimension does not match the coupling set")
    populated = np.abs(amp) > 1e-12
    if populated.sum() > 1 and not ck.b_phase_exact:
        raise ValueError(
            "b phase not analytic - use the dynamics oracle for superposition inputs")
    u = assemble_propagator(chis, ck).matrix
    return StateVector(u @ amp)


def populations_from_ground(chis: CouplingSet, ck: CayleyKlein, i: int) -> PopulationDistribution:
    """Final populations for a start in ground state i (1-based).

    P_i = |1 + (a-1) chi_i^2/chi^2|^2,
    P_n = |a-1|^2 chi_i^2 chi_n^2 / chi^4  (n != i),
    P_{N+1} = (1 - |a|^2) chi_i^2 / chi^2.
    """
    n = chis.n_ground
    if not (1 <= i <= n):
        raise ValueError("initial ground index out of range")
    w2 = chis.weights() ** 2
    ri = w2[i - 1]
    p = np.empty(n + 1)
    p[:n] = abs(ck.a - 1.0) ** 2 * ri * w2
    p[i - 1] = abs(1.0 + (ck.a - 1.0) * ri) ** 2
    p[n] = (1.0 - abs(ck.a) ** 2) * ri
    return PopulationDistribution(probs=p, initial_index=i)


def populations_from_excited(chis: CouplingSet, ck: CayleyKlein) -> PopulationDistribution:
    """Final populations for a start in the excited state:
    P_n = (1-|a|^2) chi_n^2/chi^2 and P_{N+1} = |a|^2."""
    n = chis.n_ground
    a2 = abs(ck.a) ** 2
    p = np.empty(n + 1)
    p[:n] = (1.0 - a2) * chis.weights() ** 2
    p[n] = a2
    return PopulationDistribution(probs=p, initial_index=n + 1)


def population_ratio(chis: CouplingSet, m: int, n: int, i: int) -> float:
    """Ratio P_m / P_n = chi_m^2 / chi_n^2 for two ground states not initially populated.

    Holds for every model parameterization with a != 1; it depends only on
    the coupling ratio.
    """
    ng = chis.n_ground
    for idx in (m, n, i):
        if not (1 <= idx <= ng):
            raise ValueError("ground index out of range")
    if m == i or n == i:
        raise ValueError("ratio defined for states other than the initial one")
    if chis.values[n - 1] == 0.0:
        raise ValueError("ratio undefined: chi_n vanishes")
    return (chis.values[m - 1] / chis.values[n - 1]) ** 2


def lz_propagator_entries(chis: CouplingSet, Lambda: float) -> Propagator:
    """Transfer matrix of the linear-crossing model written directly in terms
    of Lambda: ground block 1 - (chi_n^2/chi^2)(1-e^-L) / off-diagonal
    -(chi_m chi_n/chi^2)(1-e^-L), corner e^-L, |b|^2 = 1 - e^-2L."""
    if Lambda < 0:
        raise ValueError("Lambda must be nonnegative")
    e = math.exp(-Lambda)
    w = chis.weights()
    n = chis.n_ground
    b = -1j * math.sqrt(max(0.0, 1.0 - e * e))
    u = np.zeros((n + 1, n + 1), dtype=complex)
    u[:n, :n] = np.eye(n) - (1.0 - e) * np.outer(w, w)
    u[:n, n] = b * w
    u[n, :n] = -np.conj(b) * w
    u[n, n] = e
    return Propagator(u)


def lz_populations(chis: CouplingSet, Lambda: float, initial: int) -> PopulationDistribution:
    """Final populations of the linear-crossing model from any single state.

    From the excited (swept) state: P_n = (chi_n^2/chi^2)(1-e^-2L),
    P_{N+1} = e^-2L.  From ground i: P_i = [1-(chi_i^2/chi^2)(1-e^-L)]^2,
    P_n = (chi_n^2 chi_i^2/chi^4)(1-e^-L)^2, P_{N+1} = (chi_i^2/chi^2)(1-e^-2L).
    """
    if Lambda < 0:
        raise ValueError("Lambda must be nonnegative")
    n = chis.n_ground
    if not (1 <= initial <= n + 1):
        raise ValueError("initial index out of range")
    e = math.exp(-Lambda)
    e2 = math.exp(-2.0 * Lambda)
    w2 = chis.weights() ** 2
    p = np.empty(n + 1)
    if initial == n + 1:
        p[:n] = (1.0 - e2) * w2
        p[n] = e2
    else:
        ri = w2[initial - 1]
        p[:n] = ri * w2 * (1.0 - e) ** 2
        p[initial - 1] = (1.0 - ri * (1.0 - e)) ** 2
        p[n] = ri * (1.0 - e2)
    return PopulationDistribution(probs=p, initial_index=initial)


@dataclass(frozen=True)
class DOGrid:
    """One level with linearly swept energy crossing N nondegenerate flat levels.

    The flat levels are labeled 1..N in order of increasing energy and the
    swept level is N+1; with a positive sweep slope the crossings are visited
    in that order.  Per-crossing no-transition probabilities are
    q_n = exp(-pi chi_n^2 / (2 C)) and p_n = 1 - q_n.
    """

    slope: float
    chis: CouplingSet
    energies: tuple

    def __init__(self, slope: float, chis: CouplingSet, energies):
        if slope <= 0:
            raise ValueError("sweep slope must be positive")
        energies = tuple(float(e) for e in energies)
        if len(energies) != chis.n_ground:
            raise ValueError("need one energy per flat level")
        if any(e2 <= e1 for e1, e2 in zip(energies, energies[1:])):
            raise ValueError("energies must be strictly increasing")
        object.__setattr__(self, "slope", float(slope))
        object.__setattr__(self, "chis", chis)
        object.__setattr__(self, "energies", energies)

    @property
    def q(self) -> np.ndarray:
        return np.exp(-math.pi * self.chis.chis ** 2 / (2.0 * self.slope))

    @property
    def p(self) -> np.ndarray:
        return 1.0 - self.q


def do_probabilities(grid: DOGrid, source: int, target: int) -> float:
    """Transition probability between two levels of the ladder of crossings.

    Products of per-crossing factors along the path from `source` to `target`
    (both 1-based, N+1 = swept level); downward flat-to-flat transitions are
    forbidden.
    """
    n = grid.chis.n_ground
    for idx in (source, target):
        if not (1 <= idx <= n + 1):
            raise ValueError("level index out of range")
    q, p = grid.q, grid.p
    if source == n + 1 and target == n + 1:
        return float(np.prod(q))
    if source == n + 1:
        m = target
        return float(np.prod(q[:m - 1]) * p[m - 1])
    if target == n + 1:
        return float(p[source - 1] * np.prod(q[source:n]))
    if source == target:
        return float(q[source - 1])
    if source > target:
        return 0.0
    # source < target: leave at source, ride past the crossings in between,
    # leave the swept level again at target
    return float(p[source - 1] * np.prod(q[source:target - 1]) * p[target - 1])
