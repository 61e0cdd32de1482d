"""Inverse pulse design: coupling ratios, pi-pulse areas and detuning roots.

Three superposition targets are supported, each requiring a specific value
of the two-state parameter a:

* equal populations of all N ground states starting from ground state i
  (a = -1, coupling condition chi_i = (sqrt(N) +/- 1) chi_0, others chi_0);
* equal populations of all ground states except the initial one
  (a = -1, chi_i^2 = sum of the other chi_n^2);
* equal populations of all ground states starting from the excited state
  (a = 0, all couplings equal).

For the sech-pulse model at integer alpha = l the condition a = -1 becomes
the phase equation sum_k 2 atan(x / (2k+1)) = (l-1) pi (mod 2 pi) in
x = delta0*T, whose monotone left side makes every root bracketable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import models, propagator
from .core import CayleyKlein, CouplingSet, PopulationDistribution

__all__ = [
    "DesignTarget",
    "RzRootReport",
    "VerifyResult",
    "design_couplings",
    "resonance_areas",
    "rz_minus_one_detunings",
    "verify_design",
    "target_populations",
]

_TARGET_KINDS = ("equal_all_from_ground", "equal_all_except_initial", "equal_all_from_excited")


@dataclass(frozen=True)
class DesignTarget:
    """A named superposition target over N ground states.

    `initial` is the 1-based starting ground state (ignored for the
    excited-state start); `branch` picks the +/- sign in the equal-all
    coupling condition.
    """

    kind: str
    n_states: int
    initial: int = 1
    branch: int = +1

    def __post_init__(self):
        if self.kind not in _TARGET_KINDS:
            raise ValueError(f"unknown design target {self.kind!r}")
        if self.n_states < 1:
            raise ValueError("need at least one ground state")
        if self.kind == "equal_all_except_initial" and self.n_states < 2:
            raise ValueError("except-initial target needs N >= 2")
        if self.kind != "equal_all_from_excited" and not (1 <= self.initial <= self.n_states):
            raise ValueError("initial state index out of range")
        if self.branch not in (+1, -1):
            raise ValueError("branch must be +1 or -1")

    @property
    def required_a(self) -> complex:
        return complex(0.0) if self.kind == "equal_all_from_excited" else complex(-1.0)


def design_couplings(target: DesignTarget, chi_total: float) -> CouplingSet:
    """Coupling amplitudes realizing the target, with rms equal to chi_total."""
    if chi_total <= 0:
        raise ValueError("chi_total must be positive")
    n = target.n_states
    if target.kind == "equal_all_from_excited":
        return CouplingSet(np.full(n, chi_total / math.sqrt(n)))
    chis = np.ones(n)
    if target.kind == "equal_all_from_ground":
        chis[target.initial - 1] = math.sqrt(n) + target.branch
    else:  # equal_all_except_initial
        chis[target.initial - 1] = math.sqrt(n - 1)
    return CouplingSet(chis).scaled_to(chi_total)


def target_populations(target: DesignTarget) -> np.ndarray:
    """The population vector the design is supposed to produce."""
    n = target.n_states
    p = np.zeros(n + 1)
    if target.kind == "equal_all_except_initial":
        p[:n] = 1.0 / (n - 1)
        p[target.initial - 1] = 0.0
    else:
        p[:n] = 1.0 / n
    return p


def resonance_areas(target: DesignTarget, l: int = 0) -> np.ndarray:
    """Individual on-resonance pulse areas A_n realizing the target.

    The rms area must satisfy the a-condition of the target: (2l+1) pi for
    a = 0 (excited start) and 2 (2l+1) pi for a = -1 (ground starts); the
    per-state areas are the rms area split in proportion to the designed
    couplings.
    """
    if l < 0:
        raise ValueError("l must be a nonnegative integer")
    rms = (2 * l + 1) * math.pi
    if target.required_a == -1.0:
        rms *= 2.0
    return design_couplings(target, 1.0).chis * rms


@dataclass(frozen=True)
class RzRootReport:
    """Nonnegative detunings with a(delta0) = -1 at integer alpha = l.

    Residuals are |a + 1| evaluated with the unimodular product form.
    Negative roots follow by symmetry (the phase function is odd).
    """

    l: int
    roots: tuple
    residuals: tuple


def _phase(x: float, l: int) -> float:
    s = 0.0
    for k in range(l):
        s += 2.0 * math.atan(x / (2 * k + 1))
    return s


def _phase_deriv(x: float, l: int) -> float:
    s = 0.0
    for k in range(l):
        m = 2 * k + 1
        s += 2.0 * m / (m * m + x * x)
    return s


def _solve_phase(l: int, level: float) -> float:
    """Solve phase(x) = level for the unique nonnegative root (0 < level < l*pi)."""
    lo, hi = 0.0, 1.0
    while _phase(hi, l) < level:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("failed to bracket phase root")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _phase(mid, l) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    x = 0.5 * (lo + hi)
    for _ in range(6):  # Newton polish on the monotone phase
        f = _phase(x, l) - level
        x -= f / _phase_deriv(x, l)
    return x


def rz_minus_one_detunings(l: int) -> RzRootReport:
    """All nonnegative delta0*T with a = -1 for the sech model at alpha = l.

    The phase function rises monotonically from 0 to l*pi, so the congruence
    phase(x) = (l-1) pi (mod 2 pi) has exactly one root per admissible level
    (l-1-2j) pi >= 0; zero is a root exactly when l is odd.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    roots = []
    j = 0
    while l - 1 - 2 * j >= 0:
        level = (l - 1 - 2 * j) * math.pi
        roots.append(0.0 if level == 0.0 else _solve_phase(l, level))
        j += 1
    roots = sorted(roots)
    residuals = [abs(models.rz_integer_alpha_a(l, x) + 1.0) for x in roots]
    return RzRootReport(l=l, roots=tuple(roots), residuals=tuple(residuals))


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of checking a design against realized populations."""

    passed: bool
    max_deviation: float
    tolerance: float
    populations: PopulationDistribution
    expected: np.ndarray


def verify_design(target: DesignTarget, chis: CouplingSet, ck: CayleyKlein,
                  tol: float = 1e-6) -> VerifyResult:
    """Propagate the target's initial state with (a, b) and compare populations."""
    if chis.n_ground != target.n_states:
        raise ValueError("coupling set size does not match the target")
    if target.kind == "equal_all_from_excited":
        pops = propagator.populations_from_excited(chis, ck)
    else:
        pops = propagator.populations_from_ground(chis, ck, target.initial)
    expected = target_populations(target)
    dev = float(np.max(np.abs(pops.probs - expected)))
    return VerifyResult(passed=dev <= tol, max_deviation=dev, tolerance=tol,
                        populations=pops, expected=expected)
