"""Shared domain types for degenerate-multistate pulse dynamics.

The physical setting is N ground levels, all at zero energy in the rotating
frame, coupled to a single excited level by pulsed fields with a common
envelope f(t) and individual peak Rabi amplitudes chi_n, plus a shared
detuning Delta(t).  Everything downstream (basis construction, propagators,
integrators, design) works in terms of the types defined here.

Units: angular frequencies in rad/time with hbar absorbed, so the coupling
matrix elements are omega_n(t)/2 = chi_n f(t)/2 and the excited diagonal is
Delta(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CouplingSet",
    "PulseShape",
    "DetuningProfile",
    "ModelSpec",
    "CayleyKlein",
    "Propagator",
    "PopulationDistribution",
    "StateVector",
    "pulse_area",
    "rms_area",
]


@dataclass(frozen=True)
class CouplingSet:
    """Peak Rabi amplitudes chi_1..chi_N of the N ground-excited couplings.

    All amplitudes are real and nonnegative (populations do not depend on
    coupling signs), and at least one must be nonzero.
    """

    values: tuple

    def __init__(self, chis):
        chis = tuple(float(c) for c in np.atleast_1d(np.asarray(chis, dtype=float)))
        if len(chis) < 1:
            raise ValueError("need at least one coupling")
        if any(c < 0 for c in chis):
            raise ValueError("couplings must be nonnegative")
        if not any(c > 0 for c in chis):
            raise ValueError("all couplings vanish: rms coupling must be positive")
        object.__setattr__(self, "values", chis)

    @property
    def n_ground(self) -> int:
        return len(self.values)

    @property
    def chis(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def chi(self) -> float:
        """Root-mean-square coupling sqrt(sum chi_n^2)."""
        return float(np.sqrt(np.sum(self.chis ** 2)))

    @property
    def partial_norms(self) -> np.ndarray:
        """X_n = sqrt(chi_1^2 + ... + chi_n^2) for n = 1..N (X_N is the rms)."""
        return np.sqrt(np.cumsum(self.chis ** 2))

    def weights(self) -> np.ndarray:
        """Normalized coupling direction chi_n / chi."""
        return self.chis / self.chi

    def scaled_to(self, chi_total: float) -> "CouplingSet":
        """Same coupling ratios, rms rescaled to chi_total."""
        if chi_total <= 0:
            raise ValueError("chi_total must be positive")
        return CouplingSet(self.chis * (chi_total / self.chi))


@dataclass(frozen=True)
class PulseShape:
    """Dimensionless pulse envelope f(t) >= 0.

    Kinds: "sech" (f = sech(t/T)), "rect" (f = 1 for |t| <= T), "const"
    (f = 1 everywhere, infinite area), "custom" (sampled envelope, linearly
    interpolated, zero outside the sampled range).
    """

    kind: str
    width: float = 0.0
    times: np.ndarray | None = field(default=None, compare=False)
    values: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def sech(cls, width: float) -> "PulseShape":
        if width <= 0:
            raise ValueError("sech width must be positive")
        return cls("sech", float(width))

    @classmethod
    def rect(cls, width: float) -> "PulseShape":
        if width <= 0:
            raise ValueError("rect width must be positive")
        return cls("rect", float(width))

    @classmethod
    def const(cls) -> "PulseShape":
        return cls("const", 0.0)

    @classmethod
    def custom(cls, times, values) -> "PulseShape":
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("custom envelope needs matching 1-d time/value samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("custom envelope times must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("envelope must be nonnegative")
        return cls("custom", float(t[-1] - t[0]), t, v)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "sech":
            out = 1.0 / np.cosh(t / self.width)
        elif self.kind == "rect":
            out = np.where(np.abs(t) <= self.width, 1.0, 0.0)
        elif self.kind == "const":
            out = np.ones_like(t)
        else:
            out = np.interp(t, self.times, self.values)
            out = np.where((t < self.times[0]) | (t > self.times[-1]), 0.0, out)
        return out if out.ndim else float(out)

    def envelope_integral(self) -> float:
        """Integral of f(t) over all time.  For sech this is pi*T, for rect 2*T."""
        if self.kind == "sech":
            return math.pi * self.width
        if self.kind == "rect":
            return 2.0 * self.width
        if self.kind == "custom":
            return float(np.trapezoid(self.values, self.times))
        raise ValueError("pulse area undefined for the unit-constant envelope")


@dataclass(frozen=True)
class DetuningProfile:
    """Shared detuning Delta(t) of the excited level.

    Kinds: "zero", "constant" (Delta0), "linear" (C*t) and "tanh"
    (Delta0 + B*tanh(t/T)).
    """

    kind: str
    delta0: float = 0.0
    slope: float = 0.0
    amplitude: float = 0.0
    width: float = 1.0

    @classmethod
    def zero(cls) -> "DetuningProfile":
        return cls("zero")

    @classmethod
    def constant(cls, delta0: float) -> "DetuningProfile":
        return cls("constant", delta0=float(delta0))

    @classmethod
    def linear(cls, slope: float) -> "DetuningProfile":
        if slope <= 0:
            raise ValueError("linear sweep slope must be positive")
        return cls("linear", slope=float(slope))

    @classmethod
    def tanh(cls, delta0: float, amplitude: float, width: float) -> "DetuningProfile":
        if width <= 0:
            raise ValueError("tanh width must be positive")
        return cls("tanh", delta0=float(delta0), amplitude=float(amplitude), width=float(width))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(t)
        elif self.kind == "constant":
            out = np.full_like(t, self.delta0)
        elif self.kind == "linear":
            out = self.slope * t
        else:
            out = self.delta0 + self.amplitude * np.tanh(t / self.width)
        return out if out.ndim else float(out)


_MODEL_KINDS = (
    "resonance",
    "rabi",
    "landau_zener",
    "rosen_zener",
    "allen_eberly",
    "demkov_kunike",
)


@dataclass(frozen=True)
class ModelSpec:
    """One of the six exactly soluble pulse/detuning combinations.

    Raw parameters are stored (chi, T, delta0, B, C and the rms area for the
    resonance case); the scaled quantities alpha = chi*T/2, beta = B*T/2 and
    delta = delta0*T/2 are exposed as properties.  All of alpha, beta, delta
    are restricted to be nonnegative.
    """

    kind: str
    chi: float = 0.0
    T: float = 1.0
    delta0: float = 0.0
    B: float = 0.0
    C: float = 0.0
    area: float = 0.0
    shape: PulseShape | None = None

    def __post_init__(self):
        if self.kind not in _MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.chi < 0 or self.delta0 < 0 or self.B < 0:
            raise ValueError("chi, delta0 and B are taken nonnegative")

    @classmethod
    def resonance(cls, area: float, shape: PulseShape | None = None) -> "ModelSpec":
        if area < 0:
            raise ValueError("rms pulse area must be nonnegative")
        shape = shape if shape is not None else PulseShape.sech(1.0)
        chi = area / shape.envelope_integral()
        return cls("resonance", chi=chi, area=float(area), shape=shape,
                   T=shape.width if shape.width > 0 else 1.0)

    @classmethod
    def rabi(cls, chi: float, delta0: float, T: float = 1.0) -> "ModelSpec":
        if T <= 0:
            raise ValueError("rabi model needs a finite positive half-width T")
        return cls("rabi", chi=float(chi), delta0=float(delta0), T=float(T))

    @classmethod
    def landau_zener(cls, chi: float | None = None, C: float = 1.0,
                     Lambda: float | None = None) -> "ModelSpec":
        if C <= 0:
            raise ValueError("Landau-Zener sweep rate C must be positive")
        if Lambda is not None:
            if Lambda < 0:
                raise ValueError("Lambda must be nonnegative")
            chi = math.sqrt(4.0 * Lambda * C / math.pi)
        elif chi is None:
            raise ValueError("give either chi or Lambda")
        return cls("landau_zener", chi=float(chi), C=float(C))

    @classmethod
    def rosen_zener(cls, chi: float, delta0: float, T: float = 1.0) -> "ModelSpec":
        return cls("rosen_zener", chi=float(chi), delta0=float(delta0), T=float(T))

    @classmethod
    def allen_eberly(cls, chi: float, B: float, T: float = 1.0) -> "ModelSpec":
        return cls("allen_eberly", chi=float(chi), B=float(B), T=float(T))

    @classmethod
    def demkov_kunike(cls, chi: float, delta0: float, B: float, T: float = 1.0) -> "ModelSpec":
        return cls("demkov_kunike", chi=float(chi), delta0=float(delta0), B=float(B), T=float(T))

    @property
    def alpha(self) -> float:
        return 0.5 * self.chi * self.T

    @property
    def beta(self) -> float:
        return 0.5 * self.B * self.T

    @property
    def delta(self) -> float:
        return 0.5 * self.delta0 * self.T

    @property
    def lz_lambda(self) -> float:
        if self.kind != "landau_zener":
            raise ValueError("Lambda is defined for the Landau-Zener model only")
        return math.pi * self.chi ** 2 / (4.0 * self.C)


@dataclass(frozen=True)
class CayleyKlein:
    """Parameters (a, b) of the reduced two-state propagator [[a, b], [-b*, a*]].

    b_phase_exact is True only when the phase of b is known analytically (the
    resonance case) or supplied by the numerical oracle; when False, b was
    reconstructed from unitarity with the fixed convention b = -i*sqrt(1-|a|^2)
    and must not be used to propagate superposition initial states.

    Unitarity |a|^2 + |b|^2 = 1 is checked here at 1e-9 (loose enough for
    oracle-produced values); analytic constructors are tested at 1e-12.
    """

    a: complex
    b: complex
    b_phase_exact: bool = False

    def __post_init__(self):
        if abs(self.norm_defect) > 1e-9:
            raise ValueError(
                f"Cayley-Klein parameters not unitary: |a|^2+|b|^2-1 = {self.norm_defect:.3e}")

    @property
    def norm_defect(self) -> float:
        return abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0


@dataclass(frozen=True)
class Propagator:
    """Unitary (N+1) x (N+1) transfer matrix in the diabatic basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("propagator must be a square matrix")
        object.__setattr__(self, "matrix", m)
        if self.unitarity_defect > 1e-8:
            raise ValueError(f"propagator not unitary: defect {self.unitarity_defect:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def unitarity_defect(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))


@dataclass(frozen=True)
class PopulationDistribution:
    """Final-state probabilities P_1..P_{N+1} for a single-state start."""

    probs: np.ndarray
    initial_index: int

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if not (1 <= self.initial_index <= p.size):
            raise ValueError("initial_index out of range")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-9):
            raise ValueError("probabilities out of [0, 1]")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")

    @property
    def excited(self) -> float:
        return float(self.probs[-1])

    def ground(self) -> np.ndarray:
        return self.probs[:-1]


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over the N ground states plus the excited state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 2:
            raise ValueError("state vector must be 1-d with at least two entries")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        """Unit vector on state `index` (1-based, index = dim is the excited state)."""
        if not (1 <= index <= dim):
            raise ValueError("basis index out of range")
        amp = np.zeros(dim, dtype=complex)
        amp[index - 1] = 1.0
        return cls(amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def pulse_area(chis: CouplingSet, shape: PulseShape, n: int) -> float:
    """Area A_n = chi_n * integral f(t) dt of the n-th coupling (n is 1-based)."""
    if not (1 <= n <= chis.n_ground):
        raise ValueError("coupling index out of range")
    return chis.values[n - 1] * shape.envelope_integral()


def rms_area(chis: CouplingSet, shape: PulseShape) -> float:
    """Root-mean-square pulse area A = chi * integral f(t) dt.

    Satisfies A^2 = sum_n A_n^2 because the couplings share one envelope.
    """
    return chis.chi * shape.envelope_integral()
