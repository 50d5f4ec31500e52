"""Phase noise on a two-branch entangled state and what survives it.

A qubit entangled with two photonic components,

    |psi> = (|up>|A> + |down>|D>)/sqrt(2),

loses number-basis coherences under Gaussian phase diffusion of spread
dphi: every density-matrix element with photon indices (n, m) is damped by
exp(-dphi^2 (n-m)^2 / 2), in both the photonic blocks and the qubit
cross blocks.  Entanglement is tracked by negativity (sum of negative
partial-transpose eigenvalues over the qubit split).  The same channel is
equivalent to a which-path pointer of position spread 1/(2 dphi), which
links a required entanglement fraction to a bound on the tolerable dphi via
the size analysis:  dphi = sqrt(2) Erfinv(2P-1) / size_P  at
P = (1 + sqrt(1-E^2))/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import erfinv

from . import coarse
from .statekit import FockAmplitudeVector

#: dense joint matrices refuse photon cutoffs above this (matrix side 2*(c+1))
MAX_CUTOFF = 2000


@dataclass(frozen=True, eq=False)
class TwoComponentEntangledState:
    """Equal-weight qubit/field state with photonic components A and D."""

    component_a: FockAmplitudeVector
    component_d: FockAmplitudeVector

    def __post_init__(self):
        if self.component_a.cutoff != self.component_d.cutoff:
            raise ValueError("components must share one cutoff")
        if self.component_a.cutoff > MAX_CUTOFF:
            raise ValueError(
                f"cutoff {self.component_a.cutoff} above dense-matrix limit "
                f"{MAX_CUTOFF}")

    @property
    def cutoff(self) -> int:
        return self.component_a.cutoff

    def joint_vector(self) -> np.ndarray:
        """Qubit-major amplitudes: [up (x) A ; down (x) D] / sqrt(2)."""
        return np.concatenate([self.component_a.amplitudes,
                               self.component_d.amplitudes]) / math.sqrt(2.0)


def phase_damping_factors(cutoff: int, dphi: float) -> np.ndarray:
    """(cutoff+1)^2 matrix W[n, m] = exp(-dphi^2 (n-m)^2 / 2)."""
    if dphi < 0:
        raise ValueError("dphi must be >= 0")
    n = np.arange(cutoff + 1, dtype=np.float64)
    d = n[:, None] - n[None, :]
    return np.exp(-0.5 * (dphi * d) ** 2)


def dephase_joint(rho: np.ndarray, dphi: float) -> np.ndarray:
    """Apply the phase-diffusion channel to a qubit (x) field joint matrix."""
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or dim % 2 != 0:
        raise ValueError("expected a square qubit (x) field matrix")
    w = phase_damping_factors(dim // 2 - 1, dphi)
    return rho * np.tile(w, (2, 2))


@dataclass(eq=False)
class DephasedJointState:
    """Joint density matrix after phase diffusion of spread dphi."""

    rho: np.ndarray
    dphi: float
    source: TwoComponentEntangledState

    def __post_init__(self):
        d = self.rho.shape[0]
        if self.rho.shape != (d, d):
            raise ValueError("rho must be square")
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        if herm > 1e-10:
            raise ValueError(f"rho deviates from Hermitian by {herm:.2e}")
        tr = complex(np.trace(self.rho))
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"trace {tr!r} deviates from 1 beyond 1e-10")

    @property
    def cutoff(self) -> int:
        return self.rho.shape[0] // 2 - 1

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def validate_psd(self, floor: float = -1e-9) -> float:
        """Smallest eigenvalue; raises if below the floor."""
        ev = float(np.linalg.eigvalsh(self.rho)[0])
        if ev < floor:
            raise ValueError(f"rho has eigenvalue {ev:.3e} below {floor:.1e}")
        return ev


def apply_phase_noise(state: TwoComponentEntangledState,
                      dphi: float) -> DephasedJointState:
    """Phase-diffusion channel on the field mode of the joint pure state."""
    psi = state.joint_vector()
    rho = np.outer(psi, psi.conj())
    return DephasedJointState(dephase_joint(rho, dphi), float(dphi), state)


def _qubit_negativity(rho: np.ndarray) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over the qubit."""
    dim = rho.shape[0]
    db = dim // 2
    blocks = rho.reshape(2, db, 2, db)
    pt = blocks.transpose(2, 1, 0, 3).reshape(dim, dim)
    ev = np.linalg.eigvalsh(pt)
    return float(-ev[ev < 0.0].sum())


@dataclass
class NegativityReport:
    """Entanglement after dephasing, absolute and relative to dphi = 0."""

    dphi: float
    negativity: float
    fraction: float
    trace_check: float

    def as_dict(self) -> dict:
        return {
            "dphi": self.dphi,
            "negativity": self.negativity,
            "fraction": self.fraction,
            "trace_check": self.trace_check,
        }


def negativity(dephased: DephasedJointState) -> NegativityReport:
    """Negativity of the dephased state and its fraction E of the dphi = 0
    value.  Raises for unentangled input (parallel components)."""
    value = _qubit_negativity(dephased.rho)
    psi = dephased.source.joint_vector()
    ref = _qubit_negativity(np.outer(psi, psi.conj()))
    if ref < 1e-12:
        raise ValueError("components carry no entanglement at dphi = 0")
    return NegativityReport(dphi=dephased.dphi, negativity=value,
                            fraction=value / ref,
                            trace_check=dephased.trace())


@dataclass
class PhaseResolutionReport:
    """Tolerable phase spread implied by a target entanglement fraction."""

    dphi: float
    p_implied: float
    size_at_p: float
    unbounded: bool = False

    def as_dict(self) -> dict:
        return {
            "dphi": None if self.unbounded else self.dphi,
            "p_implied": self.p_implied,
            "size_at_p": self.size_at_p,
            "unbounded": self.unbounded,
        }


def required_phase_resolution(
        fraction: float,
        size_p_curve: Callable[[float], Union[float, "object"]],
) -> PhaseResolutionReport:
    """Invert 'fraction E survives' into a phase-spread bound.

    E maps to the guessing probability P = (1 + sqrt(1-E^2))/2 of the
    equivalent which-path pointer; the bound is
    dphi = sqrt(2) Erfinv(2P-1) / size_P with size_P taken from the
    caller-supplied curve (a callable of P returning a size or SizeReport).
    size_P = 0 yields the unbounded flag: no finite dphi is constrained.
    """
    e = float(fraction)
    if not 0.0 <= e <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    p = 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - e * e)))
    if e >= 1.0:
        return PhaseResolutionReport(dphi=0.0, p_implied=p,
                                     size_at_p=float("nan"))
    raw = size_p_curve(p)
    sz = float(getattr(raw, "size", raw))
    if sz <= 0.0:
        return PhaseResolutionReport(dphi=float("inf"), p_implied=p,
                                     size_at_p=sz, unbounded=True)
    dphi = math.sqrt(2.0) * float(erfinv(2.0 * p - 1.0)) / sz
    return PhaseResolutionReport(dphi=dphi, p_implied=p, size_at_p=sz)


def pointer_spread_equivalence(dphi: float) -> float:
    """Position spread of the equivalent which-path pointer: 1/(2 dphi).

    Self-inverse; dphi = 0 maps to an infinitely wide (information-free)
    pointer and returns inf.
    """
    if dphi < 0:
        raise ValueError("dphi must be >= 0")
    if dphi == 0.0:
        return float("inf")
    return 1.0 / (2.0 * dphi)


def environment_guess_bound(pmf_a, pmf_b, dphi: float) -> float:
    """How well the dephasing environment itself can tell A from D: the
    guessing probability at the equivalent pointer spread sigma = 1/(2 dphi)."""
    if dphi < 0:
        raise ValueError("dphi must be >= 0")
    if dphi == 0.0:
        return 0.5
    sigma = pointer_spread_equivalence(dphi)
    return coarse.guess_probability(pmf_a, pmf_b, sigma).guess_probability
