"""Scalar parameters shared by the oracle and the direct assembly."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional


class Family(enum.Enum):
    PSI_PLUS = "psi-plus"
    PSI_MINUS = "psi-minus"
    PSI_ONE = "psi-one"


class Bipartition(enum.Enum):
    FULL = "full"                  # Rob sees particles and antiparticles of region I
    PARTICLE = "particle"          # region-I antiparticles traced out
    ANTIPARTICLE = "antiparticle"  # region-I particles traced out


def as_family(value) -> Family:
    return value if isinstance(value, Family) else Family(str(value).lower().replace("_", "-"))


def as_bipartition(value) -> Bipartition:
    return value if isinstance(value, Bipartition) else Bipartition(str(value).lower())


@dataclass(frozen=True)
class SqueezingParams:
    """Bogoliubov squeezing ``r`` and its derived scalars.

    ``omega`` is the dimensionless Rindler frequency with
    ``tanh(r) = exp(-pi * omega)``; it is ``inf`` at ``r = 0``.
    """

    r: float
    T: float
    C: float
    S: float
    omega: Optional[float] = None


def make_squeezing(r=None, *, omega=None, energy=None, acceleration=None) -> SqueezingParams:
    """Build :class:`SqueezingParams` from exactly one of ``r``, ``omega``
    or the pair ``(energy, acceleration)`` (``omega = energy / acceleration``).
    """
    given = [r is not None, omega is not None, energy is not None or acceleration is not None]
    if sum(given) != 1:
        raise ValueError("supply exactly one of r, omega, or (energy, acceleration)")

    if r is not None:
        r = float(r)
        if not math.isfinite(r) or r < 0:
            raise ValueError(f"r must be finite and >= 0, got {r}")
        T = math.tanh(r)
        omega_out = math.inf if T == 0.0 else -math.log(T) / math.pi
        return SqueezingParams(r=r, T=T, C=math.cosh(r), S=math.sinh(r), omega=omega_out)

    if omega is None:
        if energy is None or acceleration is None:
            raise ValueError("energy and acceleration must be given together")
        energy, acceleration = float(energy), float(acceleration)
        for name, v in (("energy", energy), ("acceleration", acceleration)):
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        omega = energy / acceleration
    omega = float(omega)
    if not math.isfinite(omega) or omega <= 0:
        raise ValueError(f"omega must be finite and > 0, got {omega}")
    T = math.exp(-math.pi * omega)
    if T >= 1.0:
        raise ValueError(f"omega={omega} too small: tanh(r) rounds to 1")
    r = math.atanh(T)
    return SqueezingParams(r=r, T=T, C=math.cosh(r), S=math.sinh(r), omega=omega)


@dataclass(frozen=True)
class UnruhWeights:
    """Unruh-mode weights ``(q_R, q_L)`` with ``|q_R|^2 + |q_L|^2 = 1``.

    The antiparticle weights are not stored: they follow from
    ``p_L = q_R`` and ``p_R = q_L``.
    """

    q_r: complex
    q_l: complex

    def __post_init__(self):
        norm = abs(self.q_r) ** 2 + abs(self.q_l) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|q_R|^2 + |q_L|^2 = {norm!r}, expected 1")

    @classmethod
    def from_qr(cls, q_r, phase_l: float = 0.0) -> "UnruhWeights":
        """Complete ``q_r`` with ``q_L = sqrt(1 - |q_R|^2) e^{i phase_l}``."""
        q_r = complex(q_r)
        mag = abs(q_r)
        if mag > 1.0 + 1e-15:
            raise ValueError(f"|q_R| = {mag} exceeds 1")
        q_l = math.sqrt(max(0.0, 1.0 - mag * mag)) * cmath.exp(1j * phase_l)
        return cls(q_r, q_l)

    def with_phase(self, phi: float) -> "UnruhWeights":
        """Same weights with ``q_R`` multiplied by ``e^{i phi}``."""
        return UnruhWeights(self.q_r * cmath.exp(1j * phi), self.q_l)
