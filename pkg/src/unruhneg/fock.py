"""Truncated Fock-space bookkeeping.

Basis tuples are enumerated lexicographically with the last mode running
fastest, so the position of a tuple in :func:`enumerate_basis` is its
flattened tensor index.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

#: Largest basis (number of tuples) that :func:`enumerate_basis` will build.
MAX_BASIS_SIZE = 20_000_000


class SizingError(ValueError):
    """Raised when a requested basis is larger than :data:`MAX_BASIS_SIZE`."""


class ModeId(enum.IntEnum):
    """The four Rindler modes of one frequency, in ket order ``|nm,pq>``."""

    PARTICLE_I = 0
    ANTIPARTICLE_II = 1
    ANTIPARTICLE_I = 2
    PARTICLE_II = 3


@dataclass(frozen=True)
class FockCutoff:
    """Maximum occupation per mode (inclusive), shared by all modes."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def _as_cutoff(cutoff) -> FockCutoff:
    return cutoff if isinstance(cutoff, FockCutoff) else FockCutoff(int(cutoff))


def basis_size(cutoff, n_modes: int) -> int:
    return _as_cutoff(cutoff).dim ** n_modes


def enumerate_basis(cutoff, n_modes: int, max_size: int = MAX_BASIS_SIZE) -> list[tuple[int, ...]]:
    """All occupation tuples for ``n_modes`` modes, last mode fastest.

    >>> enumerate_basis(FockCutoff(1), 2)
    [(0, 0), (0, 1), (1, 0), (1, 1)]
    """
    cutoff = _as_cutoff(cutoff)
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    size = basis_size(cutoff, n_modes)
    if size > max_size:
        raise SizingError(f"basis of {size} states exceeds the maximum of {max_size}")
    return list(itertools.product(range(cutoff.dim), repeat=n_modes))


def flatten(occupations, cutoff) -> int:
    """Flattened index of an occupation tuple."""
    cutoff = _as_cutoff(cutoff)
    idx = 0
    for occ in occupations:
        if not 0 <= occ <= cutoff.n_max:
            raise ValueError(f"occupation {occ} outside 0..{cutoff.n_max}")
        idx = idx * cutoff.dim + occ
    return idx


def unflatten(index: int, cutoff, n_modes: int) -> tuple[int, ...]:
    cutoff = _as_cutoff(cutoff)
    if not 0 <= index < cutoff.dim ** n_modes:
        raise ValueError(f"index {index} out of range")
    occ = []
    for _ in range(n_modes):
        index, rem = divmod(index, cutoff.dim)
        occ.append(rem)
    return tuple(reversed(occ))


def ladder_element(kind: str, n_from: int, cutoff) -> tuple[float, int]:
    """Matrix element of a single-mode ladder operator.

    Returns ``(amplitude, n_to)``. Creation at the truncation edge and
    annihilation of the vacuum give amplitude 0; the target occupation is
    then reported as ``n_from``.
    """
    cutoff = _as_cutoff(cutoff)
    if not 0 <= n_from <= cutoff.n_max:
        raise ValueError(f"n_from={n_from} outside 0..{cutoff.n_max}")
    if kind == "create":
        if n_from == cutoff.n_max:
            return 0.0, n_from
        return math.sqrt(n_from + 1), n_from + 1
    if kind == "annihilate":
        if n_from == 0:
            return 0.0, n_from
        return math.sqrt(n_from), n_from - 1
    raise ValueError(f"unknown ladder kind {kind!r}")


def ladder_matrix(kind: str, cutoff) -> np.ndarray:
    """Dense single-mode matrix built from :func:`ladder_element`."""
    cutoff = _as_cutoff(cutoff)
    mat = np.zeros((cutoff.dim, cutoff.dim))
    for n in range(cutoff.dim):
        amp, target = ladder_element(kind, n, cutoff)
        if amp:
            mat[target, n] = amp
    return mat
