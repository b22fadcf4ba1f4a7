"""State-vector oracle over the four Rindler modes of one frequency.

Builds the Unruh vacuum and single Unruh excitations by applying explicit
Rindler ladder matrices, forms the entangled families, then reduces and
partially transposes numerically. Nothing here reuses the closed-form term
lists of :mod:`unruhneg.states`; the two paths are compared in the tests.

Mode order of the tensor axes is ``(c_I, d_II, d_I, c_II)``, matching
:class:`unruhneg.fock.ModeId`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import FockCutoff, ModeId, _as_cutoff, ladder_matrix
from .params import (
    Bipartition,
    Family,
    SqueezingParams,
    UnruhWeights,
    as_bipartition,
    as_family,
    make_squeezing,
)
from .states import PSI_ONE_ALICE, PSI_PM_ALICE, PtMatrix

__all__ = [
    "DensityMatrix",
    "StateVector",
    "apply_unruh_annihilation",
    "apply_unruh_creation",
    "build_state",
    "make_squeezing",
    "partial_transpose_alice",
    "reduce",
    "unruh_vacuum",
]

N_MODES = 4


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes of shape ``(alice_dim, (n_max+1)**4)``; not renormalized."""

    amplitudes: np.ndarray
    n_max: int
    alice_labels: tuple = ()

    @property
    def alice_dim(self) -> int:
        return self.amplitudes.shape[0]

    def tensor(self) -> np.ndarray:
        d = self.n_max + 1
        return self.amplitudes.reshape((self.alice_dim,) + (d,) * N_MODES)

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / np.sqrt(self.norm2()), self.n_max, self.alice_labels)

    def amplitude(self, occupations, alice: int = 0) -> complex:
        return complex(self.tensor()[(alice,) + tuple(occupations)])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense reduced density matrix over ``alice ⊗ retained Rob modes``."""

    entries: np.ndarray
    retained_modes: tuple
    n_max: int
    alice_labels: tuple

    @property
    def alice_dim(self) -> int:
        return len(self.alice_labels)


def unruh_vacuum(params: SqueezingParams, cutoff) -> StateVector:
    """Truncated ``(1/C^2) sum_{n,m} T^{n+m} |nn, mm>`` (Alice dimension 1)."""
    N = _as_cutoff(cutoff).n_max
    d = N + 1
    psi = np.zeros((1, d, d, d, d), dtype=complex)
    k = np.arange(d)
    pair = np.diag(params.T ** k.astype(float))
    # pair[n, n] populates (c_I, d_II); pair[m, m] populates (d_I, c_II)
    psi[0] = np.einsum("ab,cd->abcd", pair, pair) / params.C**2
    return StateVector(psi.reshape(1, -1), N)


def _apply(psi: np.ndarray, mode: ModeId, op: np.ndarray) -> np.ndarray:
    axis = 1 + int(mode)
    out = np.tensordot(op, psi, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _rindler_terms(params: SqueezingParams):
    """Rindler expansions of the Unruh ladder operators.

    Each entry is a list of ``(coefficient, mode, kind)``:

        C_R^dag = C c_I^dag  - S d_II        C_R = C c_I  - S d_II^dag
        C_L^dag = C c_II^dag - S d_I         C_L = C c_II - S d_I^dag
        D_R^dag = -S c_I  + C d_II^dag       D_R = -S c_I^dag  + C d_II
        D_L^dag = -S c_II + C d_I^dag        D_L = -S c_II^dag + C d_I
    """
    C, S = params.C, params.S
    I, II = ModeId.PARTICLE_I, ModeId.PARTICLE_II
    aI, aII = ModeId.ANTIPARTICLE_I, ModeId.ANTIPARTICLE_II
    cr, an = "create", "annihilate"
    return {
        "C_R^dag": [(C, I, cr), (-S, aII, an)],
        "C_L^dag": [(C, II, cr), (-S, aI, an)],
        "D_R^dag": [(-S, I, an), (C, aII, cr)],
        "D_L^dag": [(-S, II, an), (C, aI, cr)],
        "C_R": [(C, I, an), (-S, aII, cr)],
        "C_L": [(C, II, an), (-S, aI, cr)],
        "D_R": [(-S, I, cr), (C, aII, an)],
        "D_L": [(-S, II, cr), (C, aI, an)],
    }


def _apply_combination(state: StateVector, combo, params: SqueezingParams) -> StateVector:
    terms = _rindler_terms(params)
    ladders = {kind: ladder_matrix(kind, state.n_max) for kind in ("create", "annihilate")}
    psi = state.tensor()
    out = np.zeros_like(psi, dtype=complex)
    for weight, name in combo:
        if weight == 0:
            continue
        for coef, mode, kind in terms[name]:
            out = out + weight * coef * _apply(psi, mode, ladders[kind])
    return StateVector(out.reshape(state.alice_dim, -1), state.n_max, state.alice_labels)


def apply_unruh_creation(species: str, weights: UnruhWeights, params: SqueezingParams,
                         state: StateVector) -> StateVector:
    """Apply ``c_U^dag = q_R C_R^dag + q_L C_L^dag`` (``species='particle'``) or
    ``d_U^dag = q_L D_R^dag + q_R D_L^dag`` (``species='antiparticle'``)."""
    qR, qL = weights.q_r, weights.q_l
    if species == "particle":
        combo = [(qR, "C_R^dag"), (qL, "C_L^dag")]
    elif species == "antiparticle":
        combo = [(qL, "D_R^dag"), (qR, "D_L^dag")]
    else:
        raise ValueError(f"unknown species {species!r}")
    return _apply_combination(state, combo, params)


def apply_unruh_annihilation(species: str, weights: UnruhWeights, params: SqueezingParams,
                             state: StateVector) -> StateVector:
    """Adjoint of :func:`apply_unruh_creation`."""
    qR, qL = np.conj(weights.q_r), np.conj(weights.q_l)
    if species == "particle":
        combo = [(qR, "C_R"), (qL, "C_L")]
    elif species == "antiparticle":
        combo = [(qL, "D_R"), (qR, "D_L")]
    else:
        raise ValueError(f"unknown species {species!r}")
    return _apply_combination(state, combo, params)


def build_state(family, weights: UnruhWeights, params: SqueezingParams, cutoff,
                normalize: bool = True) -> StateVector:
    """Alice (two-level) ⊗ four Rindler modes for one of the three families.

    With ``normalize`` each branch ket is scaled to unit norm at this
    truncation before the ``1/sqrt(2)`` superposition.
    """
    family = as_family(family)
    N = _as_cutoff(cutoff).n_max
    vac = unruh_vacuum(params, N)

    def branch(state):
        return state.normalized() if normalize else state

    if family is Family.PSI_ONE:
        first = branch(apply_unruh_creation("antiparticle", weights, params, vac))
        second = branch(apply_unruh_creation("particle", weights, params, vac))
        labels = PSI_ONE_ALICE
    else:
        species = "particle" if family is Family.PSI_PLUS else "antiparticle"
        first = branch(vac)
        second = branch(apply_unruh_creation(species, weights, params, vac))
        labels = PSI_PM_ALICE
    amps = np.stack([first.amplitudes[0], second.amplitudes[0]]) / np.sqrt(2.0)
    return StateVector(amps, N, labels)


_RETAINED = {
    Bipartition.FULL: (ModeId.PARTICLE_I, ModeId.ANTIPARTICLE_I),
    Bipartition.PARTICLE: (ModeId.PARTICLE_I,),
    Bipartition.ANTIPARTICLE: (ModeId.ANTIPARTICLE_I,),
}


def reduce(state: StateVector, bipartition) -> DensityMatrix:
    """Trace region II, plus region-I antiparticles (``particle``) or
    particles (``antiparticle``) when Rob only sees one species."""
    bipartition = as_bipartition(bipartition)
    psi = state.tensor()
    # axes: a, c_I, d_II, d_I, c_II
    if bipartition is Bipartition.FULL:
        rho = np.einsum("aixjy,bkxly->aijbkl", psi, psi.conj())
    elif bipartition is Bipartition.PARTICLE:
        rho = np.einsum("aixjy,bkxjy->aibk", psi, psi.conj())
    else:
        rho = np.einsum("aixjy,bixly->ajbl", psi, psi.conj())
    half = rho.ndim // 2
    dim = int(np.prod(rho.shape[:half]))
    labels = state.alice_labels or tuple(str(i) for i in range(state.alice_dim))
    return DensityMatrix(rho.reshape(dim, dim), _RETAINED[bipartition], state.n_max, labels)


def partial_transpose_alice(rho) -> PtMatrix:
    """Transpose Alice's indices: ``out[(a,i),(b,j)] = rho[(b,i),(a,j)]``.

    Accepts a :class:`DensityMatrix` or a :class:`PtMatrix` (the map is an
    involution).
    """
    if isinstance(rho, PtMatrix):
        entries, modes = rho.to_dense(), rho.rob_modes
    else:
        entries, modes = np.asarray(rho.entries), rho.retained_modes
    A = len(rho.alice_labels)
    dim = entries.shape[0]
    if entries.shape != (dim, dim) or dim % A:
        raise ValueError(f"matrix of shape {entries.shape} does not split as {A} x rob")
    rob = dim // A
    pt = entries.reshape(A, rob, A, rob).transpose(2, 1, 0, 3).reshape(dim, dim)
    return PtMatrix(sp.csr_matrix(pt), rho.alice_labels, modes, rho.n_max)


def oracle_pt(family, bipartition, weights: UnruhWeights, params: SqueezingParams, cutoff,
              normalize: bool = True) -> np.ndarray:
    """Dense partially transposed matrix via build_state -> reduce -> transpose."""
    state = build_state(family, weights, params, cutoff, normalize)
    return partial_transpose_alice(reduce(state, bipartition)).to_dense()
