"""Direct assembly of the partially transposed Alice-Rob density matrices.

Each assembler writes the closed-form term families of one reduced state
straight into a sparse matrix, skipping the four-mode state vector used by
:mod:`unruhneg.bogoliubov`. The partial transpose acts on Alice's factor.

Truncation follows the oracle exactly: a term is kept only when every
occupation of the underlying four-mode kets is ``<= n_max``, including the
region-II occupations that were traced out. Sums over traced Rob modes are
therefore finite geometric sums (:func:`vacuum_sum`, :func:`excitation_sum`)
which tend to ``C**2`` and ``C**4`` as ``n_max -> inf``.

Basis order is Alice-major: index ``a * rob_dim + j`` where ``j`` is the
flattened Rob occupation tuple (last mode fastest).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .fock import FockCutoff, ModeId, _as_cutoff
from .params import Bipartition, Family, SqueezingParams, UnruhWeights, as_bipartition, as_family

HERMITICITY_TOL = 1e-14

PSI_PM_ALICE = ("0", "1")
PSI_ONE_ALICE = ("+", "-")

_ROB_MODES = {
    Bipartition.FULL: (ModeId.PARTICLE_I, ModeId.ANTIPARTICLE_I),
    Bipartition.PARTICLE: (ModeId.PARTICLE_I,),
    Bipartition.ANTIPARTICLE: (ModeId.ANTIPARTICLE_I,),
}


class AssemblyError(RuntimeError):
    """An assembled matrix failed its Hermiticity self-check."""


@dataclass(frozen=True, eq=False)
class PtMatrix:
    """Partially transposed Alice-Rob matrix with its basis labels.

    ``entries`` is a sparse CSR matrix of size
    ``len(alice_labels) * (n_max + 1) ** len(rob_modes)``. ``block_key``, when
    present, is one integer per basis element; entries between different keys
    vanish (see :func:`unruhneg.negativity.block_decompose`).
    """

    entries: sp.csr_matrix
    alice_labels: tuple
    rob_modes: tuple
    n_max: int
    block_key: Optional[np.ndarray] = field(default=None)

    @property
    def alice_dim(self) -> int:
        return len(self.alice_labels)

    @property
    def rob_dim(self) -> int:
        return (self.n_max + 1) ** len(self.rob_modes)

    @property
    def dim(self) -> int:
        return self.alice_dim * self.rob_dim

    @property
    def rob_labels(self) -> list:
        k = len(self.rob_modes)
        occ = np.indices((self.n_max + 1,) * k).reshape(k, -1).T
        return [tuple(int(x) for x in row) for row in occ]

    def to_dense(self) -> np.ndarray:
        return self.entries.toarray()

    def trace(self) -> complex:
        return complex(self.entries.diagonal().sum())

    def hermiticity_error(self) -> float:
        diff = self.entries - self.entries.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0


# ---------------------------------------------------------------------------
# truncated sums and branch norms


def vacuum_sum(T: float, n_max: int) -> float:
    """``sum_{k=0}^{n_max} T^{2k}``; equals ``C**2`` without truncation."""
    if n_max < 0:
        return 0.0
    return float(np.sum(T ** (2.0 * np.arange(n_max + 1))))


def excitation_sum(T: float, n_max: int) -> float:
    """``sum_{k=0}^{n_max} (k+1) T^{2k}``; equals ``C**4`` without truncation."""
    if n_max < 0:
        return 0.0
    k = np.arange(n_max + 1)
    return float(np.sum((k + 1) * T ** (2.0 * k)))


def branch_norms(params: SqueezingParams, n_max: int) -> tuple[float, float]:
    """Squared norms of the truncated vacuum and single-excitation kets.

    Both Unruh excitations (particle or antiparticle, any weights) have the
    same truncated norm.
    """
    C = params.C
    G = vacuum_sum(params.T, n_max)
    H = excitation_sum(params.T, n_max - 1)
    return (G / C**2) ** 2, G * H / C**6


# ---------------------------------------------------------------------------
# term collection


class _Terms:
    """Collects ``value * |a, ket><b, bra|`` contributions as COO triples."""

    def __init__(self, alice_dim: int, n_rob: int, n_max: int):
        self.alice_dim = alice_dim
        self.n_rob = n_rob
        self.n_max = n_max
        self.d = n_max + 1
        self.rob_dim = self.d**n_rob
        self.rows, self.cols, self.vals = [], [], []

    def _index(self, a, occ):
        j = np.zeros_like(occ[0])
        for o in occ:
            j = j * self.d + o
        return a * self.rob_dim + j

    def add(self, a, ket, b, bra, values, mask=True):
        ket = tuple(np.asarray(k) for k in ket)
        bra = tuple(np.asarray(k) for k in bra)
        ok = np.broadcast_to(np.asarray(mask, dtype=bool), ket[0].shape).copy()
        for occ in ket + bra:
            ok &= (occ >= 0) & (occ <= self.n_max)
        values = np.broadcast_to(np.asarray(values, dtype=complex), ket[0].shape)
        self.rows.append(self._index(a, ket)[ok])
        self.cols.append(self._index(b, bra)[ok])
        self.vals.append(values[ok])

    def add_hc(self, a, ket, b, bra, values, mask=True):
        """Add a term together with its Hermitian conjugate."""
        self.add(a, ket, b, bra, values, mask)
        self.add(b, bra, a, ket, np.conj(values), mask)

    def matrix(self) -> sp.csr_matrix:
        dim = self.alice_dim * self.rob_dim
        if not self.rows:
            return sp.csr_matrix((dim, dim), dtype=complex)
        mat = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(dim, dim),
        ).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        return mat


def _finish(mat: sp.csr_matrix, norms, normalize: bool, rob_dim: int) -> sp.csr_matrix:
    err = float(abs(mat - mat.conj().T).max()) if mat.nnz else 0.0
    scale = max(1.0, float(abs(mat).max()) if mat.nnz else 0.0)
    if err > HERMITICITY_TOL * scale:
        raise AssemblyError(f"assembled matrix is not Hermitian (deviation {err:.3e})")
    mat = ((mat + mat.conj().T) * 0.5).tocsr()
    if normalize:
        inv = np.repeat(1.0 / np.sqrt(np.asarray(norms, dtype=float)), rob_dim)
        D = sp.diags(inv)
        mat = (D @ mat @ D).tocsr()
    return mat


def _grid2(n_max):
    n, m = np.indices((n_max + 1, n_max + 1)).reshape(2, -1)
    return n, m


def _check(cutoff) -> int:
    n_max = _as_cutoff(cutoff).n_max
    if n_max < 1:
        raise ValueError("assembly needs n_max >= 1")
    return n_max


def _pm_key(n_max, n_rob, sign_n, sign_m):
    # k = a + n - m for Psi+/-; single-mode variants drop the absent index
    a = np.repeat([0, 1], (n_max + 1) ** n_rob)
    occ = np.indices((n_max + 1,) * n_rob).reshape(n_rob, -1)
    rob = sign_n * occ[0] + (sign_m * occ[1] if n_rob == 2 else 0)
    return a + np.tile(rob, 2)


def _one_key(n_max, n_rob):
    # k = n - m - w with w = +1 for |+> (index 0), -1 for |-> (index 1)
    w = np.repeat([1, -1], (n_max + 1) ** n_rob)
    occ = np.indices((n_max + 1,) * n_rob).reshape(n_rob, -1)
    rob = occ[0] - (occ[1] if n_rob == 2 else 0)
    return np.tile(rob, 2) - w


# ---------------------------------------------------------------------------
# the five assemblers


def assemble_psi_pm_full(weights: UnruhWeights, params: SqueezingParams, cutoff,
                         normalize: bool = True) -> PtMatrix:
    """Psi+ with Rob holding both region-I particle (n) and antiparticle (m)."""
    N = _check(cutoff)
    T, C = params.T, params.C
    qR, qL = weights.q_r, weights.q_l
    n, m = _grid2(N)
    w = T ** (2.0 * (n + m)) / (2 * C**4)
    t = _Terms(2, 2, N)

    t.add(0, (n, m), 0, (n, m), w)
    t.add(1, (n + 1, m), 1, (n + 1, m), w / C**2 * (n + 1) * abs(qR) ** 2)
    t.add(1, (n + 1, m + 1), 1, (n, m), w / C**2 * T * np.sqrt((n + 1) * (m + 1)) * qR * np.conj(qL))
    t.add(1, (n, m), 1, (n + 1, m + 1), w / C**2 * T * np.sqrt((n + 1) * (m + 1)) * qL * np.conj(qR))
    # hidden region-II particle count is m+1
    t.add(1, (n, m), 1, (n, m), w / C**2 * (m + 1) * abs(qL) ** 2, mask=m + 1 <= N)
    t.add_hc(1, (n, m), 0, (n + 1, m), w / C * np.sqrt(n + 1) * np.conj(qR))
    t.add_hc(1, (n, m + 1), 0, (n, m), w / C * T * np.sqrt(m + 1) * np.conj(qL))

    mat = _finish(t.matrix(), branch_norms(params, N), normalize, t.rob_dim)
    return PtMatrix(mat, PSI_PM_ALICE, _ROB_MODES[Bipartition.FULL], N, _pm_key(N, 2, 1, -1))


def assemble_psi_pm_particle(weights: UnruhWeights, params: SqueezingParams, cutoff,
                             normalize: bool = True) -> PtMatrix:
    """Psi+ with region-I antiparticles traced out; Rob label is the particle count."""
    N = _check(cutoff)
    T, C = params.T, params.C
    qR, qL = weights.q_r, weights.q_l
    G, H = vacuum_sum(T, N), excitation_sum(T, N - 1)
    n = np.arange(N + 1)
    w = T ** (2.0 * n) / 2
    t = _Terms(2, 1, N)

    t.add(0, (n,), 0, (n,), w * G / C**4)
    t.add(1, (n + 1,), 1, (n + 1,), w * (n + 1) * abs(qR) ** 2 * G / C**6)
    t.add(1, (n,), 1, (n,), w * abs(qL) ** 2 * H / C**6)
    t.add_hc(1, (n,), 0, (n + 1,), w * np.sqrt(n + 1) * np.conj(qR) * G / C**5)

    mat = _finish(t.matrix(), branch_norms(params, N), normalize, t.rob_dim)
    return PtMatrix(mat, PSI_PM_ALICE, _ROB_MODES[Bipartition.PARTICLE], N, _pm_key(N, 1, 1, 0))


def assemble_psi_pm_antiparticle(weights: UnruhWeights, params: SqueezingParams, cutoff,
                                 normalize: bool = True) -> PtMatrix:
    """Psi+ with region-I particles traced out; Rob label is the antiparticle count."""
    N = _check(cutoff)
    T, C = params.T, params.C
    qR, qL = weights.q_r, weights.q_l
    G, H = vacuum_sum(T, N), excitation_sum(T, N - 1)
    m = np.arange(N + 1)
    w = T ** (2.0 * m) / 2
    t = _Terms(2, 1, N)

    t.add(0, (m,), 0, (m,), w * G / C**4)
    # -> |q_R|^2 / C^2 untruncated
    t.add(1, (m,), 1, (m,), w * abs(qR) ** 2 * H / C**6)
    t.add(1, (m,), 1, (m,), w * (m + 1) * abs(qL) ** 2 * G / C**6, mask=m + 1 <= N)
    t.add_hc(1, (m + 1,), 0, (m,), w * T * np.sqrt(m + 1) * np.conj(qL) * G / C**5)

    mat = _finish(t.matrix(), branch_norms(params, N), normalize, t.rob_dim)
    # single label is an antiparticle count, so k = a - m
    key = _pm_key(N, 1, -1, 0)
    return PtMatrix(mat, PSI_PM_ALICE, _ROB_MODES[Bipartition.ANTIPARTICLE], N, key)


def assemble_psi1_full(weights: UnruhWeights, params: SqueezingParams, cutoff,
                       normalize: bool = True) -> PtMatrix:
    """Psi_1, Rob holding region-I particles (n) and antiparticles (m).

    Alice index 0 is ``|+>`` (paired with the antiparticle excitation),
    index 1 is ``|->`` (paired with the particle excitation).
    """
    N = _check(cutoff)
    T, C = params.T, params.C
    qR, qL = weights.q_r, weights.q_l
    n, m = _grid2(N)
    w = T ** (2.0 * (n + m)) / (2 * C**6)
    root = np.sqrt((n + 1) * (m + 1))
    P, M = 0, 1
    t = _Terms(2, 2, N)

    # |-><-|
    t.add(M, (n + 1, m), M, (n + 1, m), w * (n + 1) * abs(qR) ** 2)
    t.add(M, (n + 1, m + 1), M, (n, m), w * T * root * qR * np.conj(qL))
    t.add(M, (n, m), M, (n + 1, m + 1), w * T * root * qL * np.conj(qR))
    t.add(M, (n, m), M, (n, m), w * (m + 1) * abs(qL) ** 2, mask=m + 1 <= N)
    # |+><+|
    t.add(P, (n, m + 1), P, (n, m + 1), w * (m + 1) * abs(qR) ** 2)
    t.add(P, (n + 1, m + 1), P, (n, m), w * T * root * qR * np.conj(qL))
    t.add(P, (n, m), P, (n + 1, m + 1), w * T * root * qL * np.conj(qR))
    t.add(P, (n, m), P, (n, m), w * (n + 1) * abs(qL) ** 2, mask=n + 1 <= N)
    # |-><+| and h.c.
    t.add_hc(M, (n, m + 2), P, (n, m), w * T * np.sqrt((m + 1) * (m + 2)) * qR * np.conj(qL))
    t.add_hc(M, (n, m + 1), P, (n + 1, m), w * root * abs(qR) ** 2)
    t.add_hc(M, (n, m + 1), P, (n + 1, m), w * root * T**2 * abs(qL) ** 2)
    t.add_hc(M, (n, m), P, (n + 2, m), w * T * np.sqrt((n + 1) * (n + 2)) * qL * np.conj(qR))

    _, exc = branch_norms(params, N)
    mat = _finish(t.matrix(), (exc, exc), normalize, t.rob_dim)
    return PtMatrix(mat, PSI_ONE_ALICE, _ROB_MODES[Bipartition.FULL], N, _one_key(N, 2))


def assemble_psi1_particle(weights: UnruhWeights, params: SqueezingParams, cutoff,
                           normalize: bool = True) -> PtMatrix:
    """Psi_1 with region-I antiparticles traced out."""
    N = _check(cutoff)
    T, C = params.T, params.C
    qR, qL = weights.q_r, weights.q_l
    G, H = vacuum_sum(T, N), excitation_sum(T, N - 1)
    n = np.arange(N + 1)
    w = T ** (2.0 * n) / (2 * C**6)
    P, M = 0, 1
    t = _Terms(2, 1, N)

    t.add(M, (n + 1,), M, (n + 1,), w * (n + 1) * abs(qR) ** 2 * G)
    t.add(M, (n,), M, (n,), w * abs(qL) ** 2 * H)
    t.add(P, (n,), P, (n,), w * abs(qR) ** 2 * H)
    t.add(P, (n,), P, (n,), w * (n + 1) * abs(qL) ** 2 * G, mask=n + 1 <= N)
    t.add_hc(M, (n,), P, (n + 2,), w * T * np.sqrt((n + 1) * (n + 2)) * qL * np.conj(qR) * G)

    _, exc = branch_norms(params, N)
    mat = _finish(t.matrix(), (exc, exc), normalize, t.rob_dim)
    return PtMatrix(mat, PSI_ONE_ALICE, _ROB_MODES[Bipartition.PARTICLE], N, _one_key(N, 1))


# ---------------------------------------------------------------------------
# relabelings and dispatch


def _permute(pt: PtMatrix, perm: np.ndarray, rob_modes, alice_labels=None) -> PtMatrix:
    """Move basis element ``i`` to position ``perm[i]``."""
    dim = pt.dim
    P = sp.csr_matrix((np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim))
    mat = (P @ pt.entries @ P.T).tocsr()
    key = None
    if pt.block_key is not None:
        key = np.empty_like(pt.block_key)
        key[perm] = pt.block_key
    return PtMatrix(mat, alice_labels or pt.alice_labels, rob_modes, pt.n_max, key)


def swap_rob_species(pt: PtMatrix) -> PtMatrix:
    """Relabel Rob's particles as antiparticles and vice versa."""
    modes = {ModeId.PARTICLE_I: ModeId.ANTIPARTICLE_I, ModeId.ANTIPARTICLE_I: ModeId.PARTICLE_I}
    if len(pt.rob_modes) == 1:
        return PtMatrix(pt.entries, pt.alice_labels, (modes[pt.rob_modes[0]],), pt.n_max, pt.block_key)
    d = pt.n_max + 1
    a, n, m = np.indices((pt.alice_dim, d, d)).reshape(3, -1)
    perm = (a * d + m) * d + n
    return _permute(pt, perm, pt.rob_modes)


def swap_alice(pt: PtMatrix) -> PtMatrix:
    """Exchange the two Alice basis states (labels stay in place)."""
    a, j = np.indices((pt.alice_dim, pt.rob_dim)).reshape(2, -1)
    perm = (pt.alice_dim - 1 - a) * pt.rob_dim + j
    return _permute(pt, perm, pt.rob_modes)


_ASSEMBLERS = {
    (Family.PSI_PLUS, Bipartition.FULL): assemble_psi_pm_full,
    (Family.PSI_PLUS, Bipartition.PARTICLE): assemble_psi_pm_particle,
    (Family.PSI_PLUS, Bipartition.ANTIPARTICLE): assemble_psi_pm_antiparticle,
    (Family.PSI_ONE, Bipartition.FULL): assemble_psi1_full,
    (Family.PSI_ONE, Bipartition.PARTICLE): assemble_psi1_particle,
}


def assemble_pt(family, bipartition, weights: UnruhWeights, params: SqueezingParams, cutoff,
                normalize: bool = True) -> PtMatrix:
    """Partially transposed matrix for any family and bipartition.

    Psi- is Psi+ with particles and antiparticles exchanged; Psi_1 with
    region-I particles traced out is its particle-only matrix with Alice's
    two states exchanged.
    """
    family, bipartition = as_family(family), as_bipartition(bipartition)
    if family is Family.PSI_MINUS:
        mirrored = {
            Bipartition.FULL: Bipartition.FULL,
            Bipartition.PARTICLE: Bipartition.ANTIPARTICLE,
            Bipartition.ANTIPARTICLE: Bipartition.PARTICLE,
        }[bipartition]
        return swap_rob_species(_ASSEMBLERS[Family.PSI_PLUS, mirrored](weights, params, cutoff, normalize))
    if family is Family.PSI_ONE and bipartition is Bipartition.ANTIPARTICLE:
        base = assemble_psi1_particle(weights, params, cutoff, normalize)
        return swap_rob_species(swap_alice(base))
    return _ASSEMBLERS[family, bipartition](weights, params, cutoff, normalize)


def cutoff_predicate(weights: UnruhWeights, params: SqueezingParams) -> bool:
    """True iff the particle-only Psi+ matrix has negative eigenvalues: ``|q_R|^2 > T^2``."""
    return abs(weights.q_r) ** 2 > params.T**2

