"""Negativity of partially transposed matrices.

The PT matrices are block diagonal in a conserved charge label (the
``block_key`` carried by :class:`~unruhneg.states.PtMatrix`). The spectrum is
computed block by block; blocks are further split into connected components
of their nonzero pattern, which is exact, and equal-sized blocks are
diagonalized in one batched call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .states import PtMatrix

log = logging.getLogger(__name__)

CROSS_BLOCK_TOL = 1e-13
HERMITIAN_TOL = 1e-12
DEFAULT_EPS_EIG = 1e-10
DEFAULT_TOL = 1e-6


class StructuralViolationError(RuntimeError):
    """Entries couple basis elements with different block keys."""


class NumericalError(RuntimeError):
    """The eigensolver failed."""


@dataclass(frozen=True)
class NegativityResult:
    value: float
    n_max_used: int
    converged: bool
    last_delta: float
    eps_eig: float


def _as_pt(mat) -> PtMatrix:
    if isinstance(mat, PtMatrix):
        return mat
    arr = np.asarray(mat)
    # bare matrix: one "Alice" label per row, no Rob factor
    return PtMatrix(sp.csr_matrix(arr), tuple(str(i) for i in range(arr.shape[0])), (), 0)


def _checked_entries(mat: PtMatrix):
    """COO triples with cross-block entries verified small and dropped."""
    coo = mat.entries.tocoo()
    rows, cols, vals = coo.row, coo.col, coo.data
    if mat.block_key is not None:
        key = mat.block_key
        cross = key[rows] != key[cols]
        if cross.any():
            worst = float(np.abs(vals[cross]).max())
            if worst > CROSS_BLOCK_TOL:
                raise StructuralViolationError(
                    f"cross-block entry of magnitude {worst:.3e} (dimension {mat.dim})"
                )
            keep = ~cross
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
    nz = vals != 0
    return rows[nz], cols[nz], vals[nz]


def block_decompose(mat: PtMatrix, refine: bool = False) -> list:
    """Split ``mat`` into ``(key, dense block)`` pairs.

    Blocks are grouped by ``mat.block_key``; with ``refine`` each key block
    is further split into connected components of its nonzero pattern (keys
    may then repeat). Without a key, components are used.
    """
    mat = _as_pt(mat)
    rows, cols, vals = _checked_entries(mat)
    labels, keys = _labels(mat, rows, cols, refine)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    groups = np.split(order, bounds)
    dense = mat.entries.toarray() if mat.dim <= 4096 else None
    out = []
    for idx in groups:
        if dense is not None:
            block = dense[np.ix_(idx, idx)]
        else:
            block = mat.entries[idx][:, idx].toarray()
        out.append((int(keys[idx[0]]), block))
    if mat.block_key is not None:
        out.sort(key=lambda kb: kb[0])
    return out


def _labels(mat: PtMatrix, rows, cols, refine: bool):
    n = mat.dim
    if mat.block_key is not None and not refine:
        uniq, labels = np.unique(mat.block_key, return_inverse=True)
        return labels, mat.block_key
    graph = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    keys = mat.block_key if mat.block_key is not None else labels
    return labels, keys


def spectrum(mat, method: str = "blocks") -> np.ndarray:
    """All eigenvalues of a Hermitian PT matrix, unsorted."""
    mat = _as_pt(mat)
    try:
        if method == "dense":
            return np.linalg.eigvalsh(mat.to_dense())
        if method != "blocks":
            raise ValueError(f"unknown method {method!r}")
        return _block_spectrum(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on matrix of dimension {mat.dim}: {exc}") from exc


def _block_spectrum(mat: PtMatrix) -> np.ndarray:
    rows, cols, vals = _checked_entries(mat)
    labels, _ = _labels(mat, rows, cols, refine=True)
    n = mat.dim
    sizes = np.bincount(labels)
    # position of each basis element within its component
    order = np.argsort(labels, kind="stable")
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n) - np.repeat(starts, sizes)

    real = not np.iscomplexobj(vals) or not np.any(vals.imag)
    if real:
        vals = vals.real

    eigs = []
    ent_size = sizes[labels[rows]]
    ent_order = np.argsort(ent_size, kind="stable")
    ent_sizes_sorted = ent_size[ent_order]
    for s in np.unique(sizes):
        comps = np.flatnonzero(sizes == s)
        slot = np.full(len(sizes), -1)
        slot[comps] = np.arange(len(comps))
        stack = np.zeros((len(comps), s, s), dtype=vals.dtype)
        lo, hi = np.searchsorted(ent_sizes_sorted, [s, s + 1])
        sel = ent_order[lo:hi]
        r, c = rows[sel], cols[sel]
        stack[slot[labels[r]], pos[r], pos[c]] = vals[sel]
        eigs.append(np.linalg.eigvalsh(stack).ravel())
    return np.concatenate(eigs) if eigs else np.zeros(0)


def negativity_of(mat, eps_eig: float = DEFAULT_EPS_EIG, method: str = "blocks") -> float:
    """Absolute sum of the eigenvalues below ``-eps_eig * max(1, ||mat||)``."""
    if eps_eig < 0:
        raise ValueError("eps_eig must be >= 0")
    mat = _as_pt(mat)
    herm = mat.hermiticity_error()
    if herm > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (deviation {herm:.3e})")
    lam = spectrum(mat, method)
    if lam.size == 0:
        return 0.0
    threshold = eps_eig * max(1.0, float(np.abs(lam).max()))
    return abs(float(lam[lam < -threshold].sum()))


def converged_negativity(
    assembler: Callable[[int], PtMatrix],
    tol: float = DEFAULT_TOL,
    n_max_start: int = 8,
    n_max_cap: int = 256,
    eps_eig: float = DEFAULT_EPS_EIG,
    method: str = "blocks",
) -> NegativityResult:
    """Double the cutoff until successive negativities differ by at most ``tol``.

    ``assembler(n_max)`` must return the PT matrix at that cutoff. At the cap
    the last value is returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if n_max_start < 2:
        raise ValueError("n_max_start must be >= 2")
    n_max = min(n_max_start, n_max_cap)
    value = negativity_of(assembler(n_max), eps_eig, method)
    delta = float("inf")
    while n_max < n_max_cap:
        n_next = min(2 * n_max, n_max_cap)
        new = negativity_of(assembler(n_next), eps_eig, method)
        delta = abs(new - value)
        n_max, value = n_next, new
        if delta <= tol:
            return NegativityResult(value, n_max, True, delta, eps_eig)
    log.warning("negativity not converged at n_max=%d (last delta %.3g)", n_max, delta)
    return NegativityResult(value, n_max, False, delta, eps_eig)
