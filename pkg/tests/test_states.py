import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unruhneg.bogoliubov import oracle_pt
from unruhneg.negativity import negativity_of
from unruhneg.params import Bipartition, Family, UnruhWeights, make_squeezing
from unruhneg.states import (
    assemble_psi1_full,
    assemble_psi1_particle,
    assemble_psi_pm_antiparticle,
    assemble_psi_pm_full,
    assemble_psi_pm_particle,
    assemble_pt,
    branch_norms,
    cutoff_predicate,
    excitation_sum,
    vacuum_sum,
)

ORACLE_CASES = [
    (assemble_psi_pm_full, "psi-plus", "full", 0.7, 0.5, 8),
    (assemble_psi_pm_antiparticle, "psi-plus", "antiparticle", 0.5, 0.7, 8),
    (assemble_psi1_full, "psi-one", "full", 0.6, 0.4, 8),
    (assemble_psi1_particle, "psi-one", "particle", 0.8, 0.6, 10),
    (assemble_psi_pm_particle, "psi-plus", "particle", 0.9, 1.1, 7),
]


@pytest.mark.parametrize("assembler,family,bip,q,r,n_max", ORACLE_CASES)
@pytest.mark.parametrize("normalize", [True, False])
def test_matches_oracle(assembler, family, bip, q, r, n_max, normalize):
    w, p = UnruhWeights.from_qr(q), make_squeezing(r)
    direct = assembler(w, p, n_max, normalize).to_dense()
    assert np.abs(direct - oracle_pt(family, bip, w, p, n_max, normalize)).max() <= 1e-12


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("bip", list(Bipartition))
def test_dispatcher_matches_oracle_with_complex_weights(family, bip):
    w, p = UnruhWeights.from_qr(0.6 * np.exp(0.7j), phase_l=-1.2), make_squeezing(0.45)
    direct = assemble_pt(family, bip, w, p, 5).to_dense()
    assert np.abs(direct - oracle_pt(family, bip, w, p, 5)).max() <= 1e-12


@settings(max_examples=25, deadline=None)
@given(q=st.floats(0.05, 1.0), r=st.floats(0.0, 1.5), n_max=st.integers(1, 5),
       family=st.sampled_from(list(Family)), bip=st.sampled_from(list(Bipartition)))
def test_oracle_property(q, r, n_max, family, bip):
    w, p = UnruhWeights.from_qr(q), make_squeezing(r)
    direct = assemble_pt(family, bip, w, p, n_max)
    assert np.abs(direct.to_dense() - oracle_pt(family, bip, w, p, n_max)).max() <= 1e-12
    assert direct.hermiticity_error() <= 1e-14
    assert direct.trace() == pytest.approx(1.0, abs=1e-12)


def test_vacuum_block_coefficient():
    w, p, n_max = UnruhWeights.from_qr(0.7), make_squeezing(0.5), 6
    pt = assemble_psi_pm_full(w, p, n_max, normalize=False)
    d = n_max + 1
    for n, m in itertools.product(range(d), repeat=2):
        i = n * d + m
        assert pt.entries[i, i] == pytest.approx(p.T ** (2 * n + 2 * m) / (2 * p.C**4), rel=1e-13)


def test_bell_pt_at_zero_squeezing():
    pt = assemble_psi_pm_full(UnruhWeights.from_qr(1), make_squeezing(0), 3)
    assert np.linalg.eigvalsh(pt.to_dense()).min() == pytest.approx(-0.5)
    assert pt.entries.nnz == 4


def test_zero_squeezing_particle_only_closed_form():
    for q in (1.0, 0.9, 0.7, 0.5):
        w = UnruhWeights.from_qr(q)
        ql2 = 1 - q * q
        expected = (math.sqrt(ql2**2 + 4 * q * q) - ql2) / 4
        pt = assemble_psi_pm_particle(w, make_squeezing(0), 4)
        assert negativity_of(pt) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.125)  # q=0.5: (sqrt(0.5625 + 1) - 0.75) / 4


def test_antiparticle_only_diagonal_at_zero_squeezing():
    pt = assemble_psi_pm_antiparticle(UnruhWeights.from_qr(1), make_squeezing(0), 4).to_dense()
    np.testing.assert_array_equal(pt, np.diag(np.diag(pt)))


def test_psi1_particle_only_diagonal_at_zero_squeezing():
    pt = assemble_psi1_particle(UnruhWeights.from_qr(0.9), make_squeezing(0), 4).to_dense()
    np.testing.assert_array_equal(pt, np.diag(np.diag(pt)))
    assert negativity_of(pt) == 0.0


def _closed_G(x, n):
    return (1 - x ** (n + 1)) / (1 - x)


def _closed_H(x, k):
    return (1 - (k + 2) * x ** (k + 1) + (k + 1) * x ** (k + 2)) / (1 - x) ** 2


@pytest.mark.parametrize("r", [0.2, 0.9, 1.6])
@pytest.mark.parametrize("n_max", [1, 6, 20])
def test_truncated_sums_closed_forms(r, n_max):
    p = make_squeezing(r)
    x = p.T**2
    assert vacuum_sum(p.T, n_max) == pytest.approx(_closed_G(x, n_max), rel=1e-13)
    assert excitation_sum(p.T, n_max) == pytest.approx(_closed_H(x, n_max), rel=1e-13)
    vac, exc = branch_norms(p, n_max)
    assert vac == pytest.approx(_closed_G(x, n_max) ** 2 / p.C**4, rel=1e-13)
    assert exc == pytest.approx(_closed_G(x, n_max) * _closed_H(x, n_max - 1) / p.C**6, rel=1e-13)


def test_sums_tend_to_untruncated_limits():
    p = make_squeezing(0.8)
    assert vacuum_sum(p.T, 400) == pytest.approx(p.C**2, rel=1e-12)
    assert excitation_sum(p.T, 400) == pytest.approx(p.C**4, rel=1e-12)


def test_cutoff_predicate():
    assert cutoff_predicate(UnruhWeights.from_qr(1), make_squeezing(5.0))
    assert not cutoff_predicate(UnruhWeights.from_qr(0.5), make_squeezing(math.atanh(0.6)))
    p = make_squeezing(0.4)
    assert not cutoff_predicate(UnruhWeights.from_qr(p.T), p)


@pytest.mark.parametrize("q,r", [(0.5, 0.8), (0.3, 0.4), (0.7, 1.0)])
def test_no_particle_entanglement_beyond_cutoff(q, r):
    w, p = UnruhWeights.from_qr(q), make_squeezing(r)
    assert not cutoff_predicate(w, p)
    # spurious negativity at small n_max dies out with the truncation
    assert negativity_of(assemble_pt("psi-plus", "particle", w, p, 1500)) <= 1e-10


def test_needs_two_levels():
    with pytest.raises(ValueError):
        assemble_psi_pm_full(UnruhWeights.from_qr(1), make_squeezing(0.3), 0)


def test_block_keys_present_and_respected():
    for fam, bip in itertools.product(Family, Bipartition):
        pt = assemble_pt(fam, bip, UnruhWeights.from_qr(0.8), make_squeezing(0.6), 5)
        assert pt.block_key is not None and len(pt.block_key) == pt.dim
        coo = pt.entries.tocoo()
        assert np.all(pt.block_key[coo.row] == pt.block_key[coo.col])
