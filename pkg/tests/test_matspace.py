import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SKEW3, random_space
from ncrank.errors import DimensionError, FieldSizeWarning, ValidationError
from ncrank.exactlin import Field, Subspace, apply_image, subspace_sum
from ncrank.matspace import (
    BlownUpSpace,
    Config,
    MatrixSpace,
    blow_up,
    certificate_for,
    ncrk,
    random_element,
    rank_of_space,
    shrunk_from_wong,
    trial_rng,
    wong_limit,
    wong_sequence,
)
from ncrank.oracle import brute_ncrk

F5 = Field.prime(5)
F101 = Field.prime(101)


def test_config_validation():
    with pytest.raises(ValidationError):
        Config(mode="fast")
    with pytest.raises(ValidationError):
        Config(max_retries=0)
    with pytest.raises(ValidationError):
        Config(blowup_d=0)
    with pytest.raises(ValidationError):
        blow_up(MatrixSpace.from_matrices(F5, SKEW3), 0)


def test_trial_streams_are_reproducible_and_distinct():
    a = trial_rng(7, 0).integers(0, 2**31, 4)
    assert np.array_equal(a, trial_rng(7, 0).integers(0, 2**31, 4))
    assert not np.array_equal(a, trial_rng(7, 1).integers(0, 2**31, 4))
    assert not np.array_equal(a, trial_rng(8, 0).integers(0, 2**31, 4))


def test_basis_shape_is_checked():
    with pytest.raises(DimensionError):
        MatrixSpace(F5, 2, 2, [F5.zeros((2, 3))])


@pytest.mark.parametrize("F", [F101, Field.rationals()])
def test_skew3_ncrk_is_full(F):
    s = MatrixSpace.from_matrices(F, SKEW3)
    res = ncrk(s)
    assert res.rank == 3
    assert res.certificate.u.dim == 0 and res.certificate.c == 0
    assert res.d == 2 and F.rank(res.witness) == 6
    # commutative rank is only 2: the matrix is 3x3 skew-symmetric
    assert rank_of_space(s) == 2


def test_single_rank_one_matrix():
    s = MatrixSpace.from_matrices(F101, [[[1, 0], [0, 0]]])
    res = ncrk(s)
    assert res.rank == 1
    assert res.certificate.u == Subspace.span(F101, [[0, 1]], 2)
    assert res.certificate.image.dim == 0


def test_zero_space_and_empty_shapes():
    s = MatrixSpace(F101, 3, 2, [F101.zeros((3, 2))])
    res = ncrk(s)
    assert res.rank == 0 and res.certificate.u == Subspace.full(F101, 2)
    empty = MatrixSpace(F101, 0, 2, [F101.zeros((0, 2))])
    assert ncrk(empty).rank == 0
    wide = MatrixSpace(F101, 2, 0, [F101.zeros((2, 0))])
    assert ncrk(wide).rank == 0


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5]))
def test_ncrk_matches_brute_force(seed, p):
    rng = np.random.default_rng(seed)
    F = Field.prime(p)
    rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    k = int(rng.integers(0, min(rows, cols) + 1))
    s = random_space(rng, F, rows, cols, int(rng.integers(1, 4)), max_rank=k)
    res = ncrk(s, Config(seed=seed, max_retries=40))
    r, minimal = brute_ncrk(s)
    assert res.rank == r
    assert res.certificate.u == minimal
    assert res.certificate.verify(s)


@given(st.integers(0, 2**32 - 1))
def test_blowup_image_matches_generators(seed):
    rng = np.random.default_rng(seed)
    s = random_space(rng, F5, 2, 3, 2)
    d = int(rng.integers(1, 4))
    big = blow_up(s, d)
    k = int(rng.integers(0, big.cols + 1))
    u = Subspace.span(F5, F5.random(rng, (k, big.cols)), big.cols) if k else Subspace.zero(F5, big.cols)
    slow = Subspace.zero(F5, big.rows)
    for m in big.basis:
        slow = subspace_sum(slow, apply_image(m, u))
    assert big.image(u) == slow
    assert len(big.basis) == d * d * len(s.basis)


def test_blowup_membership():
    s = MatrixSpace.from_matrices(F101, SKEW3)
    big = blow_up(s, 2)
    a = big.random_element(trial_rng(0, 0))
    coeffs = big.coefficients_of(a)
    assert coeffs is not None and coeffs.shape == (2, 2, 3)
    rebuilt = F101.zeros((6, 6))
    for i, A in enumerate(s.basis):
        rebuilt = F101.add(rebuilt, F101.kron(coeffs[:, :, i], A))
    assert np.array_equal(rebuilt, a)
    assert big.coefficients_of(F101.eye(6)) is None


@given(st.integers(0, 2**32 - 1))
def test_wong_sequence_is_monotone(seed):
    rng = np.random.default_rng(seed)
    s = random_space(rng, F5, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(1, 4)), max_rank=1)
    a = s.random_element(rng)
    seq = wong_sequence(s, a)
    assert seq[0].dim == 0
    assert len(seq) - 1 <= s.cols
    for lo, hi in zip(seq, seq[1:]):
        assert lo <= hi and lo.dim < hi.dim
    cert = shrunk_from_wong(s, a)
    if cert is not None:
        assert cert.verify(s)
        assert cert.c == s.cols - F5.rank(a)


def test_wong_rejects_wrong_shape():
    s = MatrixSpace.from_matrices(F5, SKEW3)
    with pytest.raises(DimensionError):
        wong_sequence(s, F5.zeros((2, 3)))


def test_certificate_for_reports_shrinkage():
    s = MatrixSpace.from_matrices(F5, [[[1, 0], [0, 0]]])
    cert = certificate_for(s, Subspace.full(F5, 2))
    assert (cert.u.dim, cert.image.dim, cert.c) == (2, 1, 1)


def test_small_field_warns_but_answers():
    s = MatrixSpace.from_matrices(Field.prime(2), SKEW3)
    with pytest.warns(FieldSizeWarning):
        res = ncrk(s, Config(max_retries=30))
    assert res.rank == 3
    with pytest.warns(FieldSizeWarning):
        random_element(s, 0)


def test_oracle_mode_agrees():
    s = MatrixSpace.from_matrices(F5, SKEW3)
    assert ncrk(s, Config(mode="oracle")).rank == 3
    assert rank_of_space(s, Config(mode="oracle")) == 2


def test_seed_changes_witness_not_answer():
    s = MatrixSpace.from_matrices(F101, SKEW3)
    a, b = ncrk(s, Config(seed=1)), ncrk(s, Config(seed=2))
    assert a.rank == b.rank == 3
    assert not np.array_equal(a.witness, b.witness)
    assert np.array_equal(ncrk(s, Config(seed=1)).witness, a.witness)


def test_blown_up_space_is_a_matrix_space():
    s = MatrixSpace.from_matrices(F5, SKEW3)
    big = blow_up(s, 2)
    assert isinstance(big, BlownUpSpace) and (big.rows, big.cols) == (6, 6)
    assert ncrk(big).rank == 6


def test_image_of_first_coordinate():
    s = MatrixSpace.from_matrices(F101, SKEW3)
    img = s.image(Subspace.span(F101, [[1, 0, 0]], 3))
    assert img == Subspace.span(F101, [[0, 1, 0], [0, 0, 1]], 3)
    assert s.image(Subspace.zero(F101, 3)).dim == 0


def test_second_blowup_shape():
    big = blow_up(MatrixSpace.from_matrices(F101, SKEW3), 2)
    assert len(big.basis) == 12 and all(m.shape == (6, 6) for m in big.basis)
    zero = blow_up(MatrixSpace(F101, 2, 3, [F101.zeros((2, 3))]), 3)
    assert (zero.rows, zero.cols) == (6, 9) and all(not m.any() for m in zero.basis)


def test_wong_on_rank_one_matrix():
    s = MatrixSpace.from_matrices(F101, [[[1, 0], [0, 0]]])
    a = s.basis[0]
    assert wong_limit(s, a).dim == 0
    cert = shrunk_from_wong(s, a)
    assert cert.u == Subspace.span(F101, [[0, 1]], 2) and cert.image.dim == 0 and cert.c == 1


def test_wong_escapes_image_for_non_maximal_element():
    s = MatrixSpace.from_matrices(F101, SKEW3)
    a = s.combine([3, 5, 7])
    assert F101.rank(a) == 2
    assert shrunk_from_wong(s, a) is None


def test_invertible_single_matrix():
    s = MatrixSpace.from_matrices(F101, [[[1, 2], [3, 4]]])
    cert = shrunk_from_wong(s, s.basis[0])
    assert cert.u.dim == 0 and cert.c == 0
    assert ncrk(s).rank == 2


def test_random_element_is_reproducible():
    s = MatrixSpace.from_matrices(F101, SKEW3)
    assert np.array_equal(random_element(s, 4), random_element(s, 4))
    assert F101.rank(random_element(s, 4)) == 2
    single = MatrixSpace.from_matrices(F101, [[[1, 2], [0, 1]]])
    m = random_element(single, 1)
    c = m[0, 0]
    assert np.array_equal(m, F101.scale(c, single.basis[0]))
