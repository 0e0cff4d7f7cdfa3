import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SKEW3, random_three_vertex, random_weight
from ncrank.errors import UnsupportedInstanceError, ValidationError
from ncrank.exactlin import Field, Subspace
from ncrank.matspace import Config
from ncrank.oracle import brute_discrepancy
from ncrank.quiver import Arrow, Quiver, Representation, Subrepresentation, is_subrep, sigma_value
from ncrank.reduction import (
    augmented_representation,
    augmented_witness,
    build_sigma_space,
    optimal_witness,
    saturate_shrunk,
    witness_lattice_ops,
    witness_report_for,
)

F3, F5, F101 = Field.prime(3), Field.prime(5), Field.prime(101)
CFG = Config(max_retries=40)


def test_sigma_space_layout():
    # x -> y -> z with sigma = (2, 0, -1): two copies of W(x), one of W(z), one path
    q = Quiver.linear(3)
    w = Representation(q, F5, {"x0": 2, "x1": 1, "x2": 3}, {"a0": [[1, 1]], "a1": [[1], [0], [2]]})
    s, bs = build_sigma_space(w, {"x0": 2, "x1": 0, "x2": -1})
    assert (s.rows, s.cols) == (3, 4)
    assert len(s.basis) == 2
    assert [(sl.key, sl.copy, sl.offset) for sl in bs.domain] == [("x0", 0, 0), ("x0", 1, 2)]
    assert np.array_equal(s.basis[0][:, :2], F5.matmul(w.maps["a1"], w.maps["a0"]))


def test_kronecker_sigma_space_has_one_generator_per_arrow():
    w = Representation.kronecker(F5, SKEW3)
    s, _ = build_sigma_space(w, {"x": 1, "y": -1})
    assert len(s.basis) == 3


def test_e11_witness():
    w = Representation.kronecker(F101, [[[1, 0], [0, 0]]])
    rep = optimal_witness(w, {"x": 1, "y": -1})
    assert rep.discrepancy == 1 and not rep.semistable
    assert rep.witness.spaces["x"] == Subspace.span(F101, [[0, 1]], 2)
    assert rep.witness.dims == {"x": 1, "y": 0}


@pytest.mark.parametrize("F", [F101, Field.rationals()])
def test_skew3_is_semistable(F):
    w = Representation.kronecker(F, SKEW3)
    for fn in (optimal_witness, augmented_witness):
        rep = fn(w, {"x": 1, "y": -1})
        assert rep.discrepancy == 0 and rep.semistable
        assert rep.witness.dims == {"x": 0, "y": 0}


def test_unbalanced_weight_is_not_semistable():
    w = Representation.kronecker(F101, SKEW3)
    rep = optimal_witness(w, {"x": 1, "y": -2})
    assert rep.discrepancy == 0 and not rep.semistable


def test_degenerate_weights():
    w = Representation.kronecker(F5, [[[1, 2], [0, 1]]])
    pos = optimal_witness(w, {"x": 1, "y": 2})
    assert pos.discrepancy == 6 and pos.witness.dims == {"x": 2, "y": 2}
    neg = optimal_witness(w, {"x": -1, "y": 0})
    assert neg.discrepancy == 0 and neg.witness.dims == {"x": 0, "y": 0}


def test_cyclic_quiver_is_rejected():
    q = Quiver(("x", "y"), (Arrow("a", "x", "y"), Arrow("b", "y", "x")))
    w = Representation(q, F5, {"x": 1, "y": 1}, {})
    with pytest.raises(UnsupportedInstanceError):
        optimal_witness(w, {"x": 1, "y": -1})


def test_weight_must_cover_vertices():
    w = Representation.kronecker(F5, SKEW3)
    with pytest.raises(ValidationError):
        optimal_witness(w, {"x": 1})


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5]))
def test_witness_matches_brute_force(seed, p):
    rng = np.random.default_rng(seed)
    F = Field.prime(p)
    w = random_three_vertex(rng, F)
    sigma = random_weight(rng, w.quiver)
    c, optima = brute_discrepancy(w, sigma)
    cfg = Config(seed=seed, max_retries=40)
    reduced = optimal_witness(w, sigma, cfg)
    augmented = augmented_witness(w, sigma, cfg)
    assert reduced.discrepancy == augmented.discrepancy == c
    assert reduced.witness == augmented.witness
    assert all(reduced.witness <= o for o in optima)
    assert any(reduced.witness == o for o in optima)


def test_augmented_quiver_has_pseudo_inverse_arrows():
    w = Representation.kronecker(F101, [[[1, 0], [0, 0]]])
    _, bs = build_sigma_space(w, {"x": 1, "y": -1})
    B = F101.asarray([[1, 0], [0, 0]])
    wplus = augmented_representation(w, bs, 1, B)
    [extra] = [a for a in wplus.quiver.arrows if a.name not in w.maps]
    assert (extra.tail, extra.head) == ("y", "x")
    assert np.array_equal(wplus.maps[extra.name], B)


def test_lattice_of_witnesses():
    w = Representation.kronecker(F3, [[[1, 0], [0, 0]]])
    sigma = {"x": 1, "y": -1}
    c, optima = brute_discrepancy(w, sigma)
    reports = [witness_report_for(w, sigma, o) for o in optima]
    meet, join = witness_lattice_ops(reports[0], reports[1])
    assert meet.dims == {"x": 1, "y": 0} and join.dims == {"x": 2, "y": 1}
    assert meet == optimal_witness(w, sigma, CFG).witness


def test_lattice_rejects_mismatched_reports():
    w = Representation.kronecker(F3, [[[1, 0], [0, 0]]])
    a = optimal_witness(w, {"x": 1, "y": -1}, CFG)
    b = optimal_witness(w, {"x": 2, "y": -1}, CFG)
    with pytest.raises(ValidationError):
        witness_lattice_ops(a, b)


def test_witness_report_for_checks_certificate():
    w = Representation.kronecker(F5, SKEW3)
    sigma = {"x": 1, "y": -1}
    full = {x: Subspace.full(F5, 3) for x in ("x", "y")}
    rep = witness_report_for(w, sigma, Subrepresentation(w, full))
    assert rep.discrepancy == 0 and rep.certificate.c == 0
    assert is_subrep(w, rep.witness.spaces)
    assert sigma_value(sigma, rep.witness.dims) == 0


def test_sigma_space_without_paths_is_zero():
    w = Representation(Quiver(("x", "y"), ()), F5, {"x": 2, "y": 2}, {})
    s, _ = build_sigma_space(w, {"x": 1, "y": -1})
    assert s.basis == ()
    assert optimal_witness(w, {"x": 1, "y": -1}).discrepancy == 2


def test_sigma_space_of_a_path():
    q = Quiver(("x", "y", "z"), (Arrow("a", "x", "y"), Arrow("b", "y", "z")))
    w = Representation(q, F5, {"x": 2, "y": 2, "z": 1}, {"a": [[1, 2], [3, 4]], "b": [[1, 1]]})
    s, _ = build_sigma_space(w, {"x": 1, "y": 0, "z": -1})
    [m] = s.basis
    assert np.array_equal(m, F5.matmul(w.maps["b"], w.maps["a"]))


def test_saturate_shrunk_examples():
    w = Representation.kronecker(F5, [[[1, 0], [0, 0]]])
    _, bs = build_sigma_space(w, {"x": 2, "y": -1})
    assert saturate_shrunk(Subspace.zero(F5, 4), bs)["x"].dim == 0
    assert saturate_shrunk(Subspace.full(F5, 4), bs)["x"] == Subspace.full(F5, 2)
    u = Subspace.span(F5, [[0, 1, 0, 0], [0, 0, 0, 1]], 4)
    assert saturate_shrunk(u, bs)["x"] == Subspace.span(F5, [[0, 1]], 2)


def test_sink_supported_witness():
    n = 3
    w = Representation.kronecker(F101, [np.eye(n, dtype=np.int64)])
    for fn in (optimal_witness, augmented_witness):
        rep = fn(w, {"x": -1, "y": 1})
        assert rep.discrepancy == n and not rep.semistable
        assert rep.witness.dims == {"x": 0, "y": n}


def test_augmented_trivial_cases():
    inv = Representation.kronecker(F101, [[[1, 2], [3, 4]]])
    rep = augmented_witness(inv, {"x": 1, "y": -1})
    assert rep.discrepancy == 0 and rep.witness.dims == {"x": 0, "y": 0}
    zero = Representation.kronecker(F101, [[[0, 0], [0, 0]]])
    rep = augmented_witness(zero, {"x": 1, "y": -1})
    assert rep.discrepancy == 2 and rep.witness.dims == {"x": 2, "y": 0}


def test_lattice_trivial_cases():
    w = Representation.kronecker(F3, [[[1, 0], [0, 0]]])
    sigma = {"x": 1, "y": -1}
    rep = optimal_witness(w, sigma, CFG)
    meet, join = witness_lattice_ops(rep, rep)
    assert meet == join == rep.witness
    _, optima = brute_discrepancy(w, sigma)
    biggest = max(optima, key=lambda o: sum(o.dims.values()))
    meet, join = witness_lattice_ops(rep, witness_report_for(w, sigma, biggest))
    assert meet == rep.witness and join == biggest


def test_lattice_on_two_copies_of_rank_one():
    # W = E11 (+) E11 on the one-arrow quiver: four-dimensional, many optima
    m = np.zeros((4, 4), dtype=np.int64)
    m[0, 0] = m[2, 2] = 1
    w = Representation.kronecker(F3, [m])
    sigma = {"x": 1, "y": -1}
    c, optima = brute_discrepancy(w, sigma)
    assert c == 2 and len(optima) > 2
    reports = [witness_report_for(w, sigma, o) for o in optima]
    for a in reports:
        for b in reports:
            for sub in witness_lattice_ops(a, b):
                assert sigma_value(sigma, sub.dims) == c and is_subrep(w, sub.spaces)
    assert optimal_witness(w, sigma, CFG).witness.dims == {"x": 2, "y": 0}
