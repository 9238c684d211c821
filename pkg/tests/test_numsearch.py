import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waringlab.decomp import pair_report
from waringlab.families import gen_case_I, gen_case_II, gen_case_III, gen_pentahedral_nonunique, gen_two_lines
from waringlab.forms import Form, combine
from waringlab.numsearch import (
    OMEGA,
    CubicModel,
    NumDecomp,
    balance,
    canonical,
    decompose_numeric,
    exact_to_numeric,
    form_target,
    match_distance,
    numeric_pair_report,
    numeric_structure,
    numerical_kruskal,
    symmetric_tensor,
    tensor_coefficients,
)


def central_difference(model, target, x, h=1e-6):
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((model.residual(target, x + e) - model.residual(target, x - e)) / (2 * h))
    return np.stack(cols, axis=1)


@settings(max_examples=30)
@given(st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_gradient_check(n, r, seed):
    model = CubicModel(n, r)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(2 * r * (n + 1))
    target = rng.standard_normal(len(model.triples)) + 0j
    fd = central_difference(model, target, x)
    an = model.jacobian(x)
    assert np.linalg.norm(an - fd) / max(np.linalg.norm(fd), 1e-300) < 1e-6


def test_cubes_match_exact_expansion():
    # (1, 2, -1)^3 expanded exactly by forms.combine
    model = CubicModel(2, 1)
    got = model.cubes(np.array([[1, 2, -1]], dtype=complex))[0]
    want = [float(c) for c in combine([(1, 2, -1)], [1], 3, n=2).vector()]
    assert np.allclose(got, want)


def test_pack_unpack_round_trip():
    model = CubicModel(3, 2)
    vs = np.arange(8).reshape(2, 4) + 1j * np.arange(8, 16).reshape(2, 4)
    assert np.array_equal(model.unpack(model.pack(vs)), vs)


# canonical form and matching -------------------------------------------------------------


def random_vectors(seed, r=4, size=4):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((r, size)) + 1j * rng.standard_normal((r, size))


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_canonical_is_a_congruence(seed, perm, powers):
    vs = random_vectors(seed)
    moved = np.array([OMEGA ** k * vs[i] for i, k in zip(perm, powers)])
    a, b = canonical(vs), canonical(moved)
    assert match_distance(a, b) < 1e-12
    assert np.allclose(a.array(), b.array(), atol=1e-12)


def test_canonical_phase_window():
    nd = canonical(random_vectors(3))
    for v in nd.array():
        lead = v[np.abs(v) > 0][0]
        angle = np.angle(lead) % (2 * math.pi)
        assert -1e-9 <= angle < 2 * math.pi / 3 + 1e-9


def test_match_distance_separates_different_sets():
    a, b = canonical(random_vectors(1)), canonical(random_vectors(2))
    assert match_distance(a, b) > 1e-3
    assert match_distance(a, canonical(random_vectors(1, r=3))) == math.inf


def test_exact_witness_residual_is_tiny():
    for w in (gen_case_I(3, 0), gen_two_lines(1), gen_case_III(4, 2)):
        model = CubicModel(w.n, len(w.decomps[0]))
        nd = exact_to_numeric(w.decomps[0].pts, w.decomps[0].coeffs)
        res = model.complex_residual(form_target(w.form), model.pack(nd.array()))
        # relative to the coefficient scale of the form
        scale = np.linalg.norm(form_target(w.form)) ** 2
        assert float(np.vdot(res, res).real) < 1e-20 * max(scale, 1)


def test_exact_witness_residual_fermat_absolute():
    model = CubicModel(3, 4)
    nd = exact_to_numeric([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)], [1, 1, 1, 1])
    res = model.complex_residual(form_target(Form.fermat(3)), model.pack(nd.array()))
    assert float(np.vdot(res, res).real) < 1e-20


# balancing -----------------------------------------------------------------------------------


def test_symmetric_tensor_round_trip():
    w = gen_case_I(3, 1)
    t = symmetric_tensor(w.form)
    assert np.allclose(t, t.transpose(1, 0, 2)) and np.allclose(t, t.transpose(0, 2, 1))
    assert np.allclose(tensor_coefficients(t), form_target(w.form))


def test_balance_flattening_is_isotropic():
    t = symmetric_tensor(gen_case_I(3, 2).form)
    tb, h = balance(t)
    flat = tb.reshape(4, -1)
    gram = flat @ flat.T
    assert np.allclose(gram / np.trace(gram) * 4, np.eye(4), atol=1e-8)
    moved = np.einsum("ijk,ia,jb,kc->abc", t, h, h, h)
    assert np.allclose(moved / np.linalg.norm(moved), tb)


def test_balance_leaves_non_concise_tensor():
    t = symmetric_tensor(Form(2, 3, {(3, 0, 0): 1, (0, 3, 0): 1}))
    tb, h = balance(t)
    assert np.allclose(h, np.eye(3))


# search --------------------------------------------------------------------------------------


def test_fermat_search():
    res = decompose_numeric(Form.fermat(3), 4, restarts=50, seed=0)
    oracle = exact_to_numeric([tuple(int(i == j) for j in range(4)) for i in range(4)], [1] * 4)
    assert res.converged >= 0.6 * 50
    assert len(res.classes) == 1
    assert match_distance(res.classes[0], oracle) < 1e-6


def test_case_I_search_matches_exact_witness():
    w = gen_case_I(3, 3)
    res = decompose_numeric(w.form, 5, restarts=30, seed=3)
    assert res.converged >= 18
    assert len(res.classes) == 1
    assert match_distance(res.classes[0], exact_to_numeric(w.decomps[0].pts, w.decomps[0].coeffs)) < 1e-6
    assert all(c.residual < 1e-12 for c in res.classes)


def test_case_III_search_finds_several_classes():
    w = gen_case_III(4, 0)
    res = decompose_numeric(w.form, 6, restarts=20, seed=0)
    assert len(res.classes) >= 2


def test_search_determinism_and_errors():
    f = gen_pentahedral_nonunique(1).form
    a = decompose_numeric(f, 5, restarts=5, seed=9)
    b = decompose_numeric(f, 5, restarts=5, seed=9)
    assert a.to_dict() == b.to_dict()
    with pytest.raises(ValueError):
        decompose_numeric(f, 0)
    with pytest.raises(ValueError):
        decompose_numeric(Form(1, 2, {(2, 0): 1}), 1)
    empty = decompose_numeric(Form(2, 3, {}), 2, restarts=3)
    assert empty.classes == [] and empty.converged == 0


def test_restart_results_are_schedule_independent():
    # the first k restarts of a longer run agree with a k-restart run
    f = gen_case_I(3, 4).form
    short = decompose_numeric(f, 5, restarts=4, seed=2)
    long = decompose_numeric(f, 5, restarts=8, seed=2)
    assert long.residuals[:4] == short.residuals


# structure reports ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 3, 5])
def test_identity_basis_kruskal(n):
    nd = canonical(np.eye(n + 1))
    assert numeric_structure(nd)["kruskal"] == n + 1


def test_three_collinear_points():
    nd = NumDecomp(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, 0.0)), 0.0)
    rep = numeric_structure(nd, tol=1e-8)
    assert rep["collinear"] and rep["kruskal"] == 2
    assert numerical_kruskal(np.array([[1, 0, 0], [2, 0, 0]]), 1e-8) == 1


@pytest.mark.parametrize("make", [lambda: gen_case_II(5, 1), lambda: gen_case_III(4, 2), lambda: gen_two_lines(0)])
def test_numeric_flags_agree_with_exact_report(make):
    w = make()
    a, b = w.decomps
    exact = pair_report(a.pts, b.pts)
    na = exact_to_numeric(a.pts, a.coeffs)
    nb = exact_to_numeric(b.pts, b.coeffs)
    num = numeric_pair_report(na, nb)
    assert num["intersection"] == exact.intersection
    assert num["collinear"] == exact.diff_collinear
    assert num["two_lines"] == exact.diff_two_lines
    assert num["two_planes"] == exact.diff_two_planes
    assert numeric_structure(na)["kruskal"] == exact.kruskal_a
