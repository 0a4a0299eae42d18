import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from matchedpair.groups import (NotInGroup, alg_to_ttg, chi_coboundary, chi_cocycle,
                                curve_jet, dcp_inv, dcp_mul, factorize_su2k,
                                g_t2g_factorization_residual, g_t2g_mutual_actions,
                                jet_curve, jet_distance, jet_from_json, jet_to_json, k_group,
                                matched_group_residuals, phi_coboundary, phi_cocycle,
                                phi_ttg, phi_ttg_coboundary, sl2c_group, su2_exp_closed,
                                su2_group, t2_actions_by_curves, t2_actions_by_split,
                                t2_assemble, t2_matched_actions, t2_split, t2g_inv, t2g_mul,
                                tg_inv, tg_mul, ttg21_mul, ttg_12_to_21, ttg_21_to_12,
                                ttg_from_g_and_t2g, ttg_inv, ttg_mul, ttg_realization_map,
                                ttg_split, tteg_mul)
from matchedpair.instances import abelian_group, heisenberg_group, su2k

vec3 = arrays(np.float64, 3, elements=st.floats(-2, 2))
seeds = st.integers(0, 2 ** 32 - 1)
G = su2_group()
H = k_group()
Z = np.zeros(3)


def rand_jet(group, rng, slots=2):
    return (group.random(rng),) + tuple(rng.uniform(-1, 1, group.dim) for _ in range(slots))


@given(vec3)
def test_su2_exp_matches_expm(x):
    assert np.allclose(su2_exp_closed(x), expm(G.hat(x)), atol=1e-13)
    assert G.is_member(su2_exp_closed(x))


@given(vec3)
def test_hat_vee_round_trip(x):
    for grp in (G, H):
        assert np.allclose(grp.vee(grp.hat(x)), x, atol=1e-14)


def test_group_algebras_match_closed_forms():
    from matchedpair.instances import cross_algebra, rk_algebra
    assert np.allclose(G.algebra.c, cross_algebra().c, atol=1e-14)
    assert np.allclose(H.algebra.c, rk_algebra().c, atol=1e-14)


@given(seeds)
def test_su2_adjoint_is_rotation(seed):
    g = G.random(np.random.default_rng(seed))
    A = G.Ad(g)
    assert np.allclose(A @ A.T, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(A) - 1.0) < 1e-12


@given(seeds)
def test_factorization_properties(seed):
    rng = np.random.default_rng(seed)
    m = sl2c_group().exp(rng.uniform(-1, 1, 6))
    u, t = factorize_su2k(m)
    assert np.max(np.abs(u @ t - m)) < 1e-12
    assert G.membership_defect(u) < 1e-12 and H.membership_defect(t) < 1e-12
    # Gram-Schmidt on the columns of m gives u
    c0 = m[:, 0] / np.linalg.norm(m[:, 0])
    c1 = m[:, 1] - (c0.conj() @ m[:, 1]) * c0
    c1 /= np.linalg.norm(c1)
    assert np.allclose(u, np.column_stack([c0, c1]), atol=1e-12)


def test_factorization_trivial_cases(rng):
    u = G.random(rng)
    a, b = factorize_su2k(u)
    assert np.allclose(a, u) and np.allclose(b, np.eye(2))
    t = H.random(rng)
    a, b = factorize_su2k(t)
    assert np.allclose(a, np.eye(2)) and np.allclose(b, t)


@pytest.mark.parametrize("m", [np.zeros((2, 2)), 2 * np.eye(2), np.full((2, 2), np.nan),
                               np.eye(3)])
def test_factorization_rejects(m):
    with pytest.raises(NotInGroup):
        factorize_su2k(m)


def test_double_cross_product(rng):
    pair = su2k().pair
    g1, g2, h1, h2 = G.random(rng), G.random(rng), H.random(rng), H.random(rng)
    e = np.eye(2)
    assert jet_distance(dcp_mul(pair, (g1, e), (g2, e)), (g1 @ g2, e)) < 1e-12
    assert jet_distance(dcp_mul(pair, (e, h1), (g2, e)), pair.actions(h1, g2)) < 1e-14
    x, y = dcp_mul(pair, (g1, h1), (g2, h2))
    assert np.max(np.abs(x @ y - g1 @ h1 @ g2 @ h2)) < 1e-12
    gi, hi = dcp_inv(pair, (g1, h1))
    assert jet_distance(dcp_mul(pair, (g1, h1), (gi, hi)), (e, e)) < 1e-12
    r = matched_group_residuals(pair, g1, g2, h1, h2)
    assert max(r.values()) < 1e-12


def test_tangent_group_law(rng):
    a, b, c = (rand_jet(G, rng, 1) for _ in range(3))
    e = (np.eye(2), Z)
    assert jet_distance(tg_mul(G, e, a), a) < 1e-15
    assert jet_distance(tg_mul(G, tg_mul(G, a, b), c), tg_mul(G, a, tg_mul(G, b, c))) < 1e-12
    assert jet_distance(tg_mul(G, a, tg_inv(G, a)), e) < 1e-12
    R = abelian_group(3)
    p, q = rand_jet(R, rng, 1), rand_jet(R, rng, 1)
    s = tg_mul(R, p, q)
    assert np.allclose(s[1], p[1] + q[1])


def test_t2g_law_against_curve_composition(rng):
    for _ in range(5):
        a, b = rand_jet(G, rng), rand_jet(G, rng)
        pa, pb = jet_curve(G, a), jet_curve(G, b)
        oracle = curve_jet(G, lambda t: pa(t) @ pb(t))
        assert jet_distance(t2g_mul(G, a, b), oracle) < 1e-6
    e = (np.eye(2), Z, Z)
    assert jet_distance(t2g_mul(G, e, a), a) < 1e-15
    assert jet_distance(t2g_mul(G, a, t2g_inv(G, a)), e) < 1e-12
    assert jet_distance(t2g_mul(G, t2g_inv(G, a), a), e) < 1e-12


def test_t2g_abelian_is_componentwise(rng):
    R = abelian_group(2)
    a, b = rand_jet(R, rng), rand_jet(R, rng)
    c = t2g_mul(R, a, b)
    assert np.allclose(c[1], a[1] + b[1]) and np.allclose(c[2], a[2] + b[2])


@given(seeds)
def test_cocycle_conditions(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_jet(G, rng, 1) for _ in range(3))
    assert np.max(np.abs(phi_coboundary(G, a, b, c))) < 1e-12
    a, b, c = (rand_jet(G, rng, 2) for _ in range(3))
    assert np.max(np.abs(phi_ttg_coboundary(G, a, b, c))) < 1e-12
    a, b, c = ((rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)) for _ in range(3))
    assert np.max(np.abs(chi_coboundary(G, a, b, c))) < 1e-12


def test_cocycle_trivial_cases(rng):
    a = rand_jet(G, rng, 1)
    assert np.array_equal(phi_cocycle(G, a, (G.random(rng), Z)), Z)
    assert np.array_equal(chi_cocycle(G, (Z, np.ones(3)), (Z, np.ones(3))), Z)
    R = abelian_group(3)
    p, q = rand_jet(R, rng, 2), rand_jet(R, rng, 2)
    assert not np.any(phi_ttg(R, p, q))


def test_t2g_is_tg_extended_by_phi(rng):
    # the acceleration slot of the T^2G law is the TG law on (g, xid) plus phi
    a, b = rand_jet(G, rng), rand_jet(G, rng)
    prod = t2g_mul(G, a, b)
    base = tg_mul(G, (a[0], a[2]), (b[0], b[2]))
    assert np.allclose(prod[2], base[1] + phi_cocycle(G, (a[0], a[1]), (b[0], b[1])))


def test_tteg_law():
    x = (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), Z)
    y = (np.array([0, 0, 1.0]), Z, Z)
    assert np.allclose(tteg_mul(G, x, y)[2], np.cross(x[1], y[0]))


def test_ttg_group_axioms(rng):
    a, b, c = (rand_jet(G, rng, 3) for _ in range(3))
    e = (np.eye(2), Z, Z, Z)
    assert jet_distance(ttg_mul(G, e, a), a) < 1e-15
    assert jet_distance(ttg_mul(G, ttg_mul(G, a, b), c), ttg_mul(G, a, ttg_mul(G, b, c))) < 1e-12
    assert jet_distance(ttg_mul(G, a, ttg_inv(G, a)), e) < 1e-12
    assert jet_distance(ttg_mul(G, ttg_inv(G, a), a), e) < 1e-12


def test_ttg_law_against_curves_in_tangent_bundle(rng):
    # an element of TTG is the velocity at s = 0 of a curve s -> (g(s), x(s)) in TG
    def curve(a):
        g, x1, x2, x3 = a
        return lambda s: (g @ expm(s * G.hat(x1)), x2 + s * x3)

    def jet(c, h=1e-4):
        g0, x0 = c(0.0)
        gp, xp = c(h)
        gm, xm = c(-h)
        return (g0, G.vee(np.linalg.inv(g0) @ (gp - gm) / (2 * h)), x0, (xp - xm) / (2 * h))

    for _ in range(5):
        a, b = rand_jet(G, rng, 3), rand_jet(G, rng, 3)
        ca, cb = curve(a), curve(b)
        prod = jet(lambda s: tg_mul(G, ca(s), cb(s)))
        assert jet_distance(ttg_mul(G, a, b), prod) < 1e-7


def test_realization_maps(rng):
    a, b = rand_jet(G, rng, 3), rand_jet(G, rng, 3)
    swap = ttg_12_to_21(G, (a[0], Z, a[2], a[3]))
    assert np.array_equal(swap[1], a[2]) and np.array_equal(swap[2], Z)
    assert jet_distance(ttg_21_to_12(G, ttg_12_to_21(G, a)), a) < 1e-14
    lhs = ttg_12_to_21(G, ttg_mul(G, a, b))
    rhs = ttg21_mul(G, ttg_12_to_21(G, a), ttg_12_to_21(G, b))
    assert jet_distance(lhs, rhs) < 1e-12
    assert jet_distance(ttg_realization_map(G, a), ttg_12_to_21(G, a)) == 0.0
    with pytest.raises(ValueError):
        ttg_realization_map(G, a, "sideways")


def test_g_t2g_decomposition(rng):
    a = rand_jet(G, rng)
    xt = rng.uniform(-1, 1, 3)
    assert jet_distance(ttg_from_g_and_t2g(G, Z, a), (a[0], a[1], a[1], a[2])) < 1e-15
    assert jet_distance(ttg_from_g_and_t2g(G, xt, (np.eye(2), Z, Z)), alg_to_ttg(G, xt)) < 1e-15
    back_xt, back_a = ttg_split(G, ttg_from_g_and_t2g(G, xt, a))
    assert np.max(np.abs(back_xt - xt)) < 1e-14 and jet_distance(back_a, a) < 1e-14
    left, right = g_t2g_mutual_actions(G, a, Z)
    assert np.array_equal(left, Z) and jet_distance(right, a) == 0.0
    left, _ = g_t2g_mutual_actions(G, (np.eye(2), a[1], a[2]), xt)
    assert np.allclose(left, xt)
    assert g_t2g_factorization_residual(G, a, xt) < 1e-12
    assert g_t2g_factorization_residual(G, a, xt, literal=True) > 1e-3
    with pytest.raises(ValueError):
        ttg_split(G, (a[0], np.full(3, np.nan), Z, Z))


def test_heisenberg_group_algebra():
    Hg = heisenberg_group()
    assert np.allclose(Hg.bracket(np.eye(3)[0], np.eye(3)[1]), np.eye(3)[2])


def test_t2_assemble_split_round_trip(rng):
    pair = su2k().pair
    for _ in range(5):
        a, b = rand_jet(G, rng), rand_jet(H, rng)
        gh, vel, acc = t2_assemble(pair, a, b)
        a2, b2 = t2_split(pair, gh, vel, acc)
        assert jet_distance(a2, a) < 1e-7 and jet_distance(b2, b) < 1e-7


def test_t2_assemble_matches_ambient_product(rng):
    pair = su2k().pair
    A = pair.ambient
    a, b = rand_jet(G, rng), rand_jet(H, rng)
    gh, vel, acc = t2_assemble(pair, a, b)
    m, v, vd = t2g_mul(A, (a[0], np.concatenate([a[1], Z]), np.concatenate([a[2], Z])),
                       (b[0], np.concatenate([Z, b[1]]), np.concatenate([Z, b[2]])))
    assert np.max(np.abs(gh[0] @ gh[1] - m)) < 1e-12
    assert np.allclose(np.concatenate(vel), v, atol=1e-7)
    assert np.allclose(np.concatenate(acc), vd, atol=1e-7)


def test_t2_actions_trivial_cases(rng):
    pair = su2k().pair
    a, b = rand_jet(G, rng), rand_jet(H, rng)
    e = (np.eye(2), Z, Z)
    left, right = t2_matched_actions(pair, e, a)
    assert jet_distance(left, a) < 1e-8 and jet_distance(right, e) < 1e-8
    left, right = t2_matched_actions(pair, b, e)
    assert jet_distance(left, e) < 1e-8 and jet_distance(right, b) < 1e-8


def test_t2_actions_three_routes_agree(rng):
    pair = su2k().pair
    for _ in range(10):
        a, b = rand_jet(G, rng), rand_jet(H, rng)
        closed = t2_matched_actions(pair, b, a)
        split = t2_actions_by_split(pair, b, a)
        curves = t2_actions_by_curves(pair, b, a)
        for k in range(2):
            assert jet_distance(closed[k], curves[k]) < 1e-6
            assert jet_distance(split[k], curves[k]) < 1e-6


def test_jet_json_round_trip(rng):
    a = rand_jet(G, rng)
    back = jet_from_json(jet_to_json(a))
    assert jet_distance(a, back) == 0.0
    with pytest.raises(ValueError):
        jet_from_json({"g": [[1]], "nope": [0]})
