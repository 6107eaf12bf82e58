import math

import numpy as np
import pytest

from affine_torus.affine import AffineMap2, rotation_ccw, rotation_k
from affine_torus.algebra import (
    A,
    B,
    C1,
    C2,
    D,
    STRATA,
    T,
    AlgebraProduct,
    act,
    model_product,
)
from affine_torus.errors import InvalidParams, NonCommuting, NotInCone
from affine_torus.etale import (
    BASE_POINTS,
    NORMALIZER_REFLECTIONS,
    HolonomyPair,
    develop,
    develop_jacobian,
    domain_contains,
    holonomy_of,
    in_model_group,
    model_group_element,
    normalizer_check,
    rho,
    to_model_frame,
)

from conftest import random_invertible

BAD = AlgebraProduct([1.0, 0.0], [0.0, 0.0], [1.0, 0.0])


def random_cone_point(rng, stratum=None):
    stratum = stratum or STRATA[rng.integers(len(STRATA))]
    return stratum, act(random_invertible(rng, max_cond=20), model_product(stratum))


def test_rho_trivial_and_d_type():
    v = np.array([0.3, -1.2])
    g = rho(AlgebraProduct.zero(), v)
    assert np.array_equal(g.linear, np.eye(2)) and np.allclose(g.translation, v)
    u, w = 0.7, -1.3
    g = rho(model_product(D), [u, w])
    assert np.allclose(g.as_matrix(), [[1, w, u + 0.5 * w * w], [0, 1, w], [0, 0, 1]], atol=1e-14)
    assert g.allclose(model_group_element(D, (u, w)), atol=1e-14)
    with pytest.raises(NotInCone):
        rho(BAD, v)
    with pytest.raises(NotInCone):
        develop(BAD, v)


def test_rho_is_a_homomorphism(rng):
    for _ in range(1000):
        _, S = random_cone_point(rng)
        u, v = rng.uniform(-1, 1, size=(2, 2))
        lhs = rho(S, u) @ rho(S, v)
        rhs = rho(S, u + v)
        assert lhs.distance(rhs) <= 1e-9 * max(1.0, np.abs(rhs.as_matrix()).max())


def test_develop_equivariance(rng):
    for _ in range(1000):
        _, S = random_cone_point(rng)
        u, v = rng.uniform(-1, 1, size=(2, 2))
        got = develop(S, u + v)
        want = rho(S, u)(develop(S, v))
        assert np.linalg.norm(got - want) <= 1e-9 * max(1.0, np.linalg.norm(want))


def test_develop_examples(rng):
    for stratum in STRATA:
        assert np.array_equal(develop(model_product(stratum), [0.0, 0.0]), [0.0, 0.0])
    pts = rng.normal(size=(20, 2))
    assert np.allclose(develop(AlgebraProduct.zero(), pts), pts)


def test_develop_a_type_is_polar_coordinates(rng):
    S = model_product(A)
    for _ in range(200):
        t, th = rng.uniform(-2, 2), rng.uniform(-4, 4)
        got = develop(S, [t, th]) + BASE_POINTS[A]
        assert np.allclose(got, math.exp(t) * np.array([math.cos(th), math.sin(th)]), atol=1e-12)


def test_jacobian_at_origin_is_identity(rng):
    for stratum in STRATA:
        assert np.abs(develop_jacobian(model_product(stratum), [0.0, 0.0]) - np.eye(2)).max() < 1e-9
    for _ in range(50):
        _, S = random_cone_point(rng)
        assert np.abs(develop_jacobian(S, [0.0, 0.0]) - np.eye(2)).max() < 1e-9


def test_jacobian_positive_near_origin():
    grid = [(x, y) for x in np.linspace(-1, 1, 11) for y in np.linspace(-1, 1, 11)
            if x * x + y * y <= 1]
    for stratum in STRATA:
        S = model_product(stratum)
        assert min(np.linalg.det(develop_jacobian(S, v)) for v in grid) > 0


def test_holonomy_examples():
    h = holonomy_of(AlgebraProduct.zero())
    assert h.h1.allclose(AffineMap2.translate([1, 0]), atol=0)
    assert h.h2.allclose(AffineMap2.translate([0, 1]), atol=0)
    h = holonomy_of(model_product(B))
    e = math.e
    assert np.allclose(h.h1.linear, np.diag([e, 1.0]), atol=1e-14)
    assert np.allclose(h.h2.linear, np.diag([1.0, e]), atol=1e-14)
    for stratum in STRATA:
        h = holonomy_of(model_product(stratum))
        assert h.validate() is h


def test_holonomy_pair_validation():
    r = AffineMap2.linear_map(rotation_k(0.5))
    with pytest.raises(NonCommuting):
        HolonomyPair(AffineMap2.translate([1, 0]), r).validate()
    flip = AffineMap2.linear_map(np.diag([1.0, -1.0]))
    with pytest.raises(InvalidParams):
        HolonomyPair(flip, flip).validate()
    h = holonomy_of(model_product(A))
    assert HolonomyPair.from_json(h.to_json()).h1.allclose(h.h1, atol=0)


def test_holonomy_lies_in_model_group_up_to_conjugacy(rng):
    for stratum in STRATA:
        for _ in range(100):
            g = random_invertible(rng, max_cond=20, positive=False)
            Sg = act(g, model_product(stratum))
            G = AffineMap2.linear_map(g)
            for h in (holonomy_of(Sg).h1, holonomy_of(Sg).h2):
                back = to_model_frame(stratum, G.inverse() @ h @ G)
                assert in_model_group(stratum, back)


def test_model_group_elements():
    g = model_group_element(T, (2.0, -3.0))
    assert g.allclose(AffineMap2.translate([2, -3]), atol=0)
    g = model_group_element(A, (0.5, 1.1))
    assert np.allclose(g.linear, math.exp(0.5) * rotation_k(1.1)) and not g.translation.any()
    assert np.allclose(model_group_element(C1, (0.2, 3.0)).linear,
                       [[math.exp(0.2), 3.0], [0.0, math.exp(0.2)]])
    g = model_group_element(C2, (0.2, 3.0))
    assert np.allclose(g.linear, np.diag([1.0, math.exp(0.2)])) and np.allclose(g.translation, [3, 0])
    assert np.allclose(model_group_element(B, (2.0, 3.0)).linear, np.diag([2.0, 3.0]))
    for stratum in STRATA:
        assert in_model_group(stratum, model_group_element(stratum, (0.4, 0.7)))
    for bad in [("X", (0, 0)), (B, (-1.0, 1.0)), (T, (1.0,)), (T, (math.inf, 0.0)), (A, "ab")]:
        with pytest.raises(InvalidParams):
            model_group_element(*bad)


def test_model_values_in_model_frame(rng):
    # rho of the normal form, moved to the base point, is in the standard group
    for stratum in STRATA:
        S = model_product(stratum)
        for _ in range(100):
            v = rng.uniform(-2, 2, size=2)
            assert in_model_group(stratum, to_model_frame(stratum, rho(S, v)))


def test_model_groups_are_not_confused():
    # each standard group contains a sample that the others reject
    samples = {s: model_group_element(s, (0.4, 0.7)) for s in STRATA}
    for s, g in samples.items():
        others = [t for t in STRATA if t != s and in_model_group(t, g)]
        assert others == [], (s, others)


def test_normalizer_examples():
    swap = AffineMap2.linear_map([[0.0, 1.0], [1.0, 0.0]])
    assert normalizer_check(B, swap)
    assert normalizer_check(A, swap)
    assert not normalizer_check(C1, swap)
    assert normalizer_check(T, AffineMap2([[2.0, 1.0], [0.3, 1.0]], [5.0, 1.0]))
    assert normalizer_check(D, AffineMap2([[4.0, 7.0], [0.0, 2.0]], [1.0, 1.0]))
    assert not normalizer_check(D, AffineMap2.linear_map(np.diag([2.0, 2.0])))
    assert normalizer_check(A, AffineMap2.linear_map(3 * rotation_ccw(0.4)))
    assert not normalizer_check(A, AffineMap2.translate([1.0, 0.0]))
    with pytest.raises(InvalidParams):
        normalizer_check("X", swap)


def test_normalizers_conjugate_groups_into_themselves(rng):
    normalizers = {
        T: lambda: AffineMap2(random_invertible(rng), rng.normal(size=2)),
        D: lambda: AffineMap2([[(s := rng.uniform(0.5, 2)) ** 2, rng.normal()], [0.0, s]],
                              rng.normal(size=2)),
        C1: lambda: AffineMap2.linear_map([[rng.uniform(0.5, 2), rng.normal()],
                                           [0.0, rng.uniform(0.5, 2)]]),
        C2: lambda: AffineMap2(np.diag(rng.uniform(0.5, 2, size=2)), [rng.normal(), 0.0]),
        B: lambda: AffineMap2.linear_map(np.diag(rng.uniform(0.5, 2, size=2))),
        A: lambda: AffineMap2.linear_map(rng.uniform(0.5, 2) * rotation_k(rng.uniform(-3, 3))),
    }
    for stratum, draw in normalizers.items():
        gens = [draw() for _ in range(20)]
        gens += [AffineMap2.linear_map(r) for r in NORMALIZER_REFLECTIONS.get(stratum, [])]
        for n in gens:
            assert normalizer_check(stratum, n)
            for _ in range(5):
                g = model_group_element(stratum, rng.uniform(0.2, 1.5, size=2))
                assert in_model_group(stratum, n @ g @ n.inverse())


def test_development_images_lie_in_domains():
    ring = [(x, y) for x in np.linspace(-3, 3, 25) for y in np.linspace(-3, 3, 25)]
    for stratum in (C1, C2, B, A):
        img = develop(model_product(stratum), ring) + BASE_POINTS[stratum]
        assert domain_contains(stratum, img).all()
    # the base point of each proper domain sits at distance one from its boundary
    assert not domain_contains(B, [[0.0, 1.0]])[0] and not domain_contains(A, [[0.0, 0.0]])[0]


def test_complete_strata_develop_injectively():
    xs = np.linspace(-10, 10, 41)
    grid = np.array([(x, y) for x in xs for y in xs])
    for stratum in (T, D):
        img = develop(model_product(stratum), grid)
        diffs = img[:, None, :] - img[None, :, :]
        dist = np.hypot(diffs[..., 0], diffs[..., 1])
        np.fill_diagonal(dist, np.inf)
        assert dist.min() > 1e-3
