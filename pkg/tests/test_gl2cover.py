import math

import numpy as np
import pytest
from hypothesis import given

from affine_torus.affine import rotation_ccw, rotation_k
from affine_torus.errors import BranchAmbiguity, NonPositiveDeterminant, NotTriangularizable
from affine_torus.gl2cover import (
    EXPANDING_SPIRAL,
    EXPANSION,
    EXPANSION_TIMES_R_PI,
    GLPLUS,
    GLTILDE,
    IDENTITY,
    NOT_EXPANDING,
    PGL,
    TAU,
    GLTildeElement,
    conj,
    conjugate_in,
    expansion_class,
    has_nonzero_rotation,
    inv,
    iwasawa,
    level,
    lift,
    mul,
    power,
    tau_power,
    triangularizer,
    unipotent_class,
)
from affine_torus.gl2cover import _nearest_branch
from affine_torus.theta_suite import path_lift_theta, random_lift

from conftest import positive_det_matrices, random_invertible


def gram_schmidt(m):
    """Orthonormalise the columns of m; returns (q, r) with m = q r."""
    a, b = m[:, 0], m[:, 1]
    q1 = a / np.linalg.norm(a)
    b2 = b - (q1 @ b) * q1
    q2 = b2 / np.linalg.norm(b2)
    q = np.column_stack([q1, q2])
    return q, q.T @ m


def test_iwasawa_examples():
    f = iwasawa(np.eye(2))
    assert (f.theta0, f.a1, f.a2, f.n12) == (0.0, 1.0, 1.0, 0.0)
    f = iwasawa([[0.0, 1.0], [-1.0, 0.0]])
    assert abs(f.theta0 - math.pi / 2) < 1e-15 and abs(f.n12) < 1e-15
    f = iwasawa([[1.0, 1.0], [0.0, 2.0]])
    assert (f.theta0, f.a1, f.a2, f.n12) == (0.0, 1.0, 2.0, 1.0)
    with pytest.raises(NonPositiveDeterminant):
        iwasawa(np.diag([1.0, -1.0]))


@given(positive_det_matrices())
def test_iwasawa_matches_gram_schmidt(m):
    f = iwasawa(m)
    assert np.abs(f.reconstruct() - m).max() <= 1e-12 * max(1.0, np.abs(m).max())
    assert -math.pi < f.theta0 <= math.pi
    q, r = gram_schmidt(m)
    assert np.allclose(q, rotation_k(f.theta0), atol=1e-10)
    assert np.allclose([r[0, 0], r[1, 1], r[0, 1] / r[0, 0]], [f.a1, f.a2, f.n12],
                       atol=1e-9 * max(1.0, np.abs(m).max()))


def test_lift_examples():
    assert lift(np.eye(2), 0).theta == 0.0
    assert abs(lift(np.eye(2), 1).theta - 2 * math.pi) < 1e-15
    assert TAU.theta == math.pi and np.array_equal(TAU.m, -np.eye(2))
    with pytest.raises(ValueError):
        GLTildeElement(np.eye(2), 1.0)


def test_mul_examples():
    q = lift(rotation_k(math.pi / 2), 0)
    sq = mul(q, q)
    assert np.allclose(sq.m, -np.eye(2)) and abs(sq.theta - math.pi) < 1e-12
    t2 = tau_power(2)
    assert abs(mul(t2, t2).theta - 4 * math.pi) < 1e-12
    assert abs(tau_power(-3).theta + 3 * math.pi) < 1e-15


def test_branch_ambiguity_on_boundary():
    # a representative exactly pi away from the target has no nearest branch
    with pytest.raises(BranchAmbiguity):
        _nearest_branch(0.0, math.pi)
    assert mul(TAU, TAU).theta == pytest.approx(2 * math.pi)


def test_group_laws(rng):
    for _ in range(500):
        g, h, k = (random_lift(rng) for _ in range(3))
        a = mul(mul(g, h), k)
        b = mul(g, mul(h, k))
        assert np.allclose(a.m, b.m, rtol=1e-10, atol=1e-10 * np.abs(a.m).max())
        assert abs(a.theta - b.theta) < 1e-9
        assert mul(g, inv(g)).allclose(IDENTITY, atol=1e-10)
        assert mul(inv(g), g).allclose(IDENTITY, atol=1e-10)
        assert np.allclose(mul(g, h).m, g.m @ h.m)


def test_tau_is_central(rng):
    for _ in range(200):
        g = random_lift(rng)
        a, b = mul(TAU, g), mul(g, TAU)
        assert a.allclose(b) and abs(a.theta - g.theta - math.pi) < 1e-12


def test_mul_matches_path_lifting(rng):
    for _ in range(50):
        g, h = random_lift(rng), random_lift(rng)
        assert abs(mul(g, h).theta - path_lift_theta(g, h)) < 1e-6


def test_power_tracks_sheets():
    g = lift(rotation_k(1.0), 0)
    assert abs(power(g, 7).theta - 7.0) < 1e-12
    assert abs(power(g, -4).theta + 4.0) < 1e-12


def test_level_examples():
    d = np.diag([2.0, 3.0])
    assert level(lift(d, 0)) == 0
    assert level(lift(d, 1)) == 2
    assert level(mul(TAU, lift(d, 0))) == 1
    with pytest.raises(NotTriangularizable):
        level(lift(rotation_k(0.5), 0))


def test_level_invariant_under_conjugation_and_additive(rng):
    bases = [np.diag([2.0, 3.0]), np.array([[2.0, 1.0], [0.0, 2.0]]),
             np.array([[0.5, -3.0], [0.0, 4.0]])]
    for m in bases:
        for k in range(-3, 4):
            g = mul(tau_power(k), lift(m, 0))
            base = level(g)
            for _ in range(30):
                c = lift(random_invertible(rng), int(rng.integers(-2, 3)))
                assert level(conj(c, g)) == base
            assert level(mul(TAU, g)) == base + 1


def test_triangularizer(rng):
    for _ in range(200):
        c0 = random_invertible(rng)
        m = c0 @ np.array([[rng.uniform(0.5, 3), rng.normal()], [0, rng.uniform(0.5, 3)]]) \
            @ np.linalg.inv(c0)
        c = triangularizer(m)
        assert np.linalg.det(c) > 0
        t = c @ m @ np.linalg.inv(c)
        assert abs(t[1, 0]) < 1e-9 * max(1.0, np.abs(t).max())


def test_level_eventually_constant_along_shear_family():
    # A_eps = [[lam, eps], [0, lam]] converges to the dilation lam E
    lam = 2.0
    for k in (0, 1, -2):
        levels = [level(mul(tau_power(k), lift([[lam, eps], [0.0, lam]], 0)))
                  for eps in (1.0, 0.1, 1e-3, 1e-6, 0.0)]
        assert levels == [k] * len(levels)


def test_unipotent_classes(rng):
    reps = {"identity": np.eye(2), "[[1,1],[0,1]]": np.array([[1.0, 1.0], [0.0, 1.0]]),
            "[[1,-1],[0,1]]": np.array([[1.0, -1.0], [0.0, 1.0]])}
    for name, m in reps.items():
        for _ in range(50):
            c = random_invertible(rng)
            g = lift(c @ m @ np.linalg.inv(c), 0)
            if level(g) != 0:
                g = lift(g.m, -(level(g) // 2))
            assert unipotent_class(g) == name


def test_expansion_class_examples():
    assert expansion_class(np.diag([2.0, 3.0])) == EXPANSION
    assert expansion_class(np.diag([2.0, 0.5])) == NOT_EXPANDING
    assert expansion_class(2 * rotation_k(math.pi / 3)) == EXPANDING_SPIRAL
    assert expansion_class(np.diag([-2.0, -3.0])) == EXPANSION_TIMES_R_PI


def test_expanding_spiral_iterate_oracle():
    m = 2 * rotation_k(math.pi / 3)
    pts = np.array([[math.cos(a), math.sin(a)] for a in np.linspace(0, 2 * math.pi, 64)])
    radii = [np.linalg.norm(np.linalg.matrix_power(m, n) @ pts.T, axis=0).min()
             for n in range(0, 40, 5)]
    assert all(b > a for a, b in zip(radii, radii[1:])) and radii[-1] > 1e10


def _theta_unbounded(g, n=40):
    # iterate oracle: theta of g^n grows without bound iff rotation is nonzero
    return abs(power(g, n).theta) > 4 * math.pi


def test_has_nonzero_rotation_examples_and_iterate_oracle(rng):
    d = lift(np.diag([2.0, 3.0]), 0)
    assert has_nonzero_rotation(d) is False
    assert has_nonzero_rotation(mul(TAU, d)) is True
    assert has_nonzero_rotation(lift(rotation_k(1.0), 0)) is True
    for _ in range(300):
        kind = rng.integers(4)
        a = rng.uniform(1.02, 1.3)
        if kind == 0:
            m = np.diag([a, 1 / a])
        elif kind == 1:
            m = np.array([[1.0, rng.choice([-1.0, 1.0])], [0.0, 1.0]])
        elif kind == 2:
            m = -np.diag([a, 1 / a])
        else:
            m = rotation_k(rng.uniform(0.3, 3.0) * rng.choice([-1, 1]))
        c = random_invertible(rng, max_cond=10)
        g = mul(tau_power(int(rng.integers(-2, 3))), lift(c @ m @ np.linalg.inv(c), 0))
        assert has_nonzero_rotation(g) == _theta_unbounded(g)


def test_conjugate_in_examples():
    eps, a = 0.1, 1.0
    gp = np.array([[eps, a], [-a, eps]])
    gm = np.array([[-eps, a], [-a, -eps]])
    assert conjugate_in(gp, gm, PGL)
    assert not conjugate_in(lift(gp, 0), lift(gm, 0), GLTILDE)
    lam = 1.7
    assert not conjugate_in([[lam, 1], [0, lam]], [[lam, -1], [0, lam]], GLPLUS)
    for m in (np.diag([2.0, 3.0]), gp, np.array([[lam, 1], [0, lam]])):
        assert conjugate_in(m, m, GLPLUS) and conjugate_in(m, m, PGL)
        assert conjugate_in(lift(m, 1), lift(m, 1), GLTILDE)


def test_glplus_case_analysis_random_conjugations(rng):
    samples = [np.diag([2.0, 3.0]), 1.5 * np.eye(2), np.array([[1.5, 1.0], [0.0, 1.5]]),
               2 * rotation_k(0.7), 2 * rotation_ccw(0.7)]
    for i, m in enumerate(samples):
        for _ in range(100):
            c = random_invertible(rng)
            assert conjugate_in(c @ m @ np.linalg.inv(c), m, GLPLUS)
            r = np.diag([1.0, -1.0]) @ c
            flipped = conjugate_in(r @ m @ np.linalg.inv(r), m, GLPLUS)
            # only the Jordan and complex cases see orientation
            assert flipped == (i in (0, 1))


def test_gltilde_single_conjugator_suffices(rng):
    # conjugating by elements of the centraliser never changes the answer
    m = np.diag([2.0, 3.0])
    g = lift(m, 1)
    for _ in range(50):
        z = lift(np.diag(rng.uniform(0.2, 3.0, size=2)), 0)
        assert conjugate_in(conj(z, g), g, GLTILDE)
        assert not conjugate_in(conj(z, g), lift(m, 0), GLTILDE)
    r = 2 * rotation_k(0.7)
    g = lift(r, 0)
    for _ in range(50):
        z = lift(rng.uniform(0.2, 3.0) * rotation_k(rng.uniform(-3, 3)), 0)
        assert conjugate_in(conj(z, g), g, GLTILDE)
