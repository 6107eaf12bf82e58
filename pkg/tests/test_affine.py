import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from affine_torus.affine import (
    COMPLEX,
    REAL_DIAGONAL,
    REAL_DISTINCT,
    REAL_JORDAN,
    AffineMap2,
    eig2,
    exp_affine,
    expm2,
    logm2,
    mat2,
    phi,
    rotation_ccw,
    rotation_k,
)

from conftest import finite, matrices, random_invertible


def lift3(L, v):
    H = np.zeros((3, 3))
    H[:2, :2] = L
    H[:2, 2] = v
    return H


def series3(L, v, terms=30):
    H = lift3(L, v)
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, terms):
        term = term @ H / k
        out = out + term
    return out


def test_mat2_rejects_bad_input():
    with pytest.raises(ValueError):
        mat2([1, 2, 3])
    with pytest.raises(ValueError):
        mat2([[1, np.nan], [0, 1]])
    assert mat2([1, 2, 3, 4]).shape == (2, 2)


def test_eig2_examples():
    e = eig2(np.diag([2.0, 3.0]))
    assert e.kind == REAL_DISTINCT and np.allclose(e.values, (2, 3))
    e = eig2(2 * rotation_ccw(math.pi / 3))
    assert e.kind == COMPLEX
    assert abs(e.values[0] - 2) < 1e-12 and abs(e.values[1] - math.pi / 3) < 1e-12
    e = eig2([[1.5, 1.0], [0.0, 1.5]])
    assert e.kind == REAL_JORDAN and abs(e.values[0] - 1.5) < 1e-12
    assert eig2(3 * np.eye(2)).kind == REAL_DIAGONAL


def test_rotation_senses():
    # K(t) turns clockwise, rotation_ccw the other way
    assert np.allclose(rotation_k(0.3), rotation_ccw(-0.3))
    assert np.allclose(rotation_ccw(math.pi / 2) @ [1, 0], [0, 1])


def test_eig2_tag_invariant_under_conjugation(rng):
    samples = [np.diag([2.0, 3.0]), np.array([[1.5, 1.0], [0.0, 1.5]]),
               2 * rotation_k(0.7), -np.eye(2) * 1.3]
    for m in samples:
        want = eig2(m)
        for _ in range(200):
            c = random_invertible(rng, positive=False)
            got = eig2(c @ m @ np.linalg.inv(c))
            assert got.kind == want.kind
            assert np.allclose(got.values, want.values, atol=1e-7)


@given(matrices(-3, 3), st.lists(finite(), min_size=2, max_size=2))
def test_exp_affine_matches_series(L, v):
    g = exp_affine(L, v)
    ref = series3(L, np.array(v))
    assert np.abs(g.as_matrix() - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


@given(matrices(-3, 3))
def test_expm2_against_scipy(L):
    ref = scipy.linalg.expm(L)
    assert np.abs(expm2(L) - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


def test_phi_near_singular_uses_series():
    L = np.array([[1e-9, 1.0], [0.0, 0.0]])
    ref = series3(L, [0.0, 0.0])[:2, :2]
    want = np.eye(2) + L / 2 + L @ L / 6
    assert np.allclose(phi(L), want, atol=1e-12)
    assert np.allclose(ref, expm2(L), atol=1e-12)


def test_exp_affine_examples():
    g = exp_affine(np.zeros((2, 2)), [2.0, -1.0])
    assert np.allclose(g.linear, np.eye(2)) and np.allclose(g.translation, [2, -1])
    u, w = 0.7, -1.3
    # D-type data: L_v = [[0, w], [0, 0]] for v = (u, w)
    g = exp_affine([[0.0, w], [0.0, 0.0]], [u, w])
    assert np.allclose(g.as_matrix(), [[1, w, u + 0.5 * w * w], [0, 1, w], [0, 0, 1]], atol=1e-14)
    g = exp_affine(np.diag([0.4, 0.4]), [0.0, 0.0])
    assert np.allclose(g.linear, math.exp(0.4) * np.eye(2))


def test_exp_affine_commuting_product(rng):
    for _ in range(200):
        X = rng.normal(size=(2, 2))
        a, b = rng.normal(size=2)
        L1, L2 = a * X, b * X
        # lifts commute when the translation parts are proportional too
        v = rng.normal(size=2)
        g = exp_affine(L1, a * v) @ exp_affine(L2, b * v)
        h = exp_affine(L1 + L2, (a + b) * v)
        assert g.allclose(h, atol=1e-9 * max(1.0, np.abs(h.as_matrix()).max()))


@given(matrices(-1.5, 1.5).filter(lambda m: np.linalg.cond(m) < 1e6))
def test_logm2_inverts_expm2_on_positive_spectrum(L):
    # restrict to logs of matrices with real positive spectrum
    m = expm2(L)
    ev = np.linalg.eigvals(m)
    if np.any(np.abs(ev.imag) > 1e-12) or np.any(ev.real <= 0):
        return
    assert np.allclose(expm2(logm2(m)), m, atol=1e-9 * max(1.0, np.abs(m).max()))
    assert np.allclose(logm2(m), scipy.linalg.logm(m).real, atol=1e-7)


def test_affine_map_group_laws(rng):
    for _ in range(100):
        f = AffineMap2(random_invertible(rng), rng.normal(size=2))
        g = AffineMap2(random_invertible(rng), rng.normal(size=2))
        h = AffineMap2(random_invertible(rng), rng.normal(size=2))
        assert ((f @ g) @ h).allclose(f @ (g @ h), atol=1e-10)
        assert (f @ f.inverse()).allclose(AffineMap2.identity(), atol=1e-10)
        x = rng.normal(size=2)
        assert np.allclose((f @ g)(x), f(g(x)))
    assert AffineMap2.from_json(f.to_json()).allclose(f, atol=0)
