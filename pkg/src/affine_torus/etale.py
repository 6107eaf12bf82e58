"""Étale affine representations of R^2 and their development maps.

For a cone point ``S`` the map ``v -> exp [[S(v, .), v], [0, 0]]`` is a
homomorphism ``R^2 -> Aff(2)`` with an open orbit through the origin.  Its
orbit map is the development map of the translation-invariant structure
``S``, and its values on the integer lattice are the holonomy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affine import AffineMap2, E2, exp_affine, rotation_k, vec2
from .algebra import A, B, C1, C2, D, STRATA, T, AlgebraProduct, require_cone
from .errors import InvalidParams, NonCommuting

COMMUTATOR_TOL = 1e-9
MEMBER_TOL = 1e-9

# base points of the model domains: the orbit of the model product through
# the origin, shifted by the base point, is the standard domain
BASE_POINTS = {
    T: np.array([0.0, 0.0]),
    D: np.array([0.0, 0.0]),
    C1: np.array([0.0, 1.0]),
    C2: np.array([0.0, 1.0]),
    B: np.array([1.0, 1.0]),
    A: np.array([1.0, 0.0]),
}


@dataclass(frozen=True)
class HolonomyPair:
    h1: AffineMap2
    h2: AffineMap2

    def commutator_residual(self) -> float:
        return self.h1.commutator(self.h2).distance(AffineMap2.identity())

    def validate(self, tol: float = COMMUTATOR_TOL) -> "HolonomyPair":
        res = self.commutator_residual()
        if res > tol:
            raise NonCommuting(f"commutator residual {res:.3e}")
        if not (self.h1.det > 0 and self.h2.det > 0):
            raise InvalidParams("holonomy must preserve orientation")
        return self

    def to_json(self) -> dict:
        return {"h1": self.h1.to_json(), "h2": self.h2.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "HolonomyPair":
        return cls(AffineMap2.from_json(d["h1"]), AffineMap2.from_json(d["h2"]))


def rho(S: AlgebraProduct, v) -> AffineMap2:
    require_cone(S)
    v = vec2(v)
    return exp_affine(S.left(v), v)


def develop(S: AlgebraProduct, v) -> np.ndarray:
    """``D_S(v) = rho(S, v)(0)``; accepts one vector or an array of vectors."""
    require_cone(S)
    pts = np.asarray(v, dtype=float)
    if pts.ndim == 1:
        return exp_affine(S.left(pts), pts).translation
    return np.array([exp_affine(S.left(p), p).translation for p in pts])


def develop_jacobian(S: AlgebraProduct, v, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the development map."""
    v = vec2(v)
    J = np.empty((2, 2))
    for j in range(2):
        dv = np.zeros(2)
        dv[j] = h
        J[:, j] = (develop(S, v + dv) - develop(S, v - dv)) / (2 * h)
    return J


def holonomy_of(S: AlgebraProduct) -> HolonomyPair:
    return HolonomyPair(rho(S, [1.0, 0.0]), rho(S, [0.0, 1.0]))


def model_group_element(stratum: str, params) -> AffineMap2:
    """Element of the standard abelian étale group of a stratum.

    Parameters: T ``(u, v)`` translation; D ``(u, v)``; C1 ``(t, z)`` giving
    ``[[e^t, z], [0, e^t]]``; C2 ``(t, v)`` giving ``diag(1, e^t)`` plus
    translation ``(v, 0)``; B ``(a, b)`` with ``a, b > 0`` giving ``diag(a, b)``;
    A ``(t, theta)`` giving ``e^t K(theta)``.
    """
    try:
        p, q = (float(x) for x in params)
    except (TypeError, ValueError) as exc:
        raise InvalidParams(f"expected two real parameters, got {params!r}") from exc
    if not (math.isfinite(p) and math.isfinite(q)):
        raise InvalidParams("parameters must be finite")
    if stratum == T:
        return AffineMap2.translate([p, q])
    if stratum == D:
        return AffineMap2([[1.0, q], [0.0, 1.0]], [p + 0.5 * q * q, q])
    if stratum == C1:
        return AffineMap2.linear_map([[math.exp(p), q], [0.0, math.exp(p)]])
    if stratum == C2:
        return AffineMap2(np.diag([1.0, math.exp(p)]), [q, 0.0])
    if stratum == B:
        if not (p > 0 and q > 0):
            raise InvalidParams("B-group parameters must be positive")
        return AffineMap2.linear_map(np.diag([p, q]))
    if stratum == A:
        return AffineMap2.linear_map(math.exp(p) * rotation_k(q))
    raise InvalidParams(f"unknown stratum {stratum!r}")


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= MEMBER_TOL * max(1.0, scale)


def in_model_group(stratum: str, g: AffineMap2) -> bool:
    """Membership in the standard étale group of ``stratum``."""
    l, t = g.linear, g.translation
    s = max(1.0, float(np.abs(l).max()), float(np.abs(t).max()))
    if stratum == T:
        return np.allclose(l, E2, atol=MEMBER_TOL * s)
    if stratum == D:
        v = l[0, 1]
        return (np.allclose(l, [[1.0, v], [0.0, 1.0]], atol=MEMBER_TOL * s)
                and _close(t[1], v, s))
    if stratum == C1:
        return (np.abs(t).max() <= MEMBER_TOL * s and _close(l[1, 0], 0.0, s)
                and _close(l[0, 0], l[1, 1], s) and l[0, 0] > 0)
    if stratum == C2:
        return (_close(l[0, 0], 1.0, s) and _close(l[0, 1], 0.0, s)
                and _close(l[1, 0], 0.0, s) and l[1, 1] > 0 and _close(t[1], 0.0, s))
    if stratum == B:
        return (np.abs(t).max() <= MEMBER_TOL * s and _close(l[0, 1], 0.0, s)
                and _close(l[1, 0], 0.0, s) and l[0, 0] > 0 and l[1, 1] > 0)
    if stratum == A:
        return (np.abs(t).max() <= MEMBER_TOL * s and _close(l[0, 0], l[1, 1], s)
                and _close(l[0, 1], -l[1, 0], s) and abs(l[0, 0]) + abs(l[0, 1]) > 0)
    raise InvalidParams(f"unknown stratum {stratum!r}")


def normalizer_check(stratum: str, g: AffineMap2) -> bool:
    """Whether ``g`` normalizes the standard étale group of ``stratum``."""
    l, t = g.linear, g.translation
    if abs(g.det) <= MEMBER_TOL:
        return False
    s = max(1.0, float(np.abs(l).max()), float(np.abs(t).max()))
    linear_only = np.abs(t).max() <= MEMBER_TOL * s
    if stratum == T:
        return True
    if stratum == D:
        return _close(l[1, 0], 0.0, s) and _close(l[0, 0], l[1, 1] ** 2, s)
    if stratum == C1:
        return linear_only and _close(l[1, 0], 0.0, s)
    if stratum == C2:
        return (_close(l[0, 1], 0.0, s) and _close(l[1, 0], 0.0, s)
                and _close(t[1], 0.0, s))
    if stratum == B:
        diagonal = _close(l[0, 1], 0.0, s) and _close(l[1, 0], 0.0, s)
        anti = _close(l[0, 0], 0.0, s) and _close(l[1, 1], 0.0, s)
        return linear_only and (diagonal or anti)
    if stratum == A:
        conformal = _close(l[0, 0], l[1, 1], s) and _close(l[0, 1], -l[1, 0], s)
        anti = _close(l[0, 0], -l[1, 1], s) and _close(l[0, 1], l[1, 0], s)
        return linear_only and (conformal or anti)
    raise InvalidParams(f"unknown stratum {stratum!r}")


NORMALIZER_REFLECTIONS = {
    A: [np.array([[0.0, 1.0], [1.0, 0.0]])],
    B: [np.diag([-1.0, 1.0]), np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])],
}


def to_model_frame(stratum: str, g: AffineMap2) -> AffineMap2:
    """Conjugate a value of ``rho(model_product(stratum), .)`` into the
    standard group by the translation to the base point."""
    b = BASE_POINTS[stratum]
    return AffineMap2.translate(b) @ g @ AffineMap2.translate(-b)


def domain_contains(stratum: str, pts, margin: float = 0.0) -> np.ndarray:
    """Membership of points in the standard model domain of ``stratum``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    if stratum in (T, D):
        return np.ones(len(pts), dtype=bool)
    if stratum in (C1, C2):
        return y > margin
    if stratum == B:
        return (x > margin) & (y > margin)
    if stratum == A:
        return np.hypot(x, y) > margin
    raise InvalidParams(f"unknown stratum {stratum!r}")

