"""Randomised checks of the rotation-angle function on the universal cover.

``theta_lemma_suite`` quantifies the six standard properties of ``theta``
over random lifts; ``path_lift_theta`` is an independent oracle for the angle
of a product, obtained by following a path from the identity.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .affine import rotation_ccw, rotation_k
from .gl2cover import (
    GLPLUS,
    GLTildeElement,
    conj,
    conjugate_in,
    inv,
    iwasawa,
    lift,
    mul,
    rotation_lift,
    tau_power,
)

MARGIN = 1e-9
EXACT_TOL = 1e-9


def random_matrix(rng: np.random.Generator, max_norm: float = 10.0) -> np.ndarray:
    """A matrix with positive determinant and Frobenius norm at most ``max_norm``."""
    while True:
        m = rng.normal(size=(2, 2))
        if abs(np.linalg.det(m)) < 1e-3 * np.linalg.norm(m) ** 2:
            continue
        m *= rng.uniform(0.05, max_norm) / np.linalg.norm(m)
        if np.linalg.det(m) < 0:
            m[:, 1] *= -1.0
        return m


def random_lift(rng: np.random.Generator, max_norm: float = 10.0,
                sheets: int = 2) -> GLTildeElement:
    return lift(random_matrix(rng, max_norm), int(rng.integers(-sheets, sheets + 1)))


def random_an(rng: np.random.Generator) -> GLTildeElement:
    a = np.exp(rng.uniform(-1.5, 1.5, size=2))
    m = np.array([[a[0], rng.uniform(-5, 5)], [0.0, a[1]]])
    return GLTildeElement(m, 0.0)


@dataclass
class ItemResult:
    item: str
    statement: str
    trials: int = 0
    violations: int = 0
    min_margin: float = math.inf
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, margin: float, strict: bool = True, ctx=None) -> None:
        """``ctx`` is a callable producing the witness; it is only called for
        a new minimum."""
        self.trials += 1
        if margin < self.min_margin:
            self.min_margin = margin
            self.worst = ctx() if ctx else {}
        if (margin <= MARGIN) if strict else (margin < 0):
            self.violations += 1

    def to_json(self) -> dict:
        return {"item": self.item, "statement": self.statement, "passed": self.passed,
                "trials": self.trials, "violations": self.violations,
                "min_margin": self.min_margin}


def _upper_positive(m: np.ndarray) -> bool:
    return abs(m[1, 0]) <= EXACT_TOL * max(1.0, float(np.abs(m).max())) and m[0, 0] > 0


def theta_lemma_suite(trials: int = 10_000, seed: int = 0) -> dict:
    """Check the six properties of ``theta`` on ``trials`` random lifts each.

    Strict inequalities are counted as passing only with margin above 1e-9.
    Item 4 is checked as ``|theta(g) + theta(g^-1)| < pi``; the variant with
    a difference is reported separately as ``item4_difference``.
    """
    rng = np.random.default_rng(seed)
    res = {
        "1": ItemResult("1", "theta(g) = 0 iff g in AN"),
        "2": ItemResult("2", "theta(k g) = theta(k) + theta(g); theta(tau^m) = m pi"),
        "3": ItemResult("3", "|theta(gh) - theta(g) - theta(h)| < pi"),
        "4": ItemResult("4", "|theta(g) + theta(g^-1)| < pi"),
        "4d": ItemResult("4d", "|theta(g) - theta(g^-1)| < pi"),
        "5": ItemResult("5", "|theta(g k g^-1) - theta(k)| < pi"),
        "6": ItemResult("6", "|theta(g h g^-1)| < pi for h in AN"),
    }
    t0 = time.perf_counter()
    for i in range(trials):
        g = random_lift(rng)
        h = random_lift(rng)
        # (1) both directions: random lifts and random elements of AN on random sheets
        b = random_an(rng)
        k_sheet = int(rng.integers(-2, 3))
        cand = b if i % 2 == 0 else GLTildeElement(b.m, 2 * math.pi * k_sheet)
        for x in (g, cand):
            zero = abs(x.theta) <= EXACT_TOL
            in_an = _upper_positive(x.m) and x.sheet == 0 and abs(x.theta) < math.pi
            res["1"].record(1.0 if zero == in_an else -1.0, strict=False,
                            ctx=lambda x=x: {"m": x.m.tolist(), "theta": x.theta})
        # (2)
        phi = rng.uniform(-10, 10)
        k = rotation_lift(phi)
        err = abs(mul(k, g).theta - (k.theta + g.theta))
        m_int = int(rng.integers(-5, 6))
        err = max(err, abs(tau_power(m_int).theta - m_int * math.pi))
        res["2"].record(EXACT_TOL - err, strict=False, ctx=lambda: {"phi": phi})
        # (3)
        d = abs(mul(g, h).theta - g.theta - h.theta)
        res["3"].record(math.pi - d, ctx=lambda: {"g": g.to_json(), "h": h.to_json()})
        # (4)
        gi = inv(g)
        res["4"].record(math.pi - abs(g.theta + gi.theta), ctx=lambda: {"g": g.to_json()})
        res["4d"].record(math.pi - abs(g.theta - gi.theta), ctx=lambda: {"g": g.to_json()})
        # (5)
        k2 = rotation_lift(rng.uniform(-10, 10))
        res["5"].record(math.pi - abs(conj(g, k2).theta - k2.theta),
                        ctx=lambda: {"g": g.to_json(), "k": k2.theta})
        # (6)
        res["6"].record(math.pi - abs(conj(g, b).theta),
                        ctx=lambda: {"g": g.to_json(), "h": b.to_json()})
    elapsed = time.perf_counter() - t0
    items = [res[key] for key in ("1", "2", "3", "4", "5", "6")]
    return {
        "trials": trials,
        "seed": seed,
        "seconds": elapsed,
        "passed": all(r.passed for r in items),
        "items": [r.to_json() for r in items],
        "item4_difference": res["4d"].to_json(),
    }


def _path_factors(g: GLTildeElement, ts: np.ndarray) -> np.ndarray:
    """Matrices ``K(t theta) diag(a^t) [[1, t n], [0, 1]]`` for all ``t`` in ``ts``."""
    f = iwasawa(g.m)
    c, s = np.cos(ts * g.theta), np.sin(ts * g.theta)
    K = np.empty((len(ts), 2, 2))
    K[:, 0, 0], K[:, 0, 1], K[:, 1, 0], K[:, 1, 1] = c, s, -s, c
    AN = np.zeros((len(ts), 2, 2))
    a1, a2 = f.a1 ** ts, f.a2 ** ts
    AN[:, 0, 0] = a1
    AN[:, 0, 1] = a1 * ts * f.n12
    AN[:, 1, 1] = a2
    return K @ AN


def path_lift_theta(g: GLTildeElement, h: GLTildeElement, steps: int = 10_000) -> float:
    """Angle of ``g h`` by continuation along ``t -> g(t) h(t)``.

    ``g(t)`` runs from the identity to ``g`` through the lifted rotations and
    the contractible group AN, so the endpoint of the continuous angle of
    ``g(t) h(t) e1`` is the angle of the product on the cover.
    """
    ts = np.linspace(0.0, 1.0, steps + 1)
    P = _path_factors(g, ts) @ _path_factors(h, ts)
    ang = np.arctan2(-P[:, 1, 0], P[:, 0, 0])
    return float(np.unwrap(ang)[-1])


def k_phi(phi: float) -> np.ndarray:
    """A family conjugate to rotations that tends to ``[[1, -1], [0, 1]]``."""
    r = math.sqrt(math.sin(phi))
    return np.array([[math.cos(phi) + r, -math.sin(phi) - 1.0],
                     [math.sin(phi), math.cos(phi) - r]])


def rotation_family_check(phi: float) -> dict:
    """Trace, determinant and GL+ class of ``k_phi`` against both rotation senses."""
    m = k_phi(phi)
    return {
        "phi": phi,
        "trace_error": abs(np.trace(m) - 2 * math.cos(phi)),
        "det_error": abs(np.linalg.det(m) - 1.0),
        "conjugate_to_ccw_rotation": conjugate_in(m, rotation_ccw(phi), GLPLUS),
        "conjugate_to_K": conjugate_in(m, rotation_k(phi), GLPLUS),
    }
