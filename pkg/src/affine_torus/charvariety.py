"""Points of Hom(Z^2, G) and their conjugacy classes.

``G`` is one of the affine group, GL+(2,R), its universal cover, or
PGL(2,R).  Besides the simultaneous-conjugacy test this module holds the
witnesses for the non-Hausdorff and branched phenomena of the character
variety and a sampled probe of local injectivity of the holonomy map on
the cone of translation-invariant structures.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from . import algebra
from .affine import AffineMap2, E2, expm2, mat2, rotation_k
from .algebra import AlgebraProduct
from .conjugators import find_conjugator
from .errors import Degenerate, InvalidParams, NonCommuting
from .etale import holonomy_of
from .gl2cover import (
    GLPLUS,
    GLTILDE,
    PGL,
    GLTildeElement,
    conj,
    conjugate_gl,
    conjugate_glplus,
    lift,
)

AFF = "aff"
HOM_GROUPS = (AFF, GLPLUS, GLTILDE, PGL)
COMMUTE_TOL = 1e-9
THETA_TOL = 1e-6
SEED_ENV = "AFFINE_TORUS_SEED"
DEFAULT_SEED = 20240607


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, AffineMap2):
        return g.as_matrix()
    if isinstance(g, GLTildeElement):
        return g.m
    return mat2(g)


@dataclass(frozen=True, eq=False)
class HomPoint:
    """Images of the two generators of Z^2.

    Elements are :class:`AffineMap2` for ``aff``, :class:`GLTildeElement` for
    ``gltilde`` and 2x2 arrays for ``glplus`` and ``pgl``.
    """

    g1: object
    g2: object
    group: str = GLPLUS

    def __post_init__(self):
        if self.group not in HOM_GROUPS:
            raise InvalidParams(f"group must be one of {HOM_GROUPS}")
        if self.group == GLTILDE:
            if not (isinstance(self.g1, GLTildeElement) and isinstance(self.g2, GLTildeElement)):
                raise InvalidParams("gltilde points need GLTildeElement images")
        elif self.group == AFF:
            if not (isinstance(self.g1, AffineMap2) and isinstance(self.g2, AffineMap2)):
                raise InvalidParams("aff points need AffineMap2 images")
        else:
            object.__setattr__(self, "g1", mat2(self.g1))
            object.__setattr__(self, "g2", mat2(self.g2))
        a, b = self.matrices()
        res = float(np.abs(a @ b - b @ a).max())
        scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
        if res > COMMUTE_TOL * scale ** 2:
            raise NonCommuting(f"generator images do not commute (residual {res:.3e})")

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        return _as_matrix(self.g1), _as_matrix(self.g2)

    def distance(self, other: "HomPoint") -> float:
        """Largest Frobenius distance between generator images; used to monitor
        convergence, never to decide conjugacy."""
        a1, b1 = self.matrices()
        a2, b2 = other.matrices()
        return max(float(np.linalg.norm(a1 - a2)), float(np.linalg.norm(b1 - b2)))

    def conjugate_by(self, c) -> "HomPoint":
        """``(c g1 c^-1, c g2 c^-1)``; ``c`` matches the group's element type
        (a det > 0 matrix is lifted for ``gltilde``)."""
        if self.group == GLTILDE:
            ct = c if isinstance(c, GLTildeElement) else lift(c, 0)
            return HomPoint(conj(ct, self.g1), conj(ct, self.g2), GLTILDE)
        if self.group == AFF:
            ca = c if isinstance(c, AffineMap2) else AffineMap2.linear_map(c)
            ci = ca.inverse()
            return HomPoint(ca @ self.g1 @ ci, ca @ self.g2 @ ci, AFF)
        c = mat2(c)
        ci = np.linalg.inv(c)
        return HomPoint(c @ self.g1 @ ci, c @ self.g2 @ ci, self.group)


def _classes_agree(p1: HomPoint, p2: HomPoint, oriented: bool) -> bool:
    for a, b in zip(p1.matrices(), p2.matrices()):
        same = conjugate_glplus(a, b) if oriented else conjugate_gl(a, b)
        if not same:
            return False
    return True


def hom_conjugate_in(r1: HomPoint, r2: HomPoint, group: str | None = None) -> bool:
    """Simultaneous conjugacy of two points of Hom(Z^2, G).

    Each generator must first be conjugate on its own (raising
    :class:`Degenerate` inside tolerance bands); a common conjugator is then
    sought in the null space of the linear equations ``C g_i = h_i C``.  For
    lifts the conjugated angles must agree on both generators.
    """
    group = group or r1.group
    if r1.group != r2.group or group != r1.group:
        raise InvalidParams("both points must live in the requested group")
    if group == AFF:
        a1, b1 = r1.matrices()
        a2, b2 = r2.matrices()
        for x, y in ((a1, a2), (b1, b2)):
            if not conjugate_gl(x[:2, :2], y[:2, :2]):
                return False
        return find_conjugator([a1, b1], [a2, b2], kind="aff") is not None
    if group == PGL:
        a1, b1 = r1.matrices()
        a2, b2 = r2.matrices()
        for s1, s2 in itertools.product((1.0, -1.0), repeat=2):
            if not (conjugate_gl(a1, s1 * a2) and conjugate_gl(b1, s2 * b2)):
                continue
            if find_conjugator([a1, b1], [s1 * a2, s2 * b2], kind="gl") is not None:
                return True
        return False
    if not _classes_agree(r1, r2, oriented=True):
        return False
    c = find_conjugator(list(r1.matrices()), list(r2.matrices()), kind="glplus")
    if c is None:
        return False
    if group == GLPLUS:
        return True
    moved = r1.conjugate_by(c)
    return (abs(moved.g1.theta - r2.g1.theta) <= THETA_TOL
            and abs(moved.g2.theta - r2.g2.theta) <= THETA_TOL)


def translate_by_kernel(r: HomPoint, j1: int, j2: int) -> HomPoint:
    """Multiply the lifted generator images by ``tau^(2 j1)`` and ``tau^(2 j2)``."""
    if r.group != GLTILDE:
        raise InvalidParams("deck translations act on gltilde points")
    g1 = GLTildeElement(r.g1.m, r.g1.theta + 2 * math.pi * j1)
    g2 = GLTildeElement(r.g2.m, r.g2.theta + 2 * math.pi * j2)
    return HomPoint(g1, g2, GLTILDE)


@dataclass(frozen=True)
class NonclosedWitness:
    conjugated: HomPoint
    distance_to_rho0: float
    rho1: HomPoint
    rho0: HomPoint


def nonclosed_witness(lam: float, t: float) -> NonclosedWitness:
    """Conjugate ``(lam E, [[lam, 1], [0, lam]])`` by ``diag(1, t)``; the
    orbit approaches the dilation pair ``(lam E, lam E)`` at rate ``1/t``."""
    if not (lam > 1 and t > 0):
        raise InvalidParams("need lam > 1 and t > 0")
    rho1 = HomPoint(lam * E2, np.array([[lam, 1.0], [0.0, lam]]), GLPLUS)
    rho0 = HomPoint(lam * E2, lam * E2, GLPLUS)
    moved = rho1.conjugate_by(np.diag([1.0, t]))
    return NonclosedWitness(moved, moved.distance(rho0), rho1, rho0)


@dataclass(frozen=True)
class BranchedWitness:
    pgl_equal: bool
    gltilde_equal: bool


def branched_pair(a: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    return (np.array([[eps, a], [-a, eps]]), np.array([[-eps, a], [-a, -eps]]))


def branched_witness(a: float, eps: float) -> BranchedWitness:
    """Compare ``g_{a,eps}`` and ``g_{a,-eps}`` in PGL(2,R) and, via their
    principal lifts, in the universal cover."""
    if a == 0:
        raise InvalidParams("a must be nonzero")
    gp, gm = branched_pair(a, eps)
    pgl = conjugate_gl(gp, gm) or conjugate_gl(gp, -gm)
    same = conjugate_glplus(gp, gm)
    if same:
        c = find_conjugator([gp], [gm], kind="glplus")
        if c is None:
            raise Degenerate("spectral classes agree but no conjugator was found")
        moved = conj(lift(c, 0), lift(gp, 0))
        same = abs(moved.theta - lift(gm, 0).theta) <= THETA_TOL
    return BranchedWitness(bool(pgl), bool(same))


def probe_seed(seed: int | None = None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    return int(env) if env else DEFAULT_SEED


PROBE_STRATA = (algebra.D, algebra.C1, algebra.C2, algebra.B, algebra.A)
# holonomy linear parts closer than this to the dilations count as Hopf-like
HOPF_MARGIN = 0.05
IDENTICAL_TOL = 1e-6


def _random_frame(rng: np.random.Generator) -> np.ndarray:
    s = np.exp(rng.uniform(-0.7, 0.7, size=2))
    g = rotation_k(rng.uniform(-math.pi, math.pi)) @ np.diag(s) @ rotation_k(
        rng.uniform(-math.pi, math.pi))
    return g * rng.uniform(0.5, 2.0)


def _hopf_distance(S: AlgebraProduct) -> float:
    h = holonomy_of(S)
    out = 0.0
    for g in (h.h1, h.h2):
        lam = 0.5 * np.trace(g.linear)
        out = max(out, float(np.abs(g.linear - lam * E2).max()) / max(1.0, abs(lam)))
    return out


@dataclass
class ProbeReport:
    seed: int
    samples: int
    radius: float
    failures: int
    worst_case: dict

    def to_json(self) -> dict:
        return {"seed": self.seed, "samples": self.samples, "radius": self.radius,
                "failures": self.failures, "worst_case": self.worst_case}


def local_injectivity_probe(samples: int = 500, radius: float = 0.05,
                            seed: int | None = None) -> ProbeReport:
    """Sampled check that nearby cone points with conjugate holonomy coincide.

    Each sample draws ``S = act(g, model)`` for a random non-translation
    stratum with holonomy at least ``HOPF_MARGIN`` away from the dilations,
    perturbs ``g`` by ``exp(X)`` with ``|X| <= radius`` and decides affine
    conjugacy of the two holonomy pairs.  A failure is a conjugate pair whose
    products differ by more than ``IDENTICAL_TOL`` or lie in different strata.
    The worst case is the non-identical pair whose holonomies are closest,
    the hardest decision of the run.
    """
    if samples <= 0:
        raise InvalidParams("samples must be positive")
    seed = probe_seed(seed)
    rng = np.random.default_rng(seed)
    failures = 0
    worst = {"holonomy_distance": math.inf}
    done = 0
    while done < samples:
        stratum = PROBE_STRATA[rng.integers(len(PROBE_STRATA))]
        g = _random_frame(rng)
        S = algebra.act(g, algebra.model_product(stratum))
        if _hopf_distance(S) < HOPF_MARGIN:
            continue
        X = rng.normal(size=(2, 2))
        X *= rng.uniform(0.0, radius) / np.linalg.norm(X)
        S2 = algebra.act(g @ expm2(X), algebra.model_product(stratum))
        done += 1
        h1, h2 = holonomy_of(S), holonomy_of(S2)
        m1 = [h1.h1.as_matrix(), h1.h2.as_matrix()]
        m2 = [h2.h1.as_matrix(), h2.h2.as_matrix()]
        conjugate = find_conjugator(m1, m2, kind="aff") is not None
        dist = S.distance(S2)
        if conjugate and (dist > IDENTICAL_TOL
                          or algebra.classify_algebra(S2) != stratum):
            failures += 1
        if dist > IDENTICAL_TOL:
            hd = max(float(np.linalg.norm(a - b)) for a, b in zip(m1, m2))
            if hd < worst["holonomy_distance"]:
                worst = {"holonomy_distance": hd, "stratum": stratum, "distance": dist,
                         "conjugate": conjugate, "S": S.to_json(), "S_perturbed": S2.to_json()}
    if math.isinf(worst["holonomy_distance"]):
        worst = {}
    return ProbeReport(seed, samples, float(radius), failures, worst)
