"""Flat affine two-tori: descriptors, classification, brick decomposition.

Every flat affine two-torus is either translation invariant (a cone point
``S``), a Hopf torus (a lattice in the lifted dilation-rotation group acting
on the universal cover of the punctured plane), or a non-homogeneous torus
``T_{A,B,k}`` built from an expansion ``A``, a commuting ``B`` with positive
eigenvalues and a nonzero level ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .affine import E2, expm2, logm2, mat2
from .algebra import AlgebraProduct
from .errors import (
    DegenerateLattice,
    InvalidDescriptor,
    InvalidParams,
    NonCommuting,
    NonPositiveEigenvalues,
    NotExpansion,
    WrongTag,
    ZeroLevel,
)
from .etale import holonomy_of
from .gl2cover import (
    EXPANSION,
    IDENTITY,
    GLTildeElement,
    conj,
    expansion_class,
    has_positive_real_spectrum,
    level,
    level_zero_lift,
    lift,
    mul,
    tau_power,
    triangularizer,
)

PLANE = "Plane"
HALF_PLANE = "HalfPlane"
SECTOR = "Sector"
PUNCTURED_PLANE = "PuncturedPlane"
NON_HOMOGENEOUS = "NonHomogeneous"

LATTICE_TOL = 1e-12
COMMUTE_TOL = 1e-9
DILATION_TOL = 1e-9

DEV_IMAGE = {
    algebra.T: PLANE,
    algebra.D: PLANE,
    algebra.C1: HALF_PLANE,
    algebra.C2: HALF_PLANE,
    algebra.B: SECTOR,
    algebra.A: PUNCTURED_PLANE,
}


@dataclass(frozen=True)
class TransInvariant:
    S: AlgebraProduct
    tag: str = field(default="trans", init=False)

    def to_json(self) -> dict:
        return {"type": self.tag, "S": self.S.to_json()}


@dataclass(frozen=True)
class Hopf:
    lambda1: float
    lambda2: float
    k1: int
    k2: int
    tag: str = field(default="hopf", init=False)

    def holonomy_lifts(self) -> tuple[GLTildeElement, GLTildeElement]:
        """``h(e_i) = diag(lambda_i) tau^{k_i}``."""
        return tuple(
            GLTildeElement(lam * (-1.0) ** (k % 2) * E2 + 0.0, k * math.pi)
            for lam, k in ((self.lambda1, self.k1), (self.lambda2, self.k2)))

    @property
    def level(self) -> int:
        return math.gcd(self.k1, self.k2)

    def to_json(self) -> dict:
        return {"type": self.tag, "lambda": [self.lambda1, self.lambda2],
                "k": [self.k1, self.k2]}


@dataclass(frozen=True, eq=False)
class TABk:
    A: np.ndarray
    B: np.ndarray
    k: int
    # det > 0 conjugator making A and B upper triangular, and the normalised pair
    conjugator: np.ndarray
    A_normal: np.ndarray
    B_normal: np.ndarray
    tag: str = field(default="tabk", init=False)

    def holonomy_lifts(self) -> tuple[GLTildeElement, GLTildeElement]:
        """The level-0 lift of ``A`` and ``tau^k`` times the level-0 lift of ``B``."""
        return level_zero_lift(self.A), mul(tau_power(self.k), level_zero_lift(self.B))

    @property
    def is_dilation_pair(self) -> bool:
        return _is_dilation(self.A) and _is_dilation(self.B)

    def to_json(self) -> dict:
        return {"type": self.tag, "A": self.A.reshape(-1).tolist(),
                "B": self.B.reshape(-1).tolist(), "k": self.k}


def _is_dilation(m: np.ndarray) -> bool:
    lam = 0.5 * (m[0, 0] + m[1, 1])
    return float(np.abs(m - lam * E2).max()) <= DILATION_TOL * max(1.0, abs(lam))


def make_trans(S: AlgebraProduct) -> TransInvariant:
    algebra.require_cone(S)
    return TransInvariant(S)


def make_hopf(lambda1: float, lambda2: float, k1: int, k2: int) -> Hopf:
    lambda1, lambda2 = float(lambda1), float(lambda2)
    if not (lambda1 > 0 and lambda2 > 0):
        raise InvalidParams("Hopf dilation factors must be positive")
    if int(k1) != k1 or int(k2) != k2:
        raise InvalidParams("Hopf levels must be integers")
    k1, k2 = int(k1), int(k2)
    det = math.log(lambda1) * k2 - math.log(lambda2) * k1
    if abs(det) < LATTICE_TOL:
        raise DegenerateLattice(
            f"(log l1) k2 - (log l2) k1 = {det:.3e}; the generators do not span a lattice")
    return Hopf(lambda1, lambda2, k1, k2)


def make_TABk(A, B, k: int) -> TABk:
    A, B = mat2(A), mat2(B)
    if expansion_class(A) != EXPANSION:
        raise NotExpansion("A must have real eigenvalues > 1")
    if np.linalg.det(B) <= 0 or not has_positive_real_spectrum(B):
        raise NonPositiveEigenvalues("B must have positive real eigenvalues")
    comm = float(np.abs(A @ B - B @ A).max())
    if comm > COMMUTE_TOL * max(1.0, float(np.abs(A).max()) * float(np.abs(B).max())):
        raise NonCommuting(f"A and B do not commute (residual {comm:.3e})")
    if int(k) != k:
        raise InvalidParams("k must be an integer")
    if int(k) == 0:
        raise ZeroLevel("T_{A,B,k} needs k != 0")
    # B scalar leaves every basis triangular for B, so use A's eigenvectors
    c = triangularizer(A if _is_dilation(B) else B)
    if np.linalg.det(c) < 0:
        c = np.diag([1.0, -1.0]) @ c
    ci = np.linalg.inv(c)
    return TABk(A, B, int(k), c, c @ A @ ci, c @ B @ ci)


@dataclass(frozen=True)
class ClassificationReport:
    dev_image: str
    homogeneous: bool
    complete: bool
    stratum: str
    level: int | None
    holonomy_lifts: tuple

    def check_invariants(self) -> None:
        if self.complete and self.dev_image != PLANE:
            raise AssertionError("complete structure with non-planar development image")
        if self.dev_image == PLANE and self.stratum not in (algebra.T, algebra.D):
            raise AssertionError("planar development image outside strata T, D")
        if self.stratum == NON_HOMOGENEOUS and (
                self.dev_image != PUNCTURED_PLANE or not self.level):
            raise AssertionError("non-homogeneous torus needs punctured plane and level != 0")

    def to_json(self) -> dict:
        lifts = []
        for h in self.holonomy_lifts:
            lifts.append(h.to_json())
        return {"devImage": self.dev_image, "homogeneous": self.homogeneous,
                "complete": self.complete, "stratum": self.stratum,
                "level": self.level, "holonomyLifts": lifts}


def as_hopf(d: TABk) -> Hopf:
    """A ``T_{A,B,k}`` whose generators are dilations is the Hopf torus
    ``H(lambda_A, lambda_B, 0, k)``."""
    if not d.is_dilation_pair:
        raise InvalidDescriptor("A and B are not both dilations")
    return make_hopf(0.5 * np.trace(d.A), 0.5 * np.trace(d.B), 0, d.k)


def classify_structure(d) -> ClassificationReport:
    if isinstance(d, TransInvariant):
        stratum = algebra.classify_algebra(d.S)
        h = holonomy_of(d.S)
        rep = ClassificationReport(DEV_IMAGE[stratum], True,
                                   stratum in (algebra.T, algebra.D), stratum, None,
                                   (h.h1, h.h2))
    elif isinstance(d, Hopf):
        rep = ClassificationReport(PUNCTURED_PLANE, True, False, algebra.A, d.level,
                                   d.holonomy_lifts())
    elif isinstance(d, TABk):
        if d.is_dilation_pair:
            hopf = as_hopf(d)
            rep = ClassificationReport(PUNCTURED_PLANE, True, False, algebra.A, d.k,
                                       hopf.holonomy_lifts())
        else:
            lifts = d.holonomy_lifts()
            rep = ClassificationReport(PUNCTURED_PLANE, False, False, NON_HOMOGENEOUS,
                                       level(lifts[1]), lifts)
    else:
        raise InvalidDescriptor(f"not a structure descriptor: {d!r}")
    rep.check_invariants()
    return rep


@dataclass(frozen=True)
class CylinderRecord:
    """One brick: the cylinder over the strip of angles ``strip`` in the
    universal cover of the punctured plane, with ``generator_a`` acting
    on it and ``glued_by`` attaching its top boundary to the next brick."""

    index: int
    strip: tuple[float, float]
    generator_a: GLTildeElement
    glued_by: GLTildeElement

    def to_json(self) -> dict:
        return {"index": self.index, "strip": list(self.strip),
                "generatorA": self.generator_a.to_json(), "gluedBy": self.glued_by.to_json()}


def brick_decomposition(d) -> list[CylinderRecord]:
    """``|k|`` cylinders over consecutive strips of angle ``pi``, in the
    coordinates where ``B`` is upper triangular.  Consecutive bricks are glued
    by the identity; the last one closes up by ``tau^k`` times the level-0
    lift of ``B``."""
    if not isinstance(d, TABk):
        raise WrongTag("brick decomposition needs a T_{A,B,k} descriptor")
    a0 = level_zero_lift(d.A_normal)
    closing = mul(tau_power(d.k), level_zero_lift(d.B_normal))
    step = 1 if d.k > 0 else -1
    out = []
    for i in range(abs(d.k)):
        lo = i * step * math.pi
        strip = (min(lo, lo + step * math.pi), max(lo, lo + step * math.pi))
        glue = closing if i == abs(d.k) - 1 else IDENTITY
        out.append(CylinderRecord(i, strip, a0, glue))
    return out


def closing_level(records: list[CylinderRecord]) -> int:
    """Level of the composite gluing around all bricks."""
    total = IDENTITY
    for r in records:
        total = mul(total, r.glued_by)
    return level(total)


def dilation_path(d: TABk, steps: int = 100) -> list[TABk]:
    """Deform ``(A, B)`` to the dilation pair ``(sqrt(det A) E, sqrt(det B) E)``
    along straight lines in the commuting logarithms."""
    la, lb = logm2(d.A), logm2(d.B)
    ta = 0.5 * np.trace(la) * E2
    tb = 0.5 * np.trace(lb) * E2
    out = []
    for i in range(steps + 1):
        s = i / steps
        A = expm2((1 - s) * la + s * ta)
        B = expm2((1 - s) * lb + s * tb)
        if i == steps:
            A, B = math.exp(ta[0, 0]) * E2, math.exp(tb[0, 0]) * E2
        out.append(make_TABk(A, B, d.k))
    return out


def descriptor_from_json(data: dict):
    kind = data.get("type")
    if kind == "trans":
        return make_trans(AlgebraProduct.from_json(data["S"]))
    if kind == "hopf":
        l1, l2 = data["lambda"]
        k1, k2 = data["k"]
        return make_hopf(l1, l2, k1, k2)
    if kind == "tabk":
        return make_TABk(np.asarray(data["A"], float).reshape(2, 2),
                         np.asarray(data["B"], float).reshape(2, 2), data["k"])
    raise InvalidDescriptor(f"unknown descriptor type {kind!r}")


def conjugated_lifts(d: TABk) -> tuple[GLTildeElement, GLTildeElement]:
    """Holonomy lifts in the coordinates where ``B`` is upper triangular."""
    c = lift(d.conjugator, 0)
    a, b = d.holonomy_lifts()
    return conj(c, a), conj(c, b)
