"""The universal covering group of GL+(2, R).

An element is a matrix of positive determinant together with a real branch
angle ``theta``.  The angle is the rotation coordinate of the Iwasawa
decomposition ``m = K(theta) diag(a1, a2) [[1, n], [0, 1]]`` with
``K(t) = [[cos t, sin t], [-sin t, cos t]]``, tracked continuously on the
cover.  The centre contains ``tau`` (matrix ``-E``, angle ``pi``) and
``tau**2`` generates the kernel of the projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affine import (
    COMPLEX,
    E2,
    REAL_DIAGONAL,
    REAL_DISTINCT,
    REAL_JORDAN,
    EigenClass2,
    eig2,
    mat2,
    relative_discriminant,
    rotation_k,
)
from .conjugators import find_conjugator
from .errors import (
    BranchAmbiguity,
    Degenerate,
    InvalidParams,
    NonPositiveDeterminant,
    NotTriangularizable,
)

TWO_PI = 2.0 * math.pi
# theta comparisons
THETA_TOL = 1e-6
# class membership, relative
CLASS_TOL = 1e-9
# relative discriminants in (CLASS_TOL, DEGENERATE_BAND) are too close to the
# parabolic locus for a conjugacy decision
DEGENERATE_BAND = 1e-6


@dataclass(frozen=True)
class IwasawaFactors:
    theta0: float
    a1: float
    a2: float
    n12: float

    def reconstruct(self) -> np.ndarray:
        return (rotation_k(self.theta0) @ np.diag([self.a1, self.a2])
                @ np.array([[1.0, self.n12], [0.0, 1.0]]))


def _det(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def iwasawa(m) -> IwasawaFactors:
    m = mat2(m)
    det = _det(m)
    if not det > 0:
        raise NonPositiveDeterminant(f"det = {det!r}")
    a1 = math.hypot(m[0, 0], m[1, 0])
    theta0 = math.atan2(-m[1, 0], m[0, 0]) + 0.0
    if theta0 <= -math.pi:
        theta0 = math.pi
    r = rotation_k(-theta0) @ m
    a2 = det / a1
    return IwasawaFactors(theta0, a1, a2, float(r[0, 1] / a1))


def theta0(m) -> float:
    return _theta0(mat2(m))


def _theta0(m: np.ndarray) -> float:
    t = math.atan2(-m[1, 0], m[0, 0]) + 0.0
    return math.pi if t <= -math.pi else t


@dataclass(frozen=True, eq=False)
class GLTildeElement:
    m: np.ndarray
    theta: float

    def __post_init__(self):
        m = mat2(self.m)
        if not _det(m) > 0:
            raise NonPositiveDeterminant(f"det = {_det(m)!r}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "theta", float(self.theta))
        t0 = _theta0(m)
        off = (self.theta - t0) / TWO_PI
        if abs(off - round(off)) * TWO_PI > 1e-9 * max(1.0, abs(self.theta)):
            raise ValueError(f"theta={self.theta} is not a branch of the angle {t0} of m")

    def __matmul__(self, other: "GLTildeElement") -> "GLTildeElement":
        return mul(self, other)

    def __pow__(self, n: int) -> "GLTildeElement":
        return power(self, n)

    def inverse(self) -> "GLTildeElement":
        return inv(self)

    @property
    def sheet(self) -> int:
        """The integer ``k`` with ``theta = theta0(m) + 2 pi k``."""
        return int(round((self.theta - _theta0(self.m)) / TWO_PI))

    def allclose(self, other: "GLTildeElement", atol: float = 1e-9) -> bool:
        return (np.allclose(self.m, other.m, atol=atol)
                and abs(self.theta - other.theta) <= THETA_TOL)

    def to_json(self) -> dict:
        return {"m": self.m.reshape(-1).tolist(), "theta": self.theta}

    @classmethod
    def from_json(cls, d: dict) -> "GLTildeElement":
        return cls(np.asarray(d["m"], dtype=float).reshape(2, 2), d["theta"])

    def __repr__(self):
        return f"GLTildeElement(m={self.m.tolist()}, theta={self.theta!r})"


def lift(m, k: int = 0) -> GLTildeElement:
    m = mat2(m)
    return GLTildeElement(m, iwasawa(m).theta0 + TWO_PI * k)


IDENTITY = GLTildeElement(E2, 0.0)
TAU = GLTildeElement(-E2, math.pi)


def tau_power(k: int) -> GLTildeElement:
    return GLTildeElement((-1.0) ** (k % 2) * E2 + 0.0, k * math.pi)


def rotation_lift(theta: float) -> GLTildeElement:
    """The element of the lifted rotation group with angle ``theta``."""
    return GLTildeElement(rotation_k(theta), theta)


def _nearest_branch(base: float, target: float) -> float:
    """The representative of ``base`` mod 2 pi in (target - pi, target + pi)."""
    k = round((target - base) / TWO_PI)
    val = base + TWO_PI * k
    gap = abs(val - target)
    if abs(gap - math.pi) < 1e-9:
        raise BranchAmbiguity(
            f"branch representative {val} lies on the boundary around {target}")
    return val


def mul(g: GLTildeElement, h: GLTildeElement) -> GLTildeElement:
    m = g.m @ h.m
    return GLTildeElement(m, _nearest_branch(_theta0(m), g.theta + h.theta))


def inv(g: GLTildeElement) -> GLTildeElement:
    (a, b), (c, d) = g.m.tolist()
    det = a * d - b * c
    m = np.array([[d / det, -b / det], [-c / det, a / det]])
    return GLTildeElement(m, _nearest_branch(_theta0(m), -g.theta))


def power(g: GLTildeElement, n: int) -> GLTildeElement:
    base = g if n >= 0 else inv(g)
    out = IDENTITY
    # repeated multiplication keeps every partial product on the right branch
    for _ in range(abs(n)):
        out = mul(out, base)
    return out


def conj(c: GLTildeElement, g: GLTildeElement) -> GLTildeElement:
    return mul(mul(c, g), inv(c))


def triangularizer(m) -> np.ndarray:
    """A matrix ``c`` with ``det c > 0`` such that ``c m c^-1`` is upper
    triangular.  Requires real eigenvalues."""
    m = mat2(m)
    ec = eig2(m)
    if ec.kind == COMPLEX:
        raise NotTriangularizable("complex eigenvalues")
    if ec.kind == REAL_DIAGONAL:
        return E2.copy()
    lam = ec.values[0] if ec.kind == REAL_JORDAN else ec.values[1]
    # eigenvector for lam, taken from the larger row of m - lam E
    n = m - lam * E2
    row = n[0] if np.abs(n[0]).sum() >= np.abs(n[1]).sum() else n[1]
    v = np.array([-row[1], row[0]])
    v = v / np.linalg.norm(v)
    w = np.array([-v[1], v[0]])
    # columns (v, w) form a positively oriented basis
    P = np.column_stack([v, w])
    return np.linalg.inv(P)


def level(g: GLTildeElement) -> int:
    c = lift(triangularizer(g.m), 0)
    t = conj(c, g)
    k = t.theta / math.pi
    if abs(k - round(k)) * math.pi > THETA_TOL:
        raise BranchAmbiguity(f"conjugated angle {t.theta} is not a multiple of pi")
    return int(round(k))


def level_zero_lift(m) -> GLTildeElement:
    """The lift of level 0 of a matrix with positive real eigenvalues."""
    m = mat2(m)
    if not has_positive_real_spectrum(m):
        raise NotTriangularizable("level-0 lifts need positive real eigenvalues")
    g = lift(m, 0)
    k = level(g)
    return lift(m, -(k // 2))


UNIPOTENT_CLASSES = ("identity", "[[1,1],[0,1]]", "[[1,-1],[0,1]]")


def unipotent_class(g: GLTildeElement) -> str:
    """Conjugacy class of a level-0 lift with unipotent projection: the
    identity or the level-0 lift of one of the two shears."""
    ec = eig2(g.m)
    if ec.kind == COMPLEX or not all(_close(v, 1.0) for v in ec.values):
        raise InvalidParams("projection is not unipotent")
    if level(g) != 0:
        raise InvalidParams("lift has nonzero level")
    if ec.kind == REAL_DIAGONAL:
        return UNIPOTENT_CLASSES[0]
    # rotation_sign of [[1,1],[0,1]] is -1
    return UNIPOTENT_CLASSES[1] if ec.sign < 0 else UNIPOTENT_CLASSES[2]


EXPANSION = "Expansion"
EXPANSION_TIMES_R_PI = "ExpansionTimesRpi"
EXPANDING_SPIRAL = "ExpandingSpiral"
NOT_EXPANDING = "NotExpanding"


def expansion_class(m) -> str:
    m = mat2(m)
    if not _det(m) > 0:
        raise NonPositiveDeterminant(f"det = {_det(m)!r}")
    ec = eig2(m)
    if ec.kind == COMPLEX:
        return EXPANDING_SPIRAL if ec.values[0] > 1.0 else NOT_EXPANDING
    vals = ec.values if ec.kind == REAL_DISTINCT else (ec.values[0], ec.values[0])
    if min(vals) > 1.0:
        return EXPANSION
    if max(vals) < -1.0:
        return EXPANSION_TIMES_R_PI
    return NOT_EXPANDING


def has_positive_real_spectrum(m) -> bool:
    ec = eig2(m)
    return ec.kind != COMPLEX and min(ec.values) > 0


def has_nonzero_rotation(g: GLTildeElement) -> bool:
    if has_positive_real_spectrum(g.m):
        return level(g) != 0
    return True


GLPLUS = "glplus"
GLTILDE = "gltilde"
PGL = "pgl"
GROUPS = (GLPLUS, GLTILDE, PGL)


def _check_band(m: np.ndarray) -> None:
    rd = abs(relative_discriminant(m))
    if CLASS_TOL <= rd < DEGENERATE_BAND:
        raise Degenerate(f"relative discriminant {rd:.3e} inside the tolerance band")
    if rd < CLASS_TOL:
        lam = (m[0, 0] + m[1, 1]) / 2.0
        off = float(np.abs(m - lam * E2).max()) / max(1.0, abs(lam))
        if math.sqrt(CLASS_TOL) < off < 10 * math.sqrt(CLASS_TOL):
            raise Degenerate(f"off-scalar part {off:.3e} inside the tolerance band")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= CLASS_TOL * max(1.0, abs(a), abs(b))


def _same_class(e1: EigenClass2, e2: EigenClass2, oriented: bool) -> bool:
    if e1.kind != e2.kind:
        return False
    if e1.kind == REAL_DISTINCT:
        return all(_close(a, b) for a, b in zip(e1.values, e2.values))
    if e1.kind == REAL_DIAGONAL:
        return _close(e1.values[0], e2.values[0])
    if e1.kind == REAL_JORDAN:
        same = _close(e1.values[0], e2.values[0])
        return same and (not oriented or e1.sign == e2.sign)
    r1, a1 = e1.values
    r2, a2 = e2.values
    same = _close(r1, r2) and abs(a1 - a2) <= CLASS_TOL * max(1.0, a1)
    return same and (not oriented or e1.sign == e2.sign)


def conjugate_glplus(m1, m2) -> bool:
    m1, m2 = mat2(m1), mat2(m2)
    _check_band(m1)
    _check_band(m2)
    return _same_class(eig2(m1), eig2(m2), oriented=True)


def conjugate_gl(m1, m2) -> bool:
    m1, m2 = mat2(m1), mat2(m2)
    _check_band(m1)
    _check_band(m2)
    return _same_class(eig2(m1), eig2(m2), oriented=False)


def glplus_conjugator(m1, m2) -> np.ndarray | None:
    """A matrix ``c`` with ``det c > 0`` and ``c m1 c^-1 = m2``, or ``None``."""
    return find_conjugator([mat2(m1)], [mat2(m2)], kind="glplus")


def conjugate_in(g, h, group: str = GLPLUS) -> bool:
    """Conjugacy of two elements in GL+(2,R), its universal cover, or PGL(2,R).

    For ``gltilde`` both arguments are :class:`GLTildeElement`; otherwise
    matrices (lifts are projected).
    """
    group = group.lower()
    if group == GLTILDE:
        if not isinstance(g, GLTildeElement) or not isinstance(h, GLTildeElement):
            raise TypeError("gltilde conjugacy needs two lifts")
        if not conjugate_glplus(g.m, h.m):
            return False
        c = glplus_conjugator(g.m, h.m)
        if c is None:
            raise Degenerate("spectral classes agree but no conjugator was found")
        moved = conj(lift(c, 0), g)
        return abs(moved.theta - h.theta) <= THETA_TOL
    mg = g.m if isinstance(g, GLTildeElement) else mat2(g)
    mh = h.m if isinstance(h, GLTildeElement) else mat2(h)
    if group == GLPLUS:
        return conjugate_glplus(mg, mh)
    if group == PGL:
        return conjugate_gl(mg, mh) or conjugate_gl(mg, -mh)
    raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}")
