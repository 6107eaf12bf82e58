"""Quadrilateral fundamental domains and their side pairings.

A datum is the quadrilateral ``(0,0), (1,0), p, (0,1)`` with affine maps
``A`` (bottom side to top side) and ``B`` (left side to right side).  When
the pairing conditions hold, ``<A, B>`` acts properly on the union of the
tiles ``A^m B^n P`` and the quotient is a flat affine torus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .affine import AffineMap2, mat2, vec2
from .errors import EmptyTiling, InvalidGluing, NonCommuting, NotEmbeddable
from .etale import HolonomyPair

GLUING_TOL = 1e-9
DEFAULT_VIEWPORT = (-5.0, 5.0, -5.0, 5.0)

ORIGIN = np.array([0.0, 0.0])
E1 = np.array([1.0, 0.0])
E2V = np.array([0.0, 1.0])


@dataclass(frozen=True, eq=False)
class GluingDatum:
    p: np.ndarray
    A: AffineMap2
    B: AffineMap2
    # affine map from the original coordinates to the normalised frame,
    # recorded when the datum was built from a holonomy pair
    frame: AffineMap2 | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", vec2(self.p))

    @property
    def vertices(self) -> np.ndarray:
        return np.array([ORIGIN, E1, self.p, E2V])

    def to_json(self) -> dict:
        return {"p": self.p.tolist(), "A": self.A.to_json(), "B": self.B.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "GluingDatum":
        return cls(d["p"], AffineMap2.from_json(d["A"]), AffineMap2.from_json(d["B"]))


@dataclass(frozen=True)
class Diagnostic:
    condition: str
    residual: float
    message: str


@dataclass(frozen=True)
class GluingReport:
    valid: bool
    diagnostics: list = field(default_factory=list)

    def violated(self) -> list[str]:
        return [d.condition for d in self.diagnostics]

    def to_json(self) -> dict:
        return {"valid": self.valid,
                "diagnostics": [{"condition": d.condition, "residual": d.residual,
                                 "message": d.message} for d in self.diagnostics]}


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def signed_area(poly) -> float:
    poly = np.asarray(poly, dtype=float)
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def convexity_margins(poly) -> np.ndarray:
    """Cross products of consecutive edges; all positive iff the polygon is
    strictly convex and counter-clockwise."""
    poly = np.asarray(poly, dtype=float)
    edges = np.roll(poly, -1, axis=0) - poly
    return np.array([_cross(edges[i], edges[(i + 1) % len(poly)])
                     for i in range(len(poly))])


def verify_gluing(d: GluingDatum, tol: float = GLUING_TOL) -> GluingReport:
    diags = []
    scale = max(1.0, float(np.abs(d.p).max()))

    def point(name, got, want):
        res = float(np.linalg.norm(got - want))
        if res > tol * scale:
            diags.append(Diagnostic(name, res, f"{name} violated by {res:.3e}"))

    point("A(0,0)=(1,0)", d.A(ORIGIN), E1)
    point("A(0,1)=p", d.A(E2V), d.p)
    point("B(0,0)=(0,1)", d.B(ORIGIN), E2V)
    point("B(1,0)=p", d.B(E1), d.p)
    for name, g in (("det l(A)>0", d.A), ("det l(B)>0", d.B)):
        if not g.det > 0:
            diags.append(Diagnostic(name, g.det, f"{name} fails: det = {g.det:.6g}"))
    comm = d.A.commutator(d.B).distance(AffineMap2.identity())
    if comm > tol * scale:
        diags.append(Diagnostic("commutator", comm, f"commutator != Id, residual {comm:.3e}"))
    margins = convexity_margins(d.vertices)
    if margins.min() <= tol:
        diags.append(Diagnostic("convexity", float(margins.min()),
                                "quadrilateral is not strictly convex"))
    return GluingReport(not diags, diags)


def normalizing_frame(h: HolonomyPair, q) -> AffineMap2:
    """The affine map taking ``q, h1 q, h2 q`` to ``(0,0), (1,0), (0,1)``."""
    q = vec2(q)
    cols = np.column_stack([h.h1(q) - q, h.h2(q) - q])
    area = float(np.linalg.det(cols))
    if abs(area) <= GLUING_TOL * max(1.0, float(np.abs(cols).max()) ** 2):
        raise NotEmbeddable(f"degenerate triangle q, h1 q, h2 q (area {area:.3e})")
    L = np.linalg.inv(cols)
    return AffineMap2(L, -L @ q)


def polygon_from_holonomy(h: HolonomyPair, q=(0.0, 0.0)) -> GluingDatum:
    """The fundamental quadrilateral spanned by the orbit of ``q``."""
    res = h.commutator_residual()
    scale = max(1.0, float(np.abs(h.h1.as_matrix()).max()), float(np.abs(h.h2.as_matrix()).max()))
    if res > GLUING_TOL * scale ** 2:
        raise NonCommuting(f"commutator residual {res:.3e}")
    N = normalizing_frame(h, q)
    Ni = N.inverse()
    A = N @ h.h1 @ Ni
    B = N @ h.h2 @ Ni
    p = N(h.h1(h.h2(vec2(q))))
    d = GluingDatum(p, A, B, N)
    margins = convexity_margins(d.vertices)
    if margins.min() <= GLUING_TOL:
        raise NotEmbeddable(f"quadrilateral not convex (min edge cross {margins.min():.3e})")
    return d


def solve_gluing(linear_a) -> tuple[GluingDatum, float]:
    """Complete a prescribed linear part of ``A`` to a gluing datum.

    With ``l(A)`` fixed, ``A(0,0) = (1,0)`` fixes the translation of ``A`` and
    the remaining unknowns ``p``, the translation of ``B`` and ``l(B)`` enter
    the point conditions and the commutation relation linearly.  Returns the
    minimum-norm least-squares solution and its residual.
    """
    LA = mat2(linear_a)
    tA = E1.copy()
    # unknowns x = (p1, p2, tB1, tB2, b11, b12, b21, b22)
    rows, rhs = [], []

    def add(row, val):
        rows.append(row)
        rhs.append(val)

    # A(0,1) = p
    for i in range(2):
        r = np.zeros(8)
        r[i] = 1.0
        add(r, LA[i, 1] + tA[i])
    # B(0,0) = (0,1)
    for i in range(2):
        r = np.zeros(8)
        r[2 + i] = 1.0
        add(r, E2V[i])
    # B(1,0) = p:  b_i0 + tB_i - p_i = 0
    for i in range(2):
        r = np.zeros(8)
        r[4 + 2 * i] = 1.0
        r[2 + i] = 1.0
        r[i] = -1.0
        add(r, 0.0)
    # LA LB - LB LA = 0
    for i in range(2):
        for j in range(2):
            r = np.zeros(8)
            for k in range(2):
                r[4 + 2 * k + j] += LA[i, k]
                r[4 + 2 * i + k] -= LA[k, j]
            add(r, 0.0)
    # LA tB + tA = LB tA + tB
    for i in range(2):
        r = np.zeros(8)
        for k in range(2):
            r[2 + k] += LA[i, k]
            r[4 + 2 * i + k] -= tA[k]
        r[2 + i] -= 1.0
        add(r, -tA[i])
    M = np.array(rows)
    b = np.array(rhs)
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    residual = float(np.linalg.norm(M @ x - b))
    d = GluingDatum(x[0:2], AffineMap2(LA, tA), AffineMap2(x[4:8].reshape(2, 2), x[2:4]))
    return d, residual


@dataclass(frozen=True)
class Tile:
    word: tuple[int, int]
    polygon: np.ndarray


@dataclass(frozen=True)
class Tiling:
    tiles: list
    viewport: tuple | None = DEFAULT_VIEWPORT

    def __len__(self):
        return len(self.tiles)

    def words(self) -> list[tuple[int, int]]:
        return [t.word for t in self.tiles]

    def to_json(self) -> dict:
        return {"viewport": list(self.viewport) if self.viewport else None,
                "tiles": [{"word": list(t.word), "polygon": t.polygon.tolist()}
                          for t in self.tiles]}


def _bbox_meets(poly: np.ndarray, viewport) -> bool:
    x0, x1, y0, y1 = viewport
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    return not (hi[0] < x0 or lo[0] > x1 or hi[1] < y0 or lo[1] > y1)


def word_map(d: GluingDatum, m: int, n: int) -> AffineMap2:
    Am = np.linalg.matrix_power(d.A.as_matrix() if m >= 0 else d.A.inverse().as_matrix(), abs(m))
    Bn = np.linalg.matrix_power(d.B.as_matrix() if n >= 0 else d.B.inverse().as_matrix(), abs(n))
    return AffineMap2.from_matrix(Am @ Bn)


def tile(d: GluingDatum, radius: int, viewport=DEFAULT_VIEWPORT) -> Tiling:
    """Images ``A^m B^n P`` for ``|m|, |n| <= radius``, ordered by word.

    With a viewport, tiles whose bounding box misses it are dropped; pass
    ``viewport=None`` to keep every word.
    """
    report = verify_gluing(d)
    if not report.valid:
        raise InvalidGluing("; ".join(x.message for x in report.diagnostics))
    if radius < 0:
        raise ValueError("radius must be non-negative")
    P = d.vertices
    tiles = []
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            poly = word_map(d, m, n)(P)
            if viewport is None or _bbox_meets(poly, viewport):
                tiles.append(Tile((m, n), poly))
    if not tiles:
        raise EmptyTiling("no tile meets the viewport")
    return Tiling(tiles, None if viewport is None else tuple(float(v) for v in viewport))
