"""SVG output for tilings, degeneration sequences and torus descriptors.

Documents are byte-deterministic: polygons are sorted by word and all
coordinates are written with a fixed number of decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraProduct, OneParamSubgroup, act, require_cone
from .errors import EmptyTiling, InvalidParams, NotEmbeddable
from .etale import holonomy_of
from .gluing import Tiling, polygon_from_holonomy, tile
from .tori import Hopf, TABk, TransInvariant, as_hopf

DECIMALS = 3
ARC_SEGMENTS = 24


@dataclass(frozen=True)
class RenderOptions:
    viewport: tuple = (-5.0, 5.0, -5.0, 5.0)
    stroke_width: float = 1.0
    # fill colours for words of even and odd parity
    palette: tuple = ("#d7e3f4", "#f6dcb8")
    stroke: str = "#28324a"
    frames: int = 4
    size: int = 480

    def __post_init__(self):
        vp = tuple(float(v) for v in self.viewport)
        if len(vp) != 4 or not all(math.isfinite(v) for v in vp):
            raise InvalidParams("viewport must be four finite numbers (x0, x1, y0, y1)")
        if not (vp[1] > vp[0] and vp[3] > vp[2]):
            raise InvalidParams(f"degenerate viewport {vp}")
        if not self.stroke_width > 0 or self.size <= 0 or self.frames < 1:
            raise InvalidParams("stroke width, size and frame count must be positive")
        if len(self.palette) < 2:
            raise InvalidParams("palette needs two colours")
        object.__setattr__(self, "viewport", vp)

    @property
    def pixel_size(self) -> tuple[int, int]:
        x0, x1, y0, y1 = self.viewport
        return self.size, max(1, round(self.size * (y1 - y0) / (x1 - x0)))


def _num(x: float) -> str:
    s = f"{x:.{DECIMALS}f}"
    return "0" if float(s) == 0 else s.rstrip("0").rstrip(".")


def _to_pixels(pts: np.ndarray, opts: RenderOptions, offset: float = 0.0) -> str:
    x0, x1, y0, y1 = opts.viewport
    w, h = opts.pixel_size
    px = (pts[:, 0] - x0) / (x1 - x0) * w + offset
    py = (y1 - pts[:, 1]) / (y1 - y0) * h
    return " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px, py))


def _panel(polys, opts: RenderOptions, clip_id: str, offset: float = 0.0) -> list[str]:
    w, h = opts.pixel_size
    out = [f'<clipPath id="{clip_id}"><rect x="{_num(offset)}" y="0" '
           f'width="{w}" height="{h}"/></clipPath>',
           f'<g clip-path="url(#{clip_id})" stroke="{opts.stroke}" '
           f'stroke-width="{_num(opts.stroke_width)}" stroke-linejoin="round">']
    for word, pts in sorted(polys, key=lambda wp: wp[0]):
        fill = opts.palette[sum(word) % 2]
        label = ",".join(str(i) for i in word)
        out.append(f'<polygon data-word="{label}" fill="{fill}" '
                   f'points="{_to_pixels(np.asarray(pts, float), opts, offset)}"/>')
    out.append("</g>")
    return out


def _document(body: list[str], width: float, height: float, title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" '
            f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">')
    esc = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return "\n".join([head, f"<title>{esc}</title>",
                      f'<rect width="{_num(width)}" height="{_num(height)}" fill="white"/>',
                      *body, "</svg>", ""])


def svg_polygons(polys, opts: RenderOptions | None = None, title: str = "") -> str:
    """One document from ``(word, vertices)`` pairs."""
    opts = opts or RenderOptions()
    if not polys:
        raise EmptyTiling("nothing to draw")
    w, h = opts.pixel_size
    return _document(_panel(polys, opts, "view"), w, h, title)


def render_tiling(t: Tiling, opts: RenderOptions | None = None, title: str = "tiling") -> str:
    if len(t) == 0:
        raise EmptyTiling("empty tiling")
    return svg_polygons([(tl.word, tl.polygon) for tl in t.tiles], opts, title)


def tiling_of(S: AlgebraProduct, radius: int = 3, viewport=None) -> Tiling:
    """Tiling by the fundamental quadrilateral of the holonomy of ``S``
    through the origin."""
    d = polygon_from_holonomy(holonomy_of(S), (0.0, 0.0))
    return tile(d, radius, viewport)


@dataclass
class FrameSet:
    """Rendered frames ``(t, svg)`` and a record for every skipped ``t``."""

    frames: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.frames)


def degeneration_frames(S: AlgebraProduct, lam: OneParamSubgroup, ts,
                        radius: int = 3, opts: RenderOptions | None = None) -> FrameSet:
    """The tiling of ``act(lam(t), S)`` for each ``t``; frames whose holonomy
    gives no embedded quadrilateral are skipped with a warning."""
    require_cone(S)
    opts = opts or RenderOptions()
    out = FrameSet()
    for t in ts:
        St = act(lam(t), S)
        try:
            tl = tiling_of(St, radius, opts.viewport)
        except (NotEmbeddable, EmptyTiling) as exc:
            out.warnings.append({"t": float(t), "error": type(exc).__name__,
                                 "message": str(exc)})
            continue
        out.frames.append((float(t), render_tiling(tl, opts, f"{lam.name} at t={t:g}")))
    return out


def _polar(s: np.ndarray, th: np.ndarray) -> np.ndarray:
    r = np.exp(s)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def _cell_boundary(corner, e1, e2, n: int = ARC_SEGMENTS) -> np.ndarray:
    """Boundary of a parallelogram in log-polar coordinates, finely sampled."""
    u = np.linspace(0.0, 1.0, n, endpoint=False)
    c = np.asarray(corner, float)
    e1, e2 = np.asarray(e1, float), np.asarray(e2, float)
    sides = [c + np.outer(u, e1), c + e1 + np.outer(u, e2),
             c + e1 + e2 - np.outer(u, e1), c + e2 - np.outer(u, e2)]
    return np.vstack(sides)


def hopf_polygons(d: Hopf, radius: int = 3) -> list:
    """Images of the fundamental cell of the lattice ``Z (log l_i, k_i pi)``
    under ``(s, theta) -> e^s (cos theta, sin theta)``."""
    e1 = np.array([math.log(d.lambda1), d.k1 * math.pi])
    e2 = np.array([math.log(d.lambda2), d.k2 * math.pi])
    out = []
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            b = _cell_boundary(m * e1 + n * e2, e1, e2)
            out.append(((m, n), _polar(b[:, 0], b[:, 1])))
    return out


def render_hopf(d: Hopf, opts: RenderOptions | None = None, radius: int = 3) -> str:
    return svg_polygons(hopf_polygons(d, radius), opts,
                        f"Hopf torus lambda=({d.lambda1:g},{d.lambda2:g}) k=({d.k1},{d.k2})")


def brick_polygons(d: TABk, index: int, radius: int = 3) -> list:
    """Tiles ``A^j F`` of one brick, where ``F`` lies between the unit half
    circle over the brick's strip and its image under ``A``."""
    A = d.A_normal
    sign = 1.0 if index % 2 == 0 else -1.0
    th = np.linspace(0.0, math.pi, ARC_SEGMENTS + 1)
    arc = sign * np.column_stack([np.cos(th), np.sin(th)])
    F = np.vstack([arc, (A @ arc.T).T[::-1]])
    out = []
    for j in range(-radius, radius + 1):
        Aj = np.linalg.matrix_power(A if j >= 0 else np.linalg.inv(A), abs(j))
        out.append(((index, j), (Aj @ F.T).T))
    return out


def render_bricks(d: TABk, opts: RenderOptions | None = None, radius: int = 3) -> str:
    """One panel per brick, left to right in the order they are glued."""
    opts = opts or RenderOptions()
    w, h = opts.pixel_size
    gap = 12
    body = []
    n = abs(d.k)
    for i in range(n):
        body += _panel(brick_polygons(d, i, radius), opts, f"brick{i}", i * (w + gap))
    return _document(body, n * w + (n - 1) * gap, h, f"T_(A,B,{d.k}) bricks")


def render_structure(d, opts: RenderOptions | None = None, radius: int = 3) -> str:
    if isinstance(d, TransInvariant):
        opts = opts or RenderOptions()
        return render_tiling(tiling_of(d.S, radius, opts.viewport), opts, "translation-invariant torus")
    if isinstance(d, Hopf):
        return render_hopf(d, opts, radius)
    if isinstance(d, TABk):
        if d.is_dilation_pair:
            return render_hopf(as_hopf(d), opts, radius)
        return render_bricks(d, opts, radius)
    raise InvalidParams(f"cannot render {d!r}")
