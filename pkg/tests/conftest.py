import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def finite(lo=-3.0, hi=3.0):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


def matrices(lo=-3.0, hi=3.0):
    return st.lists(finite(lo, hi), min_size=4, max_size=4).map(
        lambda xs: np.array(xs, dtype=float).reshape(2, 2))


def positive_det_matrices(max_cond=1e3):
    """det > 0 matrices with bounded condition number."""

    def build(args):
        a, s, b, c = args
        u = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
        v = np.array([[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]])
        return c * u @ np.diag([s, 1.0 / s]) @ v

    return st.tuples(finite(-np.pi, np.pi), st.floats(1.0, np.sqrt(max_cond)),
                     finite(-np.pi, np.pi), st.floats(0.2, 3.0)).map(build)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_invertible(rng, max_cond=1e3, positive=True):
    while True:
        g = rng.normal(size=(2, 2))
        if np.linalg.cond(g) <= max_cond:
            if positive and np.linalg.det(g) < 0:
                g[:, 0] *= -1
            return g


def _shoelace(poly) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def convex_overlap(p, q) -> float:
    """Area of the intersection of two counter-clockwise convex polygons by
    Sutherland-Hodgman clipping of ``p`` against the edges of ``q``."""
    out = [np.asarray(v, float) for v in p]
    q = np.asarray(q, float)
    for i in range(len(q)):
        a, b = q[i], q[(i + 1) % len(q)]
        e = b - a

        def side(v):
            return e[0] * (v[1] - a[1]) - e[1] * (v[0] - a[0])

        pts, out = out, []
        for j in range(len(pts)):
            cur, nxt = pts[j], pts[(j + 1) % len(pts)]
            sc, sn = side(cur), side(nxt)
            if sc >= 0:
                out.append(cur)
            if (sc >= 0) != (sn >= 0):
                out.append(cur + (nxt - cur) * (sc / (sc - sn)))
        if len(out) < 3:
            return 0.0
    return max(0.0, _shoelace(np.array(out)))


def max_tile_overlap(tiling) -> float:
    """Largest pairwise overlap among the tiles; shapely's tree only picks
    the candidate pairs, the areas come from convex clipping."""
    import shapely
    from shapely.geometry import Polygon

    polys = [t.polygon for t in tiling.tiles]
    tree = shapely.STRtree([Polygon(x) for x in polys])
    worst = 0.0
    for i, j in zip(*tree.query([Polygon(x) for x in polys], predicate="intersects")):
        if i < j:
            worst = max(worst, convex_overlap(polys[i], polys[j]))
    return worst


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
