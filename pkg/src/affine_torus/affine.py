"""Small exact primitives on the affine plane.

Matrices are plain ``numpy`` arrays of shape (2, 2); points and vectors are
arrays of shape (2,).  :class:`AffineMap2` is the holonomy currency used by
every other module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

REAL_DISTINCT = "real_distinct"
REAL_DIAGONAL = "real_diagonal"
REAL_JORDAN = "real_jordan"
COMPLEX = "complex"

# |disc| below this fraction of max(1, tr^2) counts as a repeated eigenvalue
DISC_TOL = 1e-9
# smallest singular value below which phi(L) is evaluated by series
PHI_SINGULAR_TOL = 1e-6

E2 = np.eye(2)


def mat2(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.shape == (4,):
        a = a.reshape(2, 2)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    # a non-finite sum is rare, so only then look at the entries
    (p, q), (r, t) = a.tolist()
    if not math.isfinite(p + q + r + t) and not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def vec2(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (2,):
        raise ValueError(f"expected a vector in R^2, got shape {a.shape}")
    return a


def rotation_k(theta: float) -> np.ndarray:
    """The rotation factor ``[[cos t, sin t], [-sin t, cos t]]`` of the Iwasawa
    decomposition (clockwise for positive ``theta``)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotation_ccw(phi: float) -> np.ndarray:
    """Counter-clockwise rotation by ``phi``; equals ``rotation_k(-phi)``."""
    return rotation_k(-phi)


def discriminant(m) -> float:
    m = mat2(m)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return tr * tr - 4.0 * det


def relative_discriminant(m) -> float:
    m = mat2(m)
    tr = m[0, 0] + m[1, 1]
    return discriminant(m) / max(1.0, tr * tr)


def rotation_sign(m) -> int:
    """Sign of ``m21 - m12``.

    For complex spectrum this is the sense of rotation of ``m``; for a
    Jordan block ``lambda*E + N`` it is the sign of the form
    ``x -> det[x, N x]``.  Both are invariant under conjugation by matrices of
    positive determinant and flip under negative determinant.
    """
    m = mat2(m)
    d = m[1, 0] - m[0, 1]
    scale = max(1.0, float(np.abs(m).max()))
    if abs(d) <= DISC_TOL * scale:
        return 0
    return 1 if d > 0 else -1


@dataclass(frozen=True)
class EigenClass2:
    """Spectral class of a real 2x2 matrix.

    ``values`` holds ``(l1, l2)`` with ``l1 <= l2`` for distinct real
    eigenvalues, ``(l,)`` for a repeated one, and ``(r, alpha)`` with
    ``alpha`` in (0, pi) for a complex pair ``r exp(+-i alpha)``.
    ``sign`` is :func:`rotation_sign` for the complex and Jordan cases.
    """

    kind: str
    values: tuple
    sign: int = 0

    @property
    def is_real(self) -> bool:
        return self.kind != COMPLEX


def eig2(m) -> EigenClass2:
    m = mat2(m)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    if abs(disc) < DISC_TOL * max(1.0, tr * tr):
        lam = tr / 2.0
        off = m - lam * E2
        scale = max(1.0, abs(lam))
        if np.abs(off).max() <= math.sqrt(DISC_TOL) * scale:
            return EigenClass2(REAL_DIAGONAL, (lam,))
        return EigenClass2(REAL_JORDAN, (lam,), rotation_sign(m))
    if disc > 0:
        root = math.sqrt(disc)
        # avoid cancellation in the smaller-magnitude root
        big = (tr + math.copysign(root, tr)) / 2.0
        small = det / big if big != 0.0 else (tr - root) / 2.0
        l1, l2 = sorted((big, small))
        return EigenClass2(REAL_DISTINCT, (l1, l2))
    r = math.sqrt(det)
    alpha = math.atan2(math.sqrt(-disc) / 2.0, tr / 2.0)
    return EigenClass2(COMPLEX, (r, alpha), rotation_sign(m))


def _even_odd_parts(q: float) -> tuple[float, float]:
    """Return ``(C, S)`` with C = cosh(sqrt q), S = sinh(sqrt q)/sqrt q,
    continued analytically through q <= 0."""
    if abs(q) < 1e-8:
        return 1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0
    if q > 0:
        r = math.sqrt(q)
        return math.cosh(r), math.sinh(r) / r
    r = math.sqrt(-q)
    return math.cos(r), math.sin(r) / r


def expm2(L) -> np.ndarray:
    """Closed-form exponential of a 2x2 matrix.

    Writes ``L = s E + M`` with ``M`` traceless, so that ``M^2 = q E`` and
    ``exp L = e^s (C(q) E + S(q) M)``; the same formula covers the real,
    repeated and complex cases, with a Taylor branch around ``q = 0``.
    """
    L = mat2(L)
    s = (L[0, 0] + L[1, 1]) / 2.0
    M = L - s * E2
    q = M[0, 0] * M[0, 0] + M[0, 1] * M[1, 0]
    C, S = _even_odd_parts(q)
    return math.exp(s) * (C * E2 + S * M)


def logm2(m) -> np.ndarray:
    """Real logarithm of a 2x2 matrix with positive real eigenvalues.

    For distinct eigenvalues ``log m = a E + b m`` with ``a + b l_i = log l_i``;
    for a repeated one ``log m = log(l) E + (m - l E) / l``.
    """
    m = mat2(m)
    ec = eig2(m)
    if ec.kind == COMPLEX or min(ec.values) <= 0:
        raise ValueError("logm2 needs positive real eigenvalues")
    if ec.kind == REAL_DISTINCT:
        l1, l2 = ec.values
        # divided difference of log, written to stay accurate for close l1, l2
        b = math.log1p((l2 - l1) / l1) / (l2 - l1)
        a = math.log(l1) - b * l1
        return a * E2 + b * m
    lam = ec.values[0]
    return math.log(lam) * E2 + (m - lam * E2) / lam


def _phi_series(L: np.ndarray) -> np.ndarray:
    # scaling and doubling: phi(2L) = phi(L) (exp(L) + E) / 2
    norm = float(np.abs(L).sum(axis=1).max())
    halvings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = L / (2.0 ** halvings)
    term = E2.copy()
    total = E2.copy()
    for k in range(1, 25):
        term = term @ X / (k + 1)
        total = total + term
        if np.abs(term).max() < 1e-18:
            break
    for _ in range(halvings):
        total = total @ (expm2(X) + E2) / 2.0
        X = 2.0 * X
    return total


def phi(L) -> np.ndarray:
    """``sum_k L^k / (k+1)!``, i.e. ``(exp L - E) L^{-1}`` when ``L`` is invertible."""
    L = mat2(L)
    smin = np.linalg.svd(L, compute_uv=False)[-1]
    if smin > PHI_SINGULAR_TOL:
        return np.linalg.solve(L.T, (expm2(L) - E2).T).T
    return _phi_series(L)


@dataclass(frozen=True, eq=False)
class AffineMap2:
    """The affine map ``x -> linear @ x + translation``."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "linear", mat2(self.linear))
        object.__setattr__(self, "translation", vec2(self.translation))

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(E2, np.zeros(2))

    @classmethod
    def translate(cls, t) -> "AffineMap2":
        return cls(E2, t)

    @classmethod
    def linear_map(cls, m) -> "AffineMap2":
        return cls(m, np.zeros(2))

    @classmethod
    def from_matrix(cls, H) -> "AffineMap2":
        H = np.asarray(H, dtype=float)
        return cls(H[:2, :2], H[:2, 2])

    def as_matrix(self) -> np.ndarray:
        H = np.eye(3)
        H[:2, :2] = self.linear
        H[:2, 2] = self.translation
        return H

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation

    def __matmul__(self, other: "AffineMap2") -> "AffineMap2":
        return AffineMap2(self.linear @ other.linear,
                          self.linear @ other.translation + self.translation)

    def inverse(self) -> "AffineMap2":
        Li = np.linalg.inv(self.linear)
        return AffineMap2(Li, -Li @ self.translation)

    def __pow__(self, n: int) -> "AffineMap2":
        base = self if n >= 0 else self.inverse()
        out = AffineMap2.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def commutator(self, other: "AffineMap2") -> "AffineMap2":
        return self @ other @ self.inverse() @ other.inverse()

    def distance(self, other: "AffineMap2") -> float:
        return float(np.linalg.norm(self.as_matrix() - other.as_matrix()))

    def allclose(self, other: "AffineMap2", atol: float = 1e-9) -> bool:
        return self.distance(other) <= atol

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def to_json(self) -> dict:
        return {"l": self.linear.reshape(-1).tolist(), "t": self.translation.tolist()}

    @classmethod
    def from_json(cls, d: dict) -> "AffineMap2":
        return cls(np.asarray(d["l"], dtype=float).reshape(2, 2), d["t"])

    def __repr__(self):
        return f"AffineMap2(linear={self.linear.tolist()}, translation={self.translation.tolist()})"


def exp_affine(L, v) -> AffineMap2:
    """Exponential of ``[[L, v], [0, 0]]`` in the affine group."""
    L = mat2(L)
    v = vec2(v)
    return AffineMap2(expm2(L), phi(L) @ v)
