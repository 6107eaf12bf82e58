"""Commutative associative products on R^2.

A product ``S`` is stored by its values on basis pairs
``c11 = S(e1, e1)``, ``c12 = S(e1, e2) = S(e2, e1)``, ``c22 = S(e2, e2)``.
Associative products form a four-dimensional quadratic cone; each one is a
translation-invariant flat torsion-free connection on the torus, and the
GL(2, R)-orbits on the cone are the six strata T, D, C1, C2, B, A.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .affine import E2, expm2, mat2, vec2
from .errors import DegenerateRank, NotInCone, SingularMatrix

T, D, C1, C2, B, A = "T", "D", "C1", "C2", "B", "A"
STRATA = (T, D, C1, C2, B, A)

# membership: residual below CONE_TOL * max(1, |S|)^2
CONE_TOL = 1e-9
COMPLETE_TOL = 1e-9
ZERO_TOL = 1e-12
# unit-element residual: below UNIT_TOL unital, above NON_UNIT_TOL not
UNIT_TOL = 1e-6
NON_UNIT_TOL = 0.5
# normalised invariants closer to zero than SHAPE_TOL count as zero;
# values in (SHAPE_TOL, SHAPE_BAND) are undecidable
SHAPE_TOL = 1e-9
SHAPE_BAND = 1e-8

# edges of the degeneration graph
DEGENERATION_EDGES = (
    (A, C1), (C1, D), (D, T), (B, C2), (C2, T), (B, C1),
)


@dataclass(frozen=True, eq=False)
class AlgebraProduct:
    c11: np.ndarray
    c12: np.ndarray
    c22: np.ndarray

    def __post_init__(self):
        for name in ("c11", "c12", "c22"):
            object.__setattr__(self, name, vec2(getattr(self, name)))

    @classmethod
    def zero(cls) -> "AlgebraProduct":
        return cls(np.zeros(2), np.zeros(2), np.zeros(2))

    @classmethod
    def from_tensor(cls, Tn) -> "AlgebraProduct":
        """From ``Tn[k, i, j]``, the e_k-coefficient of S(e_i, e_j); symmetrised."""
        Tn = np.asarray(Tn, dtype=float)
        Tn = 0.5 * (Tn + Tn.transpose(0, 2, 1))
        return cls(Tn[:, 0, 0], Tn[:, 0, 1], Tn[:, 1, 1])

    def tensor(self) -> np.ndarray:
        Tn = np.empty((2, 2, 2))
        Tn[:, 0, 0] = self.c11
        Tn[:, 0, 1] = Tn[:, 1, 0] = self.c12
        Tn[:, 1, 1] = self.c22
        return Tn

    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.c11, self.c12, self.c22])

    @classmethod
    def from_coefficients(cls, c) -> "AlgebraProduct":
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.shape != (6,):
            raise ValueError("expected six coefficients [c11x,c11y,c12x,c12y,c22x,c22y]")
        return cls(c[0:2], c[2:4], c[4:6])

    def to_json(self) -> list:
        return self.coefficients().tolist()

    @classmethod
    def from_json(cls, data) -> "AlgebraProduct":
        return cls.from_coefficients(data)

    def __call__(self, u, v) -> np.ndarray:
        return np.einsum("kij,...i,...j->...k", self.tensor(), np.asarray(u, float),
                         np.asarray(v, float))

    def left(self, u) -> np.ndarray:
        """Matrix of ``v -> S(u, v)``."""
        return np.einsum("kij,i->kj", self.tensor(), vec2(u))

    def norm(self) -> float:
        return float(np.abs(self.coefficients()).max())

    def __add__(self, other: "AlgebraProduct") -> "AlgebraProduct":
        return AlgebraProduct.from_coefficients(self.coefficients() + other.coefficients())

    def __sub__(self, other: "AlgebraProduct") -> "AlgebraProduct":
        return AlgebraProduct.from_coefficients(self.coefficients() - other.coefficients())

    def __mul__(self, s: float) -> "AlgebraProduct":
        return AlgebraProduct.from_coefficients(float(s) * self.coefficients())

    __rmul__ = __mul__

    def distance(self, other: "AlgebraProduct") -> float:
        return float(np.abs(self.coefficients() - other.coefficients()).max())

    def __repr__(self):
        return (f"AlgebraProduct(c11={self.c11.tolist()}, c12={self.c12.tolist()}, "
                f"c22={self.c22.tolist()})")


def associativity_residual(S: AlgebraProduct) -> float:
    basis = np.eye(2)
    worst = 0.0
    for i, j, k in itertools.product(range(2), repeat=3):
        u, v, w = basis[i], basis[j], basis[k]
        lhs = S(S(u, v), w)
        rhs = S(u, S(v, w))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def in_cone(S: AlgebraProduct, tol: float = CONE_TOL) -> bool:
    return associativity_residual(S) < tol * max(1.0, S.norm()) ** 2


def require_cone(S: AlgebraProduct) -> None:
    res = associativity_residual(S)
    if not res < CONE_TOL * max(1.0, S.norm()) ** 2:
        raise NotInCone(f"associativity residual {res:.3e}")


def is_complete(S: AlgebraProduct) -> bool:
    require_cone(S)
    tol = COMPLETE_TOL * max(1.0, S.norm())
    return all(abs(np.trace(S.left(e))) < tol for e in np.eye(2))


@dataclass(frozen=True)
class StructureInvariants:
    """The data behind :func:`classify_algebra`.

    ``rank`` is the dimension of the product image; ``unit`` a unit element
    when it exists; the three booleans are the existence of a nonzero
    idempotent, a nonzero nilpotent (x.x = 0) and zero divisors.
    """

    rank: int
    unit: np.ndarray | None
    has_idempotent: bool
    has_nilpotent: bool
    has_zero_divisors: bool


def _left_space(S: AlgebraProduct):
    L1, L2 = S.left([1.0, 0.0]), S.left([0.0, 1.0])
    return L1, L2


def invariants(S: AlgebraProduct) -> StructureInvariants:
    """Structural invariants of a cone point.

    The left multiplications ``L_x`` span a space ``W`` that moves by
    conjugation under the GL action, so the tests below read ``W`` rather
    than raw coefficients:

    * ``W = 0`` for the zero product;
    * ``E in W`` exactly for unital products, which are the products of rank 2;
      then ``W = span(E, M)`` with ``M`` traceless, ``M^2 = q E``, and the sign of
      ``q`` separates fields (q < 0), split algebras (q > 0) and dual numbers;
    * otherwise every ``L_x`` has rank <= 1 and a nonzero idempotent exists
      iff ``W`` contains an element of nonzero trace.
    """
    scale = S.norm()
    if scale <= ZERO_TOL:
        return StructureInvariants(0, None, False, True, True)
    L1, L2 = _left_space(S)
    Wm = np.column_stack([L1.reshape(-1), L2.reshape(-1)])
    coef, *_ = np.linalg.lstsq(Wm, E2.reshape(-1), rcond=None)
    resid = float(np.linalg.norm(Wm @ coef - E2.reshape(-1)))
    if resid < UNIT_TOL:
        # traceless part of the best-conditioned direction orthogonal to E
        U, s, Vt = np.linalg.svd(Wm, full_matrices=False)
        cands = [U[:, 0].reshape(2, 2), U[:, 1].reshape(2, 2)]
        Ms = [c - 0.5 * np.trace(c) * E2 for c in cands]
        M = max(Ms, key=lambda m: np.linalg.norm(m))
        M = M / np.linalg.norm(M)
        q = -float(np.linalg.det(M))
        if SHAPE_TOL <= abs(q) < SHAPE_BAND:
            raise DegenerateRank(f"shape invariant {q:.3e} inside tolerance band")
        nil = abs(q) < SHAPE_TOL
        return StructureInvariants(2, coef.copy(), True, nil, nil or q > 0)
    if resid < NON_UNIT_TOL:
        raise DegenerateRank(f"unit residual {resid:.3e} inside tolerance band")
    U, s, Vt = np.linalg.svd(Wm, full_matrices=False)
    L = U[:, 0].reshape(2, 2)
    tr = float(np.trace(L))
    if SHAPE_TOL <= abs(tr) < SHAPE_BAND:
        raise DegenerateRank(f"trace invariant {tr:.3e} inside tolerance band")
    idem = abs(tr) >= SHAPE_BAND
    return StructureInvariants(1, None, idem, not idem, True)


def classify_algebra(S: AlgebraProduct) -> str:
    require_cone(S)
    inv_ = invariants(S)
    if inv_.rank == 0:
        return T
    if inv_.rank == 1:
        return C2 if inv_.has_idempotent else D
    if inv_.has_nilpotent:
        return C1
    if inv_.has_zero_divisors:
        return B
    return A


def model_product(stratum: str) -> AlgebraProduct:
    """Normal form of each stratum; the derivative at the identity of the
    corresponding étale group in its base-point normalisation."""
    z = [0.0, 0.0]
    e1, e2 = [1.0, 0.0], [0.0, 1.0]
    table = {
        T: (z, z, z),
        D: (z, z, e1),
        C2: (z, z, e2),
        C1: (z, e1, e2),
        B: (e1, z, e2),
        A: (e1, e2, [-1.0, 0.0]),
    }
    if stratum not in table:
        raise ValueError(f"unknown stratum {stratum!r}")
    return AlgebraProduct(*table[stratum])


def act(g, S: AlgebraProduct) -> AlgebraProduct:
    """``(g.S)(u, v) = g S(g^-1 u, g^-1 v)``."""
    g = mat2(g)
    if abs(np.linalg.det(g)) <= 1e-300 or np.linalg.cond(g) > 1e14:
        raise SingularMatrix("act needs an invertible matrix")
    gi = np.linalg.inv(g)
    return AlgebraProduct.from_tensor(np.einsum("ka,abc,bi,cj->kij", g, S.tensor(), gi, gi))


@dataclass(frozen=True, eq=False)
class OneParamSubgroup:
    """``t -> exp(log(t) X)`` for ``t > 0``."""

    generator: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generator", mat2(self.generator))

    def __call__(self, t: float) -> np.ndarray:
        if not t > 0:
            raise ValueError("one-parameter subgroups are evaluated at t > 0")
        return expm2(math.log(t) * self.generator)

    @classmethod
    def diagonal(cls, a: float, b: float) -> "OneParamSubgroup":
        return cls(np.diag([float(a), float(b)]), _diag_name(a, b))


def _power_name(p: float) -> str:
    if p == 0:
        return "1"
    if p == 1:
        return "t"
    return f"t^{p:g}"


def _diag_name(a: float, b: float) -> str:
    if a == b == 1:
        return "t*E"
    return f"diag({_power_name(a)},{_power_name(b)})"


_ENTRY = r"\s*(1|t(?:\s*\^\s*(-?[0-9.]+))?)\s*"


def parse_subgroup(text: str) -> OneParamSubgroup:
    """Parse ``t*E``, ``diag(t,1)``, ``diag(t^2,t)`` and the like."""
    s = text.strip().replace(" ", "")
    if s in ("t*E", "tE", "t*E2", "t", "t*I"):
        return OneParamSubgroup.diagonal(1, 1)
    m = re.fullmatch(r"diag\(" + _ENTRY + "," + _ENTRY + r"\)", s)
    if not m:
        raise ValueError(f"cannot parse one-parameter subgroup {text!r}")

    def power(tok, exp):
        if tok == "1":
            return 0.0
        return float(exp) if exp is not None else 1.0

    return OneParamSubgroup.diagonal(power(m.group(1), m.group(2)),
                                     power(m.group(3), m.group(4)))


@dataclass(frozen=True)
class Divergent:
    """Returned by :func:`degenerate` when the orbit curve has no limit."""

    last: AlgebraProduct
    growth: float


DEGENERATION_TS = tuple(10.0 ** k for k in range(1, 7))
CAUCHY_TOL = 1e-6


def _aitken(x0: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    d1 = x1 - x0
    d2 = x2 - x1
    denom = d2 - d1
    out = x2.copy()
    ok = np.abs(denom) > 1e-300
    out[ok] = x2[ok] - d2[ok] ** 2 / denom[ok]
    return out


def degenerate(S: AlgebraProduct, lam: OneParamSubgroup,
               ts=DEGENERATION_TS) -> AlgebraProduct | Divergent:
    """Limit of ``act(lam(t), S)`` as ``t -> infinity``.

    The orbit is sampled on ``ts``; each coefficient sequence is accelerated
    with Aitken's delta-squared process on the last two windows of three
    samples, and the two extrapolates must agree within ``CAUCHY_TOL``.
    """
    require_cone(S)
    scale = max(1.0, S.norm())
    vals = np.array([act(lam(t), S).coefficients() for t in ts])
    last = AlgebraProduct.from_coefficients(vals[-1])
    growth = float(np.abs(vals[-1]).max() / max(np.abs(vals[-2]).max(), 1e-300))
    if np.abs(vals[-1]).max() > 1e3 * scale and growth > 1.0 + 1e-9:
        return Divergent(last, growth)
    # Aitken sends every geometric sequence to 0, growing ones included, so
    # a coefficient whose steps are above tolerance and not shrinking diverges
    d1 = np.abs(vals[-2] - vals[-3]) if len(ts) >= 3 else np.zeros(6)
    d2 = np.abs(vals[-1] - vals[-2])
    if np.any((d2 > CAUCHY_TOL * scale) & (d2 >= d1)):
        return Divergent(last, growth)
    if len(ts) < 4:
        lim = vals[-1]
        prev = vals[-2]
    else:
        lim = _aitken(vals[-3], vals[-2], vals[-1])
        prev = _aitken(vals[-4], vals[-3], vals[-2])
    if np.abs(lim - prev).max() > CAUCHY_TOL * scale:
        return Divergent(last, growth)
    lim = np.where(np.abs(lim) < CONE_TOL * scale, 0.0, lim)
    return AlgebraProduct.from_coefficients(lim)


def degeneration_library() -> list[tuple[str, str, AlgebraProduct, OneParamSubgroup]]:
    """One explicit curve per edge of the degeneration graph.

    Each entry is ``(source, target, S, lam)`` with ``S`` in the source
    stratum and ``act(lam(t), S)`` converging into the target stratum.  The
    products for C1 -> D and B -> C1 are written in bases adapted to the
    weights of ``lam``.
    """
    c1_adapted = AlgebraProduct([0.0, 0.0], [1.0, 0.0], [1.0, 1.0])
    b_adapted = AlgebraProduct([0.0, 1.0], [1.0, 0.0], [0.0, 1.0])
    scalar = OneParamSubgroup.diagonal(1, 1)
    return [
        (A, C1, model_product(A), OneParamSubgroup.diagonal(0, 1)),
        (C1, D, c1_adapted, OneParamSubgroup.diagonal(2, 1)),
        (D, T, model_product(D), scalar),
        (B, C2, model_product(B), OneParamSubgroup.diagonal(1, 0)),
        (C2, T, model_product(C2), scalar),
        (B, C1, b_adapted, OneParamSubgroup.diagonal(1, 0)),
    ]
