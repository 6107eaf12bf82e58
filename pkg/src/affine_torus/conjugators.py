"""Simultaneous conjugators by null-space computation.

``C g_i = h_i C`` is linear in the entries of ``C``; the conjugators form the
invertible part of a null space.  For 2x2 matrices the determinant restricted
to that space is a quadratic form, so the existence of a conjugator with a
prescribed determinant sign is read off from its eigenvalues.  Affine maps
are handled as 3x3 matrices whose conjugator must keep the last row
``(0, 0, 1)`` up to scale.
"""

from __future__ import annotations

import numpy as np

NULL_TOL = 1e-9
DET_TOL = 1e-8

KINDS = ("gl", "glplus", "aff", "affplus")


def _null_basis(gs, hs, affine: bool):
    n = 3 if affine else 2
    eye = np.eye(n)
    rows = []
    scale = 1.0
    for g, h in zip(gs, hs):
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        scale = max(scale, float(np.abs(g).max()), float(np.abs(h).max()))
        # row-major vec: vec(C g) = (I kron g^T) vec C, vec(h C) = (h kron I) vec C
        rows.append(np.kron(eye, g.T) - np.kron(h, eye))
    if affine:
        sel = np.zeros((2, n * n))
        sel[0, 6] = sel[1, 7] = scale
        rows.append(sel)
    M = np.vstack(rows)
    _, s, vt = np.linalg.svd(M)
    s_full = np.concatenate([s, np.zeros(vt.shape[0] - s.size)])
    keep = s_full <= NULL_TOL * scale
    return [v.reshape(n, n) for v in vt[keep]], s_full


def _det_form(basis, block: slice) -> np.ndarray:
    k = len(basis)
    Q = np.zeros((k, k))
    dets = [np.linalg.det(b[block, block]) for b in basis]
    for i in range(k):
        Q[i, i] = dets[i]
        for j in range(i + 1, k):
            Q[i, j] = Q[j, i] = 0.5 * (np.linalg.det((basis[i] + basis[j])[block, block])
                                       - dets[i] - dets[j])
    return Q


def find_conjugator(gs, hs, kind: str = "glplus") -> np.ndarray | None:
    """Return ``C`` with ``C g_i C^-1 = h_i`` for all ``i`` or ``None``.

    ``kind`` selects the group: ``gl``/``glplus`` for 2x2 matrices (any or
    positive determinant), ``aff``/``affplus`` for 3x3 affine matrices.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    affine = kind.startswith("aff")
    positive = kind.endswith("plus")
    basis, _ = _null_basis(gs, hs, affine)
    if not basis:
        return None
    Q = _det_form(basis, slice(0, 2))
    w, V = np.linalg.eigh(Q)
    if positive:
        if w[-1] <= DET_TOL:
            return None
        x = V[:, -1]
    else:
        i = int(np.argmax(np.abs(w)))
        if abs(w[i]) <= DET_TOL:
            return None
        x = V[:, i]
    if affine:
        lam = np.array([b[2, 2] for b in basis])
        if np.abs(lam).max() <= DET_TOL:
            return None
        u = lam / np.linalg.norm(lam)
        for t in (0.0, 0.05, -0.05, 0.2, -0.2, 0.5, -0.5):
            y = x + t * u
            C = sum(c * b for c, b in zip(y, basis))
            if abs(C[2, 2]) > DET_TOL:
                C = C / C[2, 2]
                d = np.linalg.det(C[:2, :2])
                if (d > DET_TOL) if positive else (abs(d) > DET_TOL):
                    return C
        return None
    C = sum(c * b for c, b in zip(x, basis))
    if positive and np.linalg.det(C) < 0:
        C = -C
    return C


def conjugacy_gap(gs, hs, affine: bool = False) -> float:
    """Smallest singular value of the conjugator equation, relative to scale.

    Zero (to rounding) when a conjugator of some determinant exists in the
    closure; used to monitor convergence, never to decide conjugacy.
    """
    _, s = _null_basis(gs, hs, affine)
    return float(s[-1])
