"""Gauss-Legendre rules, convex polygon clipping and polynomial helpers.

Polynomials are numpy coefficient arrays in the ``numpy.polynomial``
convention: ``c[i]`` multiplies ``x**i`` in one variable, ``c[i, j]``
multiplies ``x**i * y**j`` in two.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on ``[0, 1]``."""
    x, w = legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def interval_rule(a: float, b: float, n: int):
    x, w = gauss_legendre(n)
    return a + (b - a) * x, (b - a) * w


def triangle_rule(v0, v1, v2, n: int):
    """Collapsed (Duffy) tensor Gauss rule on a triangle; exact for degree ``<= 2n - 2``."""
    x, w = gauss_legendre(n)
    a, b = np.meshgrid(x, x, indexing="ij")
    wa, wb = np.meshgrid(w, w, indexing="ij")
    # (a, b) in the unit square -> (a, b (1 - a)) in the reference triangle
    xi = a.ravel()
    eta = (b * (1 - a)).ravel()
    wt = (wa * wb * (1 - a)).ravel()
    v0, v1, v2 = (np.asarray(v, dtype=float) for v in (v0, v1, v2))
    e1, e2 = v1 - v0, v2 - v0
    J = abs(e1[0] * e2[1] - e1[1] * e2[0])
    pts = v0 + np.outer(xi, v1 - v0) + np.outer(eta, v2 - v0)
    return pts, wt * J


def polygon_rule(vertices, n: int):
    """Fan-triangulated rule on a convex polygon given by ordered vertices."""
    V = np.asarray(vertices, dtype=float)
    pts, wts = [], []
    for k in range(1, len(V) - 1):
        p, w = triangle_rule(V[0], V[k], V[k + 1], n)
        pts.append(p)
        wts.append(w)
    if not pts:
        return np.zeros((0, 2)), np.zeros(0)
    return np.vstack(pts), np.concatenate(wts)


def polygon_area(vertices) -> float:
    V = np.asarray(vertices, dtype=float)
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_halfplane(vertices, normal, offset, tol: float = 0.0):
    """Part of a convex polygon with ``normal . x <= offset`` (Sutherland-Hodgman)."""
    V = np.asarray(vertices, dtype=float)
    if len(V) == 0:
        return V
    normal = np.asarray(normal, dtype=float)
    d = V @ normal - offset
    out = []
    n = len(V)
    for i in range(n):
        j = (i + 1) % n
        pi, pj, di, dj = V[i], V[j], d[i], d[j]
        if di <= tol:
            out.append(pi)
        if (di < -tol and dj > tol) or (di > tol and dj < -tol):
            t = di / (di - dj)
            out.append(pi + t * (pj - pi))
    if len(out) < 3:
        return np.zeros((0, 2))
    return _dedupe_ring(np.array(out))


def _dedupe_ring(V, tol=1e-13):
    keep = []
    scale = max(1.0, float(np.max(np.abs(V))))
    for i in range(len(V)):
        if np.linalg.norm(V[i] - V[i - 1]) > tol * scale:
            keep.append(V[i])
    return np.array(keep) if len(keep) >= 3 else np.zeros((0, 2))


def split_polygon(vertices, normal, offset, tol: float):
    """Split a convex polygon by a line; returns the list of nondegenerate parts."""
    V = np.asarray(vertices, dtype=float)
    d = V @ np.asarray(normal, dtype=float) - offset
    if np.all(d <= tol) or np.all(d >= -tol):
        return [V]
    parts = [clip_halfplane(V, normal, offset, tol), clip_halfplane(V, -np.asarray(normal), -offset, tol)]
    return [p for p in parts if len(p) >= 3 and abs(polygon_area(p)) > tol**2]


def halfplanes_of(vertices):
    """``(A, b)`` with the polygon equal to ``{x : A x <= b}`` (counter-clockwise input)."""
    V = np.asarray(vertices, dtype=float)
    if polygon_area(V) < 0:
        V = V[::-1]
    E = np.roll(V, -1, axis=0) - V
    A = np.column_stack([E[:, 1], -E[:, 0]])
    A = A / np.linalg.norm(A, axis=1, keepdims=True)
    b = np.einsum("ij,ij->i", A, V)
    return A, b


def shift_poly1(c, a):
    """Coefficients of ``q(x) = p(x - a)``."""
    return P.Polynomial(c)(P.Polynomial([-a, 1.0])).coef


def shift_poly2(c, a):
    """Coefficients of ``q(x, y) = p(x - a0, y - a1)``."""
    c = np.atleast_2d(np.asarray(c, dtype=float))
    out = np.zeros_like(c)
    for i in range(c.shape[0]):
        for j in range(c.shape[1]):
            if c[i, j] == 0:
                continue
            for k in range(i + 1):
                for m in range(j + 1):
                    out[k, m] += c[i, j] * comb(i, k) * comb(j, m) * (-a[0]) ** (i - k) * (-a[1]) ** (j - m)
    return out


def add_padded(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = tuple(max(x, y) for x, y in zip(a.shape, b.shape))
    out = np.zeros(shape)
    out[tuple(slice(0, s) for s in a.shape)] += a
    out[tuple(slice(0, s) for s in b.shape)] += b
    return out


def polyval(c, pts):
    """Evaluate a 1- or 2-variable coefficient array at points of shape ``(N, r)``."""
    c = np.asarray(c, dtype=float)
    pts = np.asarray(pts, dtype=float)
    if c.ndim == 1:
        return P.polyval(pts[..., 0] if pts.ndim > 1 else pts, c)
    return P.polyval2d(pts[..., 0], pts[..., 1], c)


def exp_poly_integral(c, lam, a: float, b: float, n_fallback: int = 32):
    """``int_a^b exp(lam x) p(x) dx`` for a 1-D polynomial ``p``.

    Uses the antiderivative ``exp(lam x) sum_j (-1)^j p^(j)(x) / lam^(j+1)``
    unless ``|lam| (b - a)`` is small, where Gauss-Legendre is more accurate.
    """
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if c.size == 0:
        return 0.0
    if abs(lam) * abs(b - a) < 0.5:
        x, w = interval_rule(a, b, n_fallback)
        return np.sum(w * np.exp(lam * x) * P.polyval(x, c))

    def antideriv(x):
        acc = 0.0
        d = c
        sgn = 1.0
        for j in range(len(c)):
            acc = acc + sgn * P.polyval(x, d) / lam ** (j + 1)
            d = P.polyder(d) if len(d) > 1 else np.zeros(1)
            sgn = -sgn
        return np.exp(lam * x) * acc

    return antideriv(b) - antideriv(a)
