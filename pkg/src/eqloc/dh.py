"""Duistermaat-Heckman measures of torus actions with isolated fixed points.

The pushforward of the Liouville measure under the moment map is assembled
from the fixed-point data as a signed sum of shifted cone measures.  Choose
a direction ``xi`` regular for all weights and flip every weight into the
half-space ``<w, xi> > 0``.  Then, for ``X`` near ``xi``,

    1 / <w, X> = int_0^inf exp(<X, -t w>) dt,

so each localized term ``exp(<X, phi_p>) / e_p(X)`` is the Laplace
transform of ``sign * delta_{phi_p} * H_{-w_1} * ... * H_{-w_n}`` with
``H_u`` the ray measure along ``t -> t u``.  The convolution of rays (the
multivariate truncated power) is built exactly: in rank one it is
``t^(n-1) / ((n-1)! prod |w|)``, in rank two it is computed sector by
sector with rational arithmetic.  Overlaying all cones on a line
arrangement yields polyhedral pieces with polynomial densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from numpy.polynomial import polynomial as P

from . import geometry as geo
from .core import ProblemSpec, as_parameter, wall_tolerance
from .errors import PolarizationError, UnboundedSupportError
from .localization import LocalizedIntegrand, localize_integral

ZERO_RTOL = 1e-9
QUAD_ORDER = 32

_X, _Y, _S = sp.symbols("x y s")


def polarize_weights(weights, xi):
    """Flip weights into the half-space ``<w, xi> > 0``.

    Returns
    -------
    polarized : list of tuple
    sign : int
        ``(-1) ** (number of flips)``.
    """
    xi = as_parameter(xi)
    W = np.asarray(weights, dtype=float).reshape(len(weights), -1)
    pair = W @ xi
    if np.any(np.abs(pair) <= wall_tolerance(xi, W)):
        raise PolarizationError(f"polarization direction {np.asarray(xi).tolist()} is singular for weights {[list(w) for w in weights]}")
    out = [tuple(-int(c) for c in w) if s < 0 else tuple(int(c) for c in w) for w, s in zip(weights, pair)]
    return out, (-1) ** int(np.sum(pair < 0))


def random_polarization(spec: ProblemSpec, rng=None, tries: int = 1000) -> np.ndarray:
    rng = np.random.default_rng(20240607) if rng is None else rng
    W = spec.all_weights()
    for _ in range(tries):
        xi = rng.standard_normal(spec.torus_rank)
        xi /= np.linalg.norm(xi)
        if np.min(np.abs(W @ xi)) > 1e-3 * np.max(np.linalg.norm(W, axis=1)):
            return xi
    raise PolarizationError("no regular polarization direction found")


# -- the measure type ----------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """A polyhedral piece ``{x : A x <= b}`` carrying a polynomial density.

    For ``dim == ambient_dim`` the density is a polynomial in the ambient
    coordinates.  A lower-dimensional piece (``dim == 1`` inside the plane)
    is the segment ``origin + t * direction``, ``t0 <= t <= t1``, and its
    density is a polynomial in ``t`` with respect to ``dt``; ``A`` then
    contains the supporting line as a pair of opposite inequalities.
    """

    A: np.ndarray
    b: np.ndarray
    vertices: np.ndarray
    density: np.ndarray
    dim: int
    origin: np.ndarray | None = None
    direction: np.ndarray | None = None

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_segment(self) -> bool:
        return self.origin is not None

    @property
    def t_range(self):
        t = (self.vertices - self.origin) @ self.direction
        return float(t[0]), float(t[1])

    def rule(self, order: int = QUAD_ORDER):
        """Quadrature points (ambient coordinates) and weights times density."""
        if self.is_segment:
            t0, t1 = self.t_range
            t, w = geo.interval_rule(t0, t1, order)
            pts = self.origin + np.outer(t, self.direction)
            return pts, w * P.polyval(t, self.density)
        if self.ambient_dim == 1:
            a, b = self.vertices[:, 0]
            x, w = geo.interval_rule(a, b, order)
            return x[:, None], w * P.polyval(x, self.density)
        pts, w = geo.polygon_rule(self.vertices, order)
        return pts, w * geo.polyval(self.density, pts)

    def mass(self) -> float:
        _, w = self.rule(max(4, self.density.shape[0] + 2))
        return float(np.sum(w))

    def laplace(self, X):
        """``int exp(<X, s>) dm(s)`` over this piece."""
        X = np.asarray(X)
        if self.is_segment:
            t0, t1 = self.t_range
            lam = np.dot(X, self.direction)
            return np.exp(np.dot(X, self.origin)) * geo.exp_poly_integral(self.density, lam, t0, t1)
        if self.ambient_dim == 1:
            a, b = self.vertices[:, 0]
            return geo.exp_poly_integral(self.density, X[0], a, b)
        pts, w = self.rule()
        return np.sum(w * np.exp(pts @ X))

    def contains(self, pts, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all(pts @ self.A.T <= self.b + tol, axis=1)


@dataclass(frozen=True)
class Atom:
    point: np.ndarray
    mass: float


@dataclass(frozen=True)
class PiecewisePolynomialMeasure:
    """A finite signed measure: polynomial densities on polyhedra plus point masses."""

    ambient_dim: int
    pieces: tuple[Piece, ...]
    atoms: tuple[Atom, ...] = ()
    polarization: tuple[float, ...] | None = None

    def total_mass(self) -> float:
        return sum(p.mass() for p in self.pieces) + sum(a.mass for a in self.atoms)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], order: int = QUAD_ORDER):
        """``int f dm`` for ``f`` vectorized over point arrays of shape ``(N, r)``."""
        total = 0.0
        for p in self.pieces:
            pts, w = p.rule(order)
            total = total + np.sum(w * f(pts))
        for a in self.atoms:
            total = total + a.mass * f(a.point[None, :])[0]
        return total

    def laplace(self, X):
        """``int exp(<X, s>) dm(s)``, piece by piece (closed form on intervals)."""
        X = as_parameter(X, self.ambient_dim)
        total = 0.0
        for p in self.pieces:
            total = total + p.laplace(X)
        for a in self.atoms:
            total = total + a.mass * np.exp(np.dot(a.point, X))
        return total

    def density_at(self, pts) -> np.ndarray:
        """Density of the full-dimensional part at ``pts`` (zero outside the support)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(len(pts))
        for p in self.pieces:
            if p.is_segment:
                continue
            inside = p.contains(pts) & (out == 0)
            if np.any(inside):
                out[inside] = geo.polyval(p.density, pts[inside])
        return out

    def bin_masses(self, edges) -> np.ndarray:
        """Exact masses of the cells of a rectilinear grid.

        ``edges`` is one array of bin edges per ambient dimension.
        """
        edges = [np.asarray(e, dtype=float) for e in edges]
        shape = tuple(len(e) - 1 for e in edges)
        out = np.zeros(shape)
        for p in self.pieces:
            if self.ambient_dim == 1:
                a, b = p.vertices[:, 0]
                for i in range(shape[0]):
                    lo, hi = max(a, edges[0][i]), min(b, edges[0][i + 1])
                    if hi > lo:
                        x, w = geo.interval_rule(lo, hi, QUAD_ORDER // 2)
                        out[i] += np.sum(w * P.polyval(x, p.density))
            elif p.is_segment:
                t0, t1 = p.t_range
                for i in range(shape[0]):
                    for j in range(shape[1]):
                        lo, hi = _clip_segment(p.origin, p.direction, t0, t1, (edges[0][i], edges[0][i + 1]), (edges[1][j], edges[1][j + 1]))
                        if hi > lo:
                            t, w = geo.interval_rule(lo, hi, QUAD_ORDER // 2)
                            out[i, j] += np.sum(w * P.polyval(t, p.density))
            else:
                xs, ys = p.vertices[:, 0], p.vertices[:, 1]
                i0 = max(0, np.searchsorted(edges[0], xs.min(), "right") - 1)
                i1 = min(shape[0], np.searchsorted(edges[0], xs.max(), "left"))
                j0 = max(0, np.searchsorted(edges[1], ys.min(), "right") - 1)
                j1 = min(shape[1], np.searchsorted(edges[1], ys.max(), "left"))
                for i in range(i0, i1):
                    for j in range(j0, j1):
                        V = p.vertices
                        V = geo.clip_halfplane(V, (1, 0), edges[0][i + 1])
                        V = geo.clip_halfplane(V, (-1, 0), -edges[0][i])
                        V = geo.clip_halfplane(V, (0, 1), edges[1][j + 1])
                        V = geo.clip_halfplane(V, (0, -1), -edges[1][j])
                        if len(V) >= 3:
                            pts, w = geo.polygon_rule(V, QUAD_ORDER // 2)
                            out[i, j] += np.sum(w * geo.polyval(p.density, pts))
        return out

    def facet_jumps(self, delta: float = 1e-7):
        """Density jumps across the facets of full-dimensional pieces.

        Returns a list of ``(facet_midpoint, jump)`` with ``jump`` the density
        inside minus the density just outside.
        """
        out = []
        for p in self.pieces:
            if p.is_segment:
                continue
            if self.ambient_dim == 1:
                a, b = p.vertices[:, 0]
                for x, nu in ((a, -1.0), (b, 1.0)):
                    inside = P.polyval(x, p.density)
                    outside = self.density_at([[x + nu * delta]])[0]
                    out.append((np.array([x]), float(inside - outside)))
                continue
            V = p.vertices
            for k in range(len(V)):
                m = 0.5 * (V[k] + V[(k + 1) % len(V)])
                e = V[(k + 1) % len(V)] - V[k]
                nu = np.array([e[1], -e[0]]) / np.linalg.norm(e)
                if np.dot(nu, m - V.mean(axis=0)) < 0:
                    nu = -nu
                inside = geo.polyval(p.density, m[None, :])[0]
                outside = self.density_at(m + delta * nu)[0]
                out.append((m, float(inside - outside)))
        return out

    def min_density(self) -> float:
        """Smallest density value over piece vertices and centroids."""
        vals = []
        for p in self.pieces:
            pts = np.vstack([p.vertices, p.vertices.mean(axis=0)[None, :]])
            if p.is_segment:
                vals.extend(P.polyval((pts - p.origin) @ p.direction, p.density))
            else:
                vals.extend(geo.polyval(p.density, pts))
        return float(min(vals)) if vals else 0.0


def _clip_segment(o, e, t0, t1, xr, yr):
    lo, hi = t0, t1
    for k, (a, b) in enumerate((xr, yr)):
        if abs(e[k]) < 1e-15:
            if not (a <= o[k] <= b):
                return 0.0, 0.0
            continue
        ta, tb = (a - o[k]) / e[k], (b - o[k]) / e[k]
        lo, hi = max(lo, min(ta, tb)), min(hi, max(ta, tb))
    return lo, hi


# -- rays (rank one, and degenerate cones in rank two) ------------------------


@dataclass(frozen=True)
class _Ray:
    """Signed measure ``coef * t^(n-1) / ((n-1)! * prod_c) dt`` on ``tau = apex + orient * speed * t``."""

    apex: float
    orient: int
    n: int
    prod_c: float
    speed: float
    coef: float

    def poly_in_tau(self):
        base = np.zeros(self.n)
        base[-1] = self.coef / (math.factorial(self.n - 1) * self.prod_c * self.speed)
        k = self.orient / self.speed
        return P.Polynomial(base)(P.Polynomial([-k * self.apex, k])).coef

    def covers(self, tau) -> bool:
        return self.orient * (tau - self.apex) > 0


def _is_zero(total, terms) -> bool:
    scale = max((float(np.max(np.abs(t))) for t in terms), default=0.0)
    return float(np.max(np.abs(total))) <= ZERO_RTOL * max(scale, 1e-300)


def _overlay_rays(rays: Sequence[_Ray]):
    """Intervals ``(t0, t1, coeffs)`` of the summed ray measures; raises if unbounded."""
    scale = max(1.0, max(abs(r.apex) for r in rays))
    apexes = sorted(r.apex for r in rays)
    breaks = [apexes[0]]
    for a in apexes[1:]:
        if a - breaks[-1] > 1e-12 * scale:
            breaks.append(a)
    regions = [(-math.inf, breaks[0])] + list(zip(breaks[:-1], breaks[1:])) + [(breaks[-1], math.inf)]
    cache = [r.poly_in_tau() for r in rays]
    out = []
    for lo, hi in regions:
        if math.isinf(lo):
            mid = hi - 1.0
        elif math.isinf(hi):
            mid = lo + 1.0
        else:
            mid = 0.5 * (lo + hi)
        terms = [c for r, c in zip(rays, cache) if r.covers(mid)]
        if not terms:
            continue
        total = reduce(geo.add_padded, terms)
        if _is_zero(total, terms):
            continue
        if math.isinf(lo) or math.isinf(hi):
            raise UnboundedSupportError("pushforward measure has unbounded support; fixed-point data are inconsistent")
        out.append((lo, hi, np.trim_zeros(total, "b") if np.any(total) else np.zeros(1)))
    return out


def _interval_piece(a, b, coeffs) -> Piece:
    return Piece(np.array([[-1.0], [1.0]]), np.array([-a, b]), np.array([[a], [b]]), np.asarray(coeffs, dtype=float), 1)


# -- rank-two cone splines ----------------------------------------------------


def _primitive(v):
    g = math.gcd(*[abs(int(c)) for c in v])
    return tuple(int(c) // g for c in v)


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _angle(v, d) -> float:
    return math.atan2(d[0] * v[1] - d[1] * v[0], d[0] * v[0] + d[1] * v[1])


@dataclass
class ConeSpline2D:
    """Density of ``H_{u_1} * ... * H_{u_n}`` for ``u_j`` spanning the plane.

    ``sectors`` holds ``(lo, hi, expr)`` with ``lo``/``hi`` spoke directions
    and ``expr`` a homogeneous sympy polynomial of degree ``n - 2`` in
    ``x, y`` with rational coefficients.
    """

    d: tuple[float, float]
    spokes: list
    sectors: list
    arrays: list = field(default_factory=list)

    def __post_init__(self):
        self.arrays = [_sympy_to_array(expr) for _, _, expr in self.sectors]
        self._bounds = [(_angle(lo, self.d), _angle(hi, self.d)) for lo, hi, _ in self.sectors]

    def sector_index(self, y):
        if self.d[0] * y[0] + self.d[1] * y[1] <= 0:
            return None
        th = _angle(y, self.d)
        for k, (lo, hi) in enumerate(self._bounds):
            if lo < th < hi:
                return k
        return None

    def __call__(self, y):
        k = self.sector_index(y)
        if k is None:
            return 0.0
        return float(self.sectors[k][2].subs({_X: y[0], _Y: y[1]}))


def _sympy_to_array(expr):
    poly = sp.Poly(sp.expand(expr), _X, _Y)
    deg = max(1, poly.total_degree() + 1)
    arr = np.zeros((deg, deg))
    for (i, j), c in poly.terms():
        arr[i, j] = float(c)
    return arr


def cone_spline_2d(generators, d):
    """Exact cone spline of integer ``generators`` lying in the half-plane ``<., d> > 0``.

    Returns ``None`` when the generators are all parallel (the measure then
    lives on a ray).
    """
    gens = sorted((tuple(int(c) for c in u) for u in generators), key=lambda u: _angle(u, d))
    first = gens[0]
    j = next((k for k in range(1, len(gens)) if _det(first, gens[k]) != 0), None)
    if j is None:
        return None
    second = gens[j]
    rest = gens[1:j] + gens[j + 1:]
    spokes = sorted({_primitive(first), _primitive(second)}, key=lambda v: _angle(v, d))
    sectors = [(spokes[0], spokes[1], sp.Rational(1, abs(_det(first, second))))]

    def lookup(q):
        th = _angle(q, d)
        if d[0] * q[0] + d[1] * q[1] <= 0:
            return None
        for lo, hi, expr in sectors:
            if _angle(lo, d) < th < _angle(hi, d):
                return expr
        return None

    for u in rest:
        new_spokes = sorted(set(spokes) | {_primitive(u)}, key=lambda v: _angle(v, d))
        new_sectors = []
        for a, b in zip(new_spokes[:-1], new_spokes[1:]):
            x = np.array(a) / np.hypot(*a) + np.array(b) / np.hypot(*b)
            crossings = []
            for v in spokes:
                dt = _det(u, v)
                if dt == 0:
                    continue
                s_hit = _det(x, v) / dt
                if s_hit <= 1e-12:
                    continue
                if np.dot(x - s_hit * np.array(u), v) <= 0:
                    continue
                crossings.append((s_hit, v))
            crossings.sort()
            marks = [(0.0, None)] + crossings + [(math.inf, None)]
            expr = sp.Integer(0)
            for (s0, v0), (s1, v1) in zip(marks[:-1], marks[1:]):
                s_mid = s0 + 1.0 if math.isinf(s1) else 0.5 * (s0 + s1)
                q = x - s_mid * np.array(u)
                piece = lookup(q)
                if piece is None:
                    continue
                if math.isinf(s1):
                    raise RuntimeError("cone spline recursion left the half-plane")
                lo = sp.Integer(0) if v0 is None else (_X * v0[1] - _Y * v0[0]) / sp.Integer(_det(u, v0))
                hi = (_X * v1[1] - _Y * v1[0]) / sp.Integer(_det(u, v1))
                shifted = sp.sympify(piece).subs({_X: _X - _S * u[0], _Y: _Y - _S * u[1]}, simultaneous=True)
                expr += sp.integrate(sp.expand(shifted), (_S, lo, hi))
            new_sectors.append((a, b, sp.expand(expr)))
        spokes, sectors = new_spokes, new_sectors
    return ConeSpline2D(tuple(float(c) for c in d), spokes, sectors)


def _cell_decomposition(lines, box, tol):
    cells = [box]
    for normal, offset in lines:
        nxt = []
        for c in cells:
            nxt.extend(geo.split_polygon(c, normal, offset, tol))
        cells = nxt
    return cells


def _dedupe_lines(lines, scale):
    """Unique lines ``normal . x = offset`` from ``(normal, point_on_line)`` pairs."""
    out = []
    for normal, point in lines:
        nu = np.asarray(normal, dtype=float)
        nu = nu / np.linalg.norm(nu)
        k = np.flatnonzero(np.abs(nu) > 1e-12)[0]
        if nu[k] < 0:
            nu = -nu
        c = float(nu @ np.asarray(point, dtype=float))
        if not any(np.allclose(nu, m, atol=1e-12) and abs(c - o) <= 1e-12 * scale for m, o in out):
            out.append((nu, c))
    return out


# -- assembly -----------------------------------------------------------------


def dh_measure(spec: ProblemSpec, xi=None, rng=None) -> PiecewisePolynomialMeasure:
    """Duistermaat-Heckman measure of ``spec`` as an exact piecewise-polynomial measure.

    Parameters
    ----------
    spec : ProblemSpec
        Torus rank 1 or 2.
    xi : array_like, optional
        Polarization direction; drawn at random (seeded) when omitted.

    Raises
    ------
    PolarizationError
        ``xi`` is singular for some weight.
    UnboundedSupportError
        The signed cone sum does not cancel at infinity.
    """
    r, n = spec.torus_rank, spec.dim_complex
    if r > 2:
        raise NotImplementedError("Duistermaat-Heckman measures are implemented for torus rank <= 2")
    xi = random_polarization(spec, rng) if xi is None else as_parameter(xi, r)
    C = (2 * math.pi) ** n
    if r == 1:
        rays = []
        for p in spec.fixed_points:
            pol, s = polarize_weights(p.weights, xi)
            prod_c = float(np.prod([abs(w[0]) for w in pol]))
            rays.append(_Ray(p.moment[0], -int(np.sign(xi[0])), n, prod_c, 1.0, C * p.sign * s))
        pieces = tuple(_interval_piece(a, b, c) for a, b, c in _overlay_rays(rays))
        return PiecewisePolynomialMeasure(1, pieces, (), tuple(xi))

    d = -np.asarray(xi, dtype=float)
    cones, rays_by_line = [], {}
    for p in spec.fixed_points:
        pol, s = polarize_weights(p.weights, xi)
        gens = [tuple(-c for c in w) for w in pol]
        coef = C * p.sign * s
        spline = cone_spline_2d(gens, d)
        apex = np.array(p.moment)
        if spline is not None:
            cones.append((apex, spline, coef))
            continue
        # all generators parallel: a ray measure along the primitive direction
        v = _primitive(gens[0])
        canon = v if (v[0] > 0 or (v[0] == 0 and v[1] > 0)) else (-v[0], -v[1])
        e = np.array(canon, dtype=float) / np.hypot(*canon)
        nu = np.array([-e[1], e[0]])
        c_line = float(nu @ apex)
        speed = float(np.hypot(*v))
        prod_c = float(np.prod([np.hypot(*g) / speed for g in gens]))
        orient = 1 if v == canon else -1
        key = (canon, round(c_line, 9))
        origin = c_line * nu
        rays_by_line.setdefault(key, (origin, e, []))[2].append(
            _Ray(float((apex - origin) @ e), orient, n, prod_c, speed, coef)
        )

    pieces: list[Piece] = []
    for origin, e, rays in rays_by_line.values():
        nu = np.array([-e[1], e[0]])
        c = float(nu @ origin)
        for t0, t1, coeffs in _overlay_rays(rays):
            A = np.array([nu, -nu, e, -e])
            b = np.array([c, -c, t1 + e @ origin, -(t0 + e @ origin)])
            verts = np.array([origin + t0 * e, origin + t1 * e])
            pieces.append(Piece(A, b, verts, np.asarray(coeffs, dtype=float), 1, origin, e))

    if cones:
        pieces.extend(_overlay_cones(cones, spec))
    return PiecewisePolynomialMeasure(2, tuple(pieces), (), tuple(xi))


def _overlay_cones(cones, spec):
    moments = np.array([p.moment for p in spec.fixed_points])
    lo, hi = moments.min(axis=0), moments.max(axis=0)
    pad = max(1.0, 0.5 * float(np.max(hi - lo)))
    lo, hi = lo - pad, hi + pad
    box = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    scale = float(np.max(np.abs(box)))
    lines = []
    for apex, spline, _ in cones:
        for v in spline.spokes:
            normal = np.array([-v[1], v[0]], dtype=float)
            lines.append((normal, apex))
    lines = _dedupe_lines(lines, scale)
    tol = 1e-12 * scale
    shifted = {}
    pieces = []
    for cell in _cell_decomposition(lines, box, tol):
        centroid = cell.mean(axis=0)
        terms = []
        for idx, (apex, spline, coef) in enumerate(cones):
            k = spline.sector_index(centroid - apex)
            if k is None:
                continue
            if (idx, k) not in shifted:
                shifted[(idx, k)] = coef * geo.shift_poly2(spline.arrays[k], apex)
            terms.append(shifted[(idx, k)])
        if not terms:
            continue
        total = reduce(geo.add_padded, terms)
        if _is_zero(total, terms):
            continue
        on_box = np.any(np.isclose(cell, lo, atol=tol) | np.isclose(cell, hi, atol=tol))
        if on_box:
            raise UnboundedSupportError("pushforward measure has unbounded support; fixed-point data are inconsistent")
        total[np.abs(total) <= ZERO_RTOL * max(float(np.max(np.abs(t))) for t in terms)] = 0.0
        A, b = geo.halfplanes_of(cell)
        verts = cell if geo.polygon_area(cell) > 0 else cell[::-1]
        pieces.append(Piece(A, b, verts, total, 2))
    return pieces


def dh_fourier(spec: ProblemSpec, X):
    """Fourier (Laplace) transform of the DH measure at ``X``, by localization."""
    return localize_integral(spec, X, LocalizedIntegrand.exponential_of_moment())


def verify_fourier_inversion(m: PiecewisePolynomialMeasure, spec: ProblemSpec, X) -> float:
    """``|int exp(<X,s>) dm - dh_fourier(X)| / (1 + |dh_fourier(X)|)``."""
    ref = dh_fourier(spec, X)
    return float(abs(m.laplace(X) - ref) / (1 + abs(ref)))
