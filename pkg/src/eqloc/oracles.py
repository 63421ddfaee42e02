"""Brute-force verifiers on explicitly charted manifolds.

Fixtures
--------
``s2``
    Unit sphere in R^3, circle acting by rotation about the z-axis, outward
    area form, moment map ``z``.  Two stereographic charts.
``cp1``, ``cp2``
    Projective space with the Fubini-Study form ``i d d-bar log(1 + |w|^2)``
    on each affine chart; the torus acts by ``z_k -> exp(-i t X_k) z_k`` and
    the moment map is ``(|z_1|^2, ..., |z_n|^2) / |z|^2``.

The vector field of ``X`` is ``VF_X(m) = d/dt exp(-tX) m`` at ``t = 0``, and
the moment map satisfies ``d<mu, X> = -iota(VF_X) omega``.

Sampling uses the counter-based Philox generator.  Samples are drawn in
fixed-size blocks, block ``b`` coming from ``Philox(key=seed).jumped(b)``,
so results depend only on the seed, never on how blocks are distributed
over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo

BLOCK = 1 << 18


def philox_block(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)).jumped(block))


# -- charts ---------------------------------------------------------------------


class Chart:
    """A coordinate chart; coordinates are real arrays of shape ``(N, d)``."""

    name: str
    dim: int
    overlaps: tuple[str, ...] = ()

    def from_ambient(self, P):  # pragma: no cover - interface
        raise NotImplementedError

    def to_ambient(self, c):  # pragma: no cover - interface
        raise NotImplementedError

    def preferred(self, P) -> np.ndarray:
        """Mask of ambient points this chart covers comfortably (far from its boundary)."""
        raise NotImplementedError  # pragma: no cover

    def valid(self, c) -> np.ndarray:
        return np.all(np.isfinite(c), axis=-1) & (np.linalg.norm(c, axis=-1) < 1e3)

    def vector_field(self, c, X):  # pragma: no cover - interface
        raise NotImplementedError

    def two_form(self, c):  # pragma: no cover - interface
        raise NotImplementedError


class StereographicChart(Chart):
    """Projection of S^2 from the pole ``(0, 0, pole)``, ``pole = +1`` or ``-1``."""

    dim = 2

    def __init__(self, pole: int):
        self.pole = pole
        self.name = "stereo_from_N" if pole > 0 else "stereo_from_S"
        self.overlaps = ("stereo_from_S",) if pole > 0 else ("stereo_from_N",)

    def from_ambient(self, P):
        P = np.atleast_2d(P)
        return P[:, :2] / (1 - self.pole * P[:, 2:3])

    def to_ambient(self, c):
        c = np.atleast_2d(c)
        rho = np.sum(c**2, axis=1, keepdims=True)
        xy = 2 * c / (1 + rho)
        z = self.pole * (rho - 1) / (rho + 1)
        return np.hstack([xy, z])

    def preferred(self, P):
        return self.pole * np.atleast_2d(P)[:, 2] <= 0

    def vector_field(self, c, X):
        c = np.atleast_2d(c)
        return X[0] * np.column_stack([c[:, 1], -c[:, 0]])

    def two_form(self, c):
        c = np.atleast_2d(c)
        k = -self.pole * 4 / (1 + np.sum(c**2, axis=1)) ** 2
        out = np.zeros((len(c), 2, 2))
        out[:, 0, 1] = k
        out[:, 1, 0] = -k
        return out


class AffineChart(Chart):
    """Affine chart ``z_j != 0`` of CP^n; real coordinates ``(Re w_1, Im w_1, ...)``."""

    def __init__(self, n: int, j: int):
        self.n, self.j = n, j
        self.dim = 2 * n
        self.name = f"U{j}"
        self.overlaps = tuple(f"U{k}" for k in range(n + 1) if k != j)
        self._others = [k for k in range(n + 1) if k != j]

    def _complex(self, c):
        c = np.atleast_2d(c)
        return c[:, 0::2] + 1j * c[:, 1::2]

    def _real(self, w):
        out = np.empty((w.shape[0], 2 * w.shape[1]))
        out[:, 0::2] = w.real
        out[:, 1::2] = w.imag
        return out

    def from_ambient(self, Z):
        Z = np.atleast_2d(Z)
        return self._real(Z[:, self._others] / Z[:, self.j : self.j + 1])

    def to_ambient(self, c):
        w = self._complex(c)
        Z = np.ones((w.shape[0], self.n + 1), dtype=complex)
        Z[:, self._others] = w
        return Z / np.linalg.norm(Z, axis=1, keepdims=True)

    def preferred(self, Z):
        A = np.abs(np.atleast_2d(Z))
        return np.argmax(A, axis=1) == self.j

    def vector_field(self, c, X):
        w = self._complex(c)
        Xh = np.concatenate([[0.0], np.asarray(X, dtype=float)])
        rates = Xh[self._others] - Xh[self.j]
        return self._real(1j * rates * w)

    def two_form(self, c):
        w = self._complex(c)
        D = 1 + np.sum(np.abs(w) ** 2, axis=1)
        n = self.n
        # h[a, b] = (delta_ab D - conj(w_a) w_b) / D^2 ; omega(a, b) = -2 Im(a^T h conj(b))
        h = (np.eye(n)[None] * D[:, None, None] - np.conj(w)[:, :, None] * w[:, None, :]) / D[:, None, None] ** 2
        basis = np.zeros((2 * n, n), dtype=complex)
        for k in range(n):
            basis[2 * k, k] = 1.0
            basis[2 * k + 1, k] = 1j
        return -2 * np.imag(np.einsum("Aa,nab,Bb->nAB", basis, h, np.conj(basis)))


@dataclass(frozen=True)
class ChartedSurface:
    """A manifold with torus action given concretely, for brute-force checks.

    ``sample_ambient(rng, k)`` returns ``k`` points uniformly distributed for
    the Liouville measure, whose total is ``volume``.
    """

    name: str
    torus_rank: int
    volume: float
    sample_ambient: Callable
    moment_ambient: Callable
    charts: tuple[Chart, ...]
    moment_range: tuple[tuple[float, float], ...]

    def moment_eval(self, P) -> np.ndarray:
        return np.asarray(self.moment_ambient(P), dtype=float).reshape(len(np.atleast_2d(P)), self.torus_rank)

    def chart(self, name: str) -> Chart:
        return next(c for c in self.charts if c.name == name)

    def moment_in_chart(self, chart: Chart, c) -> np.ndarray:
        return self.moment_eval(chart.to_ambient(c))

    def vector_field_eval(self, chart: Chart, c, X):
        return chart.vector_field(c, np.asarray(X, dtype=float))

    def two_form_eval(self, chart: Chart, c):
        return chart.two_form(c)

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        blocks = []
        for b in range(-(-n // BLOCK)):
            k = min(BLOCK, n - b * BLOCK)
            blocks.append(self.sample_ambient(philox_block(seed, b), k))
        return np.concatenate(blocks)


def _sphere_sample(rng, k):
    G = rng.standard_normal((k, 3))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def s2_surface(moment=None) -> ChartedSurface:
    """Round unit sphere; ``moment`` overrides the height function (used to build broken fixtures)."""
    return ChartedSurface(
        "s2",
        1,
        4 * math.pi,
        _sphere_sample,
        moment if moment is not None else (lambda P: np.atleast_2d(P)[:, 2:3]),
        (StereographicChart(+1), StereographicChart(-1)),
        ((-1.0, 1.0),),
    )


def broken_s2_surface() -> ChartedSurface:
    """S^2 with the moment map replaced by ``z^2``; fails the Hamiltonian identity."""
    return s2_surface(moment=lambda P: np.atleast_2d(P)[:, 2:3] ** 2)


def cpn_surface(n: int) -> ChartedSurface:
    def sample(rng, k):
        G = rng.standard_normal((k, n + 1)) + 1j * rng.standard_normal((k, n + 1))
        return G / np.linalg.norm(G, axis=1, keepdims=True)

    def moment(Z):
        A = np.abs(np.atleast_2d(Z)) ** 2
        return A[:, 1:] / A.sum(axis=1, keepdims=True)

    return ChartedSurface(
        f"cp{n}",
        n,
        (2 * math.pi) ** n / math.factorial(n),
        sample,
        moment,
        tuple(AffineChart(n, j) for j in range(n + 1)),
        tuple((0.0, 1.0) for _ in range(n)),
    )


SURFACES = {"s2": s2_surface, "cp1": lambda: cpn_surface(1), "cp2": lambda: cpn_surface(2)}


def surface_fixture(name: str) -> ChartedSurface:
    try:
        return SURFACES[name]()
    except KeyError:
        raise KeyError(f"no charted surface for fixture {name!r}; choose from {', '.join(SURFACES)}") from None


# -- quadrature oracles ----------------------------------------------------------


def quadrature_integral_s2(t: float, order: int = 64) -> float:
    """``int_{S^2} exp(t z) dA``: Gauss-Legendre in ``z``, exact ``2 pi`` in azimuth."""
    z, w = geo.interval_rule(-1.0, 1.0, order)
    return float(2 * math.pi * np.sum(w * np.exp(t * z)))


def quadrature_integral_cpn(n: int, X, order: int = 48) -> float:
    """``int_{CP^n} exp(<X, mu>) dvol`` using the uniform pushforward onto the simplex (n <= 2)."""
    X = np.atleast_1d(np.asarray(X, dtype=float))
    if n == 1:
        s, w = geo.interval_rule(0.0, 1.0, order)
        return float(2 * math.pi * np.sum(w * np.exp(X[0] * s)))
    if n == 2:
        pts, w = geo.triangle_rule((0, 0), (1, 0), (0, 1), order)
        return float((2 * math.pi) ** 2 * np.sum(w * np.exp(pts @ X)))
    raise NotImplementedError("simplex quadrature implemented for n <= 2")


# -- Monte Carlo pushforward -----------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    """Bin masses of a sampled pushforward measure (weights ``volume / n_samples``)."""

    edges: tuple[np.ndarray, ...]
    masses: np.ndarray
    n_samples: int
    volume: float

    @property
    def densities(self) -> np.ndarray:
        widths = np.ones_like(self.masses)
        for axis, e in enumerate(self.edges):
            shape = [1] * len(self.edges)
            shape[axis] = -1
            widths = widths * np.diff(e).reshape(shape)
        return self.masses / widths


def _normalize_bins(surface: ChartedSurface, bins):
    r = surface.torus_rank
    if isinstance(bins, (int, np.integer)):
        bins = [int(bins)] * r
    edges = []
    for axis, b in enumerate(bins):
        if isinstance(b, (int, np.integer)):
            lo, hi = surface.moment_range[axis]
            edges.append(np.linspace(lo, hi, int(b) + 1))
        else:
            edges.append(np.asarray(b, dtype=float))
    return tuple(edges)


def monte_carlo_pushforward(surface: ChartedSurface, n_samples: int, bins=20, seed: int = 0, workers: int = 1) -> Histogram:
    """Histogram of the moment map over ``n_samples`` Liouville-uniform samples.

    Deterministic in ``seed``; identical for any ``workers``.
    """
    if n_samples < 10**4:
        raise ValueError("n_samples must be at least 1e4")
    edges = _normalize_bins(surface, bins)
    nblocks = -(-n_samples // BLOCK)

    def block_counts(b):
        k = min(BLOCK, n_samples - b * BLOCK)
        pts = surface.moment_eval(surface.sample_ambient(philox_block(seed, b), k))
        counts, _ = np.histogramdd(pts, bins=edges)
        return counts

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(block_counts, range(nblocks)))
    else:
        parts = [block_counts(b) for b in range(nblocks)]
    counts = np.sum(parts, axis=0)
    return Histogram(edges, counts * (surface.volume / n_samples), n_samples, surface.volume)


def histogram_l1(hist: Histogram, measure) -> float:
    """L1 distance between a sampled histogram and a measure's exact bin masses, relative to total mass."""
    exact = measure.bin_masses(hist.edges)
    return float(np.sum(np.abs(hist.masses - exact)) / abs(measure.total_mass()))


# -- Hamiltonian identity ----------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianReport:
    max_residual: float
    checked: int
    skipped: int

    def __float__(self):
        return self.max_residual


def check_hamiltonian_identity(surface: ChartedSurface, X, n_points: int = 10**4, h: float = 1e-5, seed: int = 0) -> HamiltonianReport:
    """Compare ``d<mu, X>`` (central differences) with ``-iota(VF_X) omega`` in chart coordinates.

    Points are sampled on the manifold and each is checked in the chart that
    covers it comfortably; stencils leaving a chart's domain are skipped.
    """
    if not (1e-7 <= h <= 1e-3):
        raise ValueError("step h must lie in [1e-7, 1e-3]")
    X = np.atleast_1d(np.asarray(X, dtype=float))
    P = surface.sample(n_points, seed)
    worst, checked, skipped = 0.0, 0, 0
    assigned = np.zeros(len(P), dtype=bool)
    for chart in surface.charts:
        mask = chart.preferred(P) & ~assigned
        assigned |= mask
        if not np.any(mask):
            continue
        c = chart.from_ambient(P[mask])
        d = chart.dim
        ok = chart.valid(c)
        grad = np.zeros_like(c)
        for k in range(d):
            e = np.zeros(d)
            e[k] = h
            ok &= chart.valid(c + e) & chart.valid(c - e)
            up = surface.moment_in_chart(chart, c + e) @ X
            dn = surface.moment_in_chart(chart, c - e) @ X
            grad[:, k] = (up - dn) / (2 * h)
        vf = surface.vector_field_eval(chart, c, X)
        om = surface.two_form_eval(chart, c)
        contraction = np.einsum("ni,nik->nk", vf, om)
        res = np.abs(grad + contraction)[ok]
        skipped += int(np.sum(~ok))
        checked += int(np.sum(ok))
        if res.size:
            worst = max(worst, float(res.max()))
    skipped += int(np.sum(~assigned))
    return HamiltonianReport(worst, checked, skipped)


def chart_transition_defect(surface: ChartedSurface, n_points: int = 1000, seed: int = 0) -> float:
    """Largest moment-map mismatch between overlapping charts at sampled points."""
    P = surface.sample(max(n_points, 1), seed)
    worst = 0.0
    for a in surface.charts:
        for b in surface.charts:
            if b.name not in a.overlaps:
                continue
            ca, cb = a.from_ambient(P), b.from_ambient(P)
            ok = a.valid(ca) & b.valid(cb)
            if not np.any(ok):
                continue
            ma = surface.moment_in_chart(a, ca[ok])
            mb = surface.moment_in_chart(b, cb[ok])
            worst = max(worst, float(np.max(np.abs(ma - mb))))
    return worst


# -- induced-character oracle --------------------------------------------------------


def induced_character_sl2r(nu: float, t: float, eps: float = 2e-3, n: int | None = None) -> float:
    """Trace of ``diag(e^t, e^-t)`` on the principal series of SL(2,R) induced from ``|a|^nu``.

    The representation acts on densities of weight ``(1 + nu)/2`` on the real
    projective line; its distributional trace is
    ``int J(theta)^{(1+nu)/2} delta(theta - psi(theta)) d theta`` with ``psi``
    the projective action of the inverse element.  The delta function is
    mollified by a Gaussian of width ``eps`` and the integral evaluated by the
    periodic trapezoidal rule; Richardson extrapolation in ``eps`` removes the
    ``O(eps^2)`` bias.  The closed form is ``(e^{nu t} + e^{-nu t}) / |e^t - e^-t|``.
    """
    if t == 0:
        raise ValueError("the trace is singular at the identity")
    if n is None:
        # resolve the steepest crossing, where |d gap / d theta| ~ e^{2|t|}
        n = max(1 << 17, int(40 * math.pi * math.exp(2 * abs(t)) / eps))
    theta = np.arange(n) * (math.pi / n)
    c, s = np.cos(theta), np.sin(theta)
    psi = np.arctan2(math.exp(t) * s, math.exp(-t) * c) % math.pi
    jac = math.exp(2 * t) / (c**2 + math.exp(4 * t) * s**2)
    gap = (theta - psi + math.pi / 2) % math.pi - math.pi / 2
    amp = jac ** ((1 + nu) / 2)

    def mollified(e):
        kernel = np.exp(-0.5 * (gap / e) ** 2) / (e * math.sqrt(2 * math.pi))
        return float(np.sum(amp * kernel) * (math.pi / n))

    return (4 * mollified(eps / 2) - mollified(eps)) / 3
