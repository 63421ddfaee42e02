"""Characters: Weyl's formula, localized orbit sums and chamber-weighted sums.

Weights are written in the fundamental-weight basis and parameters ``X`` in
the coroot basis, so ``<mu, X>`` is the plain dot product.  Complex ``X`` is
accepted throughout and values are returned as Python/numpy complex numbers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .core import MultiplicityTable, ProblemSpec, as_parameter, validate_regular
from .errors import MissingEntryError, QuadratureWarning, SingularParameterError, WallContactError
from .localization import LocalizedIntegrand, weighted_fixed_point_sum
from .roots import RootSystem, weight_multiplicities

SINGULAR_EPS = 1e-9
QUAD_CAP = 64
QUAD_RTOL = 1e-6


def _pairings(rs: RootSystem, X) -> np.ndarray:
    return rs.positive_root_array @ X


def _check_denominator(rs: RootSystem, X):
    t = _pairings(rs, X)
    scale = max(1.0, float(np.linalg.norm(X)))
    if np.any(np.abs(2 * np.sinh(t / 2)) <= SINGULAR_EPS * scale):
        raise SingularParameterError(f"singular element: Weyl denominator vanishes at X={np.asarray(X).tolist()}")


def weyl_character(rs: RootSystem, lam, X) -> complex:
    """Character of the irreducible module of highest weight ``lam`` at ``exp(X)``.

    ``sum_w eps(w) e^{<w(lam+rho), X>} / sum_w eps(w) e^{<w rho, X>}``.

    Raises
    ------
    ValueError
        ``lam`` is not dominant integral.
    SingularParameterError
        The Weyl denominator vanishes at ``X``.
    """
    lam = np.asarray(lam, dtype=float)
    if not rs.is_dominant_integral(lam):
        raise ValueError(f"highest weight {np.asarray(lam).tolist()} is not dominant integral")
    X = as_parameter(X, rs.rank).astype(complex)
    _check_denominator(rs, X)
    return complex(rs.alternating_sum(lam + rs.rho, X) / rs.alternating_sum(rs.rho, X))


def character_weight_sum_oracle(rs: RootSystem, lam, X, max_height: int = 12) -> complex:
    """``sum_mu mult(mu) e^{<mu, X>}`` with multiplicities from Freudenthal's recursion."""
    X = as_parameter(X, rs.rank).astype(complex)
    mult = weight_multiplicities(rs, lam, max_height=max_height)
    mus = np.array(list(mult), dtype=float)
    ms = np.array(list(mult.values()), dtype=float)
    return complex(np.sum(ms * np.exp(mus @ X)))


def orbit_fourier_sum(rs: RootSystem, xi, X) -> complex:
    """``sum_w eps(w) e^{<w xi, X>} / prod_{alpha>0} <alpha, X>``.

    The fixed-point sum of the flag variety through ``xi``: one term per Weyl
    element.
    """
    X = as_parameter(X, rs.rank).astype(complex)
    t = _pairings(rs, X)
    if np.any(np.abs(t) <= SINGULAR_EPS * max(1.0, float(np.linalg.norm(X)))):
        raise SingularParameterError(f"singular element: a root pairing vanishes at X={np.asarray(X).tolist()}")
    return complex(rs.alternating_sum(np.asarray(xi, dtype=float), X) / np.prod(t))


def multiplicities_at(spec: ProblemSpec, mt: MultiplicityTable, X) -> dict[str, int]:
    """Multiplicity of every fixed point on the chamber containing ``X``."""
    ch = mt.chamber_of(X, spec)
    out = {}
    for label in spec.labels:
        try:
            out[label] = mt.multiplicity(label, ch.name)
        except KeyError:
            raise MissingEntryError(f"no multiplicity for fixed point {label!r} on chamber {ch.name!r}") from None
    return out


def noncompact_character(spec: ProblemSpec, mt: MultiplicityTable, X, f: LocalizedIntegrand):
    """Chamber-weighted fixed-point sum ``C_n sum_p m_p(C(X)) f(p, X) / e_p(X)``.

    With every multiplicity equal to one this is computed by exactly the same
    arithmetic as :func:`~eqloc.localization.localize_integral`.

    Raises
    ------
    SingularParameterError
        ``X`` lies on a weight hyperplane.
    ChamberError
        ``X`` is in none of the declared chambers.
    MissingEntryError
        The table lacks a multiplicity needed at ``X``.
    """
    X = as_parameter(X, spec.torus_rank)
    verdict = validate_regular(X, spec)
    if not verdict:
        raise SingularParameterError(f"singular parameter X={np.asarray(X).tolist()}: {verdict.describe()}")
    return weighted_fixed_point_sum(spec, X, f, multiplicities_at(spec, mt, X))


@dataclass(frozen=True)
class Bump:
    """``amplitude * exp(-1 / (1 - |u|^2))`` with ``u = (X - center) / radius``, zero for ``|u| >= 1``."""

    center: tuple[float, ...]
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        u2 = np.sum(((pts - np.asarray(self.center)) / self.radius) ** 2, axis=1)
        out = np.zeros(len(pts))
        inside = u2 < 1
        out[inside] = self.amplitude * np.exp(-1.0 / (1.0 - u2[inside]))
        return out

    def box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius


#: Alias kept for readability at call sites that speak of test functions.
TestFunction = Bump


def _check_support(spec: ProblemSpec, mt: MultiplicityTable, phi: Bump):
    c = np.asarray(phi.center)
    W = spec.all_weights()
    dist = np.abs(W @ c) / np.linalg.norm(W, axis=1)
    if np.any(dist <= phi.radius):
        raise WallContactError(
            f"bump support (center {c.tolist()}, radius {phi.radius}) touches a wall: distance {float(dist.min()):.6g}"
        )
    mt.chamber_of(c, spec)


def _tensor_rule(lo, hi, order):
    nodes, weights = zip(*(geo.interval_rule(a, b, order) for a, b in zip(lo, hi)))
    grids = np.meshgrid(*nodes, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for k, w in enumerate(weights):
        shape = [1] * len(lo)
        shape[k] = -1
        wgrid = wgrid * w.reshape(shape)
    return np.column_stack([g.ravel() for g in grids]), wgrid.ravel()


def pair_distribution(spec: ProblemSpec, mt: MultiplicityTable, f: LocalizedIntegrand, phi: Bump, quad: int = 8):
    """``int F(X) phi(X) dX`` with ``F`` the chamber-weighted character.

    Tensor Gauss-Legendre over the bump's bounding box; the order starts at
    ``quad`` and doubles (up to 64 per axis, or ``2 * quad`` if larger, so at
    least one refinement is always compared) until the value changes by less
    than ``1e-6`` relative.  A :class:`~eqloc.errors.QuadratureWarning` is
    issued if that never happens.

    Raises
    ------
    WallContactError
        The support of ``phi`` reaches a weight hyperplane.
    """
    _check_support(spec, mt, phi)
    if phi.amplitude == 0:
        return 0.0
    lo, hi = phi.box()
    cache = {}

    def F(x):
        key = tuple(x)
        if key not in cache:
            cache[key] = noncompact_character(spec, mt, x, f)
        return cache[key]

    def estimate(order):
        pts, w = _tensor_rule(lo, hi, order)
        vals = phi(pts)
        keep = vals != 0
        return sum(wi * vi * F(x) for wi, vi, x in zip(w[keep], vals[keep], pts[keep]))

    order = max(2, int(quad))
    cap = max(QUAD_CAP, 2 * order)
    prev = estimate(order)
    while order < cap:
        order = min(2 * order, cap)
        cur = estimate(order)
        if abs(cur - prev) <= QUAD_RTOL * abs(cur):
            return cur
        prev = cur
    warnings.warn(f"pairing did not stabilise to {QUAD_RTOL:g} relative by order {cap}", QuadratureWarning, stacklevel=2)
    return prev


def character_table(rs: RootSystem, lam, grid) -> list[tuple[tuple[float, ...], complex]]:
    """``(X, weyl_character(lam, X))`` rows over a list of parameters (for CSV output)."""
    return [(tuple(np.ravel(X)), weyl_character(rs, lam, X)) for X in grid]


def harish_chandra_j(rs: RootSystem, X) -> complex:
    """``prod_{alpha>0} sinh(<alpha,X>/2) / (<alpha,X>/2)``, the square root of the exponential-map Jacobian."""
    t = _pairings(rs, as_parameter(X, rs.rank).astype(complex)) / 2
    return complex(np.prod(np.where(t == 0, 1.0, np.sinh(t) / np.where(t == 0, 1.0, t))))


__all__ = [
    "Bump",
    "TestFunction",
    "character_table",
    "character_weight_sum_oracle",
    "harish_chandra_j",
    "multiplicities_at",
    "noncompact_character",
    "orbit_fourier_sum",
    "pair_distribution",
    "weyl_character",
]
