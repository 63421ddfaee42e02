"""Fixed-point localization of equivariant integrals.

For an equivariantly closed form ``alpha`` on a compact manifold whose torus
action has isolated fixed points,

    integral = (2 pi)^n * sum_p alpha_0(p, X) / e_p(X),
    e_p(X)   = sign_p * prod_j <w_pj, X>,

where ``n`` is the complex dimension.  The sign and the power of ``2 pi`` are
calibrated so the round sphere gives ``2 pi (e^t - e^-t) / t`` for the
exponential of its height function.  Complex ``X`` is accepted and evaluated
by the same rational-exponential expression (experimental).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import FixedPointDatum, ProblemSpec, as_parameter, validate_regular, wall_tolerance
from .errors import InconsistencyError, MissingEntryError, SingularParameterError

KINDS = ("exp", "const", "euler", "table")


@dataclass(frozen=True)
class ExpPolyTerm:
    """``coef * prod_k X_k^powers[k] * exp(<rate, X>)``."""

    coef: float
    rate: tuple[float, ...]
    powers: tuple[int, ...] = ()

    def __call__(self, X):
        X = np.asarray(X)
        mono = 1.0
        for x, k in zip(X, self.powers):
            mono = mono * x**k
        return self.coef * mono * np.exp(np.dot(self.rate, X))


@dataclass(frozen=True)
class LocalizedIntegrand:
    """Degree-zero part ``alpha_0(p, X)`` of an equivariantly closed form.

    Use the constructors :meth:`exponential_of_moment`, :meth:`constant`,
    :meth:`euler_form` and :meth:`table`.
    """

    kind: str
    value: float = 1.0
    entries: Mapping[str, tuple[ExpPolyTerm, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown integrand kind {self.kind!r}")

    @classmethod
    def exponential_of_moment(cls):
        return cls("exp")

    @classmethod
    def constant(cls, c: float = 1.0):
        return cls("const", value=float(c))

    @classmethod
    def euler_form(cls):
        return cls("euler")

    @classmethod
    def table(cls, entries: Mapping[str, Sequence]):
        """``entries[label]`` is a list of :class:`ExpPolyTerm` or ``(coef, rate[, powers])`` tuples."""
        norm = {}
        for label, terms in entries.items():
            norm[label] = tuple(t if isinstance(t, ExpPolyTerm) else ExpPolyTerm(t[0], tuple(t[1]), tuple(t[2]) if len(t) > 2 else ()) for t in terms)
        return cls("table", entries=norm)

    def check_covers(self, spec: ProblemSpec) -> None:
        if self.kind != "table":
            return
        missing = [lab for lab in spec.labels if lab not in self.entries]
        if missing:
            raise MissingEntryError(f"integrand table has no entry for fixed point(s) {missing}")

    def evaluate(self, p: FixedPointDatum, X):
        if self.kind == "exp":
            return np.exp(np.dot(p.moment, X))
        if self.kind == "const":
            return self.value
        if self.kind == "euler":
            return euler_factor(p, X)
        try:
            terms = self.entries[p.label]
        except KeyError:
            raise MissingEntryError(f"integrand table has no entry for fixed point {p.label!r}") from None
        return sum(t(X) for t in terms)

    def __add__(self, other):
        if self.kind != "table" or other.kind != "table":
            return NotImplemented
        labels = set(self.entries) | set(other.entries)
        return LocalizedIntegrand.table({k: self.entries.get(k, ()) + other.entries.get(k, ()) for k in labels})


def euler_factor(p: FixedPointDatum, X, tol: float | None = None):
    """``sign_p * prod_j <w_pj, X>``; raises when a pairing is within the wall tolerance."""
    X = as_parameter(X, len(p.moment))
    W = p.weight_matrix
    if tol is None:
        tol = wall_tolerance(X, W)
    pairings = W @ X
    if np.any(np.abs(pairings) <= tol):
        raise SingularParameterError(f"singular parameter: a weight of fixed point {p.label!r} vanishes at X={np.asarray(X).tolist()}")
    return p.sign * np.prod(pairings)


def _check_regular(spec, X):
    verdict = validate_regular(X, spec)
    if not verdict:
        raise SingularParameterError(f"singular parameter X={np.asarray(X).tolist()}: {verdict.describe()}")


def weighted_fixed_point_sum(spec: ProblemSpec, X, f: LocalizedIntegrand, multiplicity=None):
    """``(2 pi)^n * sum_p m_p * f(p, X) / e_p(X)``; ``multiplicity`` maps label -> int (default all 1)."""
    X = as_parameter(X, spec.torus_rank)
    _check_regular(spec, X)
    f.check_covers(spec)
    tol = wall_tolerance(X, spec.all_weights())
    total = 0.0
    for p in spec.fixed_points:
        m = 1 if multiplicity is None else multiplicity[p.label]
        if m == 0:
            continue
        total = total + m * (f.evaluate(p, X) / euler_factor(p, X, tol))
    return (2 * math.pi) ** spec.dim_complex * total


def localize_integral(spec: ProblemSpec, X, f: LocalizedIntegrand):
    """Integral of the equivariant form ``f`` over the manifold described by ``spec``.

    Raises
    ------
    SingularParameterError
        ``X`` lies on a weight hyperplane.
    MissingEntryError
        ``f`` is a table missing some fixed point.
    """
    return weighted_fixed_point_sum(spec, X, f)


def euler_characteristic(spec: ProblemSpec, X=None, rng=None) -> int:
    """Euler characteristic as the localized integral of the equivariant Euler form."""
    if X is None:
        X = random_regular_parameter(spec, rng if rng is not None else np.random.default_rng(0))
    value = localize_integral(spec, X, LocalizedIntegrand.euler_form()) / (2 * math.pi) ** spec.dim_complex
    chi = round(float(np.real(value)))
    if abs(value - chi) > 1e-6:
        raise InconsistencyError(f"Euler characteristic evaluated to non-integer {value}")
    return int(chi)


def random_regular_parameter(spec: ProblemSpec, rng, scale: float = 1.0, margin: float = 0.2, tries: int = 10000):
    """A Gaussian random ``X`` with every weight pairing at least ``margin * scale`` in modulus."""
    W = spec.all_weights()
    for _ in range(tries):
        X = scale * rng.standard_normal(spec.torus_rank)
        if np.min(np.abs(W @ X)) >= margin * scale:
            return X
    raise RuntimeError("could not sample a regular parameter")
