"""Root systems, Weyl groups and weight multiplicities.

Coordinates: weights are integer vectors in a fixed lattice basis (for the
named types this is the basis of fundamental weights, so a highest weight is
given by its Dynkin labels).  A Cartan parameter ``X`` uses the dual basis,
so ``<mu, X> = mu @ X``.  The invariant inner product on weights is the
rational matrix ``inner_product``.

Weyl group elements are stored exactly (``fractions.Fraction``) while the
closure is computed; float copies are used for evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from .errors import ConfigError, HeightExceededError, ValidationError

MAX_GROUP_ORDER = 10**6

_CARTAN = {
    # Cartan matrix A[i][j] = <alpha_i, alpha_j^vee>, plus squared root lengths.
    "A1": ([[2]], [2]),
    "A2": ([[2, -1], [-1, 2]], [2, 2]),
    "B2": ([[2, -2], [-1, 2]], [2, 1]),
    "G2": ([[2, -3], [-1, 2]], [6, 2]),
}

CLASSICAL_ORDER = {"A1": 2, "A2": 6, "B2": 8, "G2": 12}


def _frac_matrix(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)) for i in range(n))


def _det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return sum((-1) ** j * a[0][j] * _det(tuple(row[:j] + row[j + 1:] for row in a[1:])) for j in range(n))


def _inverse(a):
    # Gauss-Jordan over the rationals
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element acting on weight coordinates (columns)."""

    matrix: tuple[tuple[Fraction, ...], ...]
    sign: int
    word: tuple[int, ...] = ()

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @cached_property
    def parameter_array(self) -> np.ndarray:
        """Matrix of the induced action on parameters, ``<w mu, w X> = <mu, X>``."""
        return np.linalg.inv(self.array).T

    def act(self, mu) -> np.ndarray:
        return self.array @ np.asarray(mu, dtype=float)

    def act_on_parameter(self, X) -> np.ndarray:
        return self.parameter_array @ np.asarray(X)


@dataclass(frozen=True)
class RootSystem:
    """A reduced root system given by simple roots and an invariant inner product.

    Parameters
    ----------
    simple_roots : sequence of integer vectors
    inner_product : symmetric positive-definite rational matrix on weight coordinates
    name : str, optional
    """

    simple_roots: tuple[tuple[int, ...], ...]
    inner_product: tuple[tuple[Fraction, ...], ...]
    name: str = "custom"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        sr = tuple(tuple(int(c) for c in a) for a in self.simple_roots)
        object.__setattr__(self, "simple_roots", sr)
        object.__setattr__(self, "inner_product", _frac_matrix(self.inner_product))
        r = len(sr)
        if r == 0 or any(len(a) != r for a in sr):
            raise ValidationError("need rank-many simple roots of length rank", "root_system.simple_roots")
        G = self.inner_product
        if len(G) != r or any(len(row) != r for row in G):
            raise ValidationError(f"inner product must be {r}x{r}", "root_system.inner_product")
        if any(G[i][j] != G[j][i] for i in range(r) for j in range(r)):
            raise ValidationError("inner product must be symmetric", "root_system.inner_product")
        if np.min(np.linalg.eigvalsh(np.array(G, dtype=float))) <= 0:
            raise ValidationError("inner product must be positive definite", "root_system.inner_product")
        if _det(_frac_matrix(sr)) == 0:
            raise ValidationError("simple roots are linearly dependent", "root_system.simple_roots")

    # -- construction ----------------------------------------------------

    @classmethod
    def named(cls, kind: str) -> "RootSystem":
        """Root system of type ``A1``, ``A2``, ``B2`` or ``G2`` in the fundamental-weight basis."""
        try:
            cartan, lengths = _CARTAN[kind]
        except KeyError:
            raise ConfigError(f"unknown root system type {kind!r}") from None
        r = len(cartan)
        # (alpha_i, alpha_j) = A[i][j] * |alpha_j|^2 / 2
        B = _frac_matrix([[Fraction(cartan[i][j] * lengths[j], 2) for j in range(r)] for i in range(r)])
        S = _frac_matrix(cartan)
        Sinv = _inverse(S)
        G = _matmul(_matmul(Sinv, B), tuple(zip(*Sinv)))
        return cls(tuple(tuple(row) for row in cartan), G, kind)

    @classmethod
    def from_config(cls, tree) -> "RootSystem":
        if not isinstance(tree, dict) or "type" not in tree:
            raise ValidationError("expected a mapping with key 'type'", "root_system")
        kind = tree["type"]
        if kind != "custom":
            return cls.named(kind)
        try:
            sr = tree["simple_roots"]
            # decimals written for non-terminating fractions (e.g. 2/3) are snapped back
            ip = [[Fraction(str(x)).limit_denominator(10**6) for x in row] for row in tree["inner_product"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad custom root system ({exc})", "root_system") from None
        return cls(sr, ip, "custom")

    def to_config(self) -> dict:
        if self.name in _CARTAN:
            return {"type": self.name}
        return {
            "type": "custom",
            "simple_roots": [list(a) for a in self.simple_roots],
            "inner_product": [[float(x) if x.denominator != 1 else int(x) for x in row] for row in self.inner_product],
        }

    # -- basic data ------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.simple_roots)

    def ip(self, a, b):
        """Exact inner product of two weight vectors."""
        G = self.inner_product
        return sum(Fraction(a[i]) * G[i][j] * Fraction(b[j]) for i in range(self.rank) for j in range(self.rank))

    @cached_property
    def gram(self) -> np.ndarray:
        return np.array(self.inner_product, dtype=float)

    def _reflection(self, i):
        a = self.simple_roots[i]
        aa = self.ip(a, a)
        r = self.rank
        cols = []
        for j in range(r):
            e = [Fraction(int(k == j)) for k in range(r)]
            c = 2 * self.ip(e, a) / aa
            cols.append([e[k] - c * a[k] for k in range(r)])
        return tuple(tuple(cols[j][k] for j in range(r)) for k in range(r))

    @cached_property
    def simple_reflections(self):
        return tuple(self._reflection(i) for i in range(self.rank))

    @cached_property
    def weyl_group(self) -> tuple[WeylElement, ...]:
        """All elements, generated from the simple reflections by breadth-first closure."""
        r = self.rank
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))
        seen = {ident: ()}
        frontier = [ident]
        while frontier:
            nxt = []
            for m in frontier:
                for i, s in enumerate(self.simple_reflections):
                    g = _matmul(s, m)
                    if g not in seen:
                        seen[g] = (i,) + seen[m]
                        nxt.append(g)
                        if len(seen) > MAX_GROUP_ORDER:
                            raise ValidationError("Weyl group too large; root system is not finite", "root_system")
            frontier = nxt
        return tuple(WeylElement(m, int(_det(m)), word) for m, word in seen.items())

    @cached_property
    def positive_roots(self) -> tuple[tuple[int, ...], ...]:
        """Positive roots, i.e. Weyl images of simple roots with nonnegative simple-root coordinates."""
        Sinv = np.linalg.inv(np.array(self.simple_roots, dtype=float))
        found = set()
        for w in self.weyl_group:
            for a in self.simple_roots:
                b = w.act(a)
                bi = tuple(int(round(x)) for x in b)
                coords = np.array(bi, dtype=float) @ Sinv
                if np.all(coords > -1e-9):
                    found.add(bi)
        return tuple(sorted(found, key=lambda b: (self.height_of_root(b), b)))

    def height_of_root(self, beta) -> int:
        coords = np.asarray(beta, dtype=float) @ np.linalg.inv(np.array(self.simple_roots, dtype=float))
        return int(round(coords.sum()))

    @cached_property
    def rho(self) -> np.ndarray:
        """Half the sum of the positive roots."""
        return 0.5 * np.sum(np.array(self.positive_roots, dtype=float), axis=0)

    @cached_property
    def positive_root_array(self) -> np.ndarray:
        return np.array(self.positive_roots, dtype=float)

    def coroot_pairing(self, mu, alpha) -> float:
        mu = np.asarray(mu, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return 2 * (mu @ self.gram @ alpha) / (alpha @ self.gram @ alpha)

    def is_dominant_integral(self, lam) -> bool:
        lam = np.asarray(lam, dtype=float)
        for a in self.simple_roots:
            c = self.coroot_pairing(lam, a)
            if c < -1e-9 or abs(c - round(c)) > 1e-9:
                return False
        return True

    def dominant_conjugate(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        for _ in range(10 * len(self.weyl_group) + 10):
            for i, a in enumerate(self.simple_roots):
                c = self.coroot_pairing(mu, a)
                if c < -1e-9:
                    mu = mu - c * np.asarray(a, dtype=float)
                    break
            else:
                return mu
        raise RuntimeError("dominant conjugate did not converge")

    def weyl_denominator(self, X):
        """``prod_{alpha>0} (exp(<alpha,X>/2) - exp(-<alpha,X>/2))``."""
        t = self.positive_root_array @ np.asarray(X)
        return np.prod(np.exp(t / 2) - np.exp(-t / 2))

    def alternating_sum(self, xi, X):
        """``sum_w eps(w) exp(<w xi, X>)``."""
        xi = np.asarray(xi, dtype=float)
        X = np.asarray(X)
        total = 0j
        for w in self.weyl_group:
            total += w.sign * np.exp(w.act(xi) @ X)
        return total

    def weight_height(self, lam) -> int:
        """Height of a dominant weight: sum of its Dynkin labels."""
        return int(round(sum(self.coroot_pairing(lam, a) for a in self.simple_roots)))


def weyl_group(rs: RootSystem) -> list[tuple[np.ndarray, int]]:
    """Weyl group of ``rs`` as ``(matrix, sign)`` pairs acting on weight coordinates."""
    return [(w.array, w.sign) for w in rs.weyl_group]


def weight_multiplicities(rs: RootSystem, lam, max_height: int = 12) -> dict[tuple[int, ...], int]:
    """Weight multiplicities of the irreducible module of highest weight ``lam``.

    Freudenthal's recursion, run level by level down from ``lam`` over the
    weights ``lam - sum n_i alpha_i`` lying in the convex hull of the orbit
    ``W lam``.  Results are memoized on ``rs``; a fresh dict is returned.
    """
    lam = tuple(int(round(x)) for x in np.asarray(lam, dtype=float))
    if not rs.is_dominant_integral(lam):
        raise ValueError(f"{np.asarray(lam).tolist()} is not dominant integral")
    if rs.weight_height(lam) > max_height:
        raise HeightExceededError(f"highest weight {np.asarray(lam).tolist()} has height above {max_height}")
    key = ("multiplicities", lam)
    if key not in rs._cache:
        rs._cache[key] = _freudenthal(rs, lam)
    return dict(rs._cache[key])


def _freudenthal(rs: RootSystem, lam: tuple[int, ...]) -> dict[tuple[int, ...], int]:
    S = np.array(rs.simple_roots, dtype=int)
    Sinv = np.linalg.inv(S.astype(float))
    lam_arr = np.array(lam, dtype=float)
    rho = rs.rho
    pos = [np.array(a, dtype=int) for a in rs.positive_roots]

    def in_hull(mu):
        d = rs.dominant_conjugate(np.array(mu, dtype=float))
        return np.all((lam_arr - d) @ Sinv > -1e-9)

    def norm2(v):
        v = np.asarray(v, dtype=float)
        return v @ rs.gram @ v

    top = norm2(lam_arr + rho)
    mult = {lam: 1}
    level = 0
    current = {lam}
    while current:
        level += 1
        nxt = set()
        for mu in current:
            for a in S:
                nu = tuple(np.array(mu) - a)
                if nu not in mult and nu not in nxt and in_hull(nu):
                    nxt.add(nu)
        for mu in nxt:
            mu_arr = np.array(mu, dtype=float)
            acc = 0.0
            for a in pos:
                k = 1
                while True:
                    nu = tuple(np.array(mu) + k * a)
                    if nu not in mult:
                        # beyond the top of the string through mu
                        if not in_hull(nu):
                            break
                    else:
                        acc += mult[nu] * ((mu_arr + k * a) @ rs.gram @ a)
                    k += 1
            denom = top - norm2(mu_arr + rho)
            m = 2 * acc / denom
            mult[mu] = int(round(m))
        current = {mu for mu in nxt if mult[mu] > 0}
        for mu in nxt:
            if mult[mu] == 0:
                del mult[mu]
    return mult


def weyl_dimension(rs: RootSystem, lam) -> float:
    """``prod_{alpha>0} (lam+rho, alpha) / (rho, alpha)``."""
    lam = np.asarray(lam, dtype=float)
    out = 1.0
    for a in rs.positive_root_array:
        out *= ((lam + rs.rho) @ rs.gram @ a) / (rs.rho @ rs.gram @ a)
    return out


def dominant_weights_up_to(rs: RootSystem, max_height: int) -> list[tuple[int, ...]]:
    """All dominant integral weights with Dynkin-label sum at most ``max_height``.

    Only valid for coordinates in the fundamental-weight basis, where the
    Dynkin labels are the coordinates themselves.
    """
    out = []
    for labels in product(range(max_height + 1), repeat=rs.rank):
        if sum(labels) <= max_height:
            out.append(tuple(labels))
    return out
