"""Domain types, configuration ingestion and regularity logic.

A manifold with a torus action is described entirely by its fixed-point
data: for every isolated fixed point we store the moment image, the integer
isotropy weights and an orientation sign.  Parameters ``X`` of the Cartan
subalgebra are plain numpy vectors; :func:`as_parameter` validates them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ChamberError, ConfigError, ValidationError

#: relative factor in the wall tolerance ``eps * |X| * max|w|``
WALL_EPS = 1e-9

Weight = tuple[int, ...]


def as_parameter(X, rank: int | None = None) -> np.ndarray:
    """Return ``X`` as a 1-D float (or complex) array, checking shape and finiteness."""
    arr = np.atleast_1d(np.asarray(X))
    if arr.ndim != 1:
        raise ValueError(f"parameter must be a vector, got shape {arr.shape}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    if rank is not None and arr.shape[0] != rank:
        raise ValueError(f"parameter has length {arr.shape[0]}, expected {rank}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameter has non-finite coordinates")
    return arr


def _as_weight(w, rank, where) -> Weight:
    try:
        values = list(w)
    except TypeError:
        raise ValidationError("weight must be a list of integers", where) from None
    out = []
    for k, c in enumerate(values):
        if isinstance(c, bool) or not isinstance(c, (int, np.integer, float)):
            raise ValidationError("weights must be integers", f"{where}[{k}]")
        if isinstance(c, float) and not float(c).is_integer():
            raise ValidationError("weights must be integers", f"{where}[{k}]")
        out.append(int(c))
    if len(out) != rank:
        raise ValidationError(f"weight has length {len(out)}, expected torus rank {rank}", where)
    if not any(out):
        raise ValidationError("zero isotropy weight", where)
    return tuple(out)


@dataclass(frozen=True)
class FixedPointDatum:
    """One isolated zero of the action: moment image, isotropy weights, orientation."""

    label: str
    moment: tuple[float, ...]
    weights: tuple[Weight, ...]
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "moment", tuple(float(m) for m in self.moment))
        if not all(math.isfinite(m) for m in self.moment):
            raise ValidationError("moment has non-finite entries", f"{self.label}.moment")
        rank = len(self.moment)
        ws = tuple(
            _as_weight(w, rank, f"{self.label}.weights[{j}]") for j, w in enumerate(self.weights)
        )
        object.__setattr__(self, "weights", ws)
        if self.sign not in (1, -1):
            raise ValidationError("sign must be +1 or -1", f"{self.label}.sign")

    @property
    def weight_matrix(self) -> np.ndarray:
        return np.array(self.weights, dtype=float).reshape(len(self.weights), len(self.moment))


@dataclass(frozen=True)
class ProblemSpec:
    """A compact manifold with torus action, given by its fixed-point data."""

    name: str
    torus_rank: int
    dim_complex: int
    fixed_points: tuple[FixedPointDatum, ...]

    def __post_init__(self):
        object.__setattr__(self, "fixed_points", tuple(self.fixed_points))
        if not isinstance(self.torus_rank, int) or self.torus_rank < 1:
            raise ValidationError("must be a positive integer", "torus_rank")
        if not isinstance(self.dim_complex, int) or self.dim_complex < 1:
            raise ValidationError("must be a positive integer", "dim_complex")
        if not self.fixed_points:
            raise ValidationError("at least one fixed point is required", "fixed_points")
        seen = set()
        for i, p in enumerate(self.fixed_points):
            where = f"fixed_points[{i}]"
            if p.label in seen:
                raise ValidationError(f"duplicate label {p.label!r}", f"{where}.label")
            seen.add(p.label)
            if len(p.moment) != self.torus_rank:
                raise ValidationError(
                    f"moment has length {len(p.moment)}, expected torus rank {self.torus_rank}",
                    f"{where}.moment",
                )
            if len(p.weights) != self.dim_complex:
                raise ValidationError(
                    f"{len(p.weights)} weights given, expected dim_complex = {self.dim_complex}",
                    f"{where}.weights",
                )

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.fixed_points]

    def point(self, label: str) -> FixedPointDatum:
        for p in self.fixed_points:
            if p.label == label:
                return p
        raise KeyError(label)

    def all_weights(self) -> np.ndarray:
        """Every isotropy weight of every fixed point, stacked as rows."""
        return np.vstack([p.weight_matrix for p in self.fixed_points])


def wall_tolerance(X, weights) -> float:
    X = np.asarray(X)
    W = np.asarray(weights, dtype=float)
    wmax = float(np.max(np.linalg.norm(W, axis=1))) if W.size else 0.0
    return WALL_EPS * float(np.linalg.norm(X)) * wmax


@dataclass(frozen=True)
class Regularity:
    """Verdict of :func:`validate_regular`; truthy iff regular."""

    vanishing: tuple[tuple[str, Weight], ...] = ()

    @property
    def regular(self) -> bool:
        return not self.vanishing

    def __bool__(self):
        return self.regular

    def describe(self) -> str:
        if self.regular:
            return "regular"
        pairs = ", ".join(f"{label}:{list(w)}" for label, w in self.vanishing)
        return f"singular (vanishing pairings at {pairs})"


def validate_regular(X, spec: ProblemSpec) -> Regularity:
    """Check that no isotropy weight of ``spec`` annihilates ``X``."""
    X = as_parameter(X, spec.torus_rank)
    tol = wall_tolerance(X, spec.all_weights())
    bad = []
    for p in spec.fixed_points:
        for w in p.weights:
            if abs(np.dot(w, X)) <= tol:
                bad.append((p.label, w))
    return Regularity(tuple(bad))


def sign_vector(X, spec: ProblemSpec) -> tuple[int, ...]:
    """Signs of all weight pairings at ``X`` (real part); identifies the chamber."""
    X = np.real(as_parameter(X, spec.torus_rank))
    return tuple(int(s) for s in np.sign(spec.all_weights() @ X))


@dataclass(frozen=True)
class Chamber:
    name: str
    sample_point: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sample_point", tuple(float(c) for c in self.sample_point))


@dataclass(frozen=True)
class MultiplicityTable:
    """Chamber-wise integer multiplicities ``(label, chamber) -> m``."""

    chambers: tuple[Chamber, ...]
    entries: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "chambers", tuple(self.chambers))
        object.__setattr__(self, "entries", dict(self.entries))

    def validate_for(self, spec: ProblemSpec) -> None:
        names = set()
        for i, ch in enumerate(self.chambers):
            where = f"cycle.chambers[{i}]"
            if ch.name in names:
                raise ValidationError(f"duplicate chamber {ch.name!r}", where)
            names.add(ch.name)
            if len(ch.sample_point) != spec.torus_rank:
                raise ValidationError(
                    f"sample point has length {len(ch.sample_point)}, expected {spec.torus_rank}",
                    f"{where}.sample_point",
                )
            verdict = validate_regular(ch.sample_point, spec)
            if not verdict:
                raise ValidationError(f"sample point is {verdict.describe()}", f"{where}.sample_point")
        for label in spec.labels:
            for ch in self.chambers:
                if (label, ch.name) not in self.entries:
                    raise ValidationError(
                        f"no multiplicity for chamber {ch.name!r}", f"cycle.multiplicities.{label}"
                    )
        for label, chname in self.entries:
            if label not in spec.labels:
                raise ValidationError("unknown fixed point", f"cycle.multiplicities.{label}")
            if chname not in names:
                raise ValidationError(f"unknown chamber {chname!r}", f"cycle.multiplicities.{label}")

    def chamber_of(self, X, spec: ProblemSpec) -> Chamber:
        """The declared chamber containing ``X``, matched by weight-pairing signs."""
        target = sign_vector(X, spec)
        for ch in self.chambers:
            if sign_vector(ch.sample_point, spec) == target:
                return ch
        raise ChamberError(f"parameter {np.ravel(X).tolist()} lies in no declared chamber")

    def multiplicity(self, label: str, chamber: str) -> int:
        return self.entries[(label, chamber)]

    @classmethod
    def constant(cls, spec: ProblemSpec, chambers: Sequence[Chamber], value: int = 1):
        return cls(tuple(chambers), {(p, c.name): value for p in spec.labels for c in chambers})


@dataclass(frozen=True)
class Problem:
    """A loaded configuration document."""

    spec: ProblemSpec
    multiplicities: MultiplicityTable | None = None
    root_system: Any = None


# -- configuration documents -------------------------------------------------


def _require(tree, key, where):
    if not isinstance(tree, Mapping):
        raise ValidationError("expected a mapping", where)
    if key not in tree:
        raise ValidationError("missing required key", f"{where}.{key}" if where else key)
    return tree[key]


def _number_list(values, where) -> list[float]:
    if not isinstance(values, (list, tuple)):
        raise ValidationError("expected a list of numbers", where)
    out = []
    for k, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError("expected a number", f"{where}[{k}]")
        out.append(float(v))
    return out


def _parse_spec(tree) -> ProblemSpec:
    m = tree
    points = _require(m, "fixed_points", "manifold")
    if not isinstance(points, list):
        raise ValidationError("expected a list", "manifold.fixed_points")
    rank = _require(m, "torus_rank", "manifold")
    n = _require(m, "dim_complex", "manifold")
    if isinstance(rank, bool) or not isinstance(rank, int):
        raise ValidationError("must be a positive integer", "manifold.torus_rank")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValidationError("must be a positive integer", "manifold.dim_complex")
    fps = []
    for i, p in enumerate(points):
        where = f"manifold.fixed_points[{i}]"
        label = _require(p, "label", where)
        moment = _number_list(_require(p, "moment", where), f"{where}.moment")
        raw_w = _require(p, "weights", where)
        if not isinstance(raw_w, list):
            raise ValidationError("expected a list of weights", f"{where}.weights")
        weights = [_as_weight(w, rank, f"{where}.weights[{j}]") for j, w in enumerate(raw_w)]
        sign = p.get("sign", 1)
        if sign not in (1, -1) or isinstance(sign, bool):
            raise ValidationError("sign must be +1 or -1", f"{where}.sign")
        if len(moment) != rank:
            raise ValidationError(f"moment has length {len(moment)}, expected torus rank {rank}", f"{where}.moment")
        fps.append(FixedPointDatum(str(label), tuple(moment), tuple(weights), int(sign)))
    try:
        return ProblemSpec(str(m.get("name", "unnamed")), rank, n, tuple(fps))
    except ValidationError as exc:
        raise ValidationError(str(exc).split(": ", 1)[-1], f"manifold.{exc.field}") from None


def _parse_cycle(tree, spec: ProblemSpec) -> MultiplicityTable:
    raw_ch = _require(tree, "chambers", "cycle")
    if not isinstance(raw_ch, list):
        raise ValidationError("expected a list", "cycle.chambers")
    chambers = []
    for i, c in enumerate(raw_ch):
        where = f"cycle.chambers[{i}]"
        chambers.append(
            Chamber(str(_require(c, "name", where)), tuple(_number_list(_require(c, "sample_point", where), f"{where}.sample_point")))
        )
    mults = tree.get("multiplicities", {})
    if not isinstance(mults, Mapping):
        raise ValidationError("expected a mapping", "cycle.multiplicities")
    entries = {}
    for label, row in mults.items():
        if not isinstance(row, Mapping):
            raise ValidationError("expected a mapping chamber -> integer", f"cycle.multiplicities.{label}")
        for chname, m in row.items():
            if isinstance(m, bool) or not isinstance(m, int):
                raise ValidationError("multiplicity must be an integer", f"cycle.multiplicities.{label}.{chname}")
            entries[(str(label), str(chname))] = m
    if "default_multiplicity" in tree:
        default = tree["default_multiplicity"]
        if isinstance(default, bool) or not isinstance(default, int):
            raise ValidationError("must be an integer", "cycle.default_multiplicity")
        for label in spec.labels:
            for ch in chambers:
                entries.setdefault((label, ch.name), default)
    table = MultiplicityTable(tuple(chambers), entries)
    table.validate_for(spec)
    return table


def load_problem(config_document) -> Problem:
    """Parse and validate a configuration document.

    Parameters
    ----------
    config_document : str or Mapping
        JSON text, or an already-parsed key-value tree with top-level keys
        ``manifold`` and optionally ``cycle`` and ``root_system``.

    Raises
    ------
    ConfigError
        Malformed text.
    ValidationError
        A value violates an invariant; the message names the field.
    """
    if isinstance(config_document, (str, bytes)):
        try:
            tree = json.loads(config_document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"parse error: {exc}") from None
    else:
        tree = config_document
    if not isinstance(tree, Mapping):
        raise ConfigError("configuration must be a mapping at top level")
    spec = _parse_spec(_require(tree, "manifold", ""))
    table = _parse_cycle(tree["cycle"], spec) if tree.get("cycle") is not None else None
    rs = None
    if tree.get("root_system") is not None:
        from .roots import RootSystem

        rs = RootSystem.from_config(tree["root_system"])
    return Problem(spec, table, rs)


def serialize(problem) -> dict:
    """Inverse of :func:`load_problem`, as a JSON-compatible tree."""
    if isinstance(problem, ProblemSpec):
        problem = Problem(problem)
    spec = problem.spec
    tree: dict[str, Any] = {
        "manifold": {
            "name": spec.name,
            "torus_rank": spec.torus_rank,
            "dim_complex": spec.dim_complex,
            "fixed_points": [
                {
                    "label": p.label,
                    "moment": list(p.moment),
                    "weights": [list(w) for w in p.weights],
                    "sign": p.sign,
                }
                for p in spec.fixed_points
            ],
        }
    }
    mt = problem.multiplicities
    if mt is not None:
        mults: dict[str, dict[str, int]] = {}
        for (label, ch), m in mt.entries.items():
            mults.setdefault(label, {})[ch] = m
        tree["cycle"] = {
            "chambers": [{"name": c.name, "sample_point": list(c.sample_point)} for c in mt.chambers],
            "multiplicities": mults,
        }
    if problem.root_system is not None:
        tree["root_system"] = problem.root_system.to_config()
    return tree


def dumps(problem) -> str:
    return json.dumps(serialize(problem), sort_keys=True, indent=2)
