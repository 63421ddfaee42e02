"""Built-in problem fixtures, addressable by name.

Convention for fixed-point data: the isotropy weights at a vertex of the
moment polytope point *away* from the polytope (the edges leave the vertex
along ``-w``).  With every orientation sign ``+1`` this makes the localized
volume and the Duistermaat-Heckman density positive.
"""

from __future__ import annotations

import numpy as np

from .core import Chamber, FixedPointDatum, MultiplicityTable, Problem, ProblemSpec
from .roots import RootSystem

FIXTURE_NAMES = ("s2", "cp1", "cp2", "a1-flag", "a2-flag", "sl2r-split")


def s2_spec() -> ProblemSpec:
    """Unit sphere, rotation about the z-axis, moment map = height."""
    return ProblemSpec(
        "S2",
        1,
        1,
        (
            FixedPointDatum("N", (1.0,), ((1,),), 1),
            FixedPointDatum("S", (-1.0,), ((-1,),), 1),
        ),
    )


def cp1_spec() -> ProblemSpec:
    """Projective line, Fubini-Study form scaled so the moment image is ``[0, 1]``."""
    return ProblemSpec(
        "CP1",
        1,
        1,
        (
            FixedPointDatum("p0", (0.0,), ((-1,),), 1),
            FixedPointDatum("p1", (1.0,), ((1,),), 1),
        ),
    )


def cp2_spec() -> ProblemSpec:
    """Projective plane with the standard 2-torus action; moment image the unit simplex."""
    return ProblemSpec(
        "CP2",
        2,
        2,
        (
            FixedPointDatum("p0", (0.0, 0.0), ((1, 0), (0, 1)), 1),
            FixedPointDatum("p1", (1.0, 0.0), ((-1, 0), (-1, 1)), 1),
            FixedPointDatum("p2", (0.0, 1.0), ((1, -1), (0, -1)), 1),
        ),
    )


def word_label(word) -> str:
    return "e" if not word else "s" + "".join(str(i + 1) for i in word)


def flag_spec(rs: RootSystem, xi=None, name=None) -> ProblemSpec:
    """Full flag variety of ``rs``: one fixed point per Weyl element ``w``.

    The moment image at ``w`` is ``w xi`` (default ``xi = rho``) and the
    isotropy weights are ``w alpha`` for the positive roots ``alpha``.
    """
    xi = rs.rho if xi is None else np.asarray(xi, dtype=float)
    points = []
    for w in rs.weyl_group:
        weights = tuple(tuple(int(round(c)) for c in w.act(a)) for a in rs.positive_roots)
        points.append(FixedPointDatum(word_label(w.word), tuple(w.act(xi)), weights, 1))
    return ProblemSpec(name or f"{rs.name}-flag", rs.rank, len(rs.positive_roots), tuple(points))


def weyl_chambers(rs: RootSystem, base=None) -> tuple[Chamber, ...]:
    """The Weyl chambers, each sampled at ``w base`` (``base`` dominant regular)."""
    if base is None:
        base = np.linalg.solve(np.array(rs.simple_roots, dtype=float), np.ones(rs.rank))
    return tuple(Chamber("C_" + word_label(w.word), tuple(w.act_on_parameter(base))) for w in rs.weyl_group)


def sl2r_split_spec(nu: float = 0.5) -> ProblemSpec:
    """Split-Cartan fixed-point data of the SL(2,R) flag variety.

    Two real fixed points with moments ``+-nu`` and weights ``+-2`` in the
    normalization ``<alpha, H> = 2``.  The orientation signs differ, so the
    two terms add rather than cancel and the cone sum is not compactly
    supported (the orbit is not compact).
    """
    return ProblemSpec(
        "sl2r-split",
        1,
        1,
        (
            FixedPointDatum("p_plus", (nu,), ((2,),), 1),
            FixedPointDatum("p_minus", (-nu,), ((-2,),), -1),
        ),
    )


SPLIT_CHAMBERS = (Chamber("split_pos", (1.0,)), Chamber("split_neg", (-1.0,)))


def sl2r_tables(spec: ProblemSpec) -> dict[str, MultiplicityTable]:
    """Multiplicity tables on the two split chambers.

    ``principal``: m = 1 everywhere.  ``discrete``: m = (1, 0) on both
    chambers.  ``switching``: (1, 0) for t > 0 and (0, 1) for t < 0.
    """
    ch = SPLIT_CHAMBERS
    return {
        "principal": MultiplicityTable.constant(spec, ch, 1),
        "discrete": MultiplicityTable(ch, {("p_plus", c.name): 1 for c in ch} | {("p_minus", c.name): 0 for c in ch}),
        "switching": MultiplicityTable(
            ch,
            {
                ("p_plus", "split_pos"): 1,
                ("p_minus", "split_pos"): 0,
                ("p_plus", "split_neg"): 0,
                ("p_minus", "split_neg"): 1,
            },
        ),
    }


def parity_table(rs: RootSystem, spec: ProblemSpec) -> MultiplicityTable:
    """Flag-variety table ``m_w(C_v) = 1`` iff ``eps(w) == eps(v)``; invariant under all of W."""
    chambers = weyl_chambers(rs)
    sign_of = {word_label(w.word): w.sign for w in rs.weyl_group}
    entries = {}
    for p in spec.fixed_points:
        for c in chambers:
            entries[(p.label, c.name)] = int(sign_of[p.label] == sign_of[c.name[2:]])
    return MultiplicityTable(chambers, entries)


def load_fixture(name: str) -> Problem:
    """A built-in :class:`Problem` (spec, m = 1 table on declared chambers, root system)."""
    if name == "s2":
        spec = s2_spec()
        return Problem(spec, MultiplicityTable.constant(spec, (Chamber("pos", (1.0,)), Chamber("neg", (-1.0,)))))
    if name == "cp1":
        spec = cp1_spec()
        return Problem(spec, MultiplicityTable.constant(spec, (Chamber("pos", (1.0,)), Chamber("neg", (-1.0,)))))
    if name == "cp2":
        spec = cp2_spec()
        pts = [(2.0, 1.0), (1.0, 2.0), (-1.0, 1.0), (-2.0, -1.0), (-1.0, -2.0), (1.0, -1.0)]
        chambers = tuple(Chamber(f"c{k}", p) for k, p in enumerate(pts))
        return Problem(spec, MultiplicityTable.constant(spec, chambers))
    if name in ("a1-flag", "a2-flag"):
        rs = RootSystem.named(name[:2].upper())
        spec = flag_spec(rs)
        return Problem(spec, MultiplicityTable.constant(spec, weyl_chambers(rs)), rs)
    if name == "sl2r-split":
        spec = sl2r_split_spec()
        return Problem(spec, sl2r_tables(spec)["discrete"], RootSystem.named("A1"))
    raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
