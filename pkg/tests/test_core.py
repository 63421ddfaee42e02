import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqloc.core import (
    Chamber,
    FixedPointDatum,
    MultiplicityTable,
    ProblemSpec,
    dumps,
    load_problem,
    serialize,
    sign_vector,
    validate_regular,
    wall_tolerance,
)
from eqloc.errors import ChamberError, ConfigError, ValidationError
from eqloc.fixtures import FIXTURE_NAMES, cp2_spec, load_fixture, s2_spec

S2_DOC = {
    "manifold": {
        "name": "S2",
        "torus_rank": 1,
        "dim_complex": 1,
        "fixed_points": [
            {"label": "N", "moment": [1], "weights": [[1]], "sign": 1},
            {"label": "S", "moment": [-1], "weights": [[-1]], "sign": 1},
        ],
    }
}


def test_load_s2():
    problem = load_problem(json.dumps(S2_DOC))
    assert problem.spec.torus_rank == 1
    assert problem.spec.dim_complex == 1
    assert problem.spec.labels == ["N", "S"]
    assert problem.spec.point("S").weights == ((-1,),)
    assert problem.multiplicities is None and problem.root_system is None


def test_load_cp2_matches_fixture():
    doc = {
        "manifold": {
            "torus_rank": 2,
            "dim_complex": 2,
            "fixed_points": [
                {"label": "p0", "moment": [0, 0], "weights": [[1, 0], [0, 1]]},
                {"label": "p1", "moment": [1, 0], "weights": [[-1, 0], [-1, 1]]},
                {"label": "p2", "moment": [0, 1], "weights": [[1, -1], [0, -1]]},
            ],
        }
    }
    spec = load_problem(doc).spec
    assert spec.fixed_points == cp2_spec().fixed_points
    # weights at each vertex sum to the moment displacement pattern of the simplex
    assert np.all(spec.all_weights().sum(axis=0) == 0)


def _with_point(**changes):
    doc = json.loads(json.dumps(S2_DOC))
    doc["manifold"]["fixed_points"][0].update(changes)
    return doc


@pytest.mark.parametrize(
    "doc, field, text",
    [
        (_with_point(weights=[[0]]), "manifold.fixed_points[0].weights[0]", "zero isotropy weight"),
        (_with_point(weights=[[1, 2]]), "manifold.fixed_points[0].weights[0]", "length"),
        (_with_point(weights=[[1.5]]), "manifold.fixed_points[0].weights[0]", "integer"),
        (_with_point(label="S"), "manifold.fixed_points", "duplicate"),
        (_with_point(sign=2), "manifold.fixed_points[0].sign", "sign"),
        (_with_point(moment=[1, 2]), "manifold.fixed_points[0].moment", "length"),
        (_with_point(weights=[[1], [1]]), "manifold.fixed_points", "weights"),
    ],
)
def test_validation_errors_name_field(doc, field, text):
    with pytest.raises(ValidationError) as info:
        load_problem(doc)
    assert info.value.field.startswith(field)
    assert text in str(info.value)


def test_parse_error():
    with pytest.raises(ConfigError, match="parse error"):
        load_problem("{not json")
    with pytest.raises(ConfigError):
        load_problem("[1, 2]")


def test_missing_keys():
    with pytest.raises(ValidationError) as info:
        load_problem({"manifold": {"torus_rank": 1, "dim_complex": 1}})
    assert info.value.field == "manifold.fixed_points"
    with pytest.raises(ValidationError):
        load_problem({})


def test_cycle_missing_entry_and_default():
    doc = json.loads(json.dumps(S2_DOC))
    doc["cycle"] = {"chambers": [{"name": "pos", "sample_point": [1]}], "multiplicities": {"N": {"pos": 1}}}
    with pytest.raises(ValidationError) as info:
        load_problem(doc)
    assert info.value.field == "cycle.multiplicities.S"
    doc["cycle"]["default_multiplicity"] = 0
    mt = load_problem(doc).multiplicities
    assert mt.multiplicity("S", "pos") == 0 and mt.multiplicity("N", "pos") == 1


def test_cycle_singular_sample_point():
    doc = json.loads(json.dumps(S2_DOC))
    doc["cycle"] = {"chambers": [{"name": "bad", "sample_point": [0]}], "default_multiplicity": 1}
    with pytest.raises(ValidationError) as info:
        load_problem(doc)
    assert info.value.field == "cycle.chambers[0].sample_point"


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_round_trip_fixtures(name):
    problem = load_fixture(name)
    again = load_problem(dumps(problem))
    assert again.spec == problem.spec
    assert again.multiplicities == problem.multiplicities
    assert serialize(again) == serialize(problem)
    if problem.root_system is not None:
        assert again.root_system.simple_roots == problem.root_system.simple_roots


weights_st = st.lists(st.integers(-3, 3), min_size=2, max_size=2).filter(any)


@given(
    st.lists(
        st.tuples(st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.lists(weights_st, min_size=2, max_size=2), st.sampled_from([1, -1])),
        min_size=1,
        max_size=4,
    )
)
def test_round_trip_property(points):
    spec = ProblemSpec(
        "random", 2, 2, tuple(FixedPointDatum(f"q{i}", tuple(m), tuple(map(tuple, w)), s) for i, (m, w, s) in enumerate(points))
    )
    assert load_problem(json.dumps(serialize(spec))).spec == spec


def test_validate_regular_examples():
    assert validate_regular([1], s2_spec())
    verdict = validate_regular([0], s2_spec())
    assert not verdict
    assert {label for label, _ in verdict.vanishing} == {"N", "S"}
    verdict = validate_regular([1, 1], cp2_spec())
    assert not verdict
    assert all(w in ((1, -1), (-1, 1)) for _, w in verdict.vanishing)
    assert "singular" in verdict.describe()


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2), st.floats(1e-3, 1e3))
def test_regularity_homogeneous(X, c):
    spec = cp2_spec()
    assert bool(validate_regular(X, spec)) == bool(validate_regular(np.asarray(X) * c, spec))


def test_singular_grid_points_lie_on_weight_hyperplanes():
    spec = load_fixture("a2-flag").spec
    W = np.unique(spec.all_weights(), axis=0)
    # dense grid on the unit circle, including the exact wall directions
    angles = np.concatenate([np.linspace(0, 2 * math.pi, 3601), np.arctan2(-W[:, 0], W[:, 1])])
    reported = 0
    for a in angles:
        X = np.array([math.cos(a), math.sin(a)])
        if not validate_regular(X, spec):
            reported += 1
            tol = wall_tolerance(X, W)
            assert np.min(np.abs(W @ X)) <= tol
    assert reported >= len(W)


def test_chamber_lookup():
    problem = load_fixture("cp2")
    mt, spec = problem.multiplicities, problem.spec
    assert mt.chamber_of([3.0, 1.0], spec).name == "c0"
    assert mt.chamber_of([-0.5, 0.5], spec).name == "c2"
    table = MultiplicityTable((Chamber("only", (2.0, 1.0)),), {(p, "only"): 1 for p in spec.labels})
    with pytest.raises(ChamberError):
        table.chamber_of([-1.0, -2.0], spec)
    assert sign_vector([2.0, 1.0], spec) == sign_vector([5.0, 1.0], spec)
