import itertools
from fractions import Fraction

import numpy as np
import pytest

from eqloc.errors import ConfigError, HeightExceededError, ValidationError
from eqloc.roots import (
    CLASSICAL_ORDER,
    RootSystem,
    dominant_weights_up_to,
    weight_multiplicities,
    weyl_dimension,
    weyl_group,
)

TYPES = ["A1", "A2", "B2", "G2"]


@pytest.mark.parametrize("kind", TYPES)
def test_group_order(kind):
    rs = RootSystem.named(kind)
    group = weyl_group(rs)
    assert len(group) == CLASSICAL_ORDER[kind]
    keys = {tuple(np.round(m, 9).ravel()) for m, _ in group}
    assert len(keys) == len(group)


@pytest.mark.parametrize("kind", TYPES)
def test_signs_and_orthogonality(kind, rng):
    rs = RootSystem.named(kind)
    W = rs.weyl_group
    G = rs.gram
    for w in W:
        assert w.sign in (1, -1)
        assert w.sign == round(np.linalg.det(w.array))
        assert np.allclose(w.array.T @ G @ w.array, G)
        assert len(w.word) % 2 == (0 if w.sign == 1 else 1)
    mats = {tuple(np.round(w.array, 9).ravel()): w.sign for w in W}
    for _ in range(30):
        a, b = W[rng.integers(len(W))], W[rng.integers(len(W))]
        prod = tuple(np.round(a.array @ b.array, 9).ravel())
        assert mats[prod] == a.sign * b.sign


@pytest.mark.parametrize("kind", TYPES)
def test_root_closure(kind):
    rs = RootSystem.named(kind)
    pos = set(rs.positive_roots)
    for s in rs.weyl_group:
        if len(s.word) != 1:
            continue
        for a in pos:
            b = tuple(int(round(x)) for x in s.act(a))
            assert b in pos or tuple(-x for x in b) in pos


@pytest.mark.parametrize("kind, n_pos", [("A1", 1), ("A2", 3), ("B2", 4), ("G2", 6)])
def test_positive_roots_and_rho(kind, n_pos):
    rs = RootSystem.named(kind)
    assert len(rs.positive_roots) == n_pos
    # rho is the sum of fundamental weights, i.e. all Dynkin labels equal 1
    assert np.allclose(rs.rho, np.ones(rs.rank))
    for a in rs.simple_roots:
        assert rs.coroot_pairing(a, a) == pytest.approx(2.0)


def test_cartan_integers():
    rs = RootSystem.named("B2")
    A = [[rs.coroot_pairing(a, b) for b in rs.simple_roots] for a in rs.simple_roots]
    assert sorted([round(A[0][1]), round(A[1][0])]) == [-2, -1]


def test_unknown_type():
    with pytest.raises(ConfigError):
        RootSystem.named("E9")


def test_invalid_custom():
    with pytest.raises(ValidationError):
        RootSystem([(2, -1), (-1, 2)], [[1, 2], [3, 4]])
    with pytest.raises(ValidationError):
        RootSystem([(1, 1), (2, 2)], [[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        RootSystem([(2, -1), (-1, 2)], [[1, 0], [0, -1]])


def test_custom_round_trip():
    rs = RootSystem.named("A2")
    custom = RootSystem.from_config({"type": "custom", **{k: v for k, v in RootSystem(rs.simple_roots, rs.inner_product).to_config().items() if k != "type"}})
    assert custom.inner_product == rs.inner_product
    assert len(custom.weyl_group) == 6


def test_degenerate_form_rejected():
    # affine-type data: the form is only semidefinite, so the group would be infinite
    with pytest.raises(ValidationError):
        RootSystem([(2, -2), (-2, 2)], [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]])


def test_freudenthal_known_cases():
    A2 = RootSystem.named("A2")
    adj = weight_multiplicities(A2, (1, 1))
    assert sum(adj.values()) == 8
    assert adj[(0, 0)] == 2
    big = weight_multiplicities(A2, (2, 2))
    assert sum(big.values()) == 27 and big[(0, 0)] == 3
    A1 = RootSystem.named("A1")
    assert weight_multiplicities(A1, (2,)) == {(2,): 1, (0,): 1, (-2,): 1}
    B2 = RootSystem.named("B2")
    dims = sorted(sum(weight_multiplicities(B2, lam).values()) for lam in [(1, 0), (0, 1), (2, 0), (0, 2)])
    assert dims == [4, 5, 10, 14]


@pytest.mark.parametrize("kind", TYPES)
def test_freudenthal_dimension_and_invariance(kind):
    rs = RootSystem.named(kind)
    for lam in dominant_weights_up_to(rs, 4):
        mult = weight_multiplicities(rs, lam)
        assert sum(mult.values()) == round(weyl_dimension(rs, lam))
        for w in rs.weyl_group:
            for mu, m in mult.items():
                image = tuple(int(round(x)) for x in w.act(mu))
                assert mult.get(image) == m


def test_height_guard():
    rs = RootSystem.named("A2")
    with pytest.raises(HeightExceededError):
        weight_multiplicities(rs, (7, 6), max_height=12)
    assert rs.weight_height((3, 4)) == 7


def test_non_dominant_rejected():
    with pytest.raises(ValueError):
        weight_multiplicities(RootSystem.named("A2"), (1, -1))


def test_dominant_conjugate():
    rs = RootSystem.named("B2")
    for w in rs.weyl_group:
        mu = w.act([2, 1])
        assert np.allclose(rs.dominant_conjugate(mu), [2, 1])


def test_parameter_action_preserves_pairing(rng):
    rs = RootSystem.named("G2")
    for w in rs.weyl_group:
        mu, X = rng.normal(size=2), rng.normal(size=2)
        assert w.act(mu) @ w.act_on_parameter(X) == pytest.approx(mu @ X)


def test_dominant_weights_enumeration():
    rs = RootSystem.named("A2")
    got = dominant_weights_up_to(rs, 2)
    assert set(got) == {lab for lab in itertools.product(range(3), repeat=2) if sum(lab) <= 2}


def test_multiplicities_memoized_copy():
    rs = RootSystem.named("A2")
    first = weight_multiplicities(rs, (1, 1))
    first[(99, 99)] = 5
    assert (99, 99) not in weight_multiplicities(rs, (1, 1))
    with pytest.raises(HeightExceededError):
        weight_multiplicities(rs, (1, 1), max_height=1)
