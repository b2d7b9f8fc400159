import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctphan.amalgam import (
    AmalgamSpec,
    SpecError,
    brute_force_isomorphic,
    build_kappa,
    class_count,
    classify,
    iso_decide,
    kappa,
    make_standard,
    noncollapse_precheck,
    normalize,
    orientation_check,
    realize,
    realized_orientable,
    strip_tori,
    verify_witness,
    vertex_spaces,
)
from ctphan.diagram import Diagram, Edge, cycle, path

LOOP_TA3 = Diagram(2, range(4), [Edge(0, 1, "TA3", 1), Edge(1, 2, "A2", 1),
                                 Edge(2, 3, "TA3", 2), Edge(0, 3, "A2", 0)])
DIAGRAMS = {
    "A3": path(2, ["A2", "A2"]),
    "C2path": path(2, ["A2", "C2"], [None, 1]),
    "loop4": cycle(2, ["A2"] * 4),
    "loopC2": cycle(2, ["C2", "A2", "A2", "A2"]),
    "loop4_q3": cycle(3, ["A2"] * 4),
}


def random_spec(rng, d, kind, density=1.0):
    sp = vertex_spaces(kind, d)
    return AmalgamSpec(kind, d, {(a, b): rng.choice(sp[a].all()) for a in d.vertices
                                 for b in d.vertices if a != b and rng.random() < density})


specs = st.builds(
    lambda name, kind, seed: random_spec(random.Random(seed), DIAGRAMS[name], kind),
    st.sampled_from(sorted(DIAGRAMS)), st.sampled_from(["ct", "phan"]), st.integers(0, 10 ** 6))


@settings(max_examples=40, deadline=None)
@given(specs)
def test_normalize_is_idempotent(spec):
    nf, k, _ = normalize(spec)
    nf2, k2, w2 = normalize(nf)
    assert k2.coords == k.coords
    assert nf2.delta == nf.delta
    assert all(a.is_identity() for a in w2.phi.values())


@settings(max_examples=25, deadline=None)
@given(specs)
def test_witness_verifies(spec):
    nf, _, w = normalize(spec)
    assert verify_witness(spec, nf, w)["ok"]


@settings(max_examples=25, deadline=None)
@given(specs, st.integers(0, 10 ** 6))
def test_iso_is_an_equivalence(spec, seed):
    rng = random.Random(seed)
    other = random_spec(rng, spec.diagram, spec.kind)
    same, ka, kb = iso_decide(spec, other)
    assert iso_decide(spec, spec)[0]
    assert iso_decide(other, spec)[0] == same
    assert iso_decide(spec, build_kappa(spec.diagram, spec.kind, ka.coords))[0]


@pytest.mark.parametrize("name", ["loop4", "loopC2"])
@pytest.mark.parametrize("kind", ["ct", "phan"])
def test_kappa_agrees_with_brute_force(name, kind):
    rng = random.Random(7)
    d = DIAGRAMS[name]
    for _ in range(6):
        a, b = random_spec(rng, d, kind, 0.4), random_spec(rng, d, kind, 0.4)
        assert iso_decide(a, b)[0] == brute_force_isomorphic(a, b)[0]


def test_kappa_on_ta3_loop_agrees_with_brute_force():
    reps = [build_kappa(LOOP_TA3, "ct", k.coords) for k in classify(LOOP_TA3, "ct")]
    assert len(reps) == 2
    assert not brute_force_isomorphic(*reps)[0]
    rng = random.Random(3)
    for _ in range(3):
        s = random_spec(rng, LOOP_TA3, "ct", 0.5)
        target = build_kappa(LOOP_TA3, "ct", kappa(s).coords)
        assert brute_force_isomorphic(s, target)[0]


@pytest.mark.parametrize("d,kind,count", [
    (path(4, ["A2", "A2", "A2"]), "ct", 1),
    (cycle(2, ["A2"] * 4), "ct", 2),
    (cycle(4, ["A2"] * 4), "ct", 4),
    (cycle(8, ["A2"] * 4), "ct", 6),
    (cycle(2, ["A2"] * 4), "phan", 2),
    (cycle(4, ["A2"] * 4), "phan", 4),
    (LOOP_TA3, "ct", 2),
])
def test_class_counts(d, kind, count):
    assert class_count(d, kind) == count == len(classify(d, kind))


def test_round_trip_every_class():
    d = cycle(4, ["A2"] * 4)
    for k in classify(d, "ct"):
        assert kappa(build_kappa(d, "ct", k.coords)).coords == k.coords


def test_strip_tori_leaves_c_parts():
    rng = random.Random(1)
    s = random_spec(rng, cycle(3, ["A2"] * 4), "ct")
    out, w = strip_tori(s)
    assert all(a.t == 1 for a in out.delta.values())
    assert verify_witness(s, out, w)["ok"]


def test_spec_json_round_trip():
    rng = random.Random(5)
    s = random_spec(rng, cycle(3, ["C2", "A2", "A2", "A2"]), "ct")
    obj = json.loads(json.dumps(s.to_json()))
    back = AmalgamSpec.from_json(obj)
    assert back.delta == s.delta and back.diagram == s.diagram


def test_spec_rejections():
    with pytest.raises(SpecError):
        make_standard(cycle(2, ["A2"] * 3), "ct")
    with pytest.raises(SpecError):
        make_standard(path(2, ["TA3"], [1]), "phan")
    obj = make_standard(path(2, ["A2"]), "ct").to_json()
    obj["delta"] = [{"from": 0, "to": 0, "r": 0, "s": 1}]
    with pytest.raises(SpecError):
        AmalgamSpec.from_json(obj)
    obj["delta"] = [{"from": 0, "to": 1, "r": 0, "s": 1, "x": 0}]
    with pytest.raises(SpecError):
        AmalgamSpec.from_json(obj)
    with pytest.raises(SpecError):
        build_kappa(cycle(2, ["A2"] * 4), "ct", [(0, 2)])


def test_realization_of_standard_is_noncollapsing():
    for kind in ("ct", "phan"):
        s = make_standard(cycle(2, ["C2", "A2", "A2", "A2"]), kind)
        assert noncollapse_precheck(s).ok
        R = realize(s)
        assert len(R.images) == 4 * 3


@pytest.mark.parametrize("d", [path(2, ["A2", "A2"]), cycle(2, ["A2"] * 4),
                               cycle(3, ["C2", "A2", "A2", "A2"]), LOOP_TA3])
def test_orientation_rule_matches_realized_check(d):
    rng = random.Random(11)
    cases = [build_kappa(d, "ct", k.coords) for k in classify(d, "ct")]
    cases += [random_spec(rng, d, "ct", 0.5) for _ in range(3)]
    for s in cases:
        assert orientation_check(s)[0] == realized_orientable(s)


def test_orientation_of_loop_classes():
    d = cycle(2, ["A2"] * 4)
    got = {k.coords: orientation_check(build_kappa(d, "ct", k.coords))[0] for k in classify(d, "ct")}
    assert got == {((0, 0),): True, ((0, 1),): False}
    assert all(orientation_check(s)[0] for s in
               (random_spec(random.Random(n), path(2, ["A2", "A2"]), "ct") for n in range(5)))


def test_representatives_pairwise_distinct_by_search():
    d = cycle(3, ["A2"] * 4)
    reps = [build_kappa(d, "phan", k.coords) for k in classify(d, "phan")]
    for a, b in itertools.combinations(reps, 2):
        assert not brute_force_isomorphic(a, b)[0]
