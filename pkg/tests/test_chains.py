import json
import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors

from looptop.chains import (
    ChainComplex,
    ChainComplexError,
    ChainMapData,
    DistinguishedPoint,
    FilteredChainComplex,
    FiltrationError,
    NotUnitError,
    check_filtration_preserving,
    commutator,
    compare_reduced,
    complex_from_dict,
    compose_maps,
    filtration_window_homology,
    homology,
    invert_upper_triangular,
    is_identity,
    quotient_homology,
    random_complex,
    reduced_complex,
    tensor_complex,
    verify_chain_map,
    verify_commutator_relation,
    verify_homotopy,
)
from looptop.rings import F2, GF, QQ, ZZ
from builders import filtered_triangular, homotopy_triple, identity_map, perturb, random_map

POINT = ChainComplex({0: ["q0"]})


def h(C, ring=None):
    return {k: (g.rank, g.torsion) for k, g in homology(C, ring).items()}


# -- construction

def test_d_squared_enforced():
    with pytest.raises(ChainComplexError):
        ChainComplex({0: ["y"], 1: ["x"], 2: ["w"]}, {1: [[1]], 2: [[1]]})


def test_shape_and_name_errors():
    with pytest.raises(ChainComplexError):
        ChainComplex({0: ["a"], 1: ["b"]}, {1: [[1, 2]]})
    with pytest.raises(ChainComplexError):
        ChainComplex({0: ["a"], 1: ["a"]})


def test_json_round_trip():
    data = {"ring": "Z", "degrees": [{"degree": 0, "generators": [{"name": "y", "filtration": 0}]},
                                     {"degree": 1, "generators": [{"name": "x", "filtration": 1}]}],
            "boundaries": [{"degree": 1, "matrix": [[3]]}]}
    C, filt = complex_from_dict(data)
    assert filt == {"y": 0.0, "x": 1.0}
    C2, filt2 = complex_from_dict(json.loads(json.dumps(C.to_dict(filt))))
    assert C2 == C and filt2 == filt


# -- homology

def test_homology_examples():
    assert h(ChainComplex({1: ["a", "b"]})) == {1: (2, ())}
    assert h(ChainComplex({0: ["y"], 1: ["x"]}, {1: [[2]]})) == {0: (0, (2,)), 1: (0, ())}
    circle = ChainComplex({0: ["p"], 1: ["e"]})
    assert h(circle) == {0: (1, ()), 1: (1, ())}


def oracle_homology(C):
    """Ranks and torsion from sympy invariant factors (independent of our SNF)."""
    out = {}
    for k in C.degrees:
        d_out, d_in = C.boundary(k), C.boundary(k + 1)
        r_out = sympy.Matrix(d_out.tolist()).rank() if d_out.size else 0
        f_in = [abs(int(x)) for x in invariant_factors(sympy.Matrix(d_in.tolist())) if x != 0] if d_in.size else []
        out[k] = (C.dim(k) - r_out - len(f_in), tuple(t for t in f_in if t > 1))
    return out


def test_homology_against_sympy_oracle():
    rng = random.Random(3)
    for _ in range(60):
        C, _ = random_complex(rng, 12)
        assert h(C) == oracle_homology(C)


@pytest.mark.parametrize("seed", range(40))
def test_universal_coefficients(seed):
    C, _ = random_complex(random.Random(seed), 12)
    HZ = homology(C)
    for p in (2, 3):
        Hp = homology(C, GF(p))
        for k in C.degrees:
            tors = lambda j: sum(1 for t in HZ[j].torsion if t % p == 0) if j in HZ else 0
            assert Hp[k].rank == HZ[k].rank + tors(k) + tors(k - 1)
        assert {k: g.rank for k, g in homology(C, QQ).items()} == {k: g.rank for k, g in HZ.items()}


# -- reduced complex

def test_reduced_point():
    dp = DistinguishedPoint("q0", 2)
    assert h(reduced_complex(POINT, dp))[0] == (0, (2,))
    assert reduced_complex(POINT, DistinguishedPoint("q0", 0)) is POINT
    P2 = ChainComplex({0: ["q0"]}, ring=F2)
    assert reduced_complex(P2, dp) is P2
    assert compare_reduced(POINT, dp).ok
    assert compare_reduced(POINT, DistinguishedPoint("q0", 0)).ok


def test_reduced_unit_chi_drops_point():
    C = ChainComplex({0: ["q0", "y"], 1: ["x"]}, {1: [[0], [0]]}, QQ)
    R = reduced_complex(C, DistinguishedPoint("q0", 2))
    assert R.generators[0] == ("y",)


def test_hypothesis_failure_reported():
    C = ChainComplex({0: ["q0"], 1: ["x"]}, {1: [[1]]})
    rep = compare_reduced(C, DistinguishedPoint("q0", 2))
    assert not rep.hypothesis_holds and rep.equal is None and "hypothesis" in rep.note


def test_reduced_requires_cycle():
    C = ChainComplex({0: ["y"], 1: ["q0"]}, {1: [[1]]})
    with pytest.raises(ChainComplexError):
        reduced_complex(C, DistinguishedPoint("q0", 2))


def test_compare_reduced_random():
    rng = random.Random(11)
    checked = 0
    while checked < 100:
        C, q0 = random_complex(rng, 10)
        rep = compare_reduced(C, DistinguishedPoint(q0, rng.choice([-3, -2, 2, 3, 4])))
        if rep.hypothesis_holds:
            assert rep.equal, rep.as_dict()
            checked += 1


def test_reduced_is_functorial():
    """An inclusion C → C ⊕ (x → y) fixing q0 induces a chain map of the reduced complexes."""
    rng = random.Random(5)
    for _ in range(30):
        C, q0 = random_complex(rng, 8)
        lo = min(C.degrees)
        gens = {k: list(v) for k, v in C.generators.items()}
        gens.setdefault(lo + 1, []).append("x")
        gens[lo].append("y")
        bounds = {}
        for k in gens:
            m = np.zeros((len(gens.get(k - 1, [])), len(gens[k])), dtype=object)
            d = C.boundary(k)
            m[: d.shape[0], : d.shape[1]] = d
            bounds[k] = m
        bounds[lo + 1][-1, -1] = 1
        D = ChainComplex(gens, {k: m.tolist() for k, m in bounds.items()})
        incl = ChainMapData(0, {k: np.eye(D.dim(k), C.dim(k), dtype=int).astype(object) for k in C.degrees})
        assert verify_chain_map(incl, C, D).ok
        dp = DistinguishedPoint(q0, 3)
        RC, RD = reduced_complex(C, dp), reduced_complex(D, dp)
        mats = {}
        for k in RC.degrees:
            m = np.zeros((RD.dim(k), RC.dim(k)), dtype=object)
            for j, g in enumerate(RC.generators[k]):
                m[RD.locate(g)[1], j] = 1
            mats[k] = m
        assert verify_chain_map(ChainMapData(0, mats), RC, RD).ok


def test_quotient_over_field():
    C = ChainComplex({0: ["q0", "y"]}, ring=GF(3))
    assert quotient_homology(C, DistinguishedPoint("q0", 2))[0].rank == 1


# -- verifiers

def test_chain_map_identity_zero_random():
    rng = random.Random(2)
    C, _ = random_complex(rng, 8)
    assert verify_chain_map(identity_map(C), C, C).ok
    assert verify_chain_map(ChainMapData(0, {}), C, C).ok
    found = False
    for _ in range(20):
        C, _ = random_complex(rng, 8)
        rep = verify_chain_map(random_map(rng, C, 0), C, C)
        if not rep.ok:
            assert rep.violations[0].input.startswith("degree")
            found = True
    assert found


@given(st.integers(0, 10_000), st.integers(-2, 3))
@settings(max_examples=40, deadline=None)
def test_commutator_is_chain_map_with_degree_sign(seed, degree):
    # ∂[∂,Γ] = -(-1)^g ∂Γ∂ = (-1)^(g-1) [∂,Γ]∂, which is the pinned rule ∂F = (-1)^deg F · F∂
    rng = random.Random(seed)
    C, _ = random_complex(rng, 8)
    F = commutator(random_map(rng, C, degree), C, C)
    assert F.degree == degree - 1
    assert verify_chain_map(F, C, C).ok


@pytest.mark.parametrize("s,ok", [(-1, True), (1, False)])
def test_odd_degree_sign_rule(s, ok):
    # ∂a = b, ∂v = w; F of degree 1 with b ↦ w, a ↦ s·v.  In degree 1:
    # ∂F(a) = s·w and (-1)^1 F∂(a) = -w, so only s = -1 is a chain map.
    G = ChainComplex({0: ["b"], 1: ["a", "w"], 2: ["v"]}, {1: [[1, 0]], 2: [[0], [1]]})
    F = ChainMapData(1, {0: [[0], [1]], 1: [[s, 0]]})
    assert verify_chain_map(F, G, G).ok is ok


def test_homotopy_examples():
    rng = random.Random(9)
    C, F, G, H = homotopy_triple(rng)
    assert verify_homotopy(F, G, H, C, C).ok
    assert verify_homotopy(G, G, ChainMapData(1, {}), C, C).ok
    with pytest.raises(ChainComplexError):
        verify_homotopy(F, G, ChainMapData(0, {}), C, C)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_homotopy_property(seed):
    rng = random.Random(seed)
    C, F, G, H = homotopy_triple(rng)
    assert verify_homotopy(F, G, H, C, C).ok
    bad = perturb(rng, F, C)
    if bad is not None:
        rep = verify_homotopy(bad, G, H, C, C)
        assert len(rep.violations) == 1


@given(st.integers(0, 10_000), st.integers(-1, 2))
@settings(max_examples=60, deadline=None)
def test_commutator_relation(seed, degree):
    rng = random.Random(seed)
    C, _ = random_complex(rng, 8)
    gamma = random_map(rng, C, degree)
    rhs = commutator(gamma, C, C)
    assert verify_commutator_relation(gamma, [rhs], C).ok
    assert verify_commutator_relation(gamma, [(2, rhs), (-1, rhs)], C).ok
    assert verify_commutator_relation(ChainMapData(degree, {}), [ChainMapData(degree - 1, {})], C).ok


def test_tensor_complex_kunneth():
    S1 = ChainComplex({0: ["p"], 1: ["e"]})
    T = tensor_complex(S1, S1)
    assert h(T) == {0: (1, ()), 1: (2, ()), 2: (1, ())}
    M = ChainComplex({0: ["y"], 1: ["x"]}, {1: [[2]]})
    assert h(tensor_complex(M, S1))[1] == (0, (2,))


# -- filtrations

def test_filtration_strictness():
    C = ChainComplex({0: ["y"], 1: ["x"]}, {1: [[1]]})
    with pytest.raises(FiltrationError):
        FilteredChainComplex(C, {"x": 1.0, "y": 1.0})
    FilteredChainComplex(C, {"x": 1.0, "y": 1.0}, strict=False)
    with pytest.raises(FiltrationError):
        FilteredChainComplex(C, {"x": 1.0, "y": 2.0}, strict=False)


def test_filtration_preserving_examples():
    C = ChainComplex({0: ["a", "b"]})
    S = FilteredChainComplex(C, {"a": 1.0, "b": 2.0})
    assert check_filtration_preserving(identity_map(C), S, S)
    assert not check_filtration_preserving(ChainMapData(0, {0: [[1, 0], [1, 1]]}), S, S)
    assert check_filtration_preserving(ChainMapData(0, {0: [[-1, 5], [0, 1]]}), S, S)


def test_invert_examples():
    C = ChainComplex({0: ["a", "b"]})
    S = FilteredChainComplex(C, {"a": 2.0, "b": 1.0})
    F = ChainMapData(0, {0: [[1, 0], [7, -1]]})
    inv = invert_upper_triangular(F, S, S)
    assert inv.matrix(0, C, C).tolist() == [[1, 0], [7, -1]]
    assert is_identity(invert_upper_triangular(identity_map(C), S, S), C)
    with pytest.raises(NotUnitError, match="not a unit"):
        invert_upper_triangular(ChainMapData(0, {0: [[1, 0], [7, 2]]}), S, S)


@given(st.integers(0, 10_000), st.integers(1, 25))
@settings(max_examples=40, deadline=None)
def test_invert_property(seed, n):
    rng = random.Random(seed)
    S, F = filtered_triangular(rng, n)
    C = S.complex
    inv = invert_upper_triangular(F, S, S)
    assert is_identity(compose_maps(inv, F, C, C, C), C)
    assert is_identity(compose_maps(F, inv, C, C, C), C)


def test_invert_over_field_accepts_nonunit_integers():
    C = ChainComplex({0: ["a"]}, ring=QQ)
    S = FilteredChainComplex(C, {"a": 0.0})
    inv = invert_upper_triangular(ChainMapData(0, {0: [[2]]}), S, S)
    assert inv.matrix(0, C, C)[0, 0] * 2 == 1


def test_window_homology_examples():
    C = ChainComplex({0: ["y", "z"], 1: ["x"]}, {1: [[1], [0]]})
    S = FilteredChainComplex(C, {"y": 1.0, "x": 2.0, "z": 5.0})
    assert h_window(S, 4, 6) == {0: (1, ()), 1: (0, ())}
    assert h_window(S, 10, 11) == {0: (0, ()), 1: (0, ())}
    assert h_window(S, 0, 3) == {0: (0, ()), 1: (0, ())}
    assert h_window(S, 1.5, 3) == {0: (0, ()), 1: (1, ())}
    with pytest.raises(FiltrationError):
        h_window(S, 2, 3)


def h_window(S, a, b):
    return {k: (g.rank, g.torsion) for k, g in filtration_window_homology(S, a, b).items()}
