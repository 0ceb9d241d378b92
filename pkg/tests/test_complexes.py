"""Complex shapes, coils, approximations, and the module dictionary."""

import random

import pytest

from _support import (F101, point_pool, rand_complex, rand_homotopy,
                      rand_qrep)
from arcat.complexes import (Approximation, Cyclic, Interval, NChainMap,
                             NComplex, NComplexSpec, Window, assemble_null_homotopic,
                             build_category, chain_map_from_module, chain_maps,
                             coil_epi, complex_direct_sum, factor_null_homotopy,
                             find_null_homotopy, from_module, from_rep,
                             hard_truncate, interval_J, interval_J_map,
                             pad_complex, right_approximation, stalk,
                             stalk_filtration_certificate, to_module, to_rep,
                             zero_complex)
from arcat.errors import PreconditionError, VerificationError
from arcat.fincat import point_category
from arcat.linalg import Mat, solve, hstack
from arcat.modcat import (CModule, ModuleMap, almost_split_sequence, ar_quiver,
                          identity_map, is_isomorphic, verify_almost_split,
                          zero_map)
from arcat.repcat import f_star_v, tensor_base

PT, POOL = point_pool(F101)
K1 = POOL[0]


def interval_module_count(m: int, n: int) -> int:
    """Supports of length at most n inside [1, m], one module each."""
    return sum(min(n, m - i + 1) for i in range(1, m + 1))


def test_spec_validation():
    with pytest.raises(PreconditionError):
        NComplexSpec(1, Interval(3))
    with pytest.raises(PreconditionError):
        NComplexSpec(2, Window(2, 1))
    with pytest.raises(PreconditionError):
        NComplexSpec(2, Cyclic(0))
    NComplexSpec(1, Cyclic(1))


def test_build_category_shapes():
    b = build_category(NComplexSpec(2, Interval(3)))
    assert b.quiver.vertices == ("1", "2", "3")
    assert sorted(g.arrows for g in b.ideal.generators) == [("a1", "a2")]
    assert build_category(NComplexSpec(2, Interval(2))).ideal.generators == frozenset()
    c = build_category(NComplexSpec(2, Cyclic(2)))
    assert sorted(g.arrows for g in c.ideal.generators) == [("a0", "a1"), ("a1", "a0")]
    loop = build_category(NComplexSpec(1, Cyclic(1)))
    assert sorted(g.arrows for g in loop.ideal.generators) == [("a0", "a0")]
    w = build_category(NComplexSpec(3, Window(-1, 3)))
    assert w.quiver.vertices == ("-1", "0", "1", "2", "3")
    assert sorted(g.arrows for g in w.ideal.generators) == \
        [("a-1", "a0", "a1"), ("a0", "a1", "a2")]


def test_complex_validation_rejects_bad_window():
    spec = NComplexSpec(2, Interval(3))
    ident = ModuleMap(K1, K1, {"pt": Mat.identity(F101, 1)})
    with pytest.raises(PreconditionError):
        NComplex(spec, PT, {1: K1, 2: K1, 3: K1}, {1: ident, 2: ident})


def test_interval_j_shapes():
    spec = NComplexSpec(3, Window(0, 3))
    j = interval_J(spec, 0, K1)
    assert j.degree_dims() == {0: 1, 1: 1, 2: 1, 3: 0}
    assert j.composite(0, 2).comps["pt"] == Mat.identity(F101, 1)
    doubled = interval_J(NComplexSpec(1, Cyclic(1)), 0, K1)
    assert doubled.degree_dims() == {0: 2}
    d = doubled.differentials[0].comps["pt"]
    assert [d.at(0, 0), d.at(0, 1), d.at(1, 0), d.at(1, 1)] == \
        [F101.zero(), F101.zero(), F101.one(), F101.zero()]
    two = interval_J(NComplexSpec(2, Cyclic(2)), 0, K1)
    assert two.degree_dims() == {0: 1, 1: 1}
    assert two.differentials[0].comps["pt"] == Mat.identity(F101, 1)
    assert two.differentials[1].is_zero()
    with pytest.raises(PreconditionError):
        interval_J(NComplexSpec(3, Window(0, 3)), 2, K1)


def test_interval_j_is_induction():
    cases = [(NComplexSpec(2, Interval(3)), "1"),
             (NComplexSpec(2, Interval(3)), "2"),
             (NComplexSpec(2, Cyclic(2)), "0"),
             (NComplexSpec(1, Cyclic(1)), "0")]
    for spec, v in cases:
        bq = build_category(spec)
        assert to_rep(interval_J(spec, int(v), K1), bq) == f_star_v(bq, v, K1)


def test_module_roundtrip_all_shapes():
    rng = random.Random(808)
    for spec in (NComplexSpec(2, Interval(3)), NComplexSpec(3, Window(-1, 2)),
                 NComplexSpec(2, Cyclic(3))):
        base = tensor_base(build_category(spec), PT)
        for _ in range(4):
            x = rand_complex(spec, PT, POOL, rng)
            assert from_rep(spec, to_rep(x)) == x
            m = to_module(x, base)
            assert from_module(spec, m) == x


def test_coil_epi_shapes_and_split_on_coils():
    spec = NComplexSpec(2, Interval(3))
    st = stalk(spec, 2, K1)
    ce = coil_epi(st)
    assert ce.blocks == [1, 2, 3]
    assert ce.padded.degree_dims() == {1: 0, 2: 1, 3: 0, 4: 0}
    assert ce.source.degree_dims() == {1: 0, 2: 1, 3: 1, 4: 0}
    assert ce.p.is_surjective()
    z = interval_J(spec.padded(), 1, K1)
    cz = coil_epi(z)
    idx = cz.blocks.index(1)
    section = cz.injections[idx]
    back = section.then(cz.p)
    ident = NChainMap(cz.padded, cz.padded,
                      {i: identity_map(cz.padded.components[i])
                       for i in cz.padded.spec.degrees()})
    assert back == ident


def test_coil_epi_surjective_on_random_complexes():
    rng = random.Random(909)
    for spec in (NComplexSpec(2, Interval(3)), NComplexSpec(3, Window(0, 3)),
                 NComplexSpec(2, Cyclic(2)), NComplexSpec(2, Cyclic(3))):
        for _ in range(4):
            z = rand_complex(spec, PT, POOL, rng)
            assert coil_epi(z).p.is_surjective()
    assert coil_epi(zero_complex(NComplexSpec(2, Interval(2)), PT)).p.is_zero()


def test_null_homotopy_factorization_random():
    rng = random.Random(1010)
    for spec in (NComplexSpec(2, Interval(3)), NComplexSpec(3, Window(0, 3)),
                 NComplexSpec(2, Cyclic(2))):
        for _ in range(4):
            z = rand_complex(spec, PT, POOL, rng)
            zp = rand_complex(spec, PT, POOL, rng)
            ce = coil_epi(z)
            src = pad_complex(zp, ce.padded.spec) if not spec.cyclic else zp
            s = rand_homotopy(src, ce.padded, rng)
            l = assemble_null_homotopic(src, ce.padded, s)
            lifted = factor_null_homotopy(l, ce)
            assert lifted.then(ce.p) == l


def test_null_homotopy_order_one_cycle():
    spec = NComplexSpec(1, Cyclic(1))
    k2 = CModule(PT, {"pt": 2}, {("pt", "pt", 0): Mat.identity(F101, 2)})
    d = ModuleMap(k2, k2, {"pt": Mat(F101, 2, 2,
                                     [F101.zero(), F101.one(),
                                      F101.zero(), F101.zero()])})
    z = NComplex(spec, PT, {0: k2}, {0: d})
    ce = coil_epi(z)
    assert ce.source.degree_dims() == {0: 4}
    l = NChainMap(z, z, {0: d})
    lifted = factor_null_homotopy(l, ce)
    assert lifted.then(ce.p) == l


def test_non_homotopic_map_is_reported():
    spec = NComplexSpec(2, Interval(3))
    st = stalk(spec, 2, K1)
    ident = NChainMap(st, st, {i: identity_map(st.components[i])
                               for i in spec.degrees()})
    assert find_null_homotopy(ident) is None
    with pytest.raises(PreconditionError):
        factor_null_homotopy(ident, coil_epi(st))


def test_hard_truncate():
    spec = NComplexSpec(2, Window(0, 2))
    j0 = interval_J(spec, 0, K1)
    assert hard_truncate(j0, 1) == stalk(spec, 1, K1)
    assert hard_truncate(hard_truncate(j0, 1), 1) == hard_truncate(j0, 1)
    assert hard_truncate(j0, 0) == j0
    assert hard_truncate(j0, 3).is_zero()
    with pytest.raises(PreconditionError):
        hard_truncate(stalk(NComplexSpec(2, Cyclic(2)), 0, K1), 1)


def test_right_approximation_certificates():
    rng = random.Random(1111)
    spec = NComplexSpec(2, Interval(3))
    padded = spec.padded()
    gens = [interval_J(padded, j, K1) for j in (1, 2, 3)]
    for _ in range(3):
        z = rand_complex(spec, PT, POOL, rng)
        ap = right_approximation(z, gens)
        assert all(ap.certified)
        assert ap.chain_map.is_surjective()
    empty = right_approximation(rand_complex(spec, PT, POOL, rng), [])
    assert empty.chain_map.is_surjective()
    assert empty.certified == []


def test_right_approximation_splits_on_generator():
    spec = NComplexSpec(2, Cyclic(2))
    z = interval_J(spec, 0, K1)
    ap = right_approximation(z, [z])
    flat_basis = [f.then(ap.chain_map) for f in chain_maps(ap.padded, ap.source)]
    from arcat.complexes import _chain_flat
    ident = NChainMap(ap.padded, ap.padded,
                      {i: identity_map(ap.padded.components[i])
                       for i in spec.degrees()})
    mat = hstack([_chain_flat(f) for f in flat_basis])
    assert solve(mat, _chain_flat(ident)) is not None


def test_stalk_filtration():
    spec = NComplexSpec(2, Cyclic(2))
    filt = stalk_filtration_certificate(interval_J(spec, 0, K1))
    assert [(j, m.total_dim()) for j, m in filt.steps] == [(1, 1), (0, 1)]
    single = stalk_filtration_certificate(stalk(spec, 1, K1))
    assert [(j, m.total_dim()) for j, m in single.steps] == [(1, 1)]
    rng = random.Random(1212)
    for _ in range(5):
        x = rand_complex(spec, PT, POOL, rng)
        f = stalk_filtration_certificate(x)
        assert f is not None
        assert sum(m.total_dim() for _, m in f.steps) == x.total_dim()
    with pytest.raises(PreconditionError):
        stalk_filtration_certificate(stalk(NComplexSpec(2, Interval(2)), 1, K1))


def test_indecomposable_counts_match_interval_oracle():
    for m, n in ((2, 2), (3, 2), (3, 3), (4, 2)):
        spec = NComplexSpec(n, Interval(m))
        base = tensor_base(build_category(spec), PT)
        knitted = ar_quiver(base)
        assert len(knitted.modules) == interval_module_count(m, n)


def test_transported_almost_split_sequence():
    spec = NComplexSpec(2, Cyclic(2))
    base = tensor_base(build_category(spec), PT)
    knitted = ar_quiver(base)
    assert len(knitted.modules) == 4
    non_proj = [z for z, pr in zip(knitted.modules, knitted.projective)
                if not pr]
    assert len(non_proj) == 2
    for z in non_proj:
        ass = almost_split_sequence(z)
        verify_almost_split(ass.sequence, knitted.modules)
        left = from_module(spec, ass.sequence.left)
        mid = from_module(spec, ass.sequence.middle)
        right = from_module(spec, ass.sequence.right)
        inc = chain_map_from_module(spec, ass.sequence.include, left, mid)
        pro = chain_map_from_module(spec, ass.sequence.project, mid, right)
        assert inc.then(pro).is_zero()


def test_direct_sum_and_pad():
    spec = NComplexSpec(2, Interval(2))
    st1 = stalk(spec, 1, K1)
    st2 = stalk(spec, 2, K1)
    total, injs, projs = complex_direct_sum([st1, st2], spec, PT)
    assert total.degree_dims() == {1: 1, 2: 1}
    assert injs[0].then(projs[0]).comps[1] == identity_map(K1)
    wide = pad_complex(st1, NComplexSpec(2, Window(0, 3)))
    assert wide.degree_dims() == {0: 0, 1: 1, 2: 0, 3: 0}
    with pytest.raises(PreconditionError):
        pad_complex(st1, NComplexSpec(3, Window(0, 3)))
