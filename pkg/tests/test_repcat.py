"""Representations, the tensor-module dictionary, and induced covers."""

import random

import pytest

from _support import (F101, a2_quiver, a3_rad2, cyclic_rad2, point_pool,
                      rand_qrep)
from arcat.errors import PreconditionError, VerificationError
from arcat.fincat import category_of, point_category
from arcat.linalg import Mat
from arcat.modcat import (CModule, ModuleMap, hom_space, is_isomorphic,
                          yoneda_projective, zero_map)
from arcat.repcat import (QRep, QRepMap, adjunction_unit, check_adjunction,
                          f_star_v, g_star_v, lemma2_cover, phi, psi,
                          qrep_hom, rep_direct_sum, sharp, t_star_v,
                          tensor_base, zero_rep)


def one_dim(field):
    cat = point_category(field)
    return cat, CModule(cat, {"pt": 1}, {("pt", "pt", 0): Mat.identity(field, 1)})


def constant_a2_rep():
    bq = a2_quiver()
    cat, k1 = one_dim(F101)
    arrow = ModuleMap(k1, k1, {"pt": Mat.identity(F101, 1)})
    return bq, cat, QRep(bq, cat, {"1": k1, "2": k1}, {"a1": arrow})


def test_rep_validation_rejects_broken_relation():
    bq = a3_rad2()
    cat, k1 = one_dim(F101)
    ident = ModuleMap(k1, k1, {"pt": Mat.identity(F101, 1)})
    with pytest.raises(PreconditionError):
        QRep(bq, cat, {"1": k1, "2": k1, "3": k1}, {"a1": ident, "a2": ident})


def test_rep_map_validation_rejects_broken_square():
    bq, cat, r = constant_a2_rep()
    k1 = r.vertex_modules["1"]
    good = {"1": ModuleMap(k1, k1, {"pt": Mat.identity(F101, 1)}),
            "2": ModuleMap(k1, k1, {"pt": Mat.zeros(F101, 1, 1)})}
    with pytest.raises(PreconditionError):
        QRepMap(r, r, good)


def test_roundtrip_point_coefficients_exact():
    bq, cat, r = constant_a2_rep()
    t = tensor_base(bq, cat)
    m = phi(r, t)
    assert m.dims == {("1", "pt"): 1, ("2", "pt"): 1}
    assert psi(m) == r
    assert phi(psi(m), t) == m


def test_roundtrip_on_yoneda_modules():
    bq = a3_rad2()
    coeff = category_of(a2_quiver(), F101)
    t = tensor_base(bq, coeff)
    for x in t.objects:
        m = yoneda_projective(t, x)
        r = psi(m)
        assert phi(r, t) == m
        assert psi(phi(r, t)) == r


def test_roundtrip_random_reps():
    rng = random.Random(4102)
    cases = [(a2_quiver(), *point_pool(F101)),
             (a3_rad2(), *point_pool(F101)),
             (cyclic_rad2(2), *point_pool(F101))]
    for bq, coeff, pool in cases:
        t = tensor_base(bq, coeff)
        for _ in range(6):
            r = rand_qrep(bq, coeff, pool, rng)
            m = phi(r, t)
            assert psi(m) == r
            assert phi(psi(m), t) == m


def test_psi_rejects_non_tensor_module():
    coeff = category_of(a2_quiver(), F101)
    with pytest.raises(PreconditionError):
        psi(yoneda_projective(coeff, "1"))


def test_qrep_hom_matches_module_hom_dims():
    bq = a3_rad2()
    cat, _ = one_dim(F101)
    t = tensor_base(bq, cat)
    reps = {x: psi(yoneda_projective(t, x)) for x in t.objects}
    for x in t.objects:
        for y in t.objects:
            got = len(qrep_hom(reps[x], reps[y]))
            assert got == t.dim(x, y)
            independent = len(hom_space(yoneda_projective(t, x),
                                        yoneda_projective(t, y)))
            assert got == independent


def test_induction_shapes_respect_relations():
    cat, k1 = one_dim(F101)
    ind = f_star_v(a3_rad2(), "1", k1)
    assert {v: m.total_dim() for v, m in ind.vertex_modules.items()} == \
        {"1": 1, "2": 1, "3": 0}
    assert ind.arrow_maps["a2"].is_zero()
    ind_free = f_star_v(a2_quiver(), "1", k1)
    assert ind_free.arrow_maps["a1"].comps["pt"] == Mat.identity(F101, 1)


def test_induction_of_representable_is_projective():
    bq = a3_rad2()
    coeff = category_of(a2_quiver(), F101)
    t = tensor_base(bq, coeff)
    for v in bq.quiver.vertices:
        for x in coeff.objects:
            ind = phi(f_star_v(bq, v, yoneda_projective(coeff, x)), t)
            pair = is_isomorphic(ind, yoneda_projective(t, (v, x)))
            assert pair is not None
            f, g = pair
            assert f.then(g) == ModuleMap(ind, ind,
                                          {o: Mat.identity(F101, ind.dims[o])
                                           for o in t.objects})


def test_g_star_constant_shape():
    bq = a3_rad2()
    cat, k1 = one_dim(F101)
    const = g_star_v(bq, "1", k1)
    assert all(m.total_dim() == 1 for m in const.vertex_modules.values())
    assert all(f.comps["pt"] == Mat.identity(F101, 1)
               for f in const.arrow_maps.values())
    rolled = t_star_v(bq, "1", const)
    assert rolled == f_star_v(bq, "1", k1)


def test_adjunction_on_random_reps():
    rng = random.Random(515)
    bq = a3_rad2()
    cat, pool = point_pool(F101)
    k1 = pool[0]
    for _ in range(5):
        r = rand_qrep(bq, cat, pool, rng)
        for v in bq.quiver.vertices:
            report = check_adjunction(bq, v, k1, r)
            assert report.dim == r.vertex_modules[v].total_dim()


def test_adjunction_flags_invalid_representation():
    bq = a3_rad2()
    cat, k1 = one_dim(F101)
    ident = ModuleMap(k1, k1, {"pt": Mat.identity(F101, 1)})
    broken = QRep(bq, cat, {"1": k1, "2": k1, "3": k1},
                  {"a1": ident, "a2": ident}, validate=False)
    with pytest.raises(VerificationError):
        check_adjunction(bq, "1", k1, broken)


def test_lemma2_cover_on_random_reps():
    rng = random.Random(616)
    for bq in (a2_quiver(), a3_rad2(), cyclic_rad2(2)):
        cat, pool = point_pool(F101)
        for _ in range(4):
            r = rand_qrep(bq, cat, pool, rng)
            res = lemma2_cover(r)
            assert res.cover.is_surjective()
            for v, piece in res.pieces:
                assert piece.total_dim() == r.vertex_modules[v].total_dim()


def test_lemma2_cover_zero_rep():
    bq, cat, _ = constant_a2_rep()
    res = lemma2_cover(zero_rep(bq, cat))
    assert res.pieces == []
    assert res.cover.is_surjective()


def test_rep_direct_sum_dims_and_hom_additivity():
    rng = random.Random(717)
    bq = a3_rad2()
    cat, pool = point_pool(F101)
    r = rand_qrep(bq, cat, pool, rng)
    s = rand_qrep(bq, cat, pool, rng)
    total, injs, projs = rep_direct_sum([r, s], bq, cat)
    assert total.total_dim() == r.total_dim() + s.total_dim()
    for inj, proj in zip(injs, projs):
        QRepMap(inj.src, inj.tgt, inj.comps)
        QRepMap(proj.src, proj.tgt, proj.comps)
    assert len(qrep_hom(total, r)) == len(qrep_hom(r, r)) + len(qrep_hom(s, r))


def test_unit_and_sharp_recover_cover_map():
    bq = a3_rad2()
    cat, k1 = one_dim(F101)
    _, _, r = constant_a2_rep()
    bq2 = a2_quiver()
    psi_map = ModuleMap(k1, r.vertex_modules["1"], {"pt": Mat.identity(F101, 1)})
    rep_map = sharp(bq2, "1", r, psi_map)
    unit = adjunction_unit(bq2, "1", k1)
    assert unit.then(rep_map.comps["1"]) == psi_map
