"""Shared builders for the test suite: small bound quivers and random data."""

from typing import List

from arcat.fincat import FinCategory, point_category
from arcat.linalg import Field, Mat, hstack, vstack
from arcat.modcat import (CModule, conjugate_module, direct_sum, flatten_map,
                          hom_space, zero_map, zero_module)
from arcat.quiver import (Arrow, BoundQuiver, MonomialIdeal, Path, Quiver,
                          cyclic_quiver, linear_quiver)
from arcat.repcat import QRep

F101 = Field.prime(101)
QQ = Field.rationals()


def a2_quiver() -> BoundQuiver:
    return BoundQuiver(linear_quiver(2))


def a3_quiver() -> BoundQuiver:
    return BoundQuiver(linear_quiver(3))


def a3_rad2() -> BoundQuiver:
    q = linear_quiver(3)
    gen = Path("1", "3", ("a1", "a2"))
    return BoundQuiver(q, MonomialIdeal(frozenset([gen])))


def a_m_rad_n(m: int, n: int) -> BoundQuiver:
    q = linear_quiver(m)
    gens = []
    for i in range(1, m - n + 1):
        arrows = tuple(f"a{i + k}" for k in range(n))
        gens.append(Path(str(i), str(i + n), arrows))
    return BoundQuiver(q, MonomialIdeal(frozenset(gens)))


def cyclic_rad2(n: int) -> BoundQuiver:
    q = cyclic_quiver(n)
    gens = []
    for i in range(n):
        a, b = f"a{i}", f"a{(i + 1) % n}"
        gens.append(Path(str(i), str((i + 2) % n), (a, b)))
    return BoundQuiver(q, MonomialIdeal(frozenset(gens)))


def one_loop_rad2() -> BoundQuiver:
    q = Quiver(["v"], [Arrow("x", "v", "v")])
    return BoundQuiver(q, MonomialIdeal(frozenset([Path("v", "v", ("x", "x"))])))


def point_quiver() -> BoundQuiver:
    return BoundQuiver(Quiver(["pt"], []))


def rand_mat(field: Field, rows: int, cols: int, rng) -> Mat:
    return Mat(field, rows, cols, [field.random(rng) for _ in range(rows * cols)])


def rand_invertible(field: Field, n: int, rng) -> Mat:
    while True:
        g = rand_mat(field, n, n, rng)
        if g.inverse() is not None:
            return g


def rand_module(pool: List[CModule], cat: FinCategory, rng,
                max_total: int = 3, conjugate: bool = True) -> CModule:
    """A random direct sum from the pool, optionally in scrambled coordinates."""
    parts = []
    budget = rng.randint(0, max_total)
    attempts = 0
    total = 0
    while attempts < 12:
        attempts += 1
        piece = rng.choice(pool)
        if total + piece.total_dim() > budget:
            continue
        parts.append(piece)
        total += piece.total_dim()
    m = direct_sum(parts, cat)[0] if parts else zero_module(cat)
    if not conjugate:
        return m
    mats = {x: rand_invertible(cat.field, m.dims[x], rng) for x in cat.objects}
    return conjugate_module(m, mats)[0]


def _chain(sampled, names):
    cur = None
    for name in names:
        step = sampled[name]
        cur = step if cur is None else cur.then(step)
    return cur


def rand_qrep(bq: BoundQuiver, coeff: FinCategory, pool: List[CModule], rng,
              max_total: int = 3) -> QRep:
    """A random representation; arrow maps are sampled inside the linear
    subspace cut out by the relations whose other arrows are already fixed.

    Generators must not repeat an arrow, so that each activated constraint
    stays linear in the arrow being sampled.
    """
    fld = coeff.field
    arrows = {a.name: a for a in bq.quiver.arrows}
    mods = {v: rand_module(pool, coeff, rng, max_total) for v in bq.quiver.vertices}
    sampled = {}
    for name in sorted(arrows):
        a = arrows[name]
        src, tgt = mods[a.source], mods[a.target]
        basis = hom_space(src, tgt)
        if not basis:
            sampled[name] = zero_map(src, tgt)
            continue
        blocks = []
        for gen in sorted(bq.ideal.generators, key=lambda p: (p.length, p.arrows)):
            if name not in gen.arrows:
                continue
            if gen.arrows.count(name) > 1:
                raise ValueError(f"generator repeats arrow {name!r}")
            if any(other not in sampled for other in gen.arrows if other != name):
                continue
            i = gen.arrows.index(name)
            before = _chain(sampled, gen.arrows[:i])
            after = _chain(sampled, gen.arrows[i + 1:])
            cols = []
            for b in basis:
                term = b if before is None else before.then(b)
                term = term if after is None else term.then(after)
                cols.append(flatten_map(term))
            blocks.append(hstack(cols))
        if blocks:
            ker = vstack(blocks).kernel_basis()
        else:
            ker = Mat.identity(fld, len(basis))
        cur = zero_map(src, tgt)
        if ker.cols:
            weights = [fld.random(rng) for _ in range(ker.cols)]
            for j, b in enumerate(basis):
                scalar = fld.zero()
                for t in range(ker.cols):
                    scalar = fld.add(scalar, fld.mul(ker.at(j, t), weights[t]))
                cur = cur.add(b.scale(scalar))
        sampled[name] = cur
    return QRep(bq, coeff, mods, sampled, validate=True)


def point_pool(field: Field):
    """The coefficient pool for plain vector spaces: the one simple module."""
    cat = point_category(field)
    one = CModule(cat, {"pt": 1}, {("pt", "pt", 0): Mat.identity(field, 1)})
    return cat, [one]


def rand_hom(src: CModule, tgt: CModule, rng):
    """A random natural map, sampled from the hom-space basis."""
    fld = src.cat.field
    cur = zero_map(src, tgt)
    for b in hom_space(src, tgt):
        cur = cur.add(b.scale(fld.random(rng)))
    return cur


def rand_complex(spec, coeff: FinCategory, pool: List[CModule], rng,
                 max_total: int = 3):
    from arcat.complexes import build_category, from_rep
    return from_rep(spec, rand_qrep(build_category(spec), coeff, pool, rng,
                                    max_total))


def rand_homotopy(src, tgt, rng):
    """Random degreewise maps shaped like a homotopy between two complexes."""
    spec = src.spec
    ell = spec.window_len
    s = {}
    for i in spec.degrees():
        t = spec.wrap(i - (ell - 1))
        if t is None:
            continue
        s[i] = rand_hom(src.components[i], tgt.components[t], rng)
    return s
