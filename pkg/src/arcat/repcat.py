"""Representations of a bound quiver with coefficients in a module category.

A QRep assigns to each vertex a CModule over a fixed coefficient category
and to each arrow a ModuleMap, with the monomial relations verified to
vanish.  phi and psi repackage these exactly as modules over the tensor
product of the opposite path category with the coefficient category, and
are mutually inverse on the nose.

The induced representations are built from the left path space at a vertex:
g_star_v inflates a coefficient module to the constant path-space
representation, t_star_v rolls a path-space representation up into a QRep
with block arrows, and f_star_v is their composite.  check_adjunction
certifies the evaluation adjunction by computing both hom spaces
independently and verifying the two transposition maps are mutually inverse
on bases; lemma2_cover assembles the canonical projective cover of a
representation from the f_star_v of vertexwise covers.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import PreconditionError, VerificationError
from .fincat import FinCategory, category_of, opposite_category, tensor_product
from .linalg import Mat
from .modcat import (CModule, ModuleMap, direct_sum, hom_space, identity_map,
                     projective_cover, zero_map, zero_module)
from .quiver import BoundQuiver, Path, left_path_space, path_key


class QRep:
    """A representation: vertex modules over the coefficients, arrow maps."""

    def __init__(self, bq: BoundQuiver, coeff: FinCategory,
                 vertex_modules: Dict, arrow_maps: Dict, validate: bool = True):
        self.bq = bq
        self.coeff = coeff
        self.vertex_modules = dict(vertex_modules)
        self.arrow_maps = dict(arrow_maps)
        if validate:
            self._validate()

    def _validate(self):
        for v in self.bq.quiver.vertices:
            m = self.vertex_modules.get(v)
            if m is None or not (m.cat is self.coeff or m.cat == self.coeff):
                raise PreconditionError(f"missing or foreign module at vertex {v!r}")
        for a in self.bq.quiver.arrows:
            f = self.arrow_maps.get(a.name)
            if f is None:
                raise PreconditionError(f"missing arrow map for {a.name!r}")
            if f.src != self.vertex_modules[a.source] or f.tgt != self.vertex_modules[a.target]:
                raise PreconditionError(f"arrow map endpoints wrong for {a.name!r}")
        for gen in sorted(self.bq.ideal.generators, key=lambda p: (p.length, p.arrows)):
            if not self.path_map(gen).is_zero():
                raise PreconditionError(f"relation {gen!r} does not vanish")

    def path_map(self, p: Path) -> ModuleMap:
        """The composite map along a path, arrows applied in storage order."""
        cur = identity_map(self.vertex_modules[p.source])
        for name in p.arrows:
            cur = cur.then(self.arrow_maps[name])
        return cur

    def total_dim(self) -> int:
        return sum(m.total_dim() for m in self.vertex_modules.values())

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.vertex_modules.values())

    def __eq__(self, other):
        return (isinstance(other, QRep) and self.bq == other.bq
                and self.coeff == other.coeff
                and self.vertex_modules == other.vertex_modules
                and self.arrow_maps == other.arrow_maps)

    __hash__ = object.__hash__

    def __repr__(self):
        dims = {v: m.total_dim() for v, m in self.vertex_modules.items()}
        return f"QRep({dims})"


class QRepMap:
    """A morphism of representations: vertexwise maps commuting with arrows."""

    def __init__(self, src: QRep, tgt: QRep, comps: Dict, validate: bool = True):
        self.src = src
        self.tgt = tgt
        self.comps = dict(comps)
        if validate:
            self._validate()

    def _validate(self):
        for v in self.src.bq.quiver.vertices:
            f = self.comps.get(v)
            if f is None:
                raise PreconditionError(f"missing component at vertex {v!r}")
            if f.src != self.src.vertex_modules[v] or f.tgt != self.tgt.vertex_modules[v]:
                raise PreconditionError(f"component endpoints wrong at {v!r}")
            f._validate()
        for a in self.src.bq.quiver.arrows:
            left = self.src.arrow_maps[a.name].then(self.comps[a.target])
            right = self.comps[a.source].then(self.tgt.arrow_maps[a.name])
            if left != right:
                raise PreconditionError(f"square at arrow {a.name!r} does not commute")

    def then(self, other: "QRepMap") -> "QRepMap":
        comps = {v: self.comps[v].then(other.comps[v]) for v in self.comps}
        return QRepMap(self.src, other.tgt, comps, validate=False)

    def is_surjective(self) -> bool:
        return all(f.is_surjective() for f in self.comps.values())

    def __eq__(self, other):
        return (isinstance(other, QRepMap) and self.src == other.src
                and self.tgt == other.tgt and self.comps == other.comps)

    __hash__ = object.__hash__


def zero_rep(bq: BoundQuiver, coeff: FinCategory) -> QRep:
    z = zero_module(coeff)
    return QRep(bq, coeff, {v: z for v in bq.quiver.vertices},
                {a.name: zero_map(z, z) for a in bq.quiver.arrows}, validate=False)


def rep_direct_sum(reps: List[QRep], bq: BoundQuiver,
                   coeff: FinCategory) -> Tuple[QRep, List[QRepMap], List[QRepMap]]:
    if not reps:
        return zero_rep(bq, coeff), [], []
    vertex_modules, injs, projs = {}, {}, {}
    for v in bq.quiver.vertices:
        total, vi, vp = direct_sum([r.vertex_modules[v] for r in reps], coeff)
        vertex_modules[v] = total
        injs[v], projs[v] = vi, vp
    arrow_maps = {}
    for a in bq.quiver.arrows:
        cur = zero_map(vertex_modules[a.source], vertex_modules[a.target])
        for k, r in enumerate(reps):
            part = projs[a.source][k].then(r.arrow_maps[a.name]).then(injs[a.target][k])
            cur = cur.add(part)
        arrow_maps[a.name] = cur
    total_rep = QRep(bq, coeff, vertex_modules, arrow_maps, validate=False)
    inj_maps = [QRepMap(r, total_rep, {v: injs[v][k] for v in bq.quiver.vertices},
                        validate=False) for k, r in enumerate(reps)]
    proj_maps = [QRepMap(total_rep, r, {v: projs[v][k] for v in bq.quiver.vertices},
                         validate=False) for k, r in enumerate(reps)]
    return total_rep, inj_maps, proj_maps


# ---------------------------------------------------------------------------
# the equivalence with modules over the tensor category


def tensor_base(bq: BoundQuiver, coeff: FinCategory) -> FinCategory:
    """The tensor category hosting phi images: op path category times coeff."""
    return tensor_product(opposite_category(category_of(bq, coeff.field)), coeff)


def phi(r: QRep, base: Optional[FinCategory] = None) -> CModule:
    """Repackages a representation as a module over the tensor category."""
    t = base if base is not None else tensor_base(r.bq, r.coeff)
    bop = t.meta["b"]
    coeff = t.meta["a"]
    dims = {(v, c): r.vertex_modules[v].dims[c] for v in bop.objects for c in coeff.objects}
    path_maps: Dict[Tuple, ModuleMap] = {}

    def composite(y, x, label) -> ModuleMap:
        key = (y, x, label)
        if key not in path_maps:
            path_maps[key] = r.path_map(Path(y, x, label))
        return path_maps[key]

    action = {}
    for (x, c) in t.objects:
        for (y, d) in t.objects:
            da = coeff.dim(c, d)
            for idx in range(t.dim((x, c), (y, d))):
                ib, ia = divmod(idx, da)
                label = bop.hom[(x, y)][ib]
                rp = composite(y, x, label)
                action[((x, c), (y, d), idx)] = (
                    rp.comps[c] @ r.vertex_modules[y].action[(c, d, ia)])
    return CModule(t, dims, action, validate=True)


def psi(m: CModule) -> QRep:
    """Reads a representation back off a module over the tensor category."""
    t = m.cat
    if t.meta.get("kind") != "tensor":
        raise PreconditionError("module is not over a tensor product category")
    bop = t.meta["b"]
    coeff = t.meta["a"]
    if bop.meta.get("kind") != "opposite" or bop.meta["base"].meta.get("kind") != "path":
        raise PreconditionError("tensor factor is not an opposite path category")
    bq = bop.meta["base"].meta["bq"]
    fld = t.field
    vertex_modules = {}
    for v in bq.quiver.vertices:
        unit_idx = bop.hom[(v, v)].index(())
        dims = {c: m.dims[(v, c)] for c in coeff.objects}
        action = {}
        for c in coeff.objects:
            for d in coeff.objects:
                da = coeff.dim(c, d)
                for ia in range(da):
                    action[(c, d, ia)] = m.action[((v, c), (v, d), unit_idx * da + ia)]
        vertex_modules[v] = CModule(coeff, dims, action, validate=True)
    arrow_maps = {}
    for a in bq.quiver.arrows:
        v, w = a.source, a.target
        arrow_idx = bop.hom[(w, v)].index((a.name,))
        comps = {}
        for c in coeff.objects:
            da = coeff.dim(c, c)
            coords = [fld.zero()] * t.dim((w, c), (v, c))
            for ia, u in enumerate(coeff.units[c]):
                coords[arrow_idx * da + ia] = u
            comps[c] = m.act((w, c), (v, c), tuple(coords))
        arrow_maps[a.name] = ModuleMap(vertex_modules[v], vertex_modules[w],
                                       comps, validate=True)
    return QRep(bq, coeff, vertex_modules, arrow_maps, validate=True)


def psi_map(f: ModuleMap, src: Optional[QRep] = None,
            tgt: Optional[QRep] = None) -> QRepMap:
    """Transports a map of tensor-category modules to representations."""
    if src is None:
        src = psi(f.src)
    if tgt is None:
        tgt = psi(f.tgt)
    comps = {}
    for v in src.bq.quiver.vertices:
        comps[v] = ModuleMap(src.vertex_modules[v], tgt.vertex_modules[v],
                             {c: f.comps[(v, c)] for c in src.coeff.objects},
                             validate=False)
    return QRepMap(src, tgt, comps, validate=True)


def phi_map(f: QRepMap, base: Optional[FinCategory] = None) -> ModuleMap:
    """Transports a map of representations to tensor-category modules."""
    src = phi(f.src, base)
    tgt = phi(f.tgt, base)
    comps = {(v, c): f.comps[v].comps[c]
             for v in f.src.bq.quiver.vertices for c in f.src.coeff.objects}
    return ModuleMap(src, tgt, comps, validate=True)


def qrep_hom(r: QRep, s: QRep) -> List[QRepMap]:
    """A basis of representation morphisms by one combined linear kernel."""
    if r.bq != s.bq or r.coeff != s.coeff:
        raise PreconditionError("representations over different data")
    coeff = r.coeff
    fld = coeff.field
    offs = {}
    total = 0
    for v in r.bq.quiver.vertices:
        for c in coeff.objects:
            offs[(v, c)] = total
            total += s.vertex_modules[v].dims[c] * r.vertex_modules[v].dims[c]
    if total == 0:
        return []
    zero = fld.zero()
    rows = []

    def pos(v, c, rr, cc):
        return offs[(v, c)] + rr * r.vertex_modules[v].dims[c] + cc

    for v in r.bq.quiver.vertices:
        rm, sm = r.vertex_modules[v], s.vertex_modules[v]
        for c in coeff.objects:
            for d in coeff.objects:
                for i in range(coeff.dim(c, d)):
                    a = rm.action[(c, d, i)]
                    b = sm.action[(c, d, i)]
                    for rr in range(sm.dims[c]):
                        for ss in range(rm.dims[d]):
                            row = [zero] * total
                            for cc in range(rm.dims[c]):
                                val = a.at(cc, ss)
                                if val != zero:
                                    idx = pos(v, c, rr, cc)
                                    row[idx] = fld.add(row[idx], val)
                            for cc in range(sm.dims[d]):
                                val = b.at(rr, cc)
                                if val != zero:
                                    idx = pos(v, d, cc, ss)
                                    row[idx] = fld.sub(row[idx], val)
                            rows.append(row)
    for arr in r.bq.quiver.arrows:
        v, w = arr.source, arr.target
        fa = r.arrow_maps[arr.name]
        ga = s.arrow_maps[arr.name]
        for c in coeff.objects:
            a = fa.comps[c]
            b = ga.comps[c]
            for rr in range(s.vertex_modules[w].dims[c]):
                for ss in range(r.vertex_modules[v].dims[c]):
                    row = [zero] * total
                    for cc in range(r.vertex_modules[w].dims[c]):
                        val = a.at(cc, ss)
                        if val != zero:
                            idx = pos(w, c, rr, cc)
                            row[idx] = fld.add(row[idx], val)
                    for cc in range(s.vertex_modules[v].dims[c]):
                        val = b.at(rr, cc)
                        if val != zero:
                            idx = pos(v, c, cc, ss)
                            row[idx] = fld.sub(row[idx], val)
                    rows.append(row)
    if rows:
        sys = Mat(fld, len(rows), total, [x for row in rows for x in row])
        ker = sys.kernel_basis()
    else:
        ker = Mat.identity(fld, total)
    out = []
    for j in range(ker.cols):
        vals = list(ker.col(j))
        comps = {}
        for v in r.bq.quiver.vertices:
            mcomps = {}
            for c in coeff.objects:
                rr, cc = s.vertex_modules[v].dims[c], r.vertex_modules[v].dims[c]
                start = offs[(v, c)]
                mcomps[c] = Mat(fld, rr, cc, vals[start:start + rr * cc])
            comps[v] = ModuleMap(r.vertex_modules[v], s.vertex_modules[v],
                                 mcomps, validate=False)
        out.append(QRepMap(r, s, comps, validate=False))
    return out


# ---------------------------------------------------------------------------
# induced representations from the left path space


def g_star_v(bq: BoundQuiver, v, p: CModule) -> QRep:
    """The constant path-space representation with value p, identity arrows."""
    ps = left_path_space(bq, v)
    return QRep(ps.bound_quiver, p.cat,
                {key: p for key in ps.quiver.vertices},
                {a.name: identity_map(p) for a in ps.quiver.arrows},
                validate=False)


def t_star_v(bq: BoundQuiver, v, psrep: QRep) -> QRep:
    """Rolls a path-space representation into a QRep with path-block sums."""
    ps = left_path_space(bq, v)
    if psrep.bq.quiver != ps.quiver:
        raise PreconditionError("representation does not live on the path space")
    coeff = psrep.coeff
    vertex_modules, injs, projs, orders = {}, {}, {}, {}
    for w in bq.quiver.vertices:
        plist = bq.paths(v, w)
        orders[w] = {path_key(p): t for t, p in enumerate(plist)}
        mods = [psrep.vertex_modules[path_key(p)] for p in plist]
        total, vi, vp = direct_sum(mods, coeff)
        vertex_modules[w] = total
        injs[w], projs[w] = vi, vp
    arrow_maps = {}
    for a in bq.quiver.arrows:
        w, u = a.source, a.target
        cur = zero_map(vertex_modules[w], vertex_modules[u])
        for p in bq.paths(v, w):
            tree_arrow = f"{path_key(p)}+{a.name}"
            if tree_arrow not in psrep.arrow_maps:
                continue
            src_idx = orders[w][path_key(p)]
            tgt_key = path_key(Path(v, u, p.arrows + (a.name,)))
            tgt_idx = orders[u][tgt_key]
            part = projs[w][src_idx].then(psrep.arrow_maps[tree_arrow]).then(injs[u][tgt_idx])
            cur = cur.add(part)
        arrow_maps[a.name] = cur
    return QRep(bq, coeff, vertex_modules, arrow_maps, validate=True)


def f_star_v(bq: BoundQuiver, v, p: CModule) -> QRep:
    """Induction of a coefficient module along the vertex inclusion."""
    return t_star_v(bq, v, g_star_v(bq, v, p))


def _trivial_block_index(bq: BoundQuiver, v) -> int:
    for t, p in enumerate(bq.paths(v, v)):
        if p.length == 0:
            return t
    raise AssertionError("trivial path missing from its own hom set")


def adjunction_unit(bq: BoundQuiver, v, p: CModule,
                    ind: Optional[QRep] = None) -> ModuleMap:
    """The unit p -> f_star_v(p)(v): inclusion of the trivial path block."""
    if ind is None:
        ind = f_star_v(bq, v, p)
    mods = [p for _ in bq.paths(v, v)]
    _, injs, _ = direct_sum(mods, p.cat)
    inj = injs[_trivial_block_index(bq, v)]
    return ModuleMap(p, ind.vertex_modules[v], inj.comps, validate=True)


def sharp(bq: BoundQuiver, v, r: QRep, psi_map: ModuleMap,
          ind: Optional[QRep] = None) -> QRepMap:
    """Transposes p -> r(v) across the adjunction to f_star_v(p) -> r."""
    p = psi_map.src
    if ind is None:
        ind = f_star_v(bq, v, p)
    comps = {}
    for w in bq.quiver.vertices:
        plist = bq.paths(v, w)
        _, _, projs = direct_sum([p for _ in plist], p.cat)
        cur = zero_map(ind.vertex_modules[w], r.vertex_modules[w])
        for t, q in enumerate(plist):
            cur = cur.add(projs[t].then(psi_map).then(r.path_map(q)))
        comps[w] = cur
    return QRepMap(ind, r, comps, validate=True)


@dataclass
class AdjunctionReport:
    dim: int
    checked_maps: int


def check_adjunction(bq: BoundQuiver, v, p: CModule, r: QRep) -> AdjunctionReport:
    """Certifies the evaluation adjunction by independent hom computations.

    Both hom spaces are solved separately, their dimensions compared, and
    the two transposition maps checked to be mutually inverse on the bases.
    """
    ind = f_star_v(bq, v, p)
    lhs = qrep_hom(ind, r)
    rhs = hom_space(p, r.vertex_modules[v])
    if len(lhs) != len(rhs):
        raise VerificationError(
            f"adjunction dimensions differ: {len(lhs)} vs {len(rhs)}")
    unit = adjunction_unit(bq, v, p, ind)
    for psi_map in rhs:
        rep_map = sharp(bq, v, r, psi_map, ind)
        back = unit.then(rep_map.comps[v])
        if back != psi_map:
            raise VerificationError("unit transposition does not round trip")
    for rep_map in lhs:
        psi_map = unit.then(rep_map.comps[v])
        again = sharp(bq, v, r, psi_map, ind)
        if again != rep_map:
            raise VerificationError("counit transposition does not round trip")
    return AdjunctionReport(dim=len(lhs), checked_maps=len(lhs) + len(rhs))


@dataclass
class CoverResult:
    source: QRep
    cover: QRepMap
    pieces: List[Tuple[str, CModule]]


def lemma2_cover(r: QRep) -> CoverResult:
    """The canonical surjection onto r from induced vertexwise covers."""
    bq, coeff = r.bq, r.coeff
    parts, maps, pieces = [], [], []
    for v in bq.quiver.vertices:
        rv = r.vertex_modules[v]
        if rv.is_zero():
            continue
        cov = projective_cover(rv)
        pieces.append((v, cov.psum.module))
        ind = f_star_v(bq, v, cov.psum.module)
        parts.append(ind)
        maps.append(sharp(bq, v, r, cov.cover, ind))
    total, _, projs = rep_direct_sum(parts, bq, coeff)
    comps = {}
    for w in bq.quiver.vertices:
        cur = zero_map(total.vertex_modules[w], r.vertex_modules[w])
        for k in range(len(parts)):
            cur = cur.add(projs[k].comps[w].then(maps[k].comps[w]))
        comps[w] = cur
    cover = QRepMap(total, r, comps, validate=True)
    for w in bq.quiver.vertices:
        for c in coeff.objects:
            comp = cover.comps[w].comps[c]
            if comp.rank() != r.vertex_modules[w].dims[c]:
                raise VerificationError(
                    f"cover not surjective at vertex {w!r}, object {c!r}")
    return CoverResult(total, cover, pieces)
