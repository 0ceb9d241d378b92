"""Finite k-linear categories with explicit hom bases and structure constants.

A FinCategory carries, for every ordered object pair, a finite hom basis and
sparse composition constants, plus the subset of basis elements spanning the
radical (valid for the split basic categories built here: path categories of
bound quivers, their opposites, and tensor products of those).  Associativity,
unit laws and the radical ideal property are re-verified on every
construction.

On top of that sit the additive hull (formal finite sums, block morphisms)
and the idempotent completion (pairs of an additive object and an idempotent
endomorphism), with certified Krull-Schmidt decomposition through the End
algebra analysis of the algebra module.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import TableAlgebra, end_table, find_nontrivial_idempotent
from .errors import PreconditionError
from .linalg import Field, Mat, hstack, solve
from .quiver import BoundQuiver, MonomialIdeal, Quiver

Coords = Tuple
Label = object
ObjectId = object


class FinCategory:
    """A k-linear category with finitely many objects and finite hom bases.

    hom[(x, y)] lists the basis labels of Hom(x, y).  comp[(x, y, z)] maps a
    pair (i, j) of basis indices, f_i: x -> y and g_j: y -> z, to the sparse
    coordinates {k: scalar} of the composite g_j o f_i in the basis of
    Hom(x, z); absent pairs compose to zero.  units[x] is the coordinate
    tuple of the identity in End(x), radical[(x, y)] the set of basis indices
    spanning the radical.
    """

    def __init__(self, field: Field, objects: Sequence[ObjectId],
                 hom: Dict[Tuple[ObjectId, ObjectId], Tuple[Label, ...]],
                 comp: Dict, units: Dict[ObjectId, Coords],
                 radical: Dict[Tuple[ObjectId, ObjectId], frozenset],
                 meta: Optional[dict] = None, validate: bool = True):
        self.field = field
        self.objects = tuple(objects)
        self.hom = hom
        self.comp = comp
        self.units = units
        self.radical = radical
        self.meta = meta or {}
        self._index: Dict[Tuple[ObjectId, ObjectId], Dict[Label, int]] = {
            key: {lab: i for i, lab in enumerate(labels)} for key, labels in hom.items()}
        if validate:
            self._validate()

    def dim(self, x: ObjectId, y: ObjectId) -> int:
        return len(self.hom[(x, y)])

    def hom_index(self, x: ObjectId, y: ObjectId, label: Label) -> int:
        return self._index[(x, y)][label]

    def zero_coords(self, x: ObjectId, y: ObjectId) -> Coords:
        return tuple([self.field.zero()] * self.dim(x, y))

    def basis_coords(self, x: ObjectId, y: ObjectId, i: int) -> Coords:
        z, o = self.field.zero(), self.field.one()
        return tuple(o if k == i else z for k in range(self.dim(x, y)))

    def compose(self, x: ObjectId, y: ObjectId, z: ObjectId,
                f: Coords, g: Coords) -> Coords:
        """Coordinates of g o f for f: x -> y, g: y -> z."""
        fld = self.field
        zero = fld.zero()
        out = [zero] * self.dim(x, z)
        table = self.comp.get((x, y, z), {})
        for i, fi in enumerate(f):
            if fi == zero:
                continue
            for j, gj in enumerate(g):
                if gj == zero:
                    continue
                entry = table.get((i, j))
                if not entry:
                    continue
                c = fld.mul(fi, gj)
                for k, v in entry.items():
                    out[k] = fld.add(out[k], fld.mul(c, v))
        return tuple(out)

    def is_radical(self, x: ObjectId, y: ObjectId, coords: Coords) -> bool:
        rad = self.radical[(x, y)]
        zero = self.field.zero()
        return all(c == zero for i, c in enumerate(coords) if i not in rad)

    def _validate(self):
        fld = self.field
        objs = self.objects
        for x in objs:
            for y in objs:
                if (x, y) not in self.hom:
                    raise PreconditionError(f"missing hom table for {(x, y)}")
        for x in objs:
            u = self.units[x]
            if len(u) != self.dim(x, x):
                raise PreconditionError(f"unit of {x} has wrong length")
            if self.is_radical(x, x, u):
                raise PreconditionError(f"unit of {x} lies in the radical")
            for y in objs:
                for i in range(self.dim(x, y)):
                    f = self.basis_coords(x, y, i)
                    if self.compose(x, x, y, u, f) != f:
                        raise PreconditionError(f"right unit law fails at {(x, y)} index {i}")
                    if self.compose(x, y, y, f, self.units[y]) != f:
                        raise PreconditionError(f"left unit law fails at {(x, y)} index {i}")
        for w in objs:
            for x in objs:
                for y in objs:
                    for z in objs:
                        for i in range(self.dim(w, x)):
                            f = self.basis_coords(w, x, i)
                            for j in range(self.dim(x, y)):
                                g = self.basis_coords(x, y, j)
                                gf = self.compose(w, x, y, f, g)
                                for k in range(self.dim(y, z)):
                                    h = self.basis_coords(y, z, k)
                                    hg = self.compose(x, y, z, g, h)
                                    left = self.compose(w, y, z, gf, h)
                                    right = self.compose(w, x, z, f, hg)
                                    if left != right:
                                        raise PreconditionError(
                                            f"associativity fails at {(w, x, y, z)}")
        # radical is a two sided ideal avoiding the units
        for x in objs:
            for y in objs:
                for z in objs:
                    for i in range(self.dim(x, y)):
                        for j in range(self.dim(y, z)):
                            rad_pair = (i in self.radical[(x, y)]
                                        or j in self.radical[(y, z)])
                            if not rad_pair:
                                continue
                            out = self.compose(
                                x, y, z, self.basis_coords(x, y, i),
                                self.basis_coords(y, z, j))
                            if not self.is_radical(x, z, out):
                                raise PreconditionError(
                                    f"radical not an ideal at {(x, y, z)}")

    def __eq__(self, other):
        return (isinstance(other, FinCategory) and self.field == other.field
                and self.objects == other.objects and self.hom == other.hom
                and self.comp == other.comp and self.units == other.units
                and self.radical == other.radical)

    __hash__ = object.__hash__

    def __repr__(self):
        total = sum(len(v) for v in self.hom.values())
        return f"FinCategory({len(self.objects)} objects, total dim {total}, {self.field})"


def category_of(bq: BoundQuiver, field: Field) -> FinCategory:
    """The k-linear path category of a bound quiver; basis = surviving paths."""
    objects = list(bq.quiver.vertices)
    hom = {}
    for v in objects:
        for w in objects:
            hom[(v, w)] = tuple(p.arrows for p in bq.paths(v, w))
    index = {key: {lab: i for i, lab in enumerate(labels)} for key, labels in hom.items()}
    one = field.one()
    comp = {}
    for v in objects:
        for w in objects:
            for z in objects:
                table = {}
                for i, f in enumerate(hom[(v, w)]):
                    for j, g in enumerate(hom[(w, z)]):
                        word = f + g
                        if word in index[(v, z)]:
                            table[(i, j)] = {index[(v, z)][word]: one}
                if table:
                    comp[(v, w, z)] = table
    units = {v: tuple(one if lab == () else field.zero() for lab in hom[(v, v)])
             for v in objects}
    radical = {key: frozenset(i for i, lab in enumerate(labels) if len(lab) >= 1)
               for key, labels in hom.items()}
    return FinCategory(field, objects, hom, comp, units, radical,
                       meta={"kind": "path", "bq": bq})


def tensor_product(b: FinCategory, a: FinCategory) -> FinCategory:
    """The tensor product category: pairs of objects, hom spaces tensored.

    Basis labels are pairs (b label, a label) in b-major order, and the
    composite of basis pairs is the pair of composites with multiplied
    coefficients.  The radical is rad b (x) a + b (x) rad a, which is the
    radical of the tensor product for the split basic categories built here.
    """
    if b.field != a.field:
        raise PreconditionError("tensor factors over different fields")
    fld = b.field
    objects = [(x, u) for x in b.objects for u in a.objects]
    hom = {}
    for (x, u) in objects:
        for (y, v) in objects:
            hom[((x, u), (y, v))] = tuple((lb, la)
                                          for lb in b.hom[(x, y)]
                                          for la in a.hom[(u, v)])
    comp = {}
    for (x, u) in objects:
        for (y, v) in objects:
            for (z, w) in objects:
                bt = b.comp.get((x, y, z), {})
                at = a.comp.get((u, v, w), {})
                if not bt or not at:
                    continue
                da1 = a.dim(u, v)
                da2 = a.dim(v, w)
                da3 = a.dim(u, w)
                table = {}
                for (ib, jb), centb in bt.items():
                    for (ia, ja), centa in at.items():
                        entry = {}
                        for kb, cb in centb.items():
                            for ka, ca in centa.items():
                                entry[kb * da3 + ka] = fld.mul(cb, ca)
                        table[(ib * da1 + ia, jb * da2 + ja)] = entry
                comp[((x, u), (y, v), (z, w))] = table
    units = {}
    for (x, u) in objects:
        ub, ua = b.units[x], a.units[u]
        units[(x, u)] = tuple(fld.mul(cb, ca) for cb in ub for ca in ua)
    radical = {}
    for (x, u) in objects:
        for (y, v) in objects:
            da = a.dim(u, v)
            rb = b.radical[(x, y)]
            ra = a.radical[(u, v)]
            idx = set()
            for ib in range(b.dim(x, y)):
                for ia in range(da):
                    if ib in rb or ia in ra:
                        idx.add(ib * da + ia)
            radical[((x, u), (y, v))] = frozenset(idx)
    return FinCategory(fld, objects, hom, comp, units, radical,
                       meta={"kind": "tensor", "b": b, "a": a})


def opposite_category(c: FinCategory) -> FinCategory:
    """Same objects and labels, arrows formally reversed; an exact involution."""
    hom = {(x, y): c.hom[(y, x)] for x in c.objects for y in c.objects}
    comp = {}
    for x in c.objects:
        for y in c.objects:
            for z in c.objects:
                base = c.comp.get((z, y, x), {})
                if not base:
                    continue
                comp[(x, y, z)] = {(i, j): dict(entry)
                                   for (j, i), entry in base.items()}
    radical = {(x, y): c.radical[(y, x)] for x in c.objects for y in c.objects}
    meta = ({"kind": "opposite", "base": c} if c.meta.get("kind") != "opposite"
            else dict(c.meta["base"].meta))
    return FinCategory(c.field, c.objects, hom, comp, dict(c.units), radical, meta=meta)


def point_category(field: Field, name: str = "pt") -> FinCategory:
    """The one object category with End = k (coefficients "mod k")."""
    return category_of(BoundQuiver(Quiver([name], []), MonomialIdeal()), field)


# ---------------------------------------------------------------------------
# additive hull and idempotent completion


@dataclass(frozen=True)
class AddObject:
    """A formal finite direct sum; summand order normalized by object id."""

    summands: Tuple[ObjectId, ...]

    @staticmethod
    def of(summands: Sequence[ObjectId]) -> "AddObject":
        return AddObject(tuple(sorted(summands, key=repr)))

    @property
    def is_zero(self) -> bool:
        return not self.summands


@dataclass(frozen=True)
class AddMor:
    """A block morphism between additive objects.

    blocks[j][i] is the coordinate tuple of the (source summand i ->
    target summand j) component.
    """

    src: AddObject
    tgt: AddObject
    blocks: Tuple[Tuple[Coords, ...], ...]


@dataclass(frozen=True)
class KarObject:
    """An object of the idempotent completion: (additive object, idempotent)."""

    base: AddObject
    idem: AddMor


@dataclass
class Summand:
    """One indecomposable piece of a decomposition with its certificates."""

    piece: KarObject
    include: AddMor   # base -> base, carries piece -> ambient
    project: AddMor   # base -> base, carries ambient -> piece


class Hull:
    """Block morphism calculus over a FinCategory."""

    def __init__(self, cat: FinCategory):
        self.cat = cat

    # construction ---------------------------------------------------------
    def to_add(self, x) -> AddObject:
        if isinstance(x, AddObject):
            return x
        if isinstance(x, KarObject):
            raise PreconditionError("expected an additive object, got a completion object")
        if x not in self.cat.objects:
            raise PreconditionError(f"{x!r} is not an object of the category")
        return AddObject.of([x])

    def to_kar(self, x) -> KarObject:
        if isinstance(x, KarObject):
            return x
        add = self.to_add(x)
        return KarObject(add, self.identity(add))

    def zero_mor(self, x: AddObject, y: AddObject) -> AddMor:
        blocks = tuple(tuple(self.cat.zero_coords(xs, ys) for xs in x.summands)
                       for ys in y.summands)
        return AddMor(x, y, blocks)

    def identity(self, x: AddObject) -> AddMor:
        blocks = []
        for j, ys in enumerate(x.summands):
            row = []
            for i, xs in enumerate(x.summands):
                if i == j:
                    row.append(tuple(self.cat.units[xs]))
                else:
                    row.append(self.cat.zero_coords(xs, ys))
            blocks.append(tuple(row))
        return AddMor(x, x, tuple(blocks))

    # arithmetic -----------------------------------------------------------
    def add(self, f: AddMor, g: AddMor) -> AddMor:
        fld = self.cat.field
        blocks = tuple(tuple(tuple(fld.add(a, b) for a, b in zip(fb, gb))
                             for fb, gb in zip(frow, grow))
                       for frow, grow in zip(f.blocks, g.blocks))
        return AddMor(f.src, f.tgt, blocks)

    def sub(self, f: AddMor, g: AddMor) -> AddMor:
        fld = self.cat.field
        blocks = tuple(tuple(tuple(fld.sub(a, b) for a, b in zip(fb, gb))
                             for fb, gb in zip(frow, grow))
                       for frow, grow in zip(f.blocks, g.blocks))
        return AddMor(f.src, f.tgt, blocks)

    def scale(self, c, f: AddMor) -> AddMor:
        fld = self.cat.field
        blocks = tuple(tuple(tuple(fld.mul(c, a) for a in fb) for fb in frow)
                       for frow in f.blocks)
        return AddMor(f.src, f.tgt, blocks)

    def then(self, f: AddMor, g: AddMor) -> AddMor:
        """The composite g o f (f applied first)."""
        if f.tgt != g.src:
            raise PreconditionError("composition type mismatch")
        cat = self.cat
        fld = cat.field
        x, y, z = f.src, f.tgt, g.tgt
        blocks = []
        for k, zs in enumerate(z.summands):
            row = []
            for i, xs in enumerate(x.summands):
                acc = list(cat.zero_coords(xs, zs))
                for j, ys in enumerate(y.summands):
                    part = cat.compose(xs, ys, zs, f.blocks[j][i], g.blocks[k][j])
                    acc = [fld.add(a, b) for a, b in zip(acc, part)]
                row.append(tuple(acc))
            blocks.append(tuple(row))
        return AddMor(x, z, tuple(blocks))

    # flattening -----------------------------------------------------------
    def flat_dim(self, x: AddObject, y: AddObject) -> int:
        return sum(self.cat.dim(xs, ys) for xs in x.summands for ys in y.summands)

    def flatten(self, f: AddMor) -> Mat:
        vals = []
        for i in range(len(f.src.summands)):
            for j in range(len(f.tgt.summands)):
                vals.extend(f.blocks[j][i])
        return Mat.column(self.cat.field, vals) if vals else Mat.zeros(self.cat.field, 0, 1)

    def unflatten(self, x: AddObject, y: AddObject, vec: Mat) -> AddMor:
        vals = list(vec.col(0))
        pos = 0
        blocks = [[None] * len(x.summands) for _ in y.summands]
        for i, xs in enumerate(x.summands):
            for j, ys in enumerate(y.summands):
                d = self.cat.dim(xs, ys)
                blocks[j][i] = tuple(vals[pos:pos + d])
                pos += d
        return AddMor(x, y, tuple(tuple(row) for row in blocks))

    def is_zero_mor(self, f: AddMor) -> bool:
        z = self.cat.field.zero()
        return all(c == z for row in f.blocks for cell in row for c in cell)

    # completion -----------------------------------------------------------
    def check_idempotent(self, e: AddMor):
        if e.src != e.tgt:
            raise PreconditionError("idempotent must be an endomorphism")
        if self.then(e, e) != e:
            raise PreconditionError("morphism is not idempotent")

    def kar_hom_basis(self, x: KarObject, y: KarObject) -> List[AddMor]:
        """Canonical basis of e_y Hom(base_x, base_y) e_x."""
        n = self.flat_dim(x.base, y.base)
        if n == 0:
            return []
        cols = []
        for t in range(n):
            unit = Mat.column(self.cat.field,
                              [self.cat.field.one() if s == t else self.cat.field.zero()
                               for s in range(n)])
            h = self.unflatten(x.base, y.base, unit)
            sandwiched = self.then(self.then(x.idem, h), y.idem)
            cols.append(self.flatten(sandwiched))
        op = hstack(cols)
        basis, _ = op.column_space_basis()
        return [self.unflatten(x.base, y.base, Mat.column(self.cat.field, list(basis.col(j))))
                for j in range(basis.cols)]

    def kar_end_algebra(self, x: KarObject) -> Tuple[TableAlgebra, List[AddMor]]:
        basis = self.kar_hom_basis(x, x)
        if not basis:
            raise PreconditionError("End algebra of the zero object")
        basis_mat = hstack([self.flatten(b) for b in basis])

        def compose_pair(i: int, j: int) -> Mat:
            return self.flatten(self.then(basis[j], basis[i]))

        alg = end_table(self.cat.field, basis_mat, self.flatten(x.idem), compose_pair)
        return alg, basis

    def mor_from_coords(self, basis: List[AddMor], coords: Coords) -> AddMor:
        fld = self.cat.field
        out = self.zero_mor(basis[0].src, basis[0].tgt)
        for c, b in zip(coords, basis):
            if c != fld.zero():
                out = self.add(out, self.scale(c, b))
        return out

    def invert(self, f: AddMor) -> Optional[AddMor]:
        """Two sided inverse of an endomorphism-shaped block morphism, if any."""
        n = self.flat_dim(f.src, f.src)
        if f.src != f.tgt:
            return None
        if n == 0:
            return self.identity(f.src)
        cols = []
        for t in range(n):
            unit = Mat.column(self.cat.field,
                              [self.cat.field.one() if s == t else self.cat.field.zero()
                               for s in range(n)])
            h = self.unflatten(f.src, f.src, unit)
            cols.append(self.flatten(self.then(h, f)))
        op = hstack(cols)
        rhs = self.flatten(self.identity(f.src))
        sol = solve(op, rhs)
        if sol is None:
            return None
        g = self.unflatten(f.src, f.src, sol)
        if self.then(f, g) != self.identity(f.src) or self.then(g, f) != self.identity(f.src):
            return None
        return g


def hom_basis(c: FinCategory, x, y) -> List[AddMor]:
    """Basis of Hom(x, y) for plain, additive, or completion objects."""
    hull = Hull(c)
    return hull.kar_hom_basis(hull.to_kar(x), hull.to_kar(y))


def split_idempotent(c: FinCategory, x: KarObject) -> Tuple[AddMor, AddMor]:
    """The canonical splitting e = g o f through (base, e); f o g = 1_(base,e).

    Both maps are carried by e itself: f includes the completion object into
    the base, g projects onto it.  Verified exactly.
    """
    hull = Hull(c)
    hull.check_idempotent(x.idem)
    f = x.idem  # viewed as base -> (base, e)
    g = x.idem  # viewed as (base, e) -> base
    if hull.then(f, g) != x.idem:
        raise AssertionError("split composite is not e")
    if hull.then(g, f) != x.idem:
        raise AssertionError("completion identity mismatch")
    return f, g


def decompose_object(c: FinCategory, x) -> List[Summand]:
    """Indecomposable summands with pairwise orthogonal primitive idempotents.

    Each returned idempotent e_i satisfies e_i = include o project with
    project o include the identity of the piece; the idempotents sum to
    x.idem and each End(piece) is certified local.
    """
    hull = Hull(c)
    kx = hull.to_kar(x)
    hull.check_idempotent(kx.idem)
    out: List[Summand] = []

    def recurse(idem: AddMor):
        if hull.is_zero_mor(idem):
            return
        piece = KarObject(kx.base, idem)
        alg, basis = hull.kar_end_algebra(piece)
        e = find_nontrivial_idempotent(alg)
        if e is None:
            out.append(Summand(piece, include=idem, project=idem))
            return
        eta = hull.mor_from_coords(basis, e)
        recurse(eta)
        recurse(hull.sub(idem, eta))

    recurse(kx.idem)
    total = hull.zero_mor(kx.base, kx.base)
    for s in out:
        total = hull.add(total, s.include)
    if out and total != kx.idem:
        raise AssertionError("idempotents do not sum to the ambient idempotent")
    if not out and not hull.is_zero_mor(kx.idem):
        raise AssertionError("nonzero object decomposed to nothing")
    for i, s in enumerate(out):
        for j, t in enumerate(out):
            prod = hull.then(s.include, t.include)
            if i == j:
                if prod != s.include:
                    raise AssertionError("summand idempotent not idempotent")
            elif not hull.is_zero_mor(prod):
                raise AssertionError("summand idempotents not orthogonal")
    return out
