"""Finite dimensional contravariant modules over a FinCategory.

A CModule assigns to every object x a space k^dims[x] and to every hom basis
element f_i: x -> y a matrix action[(x, y, i)]: k^dims[y] -> k^dims[x];
composites reverse, M(g o f) = M(f) M(g), and functoriality is re-verified on
construction.  ModuleMaps are natural transformations with per object
components, also verified.

On this representation the module category is computed exactly: hom spaces,
kernels, images, cokernels, radicals, projective covers and minimal
presentations, the standard duality, the transpose, the translates built
from them, Ext^1 with explicit extension classes, almost split sequences
with independent verification, Krull-Schmidt decomposition with idempotent
certificates, the Auslander-Reiten quiver by knitting, and global dimension
by iterated syzygies.
"""

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (TableAlgebra, end_table, find_nontrivial_idempotent,
                      radical_basis)
from .errors import CapExceededError, PreconditionError, VerificationError
from .fincat import FinCategory, category_of, opposite_category
from .linalg import Mat, block_diag, hstack, solve, vstack
from .quiver import BoundQuiver, opposite


class CModule:
    """A contravariant functor from a FinCategory to finite vector spaces."""

    def __init__(self, cat: FinCategory, dims: Dict, action: Dict, validate: bool = True):
        self.cat = cat
        self.dims = dict(dims)
        self.action = dict(action)
        if validate:
            self._validate()

    def act(self, x, y, coords) -> Mat:
        """The matrix of the action of a hom coordinate vector at (x, y)."""
        fld = self.cat.field
        out = Mat.zeros(fld, self.dims[x], self.dims[y])
        for i, c in enumerate(coords):
            if c != fld.zero():
                out = out + self.action[(x, y, i)].scale(c)
        return out

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims.values())

    def dim_vector(self) -> Dict:
        return dict(self.dims)

    def _validate(self):
        cat = self.cat
        for x in cat.objects:
            if x not in self.dims or self.dims[x] < 0:
                raise PreconditionError(f"missing or negative dimension at {x!r}")
        for x in cat.objects:
            for y in cat.objects:
                for i in range(cat.dim(x, y)):
                    m = self.action.get((x, y, i))
                    if m is None or m.rows != self.dims[x] or m.cols != self.dims[y]:
                        raise PreconditionError(f"bad action matrix at {(x, y, i)}")
        for x in cat.objects:
            if self.act(x, x, cat.units[x]) != Mat.identity(cat.field, self.dims[x]):
                raise PreconditionError(f"unit does not act as identity at {x!r}")
        for x in cat.objects:
            for y in cat.objects:
                for z in cat.objects:
                    table = cat.comp.get((x, y, z), {})
                    for i in range(cat.dim(x, y)):
                        for j in range(cat.dim(y, z)):
                            entry = table.get((i, j), {})
                            expected = Mat.zeros(cat.field, self.dims[x], self.dims[z])
                            for k, c in entry.items():
                                expected = expected + self.action[(x, z, k)].scale(c)
                            got = self.action[(x, y, i)] @ self.action[(y, z, j)]
                            if got != expected:
                                raise PreconditionError(
                                    f"action not functorial at {(x, y, z, i, j)}")

    def __eq__(self, other):
        return (isinstance(other, CModule) and self.cat == other.cat
                and self.dims == other.dims and self.action == other.action)

    __hash__ = object.__hash__

    def __repr__(self):
        return f"CModule(dims={self.dims})"


class ModuleMap:
    """A natural transformation between CModules over the same category."""

    def __init__(self, src: CModule, tgt: CModule, comps: Dict, validate: bool = True):
        self.src = src
        self.tgt = tgt
        self.comps = dict(comps)
        if validate:
            self._validate()

    def _validate(self):
        cat = self.src.cat
        if not (self.tgt.cat is cat or self.tgt.cat == cat):
            raise PreconditionError("map between modules over different categories")
        for x in cat.objects:
            m = self.comps.get(x)
            if m is None or m.rows != self.tgt.dims[x] or m.cols != self.src.dims[x]:
                raise PreconditionError(f"bad component shape at {x!r}")
        for x in cat.objects:
            for y in cat.objects:
                for i in range(cat.dim(x, y)):
                    left = self.comps[x] @ self.src.action[(x, y, i)]
                    right = self.tgt.action[(x, y, i)] @ self.comps[y]
                    if left != right:
                        raise PreconditionError(f"naturality fails at {(x, y, i)}")

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """The composite (other o self), self applied first."""
        comps = {x: other.comps[x] @ self.comps[x] for x in self.src.cat.objects}
        return ModuleMap(self.src, other.tgt, comps, validate=False)

    def add(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.src, self.tgt,
                         {x: self.comps[x] + other.comps[x] for x in self.comps},
                         validate=False)

    def sub(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.src, self.tgt,
                         {x: self.comps[x] - other.comps[x] for x in self.comps},
                         validate=False)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.src, self.tgt,
                         {x: self.comps[x].scale(c) for x in self.comps},
                         validate=False)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.comps.values())

    def is_injective(self) -> bool:
        return all(m.rank() == m.cols for m in self.comps.values())

    def is_surjective(self) -> bool:
        return all(m.rank() == m.rows for m in self.comps.values())

    def inverse(self) -> Optional["ModuleMap"]:
        inv = {}
        for x, m in self.comps.items():
            if m.rows != m.cols:
                return None
            mi = m.inverse()
            if mi is None:
                return None
            inv[x] = mi
        return ModuleMap(self.tgt, self.src, inv, validate=False)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.src == other.src
                and self.tgt == other.tgt and self.comps == other.comps)

    __hash__ = object.__hash__

    def __repr__(self):
        return f"ModuleMap({self.src.dims} -> {self.tgt.dims})"


def identity_map(m: CModule) -> ModuleMap:
    return ModuleMap(m, m, {x: Mat.identity(m.cat.field, m.dims[x])
                            for x in m.cat.objects}, validate=False)


def zero_map(m: CModule, n: CModule) -> ModuleMap:
    return ModuleMap(m, n, {x: Mat.zeros(m.cat.field, n.dims[x], m.dims[x])
                            for x in m.cat.objects}, validate=False)


def zero_module(cat: FinCategory) -> CModule:
    dims = {x: 0 for x in cat.objects}
    action = {(x, y, i): Mat.zeros(cat.field, 0, 0)
              for x in cat.objects for y in cat.objects
              for i in range(cat.dim(x, y))}
    return CModule(cat, dims, action, validate=False)


def direct_sum(mods: Sequence[CModule], cat: Optional[FinCategory] = None):
    """Returns (sum module, injections, projections) in the given order."""
    if not mods:
        if cat is None:
            raise PreconditionError("empty direct sum needs an explicit category")
        return zero_module(cat), [], []
    cat = mods[0].cat
    fld = cat.field
    dims = {x: sum(m.dims[x] for m in mods) for x in cat.objects}
    action = {}
    for x in cat.objects:
        for y in cat.objects:
            for i in range(cat.dim(x, y)):
                action[(x, y, i)] = block_diag(fld, [m.action[(x, y, i)] for m in mods])
    total = CModule(cat, dims, action, validate=False)
    offsets = {x: [] for x in cat.objects}
    for x in cat.objects:
        pos = 0
        for m in mods:
            offsets[x].append(pos)
            pos += m.dims[x]
    injections, projections = [], []
    for k, m in enumerate(mods):
        inj, prj = {}, {}
        for x in cat.objects:
            rows = []
            for r in range(dims[x]):
                off = offsets[x][k]
                rows.append([fld.one() if r == off + c else fld.zero()
                             for c in range(m.dims[x])])
            inj[x] = Mat.from_rows(fld, rows) if dims[x] else Mat.zeros(fld, 0, m.dims[x])
            prj[x] = inj[x].transpose()
        injections.append(ModuleMap(m, total, inj, validate=False))
        projections.append(ModuleMap(total, m, prj, validate=False))
    return total, injections, projections


def conjugate_module(m: CModule, mats: Dict) -> Tuple[CModule, ModuleMap]:
    """Transport of structure along invertible components; returns (n, iso n -> m)."""
    inv = {}
    for x in m.cat.objects:
        gi = mats[x].inverse()
        if gi is None:
            raise PreconditionError(f"base change at {x!r} is not invertible")
        inv[x] = gi
    action = {key: inv[key[0]] @ mat @ mats[key[1]] for key, mat in m.action.items()}
    n = CModule(m.cat, dict(m.dims), action, validate=False)
    return n, ModuleMap(n, m, mats, validate=True)


# ---------------------------------------------------------------------------
# distinguished modules


def yoneda_projective(cat: FinCategory, x) -> CModule:
    """The representable module Hom(-, x)."""
    if x not in cat.objects:
        raise PreconditionError(f"{x!r} is not an object of the category")
    dims = {y: cat.dim(y, x) for y in cat.objects}
    action = {}
    for y in cat.objects:
        for z in cat.objects:
            for i in range(cat.dim(y, z)):
                f = cat.basis_coords(y, z, i)
                cols = [cat.compose(y, z, x, f, cat.basis_coords(z, x, j))
                        for j in range(cat.dim(z, x))]
                if cols:
                    action[(y, z, i)] = hstack([Mat.column(cat.field, c) for c in cols])
                else:
                    action[(y, z, i)] = Mat.zeros(cat.field, dims[y], 0)
    return CModule(cat, dims, action, validate=True)


def yoneda_map(cat: FinCategory, x, y, h_coords) -> ModuleMap:
    """The map Hom(-, x) -> Hom(-, y) given by postcomposition with h: x -> y."""
    px = yoneda_projective(cat, x)
    py = yoneda_projective(cat, y)
    comps = {}
    for z in cat.objects:
        cols = [cat.compose(z, x, y, cat.basis_coords(z, x, k), h_coords)
                for k in range(cat.dim(z, x))]
        comps[z] = (hstack([Mat.column(cat.field, c) for c in cols]) if cols
                    else Mat.zeros(cat.field, cat.dim(z, y), 0))
    return ModuleMap(px, py, comps, validate=True)


def simple_module(cat: FinCategory, x) -> CModule:
    """The simple top of the representable at x, for basic categories."""
    if x not in cat.objects:
        raise PreconditionError(f"{x!r} is not an object of the category")
    non_rad = [i for i in range(cat.dim(x, x)) if i not in cat.radical[(x, x)]]
    if len(non_rad) != 1 or cat.units[x] != cat.basis_coords(x, x, non_rad[0]):
        raise PreconditionError(f"End({x!r}) is not basic with unit basis element")
    unit_idx = non_rad[0]
    fld = cat.field
    dims = {y: 1 if y == x else 0 for y in cat.objects}
    action = {}
    for y in cat.objects:
        for z in cat.objects:
            for i in range(cat.dim(y, z)):
                if y == x and z == x and i == unit_idx:
                    action[(y, z, i)] = Mat.identity(fld, 1)
                else:
                    action[(y, z, i)] = Mat.zeros(fld, dims[y], dims[z])
    return CModule(cat, dims, action, validate=True)


def representation_category(bq: BoundQuiver, fld) -> FinCategory:
    """The category whose CModules are representations of the bound quiver.

    Modules here are contravariant, so representations (covariant functors)
    live over the opposite path category; the representable at a vertex v is
    then the expected projective with dim at w = #paths v -> w.
    """
    return category_of(opposite(bq), fld)


# ---------------------------------------------------------------------------
# hom spaces and flattening


def _flat_layout(m: CModule, n: CModule):
    offs = {}
    total = 0
    for x in m.cat.objects:
        offs[x] = total
        total += n.dims[x] * m.dims[x]
    return offs, total


def flatten_map(phi: ModuleMap) -> Mat:
    vals = []
    for x in phi.src.cat.objects:
        comp = phi.comps[x]
        for r in range(comp.rows):
            vals.extend(comp.row(r))
    fld = phi.src.cat.field
    return Mat.column(fld, vals) if vals else Mat.zeros(fld, 0, 1)


def map_from_flat(m: CModule, n: CModule, vec: Mat) -> ModuleMap:
    vals = list(vec.col(0))
    comps = {}
    pos = 0
    fld = m.cat.field
    for x in m.cat.objects:
        r, c = n.dims[x], m.dims[x]
        comps[x] = Mat(fld, r, c, vals[pos:pos + r * c])
        pos += r * c
    return ModuleMap(m, n, comps, validate=False)


def hom_space(m: CModule, n: CModule) -> List[ModuleMap]:
    """A canonical basis of the space of natural maps m -> n."""
    cat = m.cat
    fld = cat.field
    offs, total = _flat_layout(m, n)
    if total == 0:
        return []
    zero = fld.zero()
    rows = []
    for x in cat.objects:
        for y in cat.objects:
            for i in range(cat.dim(x, y)):
                a = m.action[(x, y, i)]
                b = n.action[(x, y, i)]
                for r in range(n.dims[x]):
                    for s in range(m.dims[y]):
                        row = [zero] * total
                        for c in range(m.dims[x]):
                            v = a.at(c, s)
                            if v != zero:
                                idx = offs[x] + r * m.dims[x] + c
                                row[idx] = fld.add(row[idx], v)
                        for c in range(n.dims[y]):
                            v = b.at(r, c)
                            if v != zero:
                                idx = offs[y] + c * m.dims[y] + s
                                row[idx] = fld.sub(row[idx], v)
                        rows.append(row)
    if rows:
        sys = Mat(fld, len(rows), total, [v for row in rows for v in row])
        ker = sys.kernel_basis()
    else:
        ker = Mat.identity(fld, total)
    return [map_from_flat(m, n, Mat.column(fld, list(ker.col(j))))
            for j in range(ker.cols)]


# ---------------------------------------------------------------------------
# subquotients


@dataclass
class Kernel:
    module: CModule
    include: ModuleMap


@dataclass
class Image:
    module: CModule
    include: ModuleMap
    project: ModuleMap


@dataclass
class Cokernel:
    module: CModule
    project: ModuleMap
    sections: Dict


def _submodule_on_bases(m: CModule, bases: Dict) -> Kernel:
    """The submodule spanned objectwise by the given invariant column bases."""
    cat = m.cat
    dims = {x: bases[x].cols for x in cat.objects}
    action = {}
    for x in cat.objects:
        for y in cat.objects:
            for i in range(cat.dim(x, y)):
                rhs = m.action[(x, y, i)] @ bases[y]
                sol = solve(bases[x], rhs)
                if sol is None:
                    raise PreconditionError(f"spans are not invariant at {(x, y, i)}")
                action[(x, y, i)] = sol
    sub = CModule(cat, dims, action, validate=True)
    return Kernel(sub, ModuleMap(sub, m, bases, validate=True))


def kernel_module(phi: ModuleMap) -> Kernel:
    bases = {x: phi.comps[x].kernel_basis() for x in phi.src.cat.objects}
    return _submodule_on_bases(phi.src, bases)


def image_module(phi: ModuleMap) -> Image:
    m, n = phi.src, phi.tgt
    bases = {x: phi.comps[x].column_space_basis()[0] for x in m.cat.objects}
    sub = _submodule_on_bases(n, bases)
    project = {}
    for x in m.cat.objects:
        sol = solve(bases[x], phi.comps[x])
        if sol is None:
            raise AssertionError("image factorization failed")
        project[x] = sol
    return Image(sub.module, sub.include,
                 ModuleMap(m, sub.module, project, validate=True))


def cokernel_module(phi: ModuleMap) -> Cokernel:
    n = phi.tgt
    cat = n.cat
    fld = cat.field
    pis, sections = {}, {}
    for x in cat.objects:
        left = phi.comps[x].transpose().kernel_basis()
        pi = left.transpose()
        pis[x] = pi
        sec = solve(pi, Mat.identity(fld, pi.rows))
        if sec is None:
            raise AssertionError("cokernel projection has no section")
        sections[x] = sec
    dims = {x: pis[x].rows for x in cat.objects}
    action = {}
    for x in cat.objects:
        for y in cat.objects:
            for i in range(cat.dim(x, y)):
                action[(x, y, i)] = pis[x] @ n.action[(x, y, i)] @ sections[y]
    coker = CModule(cat, dims, action, validate=True)
    return Cokernel(coker, ModuleMap(n, coker, pis, validate=True), sections)


def factor_through_cokernel(ck: Cokernel, psi: ModuleMap) -> ModuleMap:
    """The unique map out of the cokernel with (result o project) = psi."""
    comps = {x: psi.comps[x] @ ck.sections[x] for x in psi.src.cat.objects}
    out = ModuleMap(ck.module, psi.tgt, comps, validate=True)
    if ck.project.then(out) != psi:
        raise PreconditionError("map does not kill the image, cannot factor")
    return out


def radical_submodule(m: CModule) -> Kernel:
    """The intersection of maximal submodules: sums of radical actions."""
    cat = m.cat
    bases = {}
    for x in cat.objects:
        cols = [m.action[(x, y, i)] for y in cat.objects
                for i in sorted(cat.radical[(x, y)])]
        stacked = hstack(cols) if cols else Mat.zeros(cat.field, m.dims[x], 0)
        bases[x] = stacked.column_space_basis()[0]
    return _submodule_on_bases(m, bases)


def top_quotient(m: CModule) -> Cokernel:
    return cokernel_module(radical_submodule(m).include)


# ---------------------------------------------------------------------------
# projective covers and presentations


@dataclass
class ProjSum:
    """A direct sum of representables with per object block offsets."""

    cat: FinCategory
    vertices: Tuple
    module: CModule
    offsets: Dict


def proj_sum(cat: FinCategory, vertices: Sequence) -> ProjSum:
    mods = [yoneda_projective(cat, v) for v in vertices]
    offsets = {}
    for y in cat.objects:
        offs = []
        pos = 0
        for v in vertices:
            offs.append(pos)
            pos += cat.dim(y, v)
        offsets[y] = offs
    module = direct_sum(mods, cat)[0] if mods else zero_module(cat)
    return ProjSum(cat, tuple(vertices), module, offsets)


def proj_sum_map(src: ProjSum, tgt: ProjSum, matrix: Sequence[Sequence]) -> ModuleMap:
    """The map of representable sums with block (j, i) given by a hom element.

    matrix[j][i] holds coordinates in hom(src.vertices[i], tgt.vertices[j]);
    the block acts by postcomposition.
    """
    cat = src.cat
    fld = cat.field
    comps = {}
    for z in cat.objects:
        rows_t = tgt.module.dims[z]
        cols_s = src.module.dims[z]
        vals = [[fld.zero()] * cols_s for _ in range(rows_t)]
        for j, b in enumerate(tgt.vertices):
            for i, a in enumerate(src.vertices):
                h = matrix[j][i]
                for k in range(cat.dim(z, a)):
                    col = cat.compose(z, a, b, cat.basis_coords(z, a, k), h)
                    for t, v in enumerate(col):
                        vals[tgt.offsets[z][j] + t][src.offsets[z][i] + k] = v
        comps[z] = (Mat.from_rows(fld, vals) if rows_t
                    else Mat.zeros(fld, 0, cols_s))
    return ModuleMap(src.module, tgt.module, comps, validate=True)


def proj_sum_matrix(src: ProjSum, tgt: ProjSum, phi: ModuleMap) -> List[List[Tuple]]:
    """Recovers the hom element matrix of a map between representable sums."""
    cat = src.cat
    fld = cat.field
    out = [[None] * len(src.vertices) for _ in tgt.vertices]
    for i, a in enumerate(src.vertices):
        vec = [fld.zero()] * src.module.dims[a]
        off = src.offsets[a][i]
        for t, c in enumerate(cat.units[a]):
            vec[off + t] = c
        img = phi.comps[a] @ Mat.column(fld, vec)
        for j, b in enumerate(tgt.vertices):
            offb = tgt.offsets[a][j]
            out[j][i] = tuple(img.at(offb + t, 0) for t in range(cat.dim(a, b)))
    return out


@dataclass
class Cover:
    psum: ProjSum
    cover: ModuleMap
    kernel: Kernel
    top_dims: Dict


def projective_cover(m: CModule) -> Cover:
    """A projective cover with surjectivity and ker <= rad certificates."""
    cat = m.cat
    fld = cat.field
    top = top_quotient(m)
    vertices, lifts = [], []
    for x in cat.objects:
        for j in range(top.module.dims[x]):
            vertices.append(x)
            lifts.append((x, Mat.column(fld, list(top.sections[x].col(j)))))
    psum = proj_sum(cat, vertices)
    comps = {}
    for y in cat.objects:
        blocks = []
        for (x, elem) in lifts:
            cols = [m.action[(y, x, i)] @ elem for i in range(cat.dim(y, x))]
            blocks.append(hstack(cols) if cols else Mat.zeros(fld, m.dims[y], 0))
        comps[y] = hstack(blocks) if blocks else Mat.zeros(fld, m.dims[y], 0)
    p = ModuleMap(psum.module, m, comps, validate=True)
    if not p.is_surjective():
        raise AssertionError("cover map is not surjective")
    ker = kernel_module(p)
    rad = radical_submodule(psum.module)
    for x in cat.objects:
        if solve(rad.include.comps[x], ker.include.comps[x]) is None:
            raise AssertionError("cover kernel is not contained in the radical")
    return Cover(psum, p, ker, {x: top.module.dims[x] for x in cat.objects})


@dataclass
class Presentation:
    p1: ProjSum
    p0: ProjSum
    differential: ModuleMap
    cover: ModuleMap
    kernel: Kernel
    matrix: List[List[Tuple]]


def minimal_presentation(m: CModule) -> Presentation:
    c0 = projective_cover(m)
    c1 = projective_cover(c0.kernel.module)
    d = c1.cover.then(c0.kernel.include)
    matrix = proj_sum_matrix(c1.psum, c0.psum, d)
    if proj_sum_map(c1.psum, c0.psum, matrix) != d:
        raise AssertionError("presentation matrix does not rebuild the differential")
    return Presentation(c1.psum, c0.psum, d, c0.cover, c0.kernel, matrix)


def is_projective_module(m: CModule) -> bool:
    return projective_cover(m).kernel.module.is_zero()


# ---------------------------------------------------------------------------
# duality, transpose, translates


def duality_D(m: CModule) -> CModule:
    """The componentwise dual, a module over the opposite category."""
    op = opposite_category(m.cat)
    action = {}
    for x in op.objects:
        for y in op.objects:
            for i in range(op.dim(x, y)):
                action[(x, y, i)] = m.action[(y, x, i)].transpose()
    return CModule(op, dict(m.dims), action, validate=True)


def dual_map(phi: ModuleMap) -> ModuleMap:
    """Duality on maps: reverses direction, transposes components."""
    return ModuleMap(duality_D(phi.tgt), duality_D(phi.src),
                     {x: phi.comps[x].transpose() for x in phi.comps},
                     validate=True)


def _transpose_raw(m: CModule) -> CModule:
    pres = minimal_presentation(m)
    op = opposite_category(m.cat)
    s1 = proj_sum(op, pres.p1.vertices)
    s0 = proj_sum(op, pres.p0.vertices)
    dual_matrix = [[pres.matrix[j][i] for j in range(len(pres.p0.vertices))]
                   for i in range(len(pres.p1.vertices))]
    dualized = proj_sum_map(s0, s1, dual_matrix)
    return cokernel_module(dualized).module


def transpose(m: CModule) -> CModule:
    """Cokernel of the dualized differential of a minimal presentation.

    Rejects inputs with a projective direct summand: the double transpose
    recovers exactly the projective-free part, so a dimension drop there
    pins down the summand's dim vector without any idempotent search.
    """
    t = _transpose_raw(m)
    back = _transpose_raw(t)
    if back.dims != m.dims:
        gap = {x: m.dims[x] - back.dims[x] for x in m.cat.objects
               if m.dims[x] != back.dims[x]}
        raise PreconditionError(f"projective summand with dims {gap} present")
    return t


def tau(m: CModule) -> CModule:
    """The translate D Tr; rejects projective summands, whose translate
    would vanish."""
    t = duality_D(transpose(m))
    return CModule(m.cat, t.dims, t.action, validate=False)


def tau_inverse(m: CModule) -> CModule:
    """The inverse translate Tr D; zero exactly on injectives."""
    t = _transpose_raw(duality_D(m))
    return CModule(m.cat, t.dims, t.action, validate=False)


def is_injective_module(m: CModule) -> bool:
    return is_projective_module(duality_D(m))


# ---------------------------------------------------------------------------
# End algebras, isomorphism and decomposition


def end_algebra(m: CModule) -> Tuple[TableAlgebra, List[ModuleMap]]:
    basis = hom_space(m, m)
    if not basis:
        raise PreconditionError("End algebra of the zero module")
    basis_mat = hstack([flatten_map(b) for b in basis])

    def compose_pair(i: int, j: int) -> Mat:
        return flatten_map(basis[j].then(basis[i]))

    alg = end_table(m.cat.field, basis_mat, flatten_map(identity_map(m)), compose_pair)
    return alg, basis


def map_from_coords(basis: List[ModuleMap], coords) -> ModuleMap:
    fld = basis[0].src.cat.field
    out = zero_map(basis[0].src, basis[0].tgt)
    for c, b in zip(coords, basis):
        if c != fld.zero():
            out = out.add(b.scale(c))
    return out


def radical_end_maps(m: CModule) -> List[ModuleMap]:
    alg, basis = end_algebra(m)
    rad = radical_basis(alg)
    return [map_from_coords(basis, tuple(rad.col(j))) for j in range(rad.cols)]


def is_isomorphic(m: CModule, n: CModule) -> Optional[Tuple[ModuleMap, ModuleMap]]:
    """An explicit inverse pair (f: m -> n, g: n -> m), or a certified None.

    The None branch certifies non-isomorphism: every pairwise product of hom
    bases lies in rad End(m), so no composite can be the identity.
    """
    if m.is_zero() or n.is_zero():
        if m.is_zero() and n.is_zero():
            return zero_map(m, n), zero_map(n, m)
        return None
    if m.dims != n.dims:
        return None
    fwd = hom_space(m, n)
    bwd = hom_space(n, m)
    if not fwd or not bwd:
        return None
    for f in fwd:
        for g in bwd:
            for a, b in ((f, g), (g, f)):
                u = a.then(b)
                uinv = u.inverse()
                if uinv is None:
                    continue
                cand = b.then(uinv)
                if a.then(cand) == identity_map(a.src) and cand.then(a) == identity_map(a.tgt):
                    if a.src is m or a.src == m:
                        return a, cand
                    return cand, a
    alg, basis = end_algebra(m)
    basis_mat = hstack([flatten_map(b) for b in basis])
    rad = radical_basis(alg)
    for f in fwd:
        for g in bwd:
            u = f.then(g)
            coords = solve(basis_mat, flatten_map(u))
            if coords is None:
                raise AssertionError("endomorphism outside its own End space")
            if solve(rad, coords) is None:
                raise CapExceededError("isomorphism test inconclusive")
    return None


@dataclass
class Piece:
    module: CModule
    include: ModuleMap
    project: ModuleMap


def decompose_module(m: CModule) -> List[Piece]:
    """Indecomposable summands with include/project certificates.

    The certificates are checked: project_i o include_i is the identity of
    each piece, cross composites vanish, and the idempotents
    include_i o project_i sum to the identity of m.
    """
    if m.is_zero():
        return []
    out: List[Piece] = []

    def recurse(sub: CModule, include: ModuleMap, project: ModuleMap):
        alg, basis = end_algebra(sub)
        coords = find_nontrivial_idempotent(alg)
        if coords is None:
            out.append(Piece(sub, include, project))
            return
        e = map_from_coords(basis, coords)
        for idem in (e, identity_map(sub).sub(e)):
            img = image_module(idem)
            recurse(img.module, img.include.then(include), project.then(img.project))

    recurse(m, identity_map(m), identity_map(m))
    total = zero_map(m, m)
    for p in out:
        total = total.add(p.project.then(p.include))
    if total != identity_map(m):
        raise AssertionError("summand idempotents do not sum to the identity")
    for i, p in enumerate(out):
        for j, q in enumerate(out):
            comp = p.include.then(q.project)
            if i == j:
                if comp != identity_map(p.module):
                    raise AssertionError("projection of a summand onto itself is not 1")
            elif not comp.is_zero():
                raise AssertionError("summand idempotents are not orthogonal")
    return out


# ---------------------------------------------------------------------------
# extensions


class Ext1:
    """Ext^1(z, x) presented by cocycles K -> x modulo restrictions from P0."""

    def __init__(self, z: CModule, x: CModule):
        self.z = z
        self.x = x
        self.pres = minimal_presentation(z)
        kernel = self.pres.kernel
        self.cocycle_basis = hom_space(kernel.module, x)
        lifted = hom_space(self.pres.p0.module, x)
        fld = z.cat.field
        restricted = [flatten_map(kernel.include.then(psi)) for psi in lifted]
        flat = [flatten_map(b) for b in self.cocycle_basis]
        n = _flat_layout(kernel.module, x)[1]
        rmat = hstack(restricted) if restricted else Mat.zeros(fld, n, 0)
        hmat = hstack(flat) if flat else Mat.zeros(fld, n, 0)
        combined = hstack([rmat, hmat])
        span, pivots = combined.column_space_basis()
        self._span = span
        self._class_slots = [t for t, p in enumerate(pivots) if p >= rmat.cols]
        self.representatives = [self.cocycle_basis[pivots[t] - rmat.cols]
                                for t in self._class_slots]
        self.dim = len(self.representatives)

    def class_of(self, xi: ModuleMap) -> Tuple:
        if self.dim == 0:
            return ()
        coords = solve(self._span, flatten_map(xi))
        if coords is None:
            raise PreconditionError("cocycle is not in the expected hom space")
        return tuple(coords.at(t, 0) for t in self._class_slots)

    def cocycle(self, class_coords) -> ModuleMap:
        fld = self.z.cat.field
        out = zero_map(self.pres.kernel.module, self.x)
        for c, rep in zip(class_coords, self.representatives):
            if c != fld.zero():
                out = out.add(rep.scale(c))
        return out


@dataclass
class ShortExact:
    left: CModule
    middle: CModule
    right: CModule
    include: ModuleMap
    project: ModuleMap


def check_short_exact(se: ShortExact):
    if not se.include.is_injective():
        raise VerificationError("left map is not injective")
    if not se.project.is_surjective():
        raise VerificationError("right map is not surjective")
    if not se.include.then(se.project).is_zero():
        raise VerificationError("composite through the middle is nonzero")
    for x in se.middle.cat.objects:
        if se.middle.dims[x] != se.left.dims[x] + se.right.dims[x]:
            raise VerificationError(f"middle dimension mismatch at {x!r}")


def extension_from_cocycle(ext: Ext1, xi: ModuleMap) -> ShortExact:
    """The pushout extension 0 -> x -> e -> z -> 0 of a cocycle K -> x."""
    kernel = ext.pres.kernel
    xp, injs, projs = direct_sum([ext.x, ext.pres.p0.module])
    phi = ModuleMap(kernel.module, xp,
                    {o: vstack([xi.comps[o], -kernel.include.comps[o]])
                     for o in ext.z.cat.objects}, validate=True)
    ck = cokernel_module(phi)
    include = injs[0].then(ck.project)
    qmap = projs[1].then(ext.pres.cover)
    project = factor_through_cokernel(ck, qmap)
    se = ShortExact(ext.x, ck.module, ext.z, include, project)
    check_short_exact(se)
    return se


def splitting_section(se: ShortExact) -> Optional[ModuleMap]:
    """A section of the right map, when the sequence splits."""
    candidates = hom_space(se.right, se.middle)
    if not candidates:
        return None
    cols = hstack([flatten_map(s.then(se.project)) for s in candidates])
    target = flatten_map(identity_map(se.right))
    sol = solve(cols, target)
    if sol is None:
        return None
    return map_from_coords(candidates, tuple(sol.col(0)))


# ---------------------------------------------------------------------------
# almost split sequences


@dataclass
class AlmostSplit:
    sequence: ShortExact
    tau_module: CModule
    ext_dim: int
    socle_class: Tuple


def _end_action_on_kernel(pres: Presentation, theta: ModuleMap) -> ModuleMap:
    """Restricts a lift of theta in End(z) to the presentation kernel."""
    p = pres.cover
    hom_pp = hom_space(pres.p0.module, pres.p0.module)
    cols = hstack([flatten_map(b.then(p)) for b in hom_pp])
    sol = solve(cols, flatten_map(p.then(theta)))
    if sol is None:
        raise AssertionError("projective lift does not exist")
    theta0 = map_from_coords(hom_pp, tuple(sol.col(0)))
    kappa = pres.kernel.include
    comps = {}
    for x in pres.p0.cat.objects:
        restricted = solve(kappa.comps[x], theta0.comps[x] @ kappa.comps[x])
        if restricted is None:
            raise AssertionError("lift does not preserve the kernel")
        comps[x] = restricted
    return ModuleMap(pres.kernel.module, pres.kernel.module, comps, validate=True)


def almost_split_sequence(z: CModule) -> AlmostSplit:
    """The almost split sequence ending at an indecomposable non-projective z.

    The class is taken in the socle of Ext^1(z, tau z) under the End(z)
    action; the materialized sequence is checked exact and non-split.
    """
    if z.is_zero():
        raise PreconditionError("zero module has no almost split sequence")
    alg, _ = end_algebra(z)
    if find_nontrivial_idempotent(alg) is not None:
        raise PreconditionError("module is decomposable")
    if is_projective_module(z):
        raise PreconditionError("projective module has no almost split sequence")
    tz = tau(z)
    if tz.is_zero():
        raise AssertionError("translate of a non-projective vanished")
    ext = Ext1(z, tz)
    if ext.dim == 0:
        raise AssertionError("vanishing Ext against the translate")
    rads = radical_end_maps(z)
    fld = z.cat.field
    if rads:
        blocks = []
        for r in rads:
            theta_k = _end_action_on_kernel(ext.pres, r)
            cols = []
            for rep in ext.representatives:
                cls = ext.class_of(theta_k.then(rep))
                cols.append(Mat.column(fld, list(cls)))
            blocks.append(hstack(cols))
        socle = vstack(blocks).kernel_basis()
        if socle.cols == 0:
            raise AssertionError("empty socle in Ext against the translate")
        coords = tuple(socle.col(0))
    else:
        coords = tuple(fld.one() if t == 0 else fld.zero() for t in range(ext.dim))
    xi = ext.cocycle(coords)
    se = extension_from_cocycle(ext, xi)
    if splitting_section(se) is not None:
        raise AssertionError("candidate almost split sequence splits")
    return AlmostSplit(se, tz, ext.dim, coords)


def _local_end_top_dim(m: CModule) -> int:
    alg, _ = end_algebra(m)
    return alg.dim - radical_basis(alg).cols


def verify_almost_split(se: ShortExact, test_modules: Sequence[CModule]) -> int:
    """Checks the almost split property of a sequence against test modules.

    For each test module m: maps m -> right factor through the middle unless
    m is isomorphic to the right term, where the failure space has dimension
    dim End/rad; dually for maps left -> m.  Exactness, non-splitness and
    indecomposability of both end terms are also checked.  Returns the
    number of test modules, raises VerificationError on any failure.
    """
    if isinstance(se, AlmostSplit):
        se = se.sequence
    check_short_exact(se)
    if splitting_section(se) is not None:
        raise VerificationError("sequence splits")
    for term, name in ((se.right, "right"), (se.left, "left")):
        alg, _ = end_algebra(term)
        if find_nontrivial_idempotent(alg) is not None:
            raise VerificationError(f"{name} term is decomposable")
    for m in test_modules:
        if m.is_zero():
            raise VerificationError("zero module in the test family")
        into = hom_space(m, se.right)
        lifted = hom_space(m, se.middle)
        cols = [flatten_map(b.then(se.project)) for b in lifted]
        rank = hstack(cols).rank() if cols else 0
        coker = len(into) - rank
        if is_isomorphic(m, se.right) is not None:
            expected = _local_end_top_dim(se.right)
            if coker != expected:
                raise VerificationError(
                    f"maps from the right term itself: cokernel {coker}, expected {expected}")
        elif coker != 0:
            raise VerificationError(
                f"a map {m!r} -> right term does not factor through the middle")
        outof = hom_space(se.left, m)
        extended = hom_space(se.middle, m)
        cols = [flatten_map(se.include.then(b)) for b in extended]
        rank = hstack(cols).rank() if cols else 0
        coker = len(outof) - rank
        if is_isomorphic(m, se.left) is not None:
            expected = _local_end_top_dim(se.left)
            if coker != expected:
                raise VerificationError(
                    f"maps into the left term itself: cokernel {coker}, expected {expected}")
        elif coker != 0:
            raise VerificationError(
                f"a map left term -> {m!r} does not extend through the middle")
    return len(test_modules)


# ---------------------------------------------------------------------------
# Auslander-Reiten quiver by knitting


@dataclass
class ARQuiver:
    modules: List[CModule]
    projective: List[bool]
    injective: List[bool]
    edges: Dict[Tuple[int, int], int]
    tau_pairs: List[Tuple[int, int]]

    def dim_vectors(self) -> List[Dict]:
        return [m.dim_vector() for m in self.modules]


def ar_quiver(cat: FinCategory, dim_cap: int = 64, node_cap: int = 128) -> ARQuiver:
    """Knits the Auslander-Reiten quiver from the projectives.

    Edges into a node are read off once, from rad P for projectives and from
    the decomposed middle of the almost split sequence otherwise; closure
    under the inverse translate reaches every successor.  Caps guard against
    infinite type and raise CapExceededError.
    """
    modules: List[CModule] = []
    queue: List[int] = []
    edges: Dict[Tuple[int, int], int] = {}
    tau_pairs: List[Tuple[int, int]] = []
    projective: List[bool] = []
    injective: List[bool] = []

    def register(m: CModule) -> int:
        for idx, other in enumerate(modules):
            if is_isomorphic(m, other) is not None:
                return idx
        if m.total_dim() > dim_cap:
            raise CapExceededError(
                f"indecomposable of total dimension {m.total_dim()} exceeds cap {dim_cap}")
        if len(modules) >= node_cap:
            raise CapExceededError(f"more than {node_cap} indecomposables")
        modules.append(m)
        projective.append(is_projective_module(m))
        injective.append(is_injective_module(m))
        queue.append(len(modules) - 1)
        return len(modules) - 1

    for x in cat.objects:
        register(yoneda_projective(cat, x))
    done = set()
    while queue:
        i = queue.pop(0)
        if i in done:
            continue
        done.add(i)
        m = modules[i]
        if projective[i]:
            rad = radical_submodule(m)
            if not rad.module.is_zero():
                for piece in decompose_module(rad.module):
                    j = register(piece.module)
                    edges[(j, i)] = edges.get((j, i), 0) + 1
        else:
            ass = almost_split_sequence(m)
            jt = register(ass.tau_module)
            tau_pairs.append((jt, i))
            for piece in decompose_module(ass.sequence.middle):
                j = register(piece.module)
                edges[(j, i)] = edges.get((j, i), 0) + 1
        if not injective[i]:
            register(tau_inverse(m))
    return ARQuiver(modules, projective, injective, edges, tau_pairs)


def global_dimension(cat: FinCategory, cap: int = 16) -> Optional[int]:
    """Max projective dimension of the simples; None when it exceeds the cap."""
    best = 0
    for x in cat.objects:
        m = simple_module(cat, x)
        depth = 0
        while True:
            ker = projective_cover(m).kernel
            if ker.module.is_zero():
                break
            depth += 1
            if depth > cap:
                return None
            m = ker.module
        best = max(best, depth)
    return best
