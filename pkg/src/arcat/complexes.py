"""Bounded n-complexes over a coefficient category, as quiver machinery.

A complex shape is a linear run of degrees (interval or explicit window)
where any n consecutive differentials compose to zero, or a cyclic grading
where consecutive pairs compose to zero.  Each shape compiles to a bound
quiver, so complexes are representations and inherit the whole module
pipeline through phi and psi.

The coil complexes J_j(M) concentrate M on n consecutive degrees joined by
identities (doubling M on a one-vertex cycle); summing them over the
degrees of Z gives a degreewise-surjective chain map onto Z, every
null-homotopic map factors through it by an explicit homotopy formula, and
right approximations combine evaluation copies of the requested generators
with coils built from projective covers.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import PreconditionError, VerificationError
from .fincat import FinCategory
from .linalg import Mat, hstack, solve, vstack
from .modcat import (CModule, ModuleMap, cokernel_module, direct_sum,
                     factor_through_cokernel, flatten_map, identity_map,
                     kernel_module, projective_cover, zero_map, zero_module)
from .quiver import (BoundQuiver, MonomialIdeal, Path, cyclic_quiver,
                     linear_quiver)
from .repcat import QRep, phi, psi, qrep_hom


@dataclass(frozen=True)
class Interval:
    m: int


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int


@dataclass(frozen=True)
class Cyclic:
    order: int


Shape = Union[Interval, Window, Cyclic]


@dataclass(frozen=True)
class NComplexSpec:
    """A nilpotency degree together with the run of degrees carrying it.

    Linear shapes kill every composite of n consecutive differentials and
    need n >= 2; cyclic shapes always kill consecutive pairs around the
    circle, for any order >= 1.
    """
    n: int
    shape: Shape

    def __post_init__(self):
        if isinstance(self.shape, Interval):
            if self.n < 2 or self.shape.m < 1:
                raise PreconditionError("interval shapes need n >= 2 and m >= 1")
        elif isinstance(self.shape, Window):
            if self.n < 2 or self.shape.lo > self.shape.hi:
                raise PreconditionError("window shapes need n >= 2 and lo <= hi")
        elif isinstance(self.shape, Cyclic):
            if self.n < 1 or self.shape.order < 1:
                raise PreconditionError("cyclic shapes need n >= 1 and order >= 1")
        else:
            raise PreconditionError(f"unknown shape {self.shape!r}")

    @property
    def cyclic(self) -> bool:
        return isinstance(self.shape, Cyclic)

    @property
    def window_len(self) -> int:
        """How many consecutive degrees one vanishing composite spans."""
        return 2 if self.cyclic else self.n

    def degrees(self) -> List[int]:
        if isinstance(self.shape, Interval):
            return list(range(1, self.shape.m + 1))
        if isinstance(self.shape, Window):
            return list(range(self.shape.lo, self.shape.hi + 1))
        return list(range(self.shape.order))

    def diff_degrees(self) -> List[int]:
        if self.cyclic:
            return self.degrees()
        return self.degrees()[:-1]

    def wrap(self, i: int) -> Optional[int]:
        """The degree i normalizes to, or None when it falls off the shape."""
        if self.cyclic:
            return i % self.shape.order
        return i if i in range(self.degrees()[0], self.degrees()[-1] + 1) else None

    def vertex(self, i: int) -> str:
        w = self.wrap(i)
        if w is None:
            raise PreconditionError(f"degree {i} is outside the shape")
        return str(w)

    def arrow(self, i: int) -> str:
        w = self.wrap(i)
        if w is None or w not in self.diff_degrees():
            raise PreconditionError(f"no differential at degree {i}")
        return f"a{w}"

    def padded(self) -> "NComplexSpec":
        """The window extended so every coil starting inside it fits."""
        if self.cyclic:
            return self
        lo, hi = self.degrees()[0], self.degrees()[-1]
        return NComplexSpec(self.n, Window(lo, hi + self.n - 1))


def build_category(spec: NComplexSpec) -> BoundQuiver:
    """The bound quiver whose representations are complexes of this shape."""
    if spec.cyclic:
        order = spec.shape.order
        q = cyclic_quiver(order)
        gens = [Path(str(i), str((i + 2) % order),
                     (f"a{i}", f"a{(i + 1) % order}"))
                for i in range(order)]
        return BoundQuiver(q, MonomialIdeal(frozenset(gens)))
    degs = spec.degrees()
    q = linear_quiver(len(degs), start=degs[0])
    gens = []
    for i in degs:
        if i + spec.n <= degs[-1]:
            arrows = tuple(f"a{i + k}" for k in range(spec.n))
            gens.append(Path(str(i), str(i + spec.n), arrows))
    return BoundQuiver(q, MonomialIdeal(frozenset(gens)))


class NComplex:
    """Components and differentials indexed by the degrees of a shape."""

    def __init__(self, spec: NComplexSpec, coeff: FinCategory,
                 components: Dict[int, CModule],
                 differentials: Dict[int, ModuleMap], validate: bool = True):
        self.spec = spec
        self.coeff = coeff
        self.components = dict(components)
        self.differentials = dict(differentials)
        if validate:
            self._validate()

    def _validate(self):
        spec = self.spec
        for i in spec.degrees():
            m = self.components.get(i)
            if m is None or not (m.cat is self.coeff or m.cat == self.coeff):
                raise PreconditionError(f"missing or foreign component at degree {i}")
        for i in spec.diff_degrees():
            d = self.differentials.get(i)
            if d is None:
                raise PreconditionError(f"missing differential at degree {i}")
            tgt = spec.wrap(i + 1)
            if d.src != self.components[i] or d.tgt != self.components[tgt]:
                raise PreconditionError(f"differential endpoints wrong at degree {i}")
        length = spec.window_len
        for i in spec.degrees():
            if not spec.cyclic and i + length > spec.degrees()[-1] + 1:
                continue
            cur = None
            ok = True
            for k in range(length):
                j = spec.wrap(i + k)
                if j is None or j not in spec.diff_degrees():
                    ok = False
                    break
                step = self.differentials[j]
                cur = step if cur is None else cur.then(step)
            if ok and cur is not None and not cur.is_zero():
                raise PreconditionError(
                    f"window of {length} differentials from degree {i} is nonzero")

    def d(self, i: int) -> ModuleMap:
        w = self.spec.wrap(i)
        if w is None or w not in self.spec.diff_degrees():
            raise PreconditionError(f"no differential at degree {i}")
        return self.differentials[w]

    def composite(self, i: int, count: int) -> ModuleMap:
        """The composite of `count` differentials starting at degree i."""
        w = self.spec.wrap(i)
        if w is None:
            raise PreconditionError(f"degree {i} is outside the shape")
        cur = identity_map(self.components[w])
        for k in range(count):
            cur = cur.then(self.d(i + k))
        return cur

    def total_dim(self) -> int:
        return sum(m.total_dim() for m in self.components.values())

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())

    def degree_dims(self) -> Dict[int, int]:
        return {i: self.components[i].total_dim() for i in self.spec.degrees()}

    def __eq__(self, other):
        return (isinstance(other, NComplex) and self.spec == other.spec
                and self.coeff == other.coeff
                and self.components == other.components
                and self.differentials == other.differentials)

    __hash__ = object.__hash__

    def __repr__(self):
        return f"NComplex({self.degree_dims()})"


class NChainMap:
    """Degreewise maps commuting with both differentials."""

    def __init__(self, src: NComplex, tgt: NComplex, comps: Dict[int, ModuleMap],
                 validate: bool = True):
        if src.spec != tgt.spec:
            raise PreconditionError("chain map endpoints have different shapes")
        self.src = src
        self.tgt = tgt
        self.comps = dict(comps)
        if validate:
            self._validate()

    def _validate(self):
        spec = self.src.spec
        for i in spec.degrees():
            f = self.comps.get(i)
            if f is None:
                raise PreconditionError(f"missing component at degree {i}")
            if f.src != self.src.components[i] or f.tgt != self.tgt.components[i]:
                raise PreconditionError(f"component endpoints wrong at degree {i}")
        for i in spec.diff_degrees():
            j = spec.wrap(i + 1)
            left = self.src.differentials[i].then(self.comps[j])
            right = self.comps[i].then(self.tgt.differentials[i])
            if left != right:
                raise PreconditionError(f"square at degree {i} does not commute")

    def then(self, other: "NChainMap") -> "NChainMap":
        comps = {i: self.comps[i].then(other.comps[i]) for i in self.comps}
        return NChainMap(self.src, other.tgt, comps, validate=False)

    def add(self, other: "NChainMap") -> "NChainMap":
        comps = {i: self.comps[i].add(other.comps[i]) for i in self.comps}
        return NChainMap(self.src, self.tgt, comps, validate=False)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.comps.values())

    def is_surjective(self) -> bool:
        return all(f.is_surjective() for f in self.comps.values())

    def __eq__(self, other):
        return (isinstance(other, NChainMap) and self.src == other.src
                and self.tgt == other.tgt and self.comps == other.comps)

    __hash__ = object.__hash__


def zero_complex(spec: NComplexSpec, coeff: FinCategory) -> NComplex:
    z = zero_module(coeff)
    return NComplex(spec, coeff, {i: z for i in spec.degrees()},
                    {i: zero_map(z, z) for i in spec.diff_degrees()},
                    validate=False)


def stalk(spec: NComplexSpec, degree: int, m: CModule) -> NComplex:
    """m concentrated in one degree, all differentials zero."""
    w = spec.wrap(degree)
    if w is None:
        raise PreconditionError(f"degree {degree} is outside the shape")
    z = zero_module(m.cat)
    comps = {i: m if i == w else z for i in spec.degrees()}
    diffs = {i: zero_map(comps[i], comps[spec.wrap(i + 1)])
             for i in spec.diff_degrees()}
    return NComplex(spec, m.cat, comps, diffs, validate=False)


def complex_direct_sum(xs: Sequence[NComplex], spec: NComplexSpec,
                       coeff: FinCategory):
    """Returns (total, injections, projections) as chain maps."""
    if not xs:
        z = zero_complex(spec, coeff)
        return z, [], []
    comps, injs, projs = {}, {}, {}
    for i in spec.degrees():
        total, vi, vp = direct_sum([x.components[i] for x in xs], coeff)
        comps[i] = total
        injs[i], projs[i] = vi, vp
    diffs = {}
    for i in spec.diff_degrees():
        j = spec.wrap(i + 1)
        cur = zero_map(comps[i], comps[j])
        for k, x in enumerate(xs):
            cur = cur.add(projs[i][k].then(x.differentials[i]).then(injs[j][k]))
        diffs[i] = cur
    total_complex = NComplex(spec, coeff, comps, diffs, validate=False)
    inj_maps = [NChainMap(x, total_complex,
                          {i: injs[i][k] for i in spec.degrees()}, validate=False)
                for k, x in enumerate(xs)]
    proj_maps = [NChainMap(total_complex, x,
                           {i: projs[i][k] for i in spec.degrees()}, validate=False)
                 for k, x in enumerate(xs)]
    return total_complex, inj_maps, proj_maps


# ---------------------------------------------------------------------------
# the dictionary with representations and tensor modules


def to_rep(x: NComplex, bq: Optional[BoundQuiver] = None) -> QRep:
    if bq is None:
        bq = build_category(x.spec)
    vertex_modules = {x.spec.vertex(i): x.components[i] for i in x.spec.degrees()}
    arrow_maps = {x.spec.arrow(i): x.differentials[i]
                  for i in x.spec.diff_degrees()}
    return QRep(bq, x.coeff, vertex_modules, arrow_maps, validate=True)


def from_rep(spec: NComplexSpec, r: QRep) -> NComplex:
    comps = {i: r.vertex_modules[spec.vertex(i)] for i in spec.degrees()}
    diffs = {i: r.arrow_maps[spec.arrow(i)] for i in spec.diff_degrees()}
    return NComplex(spec, r.coeff, comps, diffs, validate=True)


def to_module(x: NComplex, base: Optional[FinCategory] = None) -> CModule:
    return phi(to_rep(x), base)


def from_module(spec: NComplexSpec, m: CModule) -> NComplex:
    return from_rep(spec, psi(m))


def chain_maps(x: NComplex, z: NComplex) -> List[NChainMap]:
    """A basis of chain maps, computed through the representation side."""
    bq = build_category(x.spec)
    basis = qrep_hom(to_rep(x, bq), to_rep(z, bq))
    out = []
    for qm in basis:
        comps = {i: qm.comps[x.spec.vertex(i)] for i in x.spec.degrees()}
        out.append(NChainMap(x, z, comps, validate=False))
    return out


def _chain_flat(f: NChainMap) -> Mat:
    return vstack([flatten_map(f.comps[i]) for i in f.src.spec.degrees()])


def chain_map_from_module(spec: NComplexSpec, f: ModuleMap,
                          src: Optional[NComplex] = None,
                          tgt: Optional[NComplex] = None) -> NChainMap:
    """Transports a map of tensor-category modules to a chain map."""
    if src is None:
        src = from_module(spec, f.src)
    if tgt is None:
        tgt = from_module(spec, f.tgt)
    comps = {}
    for i in spec.degrees():
        v = spec.vertex(i)
        comps[i] = ModuleMap(src.components[i], tgt.components[i],
                             {c: f.comps[(v, c)] for c in src.coeff.objects},
                             validate=False)
    return NChainMap(src, tgt, comps, validate=True)


# ---------------------------------------------------------------------------
# coil complexes and the coil epimorphism


def interval_J(spec: NComplexSpec, j: int, m: CModule) -> NComplex:
    """m spread over one full window from degree j, joined by identities.

    On a one-vertex cycle the window folds onto itself, so the component
    doubles to m + m with the shift map as differential.
    """
    length = spec.window_len
    if spec.cyclic and spec.shape.order == 1:
        total, injs, projs = direct_sum([m, m], m.cat)
        d0 = projs[0].then(injs[1])
        return NComplex(spec, m.cat, {0: total}, {0: d0}, validate=True)
    degs = spec.degrees()
    if not spec.cyclic and (j not in degs or j + length - 1 not in degs):
        raise PreconditionError(f"window from degree {j} does not fit the shape")
    support = [spec.wrap(j + k) for k in range(length)]
    z = zero_module(m.cat)
    comps = {i: z for i in degs}
    for i in support:
        comps[i] = m
    diffs = {}
    inner = {spec.wrap(j + k) for k in range(length - 1)}
    for i in spec.diff_degrees():
        if i in inner:
            diffs[i] = identity_map(m)
        else:
            diffs[i] = zero_map(comps[i], comps[spec.wrap(i + 1)])
    return NComplex(spec, m.cat, comps, diffs, validate=True)


def interval_J_map(spec: NComplexSpec, j: int, f: ModuleMap) -> NChainMap:
    """The coil construction applied to a coefficient map."""
    src = interval_J(spec, j, f.src)
    tgt = interval_J(spec, j, f.tgt)
    if spec.cyclic and spec.shape.order == 1:
        _, injs_s, projs_s = direct_sum([f.src, f.src], f.src.cat)
        _, injs_t, projs_t = direct_sum([f.tgt, f.tgt], f.tgt.cat)
        comp = projs_s[0].then(f).then(injs_t[0]).add(
            projs_s[1].then(f).then(injs_t[1]))
        return NChainMap(src, tgt, {0: comp}, validate=True)
    comps = {}
    for i in spec.degrees():
        if src.components[i].is_zero() and tgt.components[i].is_zero():
            comps[i] = zero_map(src.components[i], tgt.components[i])
        elif src.components[i] == f.src:
            comps[i] = f
        else:
            comps[i] = zero_map(src.components[i], tgt.components[i])
    return NChainMap(src, tgt, comps, validate=True)


def pad_complex(x: NComplex, spec: NComplexSpec) -> NComplex:
    """x viewed on a larger window, zero outside its own degrees."""
    if x.spec == spec:
        return x
    if x.spec.cyclic or spec.cyclic:
        raise PreconditionError("only linear shapes can be padded")
    if x.spec.n != spec.n:
        raise PreconditionError("padding cannot change the nilpotency degree")
    old = set(x.spec.degrees())
    if not old <= set(spec.degrees()):
        raise PreconditionError("target window does not contain the source")
    z = zero_module(x.coeff)
    comps = {i: x.components[i] if i in old else z for i in spec.degrees()}
    diffs = {}
    for i in spec.diff_degrees():
        if i in x.spec.diff_degrees():
            diffs[i] = x.differentials[i]
        else:
            diffs[i] = zero_map(comps[i], comps[i + 1])
    return NComplex(spec, x.coeff, comps, diffs, validate=False)


def pad_chain_map(f: NChainMap, spec: NComplexSpec) -> NChainMap:
    src = pad_complex(f.src, spec)
    tgt = pad_complex(f.tgt, spec)
    comps = {}
    for i in spec.degrees():
        if i in f.comps:
            comps[i] = f.comps[i]
        else:
            comps[i] = zero_map(src.components[i], tgt.components[i])
    return NChainMap(src, tgt, comps, validate=False)


@dataclass
class CoilEpi:
    padded: NComplex
    source: NComplex
    blocks: List[int]
    injections: List[NChainMap]
    p: NChainMap


def coil_epi(z: NComplex) -> CoilEpi:
    """The degreewise-surjective map from the sum of coils on z's degrees.

    The coil at degree j maps in through the composites (1, d, d^2, ...)
    starting at j; the identity block at each degree forces surjectivity.
    """
    spec_p = z.spec.padded()
    zp = pad_complex(z, spec_p) if not z.spec.cyclic else z
    blocks = z.spec.degrees()
    length = spec_p.window_len
    coils = [interval_J(spec_p, j, z.components[j]) for j in blocks]
    source, injs, projs = complex_direct_sum(coils, spec_p, z.coeff)
    comps = {}
    for i in spec_p.degrees():
        cur = zero_map(source.components[i], zp.components[i])
        for t, j in enumerate(blocks):
            if spec_p.cyclic and spec_p.shape.order == 1:
                m = z.components[j]
                _, _, dbl_projs = direct_sum([m, m], z.coeff)
                part = dbl_projs[0].add(dbl_projs[1].then(zp.differentials[0]))
                cur = cur.add(projs[t].comps[i].then(part))
                continue
            offsets = [k for k in range(length) if spec_p.wrap(j + k) == i]
            for k in offsets:
                step = _composite_or_none(zp, j, k)
                if step is None:
                    continue
                cur = cur.add(projs[t].comps[i].then(step))
        comps[i] = cur
    p = NChainMap(source, zp, comps, validate=True)
    for i in spec_p.degrees():
        comp = p.comps[i]
        if not comp.is_surjective():
            raise VerificationError(f"coil map not surjective at degree {i}")
    return CoilEpi(zp, source, blocks, injs, p)


def _composite_or_none(z: NComplex, j: int, count: int) -> Optional[ModuleMap]:
    """d^{j+count-1} ... d^j, or None when it runs off the shape."""
    cur = identity_map(z.components[z.spec.wrap(j)])
    for k in range(count):
        w = z.spec.wrap(j + k)
        if w is None or w not in z.spec.diff_degrees():
            return None
        cur = cur.then(z.differentials[w])
    return cur


def assemble_null_homotopic(src: NComplex, tgt: NComplex,
                            s: Dict[int, ModuleMap]) -> NChainMap:
    """The chain map determined by a homotopy: the sum over each degree of
    d_tgt^(k) s d_src^(window-1-k); always null-homotopic by construction."""
    spec = src.spec
    length = spec.window_len
    comps = {}
    for i in spec.degrees():
        cur = zero_map(src.components[i], tgt.components[i])
        for k in range(length):
            mid = spec.wrap(i + length - 1 - k)
            low = spec.wrap(i - k)
            if mid is None or low is None or mid not in s:
                continue
            before = _composite_or_none(src, i, length - 1 - k)
            after = _composite_or_none(tgt, low, k)
            if before is None or after is None:
                continue
            cur = cur.add(before.then(s[mid]).then(after))
        comps[i] = cur
    return NChainMap(src, tgt, comps, validate=True)


def find_null_homotopy(l: NChainMap) -> Optional[Dict[int, ModuleMap]]:
    """Degreewise maps s with l = sum of d^(k) s d^(window-1-k), or None.

    s at degree i points window-1 degrees down; summands whose degrees fall
    off a linear shape are dropped.
    """
    spec = l.src.spec
    length = spec.window_len
    coeff = l.src.coeff
    fld = coeff.field
    offs = {}
    total = 0
    for i in spec.degrees():
        tgt_deg = spec.wrap(i - (length - 1))
        if tgt_deg is None:
            continue
        for c in coeff.objects:
            offs[(i, c)] = total
            total += l.tgt.components[tgt_deg].dims[c] * l.src.components[i].dims[c]
    eq_rows: List[List] = []
    rhs_vals: List = []
    zero = fld.zero()
    for i in spec.degrees():
        for c in coeff.objects:
            tgt_rows = l.tgt.components[i].dims[c]
            src_cols = l.src.components[i].dims[c]
            if tgt_rows * src_cols == 0:
                continue
            terms = []
            for k in range(length):
                mid = spec.wrap(i + length - 1 - k)
                low = spec.wrap(i - k)
                if mid is None or low is None or (mid, c) not in offs:
                    continue
                after = _composite_or_none(l.tgt, low, k)
                before = _composite_or_none(l.src, i, length - 1 - k)
                if after is None or before is None:
                    continue
                terms.append((mid, after.comps[c], before.comps[c]))
            lmat = l.comps[i].comps[c]
            for r in range(tgt_rows):
                for q in range(src_cols):
                    row = [zero] * total
                    for mid, amat, bmat in terms:
                        scols = l.src.components[mid].dims[c]
                        base = offs[(mid, c)]
                        for u in range(amat.cols):
                            au = amat.at(r, u)
                            if au == zero:
                                continue
                            for vv in range(scols):
                                bv = bmat.at(vv, q)
                                if bv == zero:
                                    continue
                                idx = base + u * scols + vv
                                row[idx] = fld.add(row[idx], fld.mul(au, bv))
                    eq_rows.append(row)
                    rhs_vals.append(lmat.at(r, q))
    if total == 0:
        if any(v != zero for v in rhs_vals):
            return None
        sol_vals = []
    else:
        a = Mat(fld, len(eq_rows), total, [x for row in eq_rows for x in row])
        b = Mat.column(fld, rhs_vals) if rhs_vals else Mat.zeros(fld, 0, 1)
        sol = solve(a, b)
        if sol is None:
            return None
        sol_vals = list(sol.col(0))
    result = {}
    for i in spec.degrees():
        tgt_deg = spec.wrap(i - (length - 1))
        if tgt_deg is None:
            continue
        comps = {}
        for c in coeff.objects:
            rows = l.tgt.components[tgt_deg].dims[c]
            cols = l.src.components[i].dims[c]
            base = offs[(i, c)]
            comps[c] = Mat(fld, rows, cols, sol_vals[base:base + rows * cols])
        result[i] = ModuleMap(l.src.components[i], l.tgt.components[tgt_deg],
                              comps, validate=True)
    return result


def factor_null_homotopy(l: NChainMap, coil: CoilEpi) -> NChainMap:
    """Factors a null-homotopic map l through the coil surjection exactly."""
    spec_p = coil.padded.spec
    lp = pad_chain_map(l, spec_p) if l.src.spec != spec_p else l
    if lp.tgt != coil.padded:
        raise PreconditionError("map target does not match the coil target")
    s = find_null_homotopy(lp)
    if s is None:
        raise PreconditionError("map is not null-homotopic")
    length = spec_p.window_len
    zp = coil.padded
    src = lp.src
    comps = {}
    for i in spec_p.degrees():
        cur = zero_map(src.components[i], coil.source.components[i])
        for t, j in enumerate(coil.blocks):
            if spec_p.cyclic and spec_p.shape.order == 1:
                m = zp.components[0]
                _, dbl_injs, _ = direct_sum([m, m], zp.coeff)
                d0 = src.differentials[0]
                first = d0.then(s[0]).then(dbl_injs[0])
                second = s[0].then(dbl_injs[1])
                block = first.add(second)
                cur = cur.add(block.then(coil.injections[t].comps[i]))
                continue
            offsets = [k for k in range(length) if spec_p.wrap(j + k) == i]
            for k in offsets:
                top = spec_p.wrap(j + length - 1)
                if top is None or top not in s:
                    continue
                walk = _composite_or_none(src, i, (j + length - 1) - i
                                          if not spec_p.cyclic
                                          else (top - i) % spec_p.shape.order)
                if walk is None:
                    continue
                block = walk.then(s[top])
                cur = cur.add(block.then(coil.injections[t].comps[i]))
        comps[i] = cur
    lifted = NChainMap(src, coil.source, comps, validate=True)
    if lifted.then(coil.p) != lp:
        raise VerificationError("factorization residual is nonzero")
    return lifted


# ---------------------------------------------------------------------------
# truncation and approximations


def hard_truncate(x: NComplex, floor: int) -> NComplex:
    """Zeroes every component below the floor; window shapes only."""
    if not isinstance(x.spec.shape, Window):
        raise PreconditionError("hard truncation needs a window shape")
    z = zero_module(x.coeff)
    comps = {i: x.components[i] if i >= floor else z for i in x.spec.degrees()}
    diffs = {}
    for i in x.spec.diff_degrees():
        if i >= floor:
            diffs[i] = x.differentials[i]
        else:
            diffs[i] = zero_map(comps[i], comps[i + 1])
    return NComplex(x.spec, x.coeff, comps, diffs, validate=True)


@dataclass
class Approximation:
    source: NComplex
    chain_map: NChainMap
    padded: NComplex
    multiplicities: List[int]
    coil: CoilEpi
    certified: List[bool]


def right_approximation(z: NComplex, gens: Sequence[NComplex]) -> Approximation:
    """An approximation Y -> z: evaluation copies of each generator plus the
    coil of projective covers; certifies Hom(G, Y) -> Hom(G, z) surjective."""
    coil = coil_epi(z)
    spec_p = coil.padded.spec
    zp = coil.padded
    covers = []
    for j in coil.blocks:
        cov = projective_cover(z.components[j])
        covers.append((j, cov))
    cover_coils = [interval_J(spec_p, j, cov.psum.module) for j, cov in covers]
    cover_maps = [interval_J_map(spec_p, j, cov.cover) for j, cov in covers]
    coil_src, c_injs, c_projs = complex_direct_sum(cover_coils, spec_p, z.coeff)
    p_prime_comps = {}
    for i in spec_p.degrees():
        cur = zero_map(coil_src.components[i], coil.source.components[i])
        for t in range(len(covers)):
            cur = cur.add(c_projs[t].comps[i].then(cover_maps[t].comps[i])
                          .then(coil.injections[t].comps[i]))
        p_prime_comps[i] = cur
    p_prime = NChainMap(coil_src, coil.source, p_prime_comps, validate=True)
    r = p_prime.then(coil.p)
    gens_p = [pad_complex(g, spec_p) if g.spec != spec_p else g for g in gens]
    eval_bases = [chain_maps(g, zp) for g in gens_p]
    pieces: List[NComplex] = []
    piece_maps: List[NChainMap] = []
    multiplicities = []
    for g, basis in zip(gens_p, eval_bases):
        multiplicities.append(len(basis))
        for f in basis:
            pieces.append(g)
            piece_maps.append(f)
    pieces.append(coil_src)
    piece_maps.append(r)
    y, injs, projs = complex_direct_sum(pieces, spec_p, z.coeff)
    g_comps = {}
    for i in spec_p.degrees():
        cur = zero_map(y.components[i], zp.components[i])
        for t, f in enumerate(piece_maps):
            cur = cur.add(projs[t].comps[i].then(f.comps[i]))
        g_comps[i] = cur
    g_map = NChainMap(y, zp, g_comps, validate=True)
    if not g_map.is_surjective():
        raise VerificationError("approximation map is not degreewise surjective")
    certified = []
    for g, basis in zip(gens_p, eval_bases):
        target_dim = len(basis)
        if target_dim == 0:
            certified.append(True)
            continue
        cols = [_chain_flat(f.then(g_map)) for f in chain_maps(g, y)]
        if not cols:
            certified.append(False)
            continue
        certified.append(hstack(cols).rank() == target_dim)
    if not all(certified):
        raise VerificationError("approximation certificate failed")
    return Approximation(y, g_map, zp, multiplicities, coil, certified)


# ---------------------------------------------------------------------------
# stalk filtrations on cyclic shapes


@dataclass
class StalkFiltration:
    steps: List[Tuple[int, CModule]]


def stalk_filtration_certificate(x: NComplex,
                                 cap: int = 64) -> Optional[StalkFiltration]:
    """Greedily peels stalk subcomplexes spanned by differential kernels.

    Success certifies membership in the extension closure of stalks;
    returning None only means the greedy search gave up.
    """
    if not x.spec.cyclic:
        raise PreconditionError("stalk filtrations are for cyclic shapes")
    spec = x.spec
    steps: List[Tuple[int, CModule]] = []
    cur = x
    rounds = 0
    while cur.total_dim() > 0:
        rounds += 1
        if rounds > cap:
            return None
        peeled = False
        for j in spec.degrees():
            ker = kernel_module(cur.differentials[j])
            if ker.module.total_dim() == 0:
                continue
            steps.append((j, ker.module))
            ck = cokernel_module(ker.include)
            comps = dict(cur.components)
            comps[j] = ck.module
            diffs = {}
            for i in spec.diff_degrees():
                d = cur.differentials[i]
                if i == j:
                    d = factor_through_cokernel(ck, d)
                if spec.wrap(i + 1) == j:
                    d = d.then(ck.project)
                diffs[i] = d
            cur = NComplex(spec, x.coeff, comps, diffs, validate=True)
            peeled = True
            break
        if not peeled:
            return None
    return StalkFiltration(steps)
