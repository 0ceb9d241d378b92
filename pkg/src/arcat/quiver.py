"""Quivers bound by admissible monomial ideals.

A path is stored as the tuple of arrow ids in application order, so the
composite usually written a_l ... a_2 a_1 is the tuple (a_1, a_2, ..., a_l).
A monomial ideal is a set of generator paths of length at least two; a path
survives modulo the ideal when no generator occurs as a contiguous factor.
Admissibility is decided exactly: the surviving paths of a bound quiver form
a finite set, with per vertex nilpotency bounds, or the search proves the set
infinite by pumping a repeated suffix state.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import CapExceededError, NotAdmissibleError, PreconditionError


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    """A directed path; arrows listed in application order (first applied first)."""

    source: str
    target: str
    arrows: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.arrows)

    def contains_factor(self, factor: Tuple[str, ...]) -> bool:
        n, m = len(self.arrows), len(factor)
        return any(self.arrows[i:i + m] == factor for i in range(n - m + 1))

    def __repr__(self):
        if not self.arrows:
            return f"e_{self.source}"
        return "*".join(reversed(self.arrows))


class Quiver:
    """A finite directed multigraph with named vertices and arrows."""

    def __init__(self, vertices: List[str], arrows: List[Arrow]):
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex names")
        names = [a.name for a in arrows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate arrow names")
        vset = set(vertices)
        for a in arrows:
            if a.source not in vset or a.target not in vset:
                raise ValueError(f"arrow {a.name} has endpoint outside the quiver")
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self.arrow_by_name = {a.name: a for a in arrows}
        self._out: Dict[str, List[Arrow]] = {v: [] for v in vertices}
        for a in arrows:
            self._out[a.source].append(a)
        for v in self._out:
            self._out[v].sort(key=lambda a: a.name)

    def out_arrows(self, v: str) -> List[Arrow]:
        return list(self._out[v])

    def trivial_path(self, v: str) -> Path:
        if v not in self._out:
            raise ValueError(f"no vertex {v}")
        return Path(v, v, ())

    def path(self, arrow_names: List[str]) -> Path:
        """Build a path from arrow names in application order."""
        if not arrow_names:
            raise ValueError("empty arrow list; use trivial_path")
        arrows = [self.arrow_by_name[n] for n in arrow_names]
        for a, b in zip(arrows, arrows[1:]):
            if a.target != b.source:
                raise ValueError(f"arrows {a.name}, {b.name} do not compose")
        return Path(arrows[0].source, arrows[-1].target, tuple(arrow_names))

    def __eq__(self, other):
        return (isinstance(other, Quiver) and self.vertices == other.vertices
                and self.arrows == other.arrows)

    def __hash__(self):
        return hash((self.vertices, self.arrows))


@dataclass(frozen=True)
class MonomialIdeal:
    generators: FrozenSet[Path] = field(default_factory=frozenset)

    def __post_init__(self):
        for g in self.generators:
            if g.length < 2:
                raise PreconditionError(f"ideal generator {g!r} has length {g.length} < 2")

    def kills(self, p: Path) -> bool:
        return any(p.contains_factor(g.arrows) for g in self.generators)

    def kills_suffix(self, arrows: Tuple[str, ...]) -> bool:
        """True when some generator is a suffix of the given arrow word."""
        return any(len(g.arrows) <= len(arrows)
                   and arrows[len(arrows) - len(g.arrows):] == g.arrows
                   for g in self.generators)


def is_admissible(quiver: Quiver, ideal: MonomialIdeal, cap: int = 32) -> Optional[Dict[str, int]]:
    """Decide admissibility; returns the minimal nilpotency bound per vertex.

    Returns None when the surviving paths are proven infinite (a suffix state
    repeats along one walk, so it can be pumped).  Raises CapExceededError
    when a surviving path of length cap is met before either decision; that
    is reported distinctly because it is an artifact limit, not a proof.
    """
    for g in ideal.generators:
        try:
            built = quiver.path(list(g.arrows))
        except (KeyError, ValueError) as exc:
            raise PreconditionError(f"ideal generator {g!r} is not a path: {exc}")
        if (built.source, built.target) != (g.source, g.target):
            raise PreconditionError(f"ideal generator {g!r} has wrong endpoints")
    suffix_len = max((g.length for g in ideal.generators), default=1) - 1
    # max length of a surviving path with source or target v
    touch = {v: 0 for v in quiver.vertices}

    def walk(source: str, vertex: str, arrows: Tuple[str, ...], seen_states: set) -> bool:
        # returns False when a repeated suffix state proves non-admissibility
        if len(arrows) >= cap:
            raise CapExceededError(
                f"surviving path of length {cap} reached; raise the cap to decide")
        for a in quiver.out_arrows(vertex):
            word = arrows + (a.name,)
            if ideal.kills_suffix(word):
                continue
            state = (a.target, word[-suffix_len:] if suffix_len else ())
            if state in seen_states:
                return False
            length = len(word)
            if length > touch[a.target]:
                touch[a.target] = length
            if length > touch[source]:
                touch[source] = length
            seen_states.add(state)
            ok = walk(source, a.target, word, seen_states)
            seen_states.discard(state)
            if not ok:
                return False
        return True

    for v in quiver.vertices:
        if not walk(v, v, (), {(v, ())}):
            return None
    return {v: touch[v] + 1 for v in quiver.vertices}


class BoundQuiver:
    """A quiver with an admissible monomial ideal and its nilpotency bounds."""

    def __init__(self, quiver: Quiver, ideal: MonomialIdeal = MonomialIdeal(),
                 cap: int = 32):
        bounds = is_admissible(quiver, ideal, cap=cap)
        if bounds is None:
            raise NotAdmissibleError(
                "ideal is not admissible: surviving paths can be pumped")
        self.quiver = quiver
        self.ideal = ideal
        self.bounds = bounds
        self._paths: Optional[Dict[Tuple[str, str], List[Path]]] = None

    def all_paths(self) -> Dict[Tuple[str, str], List[Path]]:
        """Every surviving path, keyed by (source, target), canonically sorted."""
        if self._paths is None:
            table: Dict[Tuple[str, str], List[Path]] = {}
            for v in self.quiver.vertices:
                for w in self.quiver.vertices:
                    table[(v, w)] = []
            for v in self.quiver.vertices:
                table[(v, v)].append(self.quiver.trivial_path(v))
                frontier = [(v, ())]
                while frontier:
                    nxt = []
                    for vertex, arrows in frontier:
                        for a in self.quiver.out_arrows(vertex):
                            word = arrows + (a.name,)
                            if self.ideal.kills_suffix(word):
                                continue
                            table[(v, a.target)].append(Path(v, a.target, word))
                            nxt.append((a.target, word))
                    frontier = nxt
            for key in table:
                table[key].sort(key=lambda p: (p.length, p.arrows))
            self._paths = table
        return self._paths

    def paths(self, v: str, w: str) -> List[Path]:
        return list(self.all_paths()[(v, w)])

    def __eq__(self, other):
        return (isinstance(other, BoundQuiver) and self.quiver == other.quiver
                and self.ideal == other.ideal)

    def __hash__(self):
        return hash((self.quiver, self.ideal))


def enumerate_paths(bq: BoundQuiver, v: str, w: str) -> List[Path]:
    """Surviving paths from v to w, sorted by (length, arrow names)."""
    if v not in bq.quiver.vertices or w not in bq.quiver.vertices:
        raise ValueError(f"no vertex pair ({v}, {w})")
    return bq.paths(v, w)


def opposite(bq: BoundQuiver) -> BoundQuiver:
    """Reverse every arrow; ideal generators reverse their application order.

    Arrow names are kept, so opposite(opposite(bq)) is structurally equal
    to bq.
    """
    q = bq.quiver
    op_arrows = [Arrow(a.name, a.target, a.source) for a in q.arrows]
    op_quiver = Quiver(list(q.vertices), op_arrows)
    op_gens = frozenset(Path(g.target, g.source, tuple(reversed(g.arrows)))
                        for g in bq.ideal.generators)
    return BoundQuiver(op_quiver, MonomialIdeal(op_gens))


@dataclass
class PathSpace:
    """The left path space at a vertex: one vertex per surviving path from it.

    Vertices are keyed deterministically ("e" for the trivial path, else the
    arrow names joined in application order); each arrow extends a path by
    one quiver arrow.
    """

    source_vertex: str
    bound_quiver: BoundQuiver            # tree shaped, empty ideal
    path_by_vertex: Dict[str, Path]
    extension_by_arrow: Dict[str, Tuple[str, str, str]]  # arrow -> (p key, quiver arrow, ap key)

    @property
    def quiver(self) -> Quiver:
        return self.bound_quiver.quiver


def path_key(p: Path) -> str:
    return ".".join(p.arrows) if p.arrows else "e"


def left_path_space(bq: BoundQuiver, v: str) -> PathSpace:
    if v not in bq.quiver.vertices:
        raise ValueError(f"no vertex {v}")
    paths = []
    for w in bq.quiver.vertices:
        paths.extend(bq.paths(v, w))
    paths.sort(key=lambda p: (p.length, p.arrows))
    by_key = {path_key(p): p for p in paths}
    vertices = [path_key(p) for p in paths]
    arrows = []
    extensions = {}
    for p in paths:
        for a in bq.quiver.out_arrows(p.target):
            word = p.arrows + (a.name,)
            if bq.ideal.kills_suffix(word):
                continue
            ap = Path(v, a.target, word)
            name = f"{path_key(p)}+{a.name}"
            arrows.append(Arrow(name, path_key(p), path_key(ap)))
            extensions[name] = (path_key(p), a.name, path_key(ap))
    space_quiver = Quiver(vertices, arrows)
    return PathSpace(v, BoundQuiver(space_quiver, MonomialIdeal()), by_key, extensions)


def linear_quiver(m: int, prefix: str = "a", start: int = 1) -> Quiver:
    """The A_m quiver start -> start+1 -> ... with arrows prefix+i."""
    vertices = [str(start + i) for i in range(m)]
    arrows = [Arrow(f"{prefix}{start + i}", str(start + i), str(start + i + 1))
              for i in range(m - 1)]
    return Quiver(vertices, arrows)


def cyclic_quiver(n: int, prefix: str = "a") -> Quiver:
    """The cyclic quiver on Z_n; n = 1 gives a single loop."""
    if n < 1:
        raise ValueError("cyclic quiver needs at least one vertex")
    vertices = [str(i) for i in range(n)]
    arrows = [Arrow(f"{prefix}{i}", str(i), str((i + 1) % n)) for i in range(n)]
    return Quiver(vertices, arrows)
