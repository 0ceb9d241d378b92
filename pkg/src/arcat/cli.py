"""Command-line front end: job files in, certificates and DOT graphs out.

A job file has sections [field], [quiver], [ideal], [coefficient], and
[command].  The quiver section either lists vertices and arrows or names a
complex shape; the ideal section lists relations as arrow sequences in
application order; the coefficient section is a second quiver (with inline
relations) or a point.  Exit codes: 0 verified, 1 parse or usage error,
2 precondition failure, 3 verification failure.
"""

import argparse
import sys
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple, Union

from .complexes import NComplexSpec, Interval, Window, Cyclic, build_category
from .errors import (CapExceededError, NotAdmissibleError, PreconditionError,
                     VerificationError)
from .fincat import FinCategory, category_of, point_category
from .linalg import Field
from .modcat import (CModule, ShortExact, almost_split_sequence, ar_quiver,
                     direct_sum, is_isomorphic, simple_module, tau,
                     verify_almost_split, yoneda_projective)
from .quiver import Arrow, BoundQuiver, MonomialIdeal, Path, Quiver
from .repcat import f_star_v, phi, psi, tensor_base


class ParseError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass
class QuiverDraft:
    vertices: List[str] = dc_field(default_factory=list)
    arrows: List[Tuple[str, str, str]] = dc_field(default_factory=list)
    relations: List[List[str]] = dc_field(default_factory=list)
    complex_spec: Optional[NComplexSpec] = None
    point: bool = False


@dataclass
class JobSpec:
    fld: Field
    quiver: QuiverDraft
    coefficient: QuiverDraft
    command: str
    params: Dict[str, List[str]]


_COMMANDS = ("info", "tensor", "ar-quiver", "ass", "verify", "approximate",
             "roundtrip")


def _parse_complex_line(value: str, line: int) -> NComplexSpec:
    parts = value.split()
    opts = {}
    words = []
    for p in parts:
        if "=" in p:
            k, _, v = p.partition("=")
            opts[k] = v
        else:
            words.append(p)
    try:
        n = int(opts.get("n", "2"))
    except ValueError:
        raise ParseError(f"bad n value {opts.get('n')!r}", line)
    try:
        if words[0] == "interval" and len(words) == 2:
            return NComplexSpec(n, Interval(int(words[1])))
        if words[0] == "window" and len(words) == 3:
            return NComplexSpec(n, Window(int(words[1]), int(words[2])))
        if words[0] == "cyclic" and len(words) == 2:
            return NComplexSpec(n, Cyclic(int(words[1])))
    except (ValueError, IndexError):
        raise ParseError(f"bad complex shape {value!r}", line)
    except PreconditionError as e:
        raise ParseError(str(e), line)
    raise ParseError(f"bad complex shape {value!r}", line)


def load_spec(text: str, field_override: Optional[str] = None) -> JobSpec:
    """Parses and fully validates a job description."""
    sections = {"field": [], "quiver": [], "ideal": [], "coefficient": [],
                "command": []}
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in sections:
                raise ParseError(f"unknown section [{name}]", no)
            current = name
            continue
        if current is None:
            raise ParseError("content before any section header", no)
        sections[current].append((no, line))

    fld = _parse_field(sections["field"], field_override)
    quiver = _parse_quiver_lines(sections["quiver"], allow_complex=True)
    for no, line in sections["ideal"]:
        key, _, value = line.partition("=")
        if key.strip() != "relation":
            raise ParseError(f"expected 'relation = ...', got {line!r}", no)
        if quiver.complex_spec is not None:
            raise ParseError("complex shapes carry their own relations", no)
        quiver.relations.append(value.split())
    coefficient = _parse_quiver_lines(sections["coefficient"],
                                      allow_complex=False, allow_point=True)
    if not sections["coefficient"]:
        coefficient.point = True

    command = None
    params: Dict[str, List[str]] = {}
    for no, line in sections["command"]:
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            raise ParseError(f"expected 'key = value', got {line!r}", no)
        value = value.strip()
        if key == "name":
            if value not in _COMMANDS:
                raise ParseError(f"unknown command {value!r}", no)
            if command is not None:
                raise ParseError("more than one command name", no)
            command = value
        else:
            if key in params:
                raise ParseError(f"duplicate parameter {key!r}", no)
            params[key] = value.split()
    if command is None:
        raise ParseError("missing command name")
    return JobSpec(fld, quiver, coefficient, command, params)


def _parse_field(lines, override: Optional[str]) -> Field:
    choice = None
    for no, line in lines:
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "p":
            choice = value
        elif key == "rationals" and value in ("true", "yes", "1"):
            choice = "Q"
        else:
            raise ParseError(f"bad field line {line!r}", no)
    if override is not None:
        choice = override
    if choice is None:
        choice = "101"
    if choice in ("Q", "q", "rationals"):
        return Field.rationals()
    try:
        p = int(choice)
    except ValueError:
        raise ParseError(f"bad field {choice!r}")
    try:
        return Field.prime(p)
    except (ValueError, PreconditionError) as e:
        raise ParseError(str(e))


def _parse_quiver_lines(lines, allow_complex: bool,
                        allow_point: bool = False) -> QuiverDraft:
    draft = QuiverDraft()
    for no, line in lines:
        if line.startswith("arrow "):
            rest = line[len("arrow "):]
            name, colon, ends = rest.partition(":")
            if not colon or "->" not in ends:
                raise ParseError(f"expected 'arrow name: src -> tgt'", no)
            src, _, tgt = ends.partition("->")
            draft.arrows.append((name.strip(), src.strip(), tgt.strip()))
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq:
            raise ParseError(f"expected 'key = value', got {line!r}", no)
        if key == "vertices":
            draft.vertices.extend(value.split())
        elif key == "complex" and allow_complex:
            if draft.complex_spec is not None:
                raise ParseError("more than one complex line", no)
            draft.complex_spec = _parse_complex_line(value, no)
        elif key == "relation":
            draft.relations.append(value.split())
        elif key == "point" and allow_point:
            draft.point = value in ("true", "yes", "1")
        else:
            raise ParseError(f"unexpected line {line!r}", no)
    if draft.complex_spec is not None and (draft.vertices or draft.arrows):
        raise ParseError("complex shapes exclude explicit vertices and arrows")
    return draft


def _spec_text(spec: NComplexSpec) -> str:
    if isinstance(spec.shape, Interval):
        return f"interval {spec.shape.m} (n={spec.n})"
    if isinstance(spec.shape, Window):
        return f"window {spec.shape.lo} {spec.shape.hi} (n={spec.n})"
    return f"cyclic {spec.shape.order} (n={spec.n})"


def _resolve_bound_quiver(draft: QuiverDraft, cap: int = 32) -> BoundQuiver:
    if draft.complex_spec is not None:
        return build_category(draft.complex_spec)
    if not draft.vertices:
        raise ParseError("quiver needs vertices")
    arrows = [Arrow(n, s, t) for n, s, t in draft.arrows]
    by_name = {a.name: a for a in arrows}
    try:
        quiver = Quiver(draft.vertices, arrows)
    except ValueError as e:
        raise ParseError(str(e))
    gens = []
    for rel in draft.relations:
        if not rel:
            raise ParseError("empty relation")
        for name in rel:
            if name not in by_name:
                raise ParseError(f"relation uses unknown arrow {name!r}")
        for first, second in zip(rel, rel[1:]):
            if by_name[first].target != by_name[second].source:
                raise ParseError(f"relation {rel} does not compose")
        gens.append(Path(by_name[rel[0]].source, by_name[rel[-1]].target,
                         tuple(rel)))
    return BoundQuiver(quiver, MonomialIdeal(frozenset(gens)), cap=cap)


def _resolve_coefficient(draft: QuiverDraft, fld: Field,
                         cap: int = 32) -> FinCategory:
    if draft.point or (not draft.vertices and not draft.arrows):
        return point_category(fld)
    return category_of(_resolve_bound_quiver(draft, cap), fld)


def _obj_text(obj) -> str:
    if isinstance(obj, tuple):
        return ":".join(_obj_text(o) for o in obj)
    return str(obj)


def _find_object(cat: FinCategory, text: str):
    for obj in cat.objects:
        if _obj_text(obj) == text:
            return obj
    raise PreconditionError(f"no object named {text!r}")


def _dim_vector_text(m: CModule) -> str:
    return ",".join(str(m.dims[x]) for x in m.cat.objects)


def _resolve_target(base: FinCategory, knitted, params) -> CModule:
    spec = params.get("target")
    if not spec:
        raise ParseError("command needs a target")
    kind, rest = spec[0], spec[1:]
    if kind == "projective" and len(rest) == 1:
        return yoneda_projective(base, _find_object(base, rest[0]))
    if kind == "simple" and len(rest) == 1:
        return simple_module(base, _find_object(base, rest[0]))
    if kind == "dims" and rest:
        wanted = ",".join(rest)
        matches = [m for m in knitted.modules if _dim_vector_text(m) == wanted]
        if len(matches) != 1:
            raise PreconditionError(
                f"dim vector {wanted} matches {len(matches)} modules")
        return matches[0]
    raise ParseError(f"bad target {' '.join(spec)!r}")


def export_dot(knitted, base: FinCategory) -> str:
    """A deterministic DOT rendering of a knitted family."""
    lines = ["digraph ar {", "  rankdir=LR;"]
    for i, m in enumerate(knitted.modules):
        flags = ""
        if knitted.projective[i]:
            flags += " P"
        if knitted.injective[i]:
            flags += " I"
        lines.append(f'  n{i} [label="({_dim_vector_text(m)}){flags}"];')
    for (src, tgt) in sorted(knitted.edges):
        mult = knitted.edges[(src, tgt)]
        label = f' [label="{mult}"]' if mult > 1 else ""
        lines.append(f"  n{src} -> n{tgt}{label};")
    for (tz, z) in sorted(knitted.tau_pairs, key=lambda p: p[1]):
        lines.append(f"  n{z} -> n{tz} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _family_from_file(knitted, path: str) -> List[CModule]:
    with open(path, "r", encoding="utf-8") as fh:
        wanted = [line.strip() for line in fh if line.strip()]
    out = []
    for text in wanted:
        matches = [m for m in knitted.modules
                   if _dim_vector_text(m) == text.replace(" ", "")]
        if len(matches) != 1:
            raise PreconditionError(
                f"family entry {text!r} matches {len(matches)} modules")
        out.extend(matches)
    return out


def _cmd_info(job: JobSpec, out: List[str], cap: int):
    b = _resolve_bound_quiver(job.quiver, cap)
    coeff = _resolve_coefficient(job.coefficient, job.fld, cap)
    out.append(f"field: {job.fld}")
    if job.quiver.complex_spec is not None:
        out.append(f"complex shape: {_spec_text(job.quiver.complex_spec)}")
    out.append(f"quiver: {len(b.quiver.vertices)} vertices, "
               f"{len(b.quiver.arrows)} arrows, "
               f"{len(b.ideal.generators)} relations")
    paths = sum(len(b.paths(v, w)) for v in b.quiver.vertices
                for w in b.quiver.vertices)
    out.append(f"surviving paths: {paths}")
    out.append(f"coefficient objects: {len(coeff.objects)}, "
               f"total dim {sum(coeff.dim(x, y) for x in coeff.objects for y in coeff.objects)}")
    out.append(f"tensor category objects: {len(b.quiver.vertices) * len(coeff.objects)}")
    out.append("verified: quiver admissible, categories valid")


def _knit(job: JobSpec, cap: int):
    b = _resolve_bound_quiver(job.quiver, cap)
    coeff = _resolve_coefficient(job.coefficient, job.fld, cap)
    base = tensor_base(b, coeff)
    knitted = ar_quiver(base, dim_cap=cap, node_cap=2 * cap)
    return b, coeff, base, knitted


def _cmd_tensor(job: JobSpec, out: List[str], cap: int):
    b = _resolve_bound_quiver(job.quiver, cap)
    coeff = _resolve_coefficient(job.coefficient, job.fld, cap)
    base = tensor_base(b, coeff)
    out.append(f"objects: {len(base.objects)}")
    for x in base.objects:
        out.append(f"  {_obj_text(x)}")
    total = sum(base.dim(x, y) for x in base.objects for y in base.objects)
    out.append(f"total hom dimension: {total}")
    rad = sum(len(base.radical[(x, y)]) for x in base.objects for y in base.objects)
    out.append(f"radical dimension: {rad}")
    out.append("verified: category laws hold")


def _cmd_ar_quiver(job: JobSpec, out: List[str], cap: int, want_dot: bool):
    _, _, base, knitted = _knit(job, cap)
    if want_dot:
        out.append(export_dot(knitted, base).rstrip("\n"))
        return
    out.append(f"indecomposables: {len(knitted.modules)}")
    for i, m in enumerate(knitted.modules):
        flags = []
        if knitted.projective[i]:
            flags.append("projective")
        if knitted.injective[i]:
            flags.append("injective")
        suffix = f" ({', '.join(flags)})" if flags else ""
        out.append(f"  [{i}] dims ({_dim_vector_text(m)}){suffix}")
    for (src, tgt) in sorted(knitted.edges):
        out.append(f"  edge {src} -> {tgt} x{knitted.edges[(src, tgt)]}")
    for (tz, z) in sorted(knitted.tau_pairs, key=lambda p: p[1]):
        out.append(f"  tau [{z}] = [{tz}]")
    out.append("verified: knitting closed under tau-inverse")


def _cmd_ass(job: JobSpec, out: List[str], cap: int, family_choice: str):
    _, _, base, knitted = _knit(job, cap)
    target = _resolve_target(base, knitted, job.params)
    ass = almost_split_sequence(target)
    family = _family(knitted, family_choice)
    checked = verify_almost_split(ass.sequence, family)
    out.append(f"almost split sequence ending at ({_dim_vector_text(target)})")
    out.append(f"  left   ({_dim_vector_text(ass.sequence.left)})")
    out.append(f"  middle ({_dim_vector_text(ass.sequence.middle)})")
    out.append(f"  right  ({_dim_vector_text(ass.sequence.right)})")
    out.append(f"  ext dimension {ass.ext_dim}")
    out.append(f"verified: almost split against {checked} test modules")


def _family(knitted, choice: str) -> List[CModule]:
    if choice == "complete":
        return list(knitted.modules)
    if choice.startswith("supplied:"):
        return _family_from_file(knitted, choice[len("supplied:"):])
    raise ParseError(f"bad verify family {choice!r}")


def _cmd_verify(job: JobSpec, out: List[str], cap: int, family_choice: str):
    _, _, base, knitted = _knit(job, cap)
    target = _resolve_target(base, knitted, job.params)
    sequence = job.params.get("sequence", ["almost-split"])[0]
    family = _family(knitted, family_choice)
    if sequence == "almost-split":
        ass = almost_split_sequence(target)
        se = ass.sequence
    elif sequence == "split":
        left = tau(target)
        total, injs, projs = direct_sum([left, target])
        se = ShortExact(left, total, target, injs[0], projs[1])
    else:
        raise ParseError(f"bad sequence kind {sequence!r}")
    checked = verify_almost_split(se, family)
    out.append(f"verified: almost split against {checked} test modules")


def _cmd_approximate(job: JobSpec, out: List[str], cap: int):
    from .complexes import (interval_J, right_approximation, stalk)
    spec = job.quiver.complex_spec
    if spec is None:
        raise PreconditionError("approximate needs a complex shape")
    coeff = _resolve_coefficient(job.coefficient, job.fld, cap)
    tspec = job.params.get("target")
    if not tspec or tspec[0] != "stalk" or len(tspec) != 3:
        raise ParseError("approximate needs 'target = stalk <degree> <object>'")
    degree = int(tspec[1])
    mod = yoneda_projective(coeff, _find_object(coeff, tspec[2]))
    z = stalk(spec, degree, mod)
    gen_choice = job.params.get("generators", ["none"])[0]
    if gen_choice == "coils":
        padded = spec.padded()
        gens = [interval_J(padded, j, yoneda_projective(coeff, x))
                for j in spec.degrees() for x in coeff.objects]
    elif gen_choice == "none":
        gens = []
    else:
        raise ParseError(f"bad generators choice {gen_choice!r}")
    ap = right_approximation(z, gens)
    out.append(f"target degrees: {z.degree_dims()}")
    out.append(f"approximation source degrees: {ap.source.degree_dims()}")
    out.append(f"generator multiplicities: {ap.multiplicities}")
    out.append(f"verified: degreewise surjective, "
               f"{len(ap.certified)} generator certificates")


def _cmd_roundtrip(job: JobSpec, out: List[str], cap: int):
    b = _resolve_bound_quiver(job.quiver, cap)
    coeff = _resolve_coefficient(job.coefficient, job.fld, cap)
    base = tensor_base(b, coeff)
    trips = 0
    for x in base.objects:
        m = yoneda_projective(base, x)
        r = psi(m)
        if phi(r, base) != m or psi(phi(r, base)) != r:
            raise VerificationError(f"round trip failed at {_obj_text(x)}")
        trips += 1
    certified = 0
    for v in b.quiver.vertices:
        for c in coeff.objects:
            ind = phi(f_star_v(b, v, yoneda_projective(coeff, c)), base)
            pair = is_isomorphic(ind, yoneda_projective(base, (v, c)))
            if pair is None:
                raise VerificationError(f"induction mismatch at ({v}, {_obj_text(c)})")
            certified += 1
    out.append(f"round trips verified: {trips}")
    out.append(f"inductions certified projective: {certified}")
    out.append("verified: dictionary is exact on representables")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _Parser(prog="arcat", description=__doc__.splitlines()[0])
    parser.add_argument("job", help="path to the job file")
    parser.add_argument("--field", help="override: a prime p or Q")
    parser.add_argument("--cap", type=int, default=64,
                        help="dimension and node caps")
    parser.add_argument("--out", choices=("text", "dot"), default="text")
    parser.add_argument("--verify-family", default="complete",
                        help="complete or supplied:<file>")
    parser.add_argument("--output", help="write output to a file")
    try:
        args = parser.parse_args(argv)
        with open(args.job, "r", encoding="utf-8") as fh:
            text = fh.read()
        job = load_spec(text, args.field)
        out: List[str] = []
        if job.command == "info":
            _cmd_info(job, out, args.cap)
        elif job.command == "tensor":
            _cmd_tensor(job, out, args.cap)
        elif job.command == "ar-quiver":
            _cmd_ar_quiver(job, out, args.cap, args.out == "dot")
        elif job.command == "ass":
            _cmd_ass(job, out, args.cap, args.verify_family)
        elif job.command == "verify":
            _cmd_verify(job, out, args.cap, args.verify_family)
        elif job.command == "approximate":
            _cmd_approximate(job, out, args.cap)
        elif job.command == "roundtrip":
            _cmd_roundtrip(job, out, args.cap)
        else:
            raise ParseError(f"unknown command {job.command!r}")
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except (PreconditionError, NotAdmissibleError, CapExceededError) as e:
        print(f"precondition failed: {e}", file=sys.stderr)
        return 2
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 3
    text_out = "\n".join(out) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text_out)
        except OSError as e:
            print(f"parse error: {e}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text_out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
