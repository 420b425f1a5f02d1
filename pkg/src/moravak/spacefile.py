"""Line-oriented input files for spaces, manifolds and modules.

A space file is sectioned text; ``#`` starts a comment.  Sections:

    [generators]   name degree [polynomial|exterior|laurent-unit]
    [relations]    one sum-of-monomials expression per line
    [sq]           gen i expr        (Sq^i of a generator, 0 < i < |gen|)
    [integral]     degree expr      (spanning entries of the integral image)
    [metadata]     cap/topdegree/dimension N, flags ..., w i expr,
                   lambda expr, pairing expr, torsion expr, index expr bit
    [boundary-generators], [boundary-relations], [boundary-sq]
    [restriction]  gen expr         (image of a total-space generator)

Manifold keys in [metadata] upgrade the result to ManifoldData.  A file
whose first non-blank byte is ``{`` is parsed as the equivalent JSON
document instead.  All diagnostics carry line numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .ahss import SpaceModel
from .errors import ParseError
from .f2alg import (
    EXTERIOR,
    LAURENT,
    POLYNOMIAL,
    AlgebraMap,
    GradedElement,
    GradedGenerator,
    PresentedAlgebra,
    parse_element,
)
from .obstruct import IndexTable, ManifoldData, PairModel
from .rbk import RbkModule, TensorModule
from .steenrod import IntegralityData, SqAction

_KIND_ALIASES = {
    "polynomial": POLYNOMIAL, "poly": POLYNOMIAL,
    "exterior": EXTERIOR, "ext": EXTERIOR,
    "laurent-unit": LAURENT, "laurent": LAURENT, "unit": LAURENT,
}

_SECTIONS = {
    "generators", "relations", "sq", "integral", "metadata",
    "boundary-generators", "boundary-relations", "boundary-sq", "restriction",
}

_MANIFOLD_KEYS = {"dimension", "flags", "w", "lambda", "pairing", "torsion", "index"}


@dataclass
class ParsedSpace:
    model: object  # SpaceModel | ManifoldData
    index: Optional[IndexTable]
    source: str


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _collect_sections(text: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {s: [] for s in _SECTIONS}
    current = None
    for lineno, line in _lines(text):
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno)
            current = name
            continue
        if current is None:
            raise ParseError("content before the first section header", lineno)
        sections[current].append((lineno, line))
    return sections


def _json_to_sections(doc: dict) -> dict[str, list[tuple[int, str]]]:
    """Re-encode a JSON document as section lines so both paths share
    one validation and construction route."""
    out: dict[str, list[tuple[int, str]]] = {s: [] for s in _SECTIONS}
    for row in doc.get("generators", []):
        out["generators"].append((0, " ".join(str(x) for x in row)))
    for expr in doc.get("relations", []):
        out["relations"].append((0, str(expr)))
    for gen, table in doc.get("sq", {}).items():
        for i, expr in table.items():
            out["sq"].append((0, f"{gen} {i} {expr}"))
    for degree, exprs in doc.get("integral", {}).items():
        for expr in exprs:
            out["integral"].append((0, f"{degree} {expr}"))
    for key, value in doc.get("metadata", {}).items():
        if key == "w":
            for i, expr in value.items():
                out["metadata"].append((0, f"w {i} {expr}"))
        elif key == "flags":
            out["metadata"].append((0, "flags " + " ".join(value)))
        elif key in ("torsion", "index"):
            for row in value:
                out["metadata"].append((0, f"{key} {row}"))
        else:
            out["metadata"].append((0, f"{key} {value}"))
    boundary = doc.get("boundary", {})
    for row in boundary.get("generators", []):
        out["boundary-generators"].append((0, " ".join(str(x) for x in row)))
    for expr in boundary.get("relations", []):
        out["boundary-relations"].append((0, str(expr)))
    for gen, table in boundary.get("sq", {}).items():
        for i, expr in table.items():
            out["boundary-sq"].append((0, f"{gen} {i} {expr}"))
    for gen, expr in doc.get("restriction", {}).items():
        out["restriction"].append((0, f"{gen} {expr}"))
    return out


def _parse_generators(rows) -> list[GradedGenerator]:
    gens = []
    for lineno, line in rows:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError("expected: name degree [kind]", lineno)
        name, degree = parts[0], parts[1]
        kind = _KIND_ALIASES.get(parts[2].lower()) if len(parts) == 3 else POLYNOMIAL
        if kind is None:
            raise ParseError(f"unknown generator kind {parts[2]!r}", lineno)
        try:
            gens.append(GradedGenerator(name, int(degree), kind))
        except ValueError:
            raise ParseError(f"bad degree {degree!r}", lineno) from None
    return gens


def _build_algebra(gen_rows, rel_rows, cap: int) -> PresentedAlgebra:
    gens = _parse_generators(gen_rows)
    relations = [parse_element(line, lineno) for lineno, line in rel_rows]
    return PresentedAlgebra(gens, relations, cap)


def _build_action(algebra: PresentedAlgebra, sq_rows) -> SqAction:
    table: dict[str, dict[int, GradedElement]] = {}
    for lineno, line in sq_rows:
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise ParseError("expected: generator i expression", lineno)
        gen, i, expr = parts
        try:
            i = int(i)
        except ValueError:
            raise ParseError(f"bad Sq index {i!r}", lineno) from None
        table.setdefault(gen, {})[i] = parse_element(expr, lineno)
    return SqAction(algebra, table)


def parse_file(path: str | Path) -> ParsedSpace:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from None
    if text.lstrip().startswith("{"):
        try:
            sections = _json_to_sections(json.loads(text))
        except json.JSONDecodeError as err:
            raise ParseError(f"bad JSON: {err}") from None
    else:
        sections = _collect_sections(text)

    meta: dict[str, object] = {"flags": [], "w": {}, "torsion": [], "index": []}
    for lineno, line in sections["metadata"]:
        parts = line.split(None, 1)
        key = parts[0].lower()
        rest = parts[1] if len(parts) > 1 else ""
        if key in ("cap", "topdegree", "dimension"):
            try:
                meta[key] = int(rest)
            except ValueError:
                raise ParseError(f"{key} expects an integer", lineno) from None
        elif key == "flags":
            meta["flags"] = rest.split()
        elif key == "w":
            sub = rest.split(None, 1)
            if len(sub) != 2:
                raise ParseError("expected: w i expression", lineno)
            meta["w"][int(sub[0])] = parse_element(sub[1], lineno)
        elif key == "lambda":
            meta["lambda"] = parse_element(rest, lineno)
        elif key == "pairing":
            meta["pairing"] = parse_element(rest, lineno)
        elif key == "torsion":
            meta["torsion"].append(parse_element(rest, lineno))
        elif key == "index":
            sub = rest.rsplit(None, 1)
            if len(sub) != 2 or sub[1] not in ("0", "1"):
                raise ParseError("expected: index expression bit", lineno)
            meta["index"].append((parse_element(sub[0], lineno), int(sub[1])))
        else:
            raise ParseError(f"unknown metadata key {key!r}", lineno)

    cap = int(meta.get("cap", 16))
    algebra = _build_algebra(sections["generators"], sections["relations"], cap)
    action = _build_action(algebra, sections["sq"])

    integ = None
    if sections["integral"]:
        spans: dict[int, list[GradedElement]] = {}
        for lineno, line in sections["integral"]:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected: degree expression", lineno)
            spans.setdefault(int(parts[0]), []).append(parse_element(parts[1], lineno))
        integ = IntegralityData(action, spans)

    top = meta.get("topdegree", cap)
    space = SpaceModel(algebra, action, integ, int(top))

    is_manifold = any(k in meta for k in ("dimension", "lambda", "pairing")) or \
        any(meta[k] for k in ("flags", "w", "torsion", "index"))
    if not is_manifold:
        return ParsedSpace(space, None, str(path))

    boundary = None
    if sections["boundary-generators"]:
        balg = _build_algebra(sections["boundary-generators"],
                              sections["boundary-relations"], cap)
        baction = _build_action(balg, sections["boundary-sq"])
        bspace = SpaceModel(balg, baction, None, cap)
        images = {}
        for lineno, line in sections["restriction"]:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected: generator expression", lineno)
            images[parts[0]] = parse_element(parts[1], lineno)
        boundary = PairModel(bspace, AlgebraMap(algebra, balg, images))
    elif sections["restriction"]:
        raise ParseError("restriction given without boundary generators")

    manifold = ManifoldData(
        space=space,
        dimension=int(meta.get("dimension", top)),
        sw=meta["w"],
        lam=meta.get("lambda", algebra.zero),
        pairing=meta.get("pairing", algebra.zero),
        flags=frozenset(meta["flags"]),
        torsion4=tuple(meta["torsion"]),
        boundary=boundary,
    )
    index = None
    if meta["index"]:
        values = {}
        for e, bit in meta["index"]:
            values[algebra.express_bits(e, 4)] = bit
        index = IndexTable(values)
    return ParsedSpace(manifold, index, str(path))


def parse_space(path: str | Path):
    """SpaceModel or ManifoldData from a space file."""
    return parse_file(path).model


def serialize_model(parsed: ParsedSpace) -> dict:
    """Canonical JSON document for a parsed space or manifold.

    The document is accepted back by parse_file (JSON route), and two
    files describing the same model serialize identically; reports embed
    it as the input echo.
    """
    model = parsed.model
    space = model.space if isinstance(model, ManifoldData) else model
    algebra = space.algebra
    doc: dict = {
        "generators": [[g.name, g.degree, g.kind] for g in algebra.generators],
        "relations": sorted(str(r) for r in algebra.relations),
        "sq": {},
        "metadata": {"cap": algebra.degree_cap, "topdegree": space.top_degree},
    }
    for g in algebra.generators:
        row = {str(i): str(e) for i, e in sorted(space.action._table[g.name].items())
               if e}
        if row:
            doc["sq"][g.name] = row
    if space.integ is not None:
        doc["integral"] = {
            str(d): sorted(str(e) for e in elems)
            for d, elems in sorted(space.integ._elements.items()) if d != 0}
    if isinstance(model, ManifoldData):
        meta = doc["metadata"]
        meta["dimension"] = model.dimension
        if model.flags:
            meta["flags"] = sorted(model.flags)
        if model.sw:
            meta["w"] = {str(i): str(w) for i, w in sorted(model.sw.items())}
        meta["lambda"] = str(model.lam)
        meta["pairing"] = str(model.pairing)
        if model.torsion4:
            meta["torsion"] = [str(t) for t in model.torsion4]
        if parsed.index is not None:
            meta["index"] = [
                f"{algebra.element_from_bits(4, key)} {bit}"
                for key, bit in sorted(parsed.index.values.items())]
        if model.boundary is not None:
            bspace = model.boundary.space
            doc["boundary"] = {
                "generators": [[g.name, g.degree, g.kind]
                               for g in bspace.algebra.generators],
                "relations": sorted(str(r) for r in bspace.algebra.relations),
                "sq": {g.name: {str(i): str(e) for i, e in
                                sorted(bspace.action._table[g.name].items()) if e}
                       for g in bspace.algebra.generators
                       if any(bspace.action._table[g.name].values())},
            }
            doc["restriction"] = {
                name: str(img)
                for name, img in sorted(model.boundary.restriction.images.items())}
    return doc


def parse_module(path: str | Path) -> RbkModule | TensorModule:
    """Module files: a [module] header plus normalized operator matrices.

    Matrix rows are 0/1 entries of the v-normalized operator; row i,
    column j is the coefficient of generator i in b_k * generator j.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from None
    header: dict[str, int] = {}
    degrees: list[int] = []
    operators: dict[int, list[list[int]]] = {}
    current: Optional[int] = None
    in_module = False
    for lineno, line in _lines(text):
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name == "module":
                in_module, current = True, None
            elif name.startswith("operator"):
                rest = name[len("operator"):].strip()
                current = int(rest) if rest else 0
                operators[current] = []
                in_module = False
            else:
                raise ParseError(f"unknown section [{name}]", lineno)
            continue
        if in_module:
            parts = line.split()
            key = parts[0].lower()
            if key == "degrees":
                degrees = [int(x) for x in parts[1:]]
            elif key in ("n", "k", "rank", "truncation"):
                header[key] = int(parts[1])
            else:
                raise ParseError(f"unknown module key {key!r}", lineno)
        elif current is not None:
            try:
                operators[current].append([int(x) for x in line.split()])
            except ValueError:
                raise ParseError("matrix rows must be 0/1 entries", lineno) from None
        else:
            raise ParseError("content before any section", lineno)
    if "n" not in header:
        raise ParseError("module file must declare n")
    rank = header.get("rank", len(degrees))
    if not degrees:
        degrees = [0] * rank
    if rank != len(degrees):
        raise ParseError("rank does not match the number of degrees")

    def to_columns(rows: list[list[int]]) -> tuple[int, ...]:
        if len(rows) != rank or any(len(r) != rank for r in rows):
            raise ParseError(f"operator matrix must be {rank}x{rank}")
        return tuple(sum((rows[i][j] & 1) << i for i in range(rank))
                     for j in range(rank))

    if "truncation" in header:
        K = header["truncation"]
        ops = []
        for k in range(K):
            rows = operators.get(k)
            ops.append(to_columns(rows) if rows is not None
                       else tuple(0 for _ in range(rank)))
        extra = set(operators) - set(range(K))
        if extra:
            raise ParseError(f"operator index beyond the truncation: {sorted(extra)}")
        return TensorModule(header["n"], K, tuple(degrees), tuple(ops))
    if len(operators) != 1:
        raise ParseError("a single-factor module needs exactly one [operator] block")
    cols = to_columns(next(iter(operators.values())))
    return RbkModule(header["n"], header.get("k", 0), tuple(degrees), cols)
