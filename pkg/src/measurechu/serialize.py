"""JSON encodings and the multi-file workspace loader.

A workspace file is a JSON object with any of the keys ``spaces``,
``measures``, ``meta_measures``, ``maps``, ``paired_spaces``, ``raw_pairs``,
``paired_maps``, ``curves``, ``vector_fns``; each holds a list of named
objects.  Measures and maps refer to spaces by name (or embed them inline).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .chu import PairedMap, PairedSpace, RawPair
from .errors import MeasureChuError, ValidationError
from .expr import parse_expr
from .integration import Curve, VectorFn
from .linalg import Matrix
from .measures import COMPLEX, REAL, Measure, MetaMeasure
from .scalar import EXACT, FLOAT, Scalar, check_backend
from .spaces import FiniteSpace, MapTable, Point


def dumps(obj) -> str:
    """Canonical output: two-space indent, insertion-ordered keys, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def space_to_json(X: FiniteSpace) -> dict:
    points = []
    for p in X.points:
        if p.coords is None:
            points.append({"label": p.label})
        else:
            points.append({"label": p.label, "coords": [c.to_json() for c in p.coords]})
    return {"name": X.name, "points": points}


def paired_to_json(A: PairedSpace | RawPair) -> dict:
    complex_field = any(a.im for r in A.pairing.data for a in r)
    out = {
        "name": A.name,
        "dim": A.pairing.rows,
        "dual_dim": A.pairing.cols,
        "backend": A.pairing.backend,
        "pairing": A.pairing.to_json(complex_field),
    }
    if isinstance(A, PairedSpace) and A.labels is not None:
        out["labels"] = list(A.labels)
    return out


def matrix_to_json(M: Matrix) -> list:
    return M.to_json(any(a.im for r in M.data for a in r))


def map_to_json(f: PairedMap) -> dict:
    return {
        "from": f.source.name,
        "to": f.target.name,
        "matrix": matrix_to_json(f.matrix),
        "adjoint": matrix_to_json(f.adjoint),
    }


def vector_to_json(v) -> list:
    complex_field = any(c.im for c in v)
    return [c.to_json(complex_field) for c in v]


# loading -----------------------------------------------------------------------


class _Ctx:
    def __init__(self, where: str):
        self.where = where

    def err(self, msg: str) -> ValidationError:
        return ValidationError(f"{self.where}: {msg}")


def _get(obj: dict, key: str, ctx: _Ctx, kind=None):
    if not isinstance(obj, dict):
        raise ctx.err(f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ctx.err(f"missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise ctx.err(f"field {key!r} has the wrong type")
    return v


def space_from_json(obj: dict, ctx: _Ctx, backend: str = EXACT) -> FiniteSpace:
    name = _get(obj, "name", ctx, str)
    raw = _get(obj, "points", ctx, list)
    points = []
    for i, p in enumerate(raw):
        pctx = _Ctx(f"{ctx.where}.points[{i}]")
        if isinstance(p, str):
            points.append(Point(p))
            continue
        label = _get(p, "label", pctx, str)
        coords = p.get("coords")
        if coords is None:
            points.append(Point(label))
        else:
            if not isinstance(coords, list):
                raise pctx.err("coords must be a list")
            cb = backend if all(isinstance(c, str) or isinstance(c, int) for c in coords) else FLOAT
            try:
                points.append(Point(label, tuple(Scalar.from_json(c, cb) for c in coords)))
            except ValidationError as e:
                raise pctx.err(str(e)) from None
    return FiniteSpace(name, tuple(points))


def matrix_from_json(rows, ctx: _Ctx, backend: str, shape: tuple[int, int] | None = None) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ctx.err("matrix must be a list of rows")
    try:
        data = [[Scalar.from_json(a, backend) for a in r] for r in rows]
    except ValidationError as e:
        raise ctx.err(str(e)) from None
    return Matrix.from_rows(data, backend, shape)


@dataclass
class Workspace:
    spaces: dict[str, FiniteSpace] = field(default_factory=dict)
    measures: dict[str, Measure] = field(default_factory=dict)
    meta_measures: dict[str, MetaMeasure] = field(default_factory=dict)
    maps: dict[str, MapTable] = field(default_factory=dict)
    paired_spaces: dict[str, PairedSpace] = field(default_factory=dict)
    raw_pairs: dict[str, RawPair] = field(default_factory=dict)
    paired_maps: dict[str, PairedMap] = field(default_factory=dict)
    curves: dict[str, Curve] = field(default_factory=dict)
    vector_fns: dict[str, VectorFn] = field(default_factory=dict)
    origins: dict[tuple[str, str], str] = field(default_factory=dict)

    def _add(self, kind: str, name: str, value, where: str) -> None:
        table = getattr(self, kind)
        if name in table:
            raise ValidationError(
                f"duplicate {kind[:-1].replace('_', ' ')} {name!r}: defined at {self.origins[(kind, name)]} and {where}")
        table[name] = value
        self.origins[(kind, name)] = where

    def get(self, kind: str, name: str | None):
        table = getattr(self, kind)
        label = kind[:-1].replace("_", " ")
        if name is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise ValidationError(f"specify which {label} to use; workspace has {sorted(table) or 'none'}")
        if name not in table:
            raise ValidationError(f"unknown {label} {name!r}; workspace has {sorted(table) or 'none'}")
        return table[name]

    def pair(self, name: str | None) -> PairedSpace | RawPair:
        """Look up a paired space, falling back to raw pairs."""
        if name is not None and name in self.raw_pairs:
            return self.raw_pairs[name]
        if name is None and not self.paired_spaces and len(self.raw_pairs) == 1:
            return next(iter(self.raw_pairs.values()))
        return self.get("paired_spaces", name)


def load_workspace(paths, default_backend: str | None = None) -> Workspace:
    """Read and validate every file; references resolve across files in order."""
    docs = []
    for path in paths:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as e:
            raise ValidationError(f"{path}: cannot read ({e.strerror})") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}:{e.lineno}:{e.colno}: invalid JSON ({e.msg})") from None
        if not isinstance(doc, dict):
            raise ValidationError(f"{path}: top level must be an object")
        unknown = set(doc) - set(_SECTIONS)
        if unknown:
            raise ValidationError(f"{path}: unknown section(s) {sorted(unknown)}")
        docs.append((str(path), doc))
    ws = Workspace()
    for section in _SECTIONS:
        for path, doc in docs:
            items = doc.get(section, [])
            if not isinstance(items, list):
                raise ValidationError(f"{path}: {section} must be a list")
            for i, item in enumerate(items):
                where = f"{path}:{section}[{i}]"
                try:
                    _SECTIONS[section](ws, item, _Ctx(where), default_backend)
                except MeasureChuError as e:
                    if not str(e).startswith(path):
                        e.args = (f"{where}: {e}",)
                    raise
    return ws


def _backend(obj: dict, ctx: _Ctx, default: str | None) -> str:
    b = obj.get("backend", default or EXACT)
    try:
        return check_backend(b)
    except ValidationError as e:
        raise ctx.err(str(e)) from None


def _load_space(ws, obj, ctx, default):
    X = space_from_json(obj, ctx, _backend(obj, ctx, default))
    ws._add("spaces", X.name, X, ctx.where)


def _space_ref(ws, ref, ctx, backend) -> FiniteSpace:
    if isinstance(ref, str):
        if ref not in ws.spaces:
            raise ctx.err(f"unknown space {ref!r}")
        return ws.spaces[ref]
    if isinstance(ref, dict):
        X = space_from_json(ref, _Ctx(ctx.where + ".space"), backend)
        if X.name in ws.spaces and ws.spaces[X.name] != X:
            raise ctx.err(f"inline space {X.name!r} conflicts with the workspace definition")
        return X
    raise ctx.err("space must be a name or an inline space object")


def measure_from_json(ws: Workspace, obj: dict, ctx: _Ctx, default: str | None = None) -> Measure:
    backend = _backend(obj, ctx, default)
    space = _space_ref(ws, _get(obj, "space", ctx), ctx, backend)
    field_ = obj.get("field", REAL)
    if field_ not in (REAL, COMPLEX):
        raise ctx.err(f"field must be 'real' or 'complex', got {field_!r}")
    atoms = []
    for i, a in enumerate(_get(obj, "atoms", ctx, list)):
        actx = _Ctx(f"{ctx.where}.atoms[{i}]")
        label = _get(a, "label", actx, str)
        try:
            w = Scalar.from_json(_get(a, "weight", actx), backend)
        except ValidationError as e:
            raise actx.err(str(e)) from None
        atoms.append((label, w))
    return Measure.from_weights(space, atoms, backend, field_)


def _load_measure(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    ws._add("measures", name, measure_from_json(ws, obj, ctx, default), ctx.where)


def _meta_from_json(ws, obj, ctx, default) -> MetaMeasure:
    backend = _backend(obj, ctx, default)
    space = _space_ref(ws, _get(obj, "space", ctx), ctx, backend)
    atoms = []
    for i, a in enumerate(_get(obj, "atoms", ctx, list)):
        actx = _Ctx(f"{ctx.where}.atoms[{i}]")
        inner = _get(a, "measure", actx)
        if isinstance(inner, str):
            if inner in ws.measures:
                m = ws.measures[inner]
            elif inner in ws.meta_measures:
                m = ws.meta_measures[inner]
            else:
                raise actx.err(f"unknown measure {inner!r}")
        elif isinstance(inner, dict) and "depth" in inner:
            m = _meta_from_json(ws, inner, _Ctx(actx.where + ".measure"), backend)
        else:
            m = measure_from_json(ws, {"space": space.name, **inner} if "space" not in inner else inner,
                                  _Ctx(actx.where + ".measure"), backend)
        try:
            w = Scalar.from_json(_get(a, "weight", actx), backend)
        except ValidationError as e:
            raise actx.err(str(e)) from None
        atoms.append((m, w))
    return MetaMeasure.from_atoms(space, atoms, backend)


def _load_meta(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    ws._add("meta_measures", name, _meta_from_json(ws, obj, ctx, default), ctx.where)


def _load_map(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    src = _space_ref(ws, _get(obj, "source", ctx), ctx, EXACT)
    tgt = _space_ref(ws, _get(obj, "target", ctx), ctx, EXACT)
    assignment = _get(obj, "assignment", ctx, dict)
    ws._add("maps", name, MapTable(src, tgt, assignment), ctx.where)


def _pairing(obj, ctx, default):
    backend = _backend(obj, ctx, default)
    n = _get(obj, "dim", ctx, int)
    m = obj.get("dual_dim", n)
    G = matrix_from_json(_get(obj, "pairing", ctx), _Ctx(ctx.where + ".pairing"), backend, (n, m))
    if G.shape != (n, m):
        raise ctx.err(f"pairing is {G.shape[0]}x{G.shape[1]}, declared {n}x{m}")
    return G


def _load_paired(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    G = _pairing(obj, ctx, default)
    labels = obj.get("labels")
    ws._add("paired_spaces", name, PairedSpace(G, name, tuple(labels) if labels else None), ctx.where)


def _load_raw(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    ws._add("raw_pairs", name, RawPair(_pairing(obj, ctx, default), name), ctx.where)


def _load_paired_map(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    src = ws.get("paired_spaces", _get(obj, "from", ctx, str))
    tgt = ws.get("paired_spaces", _get(obj, "to", ctx, str))
    A = matrix_from_json(_get(obj, "matrix", ctx), _Ctx(ctx.where + ".matrix"), src.backend, (tgt.n, src.n))
    if "adjoint" in obj:
        B = matrix_from_json(obj["adjoint"], _Ctx(ctx.where + ".adjoint"), src.backend, (src.n, tgt.n))
        f = PairedMap(src, tgt, A, B)
    else:
        f = PairedMap.from_matrix(src, tgt, A)
    ws._add("paired_maps", name, f, ctx.where)


def curve_from_json(obj, ctx, default=None) -> Curve:
    backend = obj.get("backend", default or FLOAT)
    check_backend(backend)
    coeffs = _get(obj, "coeffs", ctx, list)
    dim = obj.get("dim", len(coeffs))
    if dim != len(coeffs):
        raise ctx.err(f"dim {dim} but {len(coeffs)} coefficient rows")
    try:
        rows = [[Scalar.from_json(c, backend) for c in row] for row in coeffs]
    except (ValidationError, TypeError) as e:
        raise ctx.err(str(e)) from None
    return Curve.from_coeffs(rows, backend)


def _load_curve(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    ws._add("curves", name, curve_from_json(obj, ctx, default if default else None), ctx.where)


def _load_vector_fn(ws, obj, ctx, default):
    name = _get(obj, "name", ctx, str)
    codomain = ws.get("paired_spaces", _get(obj, "codomain", ctx, str))
    space = _space_ref(ws, _get(obj, "space", ctx), ctx, codomain.backend)
    if "table" in obj:
        table = _get(obj, "table", ctx, dict)
        try:
            parsed = {x: tuple(Scalar.from_json(c, codomain.backend) for c in v) for x, v in table.items()}
        except (ValidationError, TypeError) as e:
            raise ctx.err(str(e)) from None
        fn = VectorFn(space, codomain, parsed)
    elif "exprs" in obj:
        dim = space.dim or 0
        exprs = [parse_expr(e, dim) for e in _get(obj, "exprs", ctx, list)]
        fn = VectorFn.from_exprs(space, codomain, exprs)
    else:
        raise ctx.err("vector function needs 'table' or 'exprs'")
    ws._add("vector_fns", name, fn, ctx.where)


_SECTIONS = {
    "spaces": _load_space,
    "measures": _load_measure,
    "meta_measures": _load_meta,
    "maps": _load_map,
    "paired_spaces": _load_paired,
    "raw_pairs": _load_raw,
    "paired_maps": _load_paired_map,
    "curves": _load_curve,
    "vector_fns": _load_vector_fn,
}
