"""Command-line front end: ``orient-calc <job> --config <path> [--format text|structured]``.

Config files are line oriented::

    # comment
    key = value
    matrix chi:
      1 0
      0 1
    end
    list witnesses:
      1
      1; x
    end

Exit codes: 0 success, 1 domain error, 2 parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import OrientCalcError
from .fgab import FgAbGroup, GroupElement, IntMatrix, snf_decompose
from .index import EulerForm, OperatorDescriptor, euler_form, ind_p
from .omega import OmegaElement, OmegaGroup, swap_sign, xi_from_generators
from .orientability import GroupDescriptor, evaluate
from .skeleton import (
    barycentric_subdivision,
    disjoint,
    dual_cell_counts,
    dual_skeleton,
    embed_in_subdivision,
    library_complex,
    read_complex,
    relative_skeleton,
    retracts_onto,
)
from .topology import KClassData, build_model

JOBS = ("group", "euler-form", "omega", "orientability", "skeleton")

ALLOWED = {
    "group": ({"job"}, {"presentation"}),
    "euler-form": ({"job", "k0", "model", "operator", "complex_symbol"}, {"chi", "witnesses"}),
    "omega": ({"job", "k0", "xi", "x", "y"}, {"chi"}),
    "orientability": ({"job", "model", "operator", "group", "complex_symbol", "split"}, set()),
    "skeleton": ({"job", "complex", "library", "d"}, set()),
}


class ConfigError(Exception):
    """Malformed or unreadable config; line 0 means no position applies."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Entry:
    value: str
    line: int
    column: int


@dataclass(frozen=True)
class Block:
    kind: str  # "matrix" or "list"
    rows: tuple
    line: int


@dataclass
class JobConfig:
    kind: str
    values: dict[str, Entry] = field(default_factory=dict)
    blocks: dict[str, Block] = field(default_factory=dict)
    base: Path = Path(".")
    last_line: int = 0

    def get(self, key: str) -> Entry | None:
        return self.values.get(key)

    def require(self, key: str) -> Entry:
        if key not in self.values:
            raise ConfigError(self.last_line + 1, 1, f"{self.kind} job needs key {key!r}")
        return self.values[key]

    def require_block(self, name: str) -> Block:
        if name not in self.blocks:
            raise ConfigError(self.last_line + 1, 1, f"{self.kind} job needs block {name!r}")
        return self.blocks[name]


@dataclass(frozen=True)
class Report:
    kind: str
    document: dict


_BLOCK_RE = re.compile(r"^(matrix|list)\s+([A-Za-z_][\w-]*)\s*:$")
_KEY_RE = re.compile(r"^[A-Za-z_][\w-]*$")


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _parse_int_row(text: str, lineno: int, offset: int) -> tuple[int, ...]:
    row = []
    for m in re.finditer(r"\S+", text):
        try:
            row.append(int(m.group()))
        except ValueError:
            raise ConfigError(lineno, offset + m.start() + 1, f"expected an integer, got {m.group()!r}") from None
    return tuple(row)


def parse_config(text: str, kind: str, base: Path = Path(".")) -> JobConfig:
    if kind not in JOBS:
        raise ConfigError(0, 0, f"unknown job kind {kind!r}")
    cfg = JobConfig(kind, base=base)
    lines = text.splitlines()
    cfg.last_line = len(lines)
    keys, block_names = ALLOWED[kind]
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = _strip_comment(lines[i])
        i += 1
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        bm = _BLOCK_RE.match(stripped)
        if bm:
            btype, name = bm.groups()
            if name not in block_names:
                raise ConfigError(lineno, col, f"block {name!r} is not used by {kind} jobs")
            if name in cfg.blocks:
                raise ConfigError(lineno, col, f"duplicate block {name!r}")
            rows = []
            while True:
                if i >= len(lines):
                    raise ConfigError(lineno, col, f"block {name!r} has no closing 'end'")
                body = _strip_comment(lines[i])
                i += 1
                if body.strip() == "end":
                    break
                if not body.strip():
                    continue
                if btype == "matrix":
                    rows.append(_parse_int_row(body, i, 0))
                else:
                    rows.append((body.strip(), i))
            if btype == "matrix" and len({len(r) for r in rows}) > 1:
                raise ConfigError(lineno, col, f"matrix {name!r} has rows of different lengths")
            cfg.blocks[name] = Block(btype, tuple(rows), lineno)
            continue
        if "=" not in stripped:
            raise ConfigError(lineno, col, "expected 'key = value' or a block header")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(lineno, col, f"bad key {key!r}")
        if key not in keys:
            raise ConfigError(lineno, col, f"key {key!r} is not used by {kind} jobs")
        if key in cfg.values:
            raise ConfigError(lineno, col, f"duplicate key {key!r}")
        vcol = len(line) - len(value.lstrip()) + 1
        cfg.values[key] = Entry(value.strip(), lineno, vcol)
    job = cfg.get("job")
    if job is not None and job.value != kind:
        raise ConfigError(job.line, job.column, f"config is for a {job.value!r} job, not {kind!r}")
    return cfg


# ----------------------------------------------------------------------------
# value helpers


def _s(n: int) -> str:
    return str(int(n))


def _matrix_doc(rows) -> list[list[str]]:
    return [[_s(x) for x in row] for row in rows]


def _bool(e: Entry | None) -> bool | None:
    if e is None:
        return None
    v = e.value.lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ConfigError(e.line, e.column, f"expected true or false, got {e.value!r}")


def _int(e: Entry) -> int:
    try:
        return int(e.value)
    except ValueError:
        raise ConfigError(e.line, e.column, f"expected an integer, got {e.value!r}") from None


def _element_doc(x: GroupElement) -> dict:
    return {"free": [_s(a) for a in x.free], "two": [_s(b) for b in x.two], "odd": [_s(c) for c in x.odd]}


def _omega_doc(x: OmegaElement) -> dict:
    return {**_element_doc(x.coords), "sign": "+" if x.sign == 1 else "-"}


def _parse_omega_element(k0: FgAbGroup, e: Entry) -> OmegaElement:
    """Coordinates in group order (free, 2-primary, odd) followed by + or -."""
    tokens = e.value.split()
    if not tokens or tokens[-1] not in ("+", "-"):
        raise ConfigError(e.line, e.column, "element must end with a sign + or -")
    coords = _parse_int_row(" ".join(tokens[:-1]), e.line, e.column - 1)
    r, t = k0.free_rank, len(k0.two_primary)
    if len(coords) != r + t + len(k0.odd_orders):
        raise ConfigError(e.line, e.column, f"{k0.describe()} needs {r + t + len(k0.odd_orders)} coordinates")
    x = k0.element(coords[:r], coords[r : r + t], coords[r + t :])
    return OmegaElement(x, 1 if tokens[-1] == "+" else -1)


def _operator(cfg: JobConfig, model) -> OperatorDescriptor:
    return OperatorDescriptor(
        cfg.require("operator").value,
        model,
        complex_symbol=_bool(cfg.get("complex_symbol")),
        split=bool(_bool(cfg.get("split"))),
    )


# ----------------------------------------------------------------------------
# jobs


def _run_group(cfg: JobConfig) -> dict:
    block = cfg.require_block("presentation")
    if not block.rows:
        raise ConfigError(block.line, 1, "presentation matrix is empty")
    res = snf_decompose(IntMatrix.from_rows(block.rows))
    return {
        "group": res.group.describe(),
        "free_rank": _s(res.group.free_rank),
        "invariant_factors": [_s(d) for d in res.diagonal],
        "snf": _matrix_doc(res.snf.to_rows()),
        "U": _matrix_doc(res.U.to_rows()),
        "V": _matrix_doc(res.V.to_rows()),
    }


def _parse_witnesses(block: Block, model) -> list[KClassData]:
    out = []
    for text, lineno in block.rows:
        parts = [p.strip() for p in text.split(";")]
        try:
            rank = int(parts[0])
        except ValueError:
            raise ConfigError(lineno, 1, f"witness must start with an integer rank, got {parts[0]!r}") from None
        chern = [model.parse_class(p) for p in parts[1:]]
        out.append(KClassData.from_chern(model, rank, chern))
    return out


def _run_euler_form(cfg: JobConfig) -> dict:
    k0_entry = cfg.get("k0")
    k0 = FgAbGroup.parse(k0_entry.value) if k0_entry else None
    doc: dict[str, Any] = {}
    if "chi" in cfg.blocks:
        rows = cfg.blocks["chi"].rows
        form = EulerForm.from_rows(rows, k0)
        doc["source"] = "matrix"
    else:
        model = build_model(cfg.require("model").value)
        op = _operator(cfg, model)
        witnesses = _parse_witnesses(cfg.require_block("witnesses"), model)
        form = euler_form(op, witnesses, k0)
        doc.update(source="index", model=model.name, operator=op.kind.value)
    doc["k0"] = form.group.describe()
    doc["chi"] = _matrix_doc(form.matrix)
    doc["ind_p"] = [_s(ind_p(form, form.group.free_generator(i))) for i in range(form.rank)]
    return doc


def _run_omega(cfg: JobConfig) -> dict:
    k0 = FgAbGroup.parse(cfg.require("k0").value)
    chi_block = cfg.blocks.get("chi")
    rows = chi_block.rows if chi_block else tuple((0,) * k0.free_rank for _ in range(k0.free_rank))
    form = EulerForm.from_rows(rows, k0)
    xi_entry = cfg.get("xi")
    signs = [1] * len(k0.two_primary)
    if xi_entry is not None and xi_entry.value:
        toks = [t.strip() for t in xi_entry.value.split(",")]
        try:
            signs = [int(t) for t in toks]
        except ValueError:
            raise ConfigError(xi_entry.line, xi_entry.column, "xi must be a comma list of +1/-1") from None
    g = OmegaGroup(k0, form, xi_from_generators(k0, signs))
    doc: dict[str, Any] = {
        "k0": k0.describe(),
        "chi": _matrix_doc(form.matrix),
        "xi": {" ".join(_s(b) for b in k) or "()": "+" if v == 1 else "-" for k, v in sorted(g.xi_table.items())},
    }
    x = _parse_omega_element(k0, cfg.require("x"))
    doc["x"] = _omega_doc(x)
    doc["x_inverse"] = _omega_doc(g.inverse(x))
    doc["x_squared"] = _omega_doc(g.multiply(x, x))
    y_entry = cfg.get("y")
    if y_entry is not None:
        y = _parse_omega_element(k0, y_entry)
        doc["y"] = _omega_doc(y)
        doc["x_times_y"] = _omega_doc(g.multiply(x, y))
        doc["y_times_x"] = _omega_doc(g.multiply(y, x))
        doc["commutator_sign"] = _s(swap_sign(form, x.coords, y.coords, "torsor_phi"))
    return doc


def _run_orientability(cfg: JobConfig) -> dict:
    model = build_model(cfg.require("model").value)
    op = _operator(cfg, model)
    group = GroupDescriptor.parse(cfg.require("group").value)
    v = evaluate(model, op, group)
    return {
        "model": model.name,
        "operator": op.kind.value,
        "group": group.name,
        "status": v.status.value,
        "trail": [{"rule": rid, "statement": text} for rid, text in v.trail],
        "required_choices": list(v.required_choices),
    }


def _run_skeleton(cfg: JobConfig) -> dict:
    src, lib = cfg.get("complex"), cfg.get("library")
    if (src is None) == (lib is None):
        raise ConfigError(cfg.last_line + 1, 1, "skeleton job needs exactly one of 'complex' or 'library'")
    if src is not None:
        path = Path(src.value)
        if not path.is_absolute():
            path = cfg.base / path
        try:
            k = read_complex(path)
        except OSError as exc:
            raise ConfigError(src.line, src.column, f"cannot read complex: {exc.strerror}") from None
        name = src.value
    else:
        k = library_complex(lib.value)
        name = lib.value
    n = k.dimension
    sd = barycentric_subdivision(k)
    d_entry = cfg.get("d")
    ds = [_int(d_entry)] if d_entry is not None else list(range(1, n + 1))
    per_d = []
    for d in ds:
        c = dual_skeleton(k, d, subdivision=sd)
        y = embed_in_subdivision(relative_skeleton(k, n - d), sd)
        per_d.append(
            {
                "d": _s(d),
                "dual_cells": {_s(i): _s(c) for i, c in dual_cell_counts(c, n).items()},
                "dual_dimension": _s(c.dimension),
                "disjoint": "true" if disjoint(c, y) else "false",
                "retracts": "true" if retracts_onto(sd, y, c) else "false",
            }
        )
    return {
        "complex": name,
        "dimension": _s(n),
        "vertices": _s(len(k.vertices)),
        "top_cells": _s(len(k.top_cells())),
        "f_vector": [_s(f) for f in k.f_vector()],
        "euler_characteristic": _s(k.euler_characteristic()),
        "subdivision_top_cells": _s(len(sd.top_cells())),
        "skeletons": per_d,
    }


_RUNNERS = {
    "group": _run_group,
    "euler-form": _run_euler_form,
    "omega": _run_omega,
    "orientability": _run_orientability,
    "skeleton": _run_skeleton,
}


def run_config(path: str | Path, kind: str) -> Report:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(0, 0, f"cannot read config {str(path)!r}: {exc.strerror}") from None
    cfg = parse_config(text, kind, base=path.parent)
    return Report(kind, _RUNNERS[kind](cfg))


# ----------------------------------------------------------------------------
# output


def _text_matrix(name: str, rows) -> list[str]:
    width = max((len(x) for row in rows for x in row), default=1)
    return [f"{name}:"] + ["  " + " ".join(x.rjust(width) for x in row) for row in rows]


def _text_element(x: dict) -> str:
    coords = x["free"] + x["two"] + x["odd"]
    return f"({' '.join(coords)}{'; ' if coords else ''}{x['sign']})"


def _text_lines(kind: str, doc: dict) -> list[str]:
    if kind == "group":
        return [
            doc["group"],
            "invariant factors: " + (" ".join(doc["invariant_factors"]) or "none"),
            *_text_matrix("snf", doc["snf"]),
            *_text_matrix("U", doc["U"]),
            *_text_matrix("V", doc["V"]),
        ]
    if kind == "euler-form":
        head = [f"k0: {doc['k0']}"]
        if doc["source"] == "index":
            head += [f"model: {doc['model']}", f"operator: {doc['operator']}"]
        return head + _text_matrix("chi", doc["chi"]) + ["ind_p on generators: " + " ".join(doc["ind_p"])]
    if kind == "omega":
        out = [f"k0: {doc['k0']}", *_text_matrix("chi", doc["chi"])]
        out.append("xi: " + ", ".join(f"{k} -> {v}" for k, v in doc["xi"].items()))
        out.append(f"x: {_text_element(doc['x'])}")
        if "y" in doc:
            out.append(f"y: {_text_element(doc['y'])}")
            out.append(f"x * y: {_text_element(doc['x_times_y'])}")
            out.append(f"y * x: {_text_element(doc['y_times_x'])}")
            out.append(f"commutator sign: {doc['commutator_sign']}")
        out.append(f"x * x: {_text_element(doc['x_squared'])}")
        out.append(f"x^-1: {_text_element(doc['x_inverse'])}")
        return out
    if kind == "orientability":
        out = [f"status: {doc['status']}"]
        if doc["trail"]:
            out.append("trail:")
            out += [f"  {t['rule']}: {t['statement']}" for t in doc["trail"]]
        if doc["required_choices"]:
            out.append("choices:")
            out += [f"  {c}" for c in doc["required_choices"]]
        return out
    out = [
        f"complex: {doc['complex']}",
        f"dimension: {doc['dimension']}",
        f"vertices: {doc['vertices']}",
        f"top cells: {doc['top_cells']}",
        "f-vector: " + " ".join(doc["f_vector"]),
        f"euler characteristic: {doc['euler_characteristic']}",
        f"subdivision top cells: {doc['subdivision_top_cells']}",
    ]
    for s in doc["skeletons"]:
        cells = ", ".join(f"dim {i}: {c}" for i, c in s["dual_cells"].items())
        out.append(f"d = {s['d']}: dual cells [{cells}], disjoint: {s['disjoint']}, retracts: {s['retracts']}")
    return out


def emit_report(result: Report, mode: str = "text") -> str:
    if mode == "structured":
        return json.dumps({"job": result.kind, "result": result.document}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if mode != "text":
        raise ValueError(f"unknown output mode {mode!r}")
    return "\n".join(_text_lines(result.kind, result.document)) + "\n"


def parse_structured(text: str) -> Report:
    doc = json.loads(text)
    return Report(doc["job"], doc["result"])


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="orient-calc", description="Orientation calculus for determinant line bundles.")
    parser.add_argument("job", choices=JOBS)
    parser.add_argument("--config", required=True, help="path to the job config file")
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    args = parser.parse_args(argv)
    try:
        report = run_config(args.config, args.job)
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except OrientCalcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(emit_report(report, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
