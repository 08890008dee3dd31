"""Line-oriented model files.

Multi-classifier model::

    val: 0 1
    atoms: si or cl an
    states: all              # or a 'states:' header followed by one {a,b} per line
    functions:
    f1: {}=0; {si}=0; ...    # explicit rows, every state exactly once
    point: state={si,or,an} function=f1   # optional

The functions section may instead hold `constraint: <formula>` lines, in
which case the classifier set is every function satisfying all constraints
everywhere.  Decision-model files start with a lone `mdm` line::

    mdm
    val: 0 1
    atoms: p
    worlds:
    w0: {p} =1
    relI: w0 w1 | w2         # partition blocks separated by |
    relF: w0 | w1 w2
    point: w0                # optional

Serialization is canonical and bit-exact: states sorted by atom order,
functions by name then table, comments dropped.
"""

from __future__ import annotations

import re

from .models import MCM, ClassifierFn, PointedMCM, QuasiMDM, build_mcm
from .syntax import Signature

_SET_RE = re.compile(r"\{([^{}]*)\}\Z")
_POINT_RE = re.compile(r"state=(\{[^{}]*\})\s+function=(\S+)\Z")


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


def _parse_set(text: str, line: int) -> frozenset:
    m = _SET_RE.match(text.strip())
    if not m:
        raise ModelFormatError(f"expected a {{...}} set, found {text!r}", line)
    inner = m.group(1).strip()
    if not inner:
        return frozenset()
    return frozenset(part.strip() for part in inner.split(","))


def _header(lines: list[tuple[int, str]], idx: int, key: str) -> tuple[str, int]:
    if idx >= len(lines):
        raise ModelFormatError(f"missing '{key}:' line", lines[-1][0] if lines else 1)
    line_no, line = lines[idx]
    if not line.startswith(key + ":"):
        raise ModelFormatError(f"expected '{key}:', found {line!r}", line_no)
    return line[len(key) + 1 :].strip(), line_no


def loads_model(text: str):
    """Parse a model file; returns (MCM, PointedMCM|None) or (QuasiMDM, world|None)."""
    lines = _lines(text)
    if lines and lines[0][1] == "mdm":
        return _loads_mdm(lines[1:])
    return _loads_mcm(lines)


def load_model(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return loads_model(fh.read())


def _parse_sig(lines, idx):
    vals, _ = _header(lines, idx, "val")
    atoms, _ = _header(lines, idx + 1, "atoms")
    sig = Signature(tuple(atoms.split()), tuple(vals.split()))
    return sig, idx + 2


def _loads_mcm(lines: list[tuple[int, str]]):
    sig, idx = _parse_sig(lines, 0)
    rest, states_line = _header(lines, idx, "states")
    idx += 1
    states: str | list[frozenset]
    if rest == "all":
        states = "all"
    elif rest:
        raise ModelFormatError("states header takes 'all' or nothing", states_line)
    else:
        states = []
        while idx < len(lines) and lines[idx][1].startswith("{"):
            line_no, line = lines[idx]
            states.append(_parse_set(line, line_no))
            idx += 1
        if not states:
            raise ModelFormatError("no states listed", states_line)
    _, fn_line = _header(lines, idx, "functions")
    idx += 1
    constraints: list[str] = []
    rows: list[tuple[str, dict, int]] = []
    point_decl = None
    while idx < len(lines):
        line_no, line = lines[idx]
        idx += 1
        if line.startswith("point:"):
            m = _POINT_RE.match(line[6:].strip())
            if not m:
                raise ModelFormatError("malformed point line", line_no)
            point_decl = (_parse_set(m.group(1), line_no), m.group(2), line_no)
            continue
        if line.startswith("constraint:"):
            constraints.append(line[len("constraint:") :].strip())
            continue
        if ":" not in line:
            raise ModelFormatError(f"unexpected line {line!r}", line_no)
        name, body = line.split(":", 1)
        table: dict = {}
        for part in body.split(";"):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ModelFormatError(f"malformed table entry {part!r}", line_no)
            sset, value = part.rsplit("=", 1)
            s = _parse_set(sset.strip(), line_no)
            if s in table:
                raise ModelFormatError(f"state listed twice in {name.strip()!r}", line_no)
            table[s] = value.strip()
        rows.append((name.strip(), table, line_no))
    if constraints and rows:
        raise ModelFormatError("mix of explicit rows and constraint lines", fn_line)
    try:
        if constraints:
            model = build_mcm(sig, states, constraints=constraints)
        elif rows:
            fns = [ClassifierFn(name, table) for name, table, _ in rows]
            sts = (
                [frozenset(s) for s in states]
                if isinstance(states, list)
                else "all"
            )
            model = build_mcm(sig, sts, functions=fns)
        else:
            # empty classifier set: the inconsistent-knowledge marker
            from .models import all_states

            sts = all_states(sig) if states == "all" else states
            model = MCM(sig, sts, [], inconsistent=True)
    except ValueError as exc:
        raise ModelFormatError(str(exc), fn_line) from None
    point = None
    if point_decl is not None:
        s, fname, line_no = point_decl
        try:
            point = model.point(s, fname)
        except ValueError as exc:
            raise ModelFormatError(str(exc), line_no) from None
    return model, point


def _loads_mdm(lines: list[tuple[int, str]]):
    sig, idx = _parse_sig(lines, 0)
    _, worlds_line = _header(lines, idx, "worlds")
    idx += 1
    worlds: list[str] = []
    valuation: dict = {}
    while idx < len(lines):
        line_no, line = lines[idx]
        if line.startswith(("relI:", "relF:", "point:")):
            break
        idx += 1
        if ":" not in line:
            raise ModelFormatError(f"malformed world line {line!r}", line_no)
        name, body = line.split(":", 1)
        name = name.strip()
        m = re.match(r"(\{[^{}]*\})\s*=\s*(\S+)\Z", body.strip())
        if not m:
            raise ModelFormatError(f"world line needs '{{atoms}} =value'", line_no)
        worlds.append(name)
        valuation[name] = (_parse_set(m.group(1), line_no), m.group(2))
    if not worlds:
        raise ModelFormatError("no worlds listed", worlds_line)

    def parse_partition(idx: int, key: str):
        rest, line_no = _header(lines, idx, key)
        blocks = []
        for chunk in rest.split("|"):
            members = chunk.split()
            if members:
                blocks.append(members)
        return blocks, line_no

    blocks_i, _ = parse_partition(idx, "relI")
    idx += 1
    blocks_f, line_f = parse_partition(idx, "relF")
    idx += 1
    point = None
    if idx < len(lines):
        line_no, line = lines[idx]
        if not line.startswith("point:"):
            raise ModelFormatError(f"unexpected line {line!r}", line_no)
        point = line[6:].strip()
        if point not in valuation:
            raise ModelFormatError(f"point world {point!r} not declared", line_no)
        idx += 1
        if idx < len(lines):
            raise ModelFormatError(f"unexpected line {lines[idx][1]!r}", lines[idx][0])
    try:
        model = QuasiMDM(sig, worlds, valuation, blocks_i, blocks_f)
    except ValueError as exc:
        raise ModelFormatError(str(exc), line_f) from None
    return model, point


def _render_set(sig: Signature, s: frozenset) -> str:
    ordered = [a for a in sig.atoms if a in s]
    return "{" + ",".join(ordered) + "}"


def dumps_mcm(model: MCM, point: PointedMCM | None = None) -> str:
    sig = model.sig
    out = [f"val: {' '.join(sig.values)}", f"atoms: {' '.join(sig.atoms)}"]
    full = len(model.states) == 1 << len(sig.atoms)
    if full:
        out.append("states: all")
    else:
        out.append("states:")
        out.extend(_render_set(sig, s) for s in model.states)
    out.append("functions:")
    for f in model.functions:
        cells = "; ".join(f"{_render_set(sig, s)}={f(s)}" for s in model.states)
        out.append(f"{f.name}: {cells}")
    if point is not None:
        out.append(
            f"point: state={_render_set(sig, point.state)} function={point.function.name}"
        )
    return "\n".join(out) + "\n"


def dumps_mdm(model: QuasiMDM, point=None) -> str:
    sig = model.sig
    names = {w: f"w{i}" for i, w in enumerate(model.worlds)}
    out = [
        "mdm",
        f"val: {' '.join(sig.values)}",
        f"atoms: {' '.join(sig.atoms)}",
        "worlds:",
    ]
    for w in model.worlds:
        atoms, dec = model.valuation[w]
        out.append(f"{names[w]}: {_render_set(sig, atoms)} ={dec}")

    def render_partition(blocks) -> str:
        ordered = sorted(
            (sorted(names[w] for w in b) for b in blocks),
            key=lambda ms: ms[0],
        )
        return " | ".join(" ".join(ms) for ms in ordered)

    out.append(f"relI: {render_partition(model.rel_i)}")
    out.append(f"relF: {render_partition(model.rel_f)}")
    if point is not None:
        out.append(f"point: {names[point]}")
    return "\n".join(out) + "\n"
