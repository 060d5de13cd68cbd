"""CSV and JSON run artifacts.

A document is ``{"config": {...}, "data": {name: table}, "checks": {...}}``
where a table is ``{"columns": [...], "rows": [[...], ...]}`` of numbers.
Both formats are deterministic, so reading a file and emitting it again
reproduces it byte for byte.

CSV layout::

    # config: {...compact JSON...}
    # checks: {...compact JSON...}
    # table: <name>
    col_a,col_b
    1.0,2.5
    <blank line between tables>
"""

from __future__ import annotations

import json
import os
from pathlib import Path


def _compact(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _parse_cell(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def emit(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"# config: {_compact(doc.get('config', {}))}", f"# checks: {_compact(doc.get('checks', {}))}"]
    for k, (name, table) in enumerate(sorted(doc.get("data", {}).items())):
        if k:
            lines.append("")
        lines.append(f"# table: {name}")
        lines.append(",".join(table["columns"]))
        lines.extend(",".join(_cell(v) for v in row) for row in table["rows"])
    return "\n".join(lines) + "\n"


def parse(text: str, fmt: str) -> dict:
    if fmt == "json":
        return json.loads(text)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    doc = {"config": {}, "data": {}, "checks": {}}
    name = None
    header = None
    for line in text.splitlines():
        if line.startswith("# config: "):
            doc["config"] = json.loads(line[len("# config: ") :])
        elif line.startswith("# checks: "):
            doc["checks"] = json.loads(line[len("# checks: ") :])
        elif line.startswith("# table: "):
            name = line[len("# table: ") :]
            header = None
        elif not line:
            continue
        elif header is None:
            header = line.split(",")
            doc["data"][name] = {"columns": header, "rows": []}
        else:
            doc["data"][name]["rows"].append([_parse_cell(c) for c in line.split(",")])
    return doc


def format_for(path, fmt: str | None = None) -> str:
    if fmt:
        return fmt
    return "json" if str(path).endswith(".json") else "csv"


def write_output(path, doc: dict, fmt: str | None = None) -> Path:
    """Write atomically: the text lands in ``<path>.partial`` and is renamed."""
    path = Path(path)
    text = emit(doc, format_for(path, fmt))
    tmp = path.with_name(path.name + ".partial")
    tmp.write_text(text)
    os.replace(tmp, path)
    return path


def read_output(path, fmt: str | None = None) -> dict:
    path = Path(path)
    return parse(path.read_text(), format_for(path, fmt))


def table(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [[_py(v) for v in row] for row in rows]}


def _py(v):
    if isinstance(v, (bool, int, float, str)):
        return v
    if hasattr(v, "item"):
        return v.item()
    return float(v)
