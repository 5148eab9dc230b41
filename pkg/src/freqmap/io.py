"""File formats: PrefLib strict orders, matrix CSV, map layouts and tree files."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import Election, GSTree
from .errors import DimensionError, DomainError, ParseError, StructureError, UnsupportedFormatError

MATRIX_TOL = 1e-9
_HEADER = re.compile(r"^#\s*([^:]+?)\s*:\s*(.*)$")
_NAME = re.compile(r"^ALTERNATIVE NAME (\d+)$", re.IGNORECASE)
_DATA_LINE = re.compile(r"^\s*(\d+)\s*:\s*(.*)$")


@dataclass(frozen=True)
class PrefLibProfile:
    election: Election
    names: tuple[str, ...]
    metadata: dict = field(default_factory=dict)


def _parse_order(text: str, m: int | None, line: int, path: str) -> list[int]:
    if "{" in text or "}" in text:
        raise UnsupportedFormatError("tied candidates ({...}) are not supported; only strict orders", line, path)
    parts = [p.strip() for p in text.split(",")]
    try:
        ids = [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"bad candidate list {text.strip()!r}", line, path) from None
    if len(set(ids)) != len(ids):
        dup = next(c for c in ids if ids.count(c) > 1)
        raise ParseError(f"candidate {dup} appears twice", line, path)
    if m is not None:
        out_of_range = [c for c in ids if not 1 <= c <= m]
        if out_of_range:
            raise ParseError(f"candidate {out_of_range[0]} is outside 1..{m}", line, path)
        if len(ids) != m:
            missing = sorted(set(range(1, m + 1)) - set(ids))
            raise ParseError(f"incomplete ranking; missing candidates {missing}", line, path)
    return [c - 1 for c in ids]


def _read_2022(lines: list[str], path: str) -> PrefLibProfile:
    meta: dict[str, str] = {}
    names: dict[int, str] = {}
    pairs = []
    m = None
    for no, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            hit = _HEADER.match(text)
            if not hit:
                continue
            key, value = hit.group(1).strip(), hit.group(2).strip()
            nm = _NAME.match(key)
            if nm:
                names[int(nm.group(1))] = value
            else:
                meta[key.upper()] = value
            if key.upper() == "DATA TYPE" and value.lower() != "soc":
                raise UnsupportedFormatError(f"data type {value!r} is not supported; only soc", no, path)
            if key.upper() == "NUMBER ALTERNATIVES":
                try:
                    m = int(value)
                except ValueError:
                    raise ParseError(f"bad NUMBER ALTERNATIVES {value!r}", no, path) from None
            continue
        hit = _DATA_LINE.match(text)
        if not hit:
            raise ParseError(f"expected 'count: c1,c2,...', got {text!r}", no, path)
        count = int(hit.group(1))
        if m is None:
            m = max(names) if names else None
        order = _parse_order(hit.group(2), m, no, path)
        if m is None:
            m = len(order)
            if sorted(order) != list(range(m)):
                raise ParseError("first ranking is not a permutation of 1..m", no, path)
        if count < 1:
            raise ParseError("multiplicity must be positive", no, path)
        pairs.append((order, count))
    return _finish(pairs, m, names, meta, path)


def _read_legacy(lines: list[str], path: str) -> PrefLibProfile:
    """Older layout: m, then m lines 'id,name', then 'voters,total,unique', then 'count,c1,...'."""
    rows = [(no, ln.strip()) for no, ln in enumerate(lines, 1) if ln.strip()]
    try:
        m = int(rows[0][1])
    except (IndexError, ValueError):
        raise ParseError("legacy file must start with the number of candidates", 1, path) from None
    names: dict[int, str] = {}
    for no, text in rows[1 : m + 1]:
        idx, _, name = text.partition(",")
        try:
            names[int(idx)] = name.strip()
        except ValueError:
            raise ParseError(f"bad candidate line {text!r}", no, path) from None
    if len(rows) < m + 2:
        raise ParseError("missing voter summary line", rows[-1][0], path)
    pairs = []
    for no, text in rows[m + 2 :]:
        count, _, rest = text.partition(",")
        try:
            count = int(count)
        except ValueError:
            raise ParseError(f"bad multiplicity in {text!r}", no, path) from None
        if count < 1:
            raise ParseError("multiplicity must be positive", no, path)
        pairs.append((_parse_order(rest, m, no, path), count))
    return _finish(pairs, m, names, {"FORMAT": "legacy"}, path)


def _finish(pairs, m, names, meta, path) -> PrefLibProfile:
    if not pairs:
        raise ParseError("no votes found", None, path)
    label = tuple(names.get(i, str(i)) for i in range(1, m + 1))
    return PrefLibProfile(Election.from_pairs(pairs, m=m, names=label), label, meta)


def read_soc_profile(path) -> PrefLibProfile:
    path = str(path)
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, path) from None
    first = next((ln.strip() for ln in lines if ln.strip()), "")
    if first.startswith("#") or _DATA_LINE.match(first):
        return _read_2022(lines, path)
    return _read_legacy(lines, path)


def read_soc(path) -> Election:
    """Election from a PrefLib ``.soc`` file (2022 header format or the legacy CSV layout)."""
    return read_soc_profile(path).election


def write_soc(e: Election, path, title: str | None = None) -> None:
    """2022-format ``.soc``; rows by decreasing multiplicity, then lexicographically."""
    names = e.names or tuple(str(i + 1) for i in range(e.m))
    rows = sorted(e.votes, key=lambda v: (-v[1], v[0]))
    lines = []
    if title:
        lines.append(f"# TITLE: {title}")
    lines += [
        "# DATA TYPE: soc",
        f"# NUMBER ALTERNATIVES: {e.m}",
        *(f"# ALTERNATIVE NAME {i + 1}: {nm}" for i, nm in enumerate(names)),
        f"# NUMBER VOTERS: {e.n}",
        f"# NUMBER UNIQUE ORDERS: {len(rows)}",
    ]
    lines += [f"{k}: {','.join(str(c + 1) for c in order)}" for order, k in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# matrices


def format_entry(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return "%.17g" % float(x)


def write_matrix_csv(a, path) -> None:
    """One row per position, no header; floats at 17 significant digits, Fractions as p/q."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    text = "\n".join(",".join(format_entry(x) for x in row) for row in a) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _parse_entry(s: str, line: int, path: str):
    s = s.strip()
    try:
        return Fraction(s) if "/" in s else float(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {s!r}", line, path) from None


def read_matrix_csv(path) -> np.ndarray:
    """Frequency matrix from CSV; columns within 1e-6 of summing to one are renormalized."""
    path = str(path)
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, path) from None
    rows = []
    for no, ln in enumerate(lines, 1):
        if ln.strip():
            rows.append([float(_parse_entry(s, no, path)) for s in ln.split(",")])
    if not rows:
        raise ParseError("empty matrix file", None, path)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError(f"{path}: rows have different lengths {sorted(widths)}")
    a = np.array(rows)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{path}: matrix must be square, got {a.shape[0]}x{a.shape[1]}")
    if np.any(a < -MATRIX_TOL):
        raise DomainError(f"{path}: negative entries")
    sums = a.sum(axis=0)
    if np.any(np.abs(sums - 1) > MATRIX_TOL) or np.any(np.abs(a.sum(axis=1) - 1) > MATRIX_TOL):
        raise DomainError(f"{path}: not bistochastic within {MATRIX_TOL}")
    a = np.clip(a, 0.0, None)
    fix = np.abs(a.sum(axis=0) - 1) > 1e-12
    a[:, fix] /= a[:, fix].sum(axis=0)
    return a


# ---------------------------------------------------------------------------
# layouts


def write_layout_csv(layout, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "x", "y"])
        for label, (x, y) in zip(layout.labels, layout.coords):
            w.writerow([label, "%.17g" % x, "%.17g" % y])


def read_layout_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["label", "x", "y"]:
        raise ParseError("layout CSV must start with the header label,x,y", 1, str(path))
    labels = tuple(r[0] for r in rows[1:])
    return labels, np.array([[float(r[1]), float(r[2])] for r in rows[1:]]).reshape(-1, 2)


def write_ratios_csv(table, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "ratio"])
        for x, y, r in table:
            w.writerow([x, y, "%.17g" % r])


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def write_layout_svg(layout, path, size: int = 1000, margin: int = 60) -> None:
    """Scatter of the layout in a fixed 1000 x 1000 viewBox, labelled points."""
    xy = np.asarray(layout.coords, dtype=float)
    lo = xy.min(axis=0)
    span = float((xy.max(axis=0) - lo).max()) or 1.0
    scale = (size - 2 * margin) / span
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for label, (x, y) in zip(layout.labels, xy):
        px = margin + (x - lo[0]) * scale
        py = size - margin - (y - lo[1]) * scale
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="black"/>')
        parts.append(f'<text x="{px + 4:.2f}" y="{py - 4:.2f}" font-size="8">{_escape(label)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# trees


def read_tree(path) -> GSTree:
    """Tree file: JSON nested lists of 1-based candidate ids, e.g. ``[[1, 2], [3, 4]]``."""
    path = str(path)
    try:
        nested = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None

    def shift(node):
        if isinstance(node, list):
            return [shift(c) for c in node]
        if isinstance(node, bool) or not isinstance(node, int):
            raise StructureError(f"{path}: tree leaves must be integers, got {node!r}")
        return node - 1

    return GSTree.from_nested(shift(nested)).validate()


def write_tree(tree: GSTree, path) -> None:
    def shift(node):
        return [shift(c) for c in node] if isinstance(node, list) else node + 1

    Path(path).write_text(json.dumps(shift(tree.to_nested())) + "\n", encoding="utf-8")
