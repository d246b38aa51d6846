"""Reading and writing families.

Text format:
    n=<int>
    1 4 7
    2 3 5     # comments and blank lines are ignored

JSON format: {"n": int, "sets": [[int, ...], ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .bits import mask_of
from .family import SetFamily


class FamilyFormatError(ValueError):
    def __init__(self, line: int | None, msg: str, source: str = "<family>"):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {msg}")
        self.line = line


def parse_text(text: str, source: str = "<family>") -> SetFamily:
    n = None
    sets: list[list[int]] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            key, sep, val = line.partition("=")
            if not sep or key.strip() != "n":
                raise FamilyFormatError(lineno, f"expected 'n=<int>' header, got {line!r}", source)
            try:
                n = int(val.strip())
            except ValueError:
                raise FamilyFormatError(lineno, f"bad ground set size {val.strip()!r}", source) from None
            if n < 0:
                raise FamilyFormatError(lineno, "ground set size must be nonnegative", source)
            continue
        try:
            elems = [int(tok) for tok in line.split()]
        except ValueError:
            raise FamilyFormatError(lineno, f"non-integer element in {line!r}", source) from None
        _check_set(elems, n, lineno, source)
        m = mask_of(elems)
        if m in seen:
            raise FamilyFormatError(lineno, f"duplicate of the set on line {seen[m]}", source)
        seen[m] = lineno
        sets.append(elems)
    if n is None:
        raise FamilyFormatError(None, "missing 'n=<int>' header", source)
    return _build(n, sets, source)


def parse_json(text: str, source: str = "<family>") -> SetFamily:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FamilyFormatError(e.lineno, f"invalid JSON: {e.msg}", source) from None
    if not isinstance(data, dict) or not isinstance(data.get("n"), int) or not isinstance(data.get("sets"), list):
        raise FamilyFormatError(None, 'expected {"n": int, "sets": [[...], ...]}', source)
    n = data["n"]
    sets = []
    for idx, s in enumerate(data["sets"]):
        if not isinstance(s, list) or not all(isinstance(e, int) for e in s):
            raise FamilyFormatError(None, f"set #{idx} is not a list of integers", source)
        _check_set(s, n, None, source, idx)
        sets.append(s)
    return _build(n, sets, source)


def _check_set(elems: list[int], n: int, lineno: int | None, source: str, idx: int | None = None) -> None:
    label = f"set #{idx}: " if idx is not None else ""
    for a, b in zip(elems, elems[1:]):
        if b <= a:
            raise FamilyFormatError(lineno, f"{label}elements must be strictly increasing", source)
    for e in elems:
        if not 1 <= e <= n:
            raise FamilyFormatError(lineno, f"{label}element {e} outside [1,{n}]", source)


def _build(n: int, sets: list[list[int]], source: str) -> SetFamily:
    masks = [mask_of(s) for s in sets]
    if len(set(masks)) != len(masks):
        raise FamilyFormatError(None, "duplicate sets", source)
    return SetFamily(n, tuple(masks))


def load_family(path: str | Path) -> SetFamily:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise FamilyFormatError(None, f"cannot read: {e.strerror}", str(p)) from None
    if p.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_json(text, str(p))
    return parse_text(text, str(p))


def format_text(F: SetFamily) -> str:
    lines = [f"n={F.n}"] + [" ".join(map(str, s)) for s in F.sets()]
    return "\n".join(lines) + "\n"


def family_json(F: SetFamily) -> dict:
    return {"n": F.n, "sets": F.sets()}
