"""Deterministic JSON text and crash-safe file writes."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path
from urllib.parse import quote


class Sci(float):
    """A float rendered in exponent notation instead of fixed decimals."""


def _fmt_float(x: float, places: int | None) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    if isinstance(x, Sci):
        return f"{x:.6e}"
    if places is None:
        return repr(float(x))
    s = f"{x:.{places}f}"
    return "0." + "0" * places if s == "-0." + "0" * places else s


def dumps(obj, places: int | None = None, indent: int = 2) -> str:
    """JSON text with every float written to ``places`` decimals (``None``: shortest repr)."""

    def enc(o, depth):
        pad = " " * (indent * (depth + 1))
        end = " " * (indent * depth)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt_float(o, places)
        if isinstance(o, int):
            return str(int(o))
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {enc(v, depth + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (str, int, float)) for v in o):
                return "[" + ", ".join(enc(v, depth + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, depth + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def checksum(obj) -> str:
    return hashlib.sha256(canonical(obj).encode("utf-8")).hexdigest()


def atomic_write(path, text: str) -> None:
    """Write via a temp file in the same directory and rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def safe_name(ego: str) -> str:
    """A filename-safe encoding of a user ID."""
    name = quote(ego, safe="")
    return "%2E" + name[1:] if name.startswith(".") else name
