"""Reading specs from the command line and writing deterministic output."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from helson.errors import ContractError
from helson.finiterank.forms import HelsonFormSpec
from helson.moments import ClosedFormMoments, MomentSequence, sequence_from_json


def load_json_arg(text: str) -> Any:
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    text = text.strip()
    if text.startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ContractError(f"invalid inline JSON: {exc}") from None
    path = Path(text)
    if not path.is_file():
        raise ContractError(f"spec file not found: {text}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ContractError(f"invalid JSON in {text}: {exc}") from None


def parse_spec(text: str) -> MomentSequence | HelsonFormSpec:
    """``closed:NAME``, inline JSON or a JSON file.

    Objects with a ``terms`` field and no ``type`` are form specs; everything
    else goes through the moment-sequence parser.
    """
    if text.startswith("closed:"):
        return ClosedFormMoments(text.split(":", 1)[1])
    obj = load_json_arg(text)
    if isinstance(obj, dict) and "terms" in obj and "type" not in obj:
        return HelsonFormSpec.from_json(obj)
    return sequence_from_json(obj)


def spec_to_json(spec) -> dict:
    return spec.to_json()


def fmt_float(x: float) -> str:
    """17 significant digits, enough to round-trip every double."""
    s = format(float(x), ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits; non-finite floats become null."""
    return _encode(obj, indent, 0) + "\n"


def write_output(text: str, out: str | None, stream=None) -> None:
    """Write to ``out`` atomically (temp file then rename) or to ``stream``."""
    if out is None:
        import sys

        (stream or sys.stdout).write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
