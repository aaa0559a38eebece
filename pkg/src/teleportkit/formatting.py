"""Byte-stable number formatting for CSV/JSON reports."""
from __future__ import annotations

import json
import re

import numpy as np

SIG_DIGITS = 12
_FLOAT_TAG = "\x00f:"
_FLOAT_RE = re.compile(r'"\\u0000f:([^"]*)"')


def _clean(v: float) -> float:
    v = float(v)
    # -0 and sub-resolution noise print as plain zero
    return 0.0 if abs(v) < 1e-15 else v


def fmt_csv_float(v: float) -> str:
    return f"{_clean(v):.{SIG_DIGITS}g}"


def fmt_json_float(v: float) -> str:
    return f"{_clean(v):.{SIG_DIGITS - 1}e}"


def sign_symbol(v: float, threshold: float = 1e-9) -> str:
    """``+1``/``-1``/``0`` for values known to be 0 or +-1."""
    if abs(v) < threshold:
        return "0"
    return "+1" if v > 0 else "-1"


def _tag_floats(obj):
    if isinstance(obj, dict):
        return {k: _tag_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tag_floats(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return _FLOAT_TAG + fmt_json_float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_json(obj) -> str:
    """JSON with every float written in fixed 12-significant-digit scientific form."""
    text = json.dumps(_tag_floats(obj), indent=2, ensure_ascii=False)
    return _FLOAT_RE.sub(r"\1", text) + "\n"
