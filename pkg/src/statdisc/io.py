"""JSON conventions: complex scalars are ``[re, im]`` pairs; NaN and Inf are rejected.

Quadric files look like ``{"n": 2, "d": 1, "matrices": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InputError
from .quadric import Quadric, validate_quadric


def _reject_constant(name):
    raise InputError(f"non-finite JSON constant {name!r} is not allowed")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return loads(text)


def _is_pair(x) -> bool:
    return (isinstance(x, (list, tuple)) and len(x) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x))


def complex_from_json(obj, allow_real: bool = False) -> np.ndarray:
    """Nested lists whose leaves are ``[re, im]`` pairs -> complex ndarray.

    With ``allow_real`` a bare number is accepted as a real scalar.
    """
    def conv(x):
        if _is_pair(x):
            re, im = float(x[0]), float(x[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise InputError("complex entries must be finite")
            return complex(re, im)
        if allow_real and isinstance(x, (int, float)) and not isinstance(x, bool):
            if not math.isfinite(x):
                raise InputError("entries must be finite")
            return complex(float(x), 0.0)
        if isinstance(x, list):
            return [conv(v) for v in x]
        raise InputError(f"expected a [re, im] pair, got {x!r}")

    try:
        return np.array(conv(obj), dtype=complex)
    except ValueError as exc:  # ragged nesting
        raise InputError(f"ragged complex array: {exc}") from None


def complex_to_json(arr):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        z = complex(arr)
        return [float(z.real), float(z.imag)]
    return [complex_to_json(x) for x in arr]


def quadric_from_json(obj) -> Quadric:
    if not isinstance(obj, dict) or not {"n", "d", "matrices"} <= obj.keys():
        raise InputError("quadric JSON needs keys 'n', 'd' and 'matrices'")
    n, d = obj["n"], obj["d"]
    if not (isinstance(n, int) and isinstance(d, int) and n > 0 and d > 0):
        raise InputError("'n' and 'd' must be positive integers")
    mats = complex_from_json(obj["matrices"])
    if mats.shape != (d, n, n):
        raise DimensionMismatch(f"matrices have shape {mats.shape}, expected {(d, n, n)}")
    return validate_quadric(list(mats))


def quadric_to_json(q: Quadric) -> dict:
    return {"n": q.n, "d": q.d, "matrices": complex_to_json(q.A)}


def load_quadric(path) -> Quadric:
    return quadric_from_json(load(path))


def to_jsonable(x):
    """Recursively convert numpy values; complex arrays become ``[re, im]`` nests."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return complex_to_json(x)
        return to_jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    return x


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_vector(text: str, length: int, real: bool = False) -> np.ndarray:
    """Parse a CLI vector.

    ``"re,im;re,im"`` gives complex components; ``"v1,...,vL"`` with exactly
    ``length`` values gives a real vector; a single value is broadcast; with
    ``2*length`` values (no ``;``) consecutive pairs are (re, im).
    """
    text = text.strip()
    try:
        if ";" in text:
            parts = [p for p in text.split(";")]
            vals = []
            for p in parts:
                nums = [float(t) for t in p.split(",")]
                if len(nums) == 1:
                    vals.append(complex(nums[0], 0.0))
                elif len(nums) == 2:
                    vals.append(complex(nums[0], nums[1]))
                else:
                    raise InputError(f"component {p!r} must be 're' or 're,im'")
            out = np.array(vals, dtype=complex)
        else:
            nums = [float(t) for t in text.split(",")]
            if len(nums) == length:
                out = np.array(nums, dtype=complex)
            elif len(nums) == 1:
                out = np.full(length, nums[0], dtype=complex)
            elif len(nums) == 2 * length:
                out = np.array(nums[0::2], dtype=complex) + 1j * np.array(nums[1::2])
            else:
                raise InputError(f"cannot read {text!r} as a vector of length {length}")
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad number in {text!r}") from None
    if out.shape != (length,):
        raise DimensionMismatch(f"{text!r} has {out.size} components, expected {length}")
    if not np.all(np.isfinite(out)):
        raise InputError("vector entries must be finite")
    if real:
        if np.any(out.imag != 0):
            raise InputError(f"{text!r} must be real")
        return out.real.copy()
    return out


def vector_from_config(value, length: int, real: bool = False) -> np.ndarray:
    """Config-file vectors: a CLI-style string, a list of numbers, or a list of [re, im] pairs."""
    if isinstance(value, str):
        return parse_vector(value, length, real)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value] * length
    if not isinstance(value, list):
        raise InputError(f"cannot read {value!r} as a vector")
    # a flat list of numbers is a real vector; complex components must be [re, im] pairs
    arr = np.array([complex_from_json(v, allow_real=True) for v in value], dtype=complex)
    if arr.shape != (length,):
        raise DimensionMismatch(f"vector has shape {arr.shape}, expected ({length},)")
    if real:
        if np.any(arr.imag != 0):
            raise InputError("expected a real vector")
        return arr.real.copy()
    return arr
