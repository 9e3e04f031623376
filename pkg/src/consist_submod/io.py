"""JSON (de)serialization of set-function instances.

Schema::

    {"kind": "table",    "n": 3, "values": {"000": 0, "001": 1, ...}}
    {"kind": "coverage", "n": 3, "universe_size": 4, "sets": [[0, 1], [1, 2], [3]]}
    {"kind": "lifted",   "n": 5, "k": 2, "base": {<table instance>}}

Value keys are the subset's bitmask written in binary and zero-padded to
``n`` digits (element 0 is the rightmost digit).  Values are numbers or
``"p/q"`` strings; any string value makes the loaded table exact.  An
optional ``"stream"`` list gives an arrival order.
"""
import json
from fractions import Fraction

from .exceptions import DomainError
from .functions import MAX_TABLE_N, CoverageFunction, LiftedFunction, TableFunction


def _key(mask, n):
    return format(mask, f"0{n}b")


def _encode(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    v = float(v)
    return int(v) if v.is_integer() else v


def instance_to_dict(f, stream=None, meta=None):
    """Schema dict for a table, coverage or lifted function."""
    if isinstance(f, CoverageFunction):
        out = {"kind": "coverage", "n": f.n, "universe_size": f.universe_size, "sets": f.sets}
    elif isinstance(f, LiftedFunction):
        out = {"kind": "lifted", "n": f.n, "k": f.k, "base": instance_to_dict(f.base)}
    else:
        if f.n > MAX_TABLE_N:
            raise DomainError(f"cannot tabulate {f.n} elements")
        out = {"kind": "table", "n": f.n, "exact": bool(f.exact),
               "values": {_key(m, f.n): _encode(f.value(m)) for m in range(1 << f.n)}}
    if stream is not None:
        out["stream"] = [int(x) for x in stream]
    if meta:
        out["meta"] = meta
    return out


def _decode_table(data):
    n = data.get("n")
    values = data.get("values")
    if not isinstance(n, int) or n < 1:
        raise DomainError("table instance needs an integer n >= 1")
    if not isinstance(values, dict):
        raise DomainError("table instance needs a 'values' object")
    exact = bool(data.get("exact")) or any(isinstance(v, str) for v in values.values())
    table = [None] * (1 << n)
    for key, v in values.items():
        if len(key) != n or set(key) - {"0", "1"}:
            raise DomainError(f"bad subset key {key!r} for n={n}")
        try:
            val = Fraction(v) if exact else float(v)
        except (TypeError, ValueError, ZeroDivisionError):
            raise DomainError(f"bad value {v!r} at {key!r}") from None
        if val < 0:
            raise DomainError(f"negative value at {key!r}")
        table[int(key, 2)] = val
    missing = sum(v is None for v in table)
    if missing:
        raise DomainError(f"table is incomplete: {missing} of {1 << n} subsets missing")
    return TableFunction(table, exact=exact)


def instance_from_dict(data):
    """Build the set function described by ``data``; returns ``(f, stream)``."""
    kind = data.get("kind")
    if kind == "table":
        f = _decode_table(data)
    elif kind == "coverage":
        f = CoverageFunction(data["universe_size"], data["sets"])
    elif kind == "lifted":
        base, _ = instance_from_dict(data["base"])
        f = LiftedFunction(base, data["k"])
    else:
        raise DomainError(f"unknown instance kind {kind!r}")
    if "n" in data and data["n"] != f.n:
        raise DomainError(f"declared n={data['n']} but the instance has {f.n} elements")
    stream = data.get("stream")
    if stream is not None:
        stream = [int(x) for x in stream]
        if sorted(set(stream)) != sorted(stream) or any(not 0 <= x < f.n for x in stream):
            raise DomainError("stream must list distinct elements of the ground set")
    return f, stream


def dump_instance(f, stream=None, meta=None):
    return json.dumps(instance_to_dict(f, stream, meta), indent=1, sort_keys=True)


def load_instance(text):
    return instance_from_dict(json.loads(text))


def read_instance(path):
    with open(path) as fh:
        return load_instance(fh.read())


def write_instance(path, f, stream=None, meta=None):
    with open(path, "w") as fh:
        fh.write(dump_instance(f, stream, meta))
        fh.write("\n")
