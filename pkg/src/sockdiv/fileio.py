"""Canonical JSON files for instances, plus encoders for results.

Canonical form: one compact line, fixed top-level field order, maps keyed by
sorted labels, sets as sorted arrays.  Product elements such as ``(x, 1)``
are two-element arrays, never strings, so they cannot collide with labels.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from .core import (
    Bijection,
    ShoeInstance,
    SockBundle,
    SockInstance,
    element_key,
    sorted_elements,
    validate_shoe_instance,
    validate_sock_instance,
)
from .errors import ParseError, ValidationError
from .reductions import PairFamily

KINDS = ("shoe", "sock", "pair-family", "bundle")

Payload = Union[ShoeInstance, SockInstance, PairFamily, SockBundle]


@dataclass(frozen=True)
class InstanceFile:
    kind: str
    payload: Payload


# -- elements ---------------------------------------------------------------


def encode_element(e):
    if isinstance(e, tuple):
        return [encode_element(x) for x in e]
    return e


def decode_element(v, field=None):
    if isinstance(v, bool) or v is None or isinstance(v, (float, dict)):
        raise ParseError(f"{v!r} is not a valid label", field=field)
    if isinstance(v, list):
        if not v:
            raise ParseError("empty array is not a valid label", field=field)
        return tuple(decode_element(x, field) for x in v)
    return v


def _sorted_encoded(items):
    return [encode_element(x) for x in sorted_elements(items)]


def encode_bijection(f: Bijection) -> list:
    return [[encode_element(x), encode_element(y)] for x, y in f.items()]


def decode_bijection(pairs, field=None, **kw) -> Bijection:
    try:
        return Bijection.from_pairs(
            ((decode_element(x, field), decode_element(y, field)) for x, y in pairs), **kw
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed pair list: {exc}", field=field)


def _encode_fibers(fibers) -> Union[dict, list]:
    keys = sorted_elements(fibers)
    if all(isinstance(k, str) for k in keys):
        return {k: _sorted_encoded(fibers[k]) for k in keys}
    return [[encode_element(k), _sorted_encoded(fibers[k])] for k in keys]


def _decode_fibers(raw, field) -> dict:
    if isinstance(raw, dict):
        items = raw.items()
    elif isinstance(raw, list):
        try:
            items = [(k, v) for k, v in raw]
        except (TypeError, ValueError):
            raise ParseError("fiber list entries must be [base, [elements]]", field=field)
    else:
        raise ParseError("fibers must be an object or a list of [base, [elements]]", field=field)
    fibers = {}
    for k, v in items:
        key = decode_element(k, field)
        if key in fibers:
            raise ParseError(f"duplicate base label {k!r}", field=field)
        if not isinstance(v, list):
            raise ParseError(f"fiber over {k!r} must be an array", field=field)
        fibers[key] = [decode_element(x, field) for x in v]
    return fibers


# -- emit -------------------------------------------------------------------


def instance_to_json(obj: Payload) -> dict:
    if isinstance(obj, ShoeInstance):
        return {
            "kind": "shoe",
            "n": obj.n,
            "A": _sorted_encoded(obj.A),
            "B": _sorted_encoded(obj.B),
            "h": encode_bijection(obj.h),
        }
    if isinstance(obj, SockInstance):
        return {
            "kind": "sock",
            "n": obj.n,
            "left": _encode_fibers(obj.left.fibers),
            "right": _encode_fibers(obj.right.fibers),
            "u": encode_bijection(obj.u),
        }
    if isinstance(obj, PairFamily):
        return {
            "kind": "pair-family",
            "n": obj.n,
            "order": [encode_element(i) for i in obj.order],
            "pairs": _encode_fibers(obj.pairs),
        }
    if isinstance(obj, SockBundle):
        return {"kind": "bundle", "n": obj.arity, "fibers": _encode_fibers(obj.fibers)}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False)


def emit_instance(obj: Payload) -> str:
    """Canonical text of an instance (one line, trailing newline)."""
    return dumps(instance_to_json(obj)) + "\n"


# -- parse ------------------------------------------------------------------


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _line_of(text: str, field) -> int | None:
    if field is None:
        return None
    key = str(field).split("[", 1)[0]
    # match the key, not a label that happens to share its name
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return None if m is None else text.count("\n", 0, m.start()) + 1


def _require(data: dict, *names):
    for name in names:
        if name not in data:
            raise ParseError(f"missing field {name!r}", field=name)
    return [data[name] for name in names]


def _label_list(raw, field) -> list:
    if not isinstance(raw, list):
        raise ParseError("expected an array of labels", field=field)
    items = [decode_element(x, field) for x in raw]
    seen = set()
    for x in items:
        if x in seen:
            raise ParseError(f"duplicate label {x!r} in {field!r}", field=field)
        seen.add(x)
    return items


def _positive_int(raw, field="n") -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 1:
        raise ParseError(f"{field!r} must be a positive integer", field=field)
    return raw


def instance_from_json(data) -> InstanceFile:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    (kind,) = _require(data, "kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", field="kind")
    n = _positive_int(_require(data, "n")[0])
    if kind == "shoe":
        A_raw, B_raw, h_raw = _require(data, "A", "B", "h")
        A, B = _label_list(A_raw, "A"), _label_list(B_raw, "B")
        if not isinstance(h_raw, list):
            raise ParseError("'h' must be an array of pairs", field="h")
        pairs = []
        for k, entry in enumerate(h_raw):
            try:
                (a, i), (b, j) = entry
            except (TypeError, ValueError):
                raise ParseError("h entries look like [[a, i], [b, j]]", field=f"h[{k}]")
            pairs.append(((decode_element(a, "h"), i), (decode_element(b, "h"), j)))
        return InstanceFile(kind, validate_shoe_instance(A, B, n, pairs))
    if kind == "sock":
        left_raw, right_raw, u_raw = _require(data, "left", "right", "u")
        left, right = _decode_fibers(left_raw, "left"), _decode_fibers(right_raw, "right")
        if not isinstance(u_raw, list):
            raise ParseError("'u' must be an array of pairs", field="u")
        try:
            u = [(decode_element(x, "u"), decode_element(y, "u")) for x, y in u_raw]
        except (TypeError, ValueError):
            raise ParseError("u entries look like [x, y]", field="u")
        return InstanceFile(kind, validate_sock_instance(left, right, u, n))
    if kind == "pair-family":
        order_raw, pairs_raw = _require(data, "order", "pairs")
        order = _label_list(order_raw, "order")
        return InstanceFile(kind, PairFamily(tuple(order), _decode_fibers(pairs_raw, "pairs"), n))
    (fibers_raw,) = _require(data, "fibers")
    try:
        bundle = SockBundle(_decode_fibers(fibers_raw, "fibers"), n)
    except ValidationError as exc:
        raise exc.located(field="fibers")
    return InstanceFile(kind, bundle)


def parse_instance(text: str) -> InstanceFile:
    """Parse and validate an instance file; errors carry line and field."""
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno)
    except ParseError as exc:
        raise exc.located(line=1 if text.count("\n") <= 1 else None)
    try:
        return instance_from_json(data)
    except ValidationError as exc:
        raise exc.located(line=_line_of(text, exc.field))


def read_instance(path) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- results ----------------------------------------------------------------


def automorphism_to_json(p) -> dict:
    return {
        "onLeft": encode_bijection(p.onLeft),
        "onRight": encode_bijection(p.onRight),
        "inducedOnA": encode_bijection(p.inducedOnA),
        "inducedOnB": encode_bijection(p.inducedOnB),
    }


def automorphism_from_json(d):
    from .equivariance import AutomorphismPair

    return AutomorphismPair(*(decode_bijection(d[k]) for k in ("onLeft", "onRight", "inducedOnA", "inducedOnB")))


def certificate_to_json(c) -> dict:
    return {"witnesses": [automorphism_to_json(w) for w in c.witnesses]}


def certificate_from_json(d):
    from .equivariance import NonexistenceCertificate

    return NonexistenceCertificate(tuple(automorphism_from_json(w) for w in d["witnesses"]))


def format_element(e) -> str:
    if isinstance(e, tuple):
        return "(" + ", ".join(format_element(x) for x in e) + ")"
    return str(e)


def element_sort(items):
    return sorted(items, key=element_key)
