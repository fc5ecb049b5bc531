"""JSON documents exchanged by the command line tool.

Every document is ``{"kind": ..., "version": 1, "payload": ...}``.  Kinds:
module, morphism, laurent-matrix, dihedral-matrix, report, bundle, stack.
"""

from __future__ import annotations

import json
from typing import Any

from .geo import GeoModule, GeoMorphism
from .reps import RepBundle, bundle_from_json, bundle_to_json
from .rings import DIHEDRAL, LAURENT, RingMatrix, matrix_from_json, matrix_to_json, to_scalar
from .squeeze import IntervalSpec, LayerSchedule, SqueezedStack
from .vanish import VanishReport

VERSION = 1
KINDS = ("module", "morphism", "laurent-matrix", "dihedral-matrix", "report", "bundle", "stack")


class DocumentError(ValueError):
    """Malformed or unknown document."""


def _stack_payload(s: SqueezedStack) -> dict:
    return {
        "interval": str(s.interval.a),
        "schedule": s.schedule.to_json(),
        "N": s.N,
        "layers": [emit(layer) for layer in s.layers],
    }


def _stack_from(p: dict) -> SqueezedStack:
    sched = p["schedule"]
    layers = tuple(parse(d)[1] for d in p["layers"])
    if not layers:
        raise DocumentError("stack without layers")
    return SqueezedStack(layers[0], IntervalSpec(to_scalar(p["interval"])),
                         LayerSchedule(to_scalar(sched["step"]),
                                       tuple(to_scalar(v) for v in sched.get("values", ()))),
                         layers)


def kind_of(obj: Any) -> str:
    if isinstance(obj, GeoModule):
        return "module"
    if isinstance(obj, GeoMorphism):
        return "morphism"
    if isinstance(obj, RingMatrix):
        if obj.ring == DIHEDRAL:
            return "dihedral-matrix"
        return "laurent-matrix"
    if isinstance(obj, (VanishReport, dict)):
        return "report"
    if isinstance(obj, RepBundle):
        return "bundle"
    if isinstance(obj, SqueezedStack):
        return "stack"
    raise DocumentError(f"no document kind for {type(obj).__name__}")


def emit(obj: Any) -> dict:
    kind = kind_of(obj)
    if kind in ("module", "morphism"):
        payload = obj.to_json()
    elif kind == "laurent-matrix":
        payload = matrix_to_json(obj if obj.ring == LAURENT else obj.map(lambda v: v, LAURENT))
    elif kind == "dihedral-matrix":
        payload = matrix_to_json(obj)
    elif kind == "report":
        payload = obj if isinstance(obj, dict) else obj.to_json()
    elif kind == "bundle":
        payload = bundle_to_json(obj)
    else:
        payload = _stack_payload(obj)
    return {"kind": kind, "version": VERSION, "payload": payload}


def parse(doc: dict) -> tuple[str, Any]:
    try:
        kind = doc["kind"]
        if doc.get("version", VERSION) != VERSION:
            raise DocumentError(f"unsupported version {doc.get('version')}")
        p = doc["payload"]
        if kind == "module":
            return kind, GeoModule.from_json(p)
        if kind == "morphism":
            return kind, GeoMorphism.from_json(p)
        if kind in ("laurent-matrix", "dihedral-matrix"):
            want = "laurent" if kind == "laurent-matrix" else "dihedral"
            M = matrix_from_json(dict(p, ring=p.get("ring", want)))
            if M.ring.name != want:
                raise DocumentError(f"{kind} document carries a {M.ring.name} matrix")
            return kind, M
        if kind == "report":
            if not isinstance(p, dict) or "flags" not in p:
                raise DocumentError("report payload needs flags")
            return kind, p
        if kind == "bundle":
            return kind, bundle_from_json(p)
        if kind == "stack":
            return kind, _stack_from(p)
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise DocumentError(f"malformed {doc.get('kind', '?')} document: {exc}") from None
    raise DocumentError(f"unknown document kind {kind!r}")


def dumps(obj: Any) -> str:
    return json.dumps(emit(obj), indent=2, sort_keys=True)


def loads(text: str) -> tuple[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return parse(doc)


def read(path: str) -> tuple[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj) + "\n")


__all__ = ["KINDS", "VERSION", "DocumentError", "emit", "parse", "dumps", "loads", "read",
           "write", "kind_of"]
