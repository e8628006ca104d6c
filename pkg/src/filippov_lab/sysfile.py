"""JSON serialization of systems.

Schema::

    {"name": str, "x_domain": [lo, hi],
     "fields": {"X1": {"alpha": [c0, ...], "beta": [...], "gamma": [...]}, ... "X4": ...}}
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from .pws_model import FieldTriple, PolynomialScalar, PwsSystem

__all__ = ["SystemParseError", "parse_system", "load_system", "dump_system", "canonical_digest"]


class SystemParseError(ValueError):
    pass


def _coeffs(obj, where: str) -> PolynomialScalar:
    if not isinstance(obj, list) or not obj:
        raise SystemParseError(f"{where}: expected a nonempty list of numbers")
    for c in obj:
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise SystemParseError(f"{where}: {c!r} is not a finite number")
    return PolynomialScalar(tuple(float(c) for c in obj))


def parse_system(data) -> PwsSystem:
    if not isinstance(data, dict):
        raise SystemParseError("top level must be an object")
    name = data.get("name", "system")
    if not isinstance(name, str):
        raise SystemParseError("name must be a string")
    dom = data.get("x_domain")
    if (
        not isinstance(dom, list)
        or len(dom) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in dom)
    ):
        raise SystemParseError("x_domain must be [lo, hi]")
    if not dom[0] <= dom[1]:
        raise SystemParseError("x_domain needs lo <= hi")
    fields = data.get("fields")
    if not isinstance(fields, dict):
        raise SystemParseError("fields must be an object")
    triples = []
    for i in (1, 2, 3, 4):
        f = fields.get(f"X{i}")
        if not isinstance(f, dict):
            raise SystemParseError(f"fields.X{i} missing")
        parts = [_coeffs(f.get(k), f"fields.X{i}.{k}") for k in ("alpha", "beta", "gamma")]
        triples.append(FieldTriple(*parts))
    return PwsSystem(tuple(triples), (float(dom[0]), float(dom[1])), name)


def load_system(path: str | Path) -> PwsSystem:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemParseError(f"{path}: {exc}") from exc
    return parse_system(data)


def system_to_dict(system: PwsSystem) -> dict:
    return {
        "name": system.name,
        "x_domain": list(system.x_domain),
        "fields": {
            f"X{i}": {
                "alpha": list(f.alpha.coeffs),
                "beta": list(f.beta.coeffs),
                "gamma": list(f.gamma.coeffs),
            }
            for i, f in enumerate(system.fields, start=1)
        },
    }


def dump_system(system: PwsSystem) -> str:
    return json.dumps(system_to_dict(system), indent=2) + "\n"


def canonical_digest(system: PwsSystem) -> str:
    blob = json.dumps(system_to_dict(system), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
