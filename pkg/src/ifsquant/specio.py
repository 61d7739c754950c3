"""System-spec files: a JSON schema that round-trips losslessly.

Top-level fields: ``id``, ``domain``, ``maps`` (``prefix`` of explicit
similarities plus a ``tail`` ratio law), ``probs`` (mass prefix plus tail),
``placement`` (the deterministic rule positioning tail maps) and ``j0``.
Loading validates the probability normalization, map containment and the
pressure-finiteness condition, and records a certified separation gap.

Placement rules with a zero gap budget (images tiling the domain) are legal
but mark the system as not strongly separated; such systems are meant for
the thermodynamic solvers only.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .ifs import (AmbientDomain, ContractiveSimilarity, GeometricTail, InfiniteIFS,
                  MapFamily, PowerLawTail, ProbabilityFamily, StackPlacement,
                  validate_separation)
from .thermo import validate_finiteness


def _tail_from_dict(d):
    if d is None:
        return None
    kind = d.get("kind")
    if kind == "geometric":
        return GeometricTail(base=float(d["base"]), coeff=float(d.get("coeff", 1.0)))
    if kind == "power":
        return PowerLawTail(exponent=float(d["exponent"]), coeff=float(d.get("coeff", 1.0)))
    raise ValidationError(f"unknown tail kind {kind!r}")


def _tail_to_dict(tail):
    if tail is None:
        return None
    if isinstance(tail, GeometricTail):
        return {"kind": "geometric", "base": tail.base, "coeff": tail.coeff}
    return {"kind": "power", "exponent": tail.exponent, "coeff": tail.coeff}


def system_from_dict(doc):
    try:
        dom = doc["domain"]
        domain = AmbientDomain(kind=dom["kind"],
                               center=np.array(dom["center"], dtype=float),
                               radius_or_halfwidths=np.array(
                                   dom["radius_or_halfwidths"], dtype=float))
        prefix = tuple(
            ContractiveSimilarity(ratio=float(m["ratio"]),
                                  orthogonal=np.array(m["orthogonal"], dtype=float),
                                  translation=np.array(m["translation"], dtype=float))
            for m in doc["maps"].get("prefix", []))
        maps = MapFamily(prefix=prefix, tail=_tail_from_dict(doc["maps"].get("tail")))
        probs = ProbabilityFamily(prefix=tuple(doc["probs"].get("prefix", [])),
                                  tail=_tail_from_dict(doc["probs"].get("tail")))
        pl = doc.get("placement")
        placement = None
        if pl is not None:
            if pl.get("rule") != "stack_right":
                raise ValidationError(f"unknown placement rule {pl.get('rule')!r}")
            placement = StackPlacement(domain=domain, ratio_tail=maps.tail,
                                       prefix_len=maps.prefix_len,
                                       gap_fraction=float(pl["gap_fraction"]),
                                       gap_decay=float(pl["gap_decay"]),
                                       axis=int(pl.get("axis", 0)))
        system = InfiniteIFS(domain=domain, maps=maps, probs=probs,
                             placement=placement, j0=int(doc.get("j0", 1)),
                             system_id=str(doc.get("id", "system")))
    except KeyError as exc:
        raise ValidationError(f"missing system-spec field {exc}") from exc
    gap = _separation_gap(system)
    system = dataclasses.replace(system, separation_gap=gap)
    validate_finiteness(system)
    return system


def _separation_gap(system):
    if system.placement is not None:
        if system.maps.prefix_len == 0:
            return float(system.placement.min_prefix_gap(8))
    size = system.maps.prefix_len if system.is_finite else max(system.maps.prefix_len, 8)
    if size < 2:
        return 0.0
    return max(validate_separation(system, prefix_size=size).min_gap, 0.0)


def system_to_dict(system):
    doc = {
        "id": system.system_id,
        "domain": {
            "kind": system.domain.kind,
            "center": list(map(float, system.domain.center)),
            "radius_or_halfwidths": list(map(float, system.domain.radius_or_halfwidths)),
        },
        "maps": {
            "prefix": [
                {"ratio": m.ratio,
                 "orthogonal": [[float(v) for v in row] for row in m.orthogonal],
                 "translation": list(map(float, m.translation))}
                for m in system.maps.prefix],
            "tail": _tail_to_dict(system.maps.tail),
        },
        "probs": {
            "prefix": list(system.probs.prefix),
            "tail": _tail_to_dict(system.probs.tail),
        },
        "placement": None,
        "j0": system.j0,
    }
    if system.placement is not None:
        doc["placement"] = {
            "rule": "stack_right",
            "gap_fraction": system.placement.gap_fraction,
            "gap_decay": system.placement.gap_decay,
            "axis": system.placement.axis,
        }
    return doc


def load_system(path):
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))


def save_system(system, path):
    Path(path).write_text(json.dumps(system_to_dict(system), indent=2) + "\n",
                          encoding="utf-8")
