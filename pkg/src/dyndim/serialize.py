"""JSON interchange for spaces, systems, covers, observables and tower data.

Rationals are always "p/q" strings. Formats:

    space:  {"kind": "discrete", "n": 5} | {"kind": "cycle", "cells": 12}
            | {"kind": "path", "cells": 6} | {"kind": "line", "values": ["0/1", ...]}
            | {"kind": "grid", "granularity": 4, "dim": 2}
            | {"kind": "points", "coords": [["0/1", "1/2"], ...]}
    system: {"type": "perm", "group": "Z", "generators": [[...]], "space": {...}, "label": ""}
            | {"type": "sft", "alphabet": 2, "forbidden": [[1, 1]], "window": 2}
    cover:  {"sets": [[0, 1], [1, 2]], "label": ""}
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .dynsys import GROUPS, FinitePermSystem, SftSystem
from .errors import ValidationError
from .ground import (Cover, GroundSpace, bit_cover, cycle_space, discrete_space, grid_space, line_space,
                     path_space)
from .rational import fmt_q, q


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ValidationError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e.msg})") from e


def _need(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise ValidationError(f"missing field {key!r}")
    return d[key]


def _int(v, what: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValidationError(f"{what} must be an integer")
    return v


def space_from_dict(d: dict) -> GroundSpace:
    kind = _need(d, "kind")
    if kind == "discrete":
        return discrete_space(_int(_need(d, "n"), "n"))
    if kind == "cycle":
        return cycle_space(_int(_need(d, "cells"), "cells"))
    if kind == "path":
        return path_space(_int(_need(d, "cells"), "cells"))
    if kind == "line":
        return line_space([q(v) for v in _need(d, "values")])
    if kind == "grid":
        return grid_space(_int(_need(d, "granularity"), "granularity"), _int(d.get("dim", 1), "dim"))
    if kind == "points":
        coords = tuple(tuple(q(v) for v in row) for row in _need(d, "coords"))
        return GroundSpace(len(coords), coords=coords)
    raise ValidationError(f"unknown space kind {kind!r}")


def space_to_dict(s: GroundSpace) -> dict:
    if s.complex is not None:
        return {"kind": "cycle" if s.complex.cyclic else "path", "cells": s.complex.cells}
    if s.coords is not None:
        return {"kind": "points", "coords": [[fmt_q(v) for v in row] for row in s.coords]}
    if s.table is not None:
        raise ValidationError("distance-table spaces are not serialised")
    return {"kind": "discrete", "n": s.n}


def system_from_dict(d: dict):
    kind = d.get("type", "perm") if isinstance(d, dict) else None
    if kind == "sft":
        return SftSystem(_int(_need(d, "alphabet"), "alphabet"),
                         tuple(tuple(w) for w in _need(d, "forbidden")), _int(_need(d, "window"), "window"))
    if kind != "perm":
        raise ValidationError(f"unknown system type {kind!r}")
    gens = _need(d, "generators")
    if not isinstance(gens, list) or not gens:
        raise ValidationError("generators must be a nonempty list")
    for g in gens:
        if not isinstance(g, list) or any(not isinstance(v, int) or isinstance(v, bool) for v in g):
            raise ValidationError("generators must be integer arrays")
    group = d.get("group", "Z")
    if group not in GROUPS:
        raise ValidationError(f"unknown group tag {group!r}")
    space = space_from_dict(d["space"]) if "space" in d else discrete_space(len(gens[0]))
    return FinitePermSystem(space, tuple(tuple(g) for g in gens), group, bool(d.get("isometry", False)),
                            d.get("label", ""))


def system_to_dict(sys) -> dict:
    if isinstance(sys, SftSystem):
        return {"type": "sft", "alphabet": sys.alphabet, "forbidden": [list(w) for w in sys.forbidden],
                "window": sys.window}
    return {"type": "perm", "group": sys.group, "generators": [list(g) for g in sys.generators],
            "space": space_to_dict(sys.space), "isometry": sys.isometry, "label": sys.label}


def cover_from_dict(d: dict, space: GroundSpace | None = None) -> Cover:
    """The cover's own "space" field wins over the supplied space."""
    if "space" in d:
        space = space_from_dict(d["space"])
    if space is None:
        raise ValidationError("cover file names no space")
    sets = _need(d, "sets")
    for s in sets:
        if any(not isinstance(x, int) or not 0 <= x < space.n for x in s):
            raise ValidationError("cover sets must list point ids of the space")
    return bit_cover(space, sets, d.get("label", ""))


def cover_to_dict(c: Cover) -> dict:
    out = {"sets": [sorted(s.members) for s in c.sets], "label": c.label}
    if c.space is not None:
        out["space"] = space_to_dict(c.space)
    return out


def observable_from_json(d, sys):
    """A list of "p/q" values per point; for subshifts {"blocks": [[[0, 1], "1/2"], ...]}."""
    if isinstance(sys, SftSystem):
        return {tuple(w): q(v) for w, v in _need(d, "blocks")}
    vals = d["values"] if isinstance(d, dict) else d
    if not isinstance(vals, list):
        raise ValidationError("observable must be a list of rationals")
    return [q(v) for v in vals]


def gamma_from_json(g):
    if isinstance(g, int) and not isinstance(g, bool):
        return g
    if isinstance(g, list):
        return tuple(g)
    raise ValidationError("group elements are integers (powers of T) or permutation arrays")


def kfamily_from_json(d) -> dict:
    out = {}
    for row in d:
        out[(_int(_need(row, "j"), "j"), gamma_from_json(_need(row, "gamma")))] = frozenset(_need(row, "set"))
    return out


def towers_from_json(d):
    from .dimension import UrpTowers
    from .ground import BitSet

    rows = _need(d, "towers")
    bases = tuple(BitSet(frozenset(_need(r, "base"))) for r in rows)
    shapes = tuple(tuple(gamma_from_json(g) for g in _need(r, "shape")) for r in rows)
    return UrpTowers(bases, shapes, q(_need(d, "eps")))


def write_text(path, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def q_str(v: Fraction | None) -> str:
    return "" if v is None else fmt_q(v)
