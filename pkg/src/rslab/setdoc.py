"""SetDocument JSON: named interval unions plus rational parameters.

::

    {"sets": {"A": [["0", "1"]], "B": [["0", "1/2"], ["2", "3"]]},
     "params": {"tau": "1/4"}}

Endpoints may be integers or ``"p/q"`` strings; output always uses strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .intervals import InputError, IntervalUnion, as_rational, format_rational, normalize


@dataclass
class SetDocument:
    sets: dict[str, IntervalUnion] = field(default_factory=dict)
    params: dict[str, Fraction] = field(default_factory=dict)

    @classmethod
    def from_obj(cls, obj: Any) -> "SetDocument":
        if not isinstance(obj, Mapping):
            raise InputError("document must be a JSON object")
        raw_sets = obj.get("sets", {})
        if not isinstance(raw_sets, Mapping):
            raise InputError("'sets' must be an object")
        sets = {}
        for name, pairs in raw_sets.items():
            if not isinstance(pairs, list):
                raise InputError(f"set {name!r}: expected a list of [lo, hi] pairs")
            parsed = []
            for i, pair in enumerate(pairs):
                where = f"set {name!r}, pair {i}"
                if not isinstance(pair, list) or len(pair) != 2:
                    raise InputError(f"{where}: expected [lo, hi]")
                try:
                    lo, hi = as_rational(pair[0]), as_rational(pair[1])
                except (InputError, ValueError, TypeError, ZeroDivisionError) as exc:
                    raise InputError(f"{where}: {exc}") from None
                if lo > hi:
                    raise InputError(f"{where}: lo > hi")
                parsed.append((lo, hi))
            sets[name] = normalize(parsed)
        raw_params = obj.get("params", {})
        if not isinstance(raw_params, Mapping):
            raise InputError("'params' must be an object")
        params = {}
        for key, value in raw_params.items():
            try:
                params[key] = as_rational(value)
            except (InputError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise InputError(f"param {key!r}: {exc}") from None
        return cls(sets, params)

    @classmethod
    def loads(cls, text: str) -> "SetDocument":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
        return cls.from_obj(obj)

    def to_obj(self) -> dict:
        return {
            "sets": {name: [[format_rational(lo), format_rational(hi)] for lo, hi in u.pairs()]
                     for name, u in self.sets.items()},
            "params": {k: format_rational(v) for k, v in self.params.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)

    def get(self, name: str) -> IntervalUnion:
        try:
            return self.sets[name]
        except KeyError:
            raise InputError(f"document has no set named {name!r}") from None

    def param(self, name: str) -> Fraction:
        try:
            return self.params[name]
        except KeyError:
            raise InputError(f"document has no parameter {name!r}") from None
