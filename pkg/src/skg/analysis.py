"""Field schema and the deterministic analyzer shared by ingestion and queries."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import SchemaError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class FieldKind(str, enum.Enum):
    ANALYZED_TEXT = "analyzed_text"
    EXACT_STRING = "exact_string"


@dataclass(frozen=True)
class FieldSchema:
    name: str
    kind: FieldKind = FieldKind.EXACT_STRING

    def __post_init__(self):
        if not self.name:
            raise SchemaError("field name must be nonempty")
        object.__setattr__(self, "kind", FieldKind(self.kind))

    @property
    def positional(self) -> bool:
        return self.kind is FieldKind.ANALYZED_TEXT


def analyze_text(raw: str, schema: FieldSchema) -> list[tuple[str, int]]:
    """Turn a raw value into ``(term, position)`` pairs.

    Analyzed text is lowercased and split on runs of non-alphanumeric
    characters; positions are token indexes. An exact string becomes a single
    lowercased term at position 0.
    """
    if schema.kind is FieldKind.EXACT_STRING:
        term = raw.lower()
        return [(term, 0)] if term else []
    return [(m.group(0), i) for i, m in enumerate(_TOKEN_RE.finditer(raw.lower()))]


class Schema:
    """Mapping of field name to :class:`FieldSchema`.

    A closed schema rejects unknown fields at ingestion. An open schema adds
    them on first sight: string values become analyzed text, lists become
    exact strings. A field's kind never changes once registered.
    """

    def __init__(self, fields=(), closed: bool = True):
        self.closed = closed
        self._fields: dict[str, FieldSchema] = {}
        for f in fields:
            self.add(f)

    def add(self, field: FieldSchema) -> FieldSchema:
        current = self._fields.get(field.name)
        if current is not None and current.kind is not field.kind:
            raise SchemaError(
                f"field {field.name!r} is {current.kind.value}; cannot redefine as {field.kind.value}"
            )
        self._fields[field.name] = field
        return field

    def get(self, name: str) -> FieldSchema:
        try:
            return self._fields[name]
        except KeyError:
            raise SchemaError(f"unknown field {name!r}") from None

    def resolve(self, name: str, value) -> FieldSchema:
        if name in self._fields:
            return self._fields[name]
        if self.closed:
            raise SchemaError(f"unknown field {name!r}")
        kind = FieldKind.EXACT_STRING if isinstance(value, list) else FieldKind.ANALYZED_TEXT
        return self.add(FieldSchema(name, kind))

    def __contains__(self, name) -> bool:
        return name in self._fields

    def __iter__(self):
        return iter(self._fields.values())

    def __len__(self):
        return len(self._fields)

    def names(self) -> list[str]:
        return list(self._fields)

    def copy(self) -> Schema:
        return Schema(self._fields.values(), closed=self.closed)

    def to_dict(self) -> dict:
        return {
            "closed": self.closed,
            "fields": {f.name: f.kind.value for f in self._fields.values()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> Schema:
        fields = data.get("fields", {})
        if isinstance(fields, list):
            items = [(f["name"], f.get("kind", FieldKind.EXACT_STRING.value)) for f in fields]
        else:
            items = list(fields.items())
        try:
            return cls(
                [FieldSchema(name, FieldKind(kind)) for name, kind in items],
                closed=bool(data.get("closed", True)),
            )
        except ValueError as exc:
            raise SchemaError(str(exc)) from None

    def __eq__(self, other):
        return isinstance(other, Schema) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"Schema({self.to_dict()!r})"
