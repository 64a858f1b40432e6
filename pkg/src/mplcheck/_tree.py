"""Base class for immutable syntax trees with structural equality and a cached hash."""

from __future__ import annotations

from dataclasses import dataclass, fields


class Node:
    __slots__ = ()
    _field_names: tuple = ()

    def _values(self):
        return tuple(getattr(self, f) for f in self._field_names)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False if isinstance(other, Node) else NotImplemented
        return hash(self) == hash(other) and self._values() == other._values()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._values())
            object.__setattr__(self, "_hash", h)
        return h

    def children(self):
        return ()


def node(cls):
    """Decorator: frozen dataclass that keeps Node's equality and hashing."""
    cls = dataclass(frozen=True, eq=False)(cls)
    cls._field_names = tuple(f.name for f in fields(cls))
    return cls
