"""Canonical total order on the element values used in carriers.

Carriers mix strings, integers, tuples (products, encoded transformations)
and frozensets (sieve members), so plain ``sorted`` is not enough.  Every
enumeration in the package sorts with :func:`skey` so output does not depend
on hash seeds.
"""

from __future__ import annotations

from typing import Any, Iterable


def skey(x: Any):
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(skey(e) for e in x))
    if isinstance(x, frozenset):
        keys = sorted(skey(e) for e in x)
        return (3, len(keys), tuple(keys))
    if x is None:
        return (-1,)
    raise TypeError(f"no canonical order for {type(x).__name__}: {x!r}")


def canonical(xs: Iterable[Any]) -> tuple:
    return tuple(sorted(set(xs), key=skey))


def jsonable(x: Any):
    """Convert an element to plain JSON data (sieves become sorted name lists)."""
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    members = getattr(x, "members", None)
    if isinstance(members, frozenset):
        return sorted(members)
    if isinstance(x, frozenset):
        return [jsonable(e) for e in sorted(x, key=skey)]
    if isinstance(x, tuple):
        return [jsonable(e) for e in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def label(x: Any) -> str:
    """Short deterministic text form of an element, used in reports."""
    if isinstance(x, str):
        return x
    members = getattr(x, "members", None)
    if isinstance(members, frozenset):
        return "{" + ",".join(sorted(members)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(label(e) for e in x) + ")"
    if isinstance(x, frozenset):
        return "{" + ",".join(label(e) for e in sorted(x, key=skey)) + "}"
    return str(x)
