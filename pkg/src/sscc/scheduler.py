"""Persistent leftist min-heap of ``(time, uid)`` schedule entries.

Entries are ordered by time alone.  ``merge`` uses a strict comparison,
so on equal times the root of the second heap is kept on top.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

from .stochastic import monus


class ScheduleEntry(NamedTuple):
    time: Fraction
    uid: int


class Node:
    __slots__ = ("rank", "entry", "left", "right")

    def __init__(self, rank: int, entry: ScheduleEntry, left: Heap, right: Heap):
        self.rank = rank
        self.entry = entry
        self.left = left
        self.right = right

    def __repr__(self):
        return f"T({self.rank}, {tuple(self.entry)}, {self.left!r}, {self.right!r})"

    def __eq__(self, other):
        # structural equality, including shape
        if not isinstance(other, Node):
            return NotImplemented
        return (self.rank == other.rank and self.entry == other.entry
                and self.left == other.left and self.right == other.right)

    __hash__ = None


Heap = Optional[Node]
EMPTY: Heap = None


def rank(h: Heap) -> int:
    return 0 if h is None else h.rank


def _make(entry: ScheduleEntry, a: Heap, b: Heap) -> Node:
    ra, rb = rank(a), rank(b)
    if ra >= rb:
        return Node(rb + 1, entry, a, b)
    return Node(ra + 1, entry, b, a)


def merge(a: Heap, b: Heap) -> Heap:
    if a is None:
        return b
    if b is None:
        return a
    if a.entry.time < b.entry.time:
        return _make(a.entry, a.left, merge(a.right, b))
    return _make(b.entry, b.left, merge(a, b.right))


def insert(entry: ScheduleEntry, h: Heap) -> Node:
    return merge(Node(1, entry, None, None), h)


def find_min(h: Heap) -> ScheduleEntry:
    if h is None:
        raise IndexError("find_min on an empty heap")
    return h.entry


def delete_min(h: Heap) -> Heap:
    if h is None:
        raise IndexError("delete_min on an empty heap")
    return merge(h.left, h.right)


def delta(h: Heap, t: Fraction) -> Heap:
    """Same shape, every time reduced by ``t`` (saturating at zero)."""
    if h is None or not t:
        return h
    # explicit post-order walk; left spines can be long
    done: dict = {}
    stack = [(h, False)]
    while stack:
        node, expanded = stack.pop()
        if node is None:
            continue
        if expanded:
            done[id(node)] = Node(node.rank, ScheduleEntry(monus(node.entry.time, t), node.entry.uid),
                                  done.pop(id(node.left), None), done.pop(id(node.right), None))
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    return done[id(h)]


def entries(h: Heap) -> Iterator[ScheduleEntry]:
    """All entries in pre-order (root first); not sorted."""
    stack = [h]
    while stack:
        node = stack.pop()
        if node is not None:
            yield node.entry
            stack.append(node.right)
            stack.append(node.left)


def size(h: Heap) -> int:
    return sum(1 for _ in entries(h))


def audit(h: Heap) -> None:
    """Assert heap order, the leftist property and rank bookkeeping."""
    stack = [h]
    while stack:
        node = stack.pop()
        if node is None:
            continue
        for child in (node.left, node.right):
            if child is not None and child.entry.time < node.entry.time:
                raise AssertionError(f"heap order violated below {node.entry}")
        if rank(node.left) < rank(node.right):
            raise AssertionError(f"leftist property violated at {node.entry}")
        if node.rank != rank(node.right) + 1:
            raise AssertionError(f"bad rank at {node.entry}")
        stack.append(node.left)
        stack.append(node.right)


def from_entries(items) -> Heap:
    h: Heap = None
    for e in items:
        h = insert(ScheduleEntry(*e), h)
    return h


def drain(h: Heap) -> list:
    """Entries in extraction order."""
    out = []
    while h is not None:
        out.append(h.entry)
        h = delete_min(h)
    return out
