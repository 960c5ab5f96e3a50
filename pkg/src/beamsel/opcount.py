"""Explicit multiply-add counting context.

Complexity claims are verified by counting nominal complex multiply-adds
instead of timing: every counted kernel receives an optional OpCounter
and adds its nominal cost. Wall-clock noise never enters the comparison.
"""

from __future__ import annotations


class OpCounter:
    """Accumulates nominal complex multiply-add counts."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def add(self, n: int) -> None:
        self.count += int(n)

    def __repr__(self) -> str:
        return f"OpCounter(count={self.count})"


def add_ops(ops: OpCounter | None, n: int) -> None:
    """Count n multiply-adds if a counting context is active."""
    if ops is not None:
        ops.count += int(n)
