"""Cooperative wall-clock budgets for the long-running computations."""

from __future__ import annotations

import time


class BudgetExceeded(RuntimeError):
    """Raised inside a computation once its deadline has passed."""


class Deadline:
    """A wall-clock budget; ``check()`` raises once the time is spent.

    ``Deadline(None)`` never expires.
    """

    def __init__(self, seconds: float | None):
        self.seconds = seconds
        self.start = time.monotonic()

    def check(self) -> None:
        if self.seconds is not None and time.monotonic() - self.start > self.seconds:
            raise BudgetExceeded(f"budget of {self.seconds}s exceeded")

    def elapsed(self) -> float:
        return time.monotonic() - self.start
