"""Deadlines for the anytime loops.

Deadlines are checked at step boundaries only: an LP that has started runs to
completion before the loop looks at the clock again.
"""

from __future__ import annotations

import time
from typing import Callable, Optional

from app.exceptions import InvalidInputError


class Deadline:
    """Wall-clock limit in milliseconds; ``None`` never expires."""

    def __init__(
        self,
        milliseconds: Optional[int] = None,
        clock: Callable[[], float] = time.monotonic,
    ):
        if milliseconds is not None and milliseconds < 0:
            raise InvalidInputError("Deadline must be nonnegative", {"milliseconds": milliseconds})
        self._clock = clock
        self._milliseconds = milliseconds
        self._start = clock()

    @property
    def milliseconds(self) -> Optional[int]:
        return self._milliseconds

    def elapsed_ms(self) -> float:
        return (self._clock() - self._start) * 1000.0

    def expired(self) -> bool:
        if self._milliseconds is None:
            return False
        return self.elapsed_ms() >= self._milliseconds


NO_DEADLINE = Deadline(None)
