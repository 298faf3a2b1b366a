import asyncio
import time
from collections import deque
from typing import Callable, Deque


class RateLimiter:
    """Sliding-window limiter shared by all probes of a scan."""

    def __init__(self, max_requests: float, period_seconds: float = 1.0, clock: Callable[[], float] = time.monotonic):
        if max_requests <= 0:
            raise ValueError("max_requests must be positive")
        self.max_requests = max(int(max_requests * period_seconds), 1)
        self.period_seconds = period_seconds
        self.requests: Deque[float] = deque()
        self._clock = clock
        self._lock = asyncio.Lock()

    def can_request(self) -> bool:
        """Check if a new request is allowed"""
        self._clean_old_requests()
        return len(self.requests) < self.max_requests

    def record_request(self) -> None:
        self.requests.append(self._clock())

    def _clean_old_requests(self) -> None:
        cutoff = self._clock() - self.period_seconds
        while self.requests and self.requests[0] <= cutoff:
            self.requests.popleft()

    async def acquire(self) -> None:
        """Wait until the window has room, then record the request."""
        async with self._lock:
            while not self.can_request():
                await asyncio.sleep(self.requests[0] + self.period_seconds - self._clock())
            self.record_request()
