"""Retry policy for throttled or failing cloud calls."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

logger = logging.getLogger(__name__)


def is_retryable(status: int) -> bool:
    return status == 429 or 500 <= status <= 599


@dataclass
class RetryPolicy:
    """Up to ``len(delays)`` retries on HTTP 429/5xx, sleeping between attempts.

    Auth failures (401/403) and other 4xx responses are returned immediately.
    """

    delays: tuple[float, ...] = (0.5, 1.0, 2.0)
    sleep: Callable[[float], None] = time.sleep

    def call(self, send: Callable[[], "object"]):
        """Invoke ``send`` (returning a response with ``status_code``) with retries."""
        response = send()
        for delay in self.delays:
            if not is_retryable(response.status_code):
                break
            logger.warning("HTTP %s, retrying in %.1fs", response.status_code, delay)
            self.sleep(delay)
            response = send()
        return response
