# utils/retry.py
from __future__ import annotations

import logging
import time
from functools import wraps
from typing import Callable, Tuple, Type

logger = logging.getLogger(__name__)


"""
Decorator for bounded retries.

- Re-invokes the wrapped call when it raises one of `retry_on`
- Re-raises the last error once `max_retries` attempts are used up
- Optional exponential backoff (off by default; numerical redraws need no delay)
"""
def with_retry(
    max_retries: int = 3,
    base_delay: float = 0.0,
    retry_on: Tuple[Type[BaseException], ...] = (ArithmeticError,),
) -> Callable:

    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")

    def decorator(fn: Callable):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            delay = base_delay
            for attempt in range(max_retries):
                try:
                    return fn(*args, **kwargs)
                except retry_on as e:
                    if attempt == max_retries - 1:
                        # Give up
                        raise
                    logger.debug("%s attempt %d failed: %s", fn.__name__, attempt + 1, e)
                    if delay > 0:
                        time.sleep(delay)
                        delay *= 2
        return wrapper

    return decorator
