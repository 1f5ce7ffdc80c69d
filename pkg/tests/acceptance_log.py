"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

from __future__ import annotations

import functools
import time

RESULTS: dict[int, str] = {}


def criterion(number: int, title: str):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                line = f"criterion {number} [{title}]: FAIL ({type(exc).__name__}: {str(exc)[:160]})"
                RESULTS[number] = line
                print(line)
                raise
            line = f"criterion {number} [{title}]: PASS ({detail}; {time.perf_counter() - start:.2f}s)"
            RESULTS[number] = line
            print(line)

        return wrapper

    return deco
