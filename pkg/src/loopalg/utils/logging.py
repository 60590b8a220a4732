import logging
import time
import typing
from contextlib import contextmanager
from functools import wraps


def logtime(start: float, action: str) -> float:
    end = time.perf_counter()
    logging.getLogger("timing").debug(f"{action} took {end - start:0.3f} seconds")
    return end


F = typing.TypeVar("F", bound=typing.Callable[..., typing.Any])  # type: ignore


def _describe(args: tuple, kwargs: dict) -> str:  # type: ignore[type-arg]
    shown = [type(arg).__name__ if not isinstance(arg, (int, str)) else repr(arg) for arg in args]
    shown += [f"{k}={v!r}" for k, v in kwargs.items() if isinstance(v, (int, str))]
    return ", ".join(shown)


def info_time(func: F) -> F:  # type: ignore
    logger = logging.getLogger("timing." + func.__module__)

    @wraps(func)
    def wrapper(*args, **kwargs):  # type: ignore
        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start
        logger.info(f"Function {func.__name__}({_describe(args, kwargs)}) took {elapsed:0.3f} seconds")
        return result

    return typing.cast(F, wrapper)  # type: ignore


def debug_time(func: F) -> F:  # type: ignore
    logger = logging.getLogger("timing." + func.__module__)

    @wraps(func)
    def wrapper(*args, **kwargs):  # type: ignore
        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start
        logger.debug(f"Function {func.__name__}({_describe(args, kwargs)}) took {elapsed:0.3f} seconds")
        return result

    return typing.cast(F, wrapper)  # type: ignore


class PhaseTimer:
    """Wall-clock time per named phase of a run.

    Examples
    --------
    >>> timer = PhaseTimer()
    >>> with timer.phase("cobar"):
    ...     pass
    >>> list(timer.timings)
    ['cobar']
    """

    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> typing.Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + logtime(start, name) - start

    def as_dict(self) -> dict[str, float]:
        return {name: round(seconds, 6) for name, seconds in self.timings.items()}
