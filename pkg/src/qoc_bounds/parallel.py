#  SPDX-License-Identifier: GPL-3.0-or-later

"""Run independent tasks on a pool of worker processes.

Results are always returned in input order, and every task carries
its own seed, so the output does not depend on the number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
import logging
import os
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np


__all__ = ("derive_seed", "resolve_workers", "parallel_map")


T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def derive_seed(base: int, *keys: int) -> int:
    """A 32-bit seed derived from a base seed and task keys.

    The same arguments always give the same seed, and different keys
    give statistically independent streams.

    Examples
    --------

    >>> derive_seed(1, 2) == derive_seed(1, 2)
    True
    >>> derive_seed(1, 2) == derive_seed(1, 3)
    False

    """

    if base < 0 or any(k < 0 for k in keys):
        raise ValueError(f"seeds must be non-negative: {base}, {keys}")

    seq = np.random.SeedSequence([int(base), *[int(k) for k in keys]])
    return int(seq.generate_state(1)[0])


def resolve_workers(workers: int | None) -> int:
    """None or 0 means one worker per CPU."""

    if workers is None or workers == 0:
        return os.cpu_count() or 1

    if workers < 0:
        raise ValueError(f"workers must be >= 0, not {workers}")

    return workers


def parallel_map(func: Callable[[T], R],
                 items: Iterable[T],
                 workers: int | None = 1
                 ) -> list[R]:
    """Apply func to each item, returning the results in order.

    Parameters
    ----------
    func : callable
        Must be picklable (a module-level function) when more than one
        worker is used.
    items : iterable
    workers : int or None, optional
        The number of processes. With 1 worker the map runs in the
        calling process.

    Returns
    -------
    results : list

    """

    tasks: Sequence[T] = list(items)
    nproc = min(resolve_workers(workers), max(1, len(tasks)))
    if nproc == 1:
        return [func(task) for task in tasks]

    logger.debug("Running %d tasks on %d workers", len(tasks), nproc)
    with ProcessPoolExecutor(max_workers=nproc) as pool:
        return list(pool.map(func, tasks))
