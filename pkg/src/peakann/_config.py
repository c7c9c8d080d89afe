"""Worker-count control shared by all parallel kernels.

Numba caps the number of usable threads at NUMBA_NUM_THREADS, which is
fixed when numba is first imported. Requests above the cap are clamped
rather than rejected so that ``--threads 8`` on a 4-core box still runs.
"""

import numba


def set_num_threads(n: int) -> int:
    """Set the worker count for all parallel loops; returns the effective value."""
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    effective = min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(effective)
    return effective


def get_num_threads() -> int:
    """Current worker count used by parallel kernels."""
    return numba.get_num_threads()


def max_num_threads() -> int:
    """Hard upper bound on workers for this process (fixed at numba import)."""
    return numba.config.NUMBA_NUM_THREADS
