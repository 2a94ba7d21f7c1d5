"""
Seeded, chunked Monte-Carlo plumbing.

Samples are split into fixed-size chunks; chunk ``i`` always draws from the ``i``-th child of the
run's ``SeedSequence``. Results are reduced in chunk order, so the worker count never changes them.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MCConfig:
    outer_samples: int = 10000
    inner_samples: int = 1
    seed: int = 0
    chunk_size: int = 4096
    threads: int = 1

    def __post_init__(self):
        for name in ('outer_samples', 'inner_samples', 'chunk_size', 'threads'):
            if int(getattr(self, name)) < 1:
                raise ValueError('MCConfig.{} must be >= 1, got {}'.format(name, getattr(self, name)))

    def chunk_sizes(self, total=None):
        total = self.outer_samples if total is None else total
        sizes = [self.chunk_size] * (total // self.chunk_size)
        if total % self.chunk_size:
            sizes.append(total % self.chunk_size)
        return sizes

    def digest_fields(self):
        """
        Fields that determine the estimate; the thread count does not.
        """
        return {
            'outer_samples': self.outer_samples,
            'inner_samples': self.inner_samples,
            'seed': self.seed,
            'chunk_size': self.chunk_size,
        }


def spawn_generators(seed, count):
    """
    Independent generators for ``count`` chunks derived from a single seed.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def ordered_map(func, items, threads=1):
    """
    Map ``func`` over ``items`` on a thread pool, returning results in input order.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def run_chunked(mc, chunk_func, total=None):
    """
    Call ``chunk_func(rng, n)`` once per chunk and return the per-chunk results in chunk order.
    """
    sizes = mc.chunk_sizes(total)
    generators = spawn_generators(mc.seed, len(sizes))
    logger.debug('Running {} Monte-Carlo chunks on {} threads'.format(len(sizes), mc.threads))
    return ordered_map(lambda job: chunk_func(*job), zip(generators, sizes), mc.threads)


def mean_and_std_err(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def jackknife_std_err(values):
    """
    Delete-one jackknife standard error of the sample mean.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        return 0.0
    leave_one_out = (values.sum() - values) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((leave_one_out - leave_one_out.mean()) ** 2)))
