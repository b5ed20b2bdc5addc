"""Size and speed comparison of the compact and direct TGV forms."""

import time
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .evaluate import MAX_DIRECT_ORDER, TgvParams, compact_chain, direct_chain

__all__ = ["BenchRow", "run_bench", "time_ratios_increasing"]


@dataclass
class BenchRow:
    order: int
    compact_width: int
    direct_width: int
    compact_bytes: int
    direct_bytes: int
    compact_seconds: float
    direct_seconds: float = None

    @property
    def width_ratio(self):
        return self.direct_width / self.compact_width

    @property
    def time_ratio(self):
        if self.direct_seconds is None:
            return None
        return self.direct_seconds / self.compact_seconds

    @property
    def skipped(self):
        return self.direct_seconds is None


def _best_time(fn, repeats, applications):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(applications):
            fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_bench(orders, size=128, repeats=3, applications=10, seed=0):
    """Time ``applications`` evaluations of every TGV residual for each order.

    Widths and bytes refer to the highest-order auxiliary field, which has
    ``n`` columns in compact form and ``2**(n-1)`` in direct form (the image
    itself when ``n = 1``).  Direct timings are skipped above the direct-form
    order cap.  Times are the best of ``repeats`` runs.
    """
    shape = (size, size)
    npix = size * size
    rng = np.random.default_rng(seed)
    rows = []
    for n in orders:
        params = TgvParams(n, (1.0,) * n)
        g = rng.standard_normal((npix, 1))
        compact = [g] + [rng.standard_normal((npix, i + 1)) for i in range(1, n)]
        cprob = compact_chain(shape, params)
        row = BenchRow(
            order=n,
            compact_width=n,
            direct_width=1 << (n - 1),
            compact_bytes=npix * n * 8,
            direct_bytes=npix * (1 << (n - 1)) * 8,
            compact_seconds=_best_time(lambda: cprob.residuals(compact), repeats, applications),
        )
        if n <= MAX_DIRECT_ORDER:
            direct = [g] + [ops.lift_compact_to_direct(p, i)
                            for i, p in enumerate(compact[1:], start=1)]
            dprob = direct_chain(shape, params)
            row.direct_seconds = _best_time(lambda: dprob.residuals(direct), repeats,
                                            applications)
        rows.append(row)
    return rows


def time_ratios_increasing(rows):
    """True when direct/compact time ratios strictly increase over orders >= 2."""
    ratios = [r.time_ratio for r in sorted(rows, key=lambda r: r.order)
              if r.order >= 2 and not r.skipped]
    return all(b > a for a, b in zip(ratios, ratios[1:]))
