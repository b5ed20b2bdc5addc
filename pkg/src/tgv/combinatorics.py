"""Exact integer combinatorics on binary codes.

Codes are indexed from 0 (``j`` in ``0 .. 2**k - 1``) and written most
significant bit first.  Permutations are stored as tuples of 1-based images,
so ``perm[l - 1] == pi(l)``.
"""

import itertools
import math
from functools import lru_cache

from .errors import ArgumentError, CapacityError

__all__ = [
    "MAX_ENUM_ORDER",
    "MAX_ORDER",
    "binom",
    "binary_code",
    "binary_decode",
    "apply_permutation",
    "enumerate_permutations",
    "sym_index_vector",
    "bit_sum",
    "orbit",
    "orbit_groups",
]

#: Largest order for which S_k is enumerated explicitly.
MAX_ENUM_ORDER = 8
#: Largest order supported by orbit-based code paths.
MAX_ORDER = 12


def binom(k, r):
    """Binomial coefficient C(k, r) as an exact Python int; 0 outside 0..k."""
    if k < 0:
        raise ArgumentError(f"binom needs k >= 0, got {k}")
    if r < 0 or r > k:
        return 0
    return math.comb(k, r)


def _check_code_index(j, k):
    if k < 0:
        raise ArgumentError(f"order must be non-negative, got {k}")
    if not 0 <= j < (1 << k):
        raise ArgumentError(f"index {j} out of range for {k}-bit codes")


def binary_code(j, k):
    """Return the ``k``-bit code of ``j`` as a tuple, MSB first.

    >>> binary_code(5, 3)
    (1, 0, 1)
    """
    _check_code_index(j, k)
    return tuple((j >> (k - 1 - i)) & 1 for i in range(k))


def binary_decode(bits):
    """Inverse of :func:`binary_code`."""
    bits = tuple(bits)
    if not bits:
        raise ArgumentError("cannot decode an empty code")
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ArgumentError(f"non-binary entry {b!r} in code")
        value = (value << 1) | int(b)
    return value


def apply_permutation(perm, v):
    """Return ``(v[perm(1)], ..., v[perm(k)])``."""
    v = tuple(v)
    if len(perm) != len(v):
        raise ArgumentError(
            f"permutation of {len(perm)} letters applied to length-{len(v)} vector")
    return tuple(v[p - 1] for p in perm)


@lru_cache(maxsize=None)
def enumerate_permutations(k):
    """All ``k!`` permutations of ``1..k`` in lexicographic order."""
    if k < 1:
        raise ArgumentError(f"need k >= 1, got {k}")
    if k > MAX_ENUM_ORDER:
        raise CapacityError(
            f"explicit enumeration of S_{k} exceeds the cap k <= {MAX_ENUM_ORDER}")
    return tuple(itertools.permutations(range(1, k + 1)))


def sym_index_vector(j, k, perms=None):
    """Column indices ``b^-1(f_pi(b(j)))`` for every ``pi`` in S_k.

    ``perms`` overrides the enumeration of S_k (it must contain each
    permutation once); by default the lexicographic order is used.
    """
    _check_code_index(j, k)
    if perms is None:
        perms = enumerate_permutations(k)
    code = binary_code(j, k)
    return [binary_decode(apply_permutation(p, code)) for p in perms]


def bit_sum(j, k):
    """Number of ones in the ``k``-bit code of ``j``."""
    _check_code_index(j, k)
    return bin(j).count("1")


def orbit(j, k):
    """Distinct indices reachable from ``j`` by permuting its code."""
    s = bit_sum(j, k)
    return frozenset(m for m in range(1 << k) if bin(m).count("1") == s)


@lru_cache(maxsize=None)
def orbit_groups(k):
    """Column indices of ``k``-bit codes grouped by bit sum.

    Entry ``r`` lists, in increasing order, every ``j < 2**k`` with ``r``
    ones.  These are exactly the orbits of S_k acting on codes.
    """
    if not 0 <= k <= MAX_ORDER:
        raise CapacityError(f"order {k} outside 0..{MAX_ORDER}")
    groups = [[] for _ in range(k + 1)]
    for j in range(1 << k):
        groups[bin(j).count("1")].append(j)
    return tuple(tuple(g) for g in groups)
