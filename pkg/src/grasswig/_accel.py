"""Bitmask term-product kernels, JIT-compiled when numba is usable.

The exterior-algebra product reduces to pairwise bitmask work: a term pair
annihilates when masks overlap, otherwise the product mask is the OR and the
sign is the parity of the interleaving inversion count.  That pair loop is the
hot path of every higher-level operation (star products, propagator flows,
batch simulation), so it lives here in array form with two interchangeable
implementations:

* a numba ``@njit`` kernel (default when numba imports cleanly), and
* a pure-numpy fallback using ``np.bitwise_count``.

Set ``GRASSWIG_NO_NUMBA=1`` to force the numpy path; ``benchmarks/`` compares
both.  Masks are limited to 64 generators, enough for 10 qubits with
auxiliary duals.
"""

from __future__ import annotations

import os

import numpy as np

_env_off = os.environ.get("GRASSWIG_NO_NUMBA", "").strip() not in ("", "0", "false", "no")

try:  # pragma: no cover - import guard
    if _env_off:
        raise ImportError("numba disabled via GRASSWIG_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


# Masks are int64 (not uint64): numba's sign-bit tricks are simpler there and
# <= 60 generators keeps every mask below 2**63.
@njit(cache=True)
def _pair_products_int_jit(masks_a, coeffs_a, masks_b, coeffs_b):
    na = masks_a.shape[0]
    nb = masks_b.shape[0]
    out_masks = np.empty(na * nb, dtype=np.int64)
    out_coeffs = np.empty(na * nb, dtype=np.complex128)
    k = 0
    for i in range(na):
        ma = masks_a[i]
        ca = coeffs_a[i]
        for j in range(nb):
            mb = masks_b[j]
            if ma & mb:
                continue
            inv = 0
            rem = mb
            while rem:
                low = rem & (-rem)
                # count generators of `a` strictly above this b-generator
                above = ma & ~((low << 1) - 1)
                c = 0
                while above:
                    above &= above - 1
                    c += 1
                inv += c
                rem ^= low
            sign = -1.0 if (inv & 1) else 1.0
            out_masks[k] = ma | mb
            out_coeffs[k] = sign * ca * coeffs_b[j]
            k += 1
    return out_masks[:k], out_coeffs[:k]


def _pair_products_numpy(masks_a, coeffs_a, masks_b, coeffs_b):
    A = masks_a[:, None]
    B = masks_b[None, :]
    keep = (A & B) == 0
    prod_masks = (A | B)[keep]
    # inversion parity: sum over set bits j of B of popcount(A >> (j+1))
    maxbit = int(max(masks_b.max(initial=0), 1)).bit_length()
    inv = np.zeros((masks_a.shape[0], masks_b.shape[0]), dtype=np.int64)
    for j in range(maxbit):
        has = (B >> j) & 1
        if not has.any():
            continue
        inv += has * np.bitwise_count(A >> (j + 1)).astype(np.int64)
    signs = np.where(inv[keep] & 1, -1.0, 1.0)
    prod_coeffs = signs * (coeffs_a[:, None] * coeffs_b[None, :])[keep]
    return prod_masks, prod_coeffs


def pair_products(masks_a, coeffs_a, masks_b, coeffs_b):
    """All nonvanishing term products of two mask/coefficient arrays.

    Returns unreduced (mask, coeff) arrays; callers accumulate duplicates.
    """
    masks_a = np.ascontiguousarray(masks_a, dtype=np.int64)
    masks_b = np.ascontiguousarray(masks_b, dtype=np.int64)
    coeffs_a = np.ascontiguousarray(coeffs_a, dtype=np.complex128)
    coeffs_b = np.ascontiguousarray(coeffs_b, dtype=np.complex128)
    if HAVE_NUMBA:
        return _pair_products_int_jit(masks_a, coeffs_a, masks_b, coeffs_b)
    return _pair_products_numpy(masks_a, coeffs_a, masks_b, coeffs_b)


def accumulate(masks, coeffs, tol):
    """Sum coefficients of equal masks and drop magnitudes below ``tol``."""
    if masks.shape[0] == 0:
        return masks, coeffs
    order = np.argsort(masks, kind="stable")
    masks = masks[order]
    coeffs = coeffs[order]
    boundaries = np.flatnonzero(np.diff(masks)) + 1
    starts = np.concatenate(([0], boundaries))
    sums = np.add.reduceat(coeffs, starts)
    uniq = masks[starts]
    keep = np.abs(sums) > tol
    return uniq[keep], sums[keep]
