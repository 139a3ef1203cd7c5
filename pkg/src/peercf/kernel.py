"""Bit-mask kernels for resolution and subsumption over clause sets.

A clause set is a ``uint64`` array of shape ``[n, 2*W]``: the first ``W``
words hold the positive-literal mask, the last ``W`` the negative mask.
Saturation is dominated by pairwise resolvability and subset tests, which
these kernels batch.

Two interchangeable backends: a numba ``@njit`` one and a pure-numpy one.
Selection: ``PEERCF_KERNEL=numba|numpy`` in the environment, defaulting to
numba when it imports. ``benchmarks/kernel_bench.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

U64 = np.uint64


def empty_set(width_words: int) -> np.ndarray:
    return np.empty((0, 2 * width_words), dtype=U64)


def row_sizes(rows: np.ndarray) -> np.ndarray:
    """Literal count of every clause row."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bitwise_count(rows).sum(axis=1).astype(np.int64)


def dedupe_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    view = rows.view([("", U64)] * rows.shape[1]).ravel()
    _, idx = np.unique(view, return_index=True)
    return rows[np.sort(idx)]


# -- numba backend ----------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True, inline="always")
    def _popcount64(x):
        x = x - ((x >> 1) & 0x5555555555555555)
        x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
        return (x * 0x0101010101010101) >> 56

    @njit(cache=True)
    def _nb_resolve_round(F, S):
        n_f, two_w = F.shape
        n_s = S.shape[0]
        W = two_w // 2
        count = 0
        for i in range(n_f):
            for j in range(n_s):
                bits = 0
                for w in range(W):
                    comp = (F[i, w] & S[j, W + w]) | (F[i, W + w] & S[j, w])
                    bits += _popcount64(comp)
                    if bits > 1:
                        break
                if bits == 1:
                    count += 1
        out = np.empty((count, two_w), dtype=np.uint64)
        k = 0
        for i in range(n_f):
            for j in range(n_s):
                bits = 0
                for w in range(W):
                    comp = (F[i, w] & S[j, W + w]) | (F[i, W + w] & S[j, w])
                    bits += _popcount64(comp)
                    if bits > 1:
                        break
                if bits == 1:
                    for w in range(W):
                        comp = (F[i, w] & S[j, W + w]) | (F[i, W + w] & S[j, w])
                        out[k, w] = (F[i, w] | S[j, w]) & ~comp
                        out[k, W + w] = (F[i, W + w] | S[j, W + w]) & ~comp
                    k += 1
        return out

    @njit(cache=True)
    def _nb_subsumed_by(C, S):
        n_c, two_w = C.shape
        n_s = S.shape[0]
        W = two_w // 2
        out = np.zeros(n_c, dtype=np.bool_)
        for i in range(n_c):
            for j in range(n_s):
                ok = True
                for w in range(two_w):
                    if S[j, w] & ~C[i, w]:
                        ok = False
                        break
                if ok:
                    out[i] = True
                    break
        return out

    @njit(cache=True)
    def _nb_minimal_mask(C):
        # C must be deduplicated and sorted by ascending literal count.
        n_c, two_w = C.shape
        keep = np.zeros(n_c, dtype=np.bool_)
        kept = np.empty(n_c, dtype=np.int64)
        n_kept = 0
        for i in range(n_c):
            subsumed = False
            for kj in range(n_kept):
                j = kept[kj]
                ok = True
                for w in range(two_w):
                    if C[j, w] & ~C[i, w]:
                        ok = False
                        break
                if ok:
                    subsumed = True
                    break
            if not subsumed:
                keep[i] = True
                kept[n_kept] = i
                n_kept += 1
        return keep


# -- numpy backend ----------------------------------------------------------

_CHUNK = 256


def _np_resolve_round(F, S):
    two_w = F.shape[1]
    W = two_w // 2
    if F.shape[0] == 0 or S.shape[0] == 0:
        return np.empty((0, two_w), dtype=U64)
    pieces = []
    for start in range(0, F.shape[0], _CHUNK):
        f = F[start : start + _CHUNK]
        comp = (f[:, None, :W] & S[None, :, W:]) | (f[:, None, W:] & S[None, :, :W])
        bits = np.bitwise_count(comp).sum(axis=2)
        fi, sj = np.nonzero(bits == 1)
        if fi.size == 0:
            continue
        c = comp[fi, sj]
        pos = (f[fi, :W] | S[sj, :W]) & ~c
        neg = (f[fi, W:] | S[sj, W:]) & ~c
        pieces.append(np.concatenate([pos, neg], axis=1))
    if not pieces:
        return np.empty((0, two_w), dtype=U64)
    return np.concatenate(pieces, axis=0)


def _np_subsumed_by(C, S):
    if C.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    if S.shape[0] == 0:
        return np.zeros(C.shape[0], dtype=bool)
    out = np.zeros(C.shape[0], dtype=bool)
    for start in range(0, C.shape[0], _CHUNK):
        c = C[start : start + _CHUNK]
        hits = (S[None, :, :] & ~c[:, None, :]) == 0
        out[start : start + _CHUNK] = hits.all(axis=2).any(axis=1)
    return out


def _np_minimal_mask(C):
    n_c = C.shape[0]
    keep = np.zeros(n_c, dtype=bool)
    kept: list[int] = []
    for i in range(n_c):
        if kept:
            K = C[kept]
            if ((K & ~C[i][None, :]) == 0).all(axis=1).any():
                continue
        keep[i] = True
        kept.append(i)
    return keep


# -- dispatch ---------------------------------------------------------------


def _default_backend() -> str:
    requested = os.environ.get("PEERCF_KERNEL", "").strip().lower()
    if requested in ("numba", "numpy"):
        if requested == "numba" and not HAS_NUMBA:
            raise RuntimeError("PEERCF_KERNEL=numba but numba is not importable")
        return requested
    return "numba" if HAS_NUMBA else "numpy"


_BACKEND = _default_backend()


def get_backend() -> str:
    return _BACKEND


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _BACKEND = name


def resolve_round(F: np.ndarray, S: np.ndarray) -> np.ndarray:
    """All resolvents between a frontier row and a set row.

    Only pairs with exactly one complementary variable resolve; those
    resolvents are never tautologies, so no tautology filter is needed.
    Output may contain duplicates.
    """
    if F.shape[0] == 0 or S.shape[0] == 0:
        return np.empty((0, F.shape[1]), dtype=U64)
    if _BACKEND == "numba":
        return _nb_resolve_round(F, S)
    return _np_resolve_round(F, S)


def subsumed_by_mask(C: np.ndarray, S: np.ndarray) -> np.ndarray:
    """For each row of C, whether some row of S is a subset of it."""
    if _BACKEND == "numba" and C.shape[0] and S.shape[0]:
        return _nb_subsumed_by(C, S)
    return _np_subsumed_by(C, S)


def minimize_rows(C: np.ndarray) -> np.ndarray:
    """Subsumption-minimal, duplicate-free subset of the given rows."""
    C = dedupe_rows(C)
    if C.shape[0] <= 1:
        return C
    order = np.argsort(row_sizes(C), kind="stable")
    C = C[order]
    if _BACKEND == "numba":
        keep = _nb_minimal_mask(C)
    else:
        keep = _np_minimal_mask(C)
    return C[keep]
