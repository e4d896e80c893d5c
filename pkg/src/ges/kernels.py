"""Hot numeric kernels with numba and pure-numpy implementations.

Every kernel takes packed dense arrays (see space.pack_states) so the
inner loops stay free of Python objects:

* strong_cross  -- pairwise quadrature-weighted l2 distances
* weak_cross    -- pairwise weighted bounded-difference series
* nse_bilinear  -- truncated convolution of the advection term with
                   Leray projection, driven by a precomputed pair table

The numpy fallbacks batch over rows so memory stays O(set size) and the
summation order is fixed, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import numpy as np

from . import backend as _backend

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# pairwise strong distance


def _strong_cross_np(av, bv, qw):
    na = av.shape[0]
    nb = bv.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    for i in range(na):
        diff = av[i, None, :, :] - bv  # (nb, u, c)
        sq = (diff.real * diff.real + diff.imag * diff.imag).sum(axis=2)
        out[i, :] = np.sqrt(sq @ qw)
    return out


@njit(cache=True, nogil=True)
def _strong_cross_nb(av, bv, qw):  # pragma: no cover - numba path
    na, u, c = av.shape
    nb = bv.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    for i in range(na):
        for j in range(nb):
            acc = 0.0
            for k in range(u):
                s = 0.0
                for m in range(c):
                    d = av[i, k, m] - bv[j, k, m]
                    s += d.real * d.real + d.imag * d.imag
                acc += qw[k] * s
            out[i, j] = np.sqrt(acc)
    return out


# ---------------------------------------------------------------------------
# pairwise weak distance


def _weak_cross_np(av, bv, ww):
    na = av.shape[0]
    nb = bv.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    for i in range(na):
        diff = av[i, None, :, :] - bv
        t = np.sqrt((diff.real * diff.real + diff.imag * diff.imag).sum(axis=2))
        out[i, :] = (t / (1.0 + t)) @ ww
    return out


@njit(cache=True, nogil=True)
def _weak_cross_nb(av, bv, ww):  # pragma: no cover - numba path
    na, u, c = av.shape
    nb = bv.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    for i in range(na):
        for j in range(nb):
            acc = 0.0
            for k in range(u):
                s = 0.0
                for m in range(c):
                    d = av[i, k, m] - bv[j, k, m]
                    s += d.real * d.real + d.imag * d.imag
                t = np.sqrt(s)
                acc += ww[k] * t / (1.0 + t)
            out[i, j] = acc
    return out


# ---------------------------------------------------------------------------
# spectral advection term for the Galerkin velocity field
#
# out_k = -P_k [ i * sum_{p+q=k} (v_p . q) v_q ]  projected by
# P_k = I - k k^T / |k|^2, with (out, p, q) triples precomputed so both
# backends walk the identical interaction list.


def _nse_bilinear_np(vals, kvec, pair_out, pair_p, pair_q):
    m = vals.shape[0]
    kq = kvec[pair_q]  # (P, 3) float64
    vp = vals[pair_p]  # (P, 3) complex128
    dot = vp[:, 0] * kq[:, 0] + vp[:, 1] * kq[:, 1] + vp[:, 2] * kq[:, 2]
    contrib = 1j * dot[:, None] * vals[pair_q]  # (P, 3)
    out = np.empty((m, 3), dtype=np.complex128)
    for c in range(3):
        re = np.bincount(pair_out, weights=contrib[:, c].real, minlength=m)
        im = np.bincount(pair_out, weights=contrib[:, c].imag, minlength=m)
        out[:, c] = re + 1j * im
    ksq = (kvec * kvec).sum(axis=1)
    kd = (out * kvec).sum(axis=1) / ksq
    out -= kd[:, None] * kvec
    return -out


@njit(cache=True, nogil=True)
def _nse_bilinear_nb(vals, kvec, pair_out, pair_p, pair_q):  # pragma: no cover
    m = vals.shape[0]
    out = np.zeros((m, 3), dtype=np.complex128)
    for r in range(pair_out.shape[0]):
        o = pair_out[r]
        p = pair_p[r]
        q = pair_q[r]
        dot = (
            vals[p, 0] * kvec[q, 0]
            + vals[p, 1] * kvec[q, 1]
            + vals[p, 2] * kvec[q, 2]
        )
        f = 1j * dot
        out[o, 0] += f * vals[q, 0]
        out[o, 1] += f * vals[q, 1]
        out[o, 2] += f * vals[q, 2]
    for o in range(m):
        ksq = kvec[o, 0] ** 2 + kvec[o, 1] ** 2 + kvec[o, 2] ** 2
        kd = (
            out[o, 0] * kvec[o, 0]
            + out[o, 1] * kvec[o, 1]
            + out[o, 2] * kvec[o, 2]
        ) / ksq
        out[o, 0] = -(out[o, 0] - kd * kvec[o, 0])
        out[o, 1] = -(out[o, 1] - kd * kvec[o, 1])
        out[o, 2] = -(out[o, 2] - kd * kvec[o, 2])
    return out


_IMPL = {
    "numpy": {
        "strong_cross": _strong_cross_np,
        "weak_cross": _weak_cross_np,
        "nse_bilinear": _nse_bilinear_np,
    },
    "numba": {
        "strong_cross": _strong_cross_nb if HAS_NUMBA else _strong_cross_np,
        "weak_cross": _weak_cross_nb if HAS_NUMBA else _weak_cross_np,
        "nse_bilinear": _nse_bilinear_nb if HAS_NUMBA else _nse_bilinear_np,
    },
}


def _kernel(name):
    return _IMPL[_backend.backend()][name]


def strong_cross(av: np.ndarray, bv: np.ndarray, qw: np.ndarray) -> np.ndarray:
    """Pairwise strong distances between packed value blocks.

    av, bv: (n, u, c) complex arrays over a shared index union,
    qw: (u,) quadrature weights.  Returns an (na, nb) float matrix.
    """
    return _kernel("strong_cross")(av, bv, qw)


def weak_cross(av: np.ndarray, bv: np.ndarray, ww: np.ndarray) -> np.ndarray:
    """Pairwise weak distances, ww holding the per-index series weights."""
    return _kernel("weak_cross")(av, bv, ww)


def nse_bilinear(vals, kvec, pair_out, pair_p, pair_q) -> np.ndarray:
    """Projected advection term -P(v . grad v) on the truncated mode set."""
    return _kernel("nse_bilinear")(vals, kvec, pair_out, pair_p, pair_q)
