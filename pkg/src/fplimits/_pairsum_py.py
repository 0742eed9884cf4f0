"""Pure-numpy implementation of the pairwise power-sum kernel.

Drop-in fallback for the compiled extension.  Both backends share the same
contract and the same fixed block-structured reduction: rows are processed in
contiguous blocks of ``block_rows`` and block partials are combined in block
order, so results are independent of any worker count.

Kernel contract
---------------
The admissible ordered pair set lives on a rectangle: rows are the first
``n_rows`` node indices, columns all ``n_cols`` nodes, diagonal excluded.
Columns ``j >= n_rows`` (the exterior buffer, when present) enter with
multiplicity 2 because both orders of an (interior, exterior) pair are
admissible while the rectangle stores the pair once.  With that multiplicity
m_j, the kernel evaluates

    S      = sum_{i, j != i} m_j * |u_i - u_j|^p * k_ij
    acc_x  = d(S)/d(u_x) / p  = 2 * sum_b |u_x - u_b|^{p-2} (u_x - u_b) k_xb

and returns (log S, grad log S) with grad log S = p * acc / S.

Two evaluation modes:

* ``mode="pow"`` — ``mat`` holds g = d^(-2(n+sp)/p) and p must be an even
  integer; each term is (dz^2 * g)^(p/2), computed by binary exponentiation.
  Fast, but only valid when the caller has checked the magnitude guard.
* ``mode="log"`` — ``mat`` holds log d; terms are accumulated as shifted
  exponentials with the exact global maximum factored out (two passes).
  Valid for any p > 1 and any magnitudes.

Masked (diagonal) entries are encoded in the matrix itself: g = 0 in pow
mode, log d = +inf in log mode; both make the term vanish.
"""

from __future__ import annotations

import numpy as np

backend_name = "python"


def _ipow(base: np.ndarray, k: int) -> np.ndarray:
    """base**k elementwise for integer k >= 0 by binary exponentiation."""
    if k == 0:
        return np.ones_like(base)
    acc = None
    b = base
    while True:
        if k & 1:
            acc = b.copy() if acc is None else acc * b
        k >>= 1
        if not k:
            return acc
        b = b * b


def _blocks(n_rows: int, block_rows: int):
    block_rows = max(1, int(block_rows))
    return [(b, min(b + block_rows, n_rows)) for b in range(0, n_rows, block_rows)]


def pair_power_form(
    u: np.ndarray,
    mat: np.ndarray,
    p: float,
    expo: float,
    mode: str,
    want_grad: bool,
    block_rows: int = 64,
    num_threads: int = 1,
):
    """Evaluate (log S, grad log S or None) over the rectangular pair set.

    ``num_threads`` is accepted for interface parity with the compiled
    backend; this implementation is single-threaded (results are identical
    by the shared block-reduction contract).
    """
    n_rows, n_cols = mat.shape
    mult = np.ones(n_cols)
    mult[n_rows:] = 2.0
    if mode == "pow":
        return _form_pow(u, mat, int(round(p)), mult, want_grad, block_rows)
    if mode == "log":
        return _form_log(u, mat, float(p), float(expo), mult, want_grad, block_rows)
    raise ValueError(f"unknown mode {mode!r}")


def _form_pow(u, g, p, mult, want_grad, block_rows):
    n_rows, n_cols = g.shape
    half = (p - 2) // 2
    S = 0.0
    grad = np.zeros(n_cols) if want_grad else None
    for b0, b1 in _blocks(n_rows, block_rows):
        dz = u[b0:b1, None] - u[None, :]
        z = dz * dz * g[b0:b1]
        t2 = _ipow(z, half)
        tm = (t2 * z) * mult
        S += float(tm.sum())
        if want_grad:
            sm = (dz * t2 * g[b0:b1]) * mult
            grad[b0:b1] += sm.sum(axis=1)
            grad -= sm.sum(axis=0)
    if not (S > 0.0) or not np.isfinite(S):
        logS = -np.inf if S == 0.0 else np.inf
        return logS, (np.zeros(n_cols) if want_grad else None)
    logS = float(np.log(S))
    if want_grad:
        grad = p * grad / S
    return logS, grad


def _form_log(u, logd, p, expo, mult, want_grad, block_rows):
    n_rows, n_cols = logd.shape
    lmult = np.log(mult)
    blocks = _blocks(n_rows, block_rows)

    # pass 1: exact maxima of the term exponents (max is order-independent)
    M = -np.inf
    M2 = -np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        for b0, b1 in blocks:
            la = np.log(np.abs(u[b0:b1, None] - u[None, :]))
            base = lmult[None, :] - expo * logd[b0:b1]
            a = p * la + base
            M = max(M, float(np.max(a)))
            if want_grad:
                a2 = (p - 1.0) * la + base
                M2 = max(M2, float(np.max(a2)))
    if M == -np.inf:
        return -np.inf, (np.zeros(n_cols) if want_grad else None)

    # pass 2: shifted accumulation, block partials combined in block order
    S = 0.0
    grad = np.zeros(n_cols) if want_grad else None
    with np.errstate(divide="ignore", invalid="ignore"):
        for b0, b1 in blocks:
            dz = u[b0:b1, None] - u[None, :]
            la = np.log(np.abs(dz))
            base = lmult[None, :] - expo * logd[b0:b1]
            S += float(np.exp(p * la + base - M).sum())
            if want_grad:
                t = np.sign(dz) * np.exp((p - 1.0) * la + base - M2)
                grad[b0:b1] += t.sum(axis=1)
                grad -= t.sum(axis=0)
    logS = M + float(np.log(S))
    if want_grad:
        # grad logS = p * exp(M2) * grad / exp(logS), kept in log form per node
        with np.errstate(divide="ignore"):
            mag = np.exp(M2 - logS + np.log(np.abs(grad)))
        grad = np.sign(grad) * p * mag
    return logS, grad
