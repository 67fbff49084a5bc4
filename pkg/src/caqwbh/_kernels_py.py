"""Numpy fallback for the compiled walk kernels.

Same buffer layout and the same operation order as ``_ckernels.pyx``; each
numpy ufunc rounds once per element, so results agree bit for bit.
"""

import numpy as np


def _view(buf):
    return buf.reshape(-1, 2, 2)


def _coin(v, c, s):
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :].copy()
    v[:, 0, :] = c * a0 + s * a1
    v[:, 1, :] = s * a0 - c * a1


def _coefficients(sel, ctab, stab):
    sel = np.asarray(sel, dtype=np.intp)
    return np.asarray(ctab)[sel][:, None], np.asarray(stab)[sel][:, None]


def coin(buf, sel, ctab, stab):
    v = _view(buf)
    if len(sel) != v.shape[0]:
        raise ValueError("selector length does not match state size")
    _coin(v, *_coefficients(sel, ctab, stab))


def shift(buf, bit):
    v = _view(buf)
    n = v.shape[0]
    mask = 1 << bit
    if mask >= n:
        raise ValueError("shift bit out of range")
    v[:, 1, :] = v[np.arange(n) ^ mask, 1, :]


def evolve(buf, blocks, q, ctab, stab):
    n = 1 << q
    if buf.shape[0] != 4 * n:
        raise ValueError("state size does not match q")
    if len(blocks) % n:
        raise ValueError("block buffer is not a whole number of blocks")
    v = _view(buf)
    perms = [np.arange(n) ^ (1 << i) for i in range(q)]
    for block in np.asarray(blocks).reshape(-1, n):
        c, s = _coefficients(block, ctab, stab)
        for perm in perms:
            _coin(v, c, s)
            v[:, 1, :] = v[perm, 1, :]


def probabilities(buf, out):
    v = _view(buf)
    if v.shape[0] != out.shape[0]:
        raise ValueError("output length does not match state size")
    re, im = v[..., 0], v[..., 1]
    out[:] = (re[:, 0] * re[:, 0] + im[:, 0] * im[:, 0]) + (
        re[:, 1] * re[:, 1] + im[:, 1] * im[:, 1]
    )
