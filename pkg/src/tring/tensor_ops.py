"""Dense tensor algebra primitives shared by every other module.

Tensors are plain ``numpy.ndarray`` objects holding 64-bit floats in
row-major (C) memory order.  Mode indices are 0-based.  Both matricization
conventions below enumerate the trailing multi-index with the *first*
listed dimension varying fastest; the cyclic unfolding must agree with the
subchain enumeration in :mod:`tring.ring` for the matricized ring identity
to hold exactly, so these orders are frozen and covered by golden tests.
"""

import numpy as np

__all__ = [
    "as_tensor",
    "inner_product",
    "frobenius_norm",
    "mode_n_product",
    "unfold_classical",
    "fold_classical",
    "unfold_tr",
    "fold_tr",
    "contract_single_mode",
    "spectral_norm",
]


def as_tensor(x):
    """Coerce to a float64 ndarray without copying when already one."""
    return np.asarray(x, dtype=np.float64)


def _check_mode(x, mode):
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for order-{x.ndim} tensor")


def inner_product(x, y):
    """Sum of elementwise products of two same-shaped tensors."""
    x = as_tensor(x)
    y = as_tensor(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.vdot(x, y))


def frobenius_norm(x):
    """Frobenius norm, i.e. sqrt of the self inner product."""
    return float(np.linalg.norm(as_tensor(x).ravel()))


def mode_n_product(x, a, mode):
    """Contract matrix ``a`` against dimension ``mode`` of tensor ``x``.

    ``a`` has shape ``(j, x.shape[mode])``; the result replaces dimension
    ``mode`` by ``j`` and leaves all other dimensions in place.
    """
    x = as_tensor(x)
    a = as_tensor(a)
    _check_mode(x, mode)
    if a.ndim != 2:
        raise ValueError("mode product expects a matrix")
    if a.shape[1] != x.shape[mode]:
        raise ValueError(
            f"inner dimension mismatch: matrix has {a.shape[1]} columns, "
            f"tensor mode {mode} has size {x.shape[mode]}"
        )
    out = np.tensordot(x, a, axes=(mode, 1))
    return np.moveaxis(out, -1, mode)


def unfold_classical(x, mode):
    """Classical mode-``mode`` matricization.

    Rows index dimension ``mode``; columns enumerate the remaining
    dimensions in their natural order with the first one varying fastest.
    """
    x = as_tensor(x)
    _check_mode(x, mode)
    y = np.moveaxis(x, mode, 0)
    return y.reshape(x.shape[mode], -1, order="F")


def fold_classical(m, mode, shape):
    """Exact inverse of :func:`unfold_classical` for the given shape."""
    m = as_tensor(m)
    shape = tuple(int(s) for s in shape)
    if not 0 <= mode < len(shape):
        raise ValueError(f"mode {mode} out of range for shape {shape}")
    rest = shape[:mode] + shape[mode + 1 :]
    if m.shape != (shape[mode], int(np.prod(rest, dtype=np.int64))):
        raise ValueError(f"matrix shape {m.shape} does not match target {shape}")
    y = m.reshape((shape[mode],) + rest, order="F")
    return np.moveaxis(y, 0, mode)


def unfold_tr(x, mode):
    """Cyclic mode-``mode`` matricization.

    Equals the classical mode-0 unfolding after circularly permuting
    dimensions so that ``mode`` comes first: columns enumerate the
    remaining dimensions in cyclic order starting at ``mode + 1``, with
    that one varying fastest.
    """
    x = as_tensor(x)
    _check_mode(x, mode)
    d = x.ndim
    axes = tuple(range(mode, d)) + tuple(range(mode))
    y = np.transpose(x, axes)
    return y.reshape(x.shape[mode], -1, order="F")


def fold_tr(m, mode, shape):
    """Exact inverse of :func:`unfold_tr` for the given shape."""
    m = as_tensor(m)
    shape = tuple(int(s) for s in shape)
    d = len(shape)
    if not 0 <= mode < d:
        raise ValueError(f"mode {mode} out of range for shape {shape}")
    perm_shape = shape[mode:] + shape[:mode]
    if m.shape != (shape[mode], int(np.prod(perm_shape[1:], dtype=np.int64))):
        raise ValueError(f"matrix shape {m.shape} does not match target {shape}")
    y = m.reshape(perm_shape, order="F")
    inv_axes = tuple((i - mode) % d for i in range(d))
    return np.transpose(y, inv_axes)


def contract_single_mode(x, y, mode_x, mode_y):
    """Contract one dimension of ``x`` against one dimension of ``y``.

    The output carries the remaining dimensions of ``x`` (in order)
    followed by the remaining dimensions of ``y``.
    """
    x = as_tensor(x)
    y = as_tensor(y)
    _check_mode(x, mode_x)
    _check_mode(y, mode_y)
    if x.shape[mode_x] != y.shape[mode_y]:
        raise ValueError(
            f"contracted sizes differ: {x.shape[mode_x]} vs {y.shape[mode_y]}"
        )
    return np.tensordot(x, y, axes=(mode_x, mode_y))


def spectral_norm(a, tol=1e-10, max_iter=1000):
    """Largest singular value of a matrix.

    Power iteration on ``a.T @ a`` with relative tolerance ``tol`` on the
    Rayleigh quotient and an iteration cap; only the top singular value is
    ever needed here, so a full SVD would be wasted work.  A zero matrix
    yields 0.
    """
    a = as_tensor(a)
    if a.ndim != 2:
        raise ValueError("spectral_norm expects a matrix")
    if a.size == 0:
        raise ValueError("spectral_norm of an empty matrix")
    gram = a.T @ a
    k = gram.shape[0]
    # Seeded random start: a fixed deterministic vector such as all-ones
    # can be exactly orthogonal to the leading eigenvector.
    v = np.random.default_rng(0).standard_normal(k)
    v /= np.linalg.norm(v)
    lam = 0.0
    prev = np.inf
    for _ in range(max_iter):
        w = gram @ v
        lam = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            lam = 0.0
            break
        v = w / norm_w
        if abs(lam - prev) <= tol * max(abs(lam), np.finfo(np.float64).tiny):
            break
        prev = lam
    return float(np.sqrt(max(lam, 0.0)))
