"""Tensor ring core chains: construction, subchain merging, reconstruction.

A ring factorization of an order-``d`` tensor is a cyclic chain of ``d``
third-order cores; core ``n`` has shape ``(ranks[n], dims[n], ranks[n+1])``
with the trailing rank of the last core wrapping back to the leading rank
of the first.  Element ``(i_1, ..., i_d)`` of the represented tensor is the
trace of the product of the cores' lateral slices at those indices.

The matricized identity used by the solver reads, for every mode ``n``::

    unfold_tr(X, n) == core_unfold2(core_n) @ subchain_unfold2(sub_n).T

where ``sub_n`` merges all cores except ``n``.  It only holds because the
subchain's middle-index enumeration (cyclic, first merged dimension
fastest) and the shared ``(r_n slow, r_{n+1} fast)`` column pairing are
fixed consistently with :mod:`tring.tensor_ops`.
"""

import numpy as np

from .tensor_ops import as_tensor, fold_tr, frobenius_norm

__all__ = [
    "TRCores",
    "init_random",
    "build_subchain",
    "subchain_unfold2",
    "subchain_fold2",
    "core_unfold2",
    "core_fold2",
    "reconstruct",
    "relative_error",
    "feature_matrix",
]


class TRCores:
    """Ordered cyclic chain of third-order cores.

    Parameters
    ----------
    cores : sequence of ndarray
        Core ``n`` must have shape ``(r_n, i_n, r_{n+1})`` with
        ``r_{d} == r_0`` closing the ring.
    nonneg : bool
        When set, every core entry must be >= 0 (validated).
    copy : bool
        Copy the input arrays (default) or adopt them as-is.
    """

    def __init__(self, cores, nonneg=False, copy=True):
        cores = [np.array(c, dtype=np.float64, copy=copy) for c in cores]
        if not cores:
            raise ValueError("need at least one core")
        for n, c in enumerate(cores):
            if c.ndim != 3:
                raise ValueError(f"core {n} must be third order, got {c.ndim}")
        d = len(cores)
        for n in range(d):
            nxt = (n + 1) % d
            if cores[n].shape[2] != cores[nxt].shape[0]:
                raise ValueError(
                    f"rank chain broken: core {n} trailing rank "
                    f"{cores[n].shape[2]} != core {nxt} leading rank "
                    f"{cores[nxt].shape[0]}"
                )
        if nonneg:
            for n, c in enumerate(cores):
                if np.any(c < 0):
                    raise ValueError(f"core {n} has negative entries")
        self.cores = cores
        self.nonneg = bool(nonneg)

    @property
    def order(self):
        return len(self.cores)

    @property
    def dims(self):
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self):
        return tuple(c.shape[0] for c in self.cores)

    def __len__(self):
        return len(self.cores)

    def __getitem__(self, n):
        return self.cores[n]

    def __iter__(self):
        return iter(self.cores)

    def __repr__(self):
        return f"TRCores(dims={self.dims}, ranks={self.ranks}, nonneg={self.nonneg})"


def _core_list(cores):
    return cores.cores if isinstance(cores, TRCores) else list(cores)


def init_random(dims, ranks, seed):
    """Random nonnegative cores: |N(0, 1)| entries, deterministic per seed.

    Gaussian draws pass through absolute value so the chain is a valid
    nonnegative starting point while keeping the unit scale.
    """
    dims = tuple(int(i) for i in dims)
    ranks = tuple(int(r) for r in ranks)
    if len(dims) != len(ranks):
        raise ValueError(f"{len(ranks)} ranks for an order-{len(dims)} tensor")
    if any(i < 1 for i in dims) or any(r < 1 for r in ranks):
        raise ValueError("dims and ranks must be positive")
    rng = np.random.default_rng(seed)
    d = len(dims)
    cores = [
        np.abs(rng.standard_normal((ranks[n], dims[n], ranks[(n + 1) % d])))
        for n in range(d)
    ]
    return TRCores(cores, nonneg=True, copy=False)


def build_subchain(cores, mode):
    """Merge all cores except ``mode`` into one third-order tensor.

    Contracts cores ``mode+1, ..., d-1, 0, ..., mode-1`` in cyclic order
    over their shared rank dimensions.  The result has shape
    ``(r_{mode+1}, prod of remaining dims, r_mode)`` with the middle index
    enumerating the merged dimensions in that cyclic order, the first one
    varying fastest.
    """
    cores = _core_list(cores)
    d = len(cores)
    if d < 2:
        raise ValueError("subchain requires at least two cores")
    if not 0 <= mode < d:
        raise ValueError(f"mode {mode} out of range for {d} cores")
    order = [(mode + j) % d for j in range(1, d)]
    sub = cores[order[0]]
    for idx in order[1:]:
        nxt = cores[idx]
        r_head, middle = sub.shape[0], sub.shape[1]
        merged = np.tensordot(sub, nxt, axes=(2, 0))
        # Flatten the (middle, i_idx) pair with the existing middle index
        # still fastest, i.e. the newly appended dimension is slower.
        sub = merged.transpose(0, 2, 1, 3).reshape(
            r_head, middle * nxt.shape[1], nxt.shape[2]
        )
    return sub


def subchain_unfold2(sub):
    """Mode-2 unfolding of a subchain, columns paired (r_n slow, r_{n+1} fast)."""
    sub = as_tensor(sub)
    if sub.ndim != 3:
        raise ValueError("subchain must be third order")
    r_head, middle, r_tail = sub.shape
    return sub.transpose(1, 2, 0).reshape(middle, r_tail * r_head)


def subchain_fold2(m, r_n, r_np1):
    """Exact inverse of :func:`subchain_unfold2`."""
    m = as_tensor(m)
    if m.ndim != 2 or m.shape[1] != r_n * r_np1:
        raise ValueError(f"matrix shape {m.shape} does not match ranks ({r_n}, {r_np1})")
    return m.reshape(m.shape[0], r_n, r_np1).transpose(2, 0, 1)


def core_unfold2(core):
    """Mode-2 unfolding of one core, columns paired (r_n slow, r_{n+1} fast)."""
    core = as_tensor(core)
    if core.ndim != 3:
        raise ValueError("core must be third order")
    return core.transpose(1, 0, 2).reshape(core.shape[1], -1)


def core_fold2(m, r_left, size, r_right):
    """Exact inverse of :func:`core_unfold2` for a (r_left, size, r_right) core."""
    m = as_tensor(m)
    if m.shape != (size, r_left * r_right):
        raise ValueError(
            f"matrix shape {m.shape} does not match core ({r_left}, {size}, {r_right})"
        )
    return m.reshape(size, r_left, r_right).transpose(1, 0, 2)


def reconstruct(cores):
    """Contract the full ring back into a dense tensor.

    Computed as one subchain merge followed by a single matrix product
    (O(d) chain contractions) rather than the elementwise trace formula,
    which costs a slice product per entry; the trace form survives only as
    a test oracle.
    """
    cores = _core_list(cores)
    d = len(cores)
    dims = tuple(c.shape[1] for c in cores)
    if d == 1:
        return np.trace(cores[0], axis1=0, axis2=2)
    g2 = core_unfold2(cores[0])
    s2 = subchain_unfold2(build_subchain(cores, 0))
    return fold_tr(g2 @ s2.T, 0, dims)


def relative_error(x, cores):
    """Frobenius-relative reconstruction error ||x - ring(cores)|| / ||x||."""
    x = as_tensor(x)
    norm_x = frobenius_norm(x)
    if norm_x == 0.0:
        raise ValueError("relative error undefined for an all-zero tensor")
    return frobenius_norm(x - reconstruct(cores)) / norm_x


def feature_matrix(cores):
    """Per-sample feature rows: mode-2 unfolding of the last core.

    With samples stored along the final tensor dimension, the last core's
    unfolding has one row per sample and ``r_d * r_1`` feature columns.
    """
    cores = _core_list(cores)
    return core_unfold2(cores[-1])
