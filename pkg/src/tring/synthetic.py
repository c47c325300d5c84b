"""Synthetic tensors for desk-scale experiments.

Two generators: exactly ring-decomposable nonnegative tensors (ground
truth by construction, for recovery experiments) and multi-class "blob"
stacks whose sample slices cluster by construction (for clustering and
classification experiments).
"""

import numpy as np

from .ring import init_random, reconstruct

__all__ = ["ring_tensor", "blob_tensor"]


def ring_tensor(dims, ranks, seed):
    """Nonnegative tensor generated exactly by a random ring.

    Returns ``(tensor, cores)``; fitting with the true ranks can drive the
    reconstruction error to zero.
    """
    cores = init_random(dims, ranks, seed)
    return reconstruct(cores), cores


def blob_tensor(slice_dims, n_classes, per_class, noise=0.05, seed=0):
    """Stack of noisy copies of per-class prototype slices, samples last.

    Each class gets a uniform-random nonnegative prototype; every sample
    is that prototype plus uniform noise of amplitude ``noise``, so
    classes stay well separated when ``noise`` is small.  Samples are
    grouped contiguously by class (class 0 first), which keeps per-class
    prefix splits trivial.

    Returns ``(tensor, labels)`` with tensor shape ``(*slice_dims,
    n_classes * per_class)``.
    """
    slice_dims = tuple(int(s) for s in slice_dims)
    if n_classes < 1 or per_class < 1:
        raise ValueError("need at least one class and one sample per class")
    rng = np.random.default_rng(seed)
    prototypes = rng.random((n_classes,) + slice_dims)
    n = n_classes * per_class
    x = np.empty(slice_dims + (n,))
    labels = np.empty(n, dtype=np.int64)
    for c in range(n_classes):
        for s in range(per_class):
            idx = c * per_class + s
            x[..., idx] = prototypes[c] + noise * rng.random(slice_dims)
            labels[idx] = c
    return x, labels
