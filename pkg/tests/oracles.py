"""Reference computations that share no code with the package under test."""

import itertools
import math

import numpy as np
import scipy.linalg


def naive_matmul(h, a):
    rows, inner = len(h), len(h[0])
    cols = len(a[0])
    out = [[0j] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            s = 0j
            for k in range(inner):
                s += complex(h[i][k]) * complex(a[k][j])
            out[i][j] = s
    return np.array(out)


def scipy_principal_pair(c, b):
    """Largest generalized eigenpair via LAPACK's Hermitian-definite driver."""
    w, v = scipy.linalg.eigh(c, b)
    x = v[:, -1]
    return w[-1], x / np.linalg.norm(x)


def slnr_by_definition(channels, a, d, node, sigma2):
    """Signal over noise plus leakage, written out term by term."""
    beam = a @ d
    num = np.linalg.norm(channels[node] @ beam) ** 2
    leak = sum(np.linalg.norm(h @ beam) ** 2 for k, h in enumerate(channels) if k != node)
    return num / (channels[node].shape[0] * sigma2 + leak)


def sinr_by_definition(channels, a, ds, sigma2):
    out = []
    for l, h in enumerate(channels):
        sig = np.linalg.norm(h @ a @ ds[l]) ** 2
        intf = sum(np.linalg.norm(h @ a @ ds[k]) ** 2 for k in range(len(ds)) if k != l)
        out.append(sig / (h.shape[0] * sigma2 + intf))
    return np.array(out)


def brute_force_best(score, n_entries, alphabet):
    """Enumerate every assignment of ``alphabet`` values to ``n_entries`` slots."""
    best, arg = -math.inf, None
    for combo in itertools.product(alphabet, repeat=n_entries):
        s = score(np.array(combo))
        if s > best:
            best, arg = s, combo
    return best, arg


def one_bit_matrix(rng, n_tx, n_rf):
    return rng.choice([-1.0, 1.0], size=(n_tx, n_rf)).astype(complex)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
