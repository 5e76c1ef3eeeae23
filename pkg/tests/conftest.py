import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)


def random_pure_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_product_state(rng):
    """Haar-ish random product of four single-qubit states."""
    out = np.array([1.0 + 0.0j])
    for _ in range(4):
        out = np.kron(out, random_pure_state(rng, 2))
    return out


BIPARTITIONS = [s for r in (1, 2) for s in itertools.combinations(range(4), r)]


def random_biseparable_pure(rng, subset=None):
    """Random pure state factorizing across one bipartition of the four qubits."""
    if subset is None:
        subset = BIPARTITIONS[rng.integers(len(BIPARTITIONS))]
    r = len(subset)
    a = random_pure_state(rng, 2**r)
    b = random_pure_state(rng, 2 ** (4 - r))
    perm = list(subset) + [q for q in range(4) if q not in subset]
    inverse = np.argsort(perm)
    return np.kron(a, b).reshape([2] * 4).transpose(inverse).reshape(16)


def qubit_permutation_operator(perm):
    """16x16 permutation matrix sending qubit k to position perm[k]."""
    op = np.zeros((16, 16))
    for idx in range(16):
        bits = [(idx >> (3 - k)) & 1 for k in range(4)]
        permuted = [0] * 4
        for k, bit in enumerate(bits):
            permuted[perm[k]] = bit
        new = sum(bit << (3 - k) for k, bit in enumerate(permuted))
        op[new, idx] = 1.0
    return op
