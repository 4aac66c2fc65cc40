"""Independent O(m^2) re-implementation of the blocks estimator, used as the
bit-for-bit oracle: norms recomputed one block at a time, the threshold found
by repeated max extraction, functional values summed in block order."""

import numpy as np

from lpblocks.blocks import lp_modulus
from lpblocks.estimators import ClusterFunctional


def naive_estimate(values, f: ClusterFunctional, p, k, b):
    values = np.asarray(values, dtype=float)
    m = len(values) // b
    blocks = [values[i * b : (i + 1) * b] for i in range(m)]
    norms = [lp_modulus(blk, p) for blk in blocks]

    pool = list(norms)
    threshold = None
    for _ in range(k + 1):
        threshold = max(pool)
        pool.remove(threshold)

    s1 = 0.0
    s2 = 0.0
    for t in range(m):
        if norms[t] > threshold:
            v = f.value(blocks[t] if f.scale_invariant else blocks[t] / threshold)
            s1 += v
            s2 += v * v
    estimate = s1 / k
    variance = max(s2 / k - estimate * estimate, 0.0)
    return estimate, variance, threshold


def random_instance(seed):
    """A random small estimation problem (n <= 200) for the equivalence check."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(20, 201))
    b = int(rng.integers(1, n // 2 + 1))
    m = n // b
    k = int(rng.integers(1, m))
    alpha = float(rng.choice([0.6, 1.0, 1.7]))
    p = rng.choice([0.5, 1.0, alpha, 2.0, np.inf])
    values = rng.pareto(1.0, n) * np.where(rng.random(n) < 0.5, -1.0, 1.0)
    values[rng.random(n) < 0.1] = 0.0
    values[int(rng.integers(0, n))] = 50.0  # never all-zero
    kind = rng.choice(["extremal-index", "sum-index", "cluster-size", "constant-one"])
    j = int(rng.integers(1, min(3, b) + 1)) if kind == "cluster-size" else None
    f = ClusterFunctional(kind, alpha=alpha, j=j)
    return values, f, float(p), k, b
