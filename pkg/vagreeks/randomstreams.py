"""Keyed counter-based random streams.

Every stream is a Philox generator seeded from (seed, purpose, index...), so a
draw depends only on its key and position, never on how work is split between
blocks or workers.

"""

import numpy as np

# Stream purposes
FACTOR = 0  # Variance and rate drivers Z1, Z2 for one outer path
EQUITY = 1  # Equity driver Z3 for all inner paths of one outer path
ORACLE = 2  # Black-Scholes oracle draws


def stream(seed, *key):
    """Create the generator for a key.

    Args:
        seed(int): Run seed
        *key(int): Purpose followed by any indices, e.g. (EQUITY, outer_idx)

    Returns:
        numpy.random.Generator: Philox-backed generator

    """
    sequence = np.random.SeedSequence(int(seed),
                                      spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def factor_draws(seed, outer_indices, n_steps):
    """Draw Z1 and Z2 for each outer path.

    Args:
        seed(int): Run seed
        outer_indices(iterable(int)): Global outer path indices
        n_steps(int): Number of time steps

    Returns:
        tuple(numpy.ndarray): Z1 and Z2, each shaped (n_outer, n_steps)

    """
    draws = np.stack([stream(seed, FACTOR, idx).standard_normal((2, n_steps))
                      for idx in outer_indices])
    return draws[:, 0, :], draws[:, 1, :]


def equity_draws(seed, outer_indices, n_inner, n_steps):
    """Draw Z3 for each inner path of each outer path.

    Row j of an outer path's stream belongs to inner path j, so adding inner
    paths leaves the existing ones unchanged.

    Returns:
        numpy.ndarray: Z3 shaped (n_outer, n_inner, n_steps)

    """
    return np.stack([
        stream(seed, EQUITY, idx).standard_normal((n_inner, n_steps))
        for idx in outer_indices])
