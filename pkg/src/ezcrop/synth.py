"""Synthetic feature-map batches with controlled numerical rank.

A channel of rank r is built as a sum of r rank-one outer products
``amp * outer(u_k, v_k)`` where the u_k (and v_k) walk a frequency-ordered
list of cosine modes: constant first, then cosine/sine pairs of rising
frequency. Phases and amplitudes are random per slice. A fixed non-integer
frequency offset gives every mode a little spectral leakage, so low-rank
channels concentrate near DC without collapsing to identical scores.

Used by the verification tooling and tests to study how the rank and
energy metrics track each other without needing a trained network.
"""

import numpy as np

# keeps mode frequencies off the DFT grid; value is arbitrary but fixed
# so generated batches are stable across runs for a given seed
_FREQ_OFFSET = 0.37


def _mode_frequencies(n):
    """Frequencies of n independent 1-D modes in rising order: 0, 1, 1, 2, 2, ..."""
    freqs = [0.0]
    f = 1.0
    while len(freqs) < n:
        freqs.append(f)
        freqs.append(f)
        f += 1.0
    return freqs[:n]


def _mode(n, freq, phase):
    t = np.arange(n)
    return np.cos(2.0 * np.pi * (freq + _FREQ_OFFSET) * t / n + phase)


def ranked_channel(height, width, rank, batch, rng):
    """One channel's B x H x W slices, each of numerical rank ``rank``."""
    if not 1 <= rank <= min(height, width):
        raise ValueError(f"rank {rank} out of range 1..{min(height, width)}")
    row_freqs = _mode_frequencies(height)
    col_freqs = _mode_frequencies(width)
    out = np.zeros((batch, height, width))
    for b in range(batch):
        for k in range(rank):
            u = _mode(height, row_freqs[k], rng.uniform(0.0, 2.0 * np.pi))
            v = _mode(width, col_freqs[k], rng.uniform(0.0, 2.0 * np.pi))
            out[b] += rng.uniform(0.5, 1.5) * np.outer(u, v)
    return out


def ranked_layer(height, width, ranks, batch, seed):
    """B x T x H x W batch whose channel j has numerical rank ``ranks[j]``."""
    rng = np.random.default_rng(seed)
    channels = [ranked_channel(height, width, r, batch, rng) for r in ranks]
    return np.stack(channels, axis=1)
