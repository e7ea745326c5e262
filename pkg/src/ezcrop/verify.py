"""Randomized equivalence check between the frequency-domain convolution
and its spatial shift-and-add reference.

Each trial draws a random channel/kernel-size configuration, random input
and kernel values, and compares the two routes entry by entry. The whole
run is deterministic for a fixed seed, including the report text.
"""

from dataclasses import dataclass

import numpy as np

from .spectral import circular_conv_direct, spectral_conv

DEFAULT_TOLERANCE = 1e-6
KERNEL_SIZES = (1, 3, 5)
CHANNEL_RANGE = (1, 4)
DIM_RANGE = (4, 32)


@dataclass
class VerifyResult:
    trials: int
    seed: int
    tolerance: float
    max_error: float
    worst_config: tuple[int, int, int, int, int]  # S, T, D, H, W
    passed: bool


def run_verification(seed, trials, tolerance=DEFAULT_TOLERANCE):
    """Run ``trials`` random spectral-vs-spatial comparisons.

    Configurations sample S, T in [1, 4], D in {1, 3, 5} subject to
    D <= min(H, W), and H, W in [4, 32].
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    max_error = 0.0
    worst = None
    for _ in range(trials):
        height = int(rng.integers(DIM_RANGE[0], DIM_RANGE[1] + 1))
        width = int(rng.integers(DIM_RANGE[0], DIM_RANGE[1] + 1))
        sizes = [d for d in KERNEL_SIZES if d <= min(height, width)]
        d = int(rng.choice(sizes))
        s = int(rng.integers(CHANNEL_RANGE[0], CHANNEL_RANGE[1] + 1))
        t = int(rng.integers(CHANNEL_RANGE[0], CHANNEL_RANGE[1] + 1))
        x = rng.standard_normal((s, height, width))
        kernel = rng.standard_normal((d, d, s, t))
        err = float(
            np.abs(spectral_conv(x, kernel) - circular_conv_direct(x, kernel)).max()
        )
        if err >= max_error:
            max_error = err
            worst = (s, t, d, height, width)
    return VerifyResult(
        trials=trials,
        seed=seed,
        tolerance=tolerance,
        max_error=max_error,
        worst_config=worst,
        passed=max_error <= tolerance,
    )


def format_report(result):
    s, t, d, height, width = result.worst_config
    status = "PASS" if result.passed else "FAIL"
    return (
        "spectral-vs-spatial convolution check\n"
        f"trials: {result.trials}\n"
        f"seed: {result.seed}\n"
        f"tolerance: {result.tolerance!r}\n"
        f"max_error: {result.max_error!r}\n"
        f"worst_config: S={s} T={t} D={d} H={height} W={width}\n"
        f"status: {status}\n"
    )
