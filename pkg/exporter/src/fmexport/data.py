"""Sample loading: a dataset directory holds one .npy file per image,
each a C x H x W float array. Files are consumed in sorted name order so
a batch is fully determined by the directory contents."""

from pathlib import Path

import numpy as np
import torch


def write_sample_images(data_dir, count, seed=0, shape=(3, 32, 32)):
    """Fill a directory with deterministic synthetic samples in [0, 1)."""
    out = Path(data_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        sample = rng.random(shape, dtype=np.float32)
        np.save(out / f"sample_{i:04d}.npy", sample)


def load_batch(data_dir, batch):
    """First ``batch`` samples of the directory as one float32 tensor."""
    root = Path(data_dir)
    if not root.is_dir():
        raise ValueError(f"{root}: not a directory")
    files = sorted(root.glob("*.npy"))
    if len(files) < batch:
        raise ValueError(
            f"{root}: need {batch} samples but found {len(files)} .npy files"
        )
    samples = []
    shape = None
    for path in files[:batch]:
        arr = np.load(path)
        if arr.ndim != 3:
            raise ValueError(f"{path}: expected a C x H x W array, got {arr.shape}")
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise ValueError(
                f"{path}: sample shape {arr.shape} differs from {shape}"
            )
        samples.append(arr.astype(np.float32, copy=False))
    return torch.from_numpy(np.stack(samples))
