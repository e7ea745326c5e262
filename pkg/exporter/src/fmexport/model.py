"""A small VGG-style CIFAR classifier used as the export target.

Three conv blocks (conv -> batch norm -> ReLU) with 2x pooling between
them, so the first block emits 64 channels at the full 32x32 input
resolution. Checkpoints carry an architecture tag so loading fails loudly
on the wrong file rather than with a shape error mid-forward.
"""

import torch
from torch import nn

ARCH_TAG = "small-vgg-cifar"


class ConvBlock(nn.Sequential):
    """Conv2d + BatchNorm2d + ReLU; hooking the block yields the
    post-activation feature map of its convolution."""

    def __init__(self, cin, cout):
        super().__init__(
            nn.Conv2d(cin, cout, kernel_size=3, padding=1, bias=False),
            nn.BatchNorm2d(cout),
            nn.ReLU(),
        )


class SmallVGG(nn.Module):
    def __init__(self, num_classes=10):
        super().__init__()
        self.conv1 = ConvBlock(3, 64)
        self.conv2 = ConvBlock(64, 128)
        self.conv3 = ConvBlock(128, 256)
        self.pool = nn.MaxPool2d(2)
        self.head = nn.Linear(256 * 4 * 4, num_classes)

    def forward(self, x):
        x = self.pool(self.conv1(x))
        x = self.pool(self.conv2(x))
        x = self.pool(self.conv3(x))
        return self.head(torch.flatten(x, 1))


def save_initialized_checkpoint(path, seed=0, num_classes=10):
    """Write a deterministic, freshly initialized checkpoint."""
    torch.manual_seed(seed)
    model = SmallVGG(num_classes=num_classes)
    torch.save(
        {"arch": ARCH_TAG, "num_classes": num_classes,
         "state_dict": model.state_dict()},
        path,
    )


def load_model(path):
    """Load a checkpoint saved by this package; returns the model in eval mode."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise ValueError(f"{path}: not a loadable checkpoint: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("arch") != ARCH_TAG:
        raise ValueError(f"{path}: checkpoint is not a {ARCH_TAG!r} model")
    model = SmallVGG(num_classes=int(payload.get("num_classes", 10)))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
