"""Forward-hook export: run one batch through a checkpoint and dump each
selected layer's post-activation feature map as a tensor container."""

import fnmatch
from dataclasses import dataclass
from pathlib import Path

import torch

from .container import MANIFEST_NAME, write_container, write_manifest
from .data import load_batch
from .model import load_model


@dataclass
class ExportSpec:
    model_path: str
    data_dir: str
    batch: int
    layer_pattern: str
    out_dir: str


def select_layers(model, pattern):
    """Hookable child modules whose names match the glob pattern."""
    names = [name for name, _ in model.named_children()
             if fnmatch.fnmatch(name, pattern)]
    if not names:
        available = ", ".join(name for name, _ in model.named_children())
        raise ValueError(
            f"layer pattern {pattern!r} matches nothing; model has: {available}"
        )
    return names


def export_feature_maps(spec):
    """Run one forward pass and write containers plus the manifest.

    Returns the manifest entries. Every container holds the exact forward
    values cast to float32, dims B x T x H x W taken from the hooked
    tensor itself.
    """
    if spec.batch < 1:
        raise ValueError(f"batch must be >= 1, got {spec.batch}")
    model = load_model(spec.model_path)
    layer_names = select_layers(model, spec.layer_pattern)
    inputs = load_batch(spec.data_dir, spec.batch)
    captured = {}
    handles = []
    try:
        for name in layer_names:
            module = getattr(model, name)

            def hook(_module, _inputs, output, name=name):
                captured[name] = output.detach()

            handles.append(module.register_forward_hook(hook))
        with torch.no_grad():
            model(inputs)
    finally:
        for handle in handles:
            handle.remove()
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    source = Path(spec.model_path).name
    entries = []
    for name in layer_names:
        fm = captured[name]
        if fm.ndim != 4 or fm.shape[0] != spec.batch:
            raise ValueError(
                f"layer {name!r} produced shape {tuple(fm.shape)}, "
                f"expected {spec.batch} x T x H x W"
            )
        file_name = f"{name}.ezt"
        write_container(out / file_name, fm.numpy())
        entries.append({
            "layer": name,
            "file": file_name,
            "dims": list(fm.shape),
            "source": source,
        })
    write_manifest(out / MANIFEST_NAME, entries)
    return entries
