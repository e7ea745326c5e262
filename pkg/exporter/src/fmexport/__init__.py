"""Feature-map exporter: forward hooks to binary tensor containers."""

from .container import MAGIC, MANIFEST_NAME, write_container, write_manifest
from .data import load_batch, write_sample_images
from .export import ExportSpec, export_feature_maps, select_layers
from .model import SmallVGG, load_model, save_initialized_checkpoint

__version__ = "0.1.0"

__all__ = [
    "ExportSpec",
    "MAGIC",
    "MANIFEST_NAME",
    "SmallVGG",
    "export_feature_maps",
    "load_batch",
    "load_model",
    "save_initialized_checkpoint",
    "select_layers",
    "write_container",
    "write_manifest",
    "write_sample_images",
]
