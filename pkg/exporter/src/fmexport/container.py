"""Binary tensor container and manifest emission.

The container is little-endian throughout: 4-byte magic "EZT1", u32 ndim
(1 to 4), u32 per dim, then the payload as IEEE-754 binary32 in row-major
order. File length is exactly ``8 + 4*ndim + 4*prod(dims)``. The manifest
is a JSON document listing layer id, container file name, dims, and the
source the dump came from.
"""

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"EZT1"
MANIFEST_NAME = "manifest.json"


def write_container(path, data):
    """Serialize an array of 1 to 4 dims; payload is cast to float32."""
    data = np.asarray(data)
    if not 1 <= data.ndim <= 4:
        raise ValueError(f"container holds 1 to 4 dims, got {data.ndim}")
    if 0 in data.shape:
        raise ValueError(f"dims must be positive, got {data.shape}")
    payload = np.ascontiguousarray(data, dtype="<f4")
    if not np.all(np.isfinite(payload)):
        raise ValueError("payload contains non-finite values")
    blob = MAGIC + struct.pack("<I", data.ndim)
    blob += struct.pack(f"<{data.ndim}I", *data.shape)
    Path(path).write_bytes(blob + payload.tobytes())


def write_manifest(path, entries):
    """Write manifest entries, each {layer, file, dims, source}."""
    doc = {
        "layers": [
            {
                "layer": e["layer"],
                "file": e["file"],
                "dims": [int(d) for d in e["dims"]],
                "source": e["source"],
            }
            for e in entries
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
