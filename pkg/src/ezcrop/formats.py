"""File formats: binary tensor containers, layer manifests, and the JSON
documents for scores, plans, and keep specs.

Tensor container byte layout (fixed little-endian, magic-versioned):

    offset  size          content
    0       4             magic "EZT1"
    4       4             ndim, unsigned 32-bit LE, 1 <= ndim <= 4
    8       4 * ndim      dims, unsigned 32-bit LE each, all >= 1
    ...     4 * prod(dim) payload, IEEE-754 binary32 LE, row-major

File length must equal ``8 + 4*ndim + 4*prod(dims)`` and every payload
float must be finite. Payloads are single precision on disk; computation
upcasts to double after load.

The JSON documents are canonical: field order is fixed, unknown fields are
rejected, floats use shortest round-trip decimal form, and re-serializing a
parsed document reproduces the file byte for byte.
"""

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .importance import METRICS, LayerImportance
from .pruner import PlanLayer, PrunePlan

MAGIC = b"EZT1"
MANIFEST_NAME = "manifest.json"


# ---------------------------------------------------------------------------
# binary tensor container

def write_tensor(path, data):
    """Write an array (1 to 4 dims) as a tensor container file."""
    data = np.asarray(data)
    if not 1 <= data.ndim <= 4:
        raise FormatError(f"ndim out of range: {data.ndim} not in [1, 4]")
    if 0 in data.shape:
        raise FormatError(f"dims must be positive, got {data.shape}")
    if not np.all(np.isfinite(data)):
        raise FormatError("non-finite value in payload")
    with np.errstate(over="ignore"):
        payload = np.ascontiguousarray(data, dtype="<f4")
    if not np.all(np.isfinite(payload)):
        raise FormatError("payload overflows 32-bit float range")
    header = MAGIC + struct.pack("<I", data.ndim)
    header += struct.pack(f"<{data.ndim}I", *data.shape)
    Path(path).write_bytes(header + payload.tobytes())


def read_tensor(path):
    """Read a tensor container; returns a float32 array, bit-exact with the file.

    Bad magic, out-of-range ndim, a length mismatch, and non-finite payload
    values are reported as distinct errors.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise FormatError(f"bad magic in {path}")
    ndim = struct.unpack_from("<I", raw, 4)[0]
    if not 1 <= ndim <= 4:
        raise FormatError(f"ndim out of range in {path}: {ndim}")
    if len(raw) < 8 + 4 * ndim:
        raise FormatError(f"length mismatch in {path}: truncated header")
    dims = struct.unpack_from(f"<{ndim}I", raw, 8)
    if any(d == 0 for d in dims):
        raise FormatError(f"dims must be positive in {path}: {dims}")
    count = math.prod(dims)
    expected = 8 + 4 * ndim + 4 * count
    if len(raw) != expected:
        raise FormatError(
            f"length mismatch in {path}: {len(raw)} bytes, expected {expected}"
        )
    data = np.frombuffer(raw, dtype="<f4", count=count, offset=8 + 4 * ndim)
    if not np.all(np.isfinite(data)):
        raise FormatError(f"non-finite value in payload of {path}")
    return data.reshape(dims).copy()


# ---------------------------------------------------------------------------
# JSON plumbing

def _dump_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc


def _require(obj, fields, path):
    """Exact-key check: every field present, nothing extra."""
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected an object")
    missing = [f for f in fields if f not in obj]
    if missing:
        raise FormatError(f"{path}: missing field {missing[0]!r}")
    unknown = [f for f in obj if f not in fields]
    if unknown:
        raise FormatError(f"{path}: unknown field {unknown[0]!r}")


def _expect_str(value, path):
    if not isinstance(value, str) or not value:
        raise FormatError(f"{path}: expected a non-empty string")
    return value


def _expect_int(value, path, minimum=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise FormatError(f"{path}: expected an integer")
    if minimum is not None and value < minimum:
        raise FormatError(f"{path}: must be >= {minimum}")
    return value


def _expect_layer_list(doc, path):
    _require(doc, ["layers"], path)
    layers = doc["layers"]
    if not isinstance(layers, list) or not layers:
        raise FormatError(f"{path}.layers: expected a non-empty array")
    return layers


# ---------------------------------------------------------------------------
# layer manifest

@dataclass
class ManifestEntry:
    layer: str
    file: str
    dims: tuple[int, int, int, int]  # B, T, H, W
    source: str


def write_manifest(path, entries):
    doc = {
        "layers": [
            {
                "layer": e.layer,
                "file": e.file,
                "dims": list(e.dims),
                "source": e.source,
            }
            for e in entries
        ]
    }
    _dump_json(path, doc)


def read_manifest(path):
    doc = _load_json(path)
    entries = []
    for i, item in enumerate(_expect_layer_list(doc, str(path))):
        where = f"{path}.layers[{i}]"
        _require(item, ["layer", "file", "dims", "source"], where)
        dims = item["dims"]
        if (
            not isinstance(dims, list)
            or len(dims) != 4
            or any(not isinstance(d, int) or isinstance(d, bool) or d < 1 for d in dims)
        ):
            raise FormatError(f"{where}.dims: expected four positive integers")
        entries.append(
            ManifestEntry(
                layer=_expect_str(item["layer"], f"{where}.layer"),
                file=_expect_str(item["file"], f"{where}.file"),
                dims=tuple(dims),
                source=_expect_str(item["source"], f"{where}.source"),
            )
        )
    ids = [e.layer for e in entries]
    if len(set(ids)) != len(ids):
        raise FormatError(f"{path}: duplicate layer id")
    return entries


def load_feature_maps(dump_dir, entry):
    """Load one manifest entry's container as float64, checking header
    dims against the manifest."""
    path = Path(dump_dir) / entry.file
    if not path.exists():
        raise FormatError(f"{path}: referenced by manifest but missing")
    data = read_tensor(path)
    if data.ndim != 4 or data.shape != entry.dims:
        raise FormatError(
            f"{path}: container dims {data.shape} do not match manifest {entry.dims}"
        )
    return data.astype(np.float64)


# ---------------------------------------------------------------------------
# scores documents

def _importance_to_doc(imp):
    return {
        "layer": imp.layer,
        "metric": imp.metric,
        "beta": imp.beta,
        "batch": imp.batch,
        "scores": [float(s) for s in imp.scores],
        "order": [int(i) for i in imp.order],
    }


def _validate_importance(imp, where):
    if imp.metric not in METRICS:
        raise FormatError(f"{where}.metric: {imp.metric!r} not one of {METRICS}")
    if imp.beta is not None and not 0.0 < imp.beta < 1.0:
        raise FormatError(f"{where}.beta: must be in (0, 1) or null")
    total = len(imp.scores)
    if total == 0:
        raise FormatError(f"{where}.scores: empty")
    if not all(math.isfinite(s) for s in imp.scores):
        raise FormatError(f"{where}.scores: non-finite score")
    if imp.metric == "energy" and not all(0.0 <= s <= 1.0 for s in imp.scores):
        raise FormatError(f"{where}.scores: energy scores must lie in [0, 1]")
    if sorted(imp.order) != list(range(1, total + 1)):
        raise FormatError(f"{where}.order: not a permutation of 1..{total}")
    ranked = [imp.scores[i - 1] for i in imp.order]
    if any(a < b for a, b in zip(ranked, ranked[1:])):
        raise FormatError(f"{where}.order: scores not descending along the ranking")


def write_scores(path, importances):
    for i, imp in enumerate(importances):
        _validate_importance(imp, f"{path}.layers[{i}]")
    _dump_json(path, {"layers": [_importance_to_doc(i) for i in importances]})


def read_scores(path):
    doc = _load_json(path)
    out = []
    for i, item in enumerate(_expect_layer_list(doc, str(path))):
        where = f"{path}.layers[{i}]"
        _require(item, ["layer", "metric", "beta", "batch", "scores", "order"], where)
        beta = item["beta"]
        if beta is not None and not isinstance(beta, (int, float)):
            raise FormatError(f"{where}.beta: expected a number or null")
        scores = item["scores"]
        order = item["order"]
        if not isinstance(scores, list) or not all(
            isinstance(s, (int, float)) and not isinstance(s, bool) for s in scores
        ):
            raise FormatError(f"{where}.scores: expected an array of numbers")
        if not isinstance(order, list) or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in order
        ):
            raise FormatError(f"{where}.order: expected an array of integers")
        imp = LayerImportance(
            layer=_expect_str(item["layer"], f"{where}.layer"),
            metric=_expect_str(item["metric"], f"{where}.metric"),
            beta=None if beta is None else float(beta),
            batch=_expect_int(item["batch"], f"{where}.batch", minimum=1),
            scores=[float(s) for s in scores],
            order=list(order),
        )
        _validate_importance(imp, where)
        out.append(imp)
    return out


# ---------------------------------------------------------------------------
# plan documents

def _validate_plan_layer(entry, where):
    if entry.channels < 1:
        raise FormatError(f"{where}.channels: must be >= 1")
    keep = entry.keep
    if not keep:
        raise FormatError(f"{where}.keep: empty")
    if any(k < 1 or k > entry.channels for k in keep):
        raise FormatError(f"{where}.keep: index out of range")
    if len(set(keep)) != len(keep):
        raise FormatError(f"{where}.keep: duplicate index")
    if sorted(keep) != list(keep):
        raise FormatError(f"{where}.keep: keep not ascending")


def write_plan(path, plan):
    for i, entry in enumerate(plan.layers):
        _validate_plan_layer(entry, f"{path}.layers[{i}]")
    doc = {
        "layers": [
            {"layer": e.layer, "channels": e.channels, "keep": list(e.keep)}
            for e in plan.layers
        ]
    }
    _dump_json(path, doc)


def read_plan(path):
    doc = _load_json(path)
    layers = []
    for i, item in enumerate(_expect_layer_list(doc, str(path))):
        where = f"{path}.layers[{i}]"
        _require(item, ["layer", "channels", "keep"], where)
        keep = item["keep"]
        if not isinstance(keep, list) or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in keep
        ):
            raise FormatError(f"{where}.keep: expected an array of integers")
        entry = PlanLayer(
            layer=_expect_str(item["layer"], f"{where}.layer"),
            channels=_expect_int(item["channels"], f"{where}.channels", minimum=1),
            keep=list(keep),
        )
        _validate_plan_layer(entry, where)
        layers.append(entry)
    ids = [e.layer for e in layers]
    if len(set(ids)) != len(ids):
        raise FormatError(f"{path}: duplicate layer id")
    return PrunePlan(layers=layers)


# ---------------------------------------------------------------------------
# keep-spec documents (input to the plan command)

def read_keep_spec(path):
    """Per-layer keep amounts: each entry names a layer and exactly one of
    ``ratio`` (in (0, 1]) or ``count`` (positive integer).

    Returns {layer id: ("ratio", value) | ("count", value)}.
    """
    doc = _load_json(path)
    spec = {}
    for i, item in enumerate(_expect_layer_list(doc, str(path))):
        where = f"{path}.layers[{i}]"
        if not isinstance(item, dict):
            raise FormatError(f"{where}: expected an object")
        unknown = [f for f in item if f not in ("layer", "ratio", "count")]
        if unknown:
            raise FormatError(f"{where}: unknown field {unknown[0]!r}")
        layer = _expect_str(item.get("layer"), f"{where}.layer")
        if layer in spec:
            raise FormatError(f"{where}: duplicate layer id {layer!r}")
        has_ratio = "ratio" in item
        has_count = "count" in item
        if has_ratio == has_count:
            raise FormatError(f"{where}: give exactly one of 'ratio' or 'count'")
        if has_ratio:
            ratio = item["ratio"]
            if not isinstance(ratio, (int, float)) or isinstance(ratio, bool):
                raise FormatError(f"{where}.ratio: expected a number")
            if not 0.0 < ratio <= 1.0:
                raise FormatError(f"{where}.ratio: must lie in (0, 1]")
            spec[layer] = ("ratio", float(ratio))
        else:
            spec[layer] = ("count", _expect_int(item["count"], f"{where}.count", minimum=1))
    return spec
