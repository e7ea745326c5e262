"""Keep/prune plans: turn channel rankings into per-layer keep lists,
compose plans across repeated pruning passes, and slice kernels.

A plan stores, per layer, the ORIGINAL 1-based channel indices to keep,
always sorted ascending so plans are canonical and diffable. The
importance ordering itself lives in LayerImportance, not here.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class PlanLayer:
    layer: str
    channels: int  # channel count of the model this plan indexes into
    keep: list[int]  # ascending, duplicate-free, subset of 1..channels


@dataclass
class PrunePlan:
    layers: list[PlanLayer] = field(default_factory=list)

    def by_id(self):
        return {entry.layer: entry for entry in self.layers}

    def layer_ids(self):
        return [entry.layer for entry in self.layers]


def _check_keep(keep, channels, layer=""):
    where = f" in layer {layer!r}" if layer else ""
    if len(keep) == 0:
        raise ValueError(f"keep list{where} is empty")
    if sorted(keep) != list(keep):
        raise ValueError(f"keep not ascending{where}")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate channel index{where}")
    if keep[0] < 1 or keep[-1] > channels:
        raise ValueError(f"index out of range{where}: valid range is 1..{channels}")


def make_plan(importance, keep_count):
    """Keep the top ``keep_count`` channels of a ranking, re-sorted ascending."""
    total = len(importance.order)
    if not 1 <= keep_count <= total:
        raise ValueError(
            f"keep count {keep_count} out of range 1..{total} for layer {importance.layer!r}"
        )
    keep = sorted(importance.order[:keep_count])
    return PlanLayer(layer=importance.layer, channels=total, keep=keep)


def compose_plans(first, second):
    """Compose two passes: the second plan indexes channels of the model the
    first plan already pruned, so composite keep = {first.keep[k] : k in
    second.keep} in original indices.

    Requires matching layer sets and, per layer, ``second.channels ==
    len(first.keep)``. Composition is associative.
    """
    second_by_id = second.by_id()
    if set(second_by_id) != set(first.layer_ids()):
        missing = set(first.layer_ids()) ^ set(second_by_id)
        raise ValueError(f"plans cover different layers: {sorted(missing)}")
    out = []
    for entry in first.layers:
        nxt = second_by_id[entry.layer]
        if nxt.channels != len(entry.keep):
            raise ValueError(
                f"pass mismatch in layer {entry.layer!r}: second plan indexes "
                f"{nxt.channels} channels but first pass kept {len(entry.keep)}"
            )
        keep = sorted(entry.keep[k - 1] for k in nxt.keep)
        out.append(PlanLayer(layer=entry.layer, channels=entry.channels, keep=keep))
    return PrunePlan(layers=out)


def apply_plan(kernel, in_keep, out_keep):
    """Slice a D x D x S x T kernel down to the kept input/output channels.

    Index lists are 1-based original channel indices. Returns a
    D x D x |in_keep| x |out_keep| copy; pairs with the param/FLOP counters
    below to report reduction figures for a pruned model.
    """
    kernel = np.asarray(kernel)
    if kernel.ndim != 4:
        raise ValueError(f"kernel must be D x D x S x T, got shape {kernel.shape}")
    _check_keep(list(in_keep), kernel.shape[2])
    _check_keep(list(out_keep), kernel.shape[3])
    in_idx = np.asarray(in_keep, dtype=np.intp) - 1
    out_idx = np.asarray(out_keep, dtype=np.intp) - 1
    return kernel[:, :, in_idx][:, :, :, out_idx]


def count_params(kernel):
    """Weight count of a kernel tensor."""
    return int(np.asarray(kernel).size)


def count_conv_flops(kernel, height, width):
    """Multiply-accumulates of one stride-1, size-preserving convolution."""
    d0, d1, s, t = np.asarray(kernel).shape
    return int(d0 * d1 * s * t * height * width)


def prune_kernel_chain(kernels, plan, order):
    """Apply a plan to a chain of layers, feeding each layer's keep list as
    the next layer's input selection.

    ``kernels`` maps layer id to its D x D x S x T tensor and ``order`` gives
    the chain sequence. When a layer's input count does not match the
    previous layer's kept channels (residual shortcuts, concatenations), a
    warning is emitted and that layer keeps all inputs — cross-layer
    coupling is deliberately not modeled.
    """
    by_id = plan.by_id()
    pruned = {}
    prev_keep = None
    prev_channels = None
    for layer in order:
        kernel = np.asarray(kernels[layer])
        entry = by_id[layer]
        if kernel.shape[3] != entry.channels:
            raise ValueError(
                f"plan for layer {layer!r} indexes {entry.channels} output "
                f"channels but kernel has {kernel.shape[3]}"
            )
        s = kernel.shape[2]
        if prev_keep is not None and s == prev_channels:
            in_keep = prev_keep
        else:
            if prev_keep is not None:
                warnings.warn(
                    f"layer {layer!r} input count {s} does not line up with the "
                    f"previous layer's {prev_channels} channels; keeping all inputs",
                    stacklevel=2,
                )
            in_keep = list(range(1, s + 1))
        pruned[layer] = apply_plan(kernel, in_keep, entry.keep)
        prev_keep = entry.keep
        prev_channels = entry.channels
    return pruned
