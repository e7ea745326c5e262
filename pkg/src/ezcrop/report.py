"""Report emission: ranked score tables, metric-agreement statistics, and
portable-pixmap images (two-series comparison charts, spectral heatmaps).

Images use the binary PGM/PPM formats: trivially writable, deterministic,
and easy to assert on in tests — deliberately no plotting stack.
"""

import math
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import FormatError
from .importance import ZoneGeometry, zone_center
from .spectral import energy_map

CHART_WIDTH = 480
CHART_HEIGHT = 320
CHART_MARGIN = 16
SERIES_COLORS = ((220, 60, 50), (50, 90, 210), (40, 160, 90))


def write_pgm(path, image):
    """Binary (P5) grayscale pixmap from a 2-D uint8 array."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    if image.ndim != 2:
        raise ValueError(f"grayscale image must be 2-D, got shape {image.shape}")
    height, width = image.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (width, height) + image.tobytes())


def write_ppm(path, image):
    """Binary (P6) color pixmap from an H x W x 3 uint8 array."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"color image must be H x W x 3, got shape {image.shape}")
    height, width = image.shape[:2]
    Path(path).write_bytes(b"P6\n%d %d\n255\n" % (width, height) + image.tobytes())


def spearman_rho(a, b):
    """Spearman rank correlation between two score vectors.

    NaN when either vector is constant (the correlation is undefined
    there; full-rank feature maps give the rank metric a constant score
    vector, so this case is ordinary, not an error).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need two equal-length score vectors of size >= 2")
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        return float("nan")
    return float(stats.spearmanr(a, b).statistic)


def ranking_table(imp):
    """Fixed-width text table of one layer's ranking."""
    lines = [
        f"layer {imp.layer}  metric={imp.metric}  batch={imp.batch}"
        + (f"  beta={imp.beta!r}" if imp.beta is not None else ""),
        f"{'pos':>4}  {'channel':>7}  score",
    ]
    for pos, channel in enumerate(imp.order, start=1):
        lines.append(f"{pos:>4}  {channel:>7}  {imp.scores[channel - 1]!r}")
    return "\n".join(lines) + "\n"


def _group_by_layer(score_sets):
    """Index score documents by layer id, requiring identical layer sets."""
    layer_ids = [imp.layer for imp in score_sets[0]]
    for other in score_sets[1:]:
        if [imp.layer for imp in other] != layer_ids:
            raise FormatError(
                "scores files cover different layer sets: "
                f"{layer_ids} vs {[imp.layer for imp in other]}"
            )
    return layer_ids, [{imp.layer: imp for imp in s} for s in score_sets]


def comparison_chart(series):
    """Render named score series as polylines, each normalized to its own
    min/max so orderings are visually comparable across metrics.

    ``series`` maps name -> score list (equal lengths). Returns an
    H x W x 3 uint8 image on a white background with an axes border.
    """
    lengths = {len(v) for v in series.values()}
    if len(lengths) != 1:
        raise ValueError("all series must have the same length")
    count = lengths.pop()
    image = np.full((CHART_HEIGHT, CHART_WIDTH, 3), 255, dtype=np.uint8)
    left, right = CHART_MARGIN, CHART_WIDTH - CHART_MARGIN - 1
    top, bottom = CHART_MARGIN, CHART_HEIGHT - CHART_MARGIN - 1
    image[top, left : right + 1] = 0
    image[bottom, left : right + 1] = 0
    image[top : bottom + 1, left] = 0
    image[top : bottom + 1, right] = 0
    for (name, values), color in zip(sorted(series.items()), SERIES_COLORS):
        values = np.asarray(values, dtype=np.float64)
        span = values.max() - values.min()
        unit = (values - values.min()) / span if span > 0 else np.full_like(values, 0.5)
        xs = (
            np.round(np.linspace(left, right, count)).astype(int)
            if count > 1
            else np.array([(left + right) // 2])
        )
        ys = np.round(bottom - unit * (bottom - top)).astype(int)
        for i in range(count - 1):
            steps = max(abs(xs[i + 1] - xs[i]), abs(ys[i + 1] - ys[i])) + 1
            px = np.round(np.linspace(xs[i], xs[i + 1], steps)).astype(int)
            py = np.round(np.linspace(ys[i], ys[i + 1], steps)).astype(int)
            image[py, px] = color
        image[ys, xs] = color
    return image


def spectral_heatmap(channel_slices):
    """Batch-mean spectral magnitude of one channel as a uint8 grayscale image.

    Linear scale, normalized to the peak; an all-zero channel maps to black.
    The brightest pixel of a DC-dominated channel is the zone center.
    """
    arr = np.asarray(channel_slices, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected B x H x W slices, got shape {arr.shape}")
    mean_map = np.mean([energy_map(s) for s in arr], axis=0)
    peak = mean_map.max()
    if peak == 0.0:
        return np.zeros(mean_map.shape, dtype=np.uint8)
    return np.round(mean_map / peak * 255.0).astype(np.uint8)


def emit_report(score_sets, out_dir, heatmap_maps=None, heatmap_beta=None):
    """Write report.txt plus images under ``out_dir``.

    ``score_sets`` is a list of scores documents (each a list of
    LayerImportance). With two documents, a per-layer Spearman section and
    a comparison chart per layer are added. ``heatmap_maps``, when given,
    maps layer id -> B x T x H x W array and triggers one spectral heatmap
    per channel; ``heatmap_beta`` annotates the zone center/size used.

    Returns the list of files written (relative names).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layer_ids, by_layer = _group_by_layer(score_sets)
    written = []
    sections = []
    for layer in layer_ids:
        for scores in by_layer:
            sections.append(ranking_table(scores[layer]))
    if len(score_sets) == 2:
        corr_lines = ["metric agreement (Spearman rho per layer)"]
        for layer in layer_ids:
            first, second = by_layer[0][layer], by_layer[1][layer]
            rho = spearman_rho(first.scores, second.scores)
            shown = "undefined (constant scores)" if math.isnan(rho) else repr(rho)
            corr_lines.append(f"layer {layer}  {first.metric} vs {second.metric}: rho={shown}")
            chart = comparison_chart(
                {first.metric: first.scores, second.metric: second.scores}
            )
            chart_name = f"comparison_{layer}.ppm"
            write_ppm(out / chart_name, chart)
            written.append(chart_name)
        sections.append("\n".join(corr_lines) + "\n")
    if heatmap_maps is not None:
        for layer in layer_ids:
            fm = heatmap_maps[layer]
            height, width = fm.shape[2:]
            x, y = zone_center(height, width)
            note = f"layer {layer}: heatmap center at 1-based ({x}, {y})"
            if heatmap_beta is not None:
                geom = ZoneGeometry.for_shape(height, width, heatmap_beta)
                note += f", zone radius d={geom.d} at beta={heatmap_beta!r}"
            sections.append(note + "\n")
            for j in range(fm.shape[1]):
                name = f"heatmap_{layer}_c{j + 1}.pgm"
                write_pgm(out / name, spectral_heatmap(fm[:, j]))
                written.append(name)
    report_path = out / "report.txt"
    report_path.write_text("\n".join(sections), encoding="utf-8")
    written.insert(0, "report.txt")
    return written
