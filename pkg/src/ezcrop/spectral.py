"""2D spectral primitives: FFT, center shifting, torus kernel expansion, and
frequency-domain convolution.

Conventions used throughout:

* forward transform is unnormalized, the inverse carries the 1/(H*W) factor
  (numpy's default);
* convolution is circular ("torus" boundary), stride 1, output size equals
  input size;
* ``spectral_conv`` computes TRUE circular convolution with the kernel
  anchored at its center tap. Deep-learning layers usually compute
  cross-correlation instead; feed a point-reflected kernel
  (``k[::-1, ::-1]``) to get that behavior.

All functions are pure and never mutate their inputs.
"""

import numpy as np

from .errors import NumericError

# per-entry bound on the imaginary part left over after the inverse transform
IMAG_RESIDUAL_TOL = 1e-8


def _check_matrix(m, name, allow_complex=False):
    m = np.asarray(m)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not allow_complex and np.iscomplexobj(m):
        raise ValueError(f"{name} must be real-valued")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def fft2(m):
    """Unnormalized forward 2D DFT of a real matrix.

    Output has the input's dimensions; entry [0, 0] is the DC bin. The
    result of a real input satisfies conjugate symmetry
    ``F[u, v] == conj(F[(H-u) % H, (W-v) % W])``.
    """
    m = _check_matrix(m, "input")
    return np.fft.fft2(m.astype(np.float64, copy=False))


def ifft2(f):
    """Inverse 2D DFT scaled by 1/(H*W); exact inverse of :func:`fft2`."""
    f = np.asarray(f)
    if f.ndim != 2 or f.size == 0:
        raise ValueError(f"input must be a non-empty 2-D matrix, got shape {f.shape}")
    return np.fft.ifft2(f)


def fftshift(m):
    """Circularly shift a matrix by (H//2, W//2) so the DC bin lands at the
    spectrum center.

    A bijective permutation of the entries: multiset of values, sums, and
    matrix rank are all preserved.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"input must be 2-D, got shape {m.shape}")
    return np.fft.fftshift(m)


def energy_map(m):
    """Spectral magnitude map of a real matrix with the DC bin centered.

    Returns ``abs(fftshift(fft2(m)))``: a non-negative matrix of the input's
    dimensions whose center entry is the magnitude of the mean component.
    Invariant under negating (or scaling the sign of) the input.
    """
    return np.abs(fftshift(fft2(m)))


def _check_kernel(kernel):
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 4:
        raise ValueError(f"kernel must be D x D x S x T, got shape {kernel.shape}")
    d0, d1, s, t = kernel.shape
    if d0 != d1:
        raise ValueError(f"kernel taps must be square, got {d0} x {d1}")
    if d0 % 2 == 0:
        raise ValueError(f"even kernel size {d0} not supported: the center tap is ambiguous")
    if s < 1 or t < 1:
        raise ValueError("kernel needs at least one input and one output channel")
    if not np.all(np.isfinite(kernel)):
        raise ValueError("kernel contains non-finite entries")
    return kernel


def expand_kernel(kernel, height, width):
    """Embed each D x D kernel slice onto the H x W torus.

    Tap (u, v) lands at ``((u - c) % H, (v - c) % W)`` with ``c = D // 2``,
    so the center tap sits at the origin and circular convolution with the
    expanded slice reproduces center-anchored spatial convolution. Each
    expanded slice holds exactly the D*D original taps (same slice sums).

    Rejects even D and D > min(H, W).
    """
    kernel = _check_kernel(kernel)
    d = kernel.shape[0]
    if d > min(height, width):
        raise ValueError(
            f"kernel size {d} exceeds target dims {height} x {width}"
        )
    c = d // 2
    rows = (np.arange(d) - c) % height
    cols = (np.arange(d) - c) % width
    out = np.zeros((height, width) + kernel.shape[2:], dtype=kernel.dtype)
    out[np.ix_(rows, cols)] = kernel
    return out


def spectral_conv(x, kernel):
    """Circular convolution of an S x H x W input with a D x D x S x T kernel,
    computed in the frequency domain.

    Output channel j is ``sum_i ifft2(fft2(khat[:, :, i, j]) * fft2(x[i]))``
    where ``khat`` is the torus-expanded kernel. The imaginary parts of the
    inverse transform must all be below ``IMAG_RESIDUAL_TOL`` (they are
    numerical residue for real inputs) and are discarded after the check.

    Raises:
        ValueError: channel-count mismatch or invalid kernel geometry.
        NumericError: excessive imaginary residual, which signals a broken
            transform or kernel embedding.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"input must be S x H x W, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite entries")
    kernel = _check_kernel(kernel)
    s_in, height, width = x.shape
    if kernel.shape[2] != s_in:
        raise ValueError(
            f"kernel expects {kernel.shape[2]} input channels, input has {s_in}"
        )
    khat = expand_kernel(kernel, height, width)
    kf = np.fft.fft2(khat, axes=(0, 1))
    xf = np.fft.fft2(x, axes=(1, 2))
    yf = np.einsum("hwst,shw->thw", kf, xf)
    y = np.fft.ifft2(yf, axes=(1, 2))
    residual = float(np.abs(y.imag).max())
    if residual > IMAG_RESIDUAL_TOL:
        raise NumericError(
            f"imaginary residual {residual:.3e} exceeds {IMAG_RESIDUAL_TOL:.1e}"
        )
    return y.real


def circular_conv_direct(x, kernel):
    """Spatial-domain reference for :func:`spectral_conv`.

    Shift-and-add over kernel taps: tap (u, v) contributes
    ``k[u, v, i, j] * roll(x[i], (u - c, v - c))`` to output channel j.
    Intentionally avoids any transform so the two routes stay independent.
    """
    x = np.asarray(x, dtype=np.float64)
    kernel = _check_kernel(kernel)
    if x.ndim != 3 or kernel.shape[2] != x.shape[0]:
        raise ValueError("input/kernel channel mismatch")
    d = kernel.shape[0]
    t = kernel.shape[3]
    if d > min(x.shape[1], x.shape[2]):
        raise ValueError(f"kernel size {d} exceeds input dims")
    c = d // 2
    out = np.zeros((t,) + x.shape[1:], dtype=np.float64)
    for u in range(d):
        for v in range(d):
            rolled = np.roll(x, (u - c, v - c), axis=(1, 2))
            out += np.einsum("st,shw->thw", kernel[u, v], rolled)
    return out
