"""Space-time processing: Alamouti STBC, spatial multiplexing, MMSE detection.

Power convention: every mode radiates unit total power per channel use,
so two-antenna modes scale each antenna by 1/sqrt(2).  That makes the
SNR axis directly comparable between SISO, STBC and SM curves: the
diversity and multiplexing gains are genuine, not power artifacts.

The Alamouti code sends, for each symbol pair (s1, s2) on one
subcarrier over two consecutive OFDM symbol times,

    antenna 1: ( s1, -s2*) / sqrt(2)
    antenna 2: ( s2,  s1*) / sqrt(2)

and the receiver combines linearly across both receive antennas.  The
channel must be constant over the pair (guaranteed by the block-fading
model).  Spatial multiplexing transmits independent streams and the
receiver separates them per subcarrier with a linear MMSE filter.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "stbc_encode",
    "stbc_combine",
    "sm_encode",
    "mmse_detect",
    "mmse_bias_correct",
]

_SQRT2 = np.sqrt(2.0)


def stbc_encode(symbols: np.ndarray) -> np.ndarray:
    """Alamouti-encode a symbol sequence onto two antennas.

    Consecutive symbols form pairs.  Returns an array of shape
    ``(2, n)``: antenna streams over ``n`` channel uses, two uses per
    pair.  Per-pair transmit energy equals the pair's symbol energy.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.ndim != 1 or symbols.size % 2:
        raise ValueError("symbol count must be even for Alamouti pairing")
    s1 = symbols[0::2]
    s2 = symbols[1::2]
    out = np.empty((2, symbols.size), dtype=np.complex128)
    out[0, 0::2] = s1
    out[0, 1::2] = -np.conj(s2)
    out[1, 0::2] = s2
    out[1, 1::2] = np.conj(s1)
    return out / _SQRT2


def stbc_combine(
    y: np.ndarray, h: np.ndarray, noise_var: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Combine one Alamouti reception; vectorized over leading axes.

    Parameters
    ----------
    y : array (..., n_rx, 2)
        Received samples at the two symbol times, per receive antenna.
    h : array (..., n_rx, 2)
        Channel gains per (receive, transmit) antenna pair, constant
        over the two symbol times.
    noise_var : float
        Per-antenna complex noise variance.

    Returns
    -------
    estimates : array (..., 2)
        Symbol estimates, rescaled so a noiseless reception returns the
        transmitted pair exactly.
    effective_gain : array (...)
        Sum of |h|^2 over all (rx, tx) paths; 4-branch diversity gain.
    post_noise_var : array (...)
        Noise variance on each rescaled estimate, for the soft demapper.
        Zero effective gain (a deep fade on every path) yields zero
        estimates with infinite noise variance rather than an error.
    """
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if y.shape[-1] != 2 or h.shape[-1] != 2 or y.shape != h.shape:
        raise ValueError("y and h must both have shape (..., n_rx, 2)")
    y1 = y[..., 0]
    y2c = np.conj(y[..., 1])
    h1 = h[..., 0]
    h2 = h[..., 1]
    s1 = (np.conj(h1) * y1 + h2 * y2c).sum(axis=-1)
    s2 = (np.conj(h2) * y1 - h1 * y2c).sum(axis=-1)
    gain = (np.abs(h) ** 2).sum(axis=(-2, -1))
    faded = gain == 0
    safe = np.where(faded, 1.0, gain)
    estimates = np.stack([s1, s2], axis=-1) * (_SQRT2 / safe)[..., None]
    estimates[faded] = 0.0
    with np.errstate(divide="ignore"):
        post_noise_var = np.where(faded, np.inf, 2.0 * noise_var / safe)
    return estimates, gain, post_noise_var


def sm_encode(symbols: np.ndarray) -> np.ndarray:
    """Split a symbol sequence alternately across two antennas.

    Returns shape ``(2, n/2)``; each antenna is scaled by 1/sqrt(2) so
    the total power per channel use stays 1.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.ndim != 1 or symbols.size % 2:
        raise ValueError("symbol count must be even for two-stream multiplexing")
    return np.stack([symbols[0::2], symbols[1::2]]) / _SQRT2


def mmse_detect(
    y: np.ndarray, h: np.ndarray, noise_var: float
) -> tuple[np.ndarray, np.ndarray]:
    """Linear MMSE detection, vectorized over leading axes.

    Computes ``x_hat = (H^H H + noise_var I)^-1 H^H y`` per subcarrier.
    ``h`` must already absorb any per-antenna power scaling.  With
    ``noise_var`` 0 the filter degenerates to zero forcing, which raises
    on a singular channel (that cannot happen under continuous fading
    and would otherwise hide configuration bugs).

    Returns the raw (biased) estimates and the post-detection SNR per
    stream, ``1 / [(H^H H / noise_var + I)^-1]_ii - 1`` (infinite in the
    zero-forcing limit).
    """
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.shape[:-1] != y.shape:
        raise ValueError("h must have shape (..., n_rx, n_tx) matching y (..., n_rx)")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    n_tx = h.shape[-1]
    hh = np.conj(np.swapaxes(h, -1, -2))
    gram = hh @ h
    rhs = (hh @ y[..., None])[..., 0]
    eye = np.eye(n_tx)
    if noise_var == 0:
        try:
            x_hat = np.linalg.solve(gram, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "singular channel with zero noise variance: zero-forcing "
                "is undefined"
            ) from exc
        post_snr = np.full(x_hat.shape, np.inf)
        return x_hat, post_snr
    x_hat = np.linalg.solve(gram + noise_var * eye, rhs[..., None])[..., 0]
    inv = np.linalg.inv(gram / noise_var + eye)
    diag = np.abs(np.diagonal(inv, axis1=-2, axis2=-1))
    post_snr = 1.0 / diag - 1.0
    return x_hat, post_snr


def mmse_bias_correct(
    x_hat: np.ndarray, post_snr: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Remove the MMSE bias and expose per-stream noise variances.

    The raw MMSE output satisfies ``x_hat = mu x + e`` with
    ``mu = snr / (1 + snr)``.  Dividing by ``mu`` gives an unbiased
    symbol estimate with effective noise variance ``1 / snr``, which is
    what the max-log demapper expects.  Infinite post-SNR (zero-forcing
    limit) passes estimates through with zero noise variance.
    """
    x_hat = np.asarray(x_hat)
    post_snr = np.asarray(post_snr, dtype=np.float64)
    finite = np.isfinite(post_snr)
    safe = np.where(finite, post_snr, 1.0)
    mu = np.where(finite, safe / (1.0 + safe), 1.0)
    z = np.where(mu > 0, x_hat / np.where(mu > 0, mu, 1.0), 0.0)
    with np.errstate(divide="ignore"):
        noise_var = np.where(finite, np.where(safe > 0, 1.0 / safe, np.inf), 0.0)
    return z, noise_var
