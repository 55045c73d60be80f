"""Walk one data block through the whole transmit/receive chain.

Every stage is applied by hand so the intermediate shapes and the
bookkeeping (code rate, interleaver size, subcarrier roles) are visible.
One FEC block fills exactly one OFDM symbol, which keeps the walkthrough
to a single grid.  Runs in a few seconds and saves two figures next to
this script.

Run:  python3 demos/01_chain_walkthrough.py
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from wimaxlink.bitsource import derandomize, generate, randomize
from wimaxlink.channel import ChannelConfig, apply_channel, draw_channel
from wimaxlink.fec import (
    cc_encode,
    deinterleave,
    depuncture,
    interleave,
    puncture,
    viterbi_decode,
)
from wimaxlink.mapping import constellation, demap_soft, map_bits
from wimaxlink.ofdm import (
    equalize_siso,
    estimate_channel,
    grid_layout,
    ofdm_demodulate,
    ofdm_modulate,
    role_table,
    subcarrier_demap,
    subcarrier_map,
)
from wimaxlink.params import OfdmaParams, burst_profile, coded_bits_per_stream

here = Path(__file__).resolve().parent

# ---------------------------------------------------------------------
# 1. Pick a burst profile and size the block.
#
# 16-QAM rate 3/4 carries 4 coded bits per data subcarrier.  With 360
# data subcarriers that is 1440 coded bits per OFDM symbol, i.e. 1080
# information bits once the rate-3/4 code is accounted for.
# ---------------------------------------------------------------------
params = OfdmaParams()
profile = burst_profile("16qam-3/4")
layout = grid_layout(params)

n_cbps = coded_bits_per_stream(params, profile)  # coded bits / OFDM symbol
n_info = int(n_cbps * profile.fec_rate)

roles = role_table(layout).splitlines()
counts = {r: sum(line.endswith(r) for line in roles) for r in ("data", "pilot", "guard", "dc")}
print(f"bin roles: {counts}")
print(f"profile: {profile.name}  ({n_info} info bits -> {n_cbps} coded bits)")

# ---------------------------------------------------------------------
# 2. Transmit side: payload -> scrambled -> coded -> interleaved -> QAM.
# ---------------------------------------------------------------------
rng = np.random.default_rng(7)
snr_db = 18.0

info = generate(seed=7, n=n_info)
scrambled = randomize(info)
coded = puncture(cc_encode(scrambled), profile.fec_rate)
inter = interleave(coded, n_cbps, profile.bits_per_symbol)
symbols = map_bits(inter, profile)

print(f"mother-code output: {2 * n_info} bits, after puncturing: {coded.size}")
print(f"mapped symbols: {symbols.size}  (= {n_cbps} / {profile.bits_per_symbol})")

# ---------------------------------------------------------------------
# 3. Build the frequency grid and check the time-domain round trip.
#
# The grid places the 360 data symbols and 60 pilots on their assigned
# bins; guards and DC stay empty.  Modulating appends the 1/8
# cyclic prefix (64 samples on a 512 FFT).
# ---------------------------------------------------------------------
grid = subcarrier_map(symbols, layout)
signal = ofdm_modulate(grid)
assert signal.size == layout.n_fft + layout.n_fft // 8
assert np.allclose(ofdm_demodulate(signal), grid)
print(f"time-domain symbol: {signal.size} samples (CP {layout.n_fft // 8})")

# ---------------------------------------------------------------------
# 4. Push the grid through a frequency-selective Rayleigh channel.
#
# The channel is applied per subcarrier (the cyclic prefix is longer
# than the delay spread, so this is exact) and noise is added at the
# receiver.  `grid[None, :]` adds the single-transmit-antenna axis.
# ---------------------------------------------------------------------
ch_cfg = ChannelConfig(snr_db=snr_db)
realization = draw_channel(rng, ch_cfg, n_tx=1, n_rx=1, n_fft=layout.n_fft)
rx_grid = apply_channel(grid[None, :], realization, rng)[0]

# ---------------------------------------------------------------------
# 5. Estimate the channel two ways and equalize.
#
# The headline curves use the simulator's own response ("perfect").
# The pilot path divides the 60 received pilots by their known value
# and interpolates across the band; plotting both shows what the
# estimator smooths over.
# ---------------------------------------------------------------------
true_h = estimate_channel(
    rx_grid, layout, "perfect", true_response=realization.response[0, 0]
)
pilot_h = estimate_channel(rx_grid, layout, "pilot_ls")

equalized, nv = equalize_siso(
    subcarrier_demap(rx_grid, layout), true_h, realization.noise_var
)

# ---------------------------------------------------------------------
# 6. Receive side: soft demap -> deinterleave -> depuncture -> decode.
# ---------------------------------------------------------------------
llr = demap_soft(equalized, nv, profile)
deint = deinterleave(llr, n_cbps, profile.bits_per_symbol)
soft = depuncture(deint, profile.fec_rate)
recovered = derandomize(viterbi_decode(soft))

n_bit_errors = int(np.count_nonzero(recovered != info))
raw_errors = int(np.count_nonzero((llr < 0).astype(np.uint8) != inter))
print(f"raw coded-bit errors before decoding: {raw_errors} / {n_cbps}")
print(f"payload bit errors after decoding:    {n_bit_errors} / {n_info}")

# ---------------------------------------------------------------------
# 7. Figures: received constellation and the channel estimate.
# ---------------------------------------------------------------------
points, _ = constellation(profile.modulation)

fig, ax = plt.subplots(figsize=(5, 5))
ax.scatter(equalized.real, equalized.imag, s=8, alpha=0.6, label="equalized")
ax.scatter(points.real, points.imag, marker="x", c="k", s=40, label="ideal")
ax.set_xlabel("I")
ax.set_ylabel("Q")
ax.set_title(f"{profile.name} after one-tap equalization, {snr_db:g} dB")
ax.legend()
ax.set_aspect("equal")
fig.tight_layout()
fig.savefig(here / "chain_constellation.png", dpi=120)

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(np.abs(true_h), label="true response (data bins)")
ax.plot(np.abs(pilot_h), "--", label="pilot LS + interpolation")
ax.set_xlabel("data subcarrier index")
ax.set_ylabel("|H|")
ax.set_title("channel magnitude across the band")
ax.legend()
fig.tight_layout()
fig.savefig(here / "chain_channel_estimate.png", dpi=120)

print("wrote chain_constellation.png and chain_channel_estimate.png")
