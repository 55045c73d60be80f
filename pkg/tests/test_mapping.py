"""Gray-mapped QAM constellations and the max-log soft demapper."""

import numpy as np
import pytest

from wimaxlink.mapping import constellation, demap_hard, demap_soft, map_bits
from wimaxlink.params import BURST_PROFILES, burst_profile

QPSK = burst_profile("qpsk-1/2")
QAM16 = burst_profile("16qam-1/2")
QAM64 = burst_profile("64qam-2/3")
PROFILES = [QPSK, QAM16, QAM64]
IDS = ["qpsk", "16qam", "64qam"]


@pytest.mark.parametrize("profile", PROFILES, ids=IDS)
def test_constellation_unit_energy(profile):
    pts, n_b = constellation(profile.modulation)
    assert n_b == profile.bits_per_symbol
    assert pts.size == profile.constellation_points
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "profile,scale", list(zip(PROFILES, [2**-0.5, 10**-0.5, 42**-0.5])), ids=IDS
)
def test_constellation_scaling(profile, scale):
    """Amplitude levels are odd integers scaled by 1/sqrt(2), 1/sqrt(10), 1/sqrt(42)."""
    pts = constellation(profile.modulation)[0] / scale
    m_axis = int(np.sqrt(profile.constellation_points))
    levels = set(range(-(m_axis - 1), m_axis, 2))
    assert set(np.round(pts.real).astype(int)) == levels
    np.testing.assert_allclose(pts.real, np.round(pts.real), atol=1e-9)
    np.testing.assert_allclose(pts.imag, np.round(pts.imag), atol=1e-9)


def test_qpsk_map_known_points():
    s = 2**-0.5
    bits = np.array([0, 0, 0, 1, 1, 0, 1, 1], dtype=np.uint8)
    expected = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) * s
    np.testing.assert_allclose(map_bits(bits, QPSK), expected, atol=1e-12)


def test_16qam_map_full_table():
    """All 16 points against a hand-built Gray table.

    Per axis the two bits select the level: 00 -> +3, 01 -> +1,
    11 -> -1, 10 -> -3 (adjacent levels differ in one bit).  First bit
    pair drives the real axis, second pair the imaginary axis.
    """
    axis = {(0, 0): 3, (0, 1): 1, (1, 1): -1, (1, 0): -3}
    s = 10**-0.5
    for b0 in (0, 1):
        for b1 in (0, 1):
            for b2 in (0, 1):
                for b3 in (0, 1):
                    bits = np.array([b0, b1, b2, b3], dtype=np.uint8)
                    expected = (axis[(b0, b1)] + 1j * axis[(b2, b3)]) * s
                    got = map_bits(bits, QAM16)[0]
                    assert got == pytest.approx(expected), bits


def test_64qam_map_spot_checks():
    axis = {
        (0, 0, 0): 7, (0, 0, 1): 5, (0, 1, 1): 3, (0, 1, 0): 1,
        (1, 1, 0): -1, (1, 1, 1): -3, (1, 0, 1): -5, (1, 0, 0): -7,
    }
    s = 42**-0.5
    rng = np.random.default_rng(0)
    for _ in range(20):
        bits = rng.integers(0, 2, 6)
        expected = (axis[tuple(bits[:3])] + 1j * axis[tuple(bits[3:])]) * s
        assert map_bits(bits.astype(np.uint8), QAM64)[0] == pytest.approx(expected)


@pytest.mark.parametrize("profile", PROFILES, ids=IDS)
def test_gray_property(profile):
    """Nearest neighbours in the constellation differ in exactly one bit."""
    m = profile.constellation_points
    n_b = profile.bits_per_symbol
    all_bits = ((np.arange(m)[:, None] >> np.arange(n_b - 1, -1, -1)) & 1).astype(np.uint8)
    pts = map_bits(all_bits.reshape(-1), profile)
    d_min = np.sort(np.unique(np.round(np.abs(pts[:, None] - pts[None, :]), 9)))[1]
    for i in range(m):
        for j in range(m):
            if i < j and abs(pts[i] - pts[j]) < d_min * 1.001:
                assert int((all_bits[i] ^ all_bits[j]).sum()) == 1


@pytest.mark.parametrize("profile", PROFILES, ids=IDS)
def test_hard_demap_round_trip(profile):
    rng = np.random.default_rng(17)
    bits = rng.integers(0, 2, 600 * profile.bits_per_symbol).astype(np.uint8)
    symbols = map_bits(bits, profile)
    np.testing.assert_array_equal(demap_hard(symbols, profile), bits)
    # small perturbations stay inside the decision regions
    noisy = symbols + 0.01 * (rng.normal(size=600) + 1j * rng.normal(size=600))
    np.testing.assert_array_equal(demap_hard(noisy, profile), bits)


def test_map_rejects_ragged_input():
    with pytest.raises(ValueError):
        map_bits(np.zeros(5, dtype=np.uint8), QAM16)


@pytest.mark.parametrize("profile", PROFILES, ids=IDS)
def test_soft_demap_matches_exhaustive_minimum(profile):
    """Max-log LLRs equal the two-minimum search over the full constellation.

    For bit position b: LLR = (min_{s: bit=1} |y-s|^2 - min_{s: bit=0} |y-s|^2) / nv,
    so positive values vote for bit 0.  The separable per-axis demapper
    must agree exactly for square Gray QAM.
    """
    rng = np.random.default_rng(23)
    n_b = profile.bits_per_symbol
    m = profile.constellation_points
    all_bits = ((np.arange(m)[:, None] >> np.arange(n_b - 1, -1, -1)) & 1).astype(np.uint8)
    pts = map_bits(all_bits.reshape(-1), profile)
    y = rng.normal(size=50) + 1j * rng.normal(size=50)
    nv = 0.3
    llrs = demap_soft(y, nv, profile).reshape(50, n_b)
    d2 = np.abs(y[:, None] - pts[None, :]) ** 2
    for b in range(n_b):
        zero = all_bits[:, b] == 0
        expected = (d2[:, ~zero].min(axis=1) - d2[:, zero].min(axis=1)) / nv
        np.testing.assert_allclose(llrs[:, b], expected, rtol=1e-9, atol=1e-9)


def test_soft_demap_sign_convention():
    bits = np.array([0, 0, 1, 1], dtype=np.uint8)
    llrs = demap_soft(map_bits(bits, QPSK), 0.1, QPSK)
    assert np.all(llrs[:2] > 0) and np.all(llrs[2:] < 0)


def test_soft_demap_scales_with_noise_variance():
    y = np.array([0.31 - 0.7j])
    a = demap_soft(y, 0.5, QAM16)
    b = demap_soft(y, 0.25, QAM16)
    np.testing.assert_allclose(b, 2.0 * a, rtol=1e-12)


def test_soft_demap_per_symbol_noise():
    """A per-symbol noise array weights each symbol's LLRs individually."""
    y = np.array([0.2 + 0.9j, -0.4 - 0.1j])
    nv = np.array([0.5, 0.125])
    per = demap_soft(y, nv, QPSK).reshape(2, 2)
    np.testing.assert_allclose(per[0], demap_soft(y[:1], 0.5, QPSK), rtol=1e-12)
    np.testing.assert_allclose(per[1], demap_soft(y[1:], 0.125, QPSK), rtol=1e-12)


def test_soft_demap_rejects_nonpositive_noise():
    y = np.ones(2, dtype=complex)
    with pytest.raises(ValueError):
        demap_soft(y, 0.0, QPSK)
    with pytest.raises(ValueError):
        demap_soft(y, np.array([0.1, -0.1]), QPSK)


def test_hard_and_soft_demap_agree():
    """Sign of the LLRs reproduces the hard decisions."""
    rng = np.random.default_rng(29)
    for profile in PROFILES:
        bits = rng.integers(0, 2, 120 * profile.bits_per_symbol).astype(np.uint8)
        y = map_bits(bits, profile) + 0.05 * (
            rng.normal(size=120) + 1j * rng.normal(size=120)
        )
        hard = demap_hard(y, profile)
        soft = demap_soft(y, 0.2, profile)
        np.testing.assert_array_equal((soft < 0).astype(np.uint8), hard)


@pytest.mark.parametrize("profile", BURST_PROFILES, ids=lambda p: p.name)
def test_all_profiles_map_demap(profile):
    rng = np.random.default_rng(41)
    bits = rng.integers(0, 2, 360 * profile.bits_per_symbol).astype(np.uint8)
    np.testing.assert_array_equal(demap_hard(map_bits(bits, profile), profile), bits)
