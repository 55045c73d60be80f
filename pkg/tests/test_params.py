"""Checks for the system parameter tables and validation rules."""

from fractions import Fraction

import pytest

from wimaxlink.params import (
    ADMISSIBLE_CP_RATIOS,
    BURST_PROFILES,
    MIMO_MODES,
    OfdmaParams,
    burst_profile,
    coded_bits_per_stream,
    info_bits_per_ofdm_symbol,
    mimo_mode,
    validate,
)


def test_default_numerology():
    p = OfdmaParams()
    assert p.fft_size == 512
    assert p.n_data == 360
    assert p.n_pilot == 60
    assert p.n_guard == 92
    assert p.n_data + p.n_pilot + p.n_guard == p.fft_size
    assert p.cp_ratio == Fraction(1, 8)
    assert p.bandwidth_hz == 5.0e6
    assert p.subcarrier_spacing_hz == pytest.approx(10.94e3)
    assert p.useful_symbol_time_s == pytest.approx(91.4e-6)
    assert p.guard_time_s == pytest.approx(11.4e-6)
    assert p.symbol_duration_s == pytest.approx(102.9e-6)


def test_timing_self_consistency():
    """The tabulated times agree with the ones derived from each other."""
    p = OfdmaParams()
    # useful time is the reciprocal of the subcarrier spacing
    assert p.useful_symbol_time_s == pytest.approx(1.0 / p.subcarrier_spacing_hz, rel=1e-3)
    # the guard interval is the CP fraction of the useful time
    assert p.guard_time_s == pytest.approx(float(p.cp_ratio) * p.useful_symbol_time_s, rel=1e-2)
    # total duration is useful + guard
    assert p.symbol_duration_s == pytest.approx(
        p.useful_symbol_time_s + p.guard_time_s, rel=1e-3
    )


def test_cp_samples():
    assert OfdmaParams().cp_samples == 64
    assert OfdmaParams(cp_ratio=Fraction(1, 4)).cp_samples == 128
    assert OfdmaParams(cp_ratio=Fraction(1, 32)).cp_samples == 16


def test_admissible_cp_ratios():
    assert ADMISSIBLE_CP_RATIOS == (
        Fraction(1, 4),
        Fraction(1, 8),
        Fraction(1, 16),
        Fraction(1, 32),
    )


def test_burst_profile_table():
    names = [p.name for p in BURST_PROFILES]
    assert names == [
        "qpsk-1/2",
        "qpsk-3/4",
        "16qam-1/2",
        "16qam-3/4",
        "64qam-2/3",
        "64qam-3/4",
    ]
    expected = {
        "qpsk-1/2": ("qpsk", 2, 4, Fraction(1, 2)),
        "qpsk-3/4": ("qpsk", 2, 4, Fraction(3, 4)),
        "16qam-1/2": ("16qam", 4, 16, Fraction(1, 2)),
        "16qam-3/4": ("16qam", 4, 16, Fraction(3, 4)),
        "64qam-2/3": ("64qam", 6, 64, Fraction(2, 3)),
        "64qam-3/4": ("64qam", 6, 64, Fraction(3, 4)),
    }
    for p in BURST_PROFILES:
        mod, nb, m, rate = expected[p.name]
        assert p.modulation == mod
        assert p.bits_per_symbol == nb
        assert p.constellation_points == m
        assert 2 ** p.bits_per_symbol == p.constellation_points
        assert p.fec_rate == rate


def test_burst_profile_lookup():
    p = burst_profile("16qam-3/4")
    assert p.bits_per_symbol == 4 and p.fec_rate == Fraction(3, 4)
    with pytest.raises(KeyError):
        burst_profile("qpsk-2/3")
    with pytest.raises(KeyError):
        burst_profile("bpsk-1/2")


def test_mimo_mode_table():
    assert [m.name for m in MIMO_MODES] == ["siso", "stbc", "sm"]
    siso, stbc, sm = MIMO_MODES
    assert (siso.n_tx, siso.n_rx, siso.stc_rate) == (1, 1, Fraction(1))
    assert (stbc.n_tx, stbc.n_rx, stbc.stc_rate) == (2, 2, Fraction(1))
    assert (sm.n_tx, sm.n_rx, sm.stc_rate) == (2, 2, Fraction(2))
    with pytest.raises(KeyError):
        mimo_mode("mrc")


def test_coded_bits_per_stream():
    p = OfdmaParams()
    assert coded_bits_per_stream(p, burst_profile("qpsk-1/2")) == 720
    assert coded_bits_per_stream(p, burst_profile("16qam-1/2")) == 1440
    assert coded_bits_per_stream(p, burst_profile("64qam-3/4")) == 2160


@pytest.mark.parametrize("profile", BURST_PROFILES, ids=lambda p: p.name)
@pytest.mark.parametrize("mode", MIMO_MODES, ids=lambda m: m.name)
def test_info_bits_integral(profile, mode):
    """Every profile/mode pairing carries a whole number of payload bits."""
    p = OfdmaParams()
    n = info_bits_per_ofdm_symbol(p, profile, mode)
    assert isinstance(n, int)
    assert n > 0
    # equals data tones x bits/symbol x code rate x space-time rate, exactly
    assert n == p.n_data * profile.bits_per_symbol * profile.fec_rate * mode.stc_rate


def test_info_bits_known_values():
    p = OfdmaParams()
    assert info_bits_per_ofdm_symbol(p, burst_profile("qpsk-1/2"), mimo_mode("siso")) == 360
    assert info_bits_per_ofdm_symbol(p, burst_profile("64qam-3/4"), mimo_mode("siso")) == 1620
    assert info_bits_per_ofdm_symbol(p, burst_profile("64qam-3/4"), mimo_mode("sm")) == 3240
    # the space-time code of the diversity mode does not change the bit budget
    assert info_bits_per_ofdm_symbol(p, burst_profile("16qam-1/2"), mimo_mode("stbc")) == 720


def test_validate_accepts_defaults():
    assert validate(OfdmaParams()) == []


def test_validate_flags_bad_partition():
    bad = OfdmaParams(n_data=361)
    assert any("subcarrier" in msg or "partition" in msg for msg in validate(bad))


def test_validate_flags_bad_cp():
    bad = OfdmaParams(cp_ratio=Fraction(1, 5))
    assert validate(bad)


def test_validate_flags_inconsistent_timing():
    bad = OfdmaParams(symbol_duration_s=200e-6)
    assert validate(bad)


def test_params_are_immutable():
    p = OfdmaParams()
    with pytest.raises(Exception):
        p.fft_size = 1024
