"""End-to-end simulation driver: config, seeding, stop rule, files."""

import math
from fractions import Fraction

import numpy as np
import pytest

from wimaxlink.channel import ChannelConfig, exponential_pdp
from wimaxlink.harness import (
    CSV_COLUMNS,
    SimConfig,
    analyze_sweep,
    config_fingerprint,
    config_from_mapping,
    emit_csv,
    emit_envelope_csv,
    emit_plots,
    is_censored,
    load_config,
    point_seed,
    read_csv,
    run_point,
    run_sweep,
    snr_grid,
)
from wimaxlink.params import (
    BURST_PROFILES,
    MIMO_MODES,
    OfdmaParams,
    burst_profile,
    info_bits_per_ofdm_symbol,
    mimo_mode,
)

FAST = SimConfig(min_block_errors=5, max_blocks=20)


class TestSnrGrid:
    def test_default_grid(self):
        grid = snr_grid(0.0, 2.0, 36.0)
        assert len(grid) == 19
        assert grid[0] == 0.0 and grid[-1] == 36.0
        np.testing.assert_allclose(np.diff(grid), 2.0)

    def test_endpoint_inclusion(self):
        assert snr_grid(1.0, 2.0, 6.0) == (1.0, 3.0, 5.0)
        assert snr_grid(5.0, 1.0, 5.0) == (5.0,)

    def test_validation(self):
        with pytest.raises(ValueError):
            snr_grid(0.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            snr_grid(10.0, 1.0, 0.0)


class TestSimConfig:
    def test_defaults(self):
        cfg = SimConfig()
        assert cfg.modes == ("siso", "stbc", "sm")
        assert len(cfg.profiles) == 6
        assert cfg.min_block_errors == 100
        assert cfg.csi == "perfect"

    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(modes=())
        with pytest.raises(KeyError):
            SimConfig(modes=("siso", "beamforming"))
        with pytest.raises(KeyError):
            SimConfig(profiles=("qpsk-5/6",))
        with pytest.raises(ValueError):
            SimConfig(snr_db=(0.0, 2.0, 1.0))
        with pytest.raises(ValueError):
            SimConfig(min_block_errors=0)
        with pytest.raises(ValueError):
            SimConfig(max_blocks=0)
        with pytest.raises(ValueError):
            SimConfig(csi="genie")

    def test_delay_spread_must_fit_prefix(self):
        taps = 65  # one more than the 64-sample prefix
        with pytest.raises(ValueError):
            SimConfig(
                channel=ChannelConfig(
                    n_taps=taps, power_delay_profile=exponential_pdp(taps)
                )
            )


class TestConfigParsing:
    def test_mapping_overrides(self):
        cfg = config_from_mapping(
            {
                "modes": "siso,sm",
                "profiles": "qpsk-1/2,64qam-3/4",
                "snr_start": "2",
                "snr_step": "4",
                "snr_stop": "10",
                "min_block_errors": "7",
                "max_blocks": "99",
                "master_seed": "42",
                "csi": "pilot",
                "out_dir": "results",
            }
        )
        assert cfg.modes == ("siso", "sm")
        assert cfg.profiles == ("qpsk-1/2", "64qam-3/4")
        assert cfg.snr_db == (2.0, 6.0, 10.0)
        assert cfg.min_block_errors == 7
        assert cfg.max_blocks == 99
        assert cfg.master_seed == 42
        assert cfg.csi == "pilot"
        assert cfg.out_dir == "results"

    def test_channel_overrides(self):
        cfg = config_from_mapping({"n_taps": "4", "pdp_decay_db": "1.5"})
        assert cfg.channel.n_taps == 4
        assert cfg.channel.power_delay_profile == exponential_pdp(4, 1.5)
        explicit = config_from_mapping({"n_taps": "2", "pdp": "0.5,0.5"})
        assert explicit.channel.power_delay_profile == (0.5, 0.5)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            config_from_mapping({"bandwidht": "5e6"})

    def test_partial_snr_trio_rejected(self):
        with pytest.raises(ValueError):
            config_from_mapping({"snr_start": "0", "snr_stop": "10"})

    def test_base_preserved(self):
        base = config_from_mapping({"master_seed": "9"})
        cfg = config_from_mapping({"csi": "pilot"}, base=base)
        assert cfg.master_seed == 9 and cfg.csi == "pilot"

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "sweep.conf"
        path.write_text(
            "# headline sweep\n"
            "modes = siso, stbc\n"
            "\n"
            "snr_start = 0\n"
            "snr_step = 2\n"
            "snr_stop = 4  # short grid\n"
            "master_seed = 3\n"
        )
        cfg = load_config(path)
        assert cfg.modes == ("siso", "stbc")
        assert cfg.snr_db == (0.0, 2.0, 4.0)
        assert cfg.master_seed == 3

    def test_load_config_duplicate_key(self, tmp_path):
        path = tmp_path / "dup.conf"
        path.write_text("master_seed = 1\nmaster_seed = 2\n")
        with pytest.raises(ValueError):
            load_config(path)


class TestFingerprint:
    def test_stable_and_sensitive(self):
        a = config_fingerprint(SimConfig())
        assert a == config_fingerprint(SimConfig())
        assert len(a) == 16
        assert a != config_fingerprint(SimConfig(master_seed=2))
        assert a != config_fingerprint(SimConfig(csi="pilot"))
        assert a != config_fingerprint(SimConfig(snr_db=(0.0, 1.0)))

    def test_output_location_ignored(self):
        assert config_fingerprint(SimConfig(out_dir="a")) == config_fingerprint(
            SimConfig(out_dir="b")
        )


class TestPointSeed:
    def test_deterministic(self):
        p = burst_profile("qpsk-1/2")
        m = mimo_mode("siso")
        assert point_seed(1, m, p, 10.0) == point_seed(1, m, p, 10.0)

    def test_distinct_across_axes(self):
        seeds = {
            point_seed(1, m, p, s)
            for m in MIMO_MODES
            for p in BURST_PROFILES
            for s in (0.0, 0.002, 10.0, math.inf)
        }
        assert len(seeds) == 3 * 6 * 4

    def test_master_seed_matters(self):
        p, m = burst_profile("qpsk-1/2"), mimo_mode("sm")
        assert point_seed(1, m, p, 0.0) != point_seed(2, m, p, 0.0)

    def test_independent_of_sweep_composition(self):
        """The seed only depends on the point identity, so a subset sweep
        reproduces the full sweep's numbers point for point."""
        full = run_point(FAST, "stbc", "16qam-1/2", 8.0)
        subset_cfg = SimConfig(
            modes=("stbc",),
            profiles=("16qam-1/2",),
            snr_db=(8.0,),
            min_block_errors=FAST.min_block_errors,
            max_blocks=FAST.max_blocks,
        )
        again = run_point(subset_cfg, "stbc", "16qam-1/2", 8.0)
        assert full == again

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            point_seed(1, mimo_mode("siso"), burst_profile("qpsk-1/2"), math.nan)


class TestRunPoint:
    @pytest.mark.parametrize("mode", [m.name for m in MIMO_MODES])
    def test_noiseless_loopback(self, mode):
        m = run_point(FAST, mode, "64qam-3/4", math.inf)
        assert m.bit_errors == 0
        assert m.ber == 0.0 and m.bler == 0.0
        assert m.blocks_tested == FAST.max_blocks

    def test_deterministic(self):
        a = run_point(FAST, "siso", "qpsk-1/2", 4.0)
        b = run_point(FAST, "siso", "qpsk-1/2", 4.0)
        assert a == b

    def test_explicit_seed_reproduces(self):
        seed = point_seed(FAST.master_seed, mimo_mode("sm"), burst_profile("qpsk-1/2"), 6.0)
        assert run_point(FAST, "sm", "qpsk-1/2", 6.0) == run_point(
            FAST, "sm", "qpsk-1/2", 6.0, seed=seed
        )

    def test_accounting_consistency(self):
        m = run_point(FAST, "siso", "16qam-3/4", 10.0)
        per_block = info_bits_per_ofdm_symbol(
            OfdmaParams(), burst_profile("16qam-3/4"), mimo_mode("siso")
        )
        assert m.bits_tested == m.blocks_tested * per_block
        assert m.ber == m.bit_errors / m.bits_tested
        assert m.bler == m.block_errors / m.blocks_tested
        assert m.bit_errors <= m.bits_tested
        assert m.block_errors <= m.blocks_tested

    def test_mimo_block_accounting(self):
        """A two-symbol MIMO unit yields two FEC blocks (or two streams)."""
        stbc = run_point(FAST, "stbc", "qpsk-1/2", 0.0)
        assert stbc.blocks_tested % 2 == 0
        sm = run_point(FAST, "sm", "qpsk-1/2", 0.0)
        assert sm.blocks_tested % 2 == 0
        # multiplexing moves twice the bits per block pair
        per_sm = info_bits_per_ofdm_symbol(
            OfdmaParams(), burst_profile("qpsk-1/2"), mimo_mode("sm")
        )
        assert per_sm == 720
        assert sm.bits_tested == sm.blocks_tested * per_sm // 2

    def test_stop_rule_and_censoring(self):
        # at very low SNR errors come fast: stops on min_block_errors
        noisy = run_point(FAST, "siso", "64qam-3/4", 0.0)
        assert noisy.block_errors >= FAST.min_block_errors
        assert not is_censored(noisy, FAST.min_block_errors)
        # noiseless never errors: stops on max_blocks, flagged censored
        clean = run_point(FAST, "siso", "qpsk-1/2", math.inf)
        assert clean.blocks_tested == FAST.max_blocks
        assert is_censored(clean, FAST.min_block_errors)

    def test_throughput_fields_follow_formulas(self):
        from wimaxlink.metrics_amc import link_throughput, normalized_throughput

        m = run_point(FAST, "sm", "16qam-1/2", 12.0)
        assert m.throughput_bps == link_throughput(
            OfdmaParams(), burst_profile("16qam-1/2"), mimo_mode("sm"), m.bler
        )
        assert m.normalized_bpshz == normalized_throughput(
            burst_profile("16qam-1/2"), mimo_mode("sm"), m.bler
        )

    def test_pilot_csi_runs_clean_at_high_snr(self):
        cfg = SimConfig(min_block_errors=5, max_blocks=10, csi="pilot")
        m = run_point(cfg, "siso", "qpsk-1/2", 30.0)
        assert m.ber < 0.01

    def test_monotone_in_snr(self):
        """More SNR never hurts, coarsely."""
        low = run_point(FAST, "siso", "16qam-1/2", 2.0)
        high = run_point(FAST, "siso", "16qam-1/2", 14.0)
        assert high.ber <= low.ber


SMALL = SimConfig(
    modes=("siso", "sm"),
    profiles=("qpsk-1/2", "16qam-3/4"),
    snr_db=(4.0, 10.0),
    min_block_errors=3,
    max_blocks=10,
    master_seed=5,
)


class TestRunSweep:
    def test_cardinality_and_metadata(self):
        sweep = run_sweep(SMALL)
        assert len(sweep.entries) == 2 * 2 * 2
        assert sweep.config_fingerprint == config_fingerprint(SMALL)
        assert sweep.master_seed == 5
        assert sweep.modes() == ["siso", "sm"]

    def test_points_match_run_point(self):
        sweep = run_sweep(SMALL)
        for entry in sweep.entries:
            again = run_point(SMALL, entry.mode, entry.profile, entry.snr_db)
            assert entry == again

    def test_progress_callback(self):
        seen = []
        run_sweep(SMALL, progress=seen.append)
        assert len(seen) == 8

    def test_parallel_equals_serial(self):
        serial = run_sweep(SMALL)
        parallel = run_sweep(SMALL, n_workers=2)
        assert serial.entries == parallel.entries


class TestCsv:
    def test_round_trip(self, tmp_path):
        sweep = run_sweep(SMALL)
        path = emit_csv(sweep, tmp_path / "sweep.csv")
        again = read_csv(path)
        assert again.entries == sweep.entries

    def test_layout(self, tmp_path):
        sweep = run_sweep(SMALL)
        path = emit_csv(sweep, tmp_path / "sweep.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(sweep.entries)
        first = lines[1].split(",")
        assert first[1] in ("siso", "sm")
        assert first[3] in ("1/2", "3/4")

    def test_read_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("snr,ber\n0,0.1\n")
        with pytest.raises(ValueError):
            read_csv(path)


@pytest.fixture(scope="module")
def tiny_full_sweep():
    cfg = SimConfig(
        snr_db=(0.0, 30.0),
        min_block_errors=2,
        max_blocks=4,
        master_seed=11,
    )
    return cfg, run_sweep(cfg)


class TestAnalysis:
    def test_analyze_builds_envelopes(self, tiny_full_sweep):
        _, sweep = tiny_full_sweep
        analysis = analyze_sweep(sweep)
        assert set(analysis.envelopes) == {"siso", "stbc", "sm"}
        env = analysis.envelopes["sm"]
        np.testing.assert_array_equal(env.snr_db, [0.0, 30.0])

    def test_envelope_csv(self, tiny_full_sweep, tmp_path):
        _, sweep = tiny_full_sweep
        path = emit_envelope_csv(analyze_sweep(sweep), tmp_path / "env.csv")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("mode,snr_db,best_profile")
        assert len(lines) == 1 + 3 * 2

    def test_plots_written(self, tiny_full_sweep, tmp_path):
        cfg, sweep = tiny_full_sweep
        files = emit_plots(sweep, analyze_sweep(sweep), tmp_path / "fig")
        svgs = [f for f in files if f.suffix == ".svg"]
        txts = [f for f in files if f.suffix == ".txt"]
        assert len(svgs) == 6
        assert len(txts) == 6
        for f in files:
            assert f.exists() and f.stat().st_size > 0

    def test_analysis_degrades_on_partial_sweep(self):
        sweep = run_sweep(SMALL)
        analysis = analyze_sweep(sweep)
        # incomplete profile set: no envelopes, no switching point
        assert analysis.envelopes == {}
        assert analysis.switching_point_db is None
