"""Benchmark harness report shape and the runtime-independence ratio."""

import pytest

from sandsim.bench import format_table, run_bench


class TestBench:
    def test_report_shape(self):
        r = run_bench(batches=(1, 2), fills=("empty", "wall"), ticks=2,
                      h=32, w=32)
        assert len(r.rows) == 4
        for row in r.rows:
            assert row["steps_per_sec"] > 0
            assert row["cell_updates_per_sec"] > 0
        d = r.to_dict()
        assert d["height"] == 32 and d["ticks"] == 2

    def test_zero_ticks_empty_report(self):
        r = run_bench(ticks=0)
        assert r.rows == []

    def test_unknown_fill(self):
        with pytest.raises(ValueError):
            run_bench(batches=(1,), fills=("jelly",), ticks=1)

    def test_table_formatting(self):
        r = run_bench(batches=(1,), fills=("empty",), ticks=1, h=16, w=16)
        text = format_table(r)
        assert "steps/s" in text and "empty" in text

    def test_wall_vs_empty_ratio(self):
        # occupancy-independent runtime: dense and empty worlds cost alike
        r = run_bench(batches=(32,), fills=("empty", "wall"), ticks=8)
        assert r.wall_empty_ratio(32) <= 1.25
