import math
from pathlib import Path

import numpy as np
import pytest

from spillover import ingest

FIXTURES = Path(__file__).parent / "fixtures"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadEvents:
    def test_three_rows_sorted(self, tmp_path):
        path = write(
            tmp_path,
            "ev.csv",
            "date,d_rate,d_stock,chile\n"
            "1999-05-18,0.02,-0.4,0.3\n"
            "1999-02-03,-0.05,0.8,\n"
            "1999-03-30,0.0,-0.1,-0.2\n",
        )
        events = ingest.load_events(path)
        assert len(events) == 3
        assert [e.date.isoformat() for e in events] == ["1999-02-03", "1999-03-30", "1999-05-18"]
        assert events[0].ner_change == {}
        assert events[1].ner_change == {"chile": -0.2}

    def test_nan_rate_rejected_with_row(self, tmp_path):
        path = write(
            tmp_path, "ev.csv", "date,d_rate,d_stock\n1999-02-03,0.01,0.1\n1999-03-30,NaN,0.2\n"
        )
        with pytest.raises(ingest.IngestError, match="3"):
            ingest.load_events(path)

    def test_duplicate_date_rejected(self, tmp_path):
        path = write(
            tmp_path, "ev.csv", "date,d_rate,d_stock\n1999-02-03,0.01,0.1\n1999-02-03,0.02,0.2\n"
        )
        with pytest.raises(ingest.IngestError, match="1999-02-03"):
            ingest.load_events(path)

    def test_bundled_fixture_has_154_events(self):
        events = ingest.load_events(FIXTURES / "events_synth.csv")
        assert len(events) == 154


class TestAggregateToMonthly:
    def test_event_free_month_is_zero(self):
        events = ingest.load_events(FIXTURES / "events_synth.csv")
        ev = [e for e in events if e.date.year == 1999][:1]
        span = (ingest.month_index(1999, 1), ingest.month_index(1999, 12))
        panel = ingest.aggregate_to_monthly(ev, *span)
        month_of_event = ev[0].month - span[0]
        empty = (month_of_event + 1) % 12
        assert panel.values[empty, 0] == 0.0 and panel.values[empty, 1] == 0.0

    def test_single_event_passthrough(self, tmp_path):
        path = write(tmp_path, "e.csv", "date,d_rate,d_stock\n2001-06-05,0.05,-0.8\n")
        events = ingest.load_events(path)
        panel = ingest.aggregate_to_monthly(
            events, ingest.month_index(2001, 6), ingest.month_index(2001, 6)
        )
        assert panel.values[0].tolist() == [0.05, -0.8]

    def test_two_events_in_month_sum(self, tmp_path):
        # summation oracle: the monthly cell holds the sum of the surprises
        path = write(
            tmp_path,
            "e.csv",
            "date,d_rate,d_stock\n2001-06-05,0.02,0.1\n2001-06-25,0.03,-0.2\n",
        )
        events = ingest.load_events(path)
        panel = ingest.aggregate_to_monthly(
            events, ingest.month_index(2001, 6), ingest.month_index(2001, 6)
        )
        assert panel.values[0, 0] == pytest.approx(0.05, abs=1e-15)
        assert panel.values[0, 1] == pytest.approx(-0.1, abs=1e-15)

    def test_event_outside_span_is_error(self, tmp_path):
        path = write(tmp_path, "e.csv", "date,d_rate,d_stock\n2001-06-05,0.05,-0.8\n")
        events = ingest.load_events(path)
        with pytest.raises(ingest.IngestError, match="outside"):
            ingest.aggregate_to_monthly(
                events, ingest.month_index(2002, 1), ingest.month_index(2002, 12)
            )

    def test_surprise_columns_nonzero_only_in_event_months(self):
        events = ingest.load_events(FIXTURES / "events_synth.csv")
        lo = min(e.month for e in events)
        hi = max(e.month for e in events)
        panel = ingest.aggregate_to_monthly(events, lo, hi)
        event_months = {e.month - lo for e in events}
        for t in range(panel.n_months):
            if t not in event_months:
                assert panel.values[t, 0] == 0.0 and panel.values[t, 1] == 0.0


class TestLoadPanel:
    def test_two_series_aligned(self, tmp_path):
        a = write(tmp_path, "a.csv", "date,x\n1999-01,1.0\n1999-02,2.0\n1999-03,3.0\n")
        b = write(tmp_path, "b.csv", "date,y\n1999-02,5.0\n1999-03,6.0\n1999-04,7.0\n")
        panel = ingest.load_panel(
            [
                ingest.SeriesSpec("x", str(a), "x"),
                ingest.SeriesSpec("y", str(b), "y"),
            ]
        )
        assert panel.n_months == 2 and panel.n_vars == 2
        assert panel.values.tolist() == [[2.0, 5.0], [3.0, 6.0]]

    def test_log_transform(self, tmp_path):
        a = write(tmp_path, "a.csv", "date,x\n1999-01,100.0\n1999-02,100.0\n")
        panel = ingest.load_panel([ingest.SeriesSpec("x", str(a), "x", transform="log")])
        assert panel.values[0, 0] == pytest.approx(math.log(100.0), abs=1e-12)

    def test_log_of_nonpositive_names_series_and_month(self, tmp_path):
        a = write(tmp_path, "a.csv", "date,x\n1999-01,1.0\n1999-02,-3.0\n")
        with pytest.raises(ingest.IngestError, match="x.*1999-02"):
            ingest.load_panel([ingest.SeriesSpec("x", str(a), "x", transform="log")])

    def test_interior_gap_is_error(self, tmp_path):
        a = write(tmp_path, "a.csv", "date,x\n1999-01,1.0\n1999-03,3.0\n")
        with pytest.raises(ingest.IngestError, match="gap"):
            ingest.load_panel([ingest.SeriesSpec("x", str(a), "x")])


class TestRoundTrip:
    def test_csv_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((40, 3)) * np.array([1e-4, 1.0, 1e5])
        cols = [
            ingest.VariableInfo("a", "surprise"),
            ingest.VariableInfo("b", "em_macro"),
            ingest.VariableInfo("c", "us_macro"),
        ]
        panel = ingest.MonthlyPanel(ingest.month_index(2000, 1), values, cols)
        path = tmp_path / "panel.csv"
        panel.to_csv(path)
        back = ingest.MonthlyPanel.from_csv(path, cols)
        assert back.start_month == panel.start_month
        assert np.array_equal(back.values, panel.values)

    def test_column_order_preserved(self, tmp_path):
        values = np.zeros((3, 2))
        cols = [ingest.VariableInfo("z", "surprise"), ingest.VariableInfo("a", "em_macro")]
        panel = ingest.MonthlyPanel(0, values, cols)
        path = tmp_path / "p.csv"
        panel.to_csv(path)
        assert ingest.MonthlyPanel.from_csv(path).names == ["z", "a"]
