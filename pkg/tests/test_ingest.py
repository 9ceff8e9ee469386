import datetime

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recurconnect.errors import AlignmentError, CsvFormatError
from recurconnect.ingest import AlignedDataset, TimeSeries, align, parse_csv

D = datetime.date


def ts(label, day_value_pairs):
    days = [d for d, _ in day_value_pairs]
    values = [v for _, v in day_value_pairs]
    return TimeSeries(label, days, values)


def test_parse_two_rows():
    series = parse_csv(b"date,close\n2000-01-03,100.0\n2000-01-04,101.5", "a")
    assert len(series) == 2
    assert series.dates == (D(2000, 1, 3), D(2000, 1, 4))
    assert series.values.tolist() == [100.0, 101.5]


def test_parse_rejects_duplicate_date():
    data = b"date,close\n2000-01-03,1\n2000-01-04,2\n2000-01-03,3"
    with pytest.raises(CsvFormatError, match="duplicate date") as err:
        parse_csv(data, "a")
    assert err.value.line == 4


def test_parse_sorts_out_of_order_rows():
    # oracle: the same records sorted by hand
    data = b"date,close\n2000-01-04,2.0\n2000-01-03,1.0\n2000-01-05,3.0"
    series = parse_csv(data, "a")
    assert series.dates == (D(2000, 1, 3), D(2000, 1, 4), D(2000, 1, 5))
    assert series.values.tolist() == [1.0, 2.0, 3.0]


def test_parse_crlf_and_blank_lines():
    series = parse_csv(b"date,close\r\n2000-01-03,1\r\n\r\n2000-01-04,2\r\n", "a")
    assert len(series) == 2


@pytest.mark.parametrize(
    "payload,message,line",
    [
        (b"", "empty file", None),
        (b"time,close\n2000-01-03,1", "expected header", 1),
        (b"date,close\n2000-13-40,1", "malformed date", 2),
        (b"date,close\nnot-a-date,1", "malformed date", 2),
        (b"date,close\n2000-01-03,abc", "non-numeric close", 2),
        (b"date,close\n2000-01-03,nan", "non-finite close", 2),
        (b"date,close\n2000-01-03", "expected 'date,close' record", 2),
        (b"date,close\n", "no data records", None),
    ],
)
def test_parse_errors(payload, message, line):
    with pytest.raises(CsvFormatError, match=message) as err:
        parse_csv(payload, "a")
    if line is not None:
        assert err.value.line == line


def test_missing_close_is_absent_date():
    series = parse_csv(b"date,close\n2000-01-03,1\n2000-01-04,\n2000-01-05,3", "a")
    assert series.dates == (D(2000, 1, 3), D(2000, 1, 5))


def test_extra_columns_warn_and_are_ignored():
    with pytest.warns(UserWarning, match="extra column"):
        series = parse_csv(b"date,close,volume\n2000-01-03,1,999", "a")
    assert series.values.tolist() == [1.0]


def test_timeseries_invariants():
    with pytest.raises(ValueError, match="strictly increasing"):
        ts("a", [(D(2000, 1, 4), 1.0), (D(2000, 1, 3), 2.0)])
    with pytest.raises(ValueError, match="non-finite"):
        TimeSeries("a", (D(2000, 1, 3),), [float("inf")])
    with pytest.raises(ValueError, match="empty"):
        TimeSeries("a", (), [])


def test_align_intersects_dates():
    a = ts("a", [(D(2000, 1, 1), 1.0), (D(2000, 1, 2), 2.0), (D(2000, 1, 3), 3.0)])
    b = ts("b", [(D(2000, 1, 2), 5.0), (D(2000, 1, 3), 6.0), (D(2000, 1, 4), 7.0)])
    out = align([a, b])
    assert out.dates == (D(2000, 1, 2), D(2000, 1, 3))
    assert out.series[0].values.tolist() == [2.0, 3.0]
    assert out.series[1].values.tolist() == [5.0, 6.0]


def test_align_identical_series_unchanged():
    a = ts("a", [(D(2000, 1, 1), 1.0), (D(2000, 1, 2), 2.0)])
    b = ts("b", [(D(2000, 1, 1), 9.0), (D(2000, 1, 2), 8.0)])
    out = align([a, b])
    assert out.dates == a.dates
    assert out.series[0].values.tolist() == a.values.tolist()


def test_align_errors():
    a = ts("a", [(D(2000, 1, 1), 1.0)])
    b = ts("b", [(D(2000, 1, 2), 1.0)])
    with pytest.raises(AlignmentError, match="empty date intersection"):
        align([a, b])
    with pytest.raises(AlignmentError, match="at least 2"):
        align([a])


def test_aligned_dataset_rejects_mismatched_axis():
    a = ts("a", [(D(2000, 1, 1), 1.0), (D(2000, 1, 2), 2.0)])
    b = ts("b", [(D(2000, 1, 1), 9.0), (D(2000, 1, 3), 8.0)])
    with pytest.raises(ValueError, match="differ from the shared axis"):
        AlignedDataset((a, b), a.dates)


@st.composite
def date_subsets(draw):
    base = [D(2001, 1, 1) + datetime.timedelta(days=i) for i in range(30)]
    picked = draw(st.lists(st.sampled_from(base), min_size=1, max_size=30, unique=True))
    return sorted(picked)


@given(st.lists(date_subsets(), min_size=2, max_size=4))
@settings(max_examples=50, deadline=None)
def test_align_properties(subsets):
    shared = set(subsets[0])
    for s in subsets[1:]:
        shared &= set(s)
    series = [
        ts(f"s{i}", [(d, float(j)) for j, d in enumerate(days)])
        for i, days in enumerate(subsets)
    ]
    if not shared:
        with pytest.raises(AlignmentError):
            align(series)
        return
    out = align(series)
    # shared axis no longer than the shortest input
    assert len(out.dates) <= min(len(s) for s in series)
    # idempotence
    again = align(list(out.series))
    assert again.dates == out.dates
    # order-insensitivity of the shared axis
    flipped = align(series[::-1])
    assert flipped.dates == out.dates
