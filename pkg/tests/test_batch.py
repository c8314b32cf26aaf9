import threading

from pytest import approx

from hdrelay.batch import iter_pairs, process_sweep, solve_row


def test_pairs_are_q_major_without_duplicates():
    assert list(iter_pairs([2, 3, 2], [1, 2])) == [(2, 1), (3, 1), (2, 2), (3, 2)]


def test_sweep_rows_and_progress():
    calls = []
    rows, summary = process_sweep([2, 3], [1, 2], progress_callback=lambda i, n: calls.append((i, n)))
    assert [(r.m, r.q) for r in rows] == [(2, 1), (3, 1), (2, 2), (3, 2)]
    assert [r.capacity for r in rows] == approx([0.7729, 0.7324, 1.1389, 1.0665], abs=1e-3)
    assert calls == [(1, 4), (2, 4), (3, 4), (4, 4)]
    assert summary.complete
    assert rows[2].time_sharing_rate == approx(0.7925, abs=1e-4)
    assert rows[2].capacity_infinite == approx(1.0)
    assert rows[2].gap_to_infinite == approx(0.1389, abs=1e-3)
    assert rows[2].profile[-1] == 1.0


def test_cancelled_sweep_stops_early():
    cancel = threading.Event()
    cancel.set()
    rows, summary = process_sweep([2, 3], [1], cancel_event=cancel)
    assert rows == []
    assert summary.total == 2
    assert not summary.complete


def test_failed_rows_are_reported_not_raised():
    rows, summary = process_sweep([1, 3], [2], tol=1e-300)
    assert rows[0].solved
    assert not rows[1].solved
    assert rows[1].error.startswith("ConvergenceError")
    assert rows[1].gap_to_infinite is None
    assert summary.failed == 1
    assert not summary.complete


def test_empty_sweep():
    rows, summary = process_sweep([], [1, 2])
    assert rows == []
    assert summary.total == 0
    assert summary.complete


def test_solve_row_direct_link():
    row = solve_row(1, 1)
    assert row.capacity == approx(1.0)
    assert row.iterations == 0
