"""Tests for the ordered bounded-window thread pool helper."""

from __future__ import annotations

import time

import pytest

from relevkit.parallel import imap_ordered


def test_results_keep_input_order_despite_uneven_latency():
    def slow_for_small(n):
        time.sleep(0.002 * (5 - n % 5))
        return n * 10

    assert list(imap_ordered(slow_for_small, range(20), workers=4)) == [
        n * 10 for n in range(20)
    ]


def test_single_worker_matches_map():
    assert list(imap_ordered(lambda x: x + 1, [3, 1, 2], workers=1)) == [4, 2, 3]


def test_empty_input():
    assert list(imap_ordered(lambda x: x, [], workers=2)) == []


def test_exceptions_propagate():
    def boom(n):
        if n == 3:
            raise RuntimeError("item 3 failed")
        return n

    with pytest.raises(RuntimeError, match="item 3 failed"):
        list(imap_ordered(boom, range(6), workers=2))


def test_input_is_consumed_incrementally():
    pulled = []

    def source():
        for n in range(100):
            pulled.append(n)
            yield n

    iterator = imap_ordered(lambda x: x, source(), workers=2)
    assert next(iterator) == 0
    # A bounded window (workers x 4) means the generator cannot have
    # been drained just to produce the first result.
    assert len(pulled) <= 2 * 4 + 1


def test_workers_must_be_positive():
    with pytest.raises(ValueError):
        list(imap_ordered(lambda x: x, [1], workers=0))
