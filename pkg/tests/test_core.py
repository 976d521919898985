import math
import random
import threading
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gjesim import (AugmentedMatrix, InjectionError, OpCounter, PivotMatrix, TimeFunction, TimeVaryingSystem,
                    VariableEntry, inject_variables, pivot_capacity)


def capacity_by_summation(n):
    return sum(n - i for i in range(n - 1))


@pytest.mark.parametrize("n, expected", [(3, 5), (1, 0), (100, 5049)])
def test_pivot_capacity_examples(n, expected):
    assert pivot_capacity(n) == expected
    assert capacity_by_summation(n) == expected


@given(st.integers(min_value=1, max_value=5000))
def test_pivot_capacity_matches_row_tail_sum(n):
    assert pivot_capacity(n) == capacity_by_summation(n)


def test_pivot_capacity_rejects_zero():
    with pytest.raises(ValueError):
        pivot_capacity(0)


def test_publish_first_fig1_pivot_row():
    P = PivotMatrix(3)
    assert not P.is_ready(0)
    assert P.read(0) is None
    P.publish(0, [-1.0, -1.0, 0.0])
    assert P.is_ready(0)
    assert P.read(0).tolist() == [-1.0, -1.0, 0.0]


def test_published_rows_are_immutable_and_bit_exact():
    P = PivotMatrix(4)
    tail = np.array([0.1, -2.5e-300, math.pi, 7.0])
    P.publish(0, tail)
    tail[0] = 99.0
    got = P.read(0)
    assert got.tobytes() == np.array([0.1, -2.5e-300, math.pi, 7.0]).tobytes()
    with pytest.raises(ValueError):
        got[0] = 1.0


def test_double_publish_is_an_assertion():
    P = PivotMatrix(2)
    P.publish(1, [3.0])
    with pytest.raises(AssertionError):
        P.publish(1, [4.0])


def test_tail_length_checked():
    P = PivotMatrix(3)
    with pytest.raises(AssertionError):
        P.publish(1, [1.0, 2.0, 3.0])


def test_read_out_of_range():
    P = PivotMatrix(3)
    with pytest.raises(IndexError):
        P.read(3)
    with pytest.raises(IndexError):
        P.is_ready(-1)


def test_stored_elements_for_n8():
    n = 8
    P = PivotMatrix(n)
    for i in range(n):
        P.publish(i, np.arange(n - i, dtype=float))
    assert P.stored_elements() == 35 == capacity_by_summation(n)
    assert P.stored_elements(upto=n) == 36


def test_concurrent_readers_never_see_partial_rows():
    n = 64
    P = PivotMatrix(n)
    rng = random.Random(5)
    expected = [np.full(n - i, float(i) + 0.5) for i in range(n)]
    failures = []

    def reader():
        for i in range(n):
            row = P.wait(i)
            if row.tobytes() != expected[i].tobytes():
                failures.append(i)

    def writer():
        for i in range(n):
            time.sleep(rng.random() * 1e-4)
            P.publish(i, expected[i])

    readers = [threading.Thread(target=reader) for _ in range(8)]
    for t in readers:
        t.start()
    w = threading.Thread(target=writer)
    w.start()
    w.join()
    for t in readers:
        t.join()
    assert failures == []


def test_time_functions():
    assert TimeFunction.constant(4.5)(123.0) == 4.5
    r2 = TimeFunction.sinusoid(900, 900, 0.5, 0)
    assert r2(0.5) == 1800.0
    assert r2(0.0) == 900.0
    with pytest.raises(ValueError):
        TimeFunction("cos", (1.0,))
    with pytest.raises(ValueError):
        TimeFunction("sin", (1.0, 2.0))


def test_inject_fig1(fig1):
    before = fig1.base.data.tobytes()
    A = inject_variables(fig1, 0.5)
    assert A.data[2, 2] == 1800.0
    assert inject_variables(fig1, 0.0).data[2, 2] == 900.0
    assert fig1.base.data.tobytes() == before
    assert inject_variables(fig1, 0.5) == A


def test_inject_without_variables_copies_base():
    s = TimeVaryingSystem(AugmentedMatrix([[2.0, 1.0]]))
    A = inject_variables(s, 3.0)
    assert A == s.base
    assert A.data is not s.base.data


def test_inject_non_finite_names_entry():
    s = TimeVaryingSystem(AugmentedMatrix([[2.0, 1.0]]), [VariableEntry(0, 0, TimeFunction.constant(math.inf))])
    with pytest.raises(InjectionError, match=r"\(0, 0\).*t=1.5"):
        inject_variables(s, 1.5)


@settings(max_examples=50)
@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_inject_is_pure(t):
    s = TimeVaryingSystem(AugmentedMatrix(np.arange(12.0).reshape(3, 4)),
                          [VariableEntry(1, 3, TimeFunction.sinusoid(1, 2, 3, 4))])
    before = s.base.data.tobytes()
    assert inject_variables(s, t) == inject_variables(s, t)
    assert s.base.data.tobytes() == before


def test_augmented_matrix_validation():
    with pytest.raises(ValueError):
        AugmentedMatrix(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        AugmentedMatrix([[1.0, np.nan]])
    src = np.ones((2, 3))
    A = AugmentedMatrix(src)
    src[0, 0] = 5
    assert A.data[0, 0] == 1.0


def test_system_rejects_duplicate_or_outside_entries():
    base = AugmentedMatrix(np.eye(2, 3))
    f = TimeFunction.constant(1.0)
    with pytest.raises(ValueError):
        TimeVaryingSystem(base, [VariableEntry(0, 0, f), VariableEntry(0, 0, f)])
    with pytest.raises(ValueError):
        TimeVaryingSystem(base, [VariableEntry(2, 0, f)])
    TimeVaryingSystem(base, [VariableEntry(1, 2, f)])


def test_op_counter():
    c = OpCounter()
    c.scale(4)
    c.add_rows(3, 4)
    c.swap()
    assert (c.element_updates, c.row_ops) == (16, 5)
    snap = c.snapshot()
    c.reset()
    assert (c.element_updates, c.row_ops) == (0, 0)
    assert snap.element_updates == 16
