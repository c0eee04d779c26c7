import math
import os

import pytest

import mertens

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data", "zeros_2000.txt")


def mobius_table(n):
    mu = [1] * (n + 1)
    is_composite = [False] * (n + 1)
    for p in range(2, n + 1):
        if is_composite[p]:
            continue
        for k in range(p, n + 1, p):
            if k > p:
                is_composite[k] = True
            mu[k] = -mu[k]
        for k in range(p * p, n + 1, p * p):
            mu[k] = 0
    return mu


def test_small_values_match_plain_summation():
    mu = mobius_table(2000)
    running = 0
    for n in range(1, 2001):
        running += mu[n]
        if n % 97 == 0 or n < 40:
            assert mertens.mertens(n) == running


def test_large_known_value_and_python_ints():
    n = 7766842813
    m = mertens.mertens(n)
    assert m == 50286
    assert round(abs(m) / math.sqrt(n), 6) == 0.570591


def test_quotient_map_and_batch():
    n = 10**8
    by_index = mertens.mertens_quotients(n)
    for c in (1, 2, 3, 7, 10, 100):
        assert by_index[c - 1] == mertens.mertens_naive(n // c)
    ns = [10**6, 123456, 10**7]
    assert mertens.mertens_many(ns) == [mertens.mertens_naive(x) for x in ns]


def test_sieves_agree():
    mu = mobius_table(5000)
    assert mertens.moebius(1, 5000) == mu[1:]
    assert mertens.moebius(10**10, 10**10 + 2000) == mertens.moebius(10**10, 10**10 + 2000, naive_sieve=True)


def test_fast_div():
    for n, d in [(0, 1), (2**64 - 1, 3), (2**64 - 1, 2**63 + 1), (12345678901234, 641)]:
        assert mertens.fast_div(n, d) == n // d


def test_errors_map_to_python():
    with pytest.raises(mertens.PreconditionError):
        mertens.mertens(-1)
    with pytest.raises(mertens.ParseError):
        mertens.ZeroTable.parse("14.1 1\n")
    with pytest.raises(mertens.MertensError):
        mertens.fast_div(1, 0)


def test_explicit_formula():
    table = mertens.ZeroTable.load(DATA)
    assert len(table) == 2000
    assert table.source.startswith("mpmath")
    sigma = mertens.q_sigma(table, 2000)
    assert 0.16 < sigma < 0.18
    # independent cosine sum at a modest ln x
    ln_x = 20.5
    direct = 2 * sum(a * math.cos(z * ln_x + b) for z, a, b in zip(table.z[:50], table.a[:50], table.b[:50]))
    assert mertens.q(table, 50, "20.5") == pytest.approx(direct, abs=1e-9)
    grid = mertens.q_grid(table, 50, "20.5", 0.01, 3)
    assert grid[0] == pytest.approx(direct, abs=1e-9)
    # exact value is close to the approximation
    n = 10**9
    exact = mertens.mertens(n) / math.sqrt(n)
    assert abs(exact - mertens.q(table, 2000, repr(math.log(n)))) < 0.05


def test_rebase_and_scan():
    table = mertens.ZeroTable.load(DATA)
    phases = mertens.rebased_phases(table, "1000")
    assert all(-math.pi <= b < math.pi for b in phases)
    step = math.pi / (3072 * table.z[0])
    out = mertens.threshold_scan(table, "1000", step, 20000, head_terms=7, head_threshold=0.3, full_terms=200,
                                 full_threshold=0.0)
    direct = [j for j, v in enumerate(mertens.q_grid(table, 7, "1000", step, 20000)) if abs(v) >= 0.3]
    assert out["flags"] == direct
    assert [h[0] for h in out["hits"]] == direct


def test_quasiperiod():
    table = mertens.ZeroTable.load(DATA)
    qp = mertens.quasiperiod_at(table, 2, 4, 274243136)
    assert qp.max_residual() <= 0.0013
    found = mertens.find_quasiperiod(table, 2, 4, 10**6, 0.01)
    assert found.max_residual() < 0.01
    with pytest.raises(mertens.NotFoundError):
        mertens.find_quasiperiod(table, 2, 4, 10, 1e-6)


def test_crossing_probability():
    p = mertens.crossing_probability(1, 10001, 0, 0, 60)
    assert p == pytest.approx(math.exp(-3600 / (2 * mertens.squarefree_density * 10000)))
