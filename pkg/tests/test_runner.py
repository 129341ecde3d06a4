import time

import numpy as np
import pytest

from helpers import lanczos_norm, loglog_slope, parse_float_list, parse_range, write_csv
from runner import default_threads, run_rows


def test_rows_come_back_in_input_order():
    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x

    assert run_rows(slow_square, range(5), threads=4) == [0, 1, 4, 9, 16]
    assert run_rows(slow_square, range(5), threads=1) == [0, 1, 4, 9, 16]


def test_row_errors_are_raised(caplog):
    def fail_on_two(x):
        if x == 2:
            raise ValueError("bad row")
        return x

    with pytest.raises(ValueError, match="bad row"):
        run_rows(fail_on_two, range(4), threads=2, label="Scan")
    assert "[Scan] Row 2 failed" in caplog.text
    with pytest.raises(ValueError):
        run_rows(fail_on_two, [], threads=0)


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.delenv("DIRAC_LAP_THREADS", raising=False)
    assert default_threads() == 1
    monkeypatch.setenv("DIRAC_LAP_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("DIRAC_LAP_THREADS", "many")
    with pytest.raises(ValueError):
        default_threads()
    monkeypatch.setenv("DIRAC_LAP_THREADS", "0")
    with pytest.raises(ValueError):
        default_threads()


def test_ranges_and_lists():
    assert parse_float_list("1, 0.5,0.25") == [1.0, 0.5, 0.25]
    assert parse_range("-1:1:5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert parse_range("0.3") == [0.3]
    with pytest.raises(ValueError):
        parse_range("0:1")
    with pytest.raises(ValueError):
        parse_range("0:1:-2")


def test_loglog_slope():
    x = [1.0, 2.0, 4.0, 8.0]
    assert loglog_slope(x, [v ** 1.5 for v in x]) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        loglog_slope([1.0], [1.0])


def test_lanczos_norm_on_a_diagonal_operator():
    scale = np.array([3.0, 1.0, 0.5, 0.1])
    result = lanczos_norm(lambda v: scale ** 2 * v, (4,), tol=1e-12, max_iter=1000)
    assert result.converged
    assert result.estimate == pytest.approx(3.0, rel=1e-10)
    assert result.iterations >= 1
    zero = lanczos_norm(lambda v: 0 * v, (4,))
    assert zero.converged and zero.estimate == 0.0
    tiny = lanczos_norm(lambda v: np.array([4.0, 1.0]) * v, (2,))
    assert tiny.converged and tiny.estimate == pytest.approx(2.0)


def test_lanczos_norm_flags_a_capped_solve():
    scale = np.linspace(1.0, 2.0, 400).reshape(20, 20)
    capped = lanczos_norm(lambda v: scale ** 2 * v, (20, 20), tol=1e-300, max_iter=1)
    assert not capped.converged
    assert 0 < capped.estimate <= 2.0 * (1 + 1e-12)


def test_lanczos_norm_matches_dense_singular_value():
    rng = np.random.default_rng(4)
    S = rng.standard_normal((60, 60)) + 1j * rng.standard_normal((60, 60))
    result = lanczos_norm(lambda v: S.conj().T @ (S @ v), (60,), tol=1e-12)
    assert result.estimate == pytest.approx(np.linalg.norm(S, 2), rel=1e-9)
    assert result.rayleigh_imag < 1e-8


def test_csv_floats_round_trip(tmp_path):
    path = write_csv(str(tmp_path / "t.csv"), ["a", "b"], [[0.1, True]])
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines == ["a,b", "0.1,True"]
