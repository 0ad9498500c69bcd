from polygreen.parallel import THREADS_ENV, parallel_map, worker_count


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENV, "0")
    assert worker_count() == 1


def test_bad_worker_count_falls_back(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "many")
    assert worker_count() >= 1


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    assert parallel_map(lambda v: v * v, list(range(20))) == [
        v * v for v in range(20)
    ]
    monkeypatch.setenv(THREADS_ENV, "1")
    assert parallel_map(str, [1, 2]) == ["1", "2"]
    assert parallel_map(str, []) == []
