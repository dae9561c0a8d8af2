import pytest

from edgeworth.worker import WorkerPool

class Square():
    def __init__(self, value):
        self.value = value

    def __call__(self, pool, worker):
        pool.record(self.value, self.value ** 2)

class Fail():
    def __call__(self, pool, worker):
        raise ValueError("bad task")

def test_results_recorded(config):
    with WorkerPool(config, size=3) as pool:
        assert pool.size() == 3
        for value in range(20):
            pool.enqueue(Square(value))
        results = pool.wait()
        assert results == {value: value ** 2 for value in range(20)}
        assert pool.results() == {}

def test_first_error_reraised(config):
    with WorkerPool(config, size=2) as pool:
        pool.enqueue(Square(2))
        pool.enqueue(Fail())
        with pytest.raises(ValueError):
            pool.wait()

        pool.enqueue(Square(3))
        assert pool.wait() == {3: 9}
