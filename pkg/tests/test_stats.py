import logging

import pytest

from edgeworth.stats import Counter, Stats

def test_update_and_merge():
    first = Stats()
    first.update(Stats.PARTITION, total=10, pruned=4)
    second = Stats()
    second.update(Stats.PARTITION, total=5, pruned=1, runtime=0.5)
    second.update(Stats.REPLICATE, total=100, failure=3)

    first += second
    assert first.total(Stats.PARTITION) == 15
    assert first.pruned(Stats.PARTITION) == 5
    assert first.time(Stats.PARTITION) == pytest.approx(0.5)
    assert first.failure(Stats.REPLICATE) == 3
    assert first.snapshot()[Stats.REPLICATE].rate() == pytest.approx(0.03)

    first.reset()
    assert first.total(Stats.PARTITION) == 0
    assert Counter().rate() == 0.0

def test_invalid_stat():
    stats = Stats()
    with pytest.raises(Stats.StatError):
        stats.update(Stats.NUM_STATS, total=1)
    with pytest.raises(Stats.StatError):
        stats.total('partitions')
    with pytest.raises(TypeError):
        stats += 1

def test_dump_skips_idle_stats(caplog):
    stats = Stats()
    stats.update(Stats.SERIES, total=2)
    with caplog.at_level(logging.INFO, logger='edgeworth.test'):
        stats.dump(logging.getLogger('edgeworth.test'))
    assert len(caplog.records) == 1
    assert caplog.records[0].getMessage().startswith('[Series] 2 total')

def test_timer():
    with Stats.Timer() as timer:
        sum(range(1000))
    assert timer.elapsed() >= 0
