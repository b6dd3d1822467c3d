import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regretlab import mc


def normal_draw(rng, k):
    return rng.standard_normal(k)


@pytest.mark.parametrize("samples", [1, 4095, 4096, 4097, 3 * 4096 + 17])
def test_chunking_is_independent_of_worker_count(samples):
    ref = mc.run_chunks(normal_draw, samples, 7, "x", workers=1)
    assert ref.size == samples
    for w in (2, 3, 8):
        np.testing.assert_array_equal(mc.run_chunks(normal_draw, samples, 7, "x", workers=w), ref)


def test_env_worker_count(monkeypatch):
    monkeypatch.setenv("REGRETLAB_THREADS", "3")
    assert mc.worker_count() == 3
    monkeypatch.setenv("REGRETLAB_THREADS", "0")
    assert mc.worker_count() == 1
    monkeypatch.setenv("REGRETLAB_THREADS", "lots")
    assert mc.worker_count() >= 1


def test_substreams_differ_by_name_seed_and_index():
    a = mc.substream(1, "a").random(4)
    assert not np.array_equal(a, mc.substream(1, "b").random(4))
    assert not np.array_equal(a, mc.substream(2, "a").random(4))
    assert not np.array_equal(a, mc.substream(1, "a", 1).random(4))
    np.testing.assert_array_equal(a, mc.substream(1, "a").random(4))
    # 64-bit seeds use both halves
    assert not np.array_equal(mc.substream(2**40, "a").random(4), mc.substream(0, "a").random(4))


def test_mean_and_stderr():
    e = mc.mean_and_stderr(np.array([1.0, 2.0, 3.0, 4.0]))
    assert e.value == 2.5
    assert e.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert mc.mean_and_stderr(np.full(10, 0.3)) == mc.Estimate(0.3, 0.0, 10)
    value, stderr = mc.mean_and_stderr(np.array([5.0]))
    assert (value, stderr) == (5.0, 0.0)
    with pytest.raises(ValueError):
        mc.run_chunks(normal_draw, 0, 0, "x")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_standard_normal_mean_within_error(seed):
    e = mc.estimate(normal_draw, 20000, seed, "n")
    assert abs(e.value) <= 5 * e.stderr
