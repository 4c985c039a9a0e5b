import numpy as np
import pytest

from gtstokes.sampling import cone_margin, default_margin, random_herm0, sample_batch
from gtstokes.verify import SUITES, RunConfig, run_suite


@pytest.mark.parametrize("suite, n, samples", [
    ("gt", 3, 5), ("gt", 5, 3), ("caterpillar", 4, 4), ("am", 3, 4), ("am", 6, 2),
    ("oracle-xcheck", 2, 1), ("oracle-xcheck", 3, 1), ("iso", 2, 1), ("iso", 3, 1),
])
def test_suites_pass(suite, n, samples):
    rep = run_suite(suite, RunConfig(seed=3, n=n, samples=samples))
    assert rep.passed, [c for c in rep.checks if not c.passed]
    names = [c.name for c in rep.checks]
    assert len(names) == len(set(names))


def test_parallel_matches_serial():
    a = run_suite("am", RunConfig(seed=5, n=3, samples=4))
    b = run_suite("am", RunConfig(seed=5, n=3, samples=4, jobs=2))
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_unknown_suite_and_bad_n():
    with pytest.raises(ValueError):
        run_suite("nope", RunConfig())
    with pytest.raises(ValueError):
        run_suite("oracle-xcheck", RunConfig(n=4))
    with pytest.raises(ValueError):
        run_suite("mainthm", RunConfig(n=2))
    assert set(SUITES) == {"gt", "caterpillar", "am", "oracle-xcheck", "iso", "mainthm"}


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_sampler_margin(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        A = random_herm0(n, rng)
        assert np.allclose(A, A.conj().T)
        assert cone_margin(A) >= default_margin(n)


def test_sampler_norm_and_real():
    rng = np.random.default_rng(0)
    A = random_herm0(3, rng, max_norm=1.5, real=True)
    assert np.isrealobj(A) and np.linalg.norm(A, 2) <= 1.5 + 1e-12
    a, b = sample_batch(3, 2, seed=9), sample_batch(3, 2, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
