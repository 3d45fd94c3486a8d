import itertools

import numpy as np
import pytest

from src.core.dataset import Dataset
from src.core.infoscore import (
    ScoreCache, bic, bic_star, conditional_entropy, contingency, entropy, joint_codes, mutual_information,
    network_bic, uncertainty_coefficient,
)
from src.exceptions import CacheMissError, ScoreError


def test_entropy_of_three_to_one_split():
    ds = Dataset.from_codes({"x": [0, 0, 0, 1]})
    assert entropy(ds, 0) == pytest.approx(0.562335, abs=1e-6)


def test_constant_variable_has_no_entropy():
    ds = Dataset.from_codes({"x": [0, 0, 0], "y": [0, 1, 0]}, cardinalities={"x": 2, "y": 2})
    assert entropy(ds, 0) == 0.0
    assert uncertainty_coefficient(ds, 0, [1]) == 0.0


def test_identical_variables_explain_each_other_fully():
    ds = Dataset.from_codes({"x": [0, 1, 2, 1, 0, 2], "y": [0, 1, 2, 1, 0, 2]})
    assert mutual_information(ds, 0, [1]) == pytest.approx(entropy(ds, 0))
    assert conditional_entropy(ds, 0, [1]) == pytest.approx(0.0, abs=1e-12)
    assert uncertainty_coefficient(ds, 0, [1]) == pytest.approx(1.0)


def test_independent_variables_share_no_information():
    ds = Dataset.from_codes({"x": [0, 0, 1, 1], "y": [0, 1, 0, 1]})
    assert mutual_information(ds, 0, [1]) == pytest.approx(0.0, abs=1e-12)
    assert uncertainty_coefficient(ds, 0, [1]) == pytest.approx(0.0, abs=1e-12)


def test_empty_explanation_gives_zero():
    ds = Dataset.from_codes({"x": [0, 1, 1]})
    assert uncertainty_coefficient(ds, 0, []) == 0.0


def test_variable_cannot_explain_itself():
    ds = Dataset.from_codes({"x": [0, 1, 1]})
    with pytest.raises(ScoreError):
        uncertainty_coefficient(ds, 0, [0])


def test_uncertainty_is_bounded_and_grows_with_supersets():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n_vars = int(rng.integers(3, 6))
        columns = {f"v{j}": rng.integers(0, int(rng.integers(2, 5)), 60) for j in range(n_vars)}
        ds = Dataset.from_codes(columns)
        d = int(rng.integers(n_vars))
        others = [v for v in range(n_vars) if v != d]
        e = [v for v in others if rng.random() < 0.5]
        extra = [v for v in others if v not in e]
        u = uncertainty_coefficient(ds, d, e)

        assert 0.0 <= u <= 1.0
        if extra:
            assert uncertainty_coefficient(ds, d, e + extra[:1]) >= u - 1e-12


def test_joint_codes_distinguish_every_combination():
    ds = Dataset.from_codes({"a": [0, 1, 0, 1], "b": [0, 0, 2, 2]}, cardinalities={"a": 2, "b": 3})
    codes, size = joint_codes(ds, (0, 1))
    assert size == 6
    assert len(set(codes.tolist())) == 4


def test_contingency_counts_observed_parent_states():
    ds = Dataset.from_codes({"x": [0, 1, 1, 1], "p": [0, 0, 1, 1]})
    table = contingency(ds, 0, [1])
    assert table.n == 4
    assert sorted(map(tuple, table.counts.tolist())) == [(0, 2), (1, 1)]


def test_bic_without_parents():
    ds = Dataset.from_codes({"x": [0, 0, 1, 1]})
    assert bic(ds, 0, ()) == pytest.approx(4 * np.log(0.5) - 0.5 * np.log(4))


def test_bic_with_a_perfect_parent():
    ds = Dataset.from_codes({"x": [0, 0, 1, 1], "y": [0, 0, 1, 1]})
    # log-likelihood 0, penalty (ln 4 / 2) * q=2 * (r - 1)=1
    assert bic(ds, 0, (1,)) == pytest.approx(-np.log(4))


def test_bic_rejects_self_parent():
    ds = Dataset.from_codes({"x": [0, 1]})
    with pytest.raises(ScoreError):
        bic(ds, 0, (0,))


def test_bic_is_cached_per_canonical_parent_set(chain_dataset):
    cache = ScoreCache()
    score = bic(chain_dataset, 2, [1, 0], cache)

    assert (2, (0, 1)) in cache
    assert bic(chain_dataset, 2, (0, 1), cache) == score
    assert len(cache) == 1


def test_bic_star_adds_exact_scores(chain_dataset):
    cache = ScoreCache()
    for parents in [(), (0,), (1,)]:
        bic(chain_dataset, 2, parents, cache)

    expected = cache.get(2, (0,)) + cache.get(2, (1,)) - cache.get(2, ())
    assert bic_star(2, (0,), (1,), cache) == pytest.approx(expected)


def test_bic_star_needs_cached_scores(chain_dataset):
    cache = ScoreCache()
    bic(chain_dataset, 2, (0,), cache)
    with pytest.raises(CacheMissError):
        bic_star(2, (0,), (1,), cache)
    with pytest.raises(ScoreError):
        bic_star(2, (0,), (0, 1), cache)


def test_network_bic_is_decomposable(chain_dataset):
    parents = {0: (), 1: (0,), 2: (1,)}
    assert network_bic(chain_dataset, parents) == pytest.approx(sum(bic(chain_dataset, x, p) for x, p in parents.items()))


def test_true_parent_beats_empty_set(chain_dataset):
    assert bic(chain_dataset, 2, (1,)) > bic(chain_dataset, 2, ())
    assert bic(chain_dataset, 2, (1,)) > bic(chain_dataset, 2, (0,))


def test_cache_fingerprint_is_per_child(chain_dataset):
    cache = ScoreCache()
    bic(chain_dataset, 1, (0,), cache)
    before = cache.fingerprint(1)
    for parents in itertools.chain.from_iterable(itertools.combinations((0, 1), k) for k in range(3)):
        bic(chain_dataset, 2, parents, cache)

    assert cache.fingerprint(1) == before
    assert cache.fingerprint() != before
