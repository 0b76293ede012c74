import json

import numpy as np
import pytest

from config.errors import DataFormatError, DomainError
from interactions.loader import load_interactions, load_split, read_pairs, write_interactions, write_split
from interactions.popularity import popularity_distribution
from interactions.schemas import InteractionDataset
from interactions.splitting import split_dataset, split_sizes
from interactions.synthetic import block_of, expected_interactions, generate_synthetic
from tests.helpers import write_lines


class TestLoadInteractions:

    def test_direct_read(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["0 0", "0 1", "1 0"]))
        assert (ds.num_users, ds.num_items, len(ds)) == (2, 2, 3)

    def test_duplicates_counted_once(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["0 0", "0 0", "1 1"]))
        assert len(ds) == 2
        assert ds.item_popularity.sum() == len(ds)

    def test_blank_and_comment_lines_skipped(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["# header", "", "3\t7", "  ", "5 7"]))
        assert len(ds) == 2

    def test_sparse_ids_reindexed_densely(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["10 100", "20 300", "10 300"]))
        assert (ds.num_users, ds.num_items) == (2, 2)
        assert ds.user_ids.tolist() == [10, 20]
        assert ds.item_ids.tolist() == [100, 300]
        assert ds.positives == {(0, 0), (0, 1), (1, 1)}

    def test_written_raw_ids_load_back(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["10 100", "20 300", "10 300", "30 200"]))
        again = load_interactions(write_interactions(ds, str(tmp_path / "again.tsv"), raw_ids=True))
        assert again.same_interactions(ds)
        np.testing.assert_array_equal(again.user_ids, ds.user_ids)
        np.testing.assert_array_equal(again.item_ids, ds.item_ids)

    def test_written_dense_ids(self, tmp_path):
        ds = load_interactions(write_lines(tmp_path, ["10 100", "20 300"]))
        path = write_interactions(ds, str(tmp_path / "dense.tsv"))
        assert sorted(zip(*read_pairs(path))) == [(0, 0), (1, 1)]

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = write_lines(tmp_path, ["0 0", "0 x", "1 1"])
        with pytest.raises(DataFormatError) as exc:
            read_pairs(path)
        assert exc.value.line_no == 2

    def test_three_tokens_rejected(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_interactions(write_lines(tmp_path, ["0 0 1"]))

    def test_star_graph_filtered_to_empty(self, tmp_path):
        path = write_lines(tmp_path, [f"0 {i}" for i in range(10)])
        with pytest.raises(DomainError):
            load_interactions(path, min_count=2)

    def test_min_count_fixpoint(self, tmp_path):
        # item 9 has degree 1; removing it leaves user 2 with one interaction
        lines = ["0 0", "0 1", "1 0", "1 1", "2 1", "2 9"]
        ds = load_interactions(write_lines(tmp_path, lines), min_count=2)
        assert ds.num_users == 2 and ds.num_items == 2 and len(ds) == 4


class TestDatasetQueries:

    def test_user_items_and_degree(self, tiny_ds):
        assert tiny_ds.user_items(1).tolist() == [1, 2, 3]
        assert tiny_ds.user_degree().tolist() == [2, 3, 1]
        assert tiny_ds.candidate_items(0).tolist() == [2, 3, 4]

    def test_contains_vectorised(self, tiny_ds):
        got = tiny_ds.contains(np.array([0, 0, 2, 2]), np.array([1, 2, 4, 0]))
        assert got.tolist() == [True, False, True, False]

    def test_out_of_range_pair_rejected(self):
        with pytest.raises(DomainError):
            InteractionDataset.from_pairs([(0, 5)], num_users=1, num_items=5)

    def test_arrays_read_only(self, tiny_ds):
        with pytest.raises(ValueError):
            tiny_ds.users[0] = 2


class TestSplit:

    def test_exact_division(self):
        assert split_sizes(500, (3, 1, 1)) == (300, 100, 100)

    def test_rounding_goes_to_train(self):
        assert split_sizes(7, (3, 1, 1)) == (5, 1, 1)

    def test_partition_disjoint_and_complete(self, planted_ds):
        split = split_dataset(planted_ds, seed=3)
        parts = [split.train.positives, split.valid.positives, split.test.positives]
        assert not (parts[0] & parts[1] or parts[0] & parts[2] or parts[1] & parts[2])
        assert parts[0] | parts[1] | parts[2] == planted_ds.positives

    def test_exact_partition_for_many_seeds(self):
        ds = generate_synthetic(12, 18, 3, density=0.4, noise=0.1, seed=4)
        expected_sizes = split_sizes(len(ds), (3, 1, 1))
        for seed in range(1000):
            split = split_dataset(ds, seed=seed)
            assert split.sizes() == expected_sizes
            keys = np.concatenate([split.train.pair_keys, split.valid.pair_keys, split.test.pair_keys])
            np.testing.assert_array_equal(np.sort(keys), ds.pair_keys)

    def test_deterministic_given_seed(self, planted_ds):
        a = split_dataset(planted_ds, seed=5)
        b = split_dataset(planted_ds, seed=5)
        c = split_dataset(planted_ds, seed=6)
        assert a.train.same_interactions(b.train)
        assert not a.train.same_interactions(c.train)

    def test_too_small(self):
        ds = InteractionDataset.from_pairs([(0, 0), (0, 1), (1, 0), (1, 1)])
        with pytest.raises(DomainError):
            split_dataset(ds)

    def test_written_split_loads_back(self, planted_split, tmp_path):
        write_split(planted_split, str(tmp_path / "split"))
        loaded = load_split(str(tmp_path / "split"))
        manifest = json.loads((tmp_path / "split" / "split.json").read_text())
        assert manifest["sizes"]["train"] == len(planted_split.train)
        for part in ("train", "valid", "test"):
            assert getattr(loaded, part).same_interactions(getattr(planted_split, part))


class TestSynthetic:

    def test_noise_free_is_block_diagonal(self):
        ds = generate_synthetic(60, 120, 3, density=0.3, noise=0.0, seed=1)
        assert np.array_equal(block_of(ds.users, 60, 3), block_of(ds.items, 120, 3))

    def test_noise_one_rejected(self):
        with pytest.raises(DomainError):
            generate_synthetic(60, 120, 3, density=0.3, noise=1.0)

    def test_blocks_must_divide(self):
        with pytest.raises(DomainError):
            generate_synthetic(61, 120, 3, density=0.3, noise=0.0)

    def test_size_within_three_sigma(self, planted_ds):
        expected = expected_interactions(60, 120, 3, 0.3, 0.05)
        assert expected == pytest.approx(792.0)
        sigma = np.sqrt(60 * (40 * 0.3 * 0.7 + 80 * 0.015 * 0.985))
        assert abs(len(planted_ds) - expected) < 3 * sigma

    def test_deterministic(self):
        a = generate_synthetic(30, 30, 3, 0.3, 0.1, seed=9)
        b = generate_synthetic(30, 30, 3, 0.3, 0.1, seed=9)
        assert a.same_interactions(b)


class TestPopularity:

    def test_uniform(self):
        np.testing.assert_allclose(popularity_distribution([1, 1, 1, 1], 0.75), [0.25] * 4)

    def test_formula(self):
        p = popularity_distribution([1, 2, 4], 0.75)
        np.testing.assert_allclose(p, [0.1815, 0.3052, 0.5133], atol=1e-4)
        assert abs(p.sum() - 1.0) < 1e-12

    def test_zero_popularity_excluded(self):
        for beta in (0.0, 0.75, 2.0):
            np.testing.assert_allclose(popularity_distribution([0, 5], beta), [0.0, 1.0])

    def test_sums_to_one_for_random_counts(self, rng):
        for _ in range(100):
            counts = rng.integers(0, 50, size=int(rng.integers(1, 40)))
            counts[rng.integers(counts.size)] += 1
            beta = float(rng.uniform(0.0, 2.0))
            p = popularity_distribution(counts, beta)
            assert abs(p.sum() - 1.0) < 1e-12
            assert np.all(p[counts == 0] == 0.0)
            assert np.all(p[counts > 0] > 0.0)

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError):
            popularity_distribution([0, 0, 0], 0.75)

    def test_from_dataset(self, tiny_ds):
        p = popularity_distribution(tiny_ds, 1.0)
        np.testing.assert_allclose(p, tiny_ds.item_popularity / len(tiny_ds))
