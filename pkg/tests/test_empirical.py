"""
Tests for the prime scans: coprime counts, checkpoints, obstructions,
inclusion-exclusion and density comparisons.
"""

import csv
import json

import pytest

from src.arith import sieve_primes
from src.constants import F1, SerrePairProfile, f_closed
from src.curves import count_points_naive
from src.empirical import (
    CheckpointWriter,
    ObstructionPattern,
    ScanPlan,
    a_d_count,
    compare_report,
    divisibility_profile,
    find_obstruction,
    gcd_histogram,
    inclusion_exclusion_check,
    load_obstructions,
    max_order,
    obstruction_scan,
    pi_coprime,
    predicted_density,
    quadratic_pattern,
    read_checkpoint,
    run_scan,
    verify_checkpoint,
    write_csv,
)
from src.errors import CheckpointError, DomainError, NotSerrePair, exit_code_for

PAIRS = [("297.a1", "405.a1"), ("140.b1", "34020.c1"), ("484.a1", "847.c1")]

FULL_SCALE_COPRIME = {
    ("297.a1", "405.a1"): 2348734,
    ("140.b1", "34020.c1"): 2250887,
    ("484.a1", "847.c1"): 0,
}


@pytest.fixture
def small_pair(catalog):
    return catalog.curve("297.a1"), catalog.curve("405.a1")


@pytest.fixture
def obstructed_pair(catalog):
    return catalog.curve("484.a1"), catalog.curve("847.c1")


class TestPlan:
    def test_chunks_cover_range(self, small_pair):
        plan = ScanPlan(*small_pair, bound=10, chunk_size=4)
        assert plan.chunks() == [(0, 1, 4), (1, 5, 8), (2, 9, 10)]

    def test_max_order(self):
        assert max_order(100) == 121
        assert max_order(10**4) == 10201


class TestCoprimeCount:
    def test_small_bound(self, small_pair):
        count = pi_coprime(*small_pair, 100)
        assert count.pi_x == 25
        assert count.excluded_primes == [3, 5, 11]
        assert count.good_prime_count == 22
        assert 0 < count.coprime_count <= 22

    def test_bound_too_small(self, small_pair):
        with pytest.raises(DomainError):
            pi_coprime(*small_pair, 1)

    def test_chunking_does_not_change_count(self, small_pair):
        whole = pi_coprime(*small_pair, 5000, chunk_size=10**6)
        split = pi_coprime(*small_pair, 5000, chunk_size=700)
        assert (whole.pi_x, whole.good_prime_count, whole.coprime_count) == \
            (split.pi_x, split.good_prime_count, split.coprime_count)
        assert split.checkpoints[-1].coprime_count == split.coprime_count

    def test_workers_do_not_change_count(self, small_pair):
        serial = pi_coprime(*small_pair, 5000, workers=1, chunk_size=1000)
        parallel = pi_coprime(*small_pair, 5000, workers=3, chunk_size=1000)
        assert serial == parallel

    def test_threads_env(self, small_pair, monkeypatch):
        from src.config import load_settings, reset_settings
        monkeypatch.setenv("COPRIME_THREADS", "2")
        reset_settings(load_settings())
        assert pi_coprime(*small_pair, 3000, chunk_size=500).pi_x == 430

    def test_obstructed_pair_has_none(self, obstructed_pair):
        count = pi_coprime(*obstructed_pair, 10**4)
        assert count.coprime_count == 0
        assert count.excluded_primes == [2, 7, 11]


class TestCheckpoint:
    def test_chain_verifies(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        count = pi_coprime(*small_pair, 4000, checkpoint=path, chunk_size=1000)
        header, records = read_checkpoint(path)
        assert header.bound == 4000
        assert [r["chunk_index"] for r in records] == [0, 1, 2, 3]
        assert sum(r["coprime"] for r in records) == count.coprime_count
        assert verify_checkpoint(path) == (True, None)

    def test_tampered_record(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 3000, checkpoint=path, chunk_size=1000)
        lines = path.read_text().splitlines()
        record = json.loads(lines[2])
        record["coprime"] += 1
        lines[2] = json.dumps(record, sort_keys=True)
        path.write_text("\n".join(lines) + "\n")

        ok, error = verify_checkpoint(path)
        assert not ok
        assert "line 3" in error
        with pytest.raises(CheckpointError):
            pi_coprime(*small_pair, 3000, checkpoint=path, resume=True, chunk_size=1000)

    def test_dropped_record(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 3000, checkpoint=path, chunk_size=1000)
        lines = path.read_text().splitlines()
        path.write_text("\n".join([lines[0], lines[2], lines[3]]) + "\n")
        with pytest.raises(CheckpointError):
            read_checkpoint(path)

    def test_resume_matches_uninterrupted(self, small_pair, tmp_path):
        reference = pi_coprime(*small_pair, 6000, chunk_size=1000)

        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 6000, checkpoint=path, chunk_size=1000)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3]) + "\n")

        resumed = pi_coprime(*small_pair, 6000, checkpoint=path, resume=True, chunk_size=1000)
        assert resumed == reference
        _, records = read_checkpoint(path)
        assert len(records) == 6

    def test_resume_after_torn_write(self, small_pair, tmp_path):
        reference = pi_coprime(*small_pair, 3000, chunk_size=1000)

        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 3000, checkpoint=path, chunk_size=1000)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3]) + "\n" + lines[3][: len(lines[3]) // 2])

        ok, error = verify_checkpoint(path)
        assert not ok
        assert "line 4" in error

        resumed = pi_coprime(*small_pair, 3000, checkpoint=path, resume=True, chunk_size=1000)
        assert resumed == reference
        _, records = read_checkpoint(path)
        assert [r["chunk_index"] for r in records] == [0, 1, 2]

    def test_torn_line_before_tail_rejected(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 3000, checkpoint=path, chunk_size=1000)
        lines = path.read_text().splitlines()
        lines[2] = lines[2][: len(lines[2]) // 2]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CheckpointError):
            pi_coprime(*small_pair, 3000, checkpoint=path, resume=True, chunk_size=1000)

    def test_resume_without_file_starts_fresh(self, small_pair, tmp_path):
        path = tmp_path / "fresh.jsonl"
        count = pi_coprime(*small_pair, 2000, checkpoint=path, resume=True, chunk_size=1000)
        assert count.pi_x == 303
        assert path.exists()

    def test_existing_file_needs_resume(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 2000, checkpoint=path, chunk_size=1000)
        with pytest.raises(CheckpointError):
            pi_coprime(*small_pair, 2000, checkpoint=path, chunk_size=1000)

    def test_different_run_rejected(self, small_pair, tmp_path):
        path = tmp_path / "run.jsonl"
        pi_coprime(*small_pair, 2000, checkpoint=path, chunk_size=1000)
        with pytest.raises(CheckpointError):
            pi_coprime(*small_pair, 3000, checkpoint=path, resume=True, chunk_size=1000)

    def test_gcd_recording_not_checkpointed(self, small_pair, tmp_path):
        plan = ScanPlan(*small_pair, bound=1000, chunk_size=100, record_gcds=True)
        with pytest.raises(DomainError):
            run_scan(plan, checkpoint=tmp_path / "run.jsonl")

    def test_writer_chains_from_genesis(self, small_pair, tmp_path):
        header = ScanPlan(*small_pair, bound=100, chunk_size=100).header()
        writer = CheckpointWriter.create(tmp_path / "w.jsonl", header)
        first = writer.append({"chunk_index": 0, "coprime": 1})
        second = writer.append({"chunk_index": 1, "coprime": 2})
        assert first["prev_hash"] == "GENESIS"
        assert second["prev_hash"] == first["hash"]
        assert writer.run_id == header.run_id
        assert read_checkpoint(tmp_path / "w.jsonl")[0].run_id == header.run_id


class TestDivisibility:
    def test_d_one_counts_good_primes(self, small_pair):
        assert a_d_count(*small_pair, 1, 3000) == pi_coprime(*small_pair, 3000).good_prime_count

    def test_large_d_is_zero(self, small_pair):
        assert a_d_count(*small_pair, max_order(1000) + 1, 1000) == 0

    def test_d_must_be_positive(self, small_pair):
        with pytest.raises(DomainError):
            a_d_count(*small_pair, 0, 1000)

    def test_profile(self, small_pair):
        profile = SerrePairProfile.from_levels(6, 10)
        report = divisibility_profile(*small_pair, 3000, [2, 3, 4, 5], profile=profile)
        assert [row.d for row in report.rows] == [2, 3, 4, 5]
        assert report.pi_x == 430
        assert report.rows[2].predicted is None
        assert report.rows[0].predicted.as_fraction() == f_closed(2, profile)

    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_monotone_in_x(self, small_pair, d):
        counts = [a_d_count(*small_pair, d, x) for x in (500, 1000, 2000, 4000)]
        assert counts == sorted(counts)

    @pytest.mark.parametrize("d1,d2", [(2, 3), (2, 5), (3, 5), (4, 3)])
    def test_product_bounded_by_factors(self, small_pair, d1, d2):
        x = 3000
        both = a_d_count(*small_pair, d1 * d2, x)
        assert both <= min(a_d_count(*small_pair, d1, x), a_d_count(*small_pair, d2, x))

    def test_two_matches_naive_parity(self, small_pair):
        E1, E2 = small_pair
        excluded = set(pi_coprime(E1, E2, 1000).excluded_primes)
        expected = 0
        for p in sieve_primes(1000):
            if p in excluded:
                continue
            n1 = count_points_naive(E1.reduce(p)).order
            n2 = count_points_naive(E2.reduce(p)).order
            expected += n1 % 2 == 0 and n2 % 2 == 0
        assert a_d_count(E1, E2, 2, 1000) == expected

    @pytest.mark.slow
    def test_single_primes_near_prediction(self, small_pair):
        profile = SerrePairProfile.from_levels(6, 10)
        report = divisibility_profile(*small_pair, 10**6, [2, 3, 5], profile=profile, workers=2)
        assert report.pi_x == 78498
        for row in report.rows:
            observed = row.count / report.pi_x
            assert abs(observed - float(f_closed(row.d, profile))) < 5e-3, row.d

    def test_predicted_density(self):
        profile = SerrePairProfile.from_levels(6, 10)
        assert predicted_density(30, profile) == f_closed(30, profile)
        assert predicted_density(7, profile) == F1(7)
        assert predicted_density(42, profile) == f_closed(6, profile) * F1(7)
        assert predicted_density(12, profile) is None


class TestInclusionExclusion:
    @pytest.mark.parametrize("labels", PAIRS)
    def test_identity_holds(self, catalog, labels):
        report = inclusion_exclusion_check(catalog.curve(labels[0]), catalog.curve(labels[1]), 10**4)
        assert report.equal
        assert report.residual == 0
        assert report.d_max == max_order(10**4)

    @pytest.mark.parametrize("labels", PAIRS)
    def test_gcds_partition_good_primes(self, catalog, labels):
        E1, E2 = catalog.curve(labels[0]), catalog.curve(labels[1])
        totals, hist = gcd_histogram(E1, E2, 10**4)
        assert hist[0] == 0
        assert int(hist[1]) == totals.coprime
        assert totals.coprime + int(hist[2:].sum()) == totals.good
        assert totals.good + len(totals.excluded) == totals.pi_x == 1229

    def test_bound_guard(self, small_pair):
        with pytest.raises(DomainError):
            inclusion_exclusion_check(*small_pair, 10**4 + 1)


class TestObstruction:
    def test_quadratic_pattern_matches_recorded(self):
        recorded = find_obstruction("847.c1", "484.a1")
        assert quadratic_pattern(-11, 11, 2, 3) == recorded.pattern
        assert recorded.modulus == 11

    def test_quadratic_pattern_period(self):
        assert len(quadratic_pattern(-11, 22, 2, 3)) == 10
        assert quadratic_pattern(3, 12, 2, 3) == {1: 3, 5: 2, 7: 2, 11: 3}
        with pytest.raises(DomainError):
            quadratic_pattern(-11, 12, 2, 3)
        with pytest.raises(DomainError):
            quadratic_pattern(1, 4, 2, 3)

    def test_unknown_pair(self):
        with pytest.raises(DomainError):
            find_obstruction("297.a1", "405.a1")

    def test_missing_file(self, tmp_path):
        assert load_obstructions(tmp_path / "none.yaml") == []

    def test_holds(self, obstructed_pair):
        report = obstruction_scan(*obstructed_pair, 10**4)
        assert report.violation_count == 0
        assert report.coprime_count == 0
        assert report.checked_primes == 1229 - 3
        assert 11 in report.excluded_primes

    @pytest.mark.slow
    def test_holds_to_hundred_thousand(self, obstructed_pair):
        report = obstruction_scan(*obstructed_pair, 10**5)
        assert report.violation_count == 0
        assert report.checked_primes == 9592 - 3

    def test_negative_control(self, small_pair):
        pattern = ObstructionPattern(modulus=11, pattern=quadratic_pattern(-11, 11, 2, 3))
        report = obstruction_scan(*small_pair, 2000, obstruction=pattern)
        assert report.violation_count > 0
        assert len(report.violations) <= 20
        v = report.violations[0]
        assert v.gcd % v.divisor != 0
        assert v.residue == v.p % 11


class TestCompare:
    def test_serre_pair(self, small_pair):
        comparison = compare_report(*small_pair, 3000, cutoff=1000)
        report = comparison.report
        assert comparison.error is None
        assert report.predicted.ratio_num == "1150648"
        assert report.predicted.ratio_den == "1118065"
        low, high = (float(v) for v in report.predicted.interval)
        assert low <= float(report.predicted.value) <= high
        assert report.pi_x == 430

    def test_equal_levels(self, obstructed_pair):
        comparison = compare_report(*obstructed_pair, 2000)
        assert isinstance(comparison.error, NotSerrePair)
        assert exit_code_for(comparison.error) == 2
        assert comparison.report.predicted is None
        assert comparison.report.prediction_error
        assert comparison.report.coprime_count == 0

    def test_csv(self, small_pair, tmp_path):
        count = pi_coprime(*small_pair, 3000, chunk_size=1000)
        path = write_csv(count.checkpoints, tmp_path / "out" / "rows.csv")
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["p", "primes_seen", "good_primes", "coprime_count"]
        assert len(rows) == 4
        assert rows[-1] == ["2999", "430", str(count.good_prime_count), str(count.coprime_count)]


class TestDeskScale:
    @pytest.mark.slow
    @pytest.mark.parametrize("labels", PAIRS[:2])
    def test_million(self, catalog, labels):
        comparison = compare_report(catalog.curve(labels[0]), catalog.curve(labels[1]), 10**6, workers=2)
        report = comparison.report
        assert report.pi_x == 78498
        assert abs(float(report.observed) - float(report.predicted.value)) < 0.02

    @pytest.mark.slow
    def test_obstructed_million(self, obstructed_pair):
        assert pi_coprime(*obstructed_pair, 10**6, workers=2).coprime_count == 0


class TestFullScale:
    @pytest.mark.full
    @pytest.mark.parametrize("labels", PAIRS)
    def test_hundred_million(self, catalog, labels):
        count = pi_coprime(catalog.curve(labels[0]), catalog.curve(labels[1]), 10**8, workers=8)
        assert count.pi_x == 5761455
        assert count.coprime_count == FULL_SCALE_COPRIME[labels]
