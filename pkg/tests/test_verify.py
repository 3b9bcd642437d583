"""
Tests for the verification suites.
"""

import pytest

from src.errors import CoprimeError, DomainError
from src.verify import SUITES, Check, VerifyOptions, run_check, run_suite

FAST = VerifyOptions(max_ell=7, level_bound=420, obstruction_bound=10**4,
                     control_bound=2000, inclexcl_bound=2000, random_profiles=10)


@pytest.fixture
def fast_options(catalog):
    return VerifyOptions(**{**FAST.__dict__, "catalog": catalog})


class TestSuites:
    def test_registry(self):
        assert sorted(SUITES) == ["bounds", "charsum", "foracle", "inclexcl", "matcount", "obstruction"]

    @pytest.mark.parametrize("name", ["matcount", "charsum", "foracle", "obstruction", "inclexcl"])
    def test_suite_passes(self, name, fast_options):
        report = run_suite(name, fast_options)
        assert report.suite == name
        assert report.checks
        assert report.passed, [c for c in report.checks if not c.passed]

    def test_bounds_suite(self, fast_options):
        report = run_suite("bounds", fast_options)
        assert report.passed, [c for c in report.checks if not c.passed]
        assert any(c.name.startswith("extremal pairs") for c in report.checks)

    @pytest.mark.slow
    def test_defaults(self):
        for name in SUITES:
            assert run_suite(name).passed, name

    def test_table_framed_on_stderr(self, fast_options, capsys):
        run_suite("foracle", fast_options)
        captured = capsys.readouterr()
        assert captured.out == ""
        lines = captured.err.splitlines()
        assert "verify: foracle" in captured.err
        assert set(lines[-1]) == {"─"}
        assert any("PASS" in line for line in lines)

    def test_unknown_suite(self):
        with pytest.raises(CoprimeError):
            run_suite("nope")


class TestRunCheck:
    def test_failure_carries_counterexample(self):
        result = run_check(Check("always fails", lambda: (False, "1 != 2", "got 1, expected 2")))
        assert not result.passed
        assert result.counterexample == "got 1, expected 2"

    def test_domain_error_is_a_failure(self):
        def boom():
            raise DomainError("no")
        result = run_check(Check("raises", boom))
        assert not result.passed
        assert result.counterexample == "DomainError"
