"""Random well-typed term generation and the property-check harness."""

import json

import pytest

from lamalg.propgen import (
    CHECK_NAMES,
    GenConfig,
    base_context,
    gen_typed_term,
    render_figures,
    run_checks,
    write_report,
)
from lamalg.syntax import term_key, type_equiv
from lamalg.typecheck import synthesize


SMALL = GenConfig(seed=7, sample_count=40)


@pytest.fixture(scope="module")
def small_result():
    return run_checks(SMALL)


@pytest.fixture(scope="module")
def small_rerun():
    return run_checks(GenConfig(seed=7, sample_count=40))


class TestGeneration:
    def test_terms_carry_their_synthesized_type(self):
        ctx = base_context(SMALL)
        for term, ty in gen_typed_term(SMALL):
            assert type_equiv(synthesize(ctx, term), ty)

    def test_sample_count_is_respected(self):
        assert sum(1 for _ in gen_typed_term(SMALL)) == SMALL.sample_count

    def test_same_seed_same_stream(self):
        a = [term_key(t) for t, _ in gen_typed_term(SMALL)]
        b = [term_key(t) for t, _ in gen_typed_term(GenConfig(seed=7, sample_count=40))]
        assert a == b

    def test_different_seed_different_stream(self):
        a = [term_key(t) for t, _ in gen_typed_term(SMALL)]
        b = [term_key(t) for t, _ in gen_typed_term(GenConfig(seed=8, sample_count=40))]
        assert a != b


class TestRunChecks:
    def test_small_run_is_clean(self, small_result):
        assert small_result.ok
        assert [r.name for r in small_result.reports] == list(CHECK_NAMES)
        assert all(r.failures == [] for r in small_result.reports)

    def test_summary_shape(self, small_result):
        s = small_result.summary()
        assert s["seed"] == 7 and s["samples"] == 40 and s["ok"] is True
        assert set(s["checks"]) == set(CHECK_NAMES)
        assert s["rules_covered"] <= s["rules_total"]

    def test_deterministic_records(self, small_result, small_rerun):
        assert small_result.records == small_rerun.records
        # Wall-clock timings vary; the countable facts must not.
        for ra, rb in zip(small_result.reports, small_rerun.reports):
            assert (ra.name, ra.samples, ra.failures) == (rb.name, rb.samples, rb.failures)

    def test_coverage_counts_rule_firings(self, small_result):
        assert sum(small_result.coverage.values()) > 0
        assert all(v > 0 for v in small_result.coverage.values())


class TestReporting:
    def test_report_is_one_record_per_sample_plus_summary(self, small_result, tmp_path):
        out = write_report(small_result, tmp_path / "fuzz" / "report.ndjson")
        lines = out.read_text().splitlines()
        assert len(lines) == SMALL.sample_count + 1
        *records, tail = [json.loads(line) for line in lines]
        assert all("term" in r and "type" in r for r in records)
        summary = tail["summary"]
        assert summary["samples"] == SMALL.sample_count and summary["ok"] is True

    def test_report_creates_missing_directories(self, small_result, tmp_path):
        out = write_report(small_result, tmp_path / "a" / "b" / "c.ndjson")
        assert out.exists()

    def test_figures_are_rendered_to_files(self, small_result, tmp_path):
        paths = render_figures(small_result, tmp_path)
        assert len(paths) == 3
        for p in paths:
            assert p.suffix == ".png" and p.stat().st_size > 0
