import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from sivfie.harness import (
    DIAGONAL_POINTS,
    STATS_COLUMNS,
    TABLE_COLUMNS,
    ErrorTable,
    ReportError,
    TrialStatistics,
    absolute_errors,
    compare_bases,
    confidence_interval,
    emit_report,
    load_report,
    render,
    run_trials,
    summarize,
)
from sivfie.basis import build_basis
from sivfie.problems import custom_problem, problem1
from sivfie.solver import solve_sivfie
from sivfie.stochastic import sample_brownian_path


def polynomial_problem():
    return custom_problem(lambda u, v, p: u + v * v, exact=lambda u, v: u + v * v, name="poly")


@pytest.fixture(scope="module")
def trials():
    return run_trials(problem1(), "chelyshkov", 2, 4, seed0=3, M=1024)


class TestConfidenceInterval:
    # reference mean, sd, n and interval
    @pytest.mark.parametrize("mean,sd,n,lo,hi", [
        (8.20046e-3, 1.5009e-3, 10, 7.12684e-3, 9.27408e-3),
    ])
    def test_reference_rows(self, mean, sd, n, lo, hi):
        got = confidence_interval(mean, sd, n)
        assert got[0] == pytest.approx(lo, abs=1e-6)
        assert got[1] == pytest.approx(hi, abs=1e-6)

    def test_quantile_nine_dof(self):
        lo, hi = confidence_interval(0.0, np.sqrt(10), 10)
        assert hi == pytest.approx(2.2621571628, abs=1e-9)
        assert lo == -hi

    def test_zero_sd(self):
        assert confidence_interval(0.5, 0.0, 10) == (0.5, 0.5)

    def test_needs_two_trials(self):
        with pytest.raises(ValueError):
            confidence_interval(1.0, 0.1, 1)

    def test_negative_sd(self):
        with pytest.raises(ValueError):
            confidence_interval(1.0, -0.1, 5)

    @given(st.floats(-1, 1), st.floats(0, 1), st.integers(2, 200))
    @settings(max_examples=50)
    def test_matches_scipy_interval(self, mean, sd, n):
        lo, hi = confidence_interval(mean, sd, n)
        ref = stats.t.interval(0.95, n - 1, loc=mean, scale=sd / np.sqrt(n)) if sd > 0 else (mean, mean)
        assert lo == pytest.approx(ref[0], abs=1e-12)
        assert hi == pytest.approx(ref[1], abs=1e-12)


class TestAbsoluteErrors:
    def test_diagonal_points(self):
        assert len(DIAGONAL_POINTS) == 10
        assert DIAGONAL_POINTS[0] == (0.05, 0.05) and DIAGONAL_POINTS[-1] == (0.95, 0.95)

    def test_exact_problem(self):
        p = polynomial_problem()
        table = absolute_errors(solve_sivfie(p, build_basis("chelyshkov", 2),
                                             sample_brownian_path(64, 0)), p)
        assert len(table.rows) == 10
        assert table.mae < 1e-12

    def test_requires_exact(self):
        p = custom_problem(lambda u, v, q: u)
        res = solve_sivfie(p, build_basis("chelyshkov", 1), sample_brownian_path(64, 0))
        with pytest.raises(ValueError):
            absolute_errors(res, p)


class TestTrials:
    def test_statistics_recompute(self, trials):
        x = np.array(trials.per_trial_mae)
        assert trials.n == 4 and trials.seeds == (3, 4, 5, 6)
        assert trials.mean == pytest.approx(x.mean(), rel=1e-14)
        assert trials.sd == pytest.approx(x.std(ddof=1), rel=1e-14)
        assert (trials.ci_lo, trials.ci_hi) == confidence_interval(trials.mean, trials.sd, 4)

    def test_per_trial_matches_single_solves(self, trials):
        b = build_basis("chelyshkov", 2)
        for seed, mae in zip(trials.seeds, trials.per_trial_mae):
            res = solve_sivfie(problem1(), b, sample_brownian_path(1024, seed))
            assert absolute_errors(res, problem1()).mae == mae

    def test_prefix_property(self, trials):
        short = run_trials(problem1(), "chelyshkov", 2, 2, seed0=3, M=1024)
        assert short.per_trial_mae == trials.per_trial_mae[:2]

    def test_identical_seeds_have_zero_spread(self):
        s = run_trials(problem1(), "chelyshkov", 2, 3, M=256, seeds=[7, 7, 7])
        assert s.sd == 0.0 and s.ci_lo == s.ci_hi == s.mean

    def test_needs_two_trials(self):
        with pytest.raises(ValueError):
            run_trials(problem1(), "chelyshkov", 2, 1)

    def test_seed_count_mismatch(self):
        with pytest.raises(ValueError):
            run_trials(problem1(), "chelyshkov", 2, 3, seeds=[1, 2])

    def test_summarize(self):
        s = summarize([1.0, 2.0, 3.0], [0, 1, 2], N=2)
        assert s.mean == 2.0 and s.sd == 1.0


class TestCompare:
    def test_same_path_for_both_bases(self):
        cmp = compare_bases(problem1(), 2, 11, M=1024)
        assert cmp.chelyshkov.seed == cmp.slp.seed == 11
        assert cmp.chelyshkov.basis == "chelyshkov" and cmp.slp.basis == "slp"
        for a, b in zip(cmp.chelyshkov.rows, cmp.slp.rows):
            assert a.approx == pytest.approx(b.approx, abs=1e-10)

    def test_identical_basis_gives_identical_tables(self):
        cmp = compare_bases(problem1(), 2, 11, M=1024, kinds=("chelyshkov", "chelyshkov"))
        assert cmp.chelyshkov == cmp.slp

    def test_exact_polynomial_problem(self):
        cmp = compare_bases(polynomial_problem(), 2, 0, M=64)
        assert cmp.chelyshkov.mae < 1e-12 and cmp.slp.mae < 1e-12


class TestReports:
    def test_stats_csv(self, trials):
        lines = render(trials, "csv").splitlines()
        assert lines[0] == ",".join(STATS_COLUMNS)
        assert len(lines) == 2
        assert float(lines[1].split(",")[2]) == trials.mean

    def test_table_csv(self, trials):
        table = compare_bases(problem1(), 2, 3, M=1024).chelyshkov
        lines = render(table, "csv").splitlines()
        assert lines[0] == ",".join(TABLE_COLUMNS)
        assert len(lines) == 11

    def test_compare_csv_header(self):
        text = render(compare_bases(problem1(), 1, 0, M=64), "csv")
        assert text.splitlines()[0].startswith("zeta,eta,exact,approx_chelyshkov")

    @pytest.mark.parametrize("kind", ["stats", "table", "compare"])
    def test_json_round_trip(self, tmp_path, trials, kind):
        obj = {"stats": trials,
               "table": compare_bases(problem1(), 2, 1, M=256).slp,
               "compare": compare_bases(problem1(), 2, 1, M=256)}[kind]
        dest = tmp_path / "r.json"
        emit_report(obj, "json", dest)
        assert load_report(dest) == obj
        assert json.loads(dest.read_text()) == obj.to_dict()

    def test_error_table_dict(self):
        t = ErrorTable.from_dict({"rows": [dict(zeta=0.1, eta=0.1, approx=1.0, exact=1.5,
                                                abs_error=0.5)]})
        assert t.mae == 0.5

    def test_stats_dict(self, trials):
        assert TrialStatistics.from_dict(trials.to_dict()) == trials

    def test_unknown_format(self, trials):
        with pytest.raises(ValueError):
            render(trials, "xml")

    def test_unwritable_destination(self, tmp_path, trials):
        with pytest.raises(ReportError):
            emit_report(trials, "csv", tmp_path / "missing" / "r.csv")
