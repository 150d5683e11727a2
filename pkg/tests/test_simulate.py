import numpy as np
import pytest

from missgraph import (
    AnalysisConfig,
    ContractError,
    GroundTruth,
    MechanismKind,
    MechanismSpec,
    apply_mechanism,
    ar1_precision,
    generate_gaussian,
    indicator_name,
    run_benchmark,
    simulate_dataset,
)
from missgraph.simulate import regenerate_dataset

from .conftest import residual_partial_corr


class TestGenerateGaussian:
    def test_deterministic_per_seed(self):
        prec = ar1_precision(4, 0.5)
        a = generate_gaussian(prec, 200, seed=9)
        b = generate_gaussian(prec, 200, seed=9)
        np.testing.assert_array_equal(a, b)
        c = generate_gaussian(prec, 200, seed=10)
        assert not np.array_equal(a, c)

    def test_identity_precision_uncorrelated(self):
        x = generate_gaussian(np.eye(4), 100_000, seed=0)
        corr = np.corrcoef(x, rowvar=False)
        off = ~np.eye(4, dtype=bool)
        assert np.abs(corr[off]).max() < 0.012

    def test_ar1_partials_vanish_off_chain(self):
        n = 50_000
        x = generate_gaussian(ar1_precision(4, 0.5), n, seed=3)
        # non-adjacent pairs are conditionally independent
        for i, j in ((0, 2), (0, 3), (1, 3)):
            others = [k for k in range(4) if k not in (i, j)]
            r = residual_partial_corr(x[:, i], x[:, j], x[:, others])
            assert abs(r) < 2 / np.sqrt(n)

    def test_covariance_matches_inverse_precision(self):
        prec = ar1_precision(3, 0.5)
        x = generate_gaussian(prec, 200_000, seed=1)
        cov = np.cov(x, rowvar=False)
        np.testing.assert_allclose(cov, np.linalg.inv(prec), atol=0.02)

    def test_non_spd_rejected(self):
        with pytest.raises(ContractError, match="positive definite"):
            generate_gaussian(np.array([[1.0, 2.0], [2.0, 1.0]]), 10, seed=0)

    def test_asymmetric_rejected(self):
        with pytest.raises(ContractError, match="symmetric"):
            generate_gaussian(np.array([[1.0, 0.5], [0.2, 1.0]]), 10, seed=0)


class TestMechanisms:
    def test_mcar_rate_concentrates(self):
        x = generate_gaussian(np.eye(2), 10_000, seed=1)
        spec = MechanismSpec(kind="MCAR", target="a", rate=0.3, seed=7)
        ds = apply_mechanism(x, ["a", "b"], spec)
        missing = 1.0 - ds.mask[:, 0].mean()
        assert missing == pytest.approx(0.3, abs=0.02)
        assert ds.mask[:, 1].all()

    def test_zero_slope_collapses_to_mcar(self):
        from missgraph.simulate import _probability_column

        x = generate_gaussian(np.eye(2), 500, seed=2)
        names = ("a", "b")
        mcar = MechanismSpec(kind="MCAR", target="a", rate=0.25)
        mar = MechanismSpec(kind="MAR", target="a", driver="b", rate=0.25, slope=0.0)
        mnar = MechanismSpec(kind="MNAR", target="a", rate=0.25, slope=0.0)
        p0 = _probability_column(x, names, mcar)
        np.testing.assert_allclose(_probability_column(x, names, mar), p0)
        np.testing.assert_allclose(_probability_column(x, names, mnar), p0)

    def test_mnar_selects_low_values_when_slope_positive(self):
        x = generate_gaussian(np.eye(1), 20_000, seed=4)
        spec = MechanismSpec(kind="MNAR", target="a", rate=0.3, slope=1.5, seed=3)
        ds = apply_mechanism(x, ["a"], spec)
        observed_mean = ds.values[ds.mask[:, 0], 0].mean()
        assert observed_mean < x[:, 0].mean()

    def test_rate_bounds_enforced(self):
        with pytest.raises(ContractError, match="rate"):
            MechanismSpec(kind="MCAR", target="a", rate=1.0)

    def test_mar_needs_distinct_driver(self):
        with pytest.raises(ContractError, match="driver"):
            MechanismSpec(kind="MAR", target="a", driver="a", rate=0.2)
        with pytest.raises(ContractError, match="driver"):
            MechanismSpec(kind="MAR", target="a", rate=0.2)

    def test_mnar_takes_no_driver(self):
        with pytest.raises(ContractError, match="no driver"):
            MechanismSpec(kind="MNAR", target="a", driver="b", rate=0.2)

    def test_unknown_target_rejected(self):
        x = np.zeros((10, 1))
        spec = MechanismSpec(kind="MCAR", target="nope", rate=0.2)
        with pytest.raises(ContractError, match="target"):
            apply_mechanism(x, ["a"], spec)


class TestSimulateDataset:
    def test_ground_truth_round_trip(self):
        prec = ar1_precision(3, 0.4)
        specs = [MechanismSpec(kind="MNAR", target="b", rate=0.2, slope=1.0)]
        ds, truth = simulate_dataset(prec, 500, ["a", "b", "c"], specs, seed=11)
        rebuilt = GroundTruth.from_dict(truth.to_dict())
        ds2 = regenerate_dataset(rebuilt)
        np.testing.assert_array_equal(ds.mask, ds2.mask)
        assert np.array_equal(ds.values, ds2.values, equal_nan=True)
        np.testing.assert_allclose(rebuilt.probabilities, truth.probabilities)

    def test_probabilities_recorded_for_target_only(self):
        prec = np.eye(2)
        specs = [MechanismSpec(kind="MCAR", target="a", rate=0.4)]
        _, truth = simulate_dataset(prec, 100, ["a", "b"], specs, seed=0)
        np.testing.assert_array_equal(truth.probabilities[:, 0], 0.4)
        np.testing.assert_array_equal(truth.probabilities[:, 1], 0.0)

    def test_expected_arcs(self):
        specs = [
            MechanismSpec(kind="MNAR", target="a", rate=0.2, slope=1.0),
            MechanismSpec(kind="MAR", target="b", driver="c", rate=0.2, slope=1.0),
            MechanismSpec(kind="MCAR", target="c", rate=0.2),
        ]
        _, truth = simulate_dataset(np.eye(3), 50, ["a", "b", "c"], specs, seed=1)
        assert truth.expected_arcs() == {
            ("a", indicator_name("a")),
            ("c", indicator_name("b")),
        }


class TestBenchmark:
    def test_zero_replicates_rejected(self):
        with pytest.raises(ContractError, match="replicate"):
            run_benchmark([])

    def test_mnar_batch_smoke(self):
        cov = np.array([[1.0, 0.6], [0.6, 1.0]])
        prec = np.linalg.inv(cov)
        truths = []
        for rep in range(2):
            _, truth = simulate_dataset(
                prec,
                2000,
                ["a", "w"],
                [MechanismSpec(kind="MNAR", target="a", rate=0.3, slope=1.5)],
                seed=100 + rep,
            )
            truths.append(truth)
        config = AnalysisConfig(n_imputations=3, seed=1)
        out = run_benchmark(truths, config)
        assert out["mechanisms"]["MNAR"]["replicates"] == 2
        assert out["mechanisms"]["MNAR"]["self_arc_power"] == 1.0
        assert out["mechanisms"]["MNAR"]["witness_rate"] == 1.0
        assert out["failures"] == []

    def test_errors_recorded_not_raised(self):
        # 6 rows are below the transform minimum, so the replicate fails;
        # the batch must finish and record the failure
        _, truth = simulate_dataset(
            np.eye(2),
            6,
            ["a", "b"],
            [MechanismSpec(kind="MCAR", target="a", rate=0.3)],
            seed=5,
        )
        out = run_benchmark([truth], AnalysisConfig(n_imputations=2))
        assert out["mechanisms"]["MCAR"]["errors"] == 1
        assert len(out["failures"]) == 1
