"""Smoke test for the crpsum Python extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/crpsum-*.whl
    python python/smoke_test.py
"""

import json
import math
import sys

import crpsum


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    assert close(crpsum.pinball_loss(0.9, 2.0, 1.0), 0.1)
    assert crpsum.crps_empirical_cdf([0.0, 1.0], 0.0) == 0.25
    assert crpsum.crps_sample_estimate([0.0, 2.0], 1.0) == 0.5
    assert crpsum.crps_quantile([3.0, 3.0, 3.0], 3.0) == 0.0
    assert round(crpsum.crps_gaussian_analytic(0.0, 1.0, 0.0), 4) == 0.2337

    es = crpsum.energy_score([[0.0], [2.0]], [1.0])
    assert close(es, crpsum.crps_sample_estimate([0.0, 2.0], 1.0))
    assert close(crpsum.energy_score([[0.0, 0.0], [2.0, 2.0]], [1.0, 1.0]), math.sqrt(2) * 0.5)

    try:
        crpsum.crps_empirical_cdf([1.0], 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("single sample accepted")

    draws = crpsum.sample_gaussian([0.0, 0.0], [[1.0, -1.0], [-1.0, 1.0]], 200, 7)
    assert all(a + b == 0.0 for a, b in draws)
    assert close(crpsum.relative_change(0.6, 0.5), 0.2)

    # anti-correlated paths: CRPS-Sum is blind, per-dimension CRPS is not
    paths = [[[a, -a] for a, _ in draws[i * 4:(i + 1) * 4]] for i in range(50)]
    ens = crpsum.ForecastEnsemble(paths)
    obs = crpsum.ObservationWindow([[0.3, -0.3], [1.0, -1.0], [-2.0, 2.0], [0.0, 0.0]])
    assert ens.shape == (50, 4, 2) and obs.shape == (4, 2)
    assert crpsum.crps_sum(ens, obs) == 0.0
    per_dim, aggregate = crpsum.crps_per_dimension(ens, obs)
    assert min(per_dim) > 0.0 and aggregate > 0.0

    report = crpsum.score_report(ens, obs, normalize="raw")
    assert report.crps_sum == 0.0 and report.crps > 0.0 and report.es > 0.0
    assert json.loads(report.to_json())["normalization_mode"] == "raw"

    rows = [[1.0, 3.0], [2.0, 4.0]]
    fc = crpsum.dummy_forecast(rows, 5, kind="uni", sigma=1e-20, n_samples=10, seed=1)
    assert fc.shape == (10, 5, 2)
    assert all(v == 3.0 for path in fc.to_list() for step in path for v in step)

    table = crpsum.run_convergence_study([500], repeats=5, seed=1)
    assert {r["estimator"] for r in table} >= {"ecdf", "quantile"}
    assert all(abs(r["mean"] - 0.2337) < 0.05 for r in table)

    cell = crpsum.run_sensitivity_cell(0.5, 0.5, 64, 16, 3)
    assert len(cell) == 4 and all(v > 0 for v in cell)

    print("crpsum python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
