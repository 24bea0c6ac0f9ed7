"""Smoke test for the tiltbench extension module.

Build and install first, e.g.

    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml
    python python/smoke_test.py
"""

import json
import math
import os
import tempfile

import tiltbench


def main():
    data = tiltbench.Dataset.simulate("well", sigma1=1.5, n=2000, seed=3)
    assert len(data) == 2000 and data.dim == 2
    assert data.n0 + data.n1 == len(data)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "data.csv")
        data.save_csv(path)
        again = tiltbench.Dataset.load_csv(path)
        assert [again.row(i) for i in range(10)] == [data.row(i) for i in range(10)]

    eta = tiltbench.fit_eta1(data, degree=2)
    p = eta.predict_proba([0.0, 1.0])
    assert 0.0 < p < 1.0

    fit = tiltbench.fit_tilt(data, eta, preset="precise")
    assert fit.converged and abs(fit.final_constraint) <= 1e-2
    oracle = tiltbench.oracle_tilt(1.5)
    print("theta", [round(v, 3) for v in fit.theta.to_list()])
    print("oracle", [round(v, 3) for v in oracle.to_list()])
    print("max abs diff", round(fit.theta.max_abs_diff(oracle), 3))

    el = tiltbench.fit_empirical_likelihood(data, eta)
    assert all(math.isfinite(v) for v in el.theta.to_list())

    iw = tiltbench.estimate(data, fit.theta, estimand="mu", method="iw")
    ipw = tiltbench.estimate(data, fit.theta, estimand="mu", method="ipw")
    assert abs(iw - ipw) < 1e-10
    dr = tiltbench.estimate(data, fit.theta, eta, estimand="mu0", method="dr")
    print("mu0 dr", round(dr, 4))
    assert abs(dr - 0.6) < 0.15

    ci = tiltbench.estimate_with_ci(data, estimand="mu0", method="dr", seed=1)
    lo, hi = ci["ci95"]
    assert lo < ci["point"] < hi
    print("mu0 dr split", round(ci["point"], 4), "ci", (round(lo, 4), round(hi, 4)))

    try:
        tiltbench.estimate(data, fit.theta, estimand="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("bad estimand accepted")

    summary = json.loads(tiltbench.transfer_bench(repeats=1, seed=0))
    assert summary
    print("smoke test passed")


if __name__ == "__main__":
    main()
