#!/usr/bin/env python3
"""Smoke test for the hidim_py extension module.

Builds nothing itself: run `cargo build -p hidim-py --release` first, then

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libhidim_py.so",
        root / "target" / "debug" / "libhidim_py.so",
        root / "target" / "release" / "libhidim_py.dylib",
        root / "target" / "debug" / "libhidim_py.dylib",
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p hidim-py --release")
    staging = Path(tempfile.mkdtemp(prefix="hidim_py_"))
    suffix = ".so" if built.suffix == ".so" else ".so"
    shutil.copy2(built, staging / f"hidim_py{suffix}")
    sys.path.insert(0, str(staging))
    import hidim_py

    return hidim_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = load_module()

    # SVD reconstructs and orders singular values.
    a = [[3.0, 0.0], [0.0, 1.0], [0.0, 0.0]]
    u, s, v = m.svd(a)
    assert s == [3.0, 1.0]
    recon = [
        [sum(u[i][k] * s[k] * v[j][k] for k in range(len(s))) for j in range(2)]
        for i in range(3)
    ]
    for i in range(3):
        for j in range(2):
            approx(recon[i][j], a[i][j], 1e-10)
    approx(m.operator_norm(a), 3.0, 1e-10)
    approx(m.schatten_norm(a, 1.0), 4.0, 1e-10)

    # Least squares and lasso at zero penalty agree on a tall design.
    design = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]]
    response = [1.0, -0.5, 0.5, 1.5]
    ls = m.least_squares(design, response)
    lasso0 = m.lasso(design, response, 0.0)
    for x, y in zip(ls, lasso0):
        approx(x, y, 1e-6)

    # A large penalty empties the lasso support.
    assert all(x == 0.0 for x in m.lasso(design, response, 100.0))

    # Thresholding rules.
    assert m.threshold_estimate([3.0, 1.0, 0.0], 0.5, "hard") == [3.0, 0.0, 0.0]
    soft = m.threshold_estimate([3.0, 1.0, 0.0], 0.5, "soft")
    approx(soft[0], 2.0)
    assert soft[1:] == [0.0, 0.0]

    # Sorted-l1 prox with equal weights is soft thresholding.
    p = m.prox_sorted_l1([1.2, -0.1], [0.4, 0.4])
    approx(p[0], 0.8)
    approx(p[1], 0.0)
    w = m.slope_weights(4)
    assert all(w[i] >= w[i + 1] for i in range(3))

    # Closed-form bounds.
    approx(m.hoeffding_bound(1, [(-1.0, 1.0)], 1.0), math.exp(-0.5), 1e-12)
    approx(m.bernstein_bound(2, 1.0, 4.0), math.exp(-4.0), 1e-12)
    approx(m.chi2_upper_quantile(1, math.exp(-1.0)), 5.0, 1e-12)
    assert m.matrix_bernstein_bound(8, 1.0, 1.0, 0.0, "bennett") == 8.0
    approx(m.max_subgaussian_bound(1, 2.0, False), 0.0)

    # Divergences and the Fano floor.
    approx(m.f_divergence([1.0, 0.0], [0.5, 0.5], "tv"), 0.5, 1e-12)
    approx(m.f_divergence([1.0, 0.0], [0.5, 0.5], "kl"), math.log(2.0), 1e-12)
    approx(m.f_divergence([1.0, 0.0], [0.5, 0.5], "chi2"), 1.0, 1e-12)
    approx(m.fano_lower_bound(4, 0.0), 0.5, 1e-12)
    approx(m.kl_gaussians([0.0], [2.0], 2.0), 1.0, 1e-12)

    # Varshamov-Gilbert codes come back certified.
    words, dist = m.varshamov_gilbert(32, 0.25, seed=7)
    assert len(words) == 7 and dist >= 8
    sparse_words, sparse_dist = m.sparse_varshamov_gilbert(64, 8, seed=7)
    assert len(sparse_words) == 5 and sparse_dist >= 4
    assert all(sum(wd) == 8 for wd in sparse_words)

    # PCA on a diagonal covariance.
    vec, value, gap = m.pca_leading([[3.0, 0.0], [0.0, 1.0]])
    approx(value, 3.0)
    approx(abs(vec[0]), 1.0)
    assert gap > 1.0

    sp = m.sparse_pca([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1)
    approx(abs(sp[0]), 1.0)

    # Graphical lasso at lambda = 0 inverts a 2x2 covariance.
    cov = [[2.0, 0.3], [0.3, 1.0]]
    theta = m.graphical_lasso(cov, 0.0)
    det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0]
    approx(theta[0][0], cov[1][1] / det, 1e-3)
    approx(theta[0][1], -cov[0][1] / det, 1e-3)

    # Ising sampling and pseudo-likelihood recovery.
    wstar = [[0.0, 0.4], [0.4, 0.0]]
    samples = m.ising_sample(wstar, 4000, seed=11)
    assert all(z in (-1.0, 1.0) for row in samples for z in row)
    west = m.ising_fit(samples, 0.8)
    assert abs(west[0][1] - 0.4) < 0.1, west

    # Rate fitting.
    slope, intercept, r2 = m.fit_loglog_slope([(1.0, 3.0), (2.0, 1.5), (4.0, 0.75)])
    approx(slope, -1.0, 1e-12)
    approx(intercept, math.log(3.0), 1e-12)
    approx(r2, 1.0, 1e-12)

    # Experiment runner from a TOML string.
    medians, fitted_slope = m.run_experiment_toml(
        """
experiment = "rates"
estimator = "constant_error"
seeds = 50
master_seed = 5

[sweep]
parameter = "n"
values = [1.0, 2.0, 4.0]

[fixed]
value = 2.0
"""
    )
    assert [v for _, v in medians] == [2.0, 2.0, 2.0]
    approx(fitted_slope, 0.0, 1e-12)

    print("hidim_py smoke test passed")


if __name__ == "__main__":
    main()
