//! Independent oracles used by the verification suite: exhaustive and
//! grid-search solvers that share no code path with the estimators they
//! check.

use crate::datagen::RegressionInstance;
use crate::linalg::{dot, spd_solve, DenseMatrix};
use crate::{Error, Result};

/// All ordered set partitions of `0..n` (first block, then the partition of
/// the rest), e.g. 13 of them for n = 3.
fn ordered_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
        if items.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let m = items.len();
        // Nonempty subsets of `items` as the first (largest-magnitude) block.
        for mask in 1..(1usize << m) {
            let block: Vec<usize> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| items[i])
                .collect();
            let rest: Vec<usize> = (0..m)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| items[i])
                .collect();
            for tail in go(&rest) {
                let mut partition = vec![block.clone()];
                partition.extend(tail);
                out.push(partition);
            }
        }
        out
    }
    go(&(0..n).collect::<Vec<usize>>())
}

/// Exact minimum of the SLOPE objective
/// `|Y - X theta|^2 / n + 2 tau sum_j lambda_j theta*_j`
/// for small `d`, by enumerating every solution shape: support, signs, and
/// the ordered grouping of tied magnitudes. On each shape the objective is a
/// smooth quadratic in the group magnitudes, solved in closed form and kept
/// when the stationary point is feasible for the shape.
pub fn slope_exhaustive_objective(
    inst: &RegressionInstance,
    tau: f64,
    lambda_seq: &[f64],
) -> Result<f64> {
    let d = inst.dim();
    if d > 6 {
        return Err(Error::invalid(
            "exhaustive SLOPE oracle is limited to d <= 6",
        ));
    }
    if lambda_seq.len() != d {
        return Err(Error::invalid("lambda sequence length must equal d"));
    }
    let nf = inst.n() as f64;
    let gram = inst.design.transpose().matmul(&inst.design);
    let xty = inst.design.transpose_matvec(&inst.response);
    let yty = dot(&inst.response, &inst.response);

    let mut best = yty / nf; // empty support
    for mask in 1..(1usize << d) {
        let support: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
        let s = support.len();
        let partitions = ordered_partitions(s);
        for signs in 0..(1usize << s) {
            let sign_of = |a: usize| if signs & (1 << a) != 0 { -1.0 } else { 1.0 };
            for partition in &partitions {
                let g = partition.len();
                // Weight mass per group: group q occupies the next |q|
                // positions of the sorted weight sequence.
                let mut weight_mass = vec![0.0; g];
                let mut pos = 0;
                for (q, block) in partition.iter().enumerate() {
                    for _ in block {
                        weight_mass[q] += lambda_seq[pos];
                        pos += 1;
                    }
                }
                // Aggregated linear and quadratic terms.
                let mut u = vec![0.0; g];
                let mut a = DenseMatrix::zeros(g, g);
                for (q, block) in partition.iter().enumerate() {
                    for &local in block {
                        u[q] += sign_of(local) * xty[support[local]];
                    }
                }
                for (q, bq) in partition.iter().enumerate() {
                    for (r, br) in partition.iter().enumerate() {
                        let mut acc = 0.0;
                        for &la in bq {
                            for &lb in br {
                                acc +=
                                    sign_of(la) * sign_of(lb) * gram.get(support[la], support[lb]);
                            }
                        }
                        a.set(q, r, acc);
                    }
                }
                let rhs: Vec<f64> = (0..g).map(|q| u[q] - nf * tau * weight_mass[q]).collect();
                let Some(m) = spd_solve(&a, &rhs) else {
                    continue; // rank-deficient shape; covered elsewhere
                };
                // Feasibility: strictly positive, non-increasing magnitudes.
                let mut feasible = m[g - 1] > 1e-12;
                for w in m.windows(2) {
                    if w[1] > w[0] + 1e-9 {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    continue;
                }
                let mut quad = 0.0;
                for q in 0..g {
                    for r in 0..g {
                        quad += m[q] * m[r] * a.get(q, r);
                    }
                }
                let lin: f64 = (0..g).map(|q| m[q] * u[q]).sum();
                let penalty: f64 = (0..g).map(|q| weight_mass[q] * m[q]).sum();
                let objective = (yty - 2.0 * lin + quad) / nf + 2.0 * tau * penalty;
                if objective < best {
                    best = objective;
                }
            }
        }
    }
    Ok(best)
}

/// Grid search for the sorted-l1 prox at resolution `step` in dimension 3,
/// restricted (without loss) to sign- and order-aligned candidates.
pub fn prox_grid_search(v: &[f64], weights: &[f64], step: f64) -> Result<Vec<f64>> {
    if v.len() != 3 || weights.len() != 3 {
        return Err(Error::invalid("grid oracle is written for d = 3"));
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| v[b].abs().partial_cmp(&v[a].abs()).unwrap());
    let z: Vec<f64> = order.iter().map(|&i| v[i].abs()).collect();

    let top = (z[0] / step).ceil() as i64;
    let mut best = (f64::INFINITY, [0.0f64; 3]);
    for i0 in 0..=top {
        let w0 = i0 as f64 * step;
        for i1 in 0..=i0 {
            let w1 = i1 as f64 * step;
            let partial = 0.5 * ((z[0] - w0).powi(2) + (z[1] - w1).powi(2))
                + weights[0] * w0
                + weights[1] * w1;
            if partial >= best.0 {
                continue;
            }
            for i2 in 0..=i1 {
                let w2 = i2 as f64 * step;
                let objective = partial + 0.5 * (z[2] - w2).powi(2) + weights[2] * w2;
                if objective < best.0 {
                    best = (objective, [w0, w1, w2]);
                }
            }
        }
    }
    let mut out = vec![0.0; 3];
    for (rank, &idx) in order.iter().enumerate() {
        out[idx] = v[idx].signum() * best.1[rank];
    }
    Ok(out)
}
