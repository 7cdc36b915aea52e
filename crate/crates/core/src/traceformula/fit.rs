//! Nonnegative least-squares fit of Σ w·e^{−Tλ} on a fixed λ grid.
//!
//! A fixed-grid nonnegative fit is convex and deterministic, and reports its
//! resolution honestly through the grid, which is why it is used instead of
//! free-knot exponential fitting. The solver is the active-set method of
//! Lawson and Hanson on the normal equations; active sets stay small, so the
//! dense Cholesky solves are cheap.

use super::SpectrumEstimate;
use crate::error::{Error, Result};

/// Fits nonnegative weights on `lambda_grid` so that Σ w·e^{−tλ} matches
/// `samples` on `t_grid` in least squares. Fails with an ill-conditioning
/// error when the max residual over the grid exceeds `residual_bound`.
pub fn fit_exponential_sums(
    t_grid: &[f64],
    samples: &[f64],
    lambda_grid: &[f64],
    residual_bound: f64,
) -> Result<SpectrumEstimate> {
    if lambda_grid.is_empty() {
        return Err(Error::Domain("empty eigenvalue grid".into()));
    }
    if t_grid.len() != samples.len() {
        return Err(Error::Domain(format!(
            "{} time points but {} samples",
            t_grid.len(),
            samples.len()
        )));
    }
    if lambda_grid.iter().any(|&l| l < 0.0) {
        return Err(Error::Domain("eigenvalue grid must be nonnegative".into()));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("eigenvalue grid must be strictly increasing".into()));
    }
    let m = t_grid.len();
    let n = lambda_grid.len();
    let mut design = vec![0.0; m * n];
    for (i, &t) in t_grid.iter().enumerate() {
        for (j, &l) in lambda_grid.iter().enumerate() {
            design[i * n + j] = (-t * l).exp();
        }
    }
    let weights = nnls(&design, m, n, samples)?;

    let mut residual = 0.0f64;
    for i in 0..m {
        let mut fit = 0.0;
        for j in 0..n {
            fit += design[i * n + j] * weights[j];
        }
        residual = residual.max((fit - samples[i]).abs());
    }
    if residual > residual_bound {
        return Err(Error::IllConditioned(format!(
            "fit residual {residual:.3e} exceeds the configured bound {residual_bound:.3e}"
        )));
    }

    let total: f64 = weights.iter().sum();
    let support: Vec<(f64, f64)> = lambda_grid
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&l, &w)| (l, w))
        .collect();

    // merge contiguous positive cells into single eigenvalue estimates
    // (weighted centroid), dropping groups of negligible total weight
    let threshold = 1e-6 * total.max(1e-300);
    let mut eigenvalues = Vec::new();
    let mut weights_out = Vec::new();
    let mut j = 0;
    while j < n {
        if weights[j] > 0.0 {
            let mut wsum = 0.0;
            let mut lsum = 0.0;
            while j < n && weights[j] > 0.0 {
                wsum += weights[j];
                lsum += weights[j] * lambda_grid[j];
                j += 1;
            }
            if wsum > threshold {
                eigenvalues.push(lsum / wsum);
                weights_out.push(wsum);
            }
        } else {
            j += 1;
        }
    }

    Ok(SpectrumEstimate {
        eigenvalues,
        weights: weights_out,
        residual,
        support,
        xi_convention: "xi_j = +sqrt(lambda_j)",
    })
}

/// Lawson–Hanson active-set NNLS on the normal equations.
fn nnls(design: &[f64], m: usize, n: usize, y: &[f64]) -> Result<Vec<f64>> {
    // gram = AᵀA, aty = Aᵀy
    let mut gram = vec![0.0; n * n];
    let mut aty = vec![0.0; n];
    for i in 0..m {
        let row = &design[i * n..(i + 1) * n];
        for j in 0..n {
            aty[j] += row[j] * y[i];
            for k in j..n {
                gram[j * n + k] += row[j] * row[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            gram[j * n + k] = gram[k * n + j];
        }
    }

    let tol = 1e-12 * aty.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let mut x = vec![0.0f64; n];
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 30;

    for _ in 0..max_outer {
        // gradient of ½‖Ax−y‖²: w = Aᵀy − AᵀA x
        let mut best = (0usize, tol);
        for j in 0..n {
            if passive[j] {
                continue;
            }
            let mut wj = aty[j];
            for k in 0..n {
                wj -= gram[j * n + k] * x[k];
            }
            if wj > best.1 {
                best = (j, wj);
            }
        }
        if best.1 <= tol {
            break;
        }
        passive[best.0] = true;

        // inner loop: restore feasibility of the passive solution
        for _ in 0..max_outer {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let p = idx.len();
            let mut sub = vec![0.0; p * p];
            let mut rhs = vec![0.0; p];
            for (a, &ja) in idx.iter().enumerate() {
                rhs[a] = aty[ja];
                for (b, &jb) in idx.iter().enumerate() {
                    sub[a * p + b] = gram[ja * n + jb];
                }
            }
            let z = solve_spd(&mut sub, &rhs, p)?;
            if z.iter().all(|&v| v > 0.0) {
                for (a, &ja) in idx.iter().enumerate() {
                    x[ja] = z[a];
                }
                break;
            }
            // step from x toward z until the first passive weight hits zero,
            // then retire every weight that reached the boundary
            let mut alpha = 1.0f64;
            for (a, &ja) in idx.iter().enumerate() {
                if z[a] <= 0.0 && x[ja] > z[a] {
                    alpha = alpha.min(x[ja] / (x[ja] - z[a]));
                }
            }
            let scale = x.iter().fold(1e-300f64, |acc, &v| acc.max(v));
            for (a, &ja) in idx.iter().enumerate() {
                x[ja] += alpha * (z[a] - x[ja]);
                if x[ja] <= 1e-12 * scale {
                    x[ja] = 0.0;
                    passive[ja] = false;
                }
            }
        }
    }
    Ok(x)
}

/// Solves the symmetric positive-definite system in place by Cholesky,
/// retrying with growing ridge regularization when the decomposition meets a
/// nonpositive pivot (normal equations square the conditioning).
fn solve_spd(a: &mut [f64], b: &[f64], p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Ok(Vec::new());
    }
    let base: f64 = (0..p).map(|i| a[i * p + i]).sum::<f64>() / p as f64;
    let saved = a.to_vec();
    let mut ridge = 0.0;
    for attempt in 0..8 {
        if attempt > 0 {
            ridge = base * 1e-14 * 10f64.powi(attempt);
            a.copy_from_slice(&saved);
            for i in 0..p {
                a[i * p + i] += ridge;
            }
        }
        if let Some(x) = cholesky_solve(a, b, p) {
            return Ok(x);
        }
    }
    Err(Error::IllConditioned(format!(
        "normal equations not positive definite even with ridge {ridge:.1e}"
    )))
}

fn cholesky_solve(a: &mut [f64], b: &[f64], p: usize) -> Option<Vec<f64>> {
    // in-place lower Cholesky factor
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                a[i * p + i] = s.sqrt();
            } else {
                a[i * p + j] = s / a[j * p + j];
            }
        }
    }
    let mut x = b.to_vec();
    for i in 0..p {
        for k in 0..i {
            x[i] -= a[i * p + k] * x[k];
        }
        x[i] /= a[i * p + i];
    }
    for i in (0..p).rev() {
        for k in (i + 1)..p {
            x[i] = x[i] - a[k * p + i] * x[k];
        }
        x[i] /= a[i * p + i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exactly_representable_spectrum() {
        // samples fabricated from {(0.3, 2), (1.7, 2)}
        let t_grid: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
        let samples: Vec<f64> = t_grid
            .iter()
            .map(|&t| 2.0 * (-0.3 * t).exp() + 2.0 * (-1.7 * t).exp())
            .collect();
        let lambda_grid: Vec<f64> = (0..20).map(|j| 0.1 * j as f64).collect();
        let est = fit_exponential_sums(&t_grid, &samples, &lambda_grid, 1e-8).unwrap();
        assert!(est.residual < 1e-9);
        assert_eq!(est.eigenvalues.len(), 2);
        assert!((est.eigenvalues[0] - 0.3).abs() <= 0.1 + 1e-9);
        assert!((est.eigenvalues[1] - 1.7).abs() <= 0.1 + 1e-9);
        assert!((est.weights[0] - 2.0).abs() < 1e-6);
        assert!((est.weights[1] - 2.0).abs() < 1e-6);
        assert_eq!(est.xi_convention, "xi_j = +sqrt(lambda_j)");
    }

    #[test]
    fn guards_and_residual_bound() {
        assert!(fit_exponential_sums(&[1.0], &[1.0], &[], 1.0).is_err());
        assert!(fit_exponential_sums(&[1.0, 2.0], &[1.0], &[0.5], 1.0).is_err());
        // growing data cannot be a nonnegative sum of decaying exponentials
        let t: Vec<f64> = (1..=12).map(|i| 0.1 * i as f64).collect();
        let bad: Vec<f64> = t.iter().map(|&x| x * x).collect();
        let grid: Vec<f64> = (0..5).map(|j| 0.5 * j as f64).collect();
        let r = fit_exponential_sums(&t, &bad, &grid, 1e-6);
        assert!(matches!(r, Err(Error::IllConditioned(_))));
    }

    #[test]
    fn weights_are_nonnegative_on_noisy_data() {
        let t_grid: Vec<f64> = (1..=60).map(|i| 0.03 * i as f64).collect();
        let samples: Vec<f64> = t_grid
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let noise = 1e-7 * ((i * 2654435761) % 1000) as f64 / 1000.0;
                3.0 * (-0.9 * t).exp() + noise
            })
            .collect();
        // λ = 0.9 sits between grid cells, so the fit spreads weight over
        // the neighbors with a quantization-level residual
        let lambda_grid: Vec<f64> = (0..25).map(|j| 0.2 * j as f64).collect();
        let est = fit_exponential_sums(&t_grid, &samples, &lambda_grid, 1e-2).unwrap();
        assert!(est.support.iter().all(|&(_, w)| w >= 0.0));
        let total: f64 = est.weights.iter().sum();
        assert!((total - 3.0).abs() < 0.05);
    }
}
