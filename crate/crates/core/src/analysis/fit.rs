use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{DecayData, LengthData};
use crate::error::{Error, Result};

/// Spacing of the λ grid for single-exponential fits.
pub const SINGLE_GRID_STEP: f64 = 0.001;
/// Spacing of each axis of the (λ1, λ2) grid.
pub const PAIR_GRID_STEP: f64 = 0.005;
/// Relative floor applied to parameter standard errors. Exact data drive the
/// curvature-based errors to zero; this keeps them at the optimizer's resolution.
pub const STDERR_FLOOR: f64 = 1e-9;
/// Decay constants closer than this are reported as a degenerate pair.
pub const DEGENERATE_GAP: f64 = 1e-3;
/// A component whose amplitude is below this fraction of the largest is redundant.
pub const REDUNDANT_AMPLITUDE: f64 = 1e-6;

const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    /// Whether points were weighted by `1/stderr²`.
    pub weighted: bool,
    /// Condition number of the (weighted) Jacobian at the optimum.
    pub condition_number: Option<f64>,
    pub negative_lambda: bool,
    pub degenerate_pair: bool,
    pub redundant_component: bool,
    pub warnings: Vec<String>,
}

/// `f_l = c0 + Σ_i c_i λ_i^l`, fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub order: usize,
    pub c0: f64,
    pub amplitudes: Vec<f64>,
    /// Decreasing.
    pub lambdas: Vec<f64>,
    /// `None` when the curvature matrix is singular in that direction.
    pub c0_stderr: Option<f64>,
    pub amplitude_stderrs: Vec<Option<f64>>,
    pub lambda_stderrs: Vec<Option<f64>>,
    /// Unweighted `sqrt(Σ (f_l − mean_l)²)` over the data points.
    pub residual_norm: f64,
    pub max_abs_residual: f64,
    /// `Σ w (f_l − mean_l)²` with the weights used in the fit.
    pub weighted_sse: f64,
    pub lengths: Vec<usize>,
    pub diagnostics: FitDiagnostics,
}

impl DecayFit {
    pub fn predict(&self, length: f64) -> f64 {
        self.c0
            + self
                .amplitudes
                .iter()
                .zip(&self.lambdas)
                .map(|(c, l)| c * l.powf(length))
                .sum::<f64>()
    }

    /// The leading decay constant with its standard error.
    pub fn lambda(&self) -> (f64, Option<f64>) {
        (self.lambdas[0], self.lambda_stderrs[0])
    }
}

struct Points {
    x: Vec<f64>,
    y: Vec<f64>,
    sqrt_w: Vec<f64>,
    weighted: bool,
}

fn points(rows: &[LengthData]) -> Points {
    // Zero-stderr points (e.g. l = 1, or exact twirl-invariant data) are given the
    // smallest positive stderr in the set; with none positive, the fit is unweighted.
    let floor = rows
        .iter()
        .map(|r| r.stderr)
        .filter(|s| s.is_finite() && *s > 0.0)
        .fold(f64::INFINITY, f64::min);
    let weighted = floor.is_finite();
    Points {
        x: rows.iter().map(|r| r.length as f64).collect(),
        y: rows.iter().map(|r| r.mean).collect(),
        sqrt_w: rows
            .iter()
            .map(|r| {
                if weighted {
                    let s = if r.stderr.is_finite() && r.stderr > 0.0 { r.stderr } else { floor };
                    1.0 / s
                } else {
                    1.0
                }
            })
            .collect(),
        weighted,
    }
}

fn check_data(d: &DecayData, needed: usize) -> Result<&[LengthData]> {
    let got = d.distinct_lengths();
    if got < needed {
        return Err(Error::InsufficientLengths { needed, got });
    }
    let rows = d.lengths();
    if rows.iter().any(|r| !r.mean.is_finite()) {
        return Err(Error::FitFailed("non-finite mean fidelity".into()));
    }
    let lo = rows.iter().map(|r| r.mean).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.mean).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 {
        return Err(Error::Unidentifiable(format!(
            "mean fidelity is constant ({lo}) across lengths, so no decay constant can be fitted"
        )));
    }
    Ok(rows)
}

/// Weighted linear least squares for the amplitudes at fixed decay constants.
/// Returns `(coefficients, weighted SSE)`.
fn solve_linear(p: &Points, lambdas: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = p.x.len();
    let k = lambdas.len() + 1;
    let a = DMatrix::from_fn(n, k, |r, c| {
        let basis = if c == 0 { 1.0 } else { lambdas[c - 1].powf(p.x[r]) };
        basis * p.sqrt_w[r]
    });
    let b = DVector::from_fn(n, |r, _| p.y[r] * p.sqrt_w[r]);
    let coef = a.clone().svd(true, true).solve(&b, 1e-13).ok()?;
    let sse = (&a * &coef - &b).norm_squared();
    sse.is_finite().then(|| (coef.iter().copied().collect(), sse))
}

fn model(theta: &[f64], order: usize, x: f64) -> f64 {
    let mut f = theta[0];
    for i in 0..order {
        f += theta[1 + i] * theta[1 + order + i].powf(x);
    }
    f
}

/// Weighted residuals and Jacobian of the model, both scaled by `sqrt(w)`.
fn residuals_and_jacobian(p: &Points, theta: &[f64], order: usize) -> (DVector<f64>, DMatrix<f64>) {
    let n = p.x.len();
    let m = 1 + 2 * order;
    let mut r = DVector::zeros(n);
    let mut j = DMatrix::zeros(n, m);
    for row in 0..n {
        let (x, sw) = (p.x[row], p.sqrt_w[row]);
        r[row] = (p.y[row] - model(theta, order, x)) * sw;
        j[(row, 0)] = sw;
        for i in 0..order {
            let (c, lam) = (theta[1 + i], theta[1 + order + i]);
            j[(row, 1 + i)] = lam.powf(x) * sw;
            j[(row, 1 + order + i)] = c * x * lam.powf(x - 1.0) * sw;
        }
    }
    (r, j)
}

fn loss(p: &Points, theta: &[f64], order: usize) -> f64 {
    p.x.iter()
        .zip(&p.y)
        .zip(&p.sqrt_w)
        .map(|((x, y), sw)| ((y - model(theta, order, *x)) * sw).powi(2))
        .sum()
}

/// Damped Gauss–Newton (Levenberg–Marquardt) from `theta`, with λ kept in [−1, 1].
fn refine(p: &Points, mut theta: Vec<f64>, order: usize) -> (Vec<f64>, usize, bool) {
    let mut cur = loss(p, &theta, order);
    let mut mu = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (r, j) = residuals_and_jacobian(p, &theta, order);
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * &r;
        if g.amax() <= 1e-15 * (1.0 + cur) {
            converged = true;
            break;
        }
        let mut improved = false;
        while mu < 1e16 {
            let mut damped = a.clone();
            for d in 0..damped.nrows() {
                damped[(d, d)] += mu * a[(d, d)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&g) else {
                mu *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            for lam in &mut trial[1 + order..] {
                *lam = lam.clamp(-1.0, 1.0);
            }
            let next = loss(p, &trial, order);
            if next.is_finite() && next <= cur {
                let small_step = step.amax() <= 1e-14 * (1.0 + theta.iter().fold(0.0f64, |m, t| m.max(t.abs())));
                let small_gain = cur - next <= 1e-16 * (1.0 + cur);
                theta = trial;
                cur = next;
                mu = (mu / 3.0).max(1e-12);
                improved = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            // no descent direction left at any damping: a (possibly constrained) minimum
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }
    (theta, iterations, converged)
}

fn grid(step: f64) -> Vec<f64> {
    let count = ((0.999 - 0.01) / step).round() as usize;
    let mut v: Vec<f64> = (0..=count).map(|i| 0.01 + i as f64 * step).collect();
    if *v.last().unwrap() < 0.999 - 1e-12 {
        v.push(0.999);
    }
    v
}

/// Row-ordered argmin: the first (smallest-λ) candidate wins ties.
fn argmin(losses: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, l) in losses.iter().enumerate() {
        if let Some(l) = l {
            if best.is_none_or(|(_, b)| *l < b) {
                best = Some((i, *l));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn finish(p: &Points, rows: &[LengthData], theta: Vec<f64>, order: usize, iterations: usize, converged: bool) -> DecayFit {
    // sort components by decreasing λ
    let mut comps: Vec<(f64, f64)> = (0..order).map(|i| (theta[1 + i], theta[1 + order + i])).collect();
    comps.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut theta_sorted = vec![theta[0]];
    theta_sorted.extend(comps.iter().map(|c| c.0));
    theta_sorted.extend(comps.iter().map(|c| c.1));
    let theta = theta_sorted;

    let (r, j) = residuals_and_jacobian(p, &theta, order);
    let weighted_sse = r.norm_squared();
    let n = p.x.len();
    let m = theta.len();
    let svd = j.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = (smin > 0.0).then(|| smax / smin);
    let curvature = j.transpose() * &j;
    // Weighted data carry their own scale; unweighted data use the residual variance.
    let scale = if p.weighted {
        1.0
    } else if n > m {
        weighted_sse / (n - m) as f64
    } else {
        0.0
    };
    let cov = curvature.try_inverse();
    let stderr = |i: usize| -> Option<f64> {
        let c = cov.as_ref()?;
        let v = c[(i, i)] * scale;
        (v.is_finite() && v >= 0.0).then(|| v.sqrt().max(STDERR_FLOOR * theta[i].abs().max(1.0)))
    };

    let residuals: Vec<f64> = rows.iter().map(|row| row.mean - model(&theta, order, row.length as f64)).collect();
    let residual_norm = residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let lambdas: Vec<f64> = theta[1 + order..].to_vec();
    let amplitudes: Vec<f64> = theta[1..1 + order].to_vec();
    let mut diagnostics = FitDiagnostics {
        iterations,
        converged,
        weighted: p.weighted,
        condition_number,
        negative_lambda: lambdas.iter().any(|l| *l < 0.0),
        degenerate_pair: order > 1 && lambdas.windows(2).any(|w| (w[0] - w[1]).abs() < DEGENERATE_GAP),
        redundant_component: false,
        warnings: Vec::new(),
    };
    if order > 1 {
        let biggest = amplitudes.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        diagnostics.redundant_component = amplitudes.iter().any(|c| c.abs() <= REDUNDANT_AMPLITUDE * biggest);
    }
    if diagnostics.negative_lambda {
        diagnostics.warnings.push("negative decay constant".into());
    }
    if diagnostics.degenerate_pair {
        diagnostics.warnings.push(format!(
            "decay constants {:?} are nearly equal; the pair is ill-conditioned",
            lambdas
        ));
    }
    if diagnostics.redundant_component {
        diagnostics
            .warnings
            .push("one component has negligible amplitude; a single exponential suffices".into());
    }
    if !converged {
        diagnostics.warnings.push("refinement hit the iteration limit".into());
    }
    if lambdas.iter().any(|l| *l >= 1.0) {
        diagnostics.warnings.push("decay constant at the upper limit 1".into());
    }

    DecayFit {
        order,
        c0: theta[0],
        c0_stderr: stderr(0),
        amplitude_stderrs: (1..1 + order).map(stderr).collect(),
        lambda_stderrs: (1 + order..1 + 2 * order).map(stderr).collect(),
        amplitudes,
        lambdas,
        residual_norm,
        max_abs_residual,
        weighted_sse,
        lengths: rows.iter().map(|r| r.length).collect(),
        diagnostics,
    }
}

/// Fits `f_l = c0 + c1 λ^l`.
pub fn fit_single_exponential(d: &DecayData) -> Result<DecayFit> {
    let rows = check_data(d, 3)?;
    let p = points(rows);
    let lams = grid(SINGLE_GRID_STEP);
    let solved: Vec<Option<(Vec<f64>, f64)>> = lams.par_iter().map(|&l| solve_linear(&p, &[l])).collect();
    let best = argmin(&solved.iter().map(|s| s.as_ref().map(|s| s.1)).collect::<Vec<_>>())
        .ok_or_else(|| Error::FitFailed("no grid point gave a finite loss".into()))?;
    let coef = &solved[best].as_ref().unwrap().0;
    let start = vec![coef[0], coef[1], lams[best]];
    let (theta, iterations, converged) = refine(&p, start, 1);
    Ok(finish(&p, rows, theta, 1, iterations, converged))
}

/// Fits `f_l = c0 + c1 λ1^l + c2 λ2^l` with `λ1 > λ2`.
pub fn fit_two_exponentials(d: &DecayData) -> Result<DecayFit> {
    let rows = check_data(d, 5)?;
    let p = points(rows);
    let axis = grid(PAIR_GRID_STEP);
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .enumerate()
        .flat_map(|(i, &l1)| axis[..i].iter().map(move |&l2| (l1, l2)))
        .collect();
    let solved: Vec<Option<(Vec<f64>, f64)>> =
        pairs.par_iter().map(|&(a, b)| solve_linear(&p, &[a, b])).collect();
    let best = argmin(&solved.iter().map(|s| s.as_ref().map(|s| s.1)).collect::<Vec<_>>())
        .ok_or_else(|| Error::FitFailed("no grid point gave a finite loss".into()))?;
    let coef = &solved[best].as_ref().unwrap().0;
    let (l1, l2) = pairs[best];
    let start = vec![coef[0], coef[1], coef[2], l1, l2];
    let (theta, iterations, converged) = refine(&p, start, 2);
    Ok(finish(&p, rows, theta, 2, iterations, converged))
}

/// Fits a model of the given order (1 or 2).
pub fn fit_decay(d: &DecayData, order: usize) -> Result<DecayFit> {
    match order {
        1 => fit_single_exponential(d),
        2 => fit_two_exponentials(d),
        _ => Err(Error::FitFailed(format!("unsupported model order {order}; use 1 or 2"))),
    }
}

/// Standard deviations of the fitted decay constants over bootstrap
/// resamples of the sequences at each length.
pub fn bootstrap_lambda_stderrs(d: &DecayData, order: usize, resamples: usize, seed: u64) -> Result<Vec<f64>> {
    if d.lengths().iter().any(|r| r.fidelities.is_empty()) {
        return Err(Error::FitFailed("bootstrap needs per-sequence fidelities".into()));
    }
    if resamples < 2 {
        return Err(Error::FitFailed("bootstrap needs at least 2 resamples".into()));
    }
    let fits: Vec<Result<Vec<f64>>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let rows = d.lengths().iter().map(|r| {
                let k = r.fidelities.len();
                let f = (0..k).map(|_| r.fidelities[rng.random_range(0..k)]).collect();
                (r.length, f)
            });
            Ok(fit_decay(&DecayData::from_fidelities(rows.collect::<Vec<_>>()), order)?.lambdas)
        })
        .collect();
    let fits: Vec<Vec<f64>> = fits.into_iter().collect::<Result<_>>()?;
    Ok((0..order)
        .map(|i| {
            let vals: Vec<f64> = fits.iter().map(|f| f[i]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
        })
        .collect())
}
