#![allow(dead_code)]

use std::sync::Arc;

use ermlr::hawkes::{ExponentialKernel, LabeledSample, ModelParams, Path};
use ermlr::rng::{SeedStream, StreamRng};
use ermlr::stats::{compute_suff_stats, SuffStats};
use rand::Rng;

pub fn rng(seed: u64) -> StreamRng {
    SeedStream::new(seed).rng(0)
}

/// Path with up to `max_events` uniform event times spread over `dim` components.
pub fn random_path<R: Rng>(rng: &mut R, dim: usize, max_events: usize, horizon: f64) -> Path {
    let n = rng.random_range(0..=max_events);
    let mut events = vec![Vec::new(); dim];
    for _ in 0..n {
        let c = rng.random_range(0..dim);
        let t = horizon * (1.0 - rng.random::<f64>());
        events[c].push(t);
    }
    for e in &mut events {
        e.sort_by(f64::total_cmp);
        e.dedup();
    }
    Path::new(horizon, events).unwrap()
}

/// Nonnegative parameters with roughly `density` of the interaction entries active.
pub fn random_params<R: Rng>(rng: &mut R, dim: usize, density: f64, scale: f64) -> ModelParams {
    let mu = (0..dim).map(|_| rng.random_range(0.2..1.0)).collect();
    let a = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if rng.random::<f64>() < density {
                        rng.random_range(0.05..1.0) * scale
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    ModelParams::new(mu, a).unwrap()
}

/// Stable random parameters: rescales the adjacency to spectral radius `radius` when needed.
pub fn random_stable_params<R: Rng>(rng: &mut R, dim: usize, density: f64, radius: f64) -> ModelParams {
    let mut p = random_params(rng, dim, density, 1.0);
    let rho = p.spectral_radius();
    if rho > radius {
        for v in p.adjacency_mut() {
            *v *= radius / rho;
        }
    }
    p
}

/// `Σ_{s < t} β e^{-β(t-s)}` by direct summation.
pub fn h_direct(events: &[f64], beta: f64, t: f64) -> f64 {
    events
        .iter()
        .filter(|&&s| s < t)
        .map(|&s| beta * (-beta * (t - s)).exp())
        .sum()
}

fn simpson_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of a smooth integrand on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Integral over `[0, T]` of an integrand that is smooth between the event
/// times of `path`.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(path: &Path, f: F, tol: f64) -> f64 {
    let mut cuts: Vec<f64> = path.all_events().iter().flatten().copied().collect();
    cuts.push(0.0);
    cuts.push(path.horizon());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            // Evaluate just inside the interval so the left endpoint sees the jump.
            let (a, b) = (w[0], w[1]);
            adaptive_simpson(
                |t| f(t.max(a + 4.0 * f64::EPSILON * a.max(1.0))),
                a,
                b,
                tol,
            )
        })
        .sum()
}

/// `(1/T) ∫ H_r H_c` with `H_0 = 1`, by quadrature.
pub fn gram_by_quadrature(path: &Path, beta: f64, r: usize, c: usize) -> f64 {
    let h = |idx: usize, t: f64| {
        if idx == 0 {
            1.0
        } else {
            h_direct(path.events(idx - 1), beta, t)
        }
    };
    integrate_piecewise(path, |t| h(r, t) * h(c, t), 1e-13) / path.horizon()
}

pub fn stats_of(samples: &[LabeledSample], kernel: &ExponentialKernel) -> Vec<Arc<SuffStats>> {
    samples
        .iter()
        .map(|s| Arc::new(compute_suff_stats(&s.path, kernel)))
        .collect()
}

/// Central finite difference of `f` along coordinate `i`.
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize, step: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += step;
    minus[i] -= step;
    (f(&plus) - f(&minus)) / (2.0 * step)
}

/// Largest relative error between an analytic gradient and central differences.
/// Coordinates are compared relative to `max(|g_i|, 1e-3·‖g‖_∞)`.
pub fn max_relative_error<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], grad: &[f64], step: f64) -> f64 {
    let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    (0..x.len())
        .map(|i| {
            let fd = central_difference(&f, x, i, step);
            (fd - grad[i]).abs() / grad[i].abs().max(1e-3 * scale).max(1e-12)
        })
        .fold(0.0, f64::max)
}

/// Coordinate descent on `θ'Gθ - 2b'θ + κ Σ_{i≥1} |θ_i|`, run to a fixed point.
pub fn coordinate_descent(gram: &[f64], b: &[f64], kappa: f64) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for _ in 0..200_000 {
        let mut change = 0.0f64;
        for i in 0..n {
            let g_ii = gram[i * n + i];
            if g_ii <= 0.0 {
                continue;
            }
            let rest: f64 = (0..n).filter(|&l| l != i).map(|l| gram[i * n + l] * x[l]).sum();
            let z = b[i] - rest;
            let tau = if i == 0 { 0.0 } else { kappa / 2.0 };
            let new = z.signum() * (z.abs() - tau).max(0.0) / g_ii;
            change = change.max((new - x[i]).abs());
            x[i] = new;
        }
        if change < 1e-15 {
            break;
        }
    }
    x
}

pub fn quadratic_objective(gram: &[f64], b: &[f64], kappa: f64, x: &[f64]) -> f64 {
    let n = b.len();
    let mut q = 0.0;
    for i in 0..n {
        for l in 0..n {
            q += x[i] * gram[i * n + l] * x[l];
        }
    }
    q - 2.0 * b.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + kappa * x[1..].iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest violation of the Lasso optimality conditions for one row.
pub fn kkt_violation(gram: &[f64], b: &[f64], kappa: f64, x: &[f64]) -> f64 {
    let n = b.len();
    (0..n)
        .map(|i| {
            let g = 2.0 * ((0..n).map(|l| gram[i * n + l] * x[l]).sum::<f64>() - b[i]);
            if i == 0 {
                g.abs()
            } else if x[i] != 0.0 {
                (g + kappa * x[i].signum()).abs()
            } else {
                (g.abs() - kappa).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Expected counts by a trapezoidal solve of the renewal-type Volterra
/// equation `λ(t) = μ + A ∫_0^t β e^{-β(t-s)} λ(s) ds`, refined once by
/// Richardson extrapolation.
pub fn expected_counts_volterra(params: &ModelParams, beta: f64, horizon: f64, steps: usize) -> Vec<f64> {
    let solve = |n: usize| -> Vec<f64> {
        let dim = params.dim();
        let h = horizon / n as f64;
        let k = |d: f64| beta * (-beta * d).exp();
        let mut lam: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        lam.push(params.mu().to_vec());
        for i in 1..=n {
            let t = i as f64 * h;
            // conv_j = h [½ k(t) λ_0 + Σ_{l=1}^{i-1} k(t - t_l) λ_l]
            let mut conv = vec![0.0; dim];
            for (l, lam_l) in lam.iter().enumerate() {
                let w = if l == 0 { 0.5 } else { 1.0 } * k(t - l as f64 * h) * h;
                for j in 0..dim {
                    conv[j] += w * lam_l[j];
                }
            }
            // (I - ½ h β A) λ_i = μ + A conv, solved by fixed-point iteration.
            let mut x = lam[i - 1].clone();
            for _ in 0..200 {
                let mut next = vec![0.0; dim];
                for j in 0..dim {
                    let mut s = params.mu()[j];
                    for jp in 0..dim {
                        s += params.a(j, jp) * (conv[jp] + 0.5 * h * beta * x[jp]);
                    }
                    next[j] = s;
                }
                let diff = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                x = next;
                if diff < 1e-15 {
                    break;
                }
            }
            lam.push(x);
        }
        (0..params.dim())
            .map(|j| {
                let inner: f64 = lam[1..n].iter().map(|v| v[j]).sum();
                h * (0.5 * lam[0][j] + inner + 0.5 * lam[n][j])
            })
            .collect()
    };
    let coarse = solve(steps);
    let fine = solve(2 * steps);
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}
