//! Adaptive Gauss–Legendre quadrature for real- and complex-valued integrands.
//!
//! The panel scheme is global-error driven: panels carry an error estimate
//! (coarse rule vs. the sum of its two halves) and the worst panel is split
//! until the summed estimate meets the requested tolerance. Semi-infinite
//! integrals march unit panels and stop once the panel sequence decays
//! geometrically below tolerance.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{LevyError, Result};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    /// Compute the n-point rule by Newton iteration on the Legendre roots.
    fn compute(n: usize) -> GlRule {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GlRule { nodes, weights }
    }

    /// Shared rule instance for a given node count.
    pub fn get(n: usize) -> Arc<GlRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GlRule::compute(n)))
            .clone()
    }

    /// Apply the rule to `f` on [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, f: &mut F, a: f64, b: f64) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }
}

/// Legendre polynomial P_n and its derivative at x (three-term recurrence).
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tolerance pair: accept once the summed panel error is below
/// `max(rel * |estimate|, abs)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub rel: f64,
    pub abs: f64,
}

impl QuadTol {
    pub fn rel(rel: f64) -> Self {
        QuadTol { rel, abs: 1e-300 }
    }

    pub fn with_abs(rel: f64, abs: f64) -> Self {
        QuadTol { rel, abs }
    }

    fn target(&self, magnitude: f64) -> f64 {
        (self.rel * magnitude).max(self.abs)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

/// Adaptive integral of a complex integrand over the finite interval [a, b].
///
/// `breakpoints` seeds the initial subdivision (strictly inside (a, b); used
/// for known oscillation scales or kinks). `max_evals` bounds the total number
/// of integrand evaluations.
pub fn adaptive_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: QuadTol,
    nodes: usize,
    max_evals: usize,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GlRule::get(nodes.max(4));
    let mut evals: usize = 0;
    let mut eval_panel = |f: &mut F, lo: f64, hi: f64, evals: &mut usize| -> Result<Panel> {
        let mid = 0.5 * (lo + hi);
        let coarse = rule.integrate(f, lo, hi);
        let fine = rule.integrate(f, lo, mid) + rule.integrate(f, mid, hi);
        *evals += 3 * rule.nodes.len();
        if !fine.re.is_finite() || !fine.im.is_finite() {
            return Err(LevyError::QuadratureFailure(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        Ok(Panel {
            a: lo,
            b: hi,
            value: fine,
            err: (fine - coarse).norm(),
        })
    };

    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    for &t in breakpoints {
        if (a < b && t > a && t < b) || (a > b && t < a && t > b) {
            cuts.push(t);
        }
    }
    cuts.push(b);
    if a < b {
        cuts.sort_by(f64::total_cmp);
    } else {
        cuts.sort_by(|x, y| f64::total_cmp(y, x));
    }
    cuts.dedup();

    let mut panels: Vec<Panel> = Vec::new();
    for w in cuts.windows(2) {
        panels.push(eval_panel(&mut f, w[0], w[1], &mut evals)?);
    }

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= tol.target(total.norm()) {
            return Ok(total);
        }
        if evals >= max_evals {
            return Err(LevyError::QuadratureFailure(format!(
                "node budget exhausted ({evals} evals, residual error {err:.3e}, target {:.3e})",
                tol.target(total.norm())
            )));
        }
        // Split the worst panel.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| f64::total_cmp(&p.err, &q.err))
            .expect("at least one panel");
        let Panel { a: lo, b: hi, .. } = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            // Interval no longer splittable in f64; keep its estimate.
            let p = eval_panel(&mut f, lo, hi, &mut evals)?;
            panels.push(Panel { err: 0.0, ..p });
            continue;
        }
        panels.push(eval_panel(&mut f, lo, mid, &mut evals)?);
        panels.push(eval_panel(&mut f, mid, hi, &mut evals)?);
    }
}

/// Real-valued wrapper over [`adaptive_complex`].
pub fn adaptive_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: QuadTol,
    nodes: usize,
    max_evals: usize,
) -> Result<f64> {
    adaptive_complex(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        breakpoints,
        tol,
        nodes,
        max_evals,
    )
    .map(|z| z.re)
}

/// Outcome of a marching semi-infinite integral.
pub struct Marched {
    pub value: Complex64,
    /// Where the march stopped (tail beyond is below tolerance).
    pub reached: f64,
    pub converged: bool,
}

/// Integral of `f` over [a, cap) by marching panels of width `step`.
///
/// Stops when consecutive panel contributions decay geometrically and the
/// extrapolated remainder is below tolerance. `converged = false` means the
/// cap was hit first; callers decide whether that is a quadrature failure or
/// a domain violation.
pub fn march_decaying<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    step: f64,
    cap: f64,
    tol: QuadTol,
    nodes: usize,
    max_evals: usize,
) -> Result<Marched> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut x = a;
    let mut prev_mag: Option<f64> = None;
    let panel_tol = QuadTol::with_abs(tol.rel * 0.1, tol.abs * 0.1);
    while x < cap {
        let hi = (x + step).min(cap);
        let piece = adaptive_complex(&mut f, x, hi, &[], panel_tol, nodes, max_evals)?;
        total += piece;
        let mag = piece.norm();
        let target = tol.target(total.norm());
        if let Some(pm) = prev_mag {
            let ratio = if pm > 0.0 { mag / pm } else { 0.0 };
            if ratio < 0.75 {
                let remainder = mag * ratio / (1.0 - ratio);
                if mag <= target && remainder <= target {
                    return Ok(Marched {
                        value: total,
                        reached: hi,
                        converged: true,
                    });
                }
            }
        }
        if mag == 0.0 && total.norm() == 0.0 && x > a + 2.0 * step {
            return Ok(Marched {
                value: total,
                reached: hi,
                converged: true,
            });
        }
        prev_mag = Some(mag);
        x = hi;
    }
    Ok(Marched {
        value: total,
        reached: cap,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rule_is_exact_on_polynomials() {
        let rule = GlRule::get(8);
        // 8-point rule integrates degree <= 15 exactly.
        let mut f = |x: f64| Complex64::new(x.powi(15) + 3.0 * x.powi(4) + 1.0, 0.0);
        let got = rule.integrate(&mut f, -1.0, 1.0);
        // odd power integrates to 0; 3x^4 -> 6/5; 1 -> 2
        assert!((got.re - (6.0 / 5.0 + 2.0)).abs() < 1e-13, "got {got}");
    }

    #[test]
    fn adaptive_handles_oscillation() {
        // \int_0^1 cos(40 x) dx = sin(40)/40
        let got = adaptive_real(
            |x| (40.0 * x).cos(),
            0.0,
            1.0,
            &[],
            QuadTol::rel(1e-12),
            15,
            1_000_000,
        )
        .unwrap();
        assert!((got - 40f64.sin() / 40.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_integrable_endpoint_singularity() {
        // \int_0^1 x^{-1/2} dx = 2
        let got = adaptive_real(
            |x| x.powf(-0.5),
            0.0,
            1.0,
            &[],
            QuadTol::with_abs(1e-10, 1e-12),
            15,
            5_000_000,
        )
        .unwrap();
        assert!((got - 2.0).abs() < 1e-8, "got {got}");
    }

    #[test]
    fn adaptive_complex_matches_closed_form() {
        // \int_0^1 e^{i t s} ds = (e^{it} - 1) / (it)
        let t = 7.3;
        let got = adaptive_complex(
            |s| Complex64::new(0.0, t * s).exp(),
            0.0,
            1.0,
            &[],
            QuadTol::rel(1e-12),
            15,
            1_000_000,
        )
        .unwrap();
        let want = (Complex64::new(0.0, t).exp() - 1.0) / Complex64::new(0.0, t);
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn march_integrates_exponential_tail() {
        // \int_0^infty e^{-x} cos(x) dx = 1/2
        let got = march_decaying(
            |x| Complex64::new((-x).exp() * x.cos(), 0.0),
            0.0,
            1.0,
            200.0,
            QuadTol::with_abs(1e-11, 1e-14),
            15,
            10_000_000,
        )
        .unwrap();
        assert!(got.converged);
        assert!((got.value.re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn march_reports_cap_hit() {
        // Non-decaying integrand: the cap is reached without convergence.
        let got = march_decaying(
            |_| Complex64::new(1.0, 0.0),
            0.0,
            1.0,
            10.0,
            QuadTol::rel(1e-10),
            15,
            10_000_000,
        )
        .unwrap();
        assert!(!got.converged);
        assert!((got.value.re - 10.0).abs() < 1e-9);
    }
}
