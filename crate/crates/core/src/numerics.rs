//! Special functions and quadrature primitives shared by the higher modules.
//!
//! Everything here is plain `f64` (binary64) arithmetic. The functions are
//! pure and carry no state, so they are safe to call concurrently.
//!
//! * [`xi_coth`] — the identity-term integrand factor ξ·coth(πξ) with the
//!   removable singularity at 0 filled in,
//! * [`dilog`] — the real dilogarithm Li₂ on (−∞, 1],
//! * [`tanh_partial_sum`] — partial sums of the partial-fraction expansion
//!   of tanh(πz),
//! * [`digamma`] — ψ(z) for complex z (used by the zeta continuation),
//! * [`integrate_adaptive`] / [`integrate_even_decaying`] — adaptive Simpson
//!   quadrature with an explicit error bound.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Controls for the adaptive quadrature routines.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Total bisection budget across the whole call.
    pub max_subdivisions: u32,
    /// Truncation radius for improper integrals over ℝ.
    pub cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 20_000,
            cutoff: 40.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.cutoff > 0.0) {
            return Err(Error::Domain(
                "quadrature tolerances and cutoff must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same tolerances but a different truncation radius.
    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }
}

/// Value and error bound returned by the quadrature routines.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub err_bound: f64,
}

/// ξ·coth(πξ), extended by continuity with value 1/π at ξ = 0.
///
/// The function is even and grows like |ξ| at infinity; the difference
/// ξ·coth(πξ) − |ξ| = 2|ξ|e^{−2π|ξ|}/(1 − e^{−2π|ξ|}) vanishes exponentially
/// fast. Near the origin a Taylor patch 1/π + πξ²/3 avoids the 0/0 form.
pub fn xi_coth(xi: f64) -> f64 {
    let ax = xi.abs();
    if ax < 1e-4 {
        1.0 / PI + PI * xi * xi / 3.0
    } else {
        // coth = 1/tanh; tanh is monotone and well conditioned away from 0
        ax / (PI * ax).tanh()
    }
}

/// Real dilogarithm Li₂(x) = Σ_{n≥1} xⁿ/n² for x ≤ 1, continued to x < −1.
///
/// Uses the defining series for |x| ≤ 1/2 and the standard reflection
/// (x ↦ 1−x), Landen (x ↦ x/(x−1)) and inversion (x ↦ 1/x) identities to map
/// every other argument into the series region. Li₂(1) = π²/6; arguments
/// above 1 are a domain error (the complex branch is not needed here).
pub fn dilog(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("dilog: non-finite argument {x}")));
    }
    if x > 1.0 {
        return Err(Error::Domain(format!(
            "dilog: argument {x} > 1 is outside the real branch"
        )));
    }
    Ok(dilog_inner(x))
}

fn dilog_inner(x: f64) -> f64 {
    const PI2_6: f64 = PI * PI / 6.0;
    if x == 1.0 {
        PI2_6
    } else if x > 0.5 {
        // reflection: Li2(x) + Li2(1-x) = pi^2/6 - ln(x) ln(1-x)
        PI2_6 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x)
    } else if x >= -0.5 {
        dilog_series(x)
    } else if x >= -1.0 {
        // Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2
        let u = x / (x - 1.0);
        -dilog_series(u) - 0.5 * (1.0 - x).ln().powi(2)
    } else {
        // inversion: Li2(x) = -pi^2/6 - ln^2(-x)/2 - Li2(1/x) for x < -1
        -PI2_6 - 0.5 * (-x).ln().powi(2) - dilog_inner(1.0 / x)
    }
}

/// Defining series, valid for |x| ≤ 1/2 (and convergent up to |x| < 1).
fn dilog_series(x: f64) -> f64 {
    debug_assert!(x.abs() <= 0.5 + 1e-12);
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0_f64;
    while term.abs() > 1e-17 * sum.abs().max(1.0) {
        n += 1.0;
        term *= x;
        sum += term / (n * n);
        if n > 200.0 {
            break;
        }
    }
    sum
}

/// Partial sum of the conjugate-paired partial-fraction expansion of tanh(πz):
///
/// Σ_{m=0}^{N−1} (2z/π) / ((m + 1/2)² + z²)  →  tanh(πz)  with error O(1/N).
///
/// Each pair 1/(1/2+m+iz) − 1/(1/2+m−iz) is real after combining conjugates,
/// which is the form summed here.
pub fn tanh_partial_sum(z: f64, n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("tanh_partial_sum: N must be ≥ 1".into()));
    }
    let mut sum = 0.0;
    // ascending-magnitude accumulation: smallest terms first
    for m in (0..n).rev() {
        let a = m as f64 + 0.5;
        sum += 1.0 / (a * a + z * z);
    }
    Ok(2.0 * z / PI * sum)
}

/// Digamma function ψ(z) for complex z, by upward recurrence into the region
/// Re(z) ≥ 10 followed by the Stirling asymptotic series.
///
/// Accuracy is ~1e-13 away from the poles at z = 0, −1, −2, …; callers that
/// can approach a pole must guard the distance themselves.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    // B_{2n}/(2n) coefficients of the asymptotic expansion
    let tail = zi2
        * (1.0 / 12.0
            - zi2
                * (1.0 / 120.0 - zi2 * (1.0 / 252.0 - zi2 * (1.0 / 240.0 - zi2 * (1.0 / 132.0)))));
    acc + z.ln() - 0.5 * zi - tail
}

/// Adaptive Simpson quadrature of `f` over the finite interval `[a, b]`.
///
/// The returned `err_bound` is the accumulated Richardson estimate over all
/// accepted panels (with a safety factor). Fails with
/// [`Error::QuadratureNonConvergence`] when the bisection budget runs out
/// before the local tolerances are met.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integrate_adaptive: infinite endpoint".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, err_bound: 0.0 });
    }
    let mut budget = spec.max_subdivisions;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err_acc = 0.0;
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let value = simpson_rec(
        &f, a, b, fa, fm, fb, whole, tol, 60, &mut budget, &mut err_acc,
    )?;
    Ok(Quadrature { value, err_bound: 4.0 * err_acc + f64::EPSILON * value.abs() })
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut u32,
    err_acc: &mut f64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // rounding-noise floor: once delta is dominated by f64 cancellation the
    // panel cannot be improved by further splitting
    let noise = 8.0 * f64::EPSILON * (left.abs() + right.abs() + whole.abs());
    if delta.abs() <= 15.0 * tol || delta.abs() <= noise || m == a || m == b {
        *err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || *budget == 0 {
        return Err(Error::QuadratureNonConvergence {
            err_bound: delta.abs() / 15.0,
            tol,
        });
    }
    *budget -= 1;
    let half_tol = 0.5 * tol;
    let l = simpson_rec(f, a, m, fa, flm, fm, left, half_tol, depth - 1, budget, err_acc)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, half_tol, depth - 1, budget, err_acc)?;
    Ok(l + r)
}

/// ∫_ℝ f for an even, continuous integrand with certified decay beyond
/// `spec.cutoff`.
///
/// The integral is evaluated as 2·∫₀^cutoff by adaptive Simpson;
/// `tail_bound` must bound the one-sided tail ∫_cutoff^∞ |f| and is folded
/// (doubled) into the returned error bound. Pass `0.0` for integrands that
/// vanish identically beyond the cutoff.
pub fn integrate_even_decaying<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
    tail_bound: f64,
) -> Result<Quadrature> {
    let half = integrate_adaptive(&f, 0.0, spec.cutoff, spec)?;
    Ok(Quadrature {
        value: 2.0 * half.value,
        err_bound: 2.0 * half.err_bound + 2.0 * tail_bound.abs(),
    })
}

/// Complex-valued variant of [`integrate_even_decaying`]: real and imaginary
/// parts are integrated separately against the same spec and tail bound.
pub fn integrate_even_decaying_complex<F: Fn(f64) -> Complex64>(
    f: F,
    spec: &QuadratureSpec,
    tail_bound: f64,
) -> Result<(Complex64, f64)> {
    let re = integrate_even_decaying(|x| f(x).re, spec, tail_bound)?;
    let im = integrate_even_decaying(|x| f(x).im, spec, tail_bound)?;
    Ok((Complex64::new(re.value, im.value), re.err_bound + im.err_bound))
}
