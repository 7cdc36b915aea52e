//! Admissible test-function pairs (v, u = v̂).
//!
//! The trace formula holds for even functions v with exponential decay rate
//! above 1/2 whose transform u has an integrable (2+ε′)-moment. This module
//! provides the two analytic families used throughout — the heat family
//! v_T(x) = e^{−x²/4T}/√(4πT) with u_T(ξ) = e^{−Tξ²}, and the resolvent
//! difference — plus the generic pipeline φ → a → v → u for compactly
//! supported smooth φ, and a numerical admissibility check.

use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, xi_coth, QuadratureSpec};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

type RealToComplex = dyn Fn(f64) -> Complex64 + Send + Sync;
type RealToReal = dyn Fn(f64) -> f64 + Send + Sync;

/// Certificate |v(x)| ≤ coefficient · e^{−|x|(1/2 + rate)}.
#[derive(Debug, Clone, Copy)]
pub struct DecayCertificate {
    pub coefficient: f64,
    pub rate: f64,
}

/// An admissible pair: even v, its Fourier transform u, and the certificates
/// the trace-formula tail bounds consume.
#[derive(Clone)]
pub struct TestFunctionPair {
    v: Arc<RealToComplex>,
    u: Arc<RealToComplex>,
    /// Exponential-decay certificate for v.
    pub decay: DecayCertificate,
    /// ε′ with ξ^{2+ε′} u(ξ) absolutely integrable.
    pub moment_exponent: f64,
    /// True when v and u are real-valued.
    pub real_valued: bool,
    pub label: String,
    /// Bound (or, for compact-support pairs, an estimate) of the one-sided
    /// identity-term tail ∫_X^∞ |ξ·coth(πξ)·u(ξ)| dξ.
    identity_tail: Arc<RealToReal>,
    /// Largest cutoff at which evaluating u is meaningful (grid-backed pairs
    /// lose accuracy near their Nyquist frequency; analytic pairs have none).
    max_cutoff: f64,
}

impl std::fmt::Debug for TestFunctionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunctionPair")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .field("moment_exponent", &self.moment_exponent)
            .finish()
    }
}

impl TestFunctionPair {
    pub fn v(&self, x: f64) -> Complex64 {
        (self.v)(x)
    }

    pub fn u(&self, xi: f64) -> Complex64 {
        (self.u)(xi)
    }

    pub fn identity_tail_bound(&self, x: f64) -> f64 {
        (self.identity_tail)(x)
    }

    /// Smallest geometric-search cutoff whose identity-term tail bound is
    /// below `target`, capped at the pair's meaningful evaluation range.
    pub fn cutoff_for_tail(&self, target: f64) -> f64 {
        let mut x = 4.0;
        while self.identity_tail_bound(x) > target && 1.5 * x <= self.max_cutoff {
            x *= 1.5;
        }
        x
    }

    /// Default truncation of the n-sum over iterates of a geodesic of length
    /// `l`: smallest n with n·l ≥ 60/(1/2 + decay rate), which puts the
    /// remainder far below every tolerance used here.
    pub fn default_n_max(&self, l: f64) -> usize {
        let bound = 60.0 / ((0.5 + self.decay.rate) * l);
        (bound.ceil() as usize).max(1)
    }

    /// Builds an arbitrary pair from closures; the caller vouches for the
    /// certificates.
    pub fn from_closures(
        label: impl Into<String>,
        v: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        u: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        decay: DecayCertificate,
        moment_exponent: f64,
        real_valued: bool,
        identity_tail: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunctionPair {
            v: Arc::new(v),
            u: Arc::new(u),
            decay,
            moment_exponent,
            real_valued,
            label: label.into(),
            identity_tail: Arc::new(identity_tail),
            max_cutoff: f64::INFINITY,
        }
    }

    fn with_max_cutoff(mut self, cap: f64) -> Self {
        self.max_cutoff = cap;
        self
    }

    /// Pointwise sum of two pairs (the formula is linear in (v, u)).
    pub fn sum(&self, other: &TestFunctionPair) -> TestFunctionPair {
        let v1 = Arc::clone(&self.v);
        let v2 = Arc::clone(&other.v);
        let u1 = Arc::clone(&self.u);
        let u2 = Arc::clone(&other.u);
        let t1 = Arc::clone(&self.identity_tail);
        let t2 = Arc::clone(&other.identity_tail);
        TestFunctionPair {
            v: Arc::new(move |x| v1(x) + v2(x)),
            u: Arc::new(move |x| u1(x) + u2(x)),
            decay: DecayCertificate {
                coefficient: self.decay.coefficient + other.decay.coefficient,
                rate: self.decay.rate.min(other.decay.rate),
            },
            moment_exponent: self.moment_exponent.min(other.moment_exponent),
            real_valued: self.real_valued && other.real_valued,
            label: format!("{} + {}", self.label, other.label),
            identity_tail: Arc::new(move |x| t1(x) + t2(x)),
            max_cutoff: self.max_cutoff.min(other.max_cutoff),
        }
    }
}

/// Heat family: v(x) = e^{−x²/4T}/√(4πT), u(ξ) = e^{−Tξ²}.
pub fn heat_pair(t: f64) -> Result<TestFunctionPair> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("heat pair needs T > 0, got {t}")));
    }
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    // sup of v(x)·e^{3x/2} is attained at x = 3T
    let decay = DecayCertificate {
        coefficient: (2.25 * t).exp() * norm,
        rate: 1.0,
    };
    Ok(TestFunctionPair::from_closures(
        format!("heat T={t}"),
        move |x| Complex64::new(norm * (-x * x / (4.0 * t)).exp(), 0.0),
        move |xi| Complex64::new((-t * xi * xi).exp(), 0.0),
        decay,
        1.0,
        true,
        // ∫_X^∞ ξ coth(πξ) e^{−Tξ²} dξ ≤ coth(πX) e^{−TX²}/(2T)
        move |x| {
            let coth = xi_coth(x.max(0.5)) / x.max(0.5);
            coth * (-t * x * x).exp() / (2.0 * t)
        },
    ))
}

/// Resolvent difference with parameters Re(s), Re(s₀) > 1:
/// v(t) = e^{−|t|(s−1/2)}/(2s−1) − e^{−|t|(s₀−1/2)}/(2s₀−1),
/// u(ξ) = 1/(ξ² + (s−1/2)²) − 1/(ξ² + (s₀−1/2)²).
pub fn resolvent_pair(s: Complex64, s0: Complex64) -> Result<TestFunctionPair> {
    if !(s.re > 1.0 && s0.re > 1.0) {
        return Err(Error::Domain(format!(
            "resolvent pair needs Re(s), Re(s0) > 1, got {s} and {s0}"
        )));
    }
    let w = s - 0.5;
    let w0 = s0 - 0.5;
    let decay = DecayCertificate {
        coefficient: 1.0 / (2.0 * s - 1.0).norm() + 1.0 / (2.0 * s0 - 1.0).norm(),
        rate: s.re.min(s0.re) - 1.0,
    };
    let wmax = w.norm().max(w0.norm());
    let dsq = (w0 * w0 - w * w).norm();
    Ok(TestFunctionPair::from_closures(
        format!("resolvent s={s} s0={s0}"),
        move |x| {
            let t = x.abs();
            (-t * w).exp() / (2.0 * w) - (-t * w0).exp() / (2.0 * w0)
        },
        move |xi| {
            let q = Complex64::new(xi * xi, 0.0);
            1.0 / (q + w * w) - 1.0 / (q + w0 * w0)
        },
        decay,
        0.5,
        s.im == 0.0 && s0.im == 0.0,
        // |u(ξ)| ≤ (16/9)·|w0²−w²|/ξ⁴ once ξ ≥ 2·max(|w|,|w0|)
        move |x| {
            if x < 2.0 * wmax {
                return f64::INFINITY;
            }
            let coth = xi_coth(x) / x;
            coth * (16.0 / 9.0) * dsq / (2.0 * x * x)
        },
    ))
}

/// Generic pair from a compactly supported smooth φ:
/// a(t) = φ(t)/√(t+4), v(t) = 4cosh(t/2)∫₀^∞ a(4sinh²(t/2) + y²) dy, u = v̂.
///
/// v is supported in |t| ≤ 2·arcsinh(√R/2); it is sampled on a uniform grid
/// there and u is evaluated as a cosine transform of the grid (v and u are
/// real and even). The identity-term tail for these pairs is an empirical
/// envelope estimate, not a certificate: u decays faster than any power, but
/// the rate is not known in closed form.
pub fn pair_from_phi(
    phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    support_radius: f64,
    spec: &QuadratureSpec,
) -> Result<TestFunctionPair> {
    if !(support_radius > 0.0) {
        return Err(Error::Domain("support radius must be positive".into()));
    }
    let r = support_radius;
    let phi = Arc::new(phi);
    let a = {
        let phi = Arc::clone(&phi);
        move |z: f64| if z < r { phi(z) / (z + 4.0).sqrt() } else { 0.0 }
    };
    let t_max = 2.0 * (r.sqrt() / 2.0).asinh();
    let inner_spec = QuadratureSpec {
        abs_tol: (spec.abs_tol * 1e-2).max(1e-14),
        rel_tol: (spec.rel_tol * 1e-2).max(1e-14),
        ..*spec
    };
    let v_at = {
        let a = a.clone();
        move |t: f64| -> Result<f64> {
            let z0 = 4.0 * (t / 2.0).sinh().powi(2);
            if z0 >= r {
                return Ok(0.0);
            }
            let y_max = (r - z0).sqrt();
            let q = integrate_adaptive(|y| a(z0 + y * y), 0.0, y_max, &inner_spec)?;
            Ok(4.0 * (t / 2.0).cosh() * q.value)
        }
    };

    // sample v on a uniform grid over its support for the cosine transform
    const PANELS: usize = 4096;
    let h = t_max / PANELS as f64;
    let mut v_grid = Vec::with_capacity(PANELS + 1);
    for j in 0..=PANELS {
        v_grid.push(v_at(j as f64 * h)?);
    }
    let v_grid = Arc::new(v_grid);

    let u_eval = {
        let v_grid = Arc::clone(&v_grid);
        move |xi: f64| -> f64 {
            // u(ξ) = 2∫₀^{tmax} v cos(ξt). The even extension of v is smooth
            // and vanishes to all orders at ±tmax, so the periodic trapezoid
            // rule is spectrally accurate — crucially, uniformly in ξ up to
            // the grid Nyquist frequency.
            let mut acc = 0.5 * (v_grid[0] + v_grid[PANELS] * (xi * t_max).cos());
            let mut carry = 0.0;
            for (j, &vj) in v_grid.iter().enumerate().take(PANELS).skip(1) {
                // compensated summation keeps the noise floor near machine
                // epsilon times max|v|, which the tail estimate relies on
                let term = vj * (xi * (j as f64 * h)).cos() - carry;
                let next = acc + term;
                carry = (next - acc) - term;
                acc = next;
            }
            2.0 * acc * h
        }
    };

    let c = v_grid
        .iter()
        .enumerate()
        .map(|(j, &vj)| vj.abs() * (1.5 * j as f64 * h).exp())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let u_for_tail = u_eval.clone();
    let v_closure = move |t: f64| {
        let t = t.abs();
        if t >= t_max {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(v_at(t).unwrap_or(f64::NAN), 0.0)
        }
    };
    Ok(TestFunctionPair::from_closures(
        format!("phi-pipeline R={r}"),
        v_closure,
        move |xi| Complex64::new(u_eval(xi), 0.0),
        DecayCertificate { coefficient: c, rate: 1.0 },
        1.0,
        true,
        move |x| {
            // empirical tail envelope: sample the integrand beyond x
            let mut m = 0.0f64;
            for k in 0..=24 {
                let xi = x * (1.0 + 0.5 * k as f64 / 24.0);
                m = m.max((xi_coth(xi) * u_for_tail(xi)).abs());
            }
            m * x
        },
    )
    // the grid transform degrades near its Nyquist rate π/h
    .with_max_cutoff(0.125 * PI / h))
}

/// One failing decay sample (if any) from an admissibility check.
#[derive(Debug, Clone, Copy)]
pub struct DecaySample {
    pub x: f64,
    pub observed: f64,
    pub bound: f64,
}

/// Result of the numerical admissibility validation.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub pass: bool,
    pub decay_failure: Option<DecaySample>,
    /// Truncated value of ∫ |ξ^{2+ε′} u(ξ)| dξ.
    pub moment_integral: f64,
}

/// Samples |v| against its decay certificate on [0, 50] and integrates the
/// (2+ε′)-moment of |u| out to the quadrature cutoff.
pub fn check_admissible(pair: &TestFunctionPair, spec: &QuadratureSpec) -> AdmissibilityReport {
    let mut decay_failure = None;
    let cert = pair.decay;
    let mut x = 0.0;
    while x <= 50.0 {
        let observed = pair.v(x).norm();
        let bound = cert.coefficient * (-(0.5 + cert.rate) * x).exp();
        if observed > bound * (1.0 + 1e-9) + 1e-290 {
            decay_failure = Some(DecaySample { x, observed, bound });
            break;
        }
        x += 0.25;
    }
    let p = 2.0 + pair.moment_exponent;
    let moment = integrate_adaptive(
        |xi| xi.abs().powf(p) * pair.u(xi).norm(),
        0.0,
        spec.cutoff,
        spec,
    )
    .map(|q| 2.0 * q.value)
    .unwrap_or(f64::INFINITY);
    AdmissibilityReport {
        pass: decay_failure.is_none() && moment.is_finite(),
        decay_failure,
        moment_integral: moment,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_even_decaying;

    fn fourier_of_v(pair: &TestFunctionPair, xi: f64) -> Complex64 {
        // u(ξ) = ∫ v e^{−iξt} dt = 2∫₀^∞ v(t) cos(ξt) dt for even v
        let spec = QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 40_000,
            cutoff: 60.0,
        };
        let re = integrate_even_decaying(|t| pair.v(t).re * (xi * t).cos(), &spec, 1e-16).unwrap();
        let im = integrate_even_decaying(|t| pair.v(t).im * (xi * t).cos(), &spec, 1e-16).unwrap();
        Complex64::new(re.value, im.value)
    }

    #[test]
    fn heat_pair_values() {
        let p = heat_pair(1.0).unwrap();
        assert!((p.v(0.0).re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(p.u(0.0), Complex64::new(1.0, 0.0));
        assert!(heat_pair(0.0).is_err());
        assert!(heat_pair(-1.0).is_err());
    }

    #[test]
    fn heat_transform_matches_quadrature() {
        let p = heat_pair(1.0).unwrap();
        let numeric = fourier_of_v(&p, 1.0);
        assert!((numeric.re - (-1.0f64).exp()).abs() < 1e-8);
        assert!(numeric.im.abs() < 1e-12);
    }

    #[test]
    fn heat_semigroup_in_u() {
        let (t1, t2) = (0.7, 1.9);
        let p1 = heat_pair(t1).unwrap();
        let p2 = heat_pair(t2).unwrap();
        let p12 = heat_pair(t1 + t2).unwrap();
        for &xi in &[0.0, 0.3, 1.0, 2.5, 6.0] {
            let lhs = p1.u(xi) * p2.u(xi);
            assert!((lhs - p12.u(xi)).norm() < 1e-12);
        }
    }

    #[test]
    fn resolvent_pair_basics() {
        let s = Complex64::new(2.0, 0.0);
        let s0 = Complex64::new(3.0, 0.0);
        let p = resolvent_pair(s, s0).unwrap();
        // s = s0 gives the zero pair
        let z = resolvent_pair(s, s).unwrap();
        for &x in &[0.0, 0.5, 2.0] {
            assert!(z.v(x).norm() < 1e-15);
            assert!(z.u(x).norm() < 1e-15);
        }
        // decay certificate reads off the exponents
        assert!((p.decay.rate - 1.0).abs() < 1e-15);
        assert!(resolvent_pair(Complex64::new(1.0, 0.0), s0).is_err());
    }

    #[test]
    fn resolvent_transform_matches_quadrature() {
        let p = resolvent_pair(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)).unwrap();
        for &xi in &[0.0, 1.0, 2.0] {
            let numeric = fourier_of_v(&p, xi);
            assert!(
                (numeric - p.u(xi)).norm() < 1e-7,
                "xi = {xi}: {numeric} vs {}",
                p.u(xi)
            );
        }
    }

    #[test]
    fn complex_resolvent_transform_consistency() {
        let p = resolvent_pair(Complex64::new(1.8, 0.6), Complex64::new(2.5, -0.4)).unwrap();
        for &xi in &[0.0, 0.5, 1.0, 2.0, 5.0] {
            let numeric = fourier_of_v(&p, xi);
            assert!((numeric - p.u(xi)).norm() < 1e-6, "xi = {xi}");
        }
        assert!(!p.real_valued);
    }

    fn smooth_bump() -> impl Fn(f64) -> f64 + Send + Sync + Clone {
        |t: f64| {
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        }
    }

    #[test]
    fn zero_phi_gives_zero_pair() {
        let p = pair_from_phi(|_| 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        for &x in &[0.0, 0.3, 1.0] {
            assert_eq!(p.v(x).norm(), 0.0);
            assert!(p.u(x).norm() < 1e-15);
        }
    }

    #[test]
    fn phi_pair_evenness_and_support() {
        let p = pair_from_phi(smooth_bump(), 1.0, &QuadratureSpec::default()).unwrap();
        assert!((p.v(1.0) - p.v(-1.0)).norm() < 1e-10);
        let t_max = 2.0 * (1.0f64.sqrt() / 2.0).asinh();
        assert_eq!(p.v(t_max + 0.01).norm(), 0.0);
        assert!(p.v(0.0).re > 0.0);
    }

    #[test]
    fn phi_zero_recovered_from_identity_integral() {
        // φ(0) = (1/4π) ∫ ξ u(ξ) coth(πξ) dξ for the transform chain
        let bump = smooth_bump();
        let p = pair_from_phi(bump.clone(), 1.0, &QuadratureSpec::default()).unwrap();
        let spec = QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 60_000,
            cutoff: p.cutoff_for_tail(1e-9),
        };
        let tail = p.identity_tail_bound(spec.cutoff);
        let q = integrate_even_decaying(|xi| xi_coth(xi) * p.u(xi).re, &spec, tail).unwrap();
        let recovered = q.value / (4.0 * PI);
        let exact = bump(0.0);
        assert!(
            (recovered - exact).abs() < 1e-5 * exact.max(1.0),
            "{recovered} vs {exact}"
        );
    }

    #[test]
    fn transform_consistency_across_families() {
        let pairs = [
            heat_pair(0.5).unwrap(),
            heat_pair(2.0).unwrap(),
            resolvent_pair(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)).unwrap(),
        ];
        for p in &pairs {
            for &xi in &[0.0, 0.5, 1.0, 2.0, 5.0] {
                let numeric = fourier_of_v(p, xi);
                assert!((numeric - p.u(xi)).norm() < 1e-6, "{}: xi = {xi}", p.label);
            }
        }
    }

    #[test]
    fn admissibility_verdicts() {
        let spec = QuadratureSpec::default();
        assert!(check_admissible(&heat_pair(1.0).unwrap(), &spec).pass);
        let res = resolvent_pair(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)).unwrap();
        assert!(check_admissible(&res, &spec).pass);

        // fat polynomial tails violate any exponential certificate
        let fat = TestFunctionPair::from_closures(
            "fat-tails",
            |x| Complex64::new(1.0 / (1.0 + x * x), 0.0),
            |xi| Complex64::new(PI * (-xi.abs()).exp(), 0.0),
            DecayCertificate { coefficient: 1.0, rate: 0.5 },
            0.5,
            true,
            |_| 0.0,
        );
        let report = check_admissible(&fat, &spec);
        assert!(!report.pass);
        let sample = report.decay_failure.unwrap();
        assert!(sample.observed > sample.bound);
    }

    #[test]
    fn default_n_max_scales_inversely_with_length() {
        let p = heat_pair(1.0).unwrap();
        assert_eq!(p.default_n_max(40.0), 1);
        let small = p.default_n_max(0.001);
        assert!(small >= 40_000);
    }
}
