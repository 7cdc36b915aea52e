//! The geometric side of the trace formula and its applications.
//!
//! For an admissible pair (v, u) and a surface with spin structure whose
//! class function is −1 at every cusp, the spectral sum Σ u(ξⱼ) over the
//! squared-Dirac half-spectrum equals
//!
//! ```text
//!   area/(4π) ∫ ξ u(ξ) coth(πξ) dξ                      (identity term)
//! + Σ_{[μ]} Σ_{n≥1} l(μ) εⁿ(μ) v(n·l(μ)) / (2 sinh(n·l(μ)/2))
//! − k·log(2)·v(0)                                        (cusp term)
//! ```
//!
//! with [μ] running over oriented primitive hyperbolic classes. This module
//! evaluates the right-hand side with explicit tail bounds, and builds the
//! standard consequences on top: heat traces and their small-time
//! asymptotics, Weyl-limit checks, nonnegative spectral extraction from heat
//! data, the pinching limit of a single geodesic term, and length-spectrum
//! comparison of surfaces.

use crate::error::{Error, Result};
use crate::numerics::{integrate_even_decaying, xi_coth, QuadratureSpec};
use crate::spin::{epsilon, is_nontrivial_at_cusps, SpinStructure};
use crate::surfaces::{LengthSpectrum, SurfacePresentation};
use crate::testfn::{heat_pair, TestFunctionPair};
use num_complex::Complex64;
use std::f64::consts::PI;

mod fit;

pub use fit::fit_exponential_sums;

/// The three geometric-side terms and their error budget.
#[derive(Debug, Clone, Copy)]
pub struct GeometricSide {
    pub identity: Complex64,
    pub hyperbolic: Complex64,
    pub cusp: Complex64,
    /// identity + hyperbolic + cusp, formed exactly from the fields above.
    pub total: Complex64,
    /// Bound on the missing hyperbolic mass: unseen classes beyond the
    /// spectrum watermark plus the truncated n-tails of enumerated classes.
    pub hyperbolic_tail_bound: f64,
    /// Quadrature error bound of the identity term (includes its tail).
    pub quadrature_err: f64,
}

/// Identity term: area/(4π) · ∫_ℝ ξ u(ξ) coth(πξ) dξ.
///
/// The cutoff is pushed out until the pair's own tail bound drops below a
/// tenth of the absolute tolerance (or the pair's meaningful range ends);
/// the returned error combines quadrature and tail contributions.
pub fn identity_term(
    area: f64,
    pair: &TestFunctionPair,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let cutoff = pair.cutoff_for_tail(0.1 * spec.abs_tol).max(spec.cutoff);
    let tail = pair.identity_tail_bound(cutoff);
    // Integrate [0, cutoff] in chunks of bounded width: transforms of
    // compact-support pairs oscillate out to large ξ, and a single adaptive
    // pass over a long interval can falsely converge on an aliased panel.
    let n_chunks = (cutoff / 8.0).ceil().max(1.0) as usize;
    let chunk_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / n_chunks as f64,
        ..*spec
    };
    let width = cutoff / n_chunks as f64;
    let mut integral = Complex64::new(0.0, 0.0);
    let mut err = 2.0 * tail;
    for i in 0..n_chunks {
        let (a, b) = (i as f64 * width, (i + 1) as f64 * width);
        let re = crate::numerics::integrate_adaptive(|x| (xi_coth(x) * pair.u(x)).re, a, b, &chunk_spec)?;
        let im = crate::numerics::integrate_adaptive(|x| (xi_coth(x) * pair.u(x)).im, a, b, &chunk_spec)?;
        integral += 2.0 * Complex64::new(re.value, im.value);
        err += 2.0 * (re.err_bound + im.err_bound);
    }
    let scale = area / (4.0 * PI);
    Ok((scale * integral, scale * err))
}

/// Per-class geometric weight Σ_{n=1..n_max} l εⁿ v(nl) / (2 sinh(nl/2)).
fn class_sum(l: f64, eps: i8, pair: &TestFunctionPair, n_max: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for n in 1..=n_max {
        sign *= f64::from(eps);
        let nl = n as f64 * l;
        let denom = 2.0 * (nl / 2.0).sinh();
        let term = sign * l * pair.v(nl) / denom;
        acc += term;
        if nl > 3.0 && term.norm() < 1e-300 {
            break;
        }
    }
    acc
}

/// Geometric bound for the n > n_max remainder of one class, using
/// 1/(2 sinh(n·l/2)) ≤ e^{−(n−1)l/2} / (2 sinh(l/2)).
fn class_tail(l: f64, pair: &TestFunctionPair, n_max: usize) -> f64 {
    let cert = pair.decay;
    let q = (-(1.0 + cert.rate) * l).exp();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let geom = q.powi(n_max as i32 + 1) / (1.0 - q);
    l * cert.coefficient * (0.5 * l).exp() / (2.0 * (0.5 * l).sinh()) * geom
}

/// Bound on the total weight of classes beyond the watermark, via the
/// counting bound L(r) ≤ C·eʳ and the decay certificate.
fn unseen_class_bound(spectrum: &LengthSpectrum, pair: &TestFunctionPair) -> f64 {
    let w = spectrum.complete_up_to;
    if w <= 0.0 {
        return f64::INFINITY;
    }
    let cert = pair.decay;
    let rate = cert.rate;
    // per class of length l > w: Σ_n l c e^{−nl(1/2+rate)} / (2 sinh(nl/2))
    //   ≤ c_w2 · l c e^{−l(1+rate)}
    let c_w = 1.0 / (1.0 - (-w).exp());
    let c_w2 = c_w / (1.0 - (-(1.0 + rate) * w).exp());
    // integrate against the counting density C eˡ dl from w to ∞
    spectrum.tail_constant
        * c_w2
        * cert.coefficient
        * (w / rate + 1.0 / (rate * rate))
        * (-rate * w).exp()
}

/// Hyperbolic term: sum over oriented primitive classes and their iterates,
/// in deterministic order (records sorted by length, n ascending).
///
/// `n_max = None` truncates each class at the pair's default, which puts the
/// remainder far below 1e-20 for the analytic families. The returned bound
/// covers both unseen classes and the truncated n-tails.
pub fn hyperbolic_term(
    surface: &SurfacePresentation,
    spin: &SpinStructure,
    spectrum: &LengthSpectrum,
    pair: &TestFunctionPair,
    n_max: Option<usize>,
) -> Result<(Complex64, f64)> {
    if !(pair.decay.rate > 0.0) {
        return Err(Error::Domain(
            "hyperbolic term needs a positive decay certificate".into(),
        ));
    }
    spin.validate(surface)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut tail = unseen_class_bound(spectrum, pair);
    for rec in spectrum.primitive_records() {
        let eps = epsilon(spin, &rec.word, surface)?;
        let nm = n_max.unwrap_or_else(|| pair.default_n_max(rec.length));
        acc += class_sum(rec.length, eps, pair, nm);
        tail += class_tail(rec.length, pair, nm);
    }
    Ok((acc, tail))
}

/// Cusp term −k·log(2)·v(0).
pub fn cusp_term(cusps: usize, pair: &TestFunctionPair) -> Complex64 {
    -(cusps as f64) * 2.0f64.ln() * pair.v(0.0)
}

/// Assembles the full geometric side. Refuses to run when the spin structure
/// fails ε = −1 at some cusp, since the formula's hypothesis is violated.
pub fn geometric_side(
    surface: &SurfacePresentation,
    spin: &SpinStructure,
    pair: &TestFunctionPair,
    spectrum: &LengthSpectrum,
    spec: &QuadratureSpec,
) -> Result<GeometricSide> {
    spin.validate(surface)?;
    if !is_nontrivial_at_cusps(spin, surface)? {
        return Err(Error::HypothesisViolation(
            "spin structure is trivial along a cusp (ε ≠ −1 on a primitive parabolic)".into(),
        ));
    }
    let (identity, quadrature_err) = identity_term(surface.area, pair, spec)?;
    let (hyperbolic, hyperbolic_tail_bound) = hyperbolic_term(surface, spin, spectrum, pair, None)?;
    let cusp = cusp_term(surface.cusps, pair);
    Ok(GeometricSide {
        identity,
        hyperbolic,
        cusp,
        total: identity + hyperbolic + cusp,
        hyperbolic_tail_bound,
        quadrature_err,
    })
}

/// Heat trace Σ e^{−Tλⱼ}, expressed through the geometric side with the heat
/// pair. Accurate wherever the hyperbolic tail bound is small — the
/// enumerated spectrum must reach well beyond the Gaussian width, which caps
/// the usable T at roughly (watermark/10)² at desk scale.
pub fn heat_trace(
    surface: &SurfacePresentation,
    spin: &SpinStructure,
    spectrum: &LengthSpectrum,
    t: f64,
) -> Result<f64> {
    let pair = heat_pair(t)?;
    let spec = QuadratureSpec {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_subdivisions: 40_000,
        cutoff: 8.0,
    };
    let side = geometric_side(surface, spin, &pair, spectrum, &spec)?;
    debug_assert!(side.total.im.abs() < 1e-9);
    Ok(side.total.re)
}

/// Coefficients of the small-time heat-trace expansion
/// A(T) = area/(4πT) − k·log2/√(4πT) + (area/4π)·Σ_m a_m T^m with
/// a_m = ((−1)^m/m!) ∫ ξ^{2m} (ξ·coth(πξ) − |ξ|) dξ.
#[derive(Debug, Clone)]
pub struct AsymptoticCoefficients {
    /// a_0 … a_{n_terms−1}.
    pub a: Vec<f64>,
    pub area: f64,
    pub cusps: usize,
}

impl AsymptoticCoefficients {
    /// Evaluates the truncated asymptotic model at time `t`.
    pub fn model(&self, t: f64) -> f64 {
        let mut poly = 0.0;
        for &am in self.a.iter().rev() {
            poly = poly * t + am;
        }
        self.area / (4.0 * PI * t) - self.cusps as f64 * 2.0f64.ln() / (4.0 * PI * t).sqrt()
            + self.area / (4.0 * PI) * poly
    }
}

/// Computes a_0 … a_{n_terms−1} by quadrature against the exponentially
/// small excess ξ·coth(πξ) − |ξ|.
pub fn heat_asymptotics(
    area: f64,
    cusps: usize,
    n_terms: usize,
    spec: &QuadratureSpec,
) -> Result<AsymptoticCoefficients> {
    if n_terms < 1 {
        return Err(Error::Domain("n_terms must be at least 1".into()));
    }
    let mut a = Vec::with_capacity(n_terms);
    let mut factorial = 1.0;
    for m in 0..n_terms {
        if m > 0 {
            factorial *= m as f64;
        }
        // excess ≤ 3ξe^{−2πξ} for ξ ≥ 1, so the tail of ξ^{2m}·excess beyond
        // X is below 3·X^{2m+1}e^{−2πX}/(2π − (2m+1)/X)
        let tail_at = |x: f64| {
            3.0 * x.powi(2 * m as i32 + 1) * (-2.0 * PI * x).exp()
                / (2.0 * PI - (2.0 * m as f64 + 1.0) / x)
        };
        let mut cutoff = spec.cutoff.max(4.0 + m as f64);
        while tail_at(cutoff) > 0.1 * spec.abs_tol && cutoff < 1e4 {
            cutoff += 2.0;
        }
        let q = integrate_even_decaying(
            |xi| xi.abs().powi(2 * m as i32) * (xi_coth(xi) - xi.abs()),
            &spec.with_cutoff(cutoff),
            tail_at(cutoff),
        )?;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        a.push(sign / factorial * q.value);
    }
    Ok(AsymptoticCoefficients { a, area, cusps })
}

/// Nonnegative exponential-sum estimate of the spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    /// Merged eigenvalue estimates, ascending.
    pub eigenvalues: Vec<f64>,
    /// Total fitted weight (multiplicity estimate) per eigenvalue.
    pub weights: Vec<f64>,
    /// Max deviation of the fit over the sample grid.
    pub residual: f64,
    /// Raw positive grid cells (λ, w) backing the estimates; sums against
    /// smooth functions should use these.
    pub support: Vec<(f64, f64)>,
    /// Sign convention for the square roots of the eigenvalues.
    pub xi_convention: &'static str,
}

impl SpectrumEstimate {
    /// Σ w·g(λ) over the raw support.
    pub fn sum_against(&self, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.support
            .iter()
            .map(|&(l, w)| w * g(l))
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }
}

/// Recovers eigenvalue/weight estimates from heat traces of the surface:
/// samples Σ w·e^{−Tλ} on `t_grid` through the geometric side, then fits
/// nonnegative weights on `lambda_grid`.
pub fn extract_spectrum(
    surface: &SurfacePresentation,
    spin: &SpinStructure,
    spectrum: &LengthSpectrum,
    t_grid: &[f64],
    lambda_grid: &[f64],
    residual_bound: f64,
) -> Result<SpectrumEstimate> {
    if lambda_grid.is_empty() {
        return Err(Error::Domain("empty eigenvalue grid".into()));
    }
    if t_grid.len() < 2 * lambda_grid.len() {
        return Err(Error::Domain(format!(
            "need at least {} time samples for {} grid cells, got {}",
            2 * lambda_grid.len(),
            lambda_grid.len(),
            t_grid.len()
        )));
    }
    let samples = t_grid
        .iter()
        .map(|&t| heat_trace(surface, spin, spectrum, t))
        .collect::<Result<Vec<_>>>()?;
    fit_exponential_sums(t_grid, &samples, lambda_grid, residual_bound)
}

/// Returns (T, T·heat_trace(T)) along `t_list`; the products approach
/// area/(4π) for the half-spectrum convention used here (doubling for the
/// full squared-Dirac spectrum gives the Weyl constant area/(2π)).
pub fn weyl_limit_check(
    surface: &SurfacePresentation,
    spin: &SpinStructure,
    spectrum: &LengthSpectrum,
    t_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    t_list
        .iter()
        .map(|&t| Ok((t, t * heat_trace(surface, spin, spectrum, t)?)))
        .collect()
}

/// Value of the single-geodesic pinching term, with a divergence warning for
/// the excluded ε = +1 deep-pinch regime.
#[derive(Debug, Clone, Copy)]
pub struct PinchTerm {
    pub value: Complex64,
    pub divergence_warning: bool,
}

/// The pinched-class contribution 2 Σ_{n≥1} εⁿ l v(nl) / (2 sinh(nl/2)).
///
/// For ε = −1 the sum is evaluated in the mean-value pairing
///
/// ```text
/// 2 Σ_j (f(jl) − f((2j−1)l/2))/(2j−1) − f(jl)/(2j(2j−1)),  f(x) = x·v(2x)/sinh x,
/// ```
///
/// an exact regrouping of consecutive terms that stays numerically benign as
/// l → 0, where the value approaches −2·log2·v(0). For ε = +1 the direct sum
/// is used; below l = 1e-3 it grows like 1/l and the result carries a
/// divergence warning.
pub fn pinch_geodesic_term(
    l: f64,
    pair: &TestFunctionPair,
    eps_sign: i8,
    n_max: Option<usize>,
) -> Result<PinchTerm> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("geodesic length {l} must be positive")));
    }
    if eps_sign != 1 && eps_sign != -1 {
        return Err(Error::Domain("eps_sign must be ±1".into()));
    }
    let nm = n_max.unwrap_or_else(|| pair.default_n_max(l));
    if eps_sign == 1 {
        let value = 2.0 * class_sum(l, 1, pair, nm);
        return Ok(PinchTerm { value, divergence_warning: l < 1e-3 });
    }
    // f(jl) and f((2j−1)l/2) regroup the terms n = 2j and n = 2j−1
    let f = |x: f64| pair.v(2.0 * x) * (x / x.sinh());
    let pairs = nm.div_ceil(2);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..=pairs {
        let jf = j as f64;
        let even = f(jf * l);
        let odd = f((2.0 * jf - 1.0) * l / 2.0);
        let term = (even - odd) / (2.0 * jf - 1.0) - even / (2.0 * jf * (2.0 * jf - 1.0));
        acc += term;
        if jf * l > 3.0 && term.norm() < 1e-300 {
            break;
        }
    }
    Ok(PinchTerm { value: 2.0 * acc, divergence_warning: false })
}

/// Which of the two compared surfaces a discrepancy witness points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// First discrepancy found between two marked length spectra.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscrepancyWitness {
    Area { left: f64, right: f64 },
    CuspCount { left: usize, right: usize },
    /// A primitive oriented class (length, ε) present only on one side.
    Length { length: f64, epsilon: i8, missing_from: Side },
    /// Lengths agree within tolerance but the ε-markings differ.
    EpsilonMismatch { length: f64, left: i8, right: i8 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsospectralVerdict {
    /// Areas, cusp counts, and the ε-marked primitive oriented length
    /// spectra agree out to r_max.
    Indistinguishable { r_max: f64 },
    Discrepancy(DiscrepancyWitness),
}

/// Compares two surfaces through their ε-marked primitive length spectra up
/// to `r_max` (lengths matched within 1e-8). Both spectra must be certified
/// at least out to `r_max`.
#[allow(clippy::too_many_arguments)]
pub fn isospectral_compare(
    surf_a: &SurfacePresentation,
    spin_a: &SpinStructure,
    spec_a: &LengthSpectrum,
    surf_b: &SurfacePresentation,
    spin_b: &SpinStructure,
    spec_b: &LengthSpectrum,
    r_max: f64,
) -> Result<IsospectralVerdict> {
    for s in [spec_a, spec_b] {
        if s.complete_up_to < r_max {
            return Err(Error::WatermarkTooLow {
                watermark: s.complete_up_to,
                requested: r_max,
            });
        }
    }
    if (surf_a.area - surf_b.area).abs() > 1e-9 {
        return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::Area {
            left: surf_a.area,
            right: surf_b.area,
        }));
    }
    if surf_a.cusps != surf_b.cusps {
        return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::CuspCount {
            left: surf_a.cusps,
            right: surf_b.cusps,
        }));
    }
    let marked = |surface: &SurfacePresentation,
                  spin: &SpinStructure,
                  spectrum: &LengthSpectrum|
     -> Result<Vec<(f64, i8)>> {
        let mut out = Vec::new();
        for rec in spectrum.primitive_records() {
            if rec.length <= r_max {
                out.push((rec.length, epsilon(spin, &rec.word, surface)?));
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        Ok(out)
    };
    let la = marked(surf_a, spin_a, spec_a)?;
    let lb = marked(surf_b, spin_b, spec_b)?;
    let (mut i, mut j) = (0, 0);
    loop {
        match (la.get(i), lb.get(j)) {
            (Some(&(l1, e1)), Some(&(l2, e2))) => {
                if (l1 - l2).abs() <= 1e-8 {
                    if e1 != e2 {
                        return Ok(IsospectralVerdict::Discrepancy(
                            DiscrepancyWitness::EpsilonMismatch { length: l1, left: e1, right: e2 },
                        ));
                    }
                    i += 1;
                    j += 1;
                } else if l1 < l2 {
                    return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::Length {
                        length: l1,
                        epsilon: e1,
                        missing_from: Side::Right,
                    }));
                } else {
                    return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::Length {
                        length: l2,
                        epsilon: e2,
                        missing_from: Side::Left,
                    }));
                }
            }
            (Some(&(l1, e1)), None) => {
                return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::Length {
                    length: l1,
                    epsilon: e1,
                    missing_from: Side::Right,
                }));
            }
            (None, Some(&(l2, e2))) => {
                return Ok(IsospectralVerdict::Discrepancy(DiscrepancyWitness::Length {
                    length: l2,
                    epsilon: e2,
                    missing_from: Side::Left,
                }));
            }
            (None, None) => return Ok(IsospectralVerdict::Indistinguishable { r_max }),
        }
    }
}
