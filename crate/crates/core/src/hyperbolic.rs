//! SL(2,ℝ) isometry algebra and upper half-plane geometry.
//!
//! Matrices act on ℍ = {x + iy : y > 0} by Möbius transformations. A matrix
//! and its negative induce the same isometry, so classification and lengths
//! only ever depend on |trace|; the sign of the trace becomes meaningful once
//! spin lifts enter (module [`crate::spin`]).

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default tolerance for trace comparisons against the parabolic boundary
/// |tr| = 2. Word products accumulate rounding, so callers may tighten or
/// loosen this.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Real 2×2 matrix of determinant one.
///
/// Construction renormalizes by √det to keep long word products from
/// drifting off the determinant-one surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnimodularMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl UnimodularMatrix {
    /// Builds the matrix, rescaling so the determinant is exactly (to
    /// rounding) one. Fails if the determinant is not positive or differs
    /// from 1 beyond any plausible rounding drift.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::Domain(format!(
                "matrix determinant {det} is not positive"
            )));
        }
        if (det - 1.0).abs() > 1e-6 {
            return Err(Error::Domain(format!(
                "matrix determinant {det} too far from 1 to renormalize"
            )));
        }
        let s = det.sqrt();
        Ok(UnimodularMatrix {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        UnimodularMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Matrix product, renormalized to determinant one.
    ///
    /// The determinant of the computed product is a*d − b*c, a cancellation
    /// whose rounding noise grows with the entry magnitudes (each entry is
    /// itself a possibly-cancelling sum of products). The deviation from 1 is
    /// divided out only when it exceeds that noise floor; correcting below
    /// the floor would inject noise instead of removing drift, which matters
    /// for near-parabolic products on deeply pinched surfaces.
    pub fn mul(&self, rhs: &Self) -> Self {
        let pa1 = self.a * rhs.a;
        let pa2 = self.b * rhs.c;
        let pb1 = self.a * rhs.b;
        let pb2 = self.b * rhs.d;
        let pc1 = self.c * rhs.a;
        let pc2 = self.d * rhs.c;
        let pd1 = self.c * rhs.b;
        let pd2 = self.d * rhs.d;
        let a = pa1 + pa2;
        let b = pb1 + pb2;
        let c = pc1 + pc2;
        let d = pd1 + pd2;
        let ad = a * d;
        let bc = b * c;
        let det = ad - bc;
        // entry-error magnitudes propagated into the determinant
        let noise = 8.0
            * f64::EPSILON
            * ((pa1.abs() + pa2.abs()) * d.abs()
                + (pd1.abs() + pd2.abs()) * a.abs()
                + (pb1.abs() + pb2.abs()) * c.abs()
                + (pc1.abs() + pc2.abs()) * b.abs()
                + ad.abs()
                + bc.abs());
        if det > 0.0 && (det - 1.0).abs() > noise {
            let s = det.sqrt();
            UnimodularMatrix { a: a / s, b: b / s, c: c / s, d: d / s }
        } else {
            UnimodularMatrix { a, b, c, d }
        }
    }

    /// Inverse in SL₂: [[d, −b], [−c, a]].
    pub fn inverse(&self) -> Self {
        UnimodularMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        UnimodularMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Integer power by repeated multiplication (exponents here stay small).
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = UnimodularMatrix::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Largest entry magnitude, used by the enumeration overflow guard.
    pub fn max_entry(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Möbius action z ↦ (az + b)/(cz + d) on the upper half-plane.
    pub fn apply(&self, z: &HalfPlanePoint) -> HalfPlanePoint {
        let zc = Complex64::new(z.x, z.y);
        let w = (self.a * zc + self.b) / (self.c * zc + self.d);
        HalfPlanePoint { x: w.re, y: w.im }
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self.a - other.a).abs() <= tol
            && (self.b - other.b).abs() <= tol
            && (self.c - other.c).abs() <= tol
            && (self.d - other.d).abs() <= tol
    }
}

/// Conjugacy type of an isometry, read off the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryClass {
    Identity,
    Hyperbolic,
    Parabolic,
    Elliptic,
}

/// Point x + iy of the upper half-plane (y > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::Domain(format!(
                "({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(HalfPlanePoint { x, y })
    }
}

/// Classifies an isometry by its trace: ±identity first, then |tr| against 2
/// with tolerance `tol`.
pub fn classify(m: &UnimodularMatrix, tol: f64) -> IsometryClass {
    let id = UnimodularMatrix::identity();
    if m.close_to(&id, tol) || m.close_to(&id.neg(), tol) {
        return IsometryClass::Identity;
    }
    let t = m.trace().abs();
    if (t - 2.0).abs() <= tol {
        IsometryClass::Parabolic
    } else if t > 2.0 {
        IsometryClass::Hyperbolic
    } else {
        IsometryClass::Elliptic
    }
}

/// Translation length l = 2·arccosh(|tr|/2) of a hyperbolic isometry — the
/// length of the closed geodesic attached to its conjugacy class.
pub fn translation_length(m: &UnimodularMatrix) -> Result<f64> {
    match classify(m, CLASSIFY_TOL) {
        IsometryClass::Hyperbolic => Ok(2.0 * (m.trace().abs() / 2.0).acosh()),
        other => Err(Error::Domain(format!(
            "translation length requires a hyperbolic element, got {other:?} (tr = {})",
            m.trace()
        ))),
    }
}

/// Hyperbolic distance on the upper half-plane.
///
/// Computed through sinh(d/2) = √(|z − w|² / (4 y_z y_w)), which is the
/// cosh d = 1 + |z − w|²/(2 y_z y_w) formula rearranged to stay accurate for
/// nearby points.
pub fn distance(z: &HalfPlanePoint, w: &HalfPlanePoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let q = (dx * dx + dy * dy) / (4.0 * z.y * w.y);
    2.0 * q.sqrt().asinh()
}

/// Distance d(R, S) between the pants-decomposition marker points of a pair
/// of pants with a boundary geodesic of length `l`:
///
/// cosh d(R,S) = (2cosh²(l/4) + cosh²(l/2)) / (2cosh²(l/4)).
///
/// The right-hand side decreases to 3/2 as l → 0, so d(R,S) stays above the
/// infimum arccosh(3/2) along a pinching family (it is strictly increasing
/// in `l`); that lower bound is what keeps collar diameters bounded.
pub fn pants_collar_distance(l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("pants_collar_distance: l = {l} ≤ 0")));
    }
    let c4 = (l / 4.0).cosh();
    let c2 = (l / 2.0).cosh();
    Ok((1.0 + c2 * c2 / (2.0 * c4 * c4)).acosh())
}

/// Unit complex number τ_{z→w} = −i (z − w̄)/|z − w̄| describing parallel
/// transport of the spin frame from z to w.
pub fn parallel_transport_phase(z: &HalfPlanePoint, w: &HalfPlanePoint) -> Complex64 {
    let num = Complex64::new(z.x - w.x, z.y + w.y); // z − conj(w)
    -Complex64::i() * num / num.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(a: f64, b: f64, c: f64, d: f64) -> UnimodularMatrix {
        UnimodularMatrix::new(a, b, c, d).unwrap()
    }

    prop_compose! {
        /// Arbitrary determinant-one matrix from shear/scale parameters.
        fn random_unimodular()(x in -1.0f64..1.0, y in -1.0f64..1.0, s in -0.7f64..0.7) -> UnimodularMatrix {
            let shear_x = mat(1.0, x, 0.0, 1.0);
            let shear_y = mat(1.0, 0.0, y, 1.0);
            let scale = mat(s.exp(), 0.0, 0.0, (-s).exp());
            shear_x.mul(&shear_y).mul(&scale)
        }
    }

    #[test]
    fn classify_examples() {
        let e = std::f64::consts::E;
        assert_eq!(classify(&mat(e, 0.0, 0.0, 1.0 / e), CLASSIFY_TOL), IsometryClass::Hyperbolic);
        assert_eq!(classify(&mat(1.0, 1.0, 0.0, 1.0), CLASSIFY_TOL), IsometryClass::Parabolic);
        assert_eq!(classify(&mat(0.0, 1.0, -1.0, 0.0), CLASSIFY_TOL), IsometryClass::Elliptic);
        assert_eq!(classify(&UnimodularMatrix::identity(), CLASSIFY_TOL), IsometryClass::Identity);
        assert_eq!(
            classify(&UnimodularMatrix::identity().neg(), CLASSIFY_TOL),
            IsometryClass::Identity
        );
    }

    #[test]
    fn translation_length_examples() {
        let e = std::f64::consts::E;
        let m = mat(e, 0.0, 0.0, 1.0 / e);
        assert!((translation_length(&m).unwrap() - 2.0).abs() < 1e-12);

        // tr = 3: the systole trace of the modular torus
        let m = mat(2.0, 1.0, 1.0, 1.0); // trace 3, det 1
        let l = translation_length(&m).unwrap();
        assert!((l - 2.0 * 1.5f64.acosh()).abs() < 1e-12);
        assert!((l - 1.9248473002).abs() < 1e-9);

        assert!(translation_length(&mat(1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn distance_examples() {
        let i = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let ei = HalfPlanePoint::new(0.0, std::f64::consts::E).unwrap();
        assert!((distance(&i, &ei) - 1.0).abs() < 1e-12);
        assert_eq!(distance(&i, &i), 0.0);
    }

    #[test]
    fn pants_marker_points_match_collar_formula() {
        // marker points R and S = e^{l/2}·R on the lifted pants boundary
        let l = 1.0f64;
        let el = l.exp();
        let eh = (l / 2.0).exp();
        let r = HalfPlanePoint::new(2.0 * eh / (el + 1.0), (el - 1.0) / (el + 1.0)).unwrap();
        let s = HalfPlanePoint::new(eh * r.x, eh * r.y).unwrap();
        let d = distance(&r, &s);
        assert!((d - pants_collar_distance(l).unwrap()).abs() < 1e-10);
        // the displayed intermediate form of cosh d(R,S)
        let lhs = 2.0 * (d.cosh() - 1.0);
        let rhs = (el + 1.0).powi(2) / (eh * (eh + 1.0).powi(2));
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn collar_distance_limit_and_monotonicity() {
        let inf = 1.5f64.acosh();
        assert!((inf - 0.9624236501).abs() < 1e-9);
        assert!((pants_collar_distance(1e-9).unwrap() - inf).abs() < 1e-9);
        // cosh d(R,S) decreases to 3/2 as l → 0: the distance grows with l
        // and is bounded below by arccosh(3/2)
        let mut prev = inf;
        for &l in &[0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
            let v = pants_collar_distance(l).unwrap();
            assert!(v > prev, "d(R,S) must increase with l: {v} at l = {l}");
            prev = v;
        }
    }

    #[test]
    fn parallel_transport_examples() {
        let i = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let tau = parallel_transport_phase(&i, &i);
        assert!((tau - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let two_i = HalfPlanePoint::new(0.0, 2.0).unwrap();
        assert!((parallel_transport_phase(&i, &two_i) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn classification_is_psl2_well_defined(m in random_unimodular()) {
            prop_assert_eq!(classify(&m, CLASSIFY_TOL), classify(&m.neg(), CLASSIFY_TOL));
        }

        #[test]
        fn translation_length_is_conjugation_invariant(m in random_unimodular(), g in random_unimodular()) {
            // force a hyperbolic element by squaring against a fixed translation
            let h = m.mul(&mat(2.0, 1.0, 1.0, 1.0)).mul(&m.inverse());
            let conj = g.mul(&h).mul(&g.inverse());
            let l1 = translation_length(&h).unwrap();
            let l2 = translation_length(&conj).unwrap();
            prop_assert!((l1 - l2).abs() < 1e-9);
        }

        #[test]
        fn transport_phase_is_unimodular(zx in -3.0f64..3.0, zy in 0.1f64..5.0, wx in -3.0f64..3.0, wy in 0.1f64..5.0) {
            let z = HalfPlanePoint::new(zx, zy).unwrap();
            let w = HalfPlanePoint::new(wx, wy).unwrap();
            prop_assert!((parallel_transport_phase(&z, &w).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn distance_triangle_inequality(
            ax in -3.0f64..3.0, ay in 0.1f64..5.0,
            bx in -3.0f64..3.0, by in 0.1f64..5.0,
            cx in -3.0f64..3.0, cy in 0.1f64..5.0,
        ) {
            let a = HalfPlanePoint::new(ax, ay).unwrap();
            let b = HalfPlanePoint::new(bx, by).unwrap();
            let c = HalfPlanePoint::new(cx, cy).unwrap();
            prop_assert!(distance(&a, &c) <= distance(&a, &b) + distance(&b, &c) + 1e-9);
        }

        #[test]
        fn distance_is_isometry_invariant(
            g in random_unimodular(),
            zx in -3.0f64..3.0, zy in 0.1f64..5.0,
            wx in -3.0f64..3.0, wy in 0.1f64..5.0,
        ) {
            let z = HalfPlanePoint::new(zx, zy).unwrap();
            let w = HalfPlanePoint::new(wx, wy).unwrap();
            let d1 = distance(&z, &w);
            let d2 = distance(&g.apply(&z), &g.apply(&w));
            prop_assert!((d1 - d2).abs() < 1e-9);
        }
    }
}
