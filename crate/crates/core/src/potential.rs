//! The inter-cluster interaction `W = V13 + V23` and the effective potential
//! `V_eff(y) = ∫ |φ0(x)|² W₋(x, y) d³x` felt by the third particle.
//!
//! Units are internal (`mu_x = 2`), so `|φ0|² = (8/π) e^{-4x}` and
//! `V_eff(y) = 16 ∫₀^∞ x² e^{-4x} ∫₋₁¹ W₋(x, y, c) dc dx`.
//!
//! Three evaluation routes are provided:
//! * numeric: the angular integral in closed form over the exact region where
//!   `W ≤ 0` (`c ≥ (a − 1/2) x / y`), then adaptive radial quadrature;
//! * semi-analytic: a one-dimensional integral plus closed-form short-range
//!   terms, valid for `a > 1/2`, and its reflected form for `a < 1/2` built
//!   on `W(a; x, y, c) = −W(1 − a; x, y, −c)`;
//! * the envelope `3 / (16 y²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_breaks, QuadSettings};
use crate::scalar::Scalar;

/// Radial cutoff of the pair coordinate; the discarded tail is `O(e^{-48})`.
pub const RADIAL_CUTOFF: f64 = 12.0;

/// Coefficient of the envelope `y² V_eff(y) ≤ 3/16`.
pub const ENVELOPE_COEFFICIENT: f64 = 3.0 / 16.0;

/// A point `(x, y, cos θ)` in the Jacobi frame at mass parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionPoint<T> {
    pub x: T,
    pub y: T,
    pub c: T,
    pub a: T,
}

impl<T: Scalar> InteractionPoint<T> {
    pub fn new(x: T, y: T, c: T, a: T) -> Result<Self> {
        if !(x >= T::zero() && y >= T::zero() && x.is_finite() && y.is_finite()) {
            return Err(Error::DomainError("x and y must be finite and non-negative".into()));
        }
        if !(c >= -T::one() && c <= T::one()) {
            return Err(Error::DomainError("cos θ must lie in [-1, 1]".into()));
        }
        check_mass_parameter(a)?;
        Ok(Self { x, y, c, a })
    }

    /// `(r13, r23)`, the distances from particle 3 to particles 1 and 2.
    pub fn distances(&self) -> (T, T) {
        let Self { x, y, c, a } = *self;
        let s2 = (T::one() - c * c).max(T::zero());
        let b = T::one() - a;
        let r13 = ((a * x - y * c).powi(2) + y * y * s2).sqrt();
        let r23 = ((b * x + y * c).powi(2) + y * y * s2).sqrt();
        (r13, r23)
    }

    fn checked_distances(&self) -> Result<(T, T)> {
        let (r13, r23) = self.distances();
        if r13 <= T::zero() || r23 <= T::zero() {
            return Err(Error::Singular);
        }
        Ok((r13, r23))
    }
}

fn check_mass_parameter<T: Scalar>(a: T) -> Result<()> {
    if a >= T::zero() && a <= T::one() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("mass parameter a = {a} outside [0, 1]")))
    }
}

/// `W = -1/r13 + 1/r23`.
pub fn w_value<T: Scalar>(p: &InteractionPoint<T>) -> Result<T> {
    let (r13, r23) = p.checked_distances()?;
    Ok(r13.recip().neg() + r23.recip())
}

/// `W₋ = max(0, -W)`.
pub fn w_minus<T: Scalar>(p: &InteractionPoint<T>) -> Result<T> {
    Ok((-w_value(p)?).max(T::zero()))
}

/// `W₊ = max(0, W)`.
pub fn w_plus<T: Scalar>(p: &InteractionPoint<T>) -> Result<T> {
    Ok(w_value(p)?.max(T::zero()))
}

/// Screening factor with `W₋ = -(V13 + V23 F)`: 1 where `|V13| ≥ |V23|`,
/// otherwise `|V13| / |V23|`.
pub fn f_factor<T: Scalar>(p: &InteractionPoint<T>) -> Result<T> {
    let (r13, r23) = p.checked_distances()?;
    Ok(if r13 <= r23 { T::one() } else { r23 / r13 })
}

/// `y² ∫₋₁¹ W₋ dc` in closed form.
///
/// The region `W ≤ 0` is `c ∈ [c_lo, 1]`. On it `∫ dc/r = 2(1 − c_lo)/(r(c_lo) + r(1))`,
/// and the difference of the two terms is rewritten through
/// `r23(c) − r13(c) = x((1 − 2a)x + 2yc)/(r13 + r23)`, which vanishes at an
/// interior `c_lo`. No step subtracts nearly equal quantities.
fn angular_w_minus_scaled<T: Scalar>(x: T, y: T, a: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let b = one - a;
    let cut = (a - half) * x / y;
    if cut >= one {
        return T::zero();
    }
    // distances at c = 1
    let r13_hi = (a * x - y).abs();
    let r23_hi = b * x + y;
    let (c_lo, r13_lo, r23_lo) = if cut <= -one {
        (-one, a * x + y, (b * x - y).abs())
    } else {
        let s = x / y;
        let r = y * (a * b * s * s + one).sqrt();
        (cut, r, r)
    };
    let gap = |c: T, r13: T, r23: T| {
        let den = r13 + r23;
        if den > T::zero() {
            x * ((one - two * a) * x + two * y * c) / den
        } else {
            T::zero()
        }
    };
    let diff = if cut <= -one { gap(c_lo, r13_lo, r23_lo) } else { T::zero() } + gap(one, r13_hi, r23_hi);
    let sum13 = r13_lo + r13_hi;
    let sum23 = r23_lo + r23_hi;
    if sum13 <= T::zero() || sum23 <= T::zero() {
        return T::zero();
    }
    (two * (one - c_lo) * diff * (y / sum13) * (y / sum23)).max(T::zero())
}

/// Value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: T,
}

impl<T: Scalar> Estimate<T> {
    fn exact(value: T) -> Self {
        Self { value, abs_error: T::zero() }
    }

    fn scale(self, k: T) -> Self {
        Self { value: self.value * k, abs_error: self.abs_error * k.abs() }
    }
}

fn check_y<T: Scalar>(y: T) -> Result<()> {
    if y > T::zero() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("y = {y} must be positive and finite")))
    }
}

/// `y² V_eff(y)` by radial quadrature over the closed-form angular integral.
pub fn veff_numeric_scaled<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<Estimate<T>> {
    check_y(y)?;
    check_mass_parameter(a)?;
    let cutoff = T::lit(RADIAL_CUTOFF);
    let half = T::lit(0.5);
    let mut breaks = vec![T::zero()];
    if a > T::zero() {
        breaks.push(y / a);
    }
    if a != half {
        breaks.push(y / (a - half).abs());
    }
    breaks.push(y);
    breaks.retain(|&b| b < cutoff);
    breaks.push(cutoff);
    breaks.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
    breaks.dedup();
    let four = T::lit(4.0);
    let sixteen = T::lit(16.0);
    let r =
        integrate_breaks(|x: T| x * x * (-four * x).exp() * angular_w_minus_scaled(x, y, a), &breaks, quad)?;
    // tail beyond the cutoff: ∫dc W₋ ≤ 2/y, ∫_12^∞ x² e^{-4x} dx = e^{-48}(36 + 3/2 + 1/32)
    let tail = sixteen * T::lit(2.0) * y * (-four * cutoff).exp() * T::lit(36.0 + 1.5 + 1.0 / 32.0);
    Ok(Estimate { value: sixteen * r.value, abs_error: sixteen * r.abs_error + tail })
}

/// `V_eff(y)` by numeric quadrature.
pub fn veff_numeric<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<T> {
    Ok(veff_numeric_scaled(y, a, quad)?.value / (y * y))
}

/// Closed form of the short-range repulsive term for `a > 1/2`, scaled by `y²`.
///
/// With `t = s y`, `L = y/a`, `R = ω y`:
/// `U = (32/y) ∫_L^R t e^{-4t} (L − t) dt = (32/y)[e^{-4L} Q(L) − e^{-4R} Q(R)]`,
/// `Q(t) = −t²/4 + (L/4 − 1/8) t + L/16 − 1/32`.
fn short_range_term_scaled<T: Scalar>(y: T, a: T, omega: T) -> T {
    let l = y / a;
    let r = omega * y;
    let four = T::lit(4.0);
    let q_l = -(l / T::lit(16.0) + T::lit(1.0 / 32.0));
    let q_r = -r * r / four + (l / four - T::lit(0.125)) * r + l / T::lit(16.0) - T::lit(1.0 / 32.0);
    let hi = if r.is_finite() { (-four * r).exp() * q_r } else { T::zero() };
    T::lit(32.0) * y * ((-four * l).exp() * q_l - hi)
}

/// `y² U(y)` for `a > 1/2`; negative for every `y > 0`.
pub fn short_range_term<T: Scalar>(y: T, a: T) -> Result<T> {
    check_y(y)?;
    let half = T::lit(0.5);
    if !(a > half && a <= T::one()) {
        return Err(Error::DomainError(format!("short-range term needs a in (1/2, 1], got {a}")));
    }
    Ok(short_range_term_scaled(y, a, T::one() / (a - half)) / (y * y))
}

/// `y² V_eff(y)` for `a > 1/2`: a one-dimensional quadrature plus `y² U`.
pub fn veff_semianalytic_scaled<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<Estimate<T>> {
    check_y(y)?;
    let half = T::lit(0.5);
    let one = T::one();
    if !(a > half && a <= one) {
        return Err(Error::DomainError(format!("semi-analytic form requires a in (1/2, 1], got {a}")));
    }
    let omega = one / (a - half);
    let ab = a * (one - a);
    let four = T::lit(4.0);
    let upper = (omega * y).min(T::lit(40.0));
    // 16 y² / (a(1−a)) ∫ s e^{-4sy}(√(a(1−a)s²+1) − 1) ds with t = s y and
    // √(1+z) − 1 = z / (1 + √(1+z)).
    let r = integrate_breaks(
        |t: T| {
            let z = ab * t * t / (y * y);
            t * t * t * (-four * t).exp() / (one + (one + z).sqrt())
        },
        &[T::zero(), upper.min(one), upper],
        quad,
    )?;
    let sixteen = T::lit(16.0);
    let u = short_range_term_scaled(y, a, omega);
    Ok(Estimate { value: sixteen * r.value + u, abs_error: sixteen * r.abs_error })
}

/// Semi-analytic `V_eff(y)`, `a > 1/2`.
pub fn veff_semianalytic<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<T> {
    Ok(veff_semianalytic_scaled(y, a, quad)?.value / (y * y))
}

/// `−y² W̄(a; y)`, where `W̄ = ∫ |φ0|² W d³x`, in closed form for `a < 1/2`:
/// `−W̄ = (2/y)[e^{-4L}(L + 1/2) − e^{-4R}(R + 1/2)]` with `L = y/(1−a)`, `R = y/a`.
pub fn mean_interaction_deficit_scaled<T: Scalar>(y: T, a: T) -> Result<T> {
    check_y(y)?;
    let half = T::lit(0.5);
    if !(a >= T::zero() && a < half) {
        return Err(Error::DomainError(format!("reflection needs a in [0, 1/2), got {a}")));
    }
    let four = T::lit(4.0);
    let l = y / (T::one() - a);
    let lo = (-four * l).exp() * (l + half);
    let hi = if a > T::zero() {
        let r = y / a;
        (-four * r).exp() * (r + half)
    } else {
        T::zero()
    };
    Ok(T::lit(2.0) * y * (lo - hi))
}

/// `y² V_eff(y)` for `a < 1/2` as `−y² W̄(a) + y² V_eff(1 − a)`.
pub fn veff_reflected_scaled<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<Estimate<T>> {
    let deficit = mean_interaction_deficit_scaled(y, a)?;
    let mirror = veff_semianalytic_scaled(y, T::one() - a, quad)?;
    Ok(Estimate { value: deficit + mirror.value, abs_error: mirror.abs_error })
}

/// Reflected `V_eff(y)`, `a < 1/2`.
pub fn veff_reflected<T: Scalar>(y: T, a: T, quad: &QuadSettings<T>) -> Result<T> {
    Ok(veff_reflected_scaled(y, a, quad)?.value / (y * y))
}

/// `3 / (16 y²)`.
pub fn veff_envelope<T: Scalar>(y: T) -> Result<T> {
    if !(y > T::zero()) {
        return Err(Error::DomainError("envelope undefined at y <= 0".into()));
    }
    Ok(T::lit(ENVELOPE_COEFFICIENT) / (y * y))
}

/// How [`EffectivePotential`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Numeric,
    /// Semi-analytic for `a > 1/2`, reflected for `a < 1/2`.
    SemiAnalytic,
    Envelope,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Numeric => "numeric",
            EvalMode::SemiAnalytic => "semianalytic",
            EvalMode::Envelope => "envelope",
        }
    }
}

/// `V_eff` at a fixed mass parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential<T> {
    pub a: T,
    pub quad: QuadSettings<T>,
    pub mode: EvalMode,
}

impl<T: Scalar> EffectivePotential<T> {
    pub fn new(a: T, mode: EvalMode) -> Result<Self> {
        check_mass_parameter(a)?;
        if mode == EvalMode::SemiAnalytic && a == T::lit(0.5) {
            return Err(Error::DomainError("no semi-analytic form at a = 1/2".into()));
        }
        Ok(Self { a, quad: QuadSettings::default(), mode })
    }

    pub fn with_quad(mut self, quad: QuadSettings<T>) -> Self {
        self.quad = quad;
        self
    }

    /// `y² V_eff(y)` with an error estimate.
    pub fn scaled_estimate(&self, y: T) -> Result<Estimate<T>> {
        match self.mode {
            EvalMode::Numeric => veff_numeric_scaled(y, self.a, &self.quad),
            EvalMode::SemiAnalytic => {
                if self.a > T::lit(0.5) {
                    veff_semianalytic_scaled(y, self.a, &self.quad)
                } else {
                    veff_reflected_scaled(y, self.a, &self.quad)
                }
            }
            EvalMode::Envelope => {
                check_y(y)?;
                Ok(Estimate::exact(T::lit(ENVELOPE_COEFFICIENT)))
            }
        }
    }

    /// `V_eff(y)` with an error estimate.
    pub fn estimate(&self, y: T) -> Result<Estimate<T>> {
        Ok(self.scaled_estimate(y)?.scale((y * y).recip()))
    }

    pub fn eval(&self, y: T) -> Result<T> {
        Ok(self.estimate(y)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(x: f64, y: f64, c: f64, a: f64) -> InteractionPoint<f64> {
        InteractionPoint::new(x, y, c, a).unwrap()
    }

    #[test]
    fn symmetric_point_has_zero_interaction() {
        for &(x, y) in &[(0.3, 1.0), (2.0, 0.7), (5.0, 5.0)] {
            assert!(w_value(&pt(x, y, 0.0, 0.5)).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn infinite_nucleus_direct_arithmetic() {
        assert_relative_eq!(w_value(&pt(1.0, 2.0, 1.0, 0.0)).unwrap(), -1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn negative_part() {
        let p = pt(1.0, 1.0, 1.0, 0.7);
        let (r13, r23) = p.distances();
        assert_relative_eq!(r13, 0.3, epsilon = 1e-15);
        assert_relative_eq!(r23, 1.3, epsilon = 1e-15);
        assert_relative_eq!(w_minus(&p).unwrap(), 1.0 / 0.3 - 1.0 / 1.3, epsilon = 1e-12);
        // W > 0 on the far side
        let q = pt(1.0, 1.0, -1.0, 0.7);
        assert!(w_value(&q).unwrap() > 0.0);
        assert_eq!(w_minus(&q).unwrap(), 0.0);
    }

    #[test]
    fn screening_factor_ratio() {
        // x = 1, y = 1.5, c = -1, a = 0.5: r13 = 2, r23 = 1
        let p = pt(1.0, 1.5, -1.0, 0.5);
        let (r13, r23) = p.distances();
        assert_relative_eq!(r13, 2.0);
        assert_relative_eq!(r23, 1.0);
        assert_relative_eq!(f_factor(&p).unwrap(), 0.5);
        assert_eq!(f_factor(&pt(1.0, 1.0, 1.0, 0.7)).unwrap(), 1.0);
    }

    #[test]
    fn singular_point() {
        // r13 = 0 at a x = y, c = 1
        assert_eq!(w_value(&pt(2.0, 1.0, 1.0, 0.5)), Err(Error::Singular));
    }

    #[test]
    fn envelope_values() {
        assert_eq!(veff_envelope(1.0).unwrap(), 0.1875);
        assert_eq!(veff_envelope(2.0).unwrap(), 3.0 / 64.0);
        assert!(veff_envelope(0.0f64).is_err());
    }

    #[test]
    fn angular_closed_form_matches_quadrature_over_c() {
        let s = QuadSettings::<f64>::default().with_rel_tol(1e-12);
        for &a in &[0.0f64, 0.2, 0.5, 0.7, 1.0] {
            for &(x, y) in &[(0.5f64, 1.0f64), (3.0, 1.0), (1.0, 0.2), (0.1, 4.0)] {
                let closed = angular_w_minus_scaled(x, y, a);
                // dense grid over c via quadrature with a breakpoint at the sign change
                let cut = ((a - 0.5) * x / y).clamp(-1.0, 1.0);
                let mut pts = vec![-1.0, cut, 1.0];
                let kink = if a > 0.0 { y / (a * x) } else { 2.0 };
                if kink < 1.0 && kink > -1.0 {
                    pts.push(kink);
                }
                pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
                let q = integrate_breaks(|c| w_minus(&pt(x, y, c, a)).unwrap_or(0.0) * y * y, &pts, &s);
                let q = q.unwrap().value;
                assert!(
                    approx::relative_eq!(closed, q, epsilon = 1e-9, max_relative = 1e-7),
                    "a={a} x={x} y={y}: {closed} vs {q}"
                );
            }
        }
    }

    #[test]
    fn semianalytic_requires_upper_half() {
        let s = QuadSettings::<f64>::default();
        assert!(matches!(veff_semianalytic(1.0, 0.5, &s), Err(Error::DomainError(_))));
        assert!(matches!(veff_semianalytic(1.0, 0.3, &s), Err(Error::DomainError(_))));
        assert!(matches!(veff_reflected(1.0, 0.5, &s), Err(Error::DomainError(_))));
        assert!(matches!(veff_reflected(1.0, 0.7, &s), Err(Error::DomainError(_))));
    }

    #[test]
    fn short_range_term_is_negative() {
        for &a in &[0.51, 0.6, 0.75, 0.9, 1.0] {
            for &y in &[0.01, 0.1, 1.0, 3.0, 10.0] {
                let u = short_range_term(y, a).unwrap();
                assert!(u < 0.0 || (u == 0.0 && y > 5.0), "a={a} y={y} U={u}");
            }
        }
    }

    #[test]
    fn short_range_term_matches_quadrature() {
        let s = QuadSettings::<f64>::default().with_rel_tol(1e-12);
        for &a in &[0.6, 0.8, 0.95] {
            for &y in &[0.2, 1.0, 2.0] {
                let omega = 1.0 / (a - 0.5);
                let q = integrate_breaks(
                    |s: f64| s * (-4.0 * s * y).exp() * (1.0 / a - s),
                    &[1.0 / a, omega],
                    &s,
                )
                .unwrap()
                .value
                    * 32.0
                    * y
                    * y;
                assert_relative_eq!(short_range_term(y, a).unwrap(), q, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn mean_interaction_matches_quadrature() {
        // −W̄ from the piecewise-linear bracket, by direct quadrature in s
        let s = QuadSettings::<f64>::default().with_rel_tol(1e-12);
        for &a in &[0.05, 0.2, 0.45] {
            for &y in &[0.1, 0.7, 3.0] {
                let l = 1.0 / (1.0 - a);
                let r = 1.0 / a;
                let f = |s: f64| {
                    16.0 * y * y * (-4.0 * s * y).exp() * s * ((1.0 / a - l) + (s - l).abs() - (s - r).abs())
                };
                let q = integrate_breaks(f, &[0.0, l, r, r + 60.0 / y], &s).unwrap().value;
                let closed = mean_interaction_deficit_scaled(y, a).unwrap() / (y * y);
                assert_relative_eq!(closed, q, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn large_y_limit_of_scaled_potential() {
        let s = QuadSettings::<f64>::default();
        for &a in &[0.0, 0.3, 0.5, 0.7] {
            let v = veff_numeric_scaled(1e4, a, &s).unwrap().value;
            assert!((v - ENVELOPE_COEFFICIENT).abs() < 1e-6, "a={a}: {v}");
            assert!(v <= ENVELOPE_COEFFICIENT + 1e-12);
        }
    }

    #[test]
    fn small_y_limits() {
        let s = QuadSettings::<f64>::default();
        // a > 1/2: W > 0 at y = 0, V_eff -> 0
        let v = veff_semianalytic(1e-4, 0.7, &s).unwrap();
        assert!(v.abs() < 1e-3, "{v}");
        // a < 1/2: V_eff(0) = 2 (1/a − 1/(1−a))
        let a = 0.2;
        let v = veff_numeric(1e-5, a, &s).unwrap();
        assert_relative_eq!(v, 2.0 * (1.0 / a - 1.0 / (1.0 - a)), max_relative = 1e-3);
    }

    #[test]
    fn eval_modes_agree() {
        let num = EffectivePotential::new(0.3f64, EvalMode::Numeric).unwrap();
        let semi = EffectivePotential::new(0.3, EvalMode::SemiAnalytic).unwrap();
        let env = EffectivePotential::new(0.3, EvalMode::Envelope).unwrap();
        for &y in &[0.1, 1.0, 10.0] {
            let (n, s, e) = (num.eval(y).unwrap(), semi.eval(y).unwrap(), env.eval(y).unwrap());
            assert!((n - s).abs() < 1e-8);
            assert!(n <= e);
        }
        assert!(EffectivePotential::<f64>::new(0.5, EvalMode::SemiAnalytic).is_err());
    }

    #[test]
    fn single_precision_tracks_double() {
        let q32 = QuadSettings::<f32>::default();
        let q64 = QuadSettings::<f64>::default();
        for &(y, a) in &[(0.5f32, 0.7f32), (2.0, 0.2), (1.0, 0.0)] {
            let v32 = veff_numeric(y, a, &q32).unwrap() as f64;
            let v64 = veff_numeric(y as f64, a as f64, &q64).unwrap();
            assert!((v32 - v64).abs() < 1e-4 * v64.max(1.0), "{v32} vs {v64}");
        }
    }
}
