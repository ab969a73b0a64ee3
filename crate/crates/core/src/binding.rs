//! Binding of one particle in a central attractive potential.
//!
//! The operator is `p²/(2μ) − λ V(y)` with `V ≥ 0`. Potentials are handled
//! through their scaled form `s(y) = y² V(y)`, which is bounded for every
//! inverse-square or faster tail and keeps the quadratures regular.
//!
//! Two one-sided tests are combined:
//! * Hardy: `p² ≥ 1/(4y²)` rules out binding when `8 μ λ sup s ≤ 1`;
//! * variational: a trial `u` with negative Rayleigh quotient proves binding.
//!
//! [`radial_ground_state`] is a Numerov shooting solver used as an oracle for
//! Coulomb-like potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{EffectivePotential, EvalMode, ENVELOPE_COEFFICIENT};
use crate::quad::{integrate_breaks, QuadSettings};
use crate::scalar::Scalar;

/// Asymptotic class of `V` as `y → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    /// `y² V` tends to a positive constant.
    InverseSquare,
    /// `y² V → 0`.
    Faster,
    /// `y² V` unbounded (Coulomb-like).
    Slower,
}

/// A non-negative attractive potential `V(y)`.
pub trait RadialPotential<T: Scalar>: Sync {
    /// `y² V(y)`.
    fn scaled(&self, y: T) -> Result<T>;

    fn value(&self, y: T) -> Result<T> {
        Ok(self.scaled(y)? / (y * y))
    }

    fn tail(&self) -> TailClass;

    /// `sup_y y² V(y)` when known analytically.
    fn sup_scaled(&self) -> Option<T> {
        None
    }

    /// `lim_{y→0} y V(y)`, the Coulomb strength at the origin.
    fn origin_strength(&self) -> Result<T> {
        let y = T::lit(1e-9);
        Ok(self.scaled(y)? / y)
    }
}

/// `V = c / y²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSquare<T> {
    pub strength: T,
}

impl<T: Scalar> RadialPotential<T> for InverseSquare<T> {
    fn scaled(&self, _y: T) -> Result<T> {
        Ok(self.strength)
    }
    fn tail(&self) -> TailClass {
        TailClass::InverseSquare
    }
    fn sup_scaled(&self) -> Option<T> {
        Some(self.strength)
    }
    fn origin_strength(&self) -> Result<T> {
        Err(Error::DomainError("inverse-square potential is singular at the origin".into()))
    }
}

/// `V = A / y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coulomb<T> {
    pub strength: T,
}

impl<T: Scalar> RadialPotential<T> for Coulomb<T> {
    fn scaled(&self, y: T) -> Result<T> {
        Ok(self.strength * y)
    }
    fn value(&self, y: T) -> Result<T> {
        Ok(self.strength / y)
    }
    fn tail(&self) -> TailClass {
        TailClass::Slower
    }
    fn origin_strength(&self) -> Result<T> {
        Ok(self.strength)
    }
}

/// A potential given by a closure for `y² V(y)`.
pub struct ScaledFn<F, T> {
    pub scaled: F,
    pub tail: TailClass,
    pub sup: Option<T>,
}

impl<T: Scalar, F: Fn(T) -> T + Sync> RadialPotential<T> for ScaledFn<F, T> {
    fn scaled(&self, y: T) -> Result<T> {
        Ok((self.scaled)(y))
    }
    fn tail(&self) -> TailClass {
        self.tail
    }
    fn sup_scaled(&self) -> Option<T> {
        self.sup
    }
}

impl<T: Scalar> RadialPotential<T> for EffectivePotential<T> {
    fn scaled(&self, y: T) -> Result<T> {
        Ok(self.scaled_estimate(y)?.value)
    }
    fn tail(&self) -> TailClass {
        TailClass::InverseSquare
    }
    /// The envelope `y² V_eff < 3/16` holds for every `a` and every mode.
    fn sup_scaled(&self) -> Option<T> {
        Some(T::lit(ENVELOPE_COEFFICIENT))
    }
    fn origin_strength(&self) -> Result<T> {
        if self.mode == EvalMode::Envelope {
            return Err(Error::DomainError("the envelope is singular at the origin".into()));
        }
        // Only the a = 0 limit keeps a Coulomb singularity: V_eff ~ 1/y.
        if self.a == T::zero() {
            Ok(T::one())
        } else {
            Ok(T::zero())
        }
    }
}

/// Borrowed potential with an externally supplied sup, e.g. from [`numeric_sup`].
pub struct WithSup<'a, P: ?Sized, T> {
    pub inner: &'a P,
    pub sup: T,
}

impl<'a, T: Scalar, P: RadialPotential<T> + ?Sized> RadialPotential<T> for WithSup<'a, P, T> {
    fn scaled(&self, y: T) -> Result<T> {
        self.inner.scaled(y)
    }
    fn value(&self, y: T) -> Result<T> {
        self.inner.value(y)
    }
    fn tail(&self) -> TailClass {
        self.inner.tail()
    }
    fn sup_scaled(&self) -> Option<T> {
        Some(self.sup)
    }
    fn origin_strength(&self) -> Result<T> {
        self.inner.origin_strength()
    }
}

/// `−A² μ / 2`.
pub fn hydrogen_ground_energy<T: Scalar>(mu: T, strength: T) -> T {
    -strength * strength * mu / T::lit(2.0)
}

/// Where the sup of `y² V` came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupSource {
    Analytic,
    Numeric,
    /// `λ = 0`: nothing to bound.
    FreeParticle,
}

/// A verified `8 μ λ sup(y² V) ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyCertificate<T> {
    pub sup_scaled: T,
    /// `8 μ λ sup(y² V)`.
    pub product: T,
    pub source: SupSource,
}

/// The Hardy test on a given sup.
pub fn hardy_test<T: Scalar>(
    sup_scaled: T,
    mu: T,
    lambda: T,
    source: SupSource,
) -> Option<HardyCertificate<T>> {
    let product = T::lit(8.0) * mu * lambda * sup_scaled;
    (product <= T::one()).then_some(HardyCertificate { sup_scaled, product, source })
}

/// Certifies no binding when `8 μ λ sup(y² V) ≤ 1`.
///
/// Potentials without a bounded `y² V` never certify (except `λ = 0`); a
/// bounded tail without a known sup is [`Error::SupUnavailable`].
pub fn hardy_certificate<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
) -> Result<Option<HardyCertificate<T>>> {
    if lambda == T::zero() {
        return Ok(Some(HardyCertificate {
            sup_scaled: pot.sup_scaled().unwrap_or(T::zero()),
            product: T::zero(),
            source: SupSource::FreeParticle,
        }));
    }
    match (pot.sup_scaled(), pot.tail()) {
        (Some(sup), _) => Ok(hardy_test(sup, mu, lambda, SupSource::Analytic)),
        (None, TailClass::Slower) => Ok(None),
        (None, _) => Err(Error::SupUnavailable),
    }
}

/// Sup of `y² V` sampled on a logarithmic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericSup<T> {
    /// Padded upper estimate.
    pub value: T,
    pub sampled_max: T,
    pub padding: T,
    pub argmax: T,
}

/// Samples `y² V` at `points` log-spaced `y` in `[y_lo, y_hi]` and pads the
/// maximum by the largest step between neighbours plus `extra_padding`.
pub fn numeric_sup<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    y_lo: T,
    y_hi: T,
    points: usize,
    extra_padding: T,
) -> Result<NumericSup<T>> {
    if !(y_lo > T::zero() && y_hi > y_lo) || points < 2 {
        return Err(Error::DomainError("numeric sup needs 0 < y_lo < y_hi and >= 2 points".into()));
    }
    let (llo, lhi) = (y_lo.ln(), y_hi.ln());
    let mut best = T::neg_infinity();
    let mut argmax = y_lo;
    let mut prev: Option<T> = None;
    let mut step = T::zero();
    for i in 0..points {
        let y = (llo + (lhi - llo) * T::from_count(i) / T::from_count(points - 1)).exp();
        let s = pot.scaled(y)?;
        if s > best {
            best = s;
            argmax = y;
        }
        if let Some(p) = prev {
            step = step.max((s - p).abs());
        }
        prev = Some(s);
    }
    let padding = step + extra_padding;
    Ok(NumericSup { value: best + padding, sampled_max: best, padding, argmax })
}

/// Trial functions for the s-wave reduced radial function `u(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum TrialFunction<T> {
    /// `u = y e^{-k y}`.
    Exponential { k: T },
    /// `u = y^{1/2} sin(k ln(y / y0))` on `[y0, y0 e^{π/k}]`, zero elsewhere.
    LogPeriodic { k: T, ln_y0: T },
}

impl<T: Scalar> TrialFunction<T> {
    pub fn family_name(&self) -> &'static str {
        match self {
            TrialFunction::Exponential { .. } => "exponential",
            TrialFunction::LogPeriodic { .. } => "log_periodic",
        }
    }
}

/// Rayleigh quotient `(K − λ P) / D` of a trial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quotient<T> {
    pub value: T,
    /// Numerator `K − λ P`; only its sign matters for binding.
    pub numerator: T,
    pub denominator: T,
    /// Absolute error estimate of the numerator.
    pub numerator_error: T,
}

impl<T: Scalar> Quotient<T> {
    /// Negative beyond ten times its error estimate.
    pub fn is_certified_negative(&self) -> bool {
        self.numerator < -(T::lit(10.0) * self.numerator_error)
    }
}

/// Evaluates the Rayleigh quotient of `trial` for `p²/(2μ) − λ V`.
pub fn rayleigh_quotient<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    trial: &TrialFunction<T>,
    quad: &QuadSettings<T>,
) -> Result<Quotient<T>> {
    let one = T::one();
    let two = T::lit(2.0);
    let eps = T::epsilon();
    match *trial {
        TrialFunction::Exponential { k } => {
            if !(k > T::zero()) {
                return Err(Error::DomainError("exponential trial needs k > 0".into()));
            }
            // ∫u² = 1/(4k³), ∫u'² = 1/(4k), P = ∫ e^{-2ky} y² V dy
            let denominator = one / (T::lit(4.0) * k * k * k);
            let kinetic = one / (T::lit(8.0) * mu * k);
            let y_cut = T::lit(30.0) / k;
            let breaks = [T::zero(), T::lit(0.1) / k, one / k, T::lit(5.0) / k, y_cut];
            let mut failure = None;
            let r = integrate_breaks(
                |y: T| match pot.scaled(y) {
                    Ok(s) => (-two * k * y).exp() * s,
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::zero()
                    }
                },
                &breaks,
                quad,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            let tail_scale = match pot.sup_scaled() {
                Some(sup) => sup,
                None => T::lit(10.0) * pot.scaled(y_cut)?.abs(),
            };
            let truncation = tail_scale * (-two * k * y_cut).exp() / (two * k);
            let potential = lambda * r.value;
            let numerator = kinetic - potential;
            let numerator_error =
                lambda * (r.abs_error + truncation) + T::lit(16.0) * eps * (kinetic + potential.abs());
            Ok(Quotient { value: numerator / denominator, numerator, denominator, numerator_error })
        }
        TrialFunction::LogPeriodic { k, ln_y0 } => {
            if !(k > T::zero()) {
                return Err(Error::DomainError("log-periodic trial needs k > 0".into()));
            }
            // u = y^{1/2} w(t), t = ln y: ∫u'² dy = ∫(w' + w/2)² dt, ∫V u² dy = ∫ y²V w² dt
            let width = T::PI() / k;
            let half_width = width / two;
            let kinetic = half_width * (k * k + T::lit(0.25)) / (two * mu);
            let quarter = T::lit(4.0);
            let growth = (two * width).exp_m1();
            let denominator = (two * ln_y0).exp() * growth * k * k / (quarter * (one + k * k));
            let panels = 8usize;
            let breaks: Vec<T> =
                (0..=panels).map(|i| ln_y0 + width * T::from_count(i) / T::from_count(panels)).collect();
            let mut failure = None;
            let r = integrate_breaks(
                |t: T| {
                    let w = (k * (t - ln_y0)).sin();
                    match pot.scaled(t.exp()) {
                        Ok(s) => s * w * w,
                        Err(e) => {
                            failure.get_or_insert(e);
                            T::zero()
                        }
                    }
                },
                &breaks,
                quad,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            let potential = lambda * r.value;
            let numerator = kinetic - potential;
            let numerator_error = lambda * r.abs_error + T::lit(16.0) * eps * (kinetic + potential.abs());
            Ok(Quotient { value: numerator / denominator, numerator, denominator, numerator_error })
        }
    }
}

/// Parameter grids scanned by [`variational_witness`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFamily<T> {
    pub exponential_rates: Vec<T>,
    /// Window widths `π / k` in `ln y`.
    pub log_widths: Vec<T>,
    /// Window starts `ln y0`; `None` centres the window on `y = 1`.
    pub log_starts: Vec<Option<T>>,
    pub quad: QuadSettings<T>,
}

impl<T: Scalar> Default for TrialFamily<T> {
    fn default() -> Self {
        Self {
            exponential_rates: (-64..=24).map(|j| T::lit(2f64.powf(j as f64 / 4.0))).collect(),
            log_widths: (2..=8).map(|j| T::lit(2f64.powi(j))).collect(),
            log_starts: vec![None, Some(T::lit(-2.0)), Some(T::zero()), Some(T::lit(2.0)), Some(T::lit(5.0))],
            quad: QuadSettings::default(),
        }
    }
}

/// Trial function plus its certified-negative quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness<T> {
    pub trial: TrialFunction<T>,
    pub quotient: Quotient<T>,
}

fn best_of<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    trials: impl Iterator<Item = TrialFunction<T>>,
    quad: &QuadSettings<T>,
) -> Option<Witness<T>> {
    let mut best: Option<Witness<T>> = None;
    for trial in trials {
        let Ok(quotient) = rayleigh_quotient(pot, mu, lambda, &trial, quad) else {
            continue;
        };
        if quotient.is_certified_negative() && best.as_ref().is_none_or(|b| quotient.value < b.quotient.value)
        {
            best = Some(Witness { trial, quotient });
        }
    }
    best
}

/// Scans the exponential family, then (for inverse-square tails) the
/// log-periodic family; returns the most negative certified quotient of the
/// first family that produced one.
pub fn variational_witness<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    family: &TrialFamily<T>,
) -> Option<Witness<T>> {
    if !(lambda > T::zero()) {
        return None;
    }
    let exp = family.exponential_rates.iter().map(|&k| TrialFunction::Exponential { k });
    if let Some(w) = best_of(pot, mu, lambda, exp, &family.quad) {
        return Some(w);
    }
    if pot.tail() != TailClass::InverseSquare {
        return None;
    }
    let logs = family.log_widths.iter().flat_map(|&width| {
        family.log_starts.iter().map(move |start| TrialFunction::LogPeriodic {
            k: T::PI() / width,
            ln_y0: start.unwrap_or(-width / T::lit(2.0)),
        })
    });
    best_of(pot, mu, lambda, logs, &family.quad)
}

/// Outcome of a binding decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingKind {
    CertifiedUnbound,
    CertifiedBound,
    Inconclusive,
}

/// Binding verdict with the evidence that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BindingVerdict<T> {
    pub kind: BindingKind,
    pub hardy: Option<HardyCertificate<T>>,
    pub witness: Option<Witness<T>>,
}

/// Hardy first, then the variational scan.
pub fn decide_binding<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    family: &TrialFamily<T>,
) -> Result<BindingVerdict<T>> {
    match hardy_certificate(pot, mu, lambda) {
        Ok(Some(cert)) => {
            return Ok(BindingVerdict {
                kind: BindingKind::CertifiedUnbound,
                hardy: Some(cert),
                witness: None,
            })
        }
        Ok(None) | Err(Error::SupUnavailable) => {}
        Err(e) => return Err(e),
    }
    Ok(match variational_witness(pot, mu, lambda, family) {
        Some(w) => BindingVerdict { kind: BindingKind::CertifiedBound, hardy: None, witness: Some(w) },
        None => BindingVerdict { kind: BindingKind::Inconclusive, hardy: None, witness: None },
    })
}

/// Bracket on the critical coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingInterval<T> {
    pub lower: T,
    pub upper: T,
    /// False when some lower update rested on an exhausted scan rather than Hardy.
    pub lower_certified: bool,
    pub upper_witness: Witness<T>,
    pub bisections: usize,
}

impl<T: Scalar> CouplingInterval<T> {
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, lambda: T) -> bool {
        self.lower <= lambda && lambda <= self.upper
    }
}

/// Bisects between an unbound and a bound coupling until `upper − lower ≤ width`.
pub fn critical_coupling<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    bracket: (T, T),
    width: T,
    family: &TrialFamily<T>,
) -> Result<CouplingInterval<T>> {
    let (mut lo, mut hi) = bracket;
    if !(lo >= T::zero() && hi > lo && width > T::zero()) {
        return Err(Error::BracketInvalid("need 0 <= lower < upper and width > 0".into()));
    }
    match hardy_certificate(pot, mu, lo) {
        Ok(Some(_)) => {}
        _ => return Err(Error::BracketInvalid(format!("lower end {lo} is not Hardy-certified"))),
    }
    let mut witness = variational_witness(pot, mu, hi, family)
        .ok_or_else(|| Error::BracketInvalid(format!("no binding witness at upper end {hi}")))?;
    let mut lower_certified = true;
    let mut bisections = 0;
    while hi - lo > width {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        bisections += 1;
        if matches!(hardy_certificate(pot, mu, mid), Ok(Some(_))) {
            lo = mid;
        } else if let Some(w) = variational_witness(pot, mu, mid, family) {
            hi = mid;
            witness = w;
        } else {
            lo = mid;
            lower_certified = false;
        }
    }
    Ok(CouplingInterval { lower: lo, upper: hi, lower_certified, upper_witness: witness, bisections })
}

/// Uniform grid `[0, y_max]` for [`radial_ground_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    pub y_max: T,
    pub steps: usize,
}

impl<T: Scalar> RadialGrid<T> {
    pub fn new(y_max: T, steps: usize) -> Self {
        Self { y_max, steps }
    }
}

/// Richardson-extrapolated ground-state energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundState<T> {
    pub energy: T,
    pub abs_error: T,
    pub coarse: T,
    pub fine: T,
}

struct Numerov<T> {
    h: T,
    /// `λ V(y_n)` for `n = 1..=steps`.
    lv: Vec<T>,
    /// `λ lim y V` at the origin.
    origin: T,
    mu: T,
}

impl<T: Scalar> Numerov<T> {
    fn build<P: RadialPotential<T> + ?Sized>(
        pot: &P,
        mu: T,
        lambda: T,
        y_max: T,
        steps: usize,
    ) -> Result<Self> {
        let h = y_max / T::from_count(steps);
        let lv =
            (1..=steps).map(|n| Ok(lambda * pot.value(h * T::from_count(n))?)).collect::<Result<Vec<T>>>()?;
        let origin = if lambda == T::zero() { T::zero() } else { lambda * pot.origin_strength()? };
        Ok(Self { h, lv, origin, mu })
    }

    /// Sign changes of the regular solution at energy `e` on `(0, y_max]`.
    fn nodes(&self, e: T) -> usize {
        let h2 = self.h * self.h;
        let twelfth = T::lit(1.0 / 12.0);
        let two = T::lit(2.0);
        let big = T::lit(1e100);
        let g = |n: usize| -two * self.mu * (e + self.lv[n - 1]);
        // w_n = (1 − h² g_n / 12) u_n; at the origin g u → −2μ λ A u'(0) with u'(0) = 1
        let mut w_prev = h2 * twelfth * two * self.mu * self.origin;
        let mut u = self.h;
        let mut w = (T::one() - h2 * twelfth * g(1)) * u;
        let mut count = 0;
        for n in 1..self.lv.len() {
            let w_next = two * w - w_prev + h2 * g(n) * u;
            let u_next = w_next / (T::one() - h2 * twelfth * g(n + 1));
            if u_next == T::zero() || (u_next < T::zero()) != (u < T::zero()) {
                count += 1;
            }
            w_prev = w;
            w = w_next;
            u = u_next;
            if w.abs() > big {
                let s = big.recip();
                w = w * s;
                w_prev = w_prev * s;
                u = u * s;
            }
        }
        count
    }

    fn ground_energy(&self) -> Result<T> {
        if self.nodes(T::zero()) == 0 {
            return Err(Error::NoNegativeEigenvalue);
        }
        let mut lo = -T::one();
        let mut guard = 0;
        while self.nodes(lo) > 0 {
            lo = lo * T::lit(4.0);
            guard += 1;
            if guard > 200 || !lo.is_finite() {
                return Err(Error::GridTooCoarse("energy unbounded below on this grid".into()));
            }
        }
        let mut hi = T::zero();
        for _ in 0..200 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.nodes(mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo + (hi - lo) / T::lit(2.0))
    }
}

/// Lowest eigenvalue of `−u''/(2μ) − λ V u`, `u(0) = u(y_max) = 0`, by Numerov
/// shooting on `steps` and `2 steps` panels with Richardson extrapolation.
pub fn radial_ground_state<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    grid: &RadialGrid<T>,
) -> Result<GroundState<T>> {
    if grid.steps < 32 || !(grid.y_max > T::zero()) {
        return Err(Error::GridTooCoarse(format!("need >= 32 steps, got {}", grid.steps)));
    }
    let coarse = Numerov::build(pot, mu, lambda, grid.y_max, grid.steps)?.ground_energy();
    let fine = Numerov::build(pot, mu, lambda, grid.y_max, 2 * grid.steps)?.ground_energy();
    let (coarse, fine) = match (coarse, fine) {
        (Ok(c), Ok(f)) => (c, f),
        (_, Err(Error::NoNegativeEigenvalue)) => return Err(Error::NoNegativeEigenvalue),
        (Err(Error::NoNegativeEigenvalue), Ok(_)) => {
            return Err(Error::GridTooCoarse("coarse grid misses the bound state".into()))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let delta = fine - coarse;
    if delta.abs() > T::lit(0.05) * fine.abs() {
        return Err(Error::GridTooCoarse(format!(
            "grid refinement changed the energy by {}",
            delta.to_f64_lossy()
        )));
    }
    let energy = fine + delta / T::lit(15.0);
    Ok(GroundState {
        energy,
        abs_error: delta.abs() / T::lit(15.0) + T::lit(64.0) * T::epsilon() * energy.abs(),
        coarse,
        fine,
    })
}

/// The default grid for a potential whose bound state decays like `e^{-κ y}`.
pub fn grid_for_decay<T: Scalar>(kappa: T, steps: usize) -> RadialGrid<T> {
    RadialGrid::new(T::lit(40.0) / kappa, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn family() -> TrialFamily<f64> {
        TrialFamily::default()
    }

    #[test]
    fn hydrogen_formula() {
        assert_eq!(hydrogen_ground_energy(2.0, 1.0), -1.0);
        assert_eq!(hydrogen_ground_energy(2.0, 0.0), 0.0);
        assert_eq!(hydrogen_ground_energy(0.5, 2.0), -1.0);
    }

    #[test]
    fn hardy_threshold_arithmetic() {
        let v = InverseSquare { strength: 1.0 };
        let c = hardy_certificate(&v, 0.5, 0.24).unwrap().unwrap();
        assert_relative_eq!(c.product, 0.96);
        assert!(hardy_certificate(&v, 0.5, 0.26).unwrap().is_none());
        // exact equality fires
        assert!(hardy_certificate(&v, 0.5, 0.25).unwrap().is_some());
    }

    #[test]
    fn hardy_on_envelope() {
        let env = EffectivePotential::new(0.7, EvalMode::Envelope).unwrap();
        // 2 μ λ ≤ 4/3
        assert!(hardy_certificate(&env, 0.5, 4.0 / 3.0).unwrap().is_some());
        assert!(hardy_certificate(&env, 0.5, 4.0 / 3.0 + 1e-12).unwrap().is_none());
        assert!(hardy_certificate(&env, 2.0 / 3.0, 1.0).unwrap().is_some());
    }

    #[test]
    fn hardy_without_sup() {
        let c = Coulomb { strength: 1.0 };
        assert!(hardy_certificate(&c, 1.0, 0.1).unwrap().is_none());
        assert!(hardy_certificate(&c, 1.0, 0.0).unwrap().is_some());
        let f = ScaledFn { scaled: |y: f64| y * y * (-y).exp(), tail: TailClass::Faster, sup: None };
        assert_eq!(hardy_certificate(&f, 1.0, 1.0), Err(Error::SupUnavailable));
        let sup = numeric_sup(&f, 1e-3, 1e3, 2000, 1e-6).unwrap();
        let expected = 4.0 * (-2.0f64).exp();
        assert!(sup.value >= expected && sup.value < expected + 1e-2);
    }

    #[test]
    fn exponential_quotient_for_coulomb() {
        // u = y e^{-ky}: Q = k²/(2μ) − λ A k
        let c = Coulomb { strength: 1.0 };
        let q =
            rayleigh_quotient(&c, 0.5, 1.0, &TrialFunction::Exponential { k: 0.5 }, &QuadSettings::default())
                .unwrap();
        assert_relative_eq!(q.value, -0.25, max_relative = 1e-10);
        let w = variational_witness(&c, 0.5, 1.0, &family()).unwrap();
        assert!(w.quotient.value <= -0.24);
        assert_eq!(w.trial.family_name(), "exponential");
    }

    #[test]
    fn log_periodic_quotient_for_inverse_square() {
        // numerator = (T/2)((π/T)² + 1/4 − 2μλc)/(2μ)
        let v = InverseSquare { strength: 1.0 };
        let width: f64 = 32.0;
        let k = std::f64::consts::PI / width;
        let t = TrialFunction::LogPeriodic { k, ln_y0: -3.0 };
        let q = rayleigh_quotient(&v, 0.5, 0.26, &t, &QuadSettings::default()).unwrap();
        assert_relative_eq!(q.numerator, 16.0 * (k * k + 0.25 - 0.26), max_relative = 1e-10);
        // D = y0² (e^{2T} − 1) k² / (4 (1 + k²)), cross-checked by quadrature
        let d = integrate_breaks(
            |tt: f64| (2.0 * tt).exp() * (k * (tt + 3.0)).sin().powi(2),
            &[-3.0, 5.0, 13.0, 21.0, 29.0],
            &QuadSettings::default().with_rel_tol(1e-12),
        )
        .unwrap()
        .value;
        assert_relative_eq!(q.denominator, d, max_relative = 1e-9);
    }

    #[test]
    fn inverse_square_binding_only_above_critical() {
        let v = InverseSquare { strength: 1.0 };
        let w = variational_witness(&v, 0.5, 0.26, &family()).unwrap();
        assert_eq!(w.trial.family_name(), "log_periodic");
        assert!(variational_witness(&v, 0.5, 0.24, &family()).is_none());
        assert!(variational_witness(&v, 0.5, 0.0, &family()).is_none());
    }

    #[test]
    fn witness_survives_larger_coupling() {
        let v = InverseSquare { strength: 1.0 };
        let w = variational_witness(&v, 0.5, 0.26, &family()).unwrap();
        for &lam in &[0.27, 0.3, 1.0] {
            let q = rayleigh_quotient(&v, 0.5, lam, &w.trial, &QuadSettings::default()).unwrap();
            assert!(q.is_certified_negative() && q.value < w.quotient.value);
        }
    }

    #[test]
    fn critical_coupling_inverse_square() {
        let v = InverseSquare { strength: 1.0 };
        let iv = critical_coupling(&v, 0.5, (0.24, 0.26), 1e-3, &family()).unwrap();
        assert!(iv.contains(0.25));
        assert!(iv.width() <= 1e-3);
        assert!(iv.lower_certified);
        // c/y² with c = 2: λ_crit = 1/(8 μ c)
        let v2 = InverseSquare { strength: 2.0 };
        let iv = critical_coupling(&v2, 1.0, (0.05, 0.1), 1e-3, &family()).unwrap();
        assert!(iv.contains(1.0 / 16.0));
    }

    #[test]
    fn critical_coupling_coulomb_goes_to_zero() {
        let c = Coulomb { strength: 1.0 };
        let iv = critical_coupling(&c, 0.5, (0.0, 1.0), 1e-3, &family()).unwrap();
        assert_eq!(iv.lower, 0.0);
        assert!(iv.upper <= 1e-3);
    }

    #[test]
    fn bad_brackets() {
        let v = InverseSquare { strength: 1.0 };
        assert!(matches!(
            critical_coupling(&v, 0.5, (0.26, 0.3), 1e-3, &family()),
            Err(Error::BracketInvalid(_))
        ));
        assert!(matches!(
            critical_coupling(&v, 0.5, (0.1, 0.24), 1e-3, &family()),
            Err(Error::BracketInvalid(_))
        ));
    }

    #[test]
    fn decide_binding_paths() {
        let v = InverseSquare { strength: 1.0 };
        assert_eq!(decide_binding(&v, 0.5, 0.2, &family()).unwrap().kind, BindingKind::CertifiedUnbound);
        assert_eq!(decide_binding(&v, 0.5, 0.3, &family()).unwrap().kind, BindingKind::CertifiedBound);
        let f = ScaledFn { scaled: |y: f64| y * y * (-y * y).exp(), tail: TailClass::Faster, sup: None };
        // shallow Gaussian well: three-dimensional, no binding for tiny λ and no Hardy sup
        assert_eq!(decide_binding(&f, 1.0, 1e-3, &family()).unwrap().kind, BindingKind::Inconclusive);
    }

    #[test]
    fn numerov_hydrogen() {
        let c = Coulomb { strength: 1.0 };
        let gs = radial_ground_state(&c, 2.0, 1.0, &grid_for_decay(2.0, 4000)).unwrap();
        assert!((gs.energy + 1.0f64).abs() < 1e-6, "{gs:?}");
        for &(a, mu) in &[(1.0f64, 0.5f64), (2.0, 1.0)] {
            let gs = radial_ground_state(&Coulomb { strength: a }, mu, 1.0, &grid_for_decay(a * mu, 4000))
                .unwrap();
            assert!((gs.energy - hydrogen_ground_energy(mu, a)).abs() < 1e-6, "{gs:?}");
        }
    }

    #[test]
    fn numerov_free_particle() {
        let c = Coulomb { strength: 1.0 };
        assert_eq!(
            radial_ground_state(&c, 1.0, 0.0, &RadialGrid::new(50.0, 1000)),
            Err(Error::NoNegativeEigenvalue)
        );
        assert!(matches!(
            radial_ground_state(&c, 1.0, 1.0, &RadialGrid::new(50.0, 8)),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
