//! The instability criterion and the end-to-end classification pipeline.
//!
//! In internal units (`mu_x = 2`) a canonical system with `mu_y < 3/2` can
//! only be stable if a particle of mass `mu_y` binds in
//! `−lambda_eff V_eff`, `lambda_eff = 1 + (sqrt(3/(2 mu_y)) − 1)^-1`.
//! With `y² V_eff < 3/16` Hardy rules this out whenever
//! `2 mu_y lambda_eff < 4/3`, i.e. `mu_y < 2 (11 − 2 sqrt 10) / 27`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binding::{hardy_certificate, hardy_test, numeric_sup, HardyCertificate, NumericSup, SupSource};
use crate::error::{Error, Result};
use crate::frames::{
    jacobi_reduce, normalize_system, CanonicalSystem, JacobiFrame, Mass, ParticleSystem, Warning,
};
use crate::potential::{EffectivePotential, EvalMode, ENVELOPE_COEFFICIENT};
use crate::quad::QuadSettings;
use crate::scalar::Scalar;

/// Largest internal `mu_y` for which the ratio bound holds.
pub const MU_Y_HYPOTHESIS_LIMIT: f64 = 1.5;

/// Right-hand side of `2 mu_y lambda_eff < 4/3`.
pub const SCALED_BOUND: f64 = 4.0 / 3.0;

/// Thirring's infinite-nucleus constant: unstable if `m3/m2 < 1/1.57`.
pub const THIRRING_CONSTANT: f64 = 1.57;

/// One-sided verdict; there is deliberately no "stable".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ProvablyUnstable,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ProvablyUnstable => "provably_unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a report is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InconclusiveReason {
    /// `mu_y >= 3/2`: the ratio bound does not apply.
    TheoremInapplicable,
    /// `2 mu_y lambda_eff >= 4/3`.
    BoundNotMet,
}

/// `(sqrt(3/(2 mu_y)) − 1)^-1`, the bound on the ratio of the two wave-function components.
pub fn lemma1_ratio_bound<T: Scalar>(mu_y: T) -> Result<T> {
    if !(mu_y > T::zero()) {
        return Err(Error::DomainError(format!("mu_y must be positive (got {mu_y})")));
    }
    if mu_y >= T::lit(MU_Y_HYPOTHESIS_LIMIT) {
        return Err(Error::DomainError(format!("mu_y = {mu_y} is not below 3/2")));
    }
    Ok(T::one() / ((T::lit(1.5) / mu_y).sqrt() - T::one()))
}

/// `lambda_eff = 1 + lemma1_ratio_bound(mu_y)`.
pub fn coupling_amplification<T: Scalar>(mu_y: T) -> Result<T> {
    Ok(T::one() + lemma1_ratio_bound(mu_y)?)
}

/// Result of the internal-units test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledTest<T> {
    pub verdict: Verdict,
    pub lambda_eff: Option<T>,
    /// `2 mu_y lambda_eff`.
    pub product: Option<T>,
    /// `4/3 − 2 mu_y lambda_eff`; positive when the test fires.
    pub margin: Option<T>,
    pub reason: Option<InconclusiveReason>,
}

/// `ProvablyUnstable` iff `mu_y < 3/2` and `2 mu_y lambda_eff < 4/3`.
pub fn instability_test_scaled<T: Scalar>(mu_y: T) -> ScaledTest<T> {
    let Ok(lambda_eff) = coupling_amplification(mu_y) else {
        return ScaledTest {
            verdict: Verdict::Inconclusive,
            lambda_eff: None,
            product: None,
            margin: None,
            reason: Some(InconclusiveReason::TheoremInapplicable),
        };
    };
    let product = T::lit(2.0) * mu_y * lambda_eff;
    let margin = T::lit(SCALED_BOUND) - product;
    let fires = margin > T::zero();
    ScaledTest {
        verdict: if fires { Verdict::ProvablyUnstable } else { Verdict::Inconclusive },
        lambda_eff: Some(lambda_eff),
        product: Some(product),
        margin: Some(margin),
        reason: (!fires).then_some(InconclusiveReason::BoundNotMet),
    }
}

/// `2 (11 − 2 sqrt 10) / 27`.
pub fn critical_mu_y<T: Scalar>() -> T {
    T::lit(2.0) * physical_ratio_threshold::<T>()
}

/// `(11 − 2 sqrt 10) / 27`, the threshold on `mu_y / mu_x`.
pub fn physical_ratio_threshold<T: Scalar>() -> T {
    (T::lit(11.0) - T::lit(2.0) * T::lit(10.0).sqrt()) / T::lit(27.0)
}

/// Root of `2 mu_y lambda_eff(mu_y) = 4/3` by bisection on `(lo, hi) ⊂ (0, 3/2)`.
pub fn critical_mu_y_bisection<T: Scalar>(lo: T, hi: T, tol: T) -> Result<T> {
    let f = |m: T| coupling_amplification(m).map(|l| T::lit(2.0) * m * l - T::lit(SCALED_BOUND));
    let (mut lo, mut hi) = (lo, hi);
    if !(f(lo)? < T::zero() && f(hi)? > T::zero()) {
        return Err(Error::BracketInvalid("criterion root is not bracketed".into()));
    }
    while hi - lo > tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

/// Thirring's infinite-nucleus test: unstable iff `m3/m2 < 1/1.57`.
pub fn thirring_baseline<T: Scalar>(m3_over_m2: T) -> Result<Verdict> {
    if !(m3_over_m2 > T::zero()) {
        return Err(Error::DomainError("mass ratio must be positive".into()));
    }
    Ok(if m3_over_m2 < T::one() / T::lit(THIRRING_CONSTANT) {
        Verdict::ProvablyUnstable
    } else {
        Verdict::Inconclusive
    })
}

/// Comparison against the infinite-nucleus baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThirringComparison<T> {
    /// `m3 / m2` in canonical order.
    pub m3_over_m2: T,
    /// `1 / 1.57`.
    pub threshold: T,
    pub verdict: Verdict,
    /// The baseline assumes `m1 = ∞`; true only when that holds.
    pub applies: bool,
}

fn thirring_comparison<T: Scalar>(
    cs: &CanonicalSystem<T>,
    frame: &JacobiFrame<T>,
) -> Option<ThirringComparison<T>> {
    let ratio = match (cs.masses[1], cs.masses[2]) {
        (Mass::Finite(m2), Mass::Finite(m3)) => m3 / m2,
        _ => return None,
    };
    Some(ThirringComparison {
        m3_over_m2: ratio,
        threshold: T::one() / T::lit(THIRRING_CONSTANT),
        verdict: thirring_baseline(ratio).ok()?,
        applies: frame.a == T::zero(),
    })
}

/// Independent re-derivation with the numeric `V_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeepCheck<T> {
    pub sampled: NumericSup<T>,
    /// `y² V_eff` at the largest sampled `y`.
    pub tail_value: T,
    /// Sup used for Hardy: the padded sample maximum, or the `3/16` bound
    /// covering `y` beyond the sampled window, whichever is larger.
    pub sup_used: T,
    pub hardy: Option<HardyCertificate<T>>,
    pub verdict: Verdict,
    /// Whether the numeric path reproduces the envelope verdict.
    pub agrees: bool,
}

/// Settings for [`deep_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeepSettings<T> {
    pub y_lo: T,
    pub y_hi: T,
    pub points: usize,
    pub quad: QuadSettings<T>,
}

impl<T: Scalar> Default for DeepSettings<T> {
    fn default() -> Self {
        Self { y_lo: T::lit(1e-3), y_hi: T::lit(1e3), points: 241, quad: QuadSettings::default() }
    }
}

/// Full classification of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub verdict: Verdict,
    pub reason: Option<InconclusiveReason>,
    /// Names the inequality chain that produced `ProvablyUnstable`.
    pub provenance: Option<String>,
    pub canonical: CanonicalSystem<T>,
    pub frame: JacobiFrame<T>,
    /// `mu_y / mu_x`.
    pub mass_ratio: T,
    /// `(11 − 2 sqrt 10) / 27`.
    pub ratio_threshold: T,
    /// `ratio_threshold − mass_ratio`.
    pub ratio_margin: T,
    /// Internal `mu_y` threshold `2 (11 − 2 sqrt 10) / 27`.
    pub critical_mu_y: T,
    pub scaled: ScaledTest<T>,
    /// Hardy on the envelope for mass `mu_y` and coupling `lambda_eff`.
    pub hardy: Option<HardyCertificate<T>>,
    pub thirring: Option<ThirringComparison<T>>,
    pub warnings: Vec<Warning>,
    pub deep: Option<DeepCheck<T>>,
}

/// Normalize, reduce to the Jacobi frame and apply the scaled test.
pub fn instability_test<T: Scalar>(sys: &ParticleSystem<T>) -> Result<StabilityReport<T>> {
    let canonical = normalize_system(sys)?;
    let frame = jacobi_reduce(&canonical);
    Ok(report_from_frame(canonical, frame))
}

fn report_from_frame<T: Scalar>(canonical: CanonicalSystem<T>, frame: JacobiFrame<T>) -> StabilityReport<T> {
    let scaled = instability_test_scaled(frame.mu_y);
    let hardy = scaled.lambda_eff.and_then(|lambda| {
        let env = EffectivePotential::new(frame.a, EvalMode::Envelope).ok()?;
        hardy_certificate(&env, frame.mu_y, lambda).ok().flatten()
    });
    let fires = scaled.verdict == Verdict::ProvablyUnstable && hardy.is_some();
    let mass_ratio = frame.mass_ratio();
    let ratio_threshold = physical_ratio_threshold::<T>();
    StabilityReport {
        verdict: if fires { Verdict::ProvablyUnstable } else { Verdict::Inconclusive },
        reason: if fires { None } else { scaled.reason.or(Some(InconclusiveReason::BoundNotMet)) },
        provenance: fires.then(|| "ratio bound + envelope 3/16 + Hardy".to_string()),
        thirring: thirring_comparison(&canonical, &frame),
        warnings: canonical.warnings.clone(),
        canonical,
        frame,
        mass_ratio,
        ratio_threshold,
        ratio_margin: ratio_threshold - mass_ratio,
        critical_mu_y: critical_mu_y(),
        scaled,
        hardy,
        deep: None,
    }
}

/// Repeats the Hardy step with a numeric sup of `y² V_eff` and stores it in `report.deep`.
pub fn deep_check<T: Scalar>(report: &mut StabilityReport<T>, settings: &DeepSettings<T>) -> Result<()> {
    let frame = report.frame;
    let pot = EffectivePotential::new(frame.a, EvalMode::Numeric)?.with_quad(settings.quad);
    let sampled = numeric_sup(&pot, settings.y_lo, settings.y_hi, settings.points, T::lit(1e-6))?;
    let tail_value = pot.scaled_estimate(settings.y_hi)?.value;
    let sup_used = sampled.value.max(T::lit(ENVELOPE_COEFFICIENT));
    let hardy = report
        .scaled
        .lambda_eff
        .and_then(|lambda| hardy_test(sup_used, frame.mu_y, lambda, SupSource::Numeric));
    let verdict = if report.scaled.verdict == Verdict::ProvablyUnstable && hardy.is_some() {
        Verdict::ProvablyUnstable
    } else {
        Verdict::Inconclusive
    };
    report.deep =
        Some(DeepCheck { sampled, tail_value, sup_used, hardy, verdict, agrees: verdict == report.verdict });
    Ok(())
}

/// Coordinates for [`stability_region_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    /// `m1 = 1`; `m2` and `m3` log-spaced over `[1e-2, 1e2]`.
    Ratios,
    /// Inverse masses proportional to barycentric coordinates of the simplex.
    Barycentric,
    /// `m1 = ∞`; `m2` over `[0.1, 10]`, `m3` over `[1e-2, 1e2]`, log-spaced.
    InfiniteNucleus,
}

impl GridScheme {
    pub fn name(self) -> &'static str {
        match self {
            GridScheme::Ratios => "ratios",
            GridScheme::Barycentric => "barycentric",
            GridScheme::InfiniteNucleus => "infinite-nucleus",
        }
    }
}

impl std::str::FromStr for GridScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratios" => Ok(GridScheme::Ratios),
            "barycentric" => Ok(GridScheme::Barycentric),
            "infinite-nucleus" | "infinite_nucleus" => Ok(GridScheme::InfiniteNucleus),
            _ => Err(Error::DomainError(format!("unknown grid scheme {s:?}"))),
        }
    }
}

/// An `n × n` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub scheme: GridScheme,
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionRow<T> {
    pub i: usize,
    pub j: usize,
    /// Input masses (`Infinite` where fixed by the scheme).
    pub masses: [Mass<T>; 3],
    pub a: T,
    pub mass_ratio: T,
    pub verdict: Verdict,
    /// Present only where the infinite-nucleus baseline applies (`a = 0`).
    pub thirring: Option<Verdict>,
    /// `ratio_threshold − mass_ratio`.
    pub margin: T,
    pub equal_threshold: bool,
}

fn log_node(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n == 1 {
        return (lo * hi).sqrt();
    }
    if i == 0 {
        return lo;
    }
    if i == n - 1 {
        return hi;
    }
    (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
}

/// Masses at grid node `(i, j)`.
pub fn grid_masses<T: Scalar>(spec: &GridSpec, i: usize, j: usize) -> [Mass<T>; 3] {
    let n = spec.n;
    match spec.scheme {
        GridScheme::Ratios => [
            Mass::Finite(T::one()),
            Mass::Finite(T::lit(log_node(1e-2, 1e2, i, n))),
            Mass::Finite(T::lit(log_node(1e-2, 1e2, j, n))),
        ],
        GridScheme::InfiniteNucleus => [
            Mass::Infinite,
            Mass::Finite(T::lit(log_node(0.1, 10.0, i, n))),
            Mass::Finite(T::lit(log_node(1e-2, 1e2, j, n))),
        ],
        GridScheme::Barycentric => {
            // cell midpoints of the unit square mapped onto the open simplex
            let u = (i as f64 + 0.5) / n as f64;
            let v = (j as f64 + 0.5) / n as f64;
            let b = [1.0 - u, u * (1.0 - v), u * v];
            b.map(|bk| Mass::Finite(T::lit(1.0 / bk)))
        }
    }
}

/// Classifies one set of masses with charges `(+, -, -)`.
pub fn region_row<T: Scalar>(i: usize, j: usize, masses: [Mass<T>; 3]) -> Result<RegionRow<T>> {
    let sys = ParticleSystem::new(
        masses,
        [crate::frames::Charge::Plus, crate::frames::Charge::Minus, crate::frames::Charge::Minus],
    )?;
    let report = instability_test(&sys)?;
    Ok(RegionRow {
        i,
        j,
        masses,
        a: report.frame.a,
        mass_ratio: report.mass_ratio,
        verdict: report.verdict,
        thirring: report.thirring.filter(|t| t.applies).map(|t| t.verdict),
        margin: report.ratio_margin,
        equal_threshold: report.warnings.contains(&Warning::EqualThreshold),
    })
}

/// Row-major `n × n` sweep; rows are ordered by `(i, j)` whatever the scheduling.
pub fn stability_region_sweep<T: Scalar>(spec: &GridSpec) -> Result<Vec<RegionRow<T>>> {
    if spec.n == 0 {
        return Err(Error::DomainError("grid size must be at least 1".into()));
    }
    let n = spec.n;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            region_row(i, j, grid_masses(spec, i, j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ratio_bound_values() {
        assert_relative_eq!(lemma1_ratio_bound(2.0 / 3.0).unwrap(), 2.0, max_relative = 1e-14);
        let golden = 1.0 / (5f64.sqrt() - 1.0);
        assert_relative_eq!(lemma1_ratio_bound(0.3).unwrap(), golden, max_relative = 1e-14);
        assert_relative_eq!(golden, 0.809017, epsilon = 1e-6);
        assert!(lemma1_ratio_bound(1.5).is_err());
        assert!(lemma1_ratio_bound(0.0).is_err());
        assert!(lemma1_ratio_bound(1.4999).unwrap() > 1e3);
        let mut prev = 0.0;
        for k in 1..150 {
            let v = lemma1_ratio_bound(k as f64 * 0.01).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn amplification_values() {
        assert_relative_eq!(coupling_amplification(2.0 / 3.0).unwrap(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(coupling_amplification(0.3).unwrap(), 1.809017, epsilon = 1e-6);
        assert_relative_eq!(coupling_amplification(0.35).unwrap(), 1.934408, epsilon = 1e-5);
    }

    #[test]
    fn scaled_test_examples() {
        let t = instability_test_scaled(0.3);
        assert_eq!(t.verdict, Verdict::ProvablyUnstable);
        assert_relative_eq!(t.product.unwrap(), 1.08541, epsilon = 1e-5);
        let t = instability_test_scaled(0.35);
        assert_eq!(t.verdict, Verdict::Inconclusive);
        assert_eq!(t.reason, Some(InconclusiveReason::BoundNotMet));
        assert_relative_eq!(t.product.unwrap(), 1.354086, epsilon = 1e-5);
        let t = instability_test_scaled(2.0);
        assert_eq!(t.reason, Some(InconclusiveReason::TheoremInapplicable));
        let c: f64 = critical_mu_y();
        assert_eq!(instability_test_scaled(c * (1.0 - 1e-12)).verdict, Verdict::ProvablyUnstable);
        assert_eq!(instability_test_scaled(c * (1.0 + 1e-12)).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn critical_values() {
        let c: f64 = critical_mu_y();
        assert_relative_eq!(c, 0.346329236, epsilon = 1e-9);
        let root = critical_mu_y_bisection(0.01, 1.4, 1e-15).unwrap();
        assert!((root - c).abs() < 1e-9);
        assert_relative_eq!(physical_ratio_threshold::<f64>(), 0.173165, epsilon = 1e-6);
        assert_relative_eq!(critical_mu_y::<f32>(), 0.346_329_24_f32, epsilon = 1e-6);
    }

    #[test]
    fn thirring_examples() {
        assert_eq!(thirring_baseline(0.5).unwrap(), Verdict::ProvablyUnstable);
        assert_eq!(thirring_baseline(0.7).unwrap(), Verdict::Inconclusive);
        assert_eq!(thirring_baseline(1.0 / 206.768283).unwrap(), Verdict::ProvablyUnstable);
        assert!(thirring_baseline(0.0).is_err());
    }

    #[test]
    fn pipeline_examples() {
        let pmue = ParticleSystem::from_masses(1836.15267343, 206.768283, 1.0).unwrap();
        let r = instability_test(&pmue).unwrap();
        assert_eq!(r.verdict, Verdict::ProvablyUnstable);
        assert_relative_eq!(r.mass_ratio, 0.005379, epsilon = 1e-6);
        assert!(r.hardy.is_some());
        let hminus = ParticleSystem::from_masses(1836.15267343, 1.0, 1.0).unwrap();
        let r = instability_test(&hminus).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.warnings.contains(&Warning::EqualThreshold));
        let inf = ParticleSystem::new(
            [Mass::Infinite, Mass::Finite(1.0), Mass::Finite(0.2)],
            [crate::frames::Charge::Plus, crate::frames::Charge::Minus, crate::frames::Charge::Minus],
        )
        .unwrap();
        let r = instability_test(&inf).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let t = r.thirring.unwrap();
        assert!(t.applies);
        assert_eq!(t.verdict, Verdict::ProvablyUnstable);
    }

    #[test]
    fn deep_agrees_with_envelope() {
        let pmue = ParticleSystem::from_masses(1836.15267343, 206.768283, 1.0).unwrap();
        let mut r = instability_test(&pmue).unwrap();
        let s = DeepSettings { points: 41, ..DeepSettings::default() };
        deep_check(&mut r, &s).unwrap();
        let d = r.deep.unwrap();
        assert!(d.agrees);
        assert!(d.sampled.sampled_max <= ENVELOPE_COEFFICIENT + 1e-6);
        assert!(d.tail_value > 0.18);
    }

    #[test]
    fn sweep_examples() {
        let spec = GridSpec { n: 3, scheme: GridScheme::InfiniteNucleus };
        let rows: Vec<RegionRow<f64>> = stability_region_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        let row = region_row(0, 0, [Mass::Infinite, Mass::Finite(1.0), Mass::Finite(0.1)]).unwrap();
        assert_eq!(row.verdict, Verdict::ProvablyUnstable);
        assert_eq!(row.thirring, Some(Verdict::ProvablyUnstable));
        assert_relative_eq!(row.mass_ratio, 0.1, max_relative = 1e-14);
        let sym = region_row(0, 0, [Mass::Finite(1.0), Mass::Finite(3.0), Mass::Finite(3.0)]).unwrap();
        assert_eq!(sym.verdict, Verdict::Inconclusive);
        assert!(sym.equal_threshold);
        for scheme in [GridScheme::Ratios, GridScheme::Barycentric] {
            let rows: Vec<RegionRow<f64>> = stability_region_sweep(&GridSpec { n: 4, scheme }).unwrap();
            assert_eq!(rows.len(), 16);
            assert!(rows.iter().all(|r| r.thirring.is_none()));
        }
        assert!(stability_region_sweep::<f64>(&GridSpec { n: 0, scheme: GridScheme::Ratios }).is_err());
    }
}
