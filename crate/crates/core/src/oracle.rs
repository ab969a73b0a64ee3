//! Brute-force cross-checks: Monte-Carlo `V_eff` and a dense-grid eigensolver.
//!
//! Neither feeds the verdict path; they exist to test it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binding::RadialPotential;
use crate::error::{Error, Result};
use crate::potential::{w_minus, InteractionPoint};
use crate::scalar::Scalar;

/// Samples per random stream.
pub const MC_BLOCK: usize = 4096;

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean − value| ≤ k σ`.
    pub fn brackets(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments { n: 0.0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments { n, mean: a.mean + d * b.n / n, m2: a.m2 + b.m2 + d * d * a.n * b.n / n }
    }
}

fn pairwise(mut v: Vec<Moments>) -> Moments {
    while v.len() > 1 {
        v = v.chunks(2).map(|c| if c.len() == 2 { Moments::merge(c[0], c[1]) } else { c[0] }).collect();
    }
    v.pop().unwrap_or(Moments::EMPTY)
}

/// Mean of `f(x, c)` with `x ~ 32 x² e^{-4x}` (the pair ground-state density)
/// and `c` uniform on `[-1, 1]`.
///
/// Sample block `b` is drawn from ChaCha8 stream `b` of `seed`, so results do
/// not depend on thread count. `f` returning `None` rejects the draw.
pub fn mc_expectation<F>(f: F, n: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> Option<f64> + Sync,
{
    if n < 2 {
        return Err(Error::DomainError("Monte-Carlo estimate needs at least 2 samples".into()));
    }
    let radial = Gamma::new(3.0, 0.25).expect("valid gamma parameters");
    let angle = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let blocks = n.div_ceil(MC_BLOCK);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BLOCK.min(n - b * MC_BLOCK);
            let mut m = Moments::EMPTY;
            let mut taken = 0;
            while taken < count {
                let x: f64 = radial.sample(&mut rng);
                let c: f64 = angle.sample(&mut rng);
                if let Some(v) = f(x, c) {
                    m.push(v);
                    taken += 1;
                }
            }
            m
        })
        .collect();
    let m = pairwise(parts);
    let variance = m.m2 / (m.n - 1.0);
    Ok(McEstimate { mean: m.mean, std_error: (variance / m.n).sqrt(), samples: n, seed })
}

/// Monte-Carlo estimate of `V_eff(y)` for mass parameter `a`.
pub fn mc_veff(y: f64, a: f64, n: usize, seed: u64) -> Result<McEstimate> {
    if n < 1000 {
        return Err(Error::DomainError(format!("mc_veff needs n >= 1000 (got {n})")));
    }
    mc_expectation(|x, c| InteractionPoint::new(x, y, c, a).and_then(|p| w_minus(&p)).ok(), n, seed)
}

/// Lowest Dirichlet eigenvalue on a box, with its discretization error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseEigen<T> {
    pub energy: T,
    pub abs_error: T,
    pub coarse: T,
    pub fine: T,
    pub points: usize,
}

impl<T: Scalar> DenseEigen<T> {
    /// Negative beyond the error estimate.
    pub fn is_bound(&self) -> bool {
        self.energy < -self.abs_error
    }
}

struct Pencil<T> {
    diag: Vec<T>,
    off: T,
    weight: Vec<T>,
}

impl<T: Scalar> Pencil<T> {
    /// With `y = e^t`, `u = y^{1/2} w`: `K w = E y² w`,
    /// `K = −∂_t²/(2μ) + 1/(8μ) − λ y² V`.
    fn build<P: RadialPotential<T> + ?Sized>(
        pot: &P,
        mu: T,
        lambda: T,
        t_lo: T,
        t_hi: T,
        n: usize,
    ) -> Result<Self> {
        let h = (t_hi - t_lo) / T::from_count(n + 1);
        let two = T::lit(2.0);
        let kin = T::one() / (two * mu * h * h);
        let shift = T::one() / (T::lit(8.0) * mu);
        let mut diag = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        for i in 1..=n {
            let t = t_lo + h * T::from_count(i);
            let y = t.exp();
            let s = if lambda == T::zero() { T::zero() } else { pot.scaled(y)? };
            diag.push(two * kin + shift - lambda * s);
            weight.push(y * y);
        }
        Ok(Self { diag, off: -kin, weight })
    }

    /// Number of eigenvalues below `sigma` (Sylvester inertia of `K − σ D`).
    fn count_below(&self, sigma: T) -> usize {
        let tiny = T::min_positive_value();
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = T::one();
        for (i, (&k, &w)) in self.diag.iter().zip(&self.weight).enumerate() {
            let a = k - sigma * w;
            d = if i == 0 { a } else { a - off2 / d };
            if d == T::zero() {
                d = -tiny;
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn lowest(&self) -> Result<T> {
        let ten = T::lit(10.0);
        let (mut lo, mut hi);
        if self.count_below(T::zero()) > 0 {
            hi = T::zero();
            lo = -T::one();
            let mut guard = 0;
            while self.count_below(lo) > 0 {
                hi = lo;
                lo = lo * ten;
                guard += 1;
                if guard > 300 {
                    return Err(Error::GridTooCoarse("spectrum unbounded below on this grid".into()));
                }
            }
        } else {
            lo = T::zero();
            hi = T::one();
            let mut guard = 0;
            while self.count_below(hi) == 0 {
                lo = hi;
                hi = hi * ten;
                guard += 1;
                if guard > 300 {
                    return Err(Error::GridTooCoarse("no eigenvalue found".into()));
                }
            }
        }
        for _ in 0..400 {
            // geometric steps while the bracket spans decades on one side of zero
            let mid = if lo * hi > T::zero() && (hi / lo).abs().max((lo / hi).abs()) > T::lit(4.0) {
                lo.signum() * (lo * hi).sqrt()
            } else {
                lo + (hi - lo) / T::lit(2.0)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo + (hi - lo) / T::lit(2.0))
    }
}

/// Lowest eigenvalue of `−u''/(2μ) − λ V u` with `u(y_min) = u(y_max) = 0`.
///
/// Finite differences on a uniform grid in `ln y` with `points` interior
/// nodes and again with `2 points + 1`, then Richardson extrapolation. The
/// logarithmic grid resolves inverse-square behaviour over many decades.
pub fn dense_grid_eigen<T: Scalar, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    mu: T,
    lambda: T,
    bounds: (T, T),
    points: usize,
) -> Result<DenseEigen<T>> {
    let (y_min, y_max) = bounds;
    if points < 200 {
        return Err(Error::GridTooCoarse(format!("need >= 200 points, got {points}")));
    }
    if !(y_min > T::zero() && y_max > y_min && mu > T::zero()) {
        return Err(Error::DomainError("need 0 < y_min < y_max and mu > 0".into()));
    }
    let (t_lo, t_hi) = (y_min.ln(), y_max.ln());
    let coarse = Pencil::build(pot, mu, lambda, t_lo, t_hi, points)?.lowest()?;
    let fine = Pencil::build(pot, mu, lambda, t_lo, t_hi, 2 * points + 1)?.lowest()?;
    let three = T::lit(3.0);
    let energy = (T::lit(4.0) * fine - coarse) / three;
    let abs_error = (fine - coarse).abs() / three + T::lit(1e3) * T::epsilon() * energy.abs();
    Ok(DenseEigen { energy, abs_error, coarse, fine, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::{Coulomb, InverseSquare};
    use crate::potential::veff_numeric;
    use crate::quad::QuadSettings;

    #[test]
    fn calibration_hooks() {
        let one = mc_expectation(|_, _| Some(1.0), 10_000, 3).unwrap();
        assert_eq!(one.mean, 1.0);
        assert_eq!(one.std_error, 0.0);
        let mx = mc_expectation(|x, _| Some(x), 200_000, 3).unwrap();
        assert!(mx.brackets(0.75, 5.0), "{mx:?}");
        let mc = mc_expectation(|_, c| Some(c), 200_000, 3).unwrap();
        assert!(mc.brackets(0.0, 5.0), "{mc:?}");
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_veff(1.0, 0.7, 50_000, 11).unwrap();
        let b = mc_veff(1.0, 0.7, 50_000, 11).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_veff(1.0, 0.7, 50_000, 12).unwrap();
        assert_ne!(a.mean, c.mean);
        assert!(mc_veff(1.0, 0.7, 999, 1).is_err());
    }

    #[test]
    fn mc_matches_quadrature() {
        let est = mc_veff(1.0, 0.7, 400_000, 5).unwrap();
        let v = veff_numeric(1.0, 0.7, &QuadSettings::default()).unwrap();
        assert!(est.brackets(v, 5.0), "{est:?} vs {v}");
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn dense_hydrogen() {
        let e = dense_grid_eigen(&Coulomb { strength: 1.0f64 }, 2.0, 1.0, (1e-6, 40.0), 2000).unwrap();
        assert!((e.energy + 1.0).abs() < 1e-4, "{e:?}");
        assert!(e.is_bound());
    }

    #[test]
    fn dense_inverse_square() {
        let v = InverseSquare { strength: 1.0 };
        let bound = dense_grid_eigen(&v, 0.5, 0.26, (1e-12, 1e12), 800).unwrap();
        assert!(bound.energy < 0.0 && bound.coarse < 0.0 && bound.fine < 0.0, "{bound:?}");
        let free = dense_grid_eigen(&v, 0.5, 0.24, (1e-12, 1e12), 800).unwrap();
        assert!(free.energy > 0.0, "{free:?}");
    }

    #[test]
    fn dense_free_particle() {
        let e = dense_grid_eigen(&Coulomb { strength: 1.0 }, 1.0, 0.0, (1e-3, 10.0), 300).unwrap();
        assert!(e.energy > 0.0 && !e.is_bound());
        assert!(matches!(
            dense_grid_eigen(&Coulomb { strength: 1.0 }, 1.0, 1.0, (1e-3, 10.0), 100),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
