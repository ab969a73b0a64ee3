//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Panels are refined globally: the panel with the largest error estimate is
//! bisected until the summed estimate meets `max(abs_tol, rel_tol * |I|)` or
//! the panel budget is spent. Only interior nodes are sampled, so integrable
//! endpoint singularities never get evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Scalar> Default for QuadSettings<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::default_rel_tol(),
            abs_tol: T::lit(1e-15).max(T::epsilon() * T::lit(1e-3)),
            max_subdivisions: 10_000,
        }
    }
}

impl<T: Scalar> QuadSettings<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value of an integral with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Panel<T> {}
impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Scalar, F: FnMut(T) -> T>(f: &mut F, lo: T, hi: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc > T::zero() && err > T::zero() {
        let r = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * r.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    (value, err)
}

/// Integrates `f` over `[lo, hi]`.
pub fn integrate<T, F>(f: F, lo: T, hi: T, settings: &QuadSettings<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    integrate_breaks(f, &[lo, hi], settings)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding one panel per
/// consecutive pair of breakpoints. Breakpoints must be non-decreasing; empty
/// sub-intervals are skipped.
pub fn integrate_breaks<T, F>(mut f: F, points: &[T], settings: &QuadSettings<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if points.len() < 2 {
        return Err(Error::DomainError("quadrature needs at least two breakpoints".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DomainError("quadrature bounds must be finite".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi < lo {
            return Err(Error::DomainError("breakpoints must be non-decreasing".into()));
        }
        if hi == lo {
            continue;
        }
        let (value, error) = kronrod(&mut f, lo, hi);
        evaluations += 15;
        heap.push(Panel { lo, hi, value, error });
    }
    let totals = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter().fold((T::zero(), T::zero()), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut since_resum = 0usize;
    while error > settings.target(value) {
        if heap.len() >= settings.max_subdivisions {
            return Err(Error::QuadratureFailure {
                requested: settings.target(value).to_f64_lossy(),
                achieved: error.to_f64_lossy(),
                subdivisions: heap.len(),
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = T::lit(0.5) * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // panel cannot be split further in this precision
            heap.push(worst);
            return Err(Error::QuadratureFailure {
                requested: settings.target(value).to_f64_lossy(),
                achieved: error.to_f64_lossy(),
                subdivisions: heap.len(),
            });
        }
        let (v1, e1) = kronrod(&mut f, worst.lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.hi);
        evaluations += 30;
        value = value - worst.value + v1 + v2;
        error = error - worst.error + e1 + e2;
        heap.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2 });
        since_resum += 1;
        if since_resum == 64 {
            (value, error) = totals(&heap);
            since_resum = 0;
        }
    }
    let (value, error) = totals(&heap);
    Ok(QuadResult { value, abs_error: error, evaluations, panels: heap.len() })
}
