//! Particle systems, canonical ordering, Jacobi reduction and thresholds.
//!
//! Masses are unit-agnostic here; the catalog supplies electron-mass values.
//! Internally the pair reduced mass is rescaled to `mu_x = 2`, where the
//! (1,2) pair ground state sits at energy −1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A particle mass: finite and positive, or the infinite-mass limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Mass<T> {
    pub fn finite(m: T) -> Self {
        Mass::Finite(m)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Mass::Infinite)
    }

    pub fn value(&self) -> Option<T> {
        match *self {
            Mass::Finite(m) => Some(m),
            Mass::Infinite => None,
        }
    }

    fn scaled(self, k: T) -> Self {
        match self {
            Mass::Finite(m) => Mass::Finite(m * k),
            Mass::Infinite => Mass::Infinite,
        }
    }
}

impl<T: Scalar> FromStr for Mass<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinite" | "infinity" | "+inf") {
            return Ok(Mass::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| Error::InvalidMass(format!("cannot parse mass `{t}`")))?;
        if v.is_infinite() && v > 0.0 {
            return Ok(Mass::Infinite);
        }
        Ok(Mass::Finite(T::lit(v)))
    }
}

impl<T: Scalar> fmt::Display for Mass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Finite(m) => write!(f, "{m}"),
            Mass::Infinite => f.write_str("inf"),
        }
    }
}

/// Reduced mass of a pair; the infinite-mass limit returns the other mass.
pub fn reduced_mass<T: Scalar>(m1: Mass<T>, m2: Mass<T>) -> Option<T> {
    match (m1, m2) {
        (Mass::Finite(a), Mass::Finite(b)) => Some(a * b / (a + b)),
        (Mass::Infinite, Mass::Finite(b)) => Some(b),
        (Mass::Finite(a), Mass::Infinite) => Some(a),
        (Mass::Infinite, Mass::Infinite) => None,
    }
}

/// Unit charge sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Charge {
    Plus,
    Minus,
}

impl Charge {
    pub fn sign(self) -> i8 {
        match self {
            Charge::Plus => 1,
            Charge::Minus => -1,
        }
    }

    pub fn conjugate(self) -> Self {
        match self {
            Charge::Plus => Charge::Minus,
            Charge::Minus => Charge::Plus,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Charge::Plus),
            -1 => Ok(Charge::Minus),
            other => Err(Error::InvalidCharges(format!("charge {other} is not a unit charge"))),
        }
    }

    /// Parses a charge pattern such as `+--`, `-++` or `1,-1,-1`.
    pub fn parse_triple(s: &str) -> Result<[Charge; 3]> {
        let t = s.trim();
        let parsed: Vec<Charge> = if t.contains(',') {
            t.split(',')
                .map(|p| {
                    let p = p.trim();
                    match p {
                        "+" | "+1" | "1" => Ok(Charge::Plus),
                        "-" | "-1" => Ok(Charge::Minus),
                        _ => Err(Error::InvalidCharges(format!("bad charge `{p}`"))),
                    }
                })
                .collect::<Result<_>>()?
        } else {
            t.chars()
                .map(|ch| match ch {
                    '+' => Ok(Charge::Plus),
                    '-' => Ok(Charge::Minus),
                    _ => Err(Error::InvalidCharges(format!("bad charge symbol `{ch}`"))),
                })
                .collect::<Result<_>>()?
        };
        <[Charge; 3]>::try_from(parsed)
            .map_err(|v| Error::InvalidCharges(format!("expected 3 charges, got {}", v.len())))
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Charge::Plus => "+1",
            Charge::Minus => "-1",
        })
    }
}

/// Non-fatal conditions attached to frames and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// The two pair thresholds coincide; the criterion cannot fire.
    EqualThreshold,
}

/// Three unit charges with their masses, in input order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem<T> {
    masses: [Mass<T>; 3],
    charges: [Charge; 3],
}

impl<T: Scalar> ParticleSystem<T> {
    pub fn new(masses: [Mass<T>; 3], charges: [Charge; 3]) -> Result<Self> {
        let mut infinite = 0;
        for (i, m) in masses.iter().enumerate() {
            match m {
                Mass::Infinite => infinite += 1,
                Mass::Finite(v) => {
                    if !(v.is_finite() && *v > T::zero()) {
                        return Err(Error::InvalidMass(format!(
                            "mass {} must be positive and finite (got {v})",
                            i + 1
                        )));
                    }
                }
            }
        }
        if infinite > 1 {
            return Err(Error::InvalidMass("at most one mass may be infinite".into()));
        }
        let plus = charges.iter().filter(|&&c| c == Charge::Plus).count();
        if plus != 1 && plus != 2 {
            return Err(Error::InvalidCharges("charges must be {+1,-1,-1} or {-1,+1,+1}".into()));
        }
        Ok(Self { masses, charges })
    }

    /// Finite masses with the canonical charge pattern `(+, -, -)`.
    pub fn from_masses(m1: T, m2: T, m3: T) -> Result<Self> {
        Self::new(
            [Mass::Finite(m1), Mass::Finite(m2), Mass::Finite(m3)],
            [Charge::Plus, Charge::Minus, Charge::Minus],
        )
    }

    pub fn masses(&self) -> [Mass<T>; 3] {
        self.masses
    }

    pub fn charges(&self) -> [Charge; 3] {
        self.charges
    }

    /// Multiplies every finite mass by `k > 0`.
    pub fn scaled(&self, k: T) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::InvalidMass("scale factor must be positive".into()));
        }
        Self::new(self.masses.map(|m| m.scaled(k)), self.charges)
    }

    /// Flips every charge sign.
    pub fn conjugated(&self) -> Self {
        Self { masses: self.masses, charges: self.charges.map(Charge::conjugate) }
    }
}

/// Canonically ordered system: `q1 = +1`, `q2 = q3 = -1`, and the (1,2)
/// pair forms the lowest threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSystem<T> {
    pub masses: [Mass<T>; 3],
    /// `order[i]` is the input index of canonical particle `i`.
    pub order: [usize; 3],
    /// Whether all charges were flipped to reach `(+, -, -)`.
    pub conjugated: bool,
    /// `mu_12 - mu_13 >= 0`, in input mass units.
    pub threshold_gap: T,
    pub warnings: Vec<Warning>,
}

impl<T: Scalar> CanonicalSystem<T> {
    pub fn mu_12(&self) -> T {
        reduced_mass(self.masses[0], self.masses[1]).expect("validated masses")
    }

    pub fn mu_13(&self) -> T {
        reduced_mass(self.masses[0], self.masses[2]).expect("validated masses")
    }

    pub fn has_equal_thresholds(&self) -> bool {
        self.warnings.contains(&Warning::EqualThreshold)
    }

    /// The canonical system expressed as a plain `(+, -, -)` particle system.
    pub fn to_system(&self) -> ParticleSystem<T> {
        ParticleSystem { masses: self.masses, charges: [Charge::Plus, Charge::Minus, Charge::Minus] }
    }
}

/// Brings a system to canonical order, conjugating charges if needed.
///
/// When both pair reduced masses are exactly equal, input order is kept and
/// [`Warning::EqualThreshold`] is attached.
pub fn normalize_system<T: Scalar>(sys: &ParticleSystem<T>) -> Result<CanonicalSystem<T>> {
    // Re-validate: fields are private but deserialization bypasses `new`.
    let sys = ParticleSystem::new(sys.masses, sys.charges)?;
    let plus: Vec<usize> = (0..3).filter(|&i| sys.charges[i] == Charge::Plus).collect();
    let (lone, conjugated) = if plus.len() == 1 {
        (plus[0], false)
    } else {
        ((0..3).find(|i| !plus.contains(i)).expect("one minority charge"), true)
    };
    let others: Vec<usize> = (0..3).filter(|&i| i != lone).collect();
    let (j, k) = (others[0], others[1]);
    let m = sys.masses;
    let mu_j = reduced_mass(m[lone], m[j]).expect("at most one infinite mass");
    let mu_k = reduced_mass(m[lone], m[k]).expect("at most one infinite mass");
    let mut warnings = Vec::new();
    let (second, third) = if mu_j > mu_k {
        (j, k)
    } else if mu_k > mu_j {
        (k, j)
    } else {
        warnings.push(Warning::EqualThreshold);
        (j, k)
    };
    Ok(CanonicalSystem {
        masses: [m[lone], m[second], m[third]],
        order: [lone, second, third],
        conjugated,
        threshold_gap: (mu_j - mu_k).abs(),
        warnings,
    })
}

/// Jacobi-frame parameters of a canonical system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiFrame<T> {
    /// Mass parameter `m2 / (m1 + m2)`.
    pub a: T,
    /// Pair reduced mass in internal units (always 2).
    pub mu_x: T,
    /// Third-particle reduced mass in internal units.
    pub mu_y: T,
    /// Factor mapping input masses to internal units, `2 / mu_x_physical`.
    pub scale: T,
    /// `(a - 1/2)^-1`, `None` at `a = 1/2`.
    pub omega: Option<T>,
    pub mu_x_physical: T,
    pub mu_y_physical: T,
}

impl<T: Scalar> JacobiFrame<T> {
    /// The scale-free ratio `mu_y / mu_x`.
    pub fn mass_ratio(&self) -> T {
        self.mu_y_physical / self.mu_x_physical
    }
}

/// Separates the centre of mass and rescales to `mu_x = 2`.
///
/// An infinite `m1` gives the exact limit `a = 0, mu_x = m2, mu_y = m3`; an
/// infinite `m2` gives the mirror limit `a = 1, mu_x = m1, mu_y = m3`.
pub fn jacobi_reduce<T: Scalar>(cs: &CanonicalSystem<T>) -> JacobiFrame<T> {
    let [m1, m2, m3] = cs.masses;
    let (a, mu_x, mu_y) = match (m1, m2, m3) {
        (Mass::Infinite, Mass::Finite(m2), Mass::Finite(m3)) => (T::zero(), m2, m3),
        (Mass::Finite(m1), Mass::Infinite, Mass::Finite(m3)) => (T::one(), m1, m3),
        (Mass::Finite(m1), Mass::Finite(m2), Mass::Infinite) => {
            (m2 / (m1 + m2), m1 * m2 / (m1 + m2), m1 + m2)
        }
        (Mass::Finite(m1), Mass::Finite(m2), Mass::Finite(m3)) => {
            let pair = m1 + m2;
            (m2 / pair, m1 * m2 / pair, m3 * pair / (pair + m3))
        }
        _ => unreachable!("validated systems carry at most one infinite mass"),
    };
    let two = T::lit(2.0);
    let scale = two / mu_x;
    let half = T::lit(0.5);
    JacobiFrame {
        a,
        mu_x: two,
        mu_y: mu_y * scale,
        scale,
        omega: if a == half { None } else { Some(T::one() / (a - half)) },
        mu_x_physical: mu_x,
        mu_y_physical: mu_y,
    }
}

/// Pair ground-state energies `(-mu_12/2, -mu_13/2)` in input units.
pub fn dissociation_thresholds<T: Scalar>(cs: &CanonicalSystem<T>) -> (T, T) {
    let half = T::lit(0.5);
    (-half * cs.mu_12(), -half * cs.mu_13())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const M_MU: f64 = 206.768_283_0;
    const M_P: f64 = 1_836.152_673_43;

    fn pmue() -> ParticleSystem<f64> {
        ParticleSystem::from_masses(M_P, M_MU, 1.0).unwrap()
    }

    #[test]
    fn muonic_ion_ordering() {
        let cs = normalize_system(&pmue()).unwrap();
        assert_eq!(cs.order, [0, 1, 2]);
        assert!(!cs.conjugated);
        assert_relative_eq!(cs.mu_12(), 185.8409, max_relative = 1e-5);
        assert_relative_eq!(cs.mu_13(), 0.999_455_6, max_relative = 1e-6);
        assert!(cs.warnings.is_empty());
    }

    #[test]
    fn conjugate_pattern_is_reordered() {
        let sys = ParticleSystem::new(
            [Mass::Finite(M_MU), Mass::Finite(M_P), Mass::Finite(1.0)],
            [Charge::Minus, Charge::Plus, Charge::Plus],
        )
        .unwrap();
        let cs = normalize_system(&sys).unwrap();
        assert!(cs.conjugated);
        assert_eq!(cs.order, [0, 1, 2]);
        assert_eq!(cs.masses[0], Mass::Finite(M_MU));
        assert_eq!(cs.masses[1], Mass::Finite(M_P));
    }

    #[test]
    fn swaps_when_third_particle_forms_threshold() {
        let cs = normalize_system(&ParticleSystem::from_masses(M_P, 1.0, M_MU).unwrap()).unwrap();
        assert_eq!(cs.order, [0, 2, 1]);
        assert_eq!(cs.masses[1], Mass::Finite(M_MU));
    }

    #[test]
    fn equal_masses_keep_order_and_warn() {
        let cs = normalize_system(&ParticleSystem::from_masses(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(cs.order, [0, 1, 2]);
        assert_eq!(cs.warnings, vec![Warning::EqualThreshold]);
        assert_eq!(cs.threshold_gap, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = ParticleSystem::new([Mass::Finite(1.0); 3], [Charge::Plus, Charge::Plus, Charge::Plus]);
        assert!(matches!(bad, Err(Error::InvalidCharges(_))));
        assert!(matches!(ParticleSystem::from_masses(1.0, 0.0, 1.0), Err(Error::InvalidMass(_))));
        assert!(matches!(ParticleSystem::from_masses(1.0, -2.0, 1.0), Err(Error::InvalidMass(_))));
        let two_inf = ParticleSystem::new(
            [Mass::Infinite, Mass::Infinite, Mass::Finite(1.0)],
            [Charge::Plus, Charge::Minus, Charge::Minus],
        );
        assert!(matches!(two_inf, Err(Error::InvalidMass(_))));
    }

    #[test]
    fn infinite_nucleus_limit() {
        let sys = ParticleSystem::new(
            [Mass::Infinite, Mass::Finite(1.0), Mass::Finite(0.3)],
            [Charge::Plus, Charge::Minus, Charge::Minus],
        )
        .unwrap();
        let f = jacobi_reduce(&normalize_system(&sys).unwrap());
        assert_eq!(f.a, 0.0);
        assert_eq!(f.mu_x_physical, 1.0);
        assert_eq!(f.mu_y_physical, 0.3);
        assert_eq!(f.mu_x, 2.0);
        assert_relative_eq!(f.mu_y, 0.6);
        assert_eq!(f.omega, Some(-2.0));
    }

    #[test]
    fn symmetric_unit_masses() {
        let f =
            jacobi_reduce(&normalize_system(&ParticleSystem::from_masses(1.0, 1.0, 1.0).unwrap()).unwrap());
        assert_eq!(f.a, 0.5);
        assert_eq!(f.mu_x_physical, 0.5);
        assert_relative_eq!(f.mu_y_physical, 2.0 / 3.0);
        assert_relative_eq!(f.mu_y, 8.0 / 3.0);
        assert_eq!(f.omega, None);
    }

    #[test]
    fn muonic_ion_frame() {
        let f = jacobi_reduce(&normalize_system(&pmue()).unwrap());
        assert_relative_eq!(f.a, M_MU / (M_P + M_MU));
        assert_relative_eq!(f.a, 0.101_213, max_relative = 1e-5);
        assert_relative_eq!(f.mu_y_physical, 0.999_511, max_relative = 1e-6);
        assert_eq!(f.mu_x, 2.0);
    }

    #[test]
    fn thresholds() {
        let cs = normalize_system(&pmue()).unwrap();
        let (e12, e13) = dissociation_thresholds(&cs);
        assert_relative_eq!(e12, -92.920, max_relative = 1e-4);
        assert_relative_eq!(e13, -0.499_73, max_relative = 1e-4);
        assert!(e12 <= e13);

        // internal units: the (1,2) pair sits at -1
        let f = jacobi_reduce(&cs);
        assert_relative_eq!(e12 * f.scale, -1.0, max_relative = 1e-14);

        let sys = ParticleSystem::new(
            [Mass::Infinite, Mass::Finite(1.0), Mass::Finite(1.0)],
            [Charge::Plus, Charge::Minus, Charge::Minus],
        )
        .unwrap();
        let cs = normalize_system(&sys).unwrap();
        assert_eq!(dissociation_thresholds(&cs), (-0.5, -0.5));
        assert!(cs.has_equal_thresholds());
    }

    #[test]
    fn infinite_negative_particle_is_mirror_limit() {
        let sys = ParticleSystem::new(
            [Mass::Finite(2.0), Mass::Finite(1.0), Mass::Infinite],
            [Charge::Plus, Charge::Minus, Charge::Minus],
        )
        .unwrap();
        let cs = normalize_system(&sys).unwrap();
        assert_eq!(cs.order, [0, 2, 1]);
        let f = jacobi_reduce(&cs);
        assert_eq!(f.a, 1.0);
        assert_eq!(f.mu_x_physical, 2.0);
        assert_eq!(f.mu_y_physical, 1.0);
    }

    #[test]
    fn mass_parsing() {
        assert_eq!("inf".parse::<Mass<f64>>().unwrap(), Mass::Infinite);
        assert_eq!("2.5".parse::<Mass<f64>>().unwrap(), Mass::Finite(2.5));
        assert!("abc".parse::<Mass<f64>>().is_err());
        assert_eq!(Charge::parse_triple("-++").unwrap(), [Charge::Minus, Charge::Plus, Charge::Plus]);
        assert_eq!(Charge::parse_triple("1,-1,-1").unwrap(), [Charge::Plus, Charge::Minus, Charge::Minus]);
        assert!(Charge::parse_triple("+-").is_err());
    }
}
