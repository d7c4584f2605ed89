//! Kodaira fiber types, Euler-number accounting and moduli dimension counts.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Kodaira singular fiber type. `IStar(0)` is I₀*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FiberType {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

/// Rows of the ALG invariants table: (type, β, τ, b₂ of the ALG space).
pub const FINITE_TYPES: [FiberType; 7] = [
    FiberType::IStar(0),
    FiberType::IIStar,
    FiberType::II,
    FiberType::IIIStar,
    FiberType::III,
    FiberType::IVStar,
    FiberType::IV,
];

/// Which τ the ALG model of a type carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TauKind {
    /// Any τ in the upper half plane.
    Free,
    /// e^{2πi/3}
    Hexagonal,
    /// i
    Square,
}

impl FiberType {
    pub fn euler(&self) -> u32 {
        match *self {
            FiberType::I(n) => n,
            FiberType::IStar(n) => n + 6,
            FiberType::II => 2,
            FiberType::III => 3,
            FiberType::IV => 4,
            FiberType::IVStar => 8,
            FiberType::IIIStar => 9,
            FiberType::IIStar => 10,
        }
    }

    pub fn is_finite_monodromy(&self) -> bool {
        !matches!(self, FiberType::I(_)) && !matches!(self, FiberType::IStar(n) if *n > 0)
    }

    /// Cone angle fraction β of the ALG model.
    pub fn beta(&self) -> Option<Rational64> {
        let r = |a, b| Some(Rational64::new(a, b));
        match *self {
            FiberType::IStar(0) => r(1, 2),
            FiberType::IIStar => r(1, 6),
            FiberType::II => r(5, 6),
            FiberType::IIIStar => r(1, 4),
            FiberType::III => r(3, 4),
            FiberType::IVStar => r(1, 3),
            FiberType::IV => r(2, 3),
            _ => None,
        }
    }

    pub fn tau_kind(&self) -> Option<TauKind> {
        match *self {
            FiberType::IStar(0) => Some(TauKind::Free),
            FiberType::IIStar | FiberType::II | FiberType::IVStar | FiberType::IV => Some(TauKind::Hexagonal),
            FiberType::IIIStar | FiberType::III => Some(TauKind::Square),
            _ => None,
        }
    }

    /// Second Betti number of the ALG space filling in this fiber.
    pub fn alg_b2(&self) -> Option<u32> {
        match *self {
            FiberType::IStar(0) => Some(5),
            FiberType::IIStar => Some(9),
            FiberType::II => Some(1),
            FiberType::IIIStar => Some(8),
            FiberType::III => Some(2),
            FiberType::IVStar => Some(7),
            FiberType::IV => Some(3),
            _ => None,
        }
    }

    /// Optimal distortion order λ_β.
    pub fn distortion_order(&self) -> Option<Rational64> {
        let r = |a, b| Some(Rational64::new(a, b));
        match *self {
            FiberType::IStar(0) => r(2, 1),
            FiberType::IIStar => r(4, 1),
            FiberType::II => r(2, 5),
            FiberType::IIIStar => r(2, 1),
            FiberType::III => r(2, 3),
            FiberType::IVStar => r(1, 1),
            FiberType::IV => r(1, 1),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || GeomError::InvalidConfig(format!("unknown fiber type '{s}'"));
        Ok(match t {
            "II" => FiberType::II,
            "III" => FiberType::III,
            "IV" => FiberType::IV,
            "II*" => FiberType::IIStar,
            "III*" => FiberType::IIIStar,
            "IV*" => FiberType::IVStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(bad)?;
                if let Some(n) = rest.strip_suffix('*') {
                    FiberType::IStar(n.parse().map_err(|_| bad())?)
                } else {
                    let n: u32 = rest.parse().map_err(|_| bad())?;
                    if n == 0 {
                        return Err(GeomError::InvalidConfig("I0 is a smooth fiber".into()));
                    }
                    FiberType::I(n)
                }
            }
        })
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::I(n) => write!(f, "I{n}"),
            FiberType::IStar(n) => write!(f, "I{n}*"),
            FiberType::II => write!(f, "II"),
            FiberType::III => write!(f, "III"),
            FiberType::IV => write!(f, "IV"),
            FiberType::IIStar => write!(f, "II*"),
            FiberType::IIIStar => write!(f, "III*"),
            FiberType::IVStar => write!(f, "IV*"),
        }
    }
}

/// A multiset of singular fibers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberConfig {
    pub fibers: Vec<FiberType>,
}

impl FiberConfig {
    pub fn new(fibers: Vec<FiberType>) -> Self {
        Self { fibers }
    }

    /// From entries like "24xI1" or "2xII*,4xI1".
    pub fn parse(spec: &str) -> Result<Self> {
        let mut fibers = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (count, ty) = match part.split_once(['x', '×']) {
                Some((c, t)) if c.trim().chars().all(|ch| ch.is_ascii_digit()) && !c.trim().is_empty() => {
                    (c.trim().parse::<usize>().unwrap(), t)
                }
                _ => (1, part),
            };
            let f = FiberType::parse(ty)?;
            fibers.extend(std::iter::repeat(f).take(count));
        }
        Ok(Self { fibers })
    }

    pub fn euler_sum(&self) -> u32 {
        self.fibers.iter().map(FiberType::euler).sum()
    }

    /// (k₁, k₂, k₃): finite-monodromy, I_ν (ν ≥ 1), and I_ν* (ν ≥ 1) counts.
    pub fn counts(&self) -> (u32, u32, u32) {
        let mut k = (0, 0, 0);
        for f in &self.fibers {
            match f {
                FiberType::I(_) => k.1 += 1,
                FiberType::IStar(n) if *n > 0 => k.2 += 1,
                _ => k.0 += 1,
            }
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub euler_sum: u32,
    pub k: (u32, u32, u32),
    pub reasons: Vec<String>,
}

pub fn validate(config: &FiberConfig) -> ValidationReport {
    let e = config.euler_sum();
    let k = config.counts();
    let mut reasons = Vec::new();
    if e != 24 {
        reasons.push(format!("Euler numbers sum to {e}, expected 24"));
    }
    if 2 * k.0 + k.1 + 2 * k.2 < 6 {
        reasons.push("2k1 + k2 + 2k3 < 6".into());
    }
    ValidationReport { pass: reasons.is_empty(), euler_sum: e, k, reasons }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliDims {
    pub dim_b: i64,
    /// b₂ − 1 per finite-monodromy fiber.
    pub dim_u: Vec<i64>,
    /// ν − 1 per I_ν fiber.
    pub dim_v: Vec<i64>,
    /// ν + 4 per I_ν* fiber (ν ≥ 1).
    pub dim_w: Vec<i64>,
    pub total: i64,
}

pub fn moduli_dims(config: &FiberConfig) -> Result<ModuliDims> {
    let rep = validate(config);
    if !rep.pass {
        return Err(GeomError::InvalidConfig(rep.reasons.join("; ")));
    }
    let (k1, k2, k3) = rep.k;
    let dim_b = 2 * k1 as i64 + k2 as i64 + 2 * k3 as i64 - 5;
    let mut d = ModuliDims { dim_b, dim_u: vec![], dim_v: vec![], dim_w: vec![], total: 0 };
    for f in &config.fibers {
        match *f {
            FiberType::I(n) => d.dim_v.push(n as i64 - 1),
            FiberType::IStar(n) if n > 0 => d.dim_w.push(n as i64 + 4),
            other => d.dim_u.push(other.alg_b2().unwrap() as i64 - 1),
        }
    }
    d.total = 1 + dim_b + d.dim_u.iter().sum::<i64>() + d.dim_v.iter().sum::<i64>() + d.dim_w.iter().sum::<i64>();
    Ok(d)
}

/// Every fiber multiset with Euler sum 24 and at most `max_fibers` entries.
pub fn enumerate_configs(max_fibers: usize) -> Vec<FiberConfig> {
    let mut types: Vec<FiberType> = (1..=24).map(FiberType::I).collect();
    types.extend((0..=18).map(FiberType::IStar));
    types.extend([
        FiberType::II,
        FiberType::III,
        FiberType::IV,
        FiberType::IVStar,
        FiberType::IIIStar,
        FiberType::IIStar,
    ]);
    fn rec(
        types: &[FiberType],
        start: usize,
        left: u32,
        slots: usize,
        cur: &mut Vec<FiberType>,
        out: &mut Vec<FiberConfig>,
    ) {
        if left == 0 {
            out.push(FiberConfig::new(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for i in start..types.len() {
            let e = types[i].euler();
            if e <= left {
                cur.push(types[i]);
                rec(types, i, left - e, slots - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&types, 0, 24, max_fibers, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_and_isotrivial() {
        let c = FiberConfig::parse("24xI1").unwrap();
        assert!(validate(&c).pass);
        let d = moduli_dims(&c).unwrap();
        assert_eq!((d.dim_b, d.total), (19, 20));
        let c = FiberConfig::parse("4xI0*").unwrap();
        let d = moduli_dims(&c).unwrap();
        assert_eq!((d.dim_b, d.total), (3, 20));
        assert_eq!(d.dim_u.iter().sum::<i64>(), 16);
    }

    #[test]
    fn mixed_example() {
        let c = FiberConfig::parse("2xII*, 4xI1").unwrap();
        let d = moduli_dims(&c).unwrap();
        assert_eq!((d.dim_b, d.total), (3, 20));
    }

    #[test]
    fn bad_euler_sum() {
        let c = FiberConfig::parse("23xI1").unwrap();
        assert!(!validate(&c).pass);
        assert!(moduli_dims(&c).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for f in [FiberType::I(3), FiberType::IStar(0), FiberType::IStar(2), FiberType::IVStar, FiberType::II] {
            assert_eq!(FiberType::parse(&f.to_string()).unwrap(), f);
        }
    }
}
