//! Closed-form ι₁ for the model generator A(a,b,c,d) over [0, T].
//!
//! | d    | condition             | ι₁     |
//! |------|-----------------------|--------|
//! | < 0  | cd + b² ≥ 0           | 2k     |
//! | < 0  | cd + b² < 0           | 2k + 1 |
//! | = 0  | b ≠ 0, or b = 0, c > 0 | 0      |
//! | = 0  | b = 0, c ≤ 0          | −1     |
//! | > 0  | cd + b² > 0           | 0      |
//! | > 0  | cd + b² ≤ 0           | −1     |
//!
//! with k the integer satisfying 2πk < √(−ad)·T ≤ 2π(k+1).

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance of every scalar comparison in the table.
pub const CASE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DSign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    Cdb2Pos,
    Cdb2Zero,
    Cdb2Neg,
    BZeroCPos,
    BZeroCNonpos,
    BNonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CaseTag {
    pub d_sign: DSign,
    pub subcase: Subcase,
    pub k: Option<u32>,
}

impl CaseTag {
    /// False for the −1 rows, which need c ≤ 0 and so never come from an orbit.
    pub fn model_feasible(&self) -> bool {
        !matches!(
            (self.d_sign, self.subcase),
            (DSign::Zero, Subcase::BZeroCNonpos) | (DSign::Positive, Subcase::Cdb2Zero | Subcase::Cdb2Neg)
        )
    }
}

fn scale(xs: &[f64]) -> f64 {
    xs.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

pub fn d_sign(a: f64, b: f64, c: f64, d: f64) -> DSign {
    if d.abs() <= CASE_RTOL * scale(&[a, b, c]) {
        DSign::Zero
    } else if d < 0.0 {
        DSign::Negative
    } else {
        DSign::Positive
    }
}

/// Sign of cd + b², with ties judged relative to max(1, b², |cd|).
pub fn cdb2_sign(b: f64, c: f64, d: f64) -> i8 {
    let v = c * d + b * b;
    if v.abs() <= CASE_RTOL * scale(&[b * b, c * d]) {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// The k with 2πk < √(−ad)·T ≤ 2π(k+1).
pub fn compute_k(a: f64, d: f64, period: f64) -> Result<u32> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    if !(d < 0.0) {
        return Err(Error::InvalidArgument(format!("k needs d < 0, got {d}")));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {period}")));
    }
    Ok(k_from_turns((-a * d).sqrt() * period / TAU))
}

/// k for a rotation of `x` full turns, x > 0; x within 1e-12 of an integer
/// r ≥ 1 is taken to be r and so belongs to k = r − 1.
pub fn k_from_turns(x: f64) -> u32 {
    let r = x.round();
    if r >= 1.0 && (x - r).abs() <= CASE_RTOL * x.max(1.0) {
        r as u32 - 1
    } else {
        (x.ceil() as u32).saturating_sub(1)
    }
}

pub fn classify_generator(a: f64, b: f64, c: f64, d: f64) -> Result<CaseTag> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    if ![b, c, d].iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    let ds = d_sign(a, b, c, d);
    let subcase = match ds {
        DSign::Zero => {
            if b.abs() > CASE_RTOL * scale(&[a, c]) {
                Subcase::BNonzero
            } else if c > CASE_RTOL * scale(&[a, b]) {
                Subcase::BZeroCPos
            } else {
                Subcase::BZeroCNonpos
            }
        }
        _ => match cdb2_sign(b, c, d) {
            1 => Subcase::Cdb2Pos,
            0 => Subcase::Cdb2Zero,
            _ => Subcase::Cdb2Neg,
        },
    };
    Ok(CaseTag { d_sign: ds, subcase, k: None })
}

pub fn table_iota1(a: f64, b: f64, c: f64, d: f64, period: f64) -> Result<(i64, CaseTag)> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {period}")));
    }
    let mut tag = classify_generator(a, b, c, d)?;
    let iota = match (tag.d_sign, tag.subcase) {
        (DSign::Negative, sub) => {
            let k = compute_k(a, d, period)?;
            tag.k = Some(k);
            let k = k as i64;
            if sub == Subcase::Cdb2Neg {
                2 * k + 1
            } else {
                2 * k
            }
        }
        (DSign::Zero, Subcase::BZeroCNonpos) => -1,
        (DSign::Zero, _) => 0,
        (DSign::Positive, Subcase::Cdb2Pos) => 0,
        (DSign::Positive, _) => -1,
    };
    Ok((iota, tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn k_examples() {
        // √(−ad)·T = 2π√(α+2) for the Euclidean data.
        let k_euclid = |alpha: f64| {
            let (a, d) = (1.0, alpha * (alpha + 2.0));
            let t = 2.0 * PI / (-alpha * (alpha + 2.0)).sqrt() * (alpha + 2.0).sqrt();
            compute_k(a, d, t).unwrap()
        };
        assert_eq!(k_euclid(-1.0), 0);
        assert_eq!(k_euclid(-0.5), 1);
        assert_eq!(compute_k(1.0, -1.0, 4.0 * PI).unwrap(), 1);
        assert_eq!(compute_k(1.0, -1.0, 4.0 * PI * (1.0 + 1e-9)).unwrap(), 2);
        assert_eq!(compute_k(4.0, -1.0, 0.1).unwrap(), 0);
        assert!(compute_k(1.0, 0.0, 1.0).is_err());
        assert!(compute_k(-1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let t = classify_generator(1.0, 2.0, 1.0, -1.0).unwrap();
        assert_eq!((t.d_sign, t.subcase), (DSign::Negative, Subcase::Cdb2Pos));
        let t = classify_generator(1.0, 0.0, -1.0, 0.0).unwrap();
        assert_eq!((t.d_sign, t.subcase), (DSign::Zero, Subcase::BZeroCNonpos));
        assert!(!t.model_feasible());
        let t = classify_generator(1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!((t.d_sign, t.subcase), (DSign::Positive, Subcase::Cdb2Pos));
        assert!(t.model_feasible());
        let t = classify_generator(1.0, 2.0, 1.0, -4.0).unwrap();
        assert_eq!(t.subcase, Subcase::Cdb2Zero);
        assert!(classify_generator(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn table_examples() {
        let (i, tag) = table_iota1(1.0, 2.0, 1.0, -1.0, 2.0 * PI).unwrap();
        assert_eq!((i, tag.k), (0, Some(0)));

        // Euclidean α = −0.5 at ξ = 1: b = 2√0.5, d = −0.75, T = 2π/√0.5.
        let t = 2.0 * PI / 0.5f64.sqrt();
        let (i, tag) = table_iota1(1.0, 2.0 * 0.5f64.sqrt(), 1.0, -0.75, t).unwrap();
        assert_eq!((i, tag.k), (2, Some(1)));

        for &t in &[0.1, 1.0, 50.0] {
            assert_eq!(table_iota1(1.0, 0.0, 1.0, 0.0, t).unwrap().0, 0);
            assert_eq!(table_iota1(1.0, 0.0, -1.0, 0.0, t).unwrap().0, -1);
            assert_eq!(table_iota1(1.0, 0.3, -1.0, 0.0, t).unwrap().0, 0);
            assert_eq!(table_iota1(1.0, 0.0, -1.0, 1.0, t).unwrap().0, -1);
            assert_eq!(table_iota1(1.0, 2.0, -1.0, 4.0, t).unwrap().0, -1);
        }
        let (i, _) = table_iota1(1.0, 0.0, 1.0, -1.0, 3.0 * PI).unwrap();
        assert_eq!(i, 3);
    }

    fn coeff() -> impl Strategy<Value = f64> {
        -5.0f64..5.0
    }

    proptest! {
        #[test]
        fn parity_follows_cdb2(a in 0.1f64..5.0, b in coeff(), c in coeff(), d in -5.0f64..-1e-3, t in 0.5f64..20.0) {
            let (i, tag) = table_iota1(a, b, c, d, t).unwrap();
            if tag.subcase == Subcase::Cdb2Neg {
                prop_assert_eq!(i.rem_euclid(2), 1);
            } else {
                prop_assert_eq!(i.rem_euclid(2), 0);
            }
        }

        #[test]
        fn nondecreasing_in_t(a in 0.1f64..5.0, b in coeff(), c in coeff(), d in -5.0f64..-1e-3, t in 0.5f64..20.0, dt in 0.0f64..10.0) {
            let (i1, _) = table_iota1(a, b, c, d, t).unwrap();
            let (i2, _) = table_iota1(a, b, c, d, t + dt).unwrap();
            prop_assert!(i2 >= i1);
        }

        #[test]
        fn jumps_by_two_at_full_turns(a in 0.1f64..5.0, b in coeff(), c in coeff(), d in -5.0f64..-1e-3, m in 1u32..6) {
            let w = (-a * d).sqrt();
            let t_jump = TAU * m as f64 / w;
            let (lo, _) = table_iota1(a, b, c, d, t_jump * (1.0 - 1e-6)).unwrap();
            let (at, _) = table_iota1(a, b, c, d, t_jump).unwrap();
            let (hi, _) = table_iota1(a, b, c, d, t_jump * (1.0 + 1e-6)).unwrap();
            prop_assert_eq!(lo, at);
            prop_assert_eq!(hi - at, 2);
        }

        #[test]
        fn positive_c_gives_nonnegative_index(a in 0.1f64..5.0, b in coeff(), c in 1e-6f64..5.0, d in coeff(), t in 0.5f64..20.0) {
            let (i, tag) = table_iota1(a, b, c, d, t).unwrap();
            prop_assert!(i >= 0);
            prop_assert!(tag.model_feasible());
        }
    }
}
