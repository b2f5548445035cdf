//! Continued-fraction fundamental units for small discriminants.
//!
//! Independent of the certificate path; used to cross-check it and as
//! ground truth for small `d`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;

/// Largest `d` accepted by [`fundamental_unit`].
pub const UNIT_LIMIT: u64 = 1_000_000_000;
/// Largest `d_max` accepted by [`scan`].
pub const SCAN_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is below 2")]
    TooSmall(u64),
    #[error("{0} is a perfect square")]
    PerfectSquare(u64),
    #[error("{d} is divisible by {factor}^2")]
    NotSquarefree { d: u64, factor: u64 },
    #[error("{value} exceeds the oracle limit {limit}")]
    OutOfRange { value: u64, limit: u64 },
}

/// `sqrt d = [a0; period, period, ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub a0: u64,
    pub period: Vec<u64>,
}

/// State `(P + sqrt d) / Q` of the surd recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Surd {
    p: u64,
    q: u64,
}

/// Partial quotients of `(p0 + sqrt d) / q0`, yielding `(a_k, Q_{k+1})`.
struct SurdExpansion {
    d: u64,
    root: u64,
    state: Surd,
}

impl SurdExpansion {
    fn new(d: u64, p0: u64, q0: u64) -> Self {
        Self {
            d,
            root: isqrt_u64(d),
            state: Surd { p: p0, q: q0 },
        }
    }
}

impl Iterator for SurdExpansion {
    type Item = (u64, Surd);

    fn next(&mut self) -> Option<Self::Item> {
        let Surd { p, q } = self.state;
        let a = (p + self.root) / q;
        let p_next = a * q - p;
        let q_next = (self.d - p_next * p_next) / q;
        self.state = Surd { p: p_next, q: q_next };
        Some((a, self.state))
    }
}

fn isqrt_u64(n: u64) -> u64 {
    let r = arith::isqrt(&BigInt::from(n)).expect("nonnegative");
    u64::try_from(r).expect("fits")
}

fn is_square(n: u64) -> bool {
    let r = isqrt_u64(n);
    r * r == n
}

/// Periodic expansion of `sqrt d`, stopping when the `(P, Q)` state recurs.
pub fn cf_expand(d: u64) -> Result<ContinuedFraction, OracleError> {
    if d < 2 {
        return Err(OracleError::TooSmall(d));
    }
    if is_square(d) {
        return Err(OracleError::PerfectSquare(d));
    }
    let mut expansion = SurdExpansion::new(d, 0, 1);
    let (a0, first) = expansion.next().expect("infinite");
    let mut period = Vec::new();
    for (a, state) in expansion {
        period.push(a);
        if state == first {
            break;
        }
    }
    Ok(ContinuedFraction { a0, period })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OmegaForm {
    /// `omega = sqrt d` for `d = 2, 3 mod 4`.
    SqrtD,
    /// `omega = (1 + sqrt d) / 2` for `d = 1 mod 4`.
    HalfOnePlusSqrtD,
}

/// `eps = x + y omega > 1`, the generator of the unit group modulo sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalUnit {
    pub d: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub x: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub y: BigUint,
    pub omega_form: OmegaForm,
    pub norm_sign: i8,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl FundamentalUnit {
    /// Exact norm of `x + y omega`.
    pub fn norm(&self) -> BigInt {
        let x = BigInt::from(self.x.clone());
        let y = BigInt::from(self.y.clone());
        let d = BigInt::from(self.d);
        match self.omega_form {
            OmegaForm::SqrtD => &x * &x - d * &y * &y,
            OmegaForm::HalfOnePlusSqrtD => &x * &x + &x * &y - &y * &y * ((d - 1) / 4),
        }
    }

    pub fn d_divides_y(&self) -> bool {
        (&self.y % self.d).is_zero()
    }
}

/// Smallest prime whose square divides `d`, if any.
fn square_factor(d: u64) -> Option<u64> {
    let mut m = d;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return Some(p);
            }
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    None
}

fn check_input(d: u64) -> Result<(), OracleError> {
    if d < 2 {
        return Err(OracleError::TooSmall(d));
    }
    if d >= UNIT_LIMIT {
        return Err(OracleError::OutOfRange { value: d, limit: UNIT_LIMIT });
    }
    if is_square(d) {
        return Err(OracleError::PerfectSquare(d));
    }
    if let Some(factor) = square_factor(d) {
        return Err(OracleError::NotSquarefree { d, factor });
    }
    Ok(())
}

fn expansion_for(d: u64) -> (SurdExpansion, OmegaForm, u64) {
    if d % 4 == 1 {
        (SurdExpansion::new(d, 1, 2), OmegaForm::HalfOnePlusSqrtD, 2)
    } else {
        (SurdExpansion::new(d, 0, 1), OmegaForm::SqrtD, 1)
    }
}

/// First convergent `p/q` of `omega` whose norm is `+-1`.
///
/// For `omega = (P0 + sqrt d)/Q0`, `N(p_k - q_k omega) = (-1)^(k+1) Q_{k+1} / Q0`,
/// so the search stops when the state returns to `Q = Q0`.
pub fn fundamental_unit(d: u64) -> Result<FundamentalUnit, OracleError> {
    check_input(d)?;
    let (expansion, omega_form, q0) = expansion_for(d);
    let (mut h_prev, mut h) = (BigUint::zero(), BigUint::one());
    let (mut k_prev, mut k) = (BigUint::one(), BigUint::zero());
    let mut parity = 1i8;
    for (a, state) in expansion {
        let h_next = &h * a + &h_prev;
        let k_next = &k * a + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        parity = -parity;
        if state.q == q0 {
            break;
        }
    }
    // p - q omega is the small conjugate; eps is its conjugate.
    let (x, y) = match omega_form {
        OmegaForm::SqrtD => (h, k),
        OmegaForm::HalfOnePlusSqrtD => (&h - &k, k),
    };
    let unit = FundamentalUnit {
        d,
        x,
        y,
        omega_form,
        norm_sign: parity,
    };
    let norm = unit.norm();
    assert_eq!(norm, BigInt::from(unit.norm_sign), "norm identity for d={d}");
    Ok(unit)
}

pub fn divides_y(d: u64) -> Result<bool, OracleError> {
    fundamental_unit(d).map(|u| u.d_divides_y())
}

/// `y mod d` without forming the unit.
fn y_mod_d(d: u64) -> u64 {
    let (expansion, _, q0) = expansion_for(d);
    let m = d as u128;
    let (mut k_prev, mut k) = (1u128, 0u128);
    for (a, state) in expansion {
        let k_next = (k * (a as u128 % m) + k_prev) % m;
        k_prev = std::mem::replace(&mut k, k_next);
        if state.q == q0 {
            break;
        }
    }
    k as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanHit {
    pub d: u64,
    pub prime: bool,
    pub d_mod_4: u8,
    pub unit: FundamentalUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFilter {
    Squarefree,
    Primes3Mod4,
}

/// Every squarefree `d` in `lo..=hi` with `d | y`, ascending.
///
/// Candidates are found from `y mod d`; each hit is recomputed exactly and
/// its norm identity checked.
pub fn scan(lo: u64, hi: u64, filter: ScanFilter) -> Result<Vec<ScanHit>, OracleError> {
    if hi >= SCAN_LIMIT {
        return Err(OracleError::OutOfRange { value: hi, limit: SCAN_LIMIT });
    }
    let lo = lo.max(2);
    if lo > hi {
        return Ok(Vec::new());
    }
    let hits = (lo..=hi)
        .into_par_iter()
        .filter(|&d| match filter {
            ScanFilter::Squarefree => !is_square(d) && square_factor(d).is_none(),
            ScanFilter::Primes3Mod4 => d % 4 == 3 && arith::is_prime_u64(d),
        })
        .filter(|&d| y_mod_d(d) == 0)
        .map(|d| {
            let unit = fundamental_unit(d).expect("squarefree input");
            assert!(unit.d_divides_y(), "fast and exact paths disagree at d={d}");
            ScanHit {
                d,
                prime: arith::is_prime_u64(d),
                d_mod_4: (d % 4) as u8,
                unit,
            }
        })
        .collect();
    Ok(hits)
}

/// One convergent of `sqrt d` with the surd state after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub h: BigUint,
    pub k: BigUint,
    /// `Q_{index+1}` of the surd recursion.
    pub q_next: u64,
}

/// The first `count` convergents of `sqrt d`.
pub fn convergents(d: u64, count: usize) -> Result<Vec<Convergent>, OracleError> {
    if d < 2 {
        return Err(OracleError::TooSmall(d));
    }
    if is_square(d) {
        return Err(OracleError::PerfectSquare(d));
    }
    let (mut h_prev, mut h) = (BigUint::zero(), BigUint::one());
    let (mut k_prev, mut k) = (BigUint::one(), BigUint::zero());
    Ok(SurdExpansion::new(d, 0, 1)
        .take(count)
        .enumerate()
        .map(|(index, (a, state))| {
            let h_next = &h * a + &h_prev;
            let k_next = &k * a + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            Convergent {
                index,
                h: h.clone(),
                k: k.clone(),
                q_next: state.q,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: u64) -> (u64, u64, i8) {
        let u = fundamental_unit(d).unwrap();
        (
            u64::try_from(&u.x).unwrap(),
            u64::try_from(&u.y).unwrap(),
            u.norm_sign,
        )
    }

    #[test]
    fn expansions() {
        assert_eq!(cf_expand(2).unwrap(), ContinuedFraction { a0: 1, period: vec![2] });
        assert_eq!(cf_expand(46).unwrap().period.len(), 12);
        assert_eq!(cf_expand(4), Err(OracleError::PerfectSquare(4)));
        assert_eq!(cf_expand(1), Err(OracleError::TooSmall(1)));
    }

    #[test]
    fn known_units() {
        assert_eq!(unit(2), (1, 1, -1));
        assert_eq!(unit(46), (24335, 3588, 1));
        assert_eq!(3588 % 46, 0);
        assert_eq!(unit(5), (0, 1, -1));
        assert_eq!(unit(13), (1, 1, -1));
        assert_eq!(unit(21), (2, 1, 1));
        assert_eq!(unit(3), (2, 1, 1));
        assert_eq!(fundamental_unit(5).unwrap().omega_form, OmegaForm::HalfOnePlusSqrtD);
    }

    #[test]
    fn divides_y_examples() {
        assert!(divides_y(46).unwrap());
        assert!(!divides_y(2).unwrap());
        assert!(matches!(
            divides_y(39_028_039_587_479),
            Err(OracleError::OutOfRange { .. })
        ));
    }

    #[test]
    fn input_errors() {
        assert_eq!(fundamental_unit(4), Err(OracleError::PerfectSquare(4)));
        assert_eq!(fundamental_unit(12), Err(OracleError::NotSquarefree { d: 12, factor: 2 }));
        assert_eq!(fundamental_unit(1), Err(OracleError::TooSmall(1)));
        assert!(matches!(scan(2, SCAN_LIMIT, ScanFilter::Squarefree), Err(OracleError::OutOfRange { .. })));
    }

    #[test]
    fn small_scans() {
        let hits: Vec<u64> = scan(2, 100, ScanFilter::Squarefree).unwrap().iter().map(|h| h.d).collect();
        assert_eq!(hits, vec![46]);
        assert!(scan(2, 2, ScanFilter::Squarefree).unwrap().is_empty());
    }

    /// Smallest `y >= 1` admitting some `x >= 0` with norm `+-1`.
    fn brute_force_unit(d: u64) -> (u64, u64) {
        let d = d as i128;
        for y in 1i128.. {
            if d % 4 == 1 {
                // x^2 + x y - y^2 (d-1)/4 = +-1
                let c = y * y * (d - 1) / 4;
                for sign in [-1i128, 1] {
                    let disc = y * y + 4 * (c + sign);
                    if disc < 0 {
                        continue;
                    }
                    let r = isqrt_u64(disc as u64) as i128;
                    if r * r == disc && (r - y) >= 0 && (r - y) % 2 == 0 {
                        return (((r - y) / 2) as u64, y as u64);
                    }
                }
            } else {
                for sign in [-1i128, 1] {
                    let x2 = d * y * y + sign;
                    let r = isqrt_u64(x2 as u64) as i128;
                    if r * r == x2 {
                        return (r as u64, y as u64);
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn minimal_against_brute_force() {
        for d in (2..400u64).filter(|&d| fundamental_unit(d).is_ok()) {
            if u64::try_from(&fundamental_unit(d).unwrap().y).map(|y| y > 100_000).unwrap_or(true) {
                continue;
            }
            let (x, y, _) = unit(d);
            assert_eq!((x, y), brute_force_unit(d), "d={d}");
        }
    }

    #[test]
    fn fast_residue_path_matches_exact_path() {
        for d in (2..3000u64).filter(|&d| fundamental_unit(d).is_ok()) {
            let exact = fundamental_unit(d).unwrap();
            assert_eq!(BigUint::from(y_mod_d(d)), &exact.y % d, "d={d}");
        }
    }

    #[test]
    fn convergent_identity_on_samples() {
        for d in [2u64, 3, 7, 46, 94, 661, 99_991] {
            let len = cf_expand(d).unwrap().period.len();
            for c in convergents(d, 2 * len + 1).unwrap() {
                let lhs = BigInt::from(c.h.clone()).pow(2) - BigInt::from(d) * BigInt::from(c.k.clone()).pow(2);
                let sign = if c.index % 2 == 0 { -1 } else { 1 };
                assert_eq!(lhs, BigInt::from(sign * c.q_next as i64), "d={d}, k={}", c.index);
            }
        }
    }

    #[test]
    fn periods_are_palindromic() {
        (2..100_000u64).into_par_iter().filter(|&d| !is_square(d)).for_each(|d| {
            let cf = cf_expand(d).unwrap();
            let (last, body) = cf.period.split_last().unwrap();
            assert_eq!(*last, 2 * cf.a0, "d={d}");
            assert!(body.iter().eq(body.iter().rev()), "d={d}");
        });
    }
}
