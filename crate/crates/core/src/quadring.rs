//! Arithmetic in `Z[sqrt d]` and its quotients `Z[sqrt d] / m`.

use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, CostTally};
use crate::decimal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("modulus {0} is below 2")]
    ModulusTooSmall(BigInt),
    #[error("operands live in different rings (modulus {left} vs {right}, d {left_d} vs {right_d})")]
    RingMismatch {
        left: BigInt,
        right: BigInt,
        left_d: BigInt,
        right_d: BigInt,
    },
    #[error("negative exponent {0}")]
    NegativeExponent(BigInt),
    #[error("empty relation list")]
    NoRelations,
}

/// `u + v sqrt(d)` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadInt {
    #[serde(with = "decimal")]
    pub u: BigInt,
    #[serde(with = "decimal")]
    pub v: BigInt,
    #[serde(with = "decimal")]
    pub d: BigInt,
}

impl QuadInt {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            d: d.into(),
        }
    }

    pub fn one(d: &BigInt) -> Self {
        Self::new(1, 0, d.clone())
    }

    /// `u^2 - d v^2`.
    pub fn norm(&self) -> BigInt {
        &self.u * &self.u - &self.d * &self.v * &self.v
    }

    pub fn conj(&self) -> Self {
        Self::new(self.u.clone(), -&self.v, self.d.clone())
    }

    pub fn reduce(&self, modulus: &BigInt) -> Result<QuadResidue, QuadError> {
        QuadResidue::new(self.u.clone(), self.v.clone(), self.d.clone(), modulus.clone())
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;

    fn mul(self, rhs: &QuadInt) -> QuadInt {
        assert_eq!(self.d, rhs.d, "QuadInt product across different d");
        QuadInt {
            u: &self.u * &rhs.u + &self.d * &self.v * &rhs.v,
            v: &self.u * &rhs.v + &self.v * &rhs.u,
            d: self.d.clone(),
        }
    }
}

/// `u + v sqrt(d)` modulo `m`, with `0 <= u, v < m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadResidue {
    #[serde(with = "decimal")]
    pub u: BigInt,
    #[serde(with = "decimal")]
    pub v: BigInt,
    #[serde(with = "decimal")]
    pub modulus: BigInt,
    #[serde(with = "decimal")]
    pub d_mod_m: BigInt,
}

impl QuadResidue {
    pub fn new(u: BigInt, v: BigInt, d: BigInt, modulus: BigInt) -> Result<Self, QuadError> {
        if modulus < BigInt::from(2) {
            return Err(QuadError::ModulusTooSmall(modulus));
        }
        Ok(Self {
            u: u.mod_floor(&modulus),
            v: v.mod_floor(&modulus),
            d_mod_m: d.mod_floor(&modulus),
            modulus,
        })
    }

    pub fn one(d: &BigInt, modulus: &BigInt) -> Result<Self, QuadError> {
        Self::new(BigInt::one(), BigInt::zero(), d.clone(), modulus.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    fn same_ring(&self, other: &Self) -> Result<(), QuadError> {
        if self.modulus != other.modulus || self.d_mod_m != other.d_mod_m {
            return Err(QuadError::RingMismatch {
                left: self.modulus.clone(),
                right: other.modulus.clone(),
                left_d: self.d_mod_m.clone(),
                right_d: other.d_mod_m.clone(),
            });
        }
        Ok(())
    }
}

/// Full ring product `(u u' + d v v', u v' + v u') mod m`.
pub fn quad_mul_mod(x: &QuadResidue, y: &QuadResidue) -> Result<QuadResidue, QuadError> {
    x.same_ring(y)?;
    let m = &x.modulus;
    let u = (&x.u * &y.u + &x.d_mod_m * &x.v * &y.v).mod_floor(m);
    let v = (&x.u * &y.v + &x.v * &y.u).mod_floor(m);
    Ok(QuadResidue {
        u,
        v,
        modulus: m.clone(),
        d_mod_m: x.d_mod_m.clone(),
    })
}

/// `x^n` by a most-significant-bit-first ladder; `x^0 = 1`.
pub fn quad_pow_mod(x: &QuadResidue, n: &BigInt) -> Result<QuadResidue, QuadError> {
    if n.is_negative() {
        return Err(QuadError::NegativeExponent(n.clone()));
    }
    let mut acc = QuadResidue {
        u: BigInt::one(),
        v: BigInt::zero(),
        modulus: x.modulus.clone(),
        d_mod_m: x.d_mod_m.clone(),
    };
    if n.is_zero() {
        return Ok(acc);
    }
    let bits = arith::binary_digits(n).expect("positive exponent");
    for bit in bits {
        acc = quad_mul_mod(&acc, &acc)?;
        if bit == 1 {
            acc = quad_mul_mod(&acc, x)?;
        }
    }
    Ok(acc)
}

/// One multiplication of the linear pass:
/// `u * a_k = u_quotient * d + u_residue` and
/// `v * a_k + u * b_k = v_quotient * d + v_residue`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearStep {
    /// 1-based index of the relation being multiplied in.
    pub k: usize,
    #[serde(with = "decimal")]
    pub u_in: BigInt,
    #[serde(with = "decimal")]
    pub v_in: BigInt,
    #[serde(with = "decimal")]
    pub a: BigInt,
    #[serde(with = "decimal")]
    pub b: BigInt,
    #[serde(with = "decimal")]
    pub u_quotient: BigInt,
    #[serde(with = "decimal")]
    pub u_residue: BigInt,
    #[serde(with = "decimal")]
    pub v_quotient: BigInt,
    #[serde(with = "decimal")]
    pub v_residue: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearPass {
    pub steps: Vec<LinearStep>,
    pub result: QuadResidue,
    /// `v` of the last step before reduction, as `quotient * d + residue`.
    #[serde(with = "decimal")]
    pub final_v_quotient: BigInt,
    pub costs: CostTally,
}

/// Accumulates `prod (a_i + b_i sqrt d)` in `Z[sqrt d] / d`.
///
/// Modulo `d` the term `d * v * b_k` vanishes, so each step only needs
/// `u <- u a_k` and `v <- v a_k + u b_k`. The first factor enters unreduced.
pub fn claim3_linear_pass(
    relations: &[(BigInt, BigInt)],
    d: &BigInt,
) -> Result<LinearPass, QuadError> {
    let ((a1, b1), rest) = relations.split_first().ok_or(QuadError::NoRelations)?;
    if *d < BigInt::from(2) {
        return Err(QuadError::ModulusTooSmall(d.clone()));
    }
    let mut costs = CostTally::new();
    let mut u = a1.clone();
    let mut v = b1.clone();
    let mut final_v_quotient = v.div_floor(d);
    let mut steps = Vec::with_capacity(rest.len());
    for (offset, (a, b)) in rest.iter().enumerate() {
        let new_u = costs.mul(&u, a);
        let va = costs.mul(&v, a);
        let ub = costs.mul(&u, b);
        let new_v = costs.add(&va, &ub);
        let (u_quotient, u_residue) = new_u.div_mod_floor(d);
        let (v_quotient, v_residue) = new_v.div_mod_floor(d);
        for q in [&u_quotient, &v_quotient] {
            if !q.is_zero() {
                let qd = costs.mul(q, d);
                let _ = costs.sub(&new_u, &qd);
            }
        }
        final_v_quotient = v_quotient.clone();
        steps.push(LinearStep {
            k: offset + 2,
            u_in: u.clone(),
            v_in: v.clone(),
            a: a.clone(),
            b: b.clone(),
            u_quotient,
            u_residue: u_residue.clone(),
            v_quotient,
            v_residue: v_residue.clone(),
        });
        u = u_residue;
        v = v_residue;
    }
    let result = QuadResidue::new(u, v, d.clone(), d.clone())?;
    Ok(LinearPass {
        steps,
        result,
        final_v_quotient,
        costs,
    })
}

fn product_of_powers(
    relations: &[(BigInt, BigInt)],
    d: &BigInt,
    modulus: &BigInt,
) -> Result<QuadResidue, QuadError> {
    let one = QuadResidue::one(d, modulus)?;
    let powers = relations
        .par_iter()
        .map(|(a, b)| {
            let base = QuadResidue::new(a.clone(), BigInt::one(), d.clone(), modulus.clone())?;
            quad_pow_mod(&base, b)
        })
        .collect::<Result<Vec<_>, _>>()?;
    powers.iter().try_fold(one, |acc, p| quad_mul_mod(&acc, p))
}

/// `prod (a_i + sqrt d)^(b_i) mod d`, computed directly with full exponents.
pub fn claim3_full_product(
    relations: &[(BigInt, BigInt)],
    d: &BigInt,
) -> Result<QuadResidue, QuadError> {
    product_of_powers(relations, d, d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonrationalCheck {
    pub residue: QuadResidue,
    pub nonrational: bool,
}

/// `prod (a_i + sqrt d)^(b_i) mod m`; a nonzero `sqrt d` coefficient shows
/// the product is not a rational integer.
pub fn claim4_nonrational_check(
    relations: &[(BigInt, BigInt)],
    modulus: &BigInt,
    d: &BigInt,
) -> Result<NonrationalCheck, QuadError> {
    let residue = product_of_powers(relations, d, modulus)?;
    let nonrational = !residue.is_rational();
    Ok(NonrationalCheck {
        residue,
        nonrational,
    })
}
