//! Certificate checking for divisibility of the Pell unit coefficient.

pub mod arith;
mod decimal;
pub mod primality;
pub mod quadring;
pub mod ideal;
pub mod certificate;
pub mod verifier;
pub mod oracle;
pub mod cli;
