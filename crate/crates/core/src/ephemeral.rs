//! The ephemeral exchangeable measure on the simple random walk on ℤ: the
//! block coding of walks visiting each positive state exactly twice by
//! sequences over {1, 2}, and the golden product measure on codes.

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

const BLOCK_ONE: [i64; 2] = [1, 1];
const BLOCK_TWO: [i64; 4] = [1, 2, 1, 2];

fn block(d: u32) -> Result<&'static [i64]> {
    match d {
        1 => Ok(&BLOCK_ONE),
        2 => Ok(&BLOCK_TWO),
        _ => Err(Error::SymbolOutOfRange { symbol: d, alphabet: 3 }),
    }
}

/// Walk coded by `u`: blocks `(1,1)` or `(1,2,1,2)`, each raised by the sum
/// of the preceding code digits.
pub fn decode(u: &[u32]) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(4 * u.len());
    let mut s = 0i64;
    for &d in u {
        out.extend(block(d)?.iter().map(|x| x + s));
        s += d as i64;
    }
    Ok(out)
}

/// Peels complete blocks off `w`. Returns the code digits and the raw
/// remainder, which is a proper prefix of a block at the current offset.
pub fn encode(w: &[i64]) -> Result<(Vec<u32>, Vec<i64>)> {
    if let Some(&first) = w.first() {
        if first != 1 {
            return Err(Error::NotInZ(format!("walk starts at {first}, not 1")));
        }
    }
    let mut digits = Vec::new();
    let (mut pos, mut s) = (0usize, 0i64);
    while pos < w.len() {
        let rest: Vec<i64> = w[pos..].iter().map(|x| x - s).collect();
        if rest.starts_with(&BLOCK_ONE) {
            digits.push(1);
            pos += 2;
            s += 1;
        } else if rest.starts_with(&BLOCK_TWO) {
            digits.push(2);
            pos += 4;
            s += 2;
        } else if BLOCK_ONE.starts_with(&rest) || BLOCK_TWO.starts_with(&rest) {
            break;
        } else {
            return Err(Error::NotInZ(format!("no block fits at position {pos}")));
        }
    }
    Ok((digits, w[pos..].to_vec()))
}

/// `p = (√5 - 1)/2`, the root of `p + p² = 1` in (0, 1).
pub fn golden_p() -> ExactScalar {
    ExactScalar::quadratic(-1, 1, 5, 2).expect("5 is not a square")
}

/// `ν̄` of the cylinder of walks whose code starts with `u`: `p^{Σ u}`.
pub fn nu_bar_cylinder(u: &[u32]) -> Result<ExactScalar> {
    let mut total = 0u32;
    for &d in u {
        block(d)?;
        total += d;
    }
    Ok(golden_p().pow(total))
}

/// The ramp cylinder `(k, …, 2, 1, 1, 2, …, k)` followed by the walk coded
/// by `u` raised by `k`, and its `ν̄`-measure `p^{k + Σ u}`. Its walks are
/// finite rearrangements of those coded by `1^k u`.
pub fn nu_bar_ramp(k: u32, u: &[u32]) -> Result<(Vec<i64>, ExactScalar)> {
    if k == 0 {
        return Err(Error::OutOfRange("ramp height must be at least 1".into()));
    }
    let k64 = k as i64;
    let mut walk: Vec<i64> = (1..=k64).rev().chain(1..=k64).collect();
    walk.extend(decode(u)?.into_iter().map(|x| x + k64));
    let value = nu_bar_cylinder(u)? * golden_p().pow(k);
    Ok((walk, value))
}
