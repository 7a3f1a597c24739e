//! Closed-form counting bounds in exact integer arithmetic.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("rising factorial needs E >= 1 and n >= 1")]
    BadRisingFactorial,
    #[error("h_n is defined for n >= 2")]
    BadHn,
    #[error("degree check needs at least n*d + 2 distinct sample values")]
    TooFewSamples,
}

/// `E (E+1) ... (E+n-1)`: the number of maximal cells.
pub fn rising_factorial(e: u64, n: u64) -> Result<BigInt, BoundsError> {
    if e == 0 || n == 0 {
        return Err(BoundsError::BadRisingFactorial);
    }
    let mut acc = BigInt::one();
    for k in 0..n {
        acc *= BigInt::from(e + k);
    }
    Ok(acc)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `2^n * binom(n^2, n) * (2n^2 - n)`: hyperplanes contributed per
/// maximal cell.
pub fn h_n(n: u64) -> Result<BigInt, BoundsError> {
    if n < 2 {
        return Err(BoundsError::BadHn);
    }
    Ok((BigInt::one() << n) * binomial(n * n, n) * BigInt::from(2 * n * n - n))
}

/// Upper bound for the number of faces of `k` hyperplanes in dimension
/// `d`: `sum_i 2^i binom(k, i)`.
pub fn face_bound(d: u64, k: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=d {
        acc += (BigInt::one() << i) * binomial(k, i);
    }
    acc
}

/// `9 E^2 - 5 E - 1`: the two-point isotopy-type bound.
pub fn n2_isotopy_bound(e: u64) -> Result<BigInt, BoundsError> {
    if e == 0 {
        return Err(BoundsError::BadRisingFactorial);
    }
    let e = BigInt::from(e);
    Ok(BigInt::from(9) * &e * &e - BigInt::from(5) * &e - BigInt::one())
}

/// `9 binom(E,2) + 2E - 1`: the two-point critical-value bound.
pub fn n2_critical_bound(e: u64) -> Result<BigInt, BoundsError> {
    if e == 0 {
        return Err(BoundsError::BadRisingFactorial);
    }
    Ok(BigInt::from(9) * binomial(e, 2) + BigInt::from(2 * e) - BigInt::one())
}

/// Exact degree of the polynomial interpolating `(x_i, y_i)` via divided
/// differences (the highest order with a nonzero coefficient).
fn interpolation_degree(xs: &[Rational], ys: &[Rational]) -> usize {
    let n = xs.len();
    let mut table: Vec<Rational> = ys.to_vec();
    let mut degree = 0;
    for order in 1..n {
        for i in 0..n - order {
            let num = &table[i + 1] - &table[i];
            let den = &xs[i + order] - &xs[i];
            table[i] = num / den;
        }
        table.truncate(n - order);
        if table.iter().any(|v| !v.is_zero()) {
            degree = order;
        }
    }
    degree
}

/// Fits the exact polynomial through `(E, face_bound(d, h_n * E^{rising n}))`
/// over the sample edge counts and returns its degree.
pub fn degree_check(e_samples: &[u64], n: u64, d: u64) -> Result<usize, BoundsError> {
    let needed = (n * d + 2) as usize;
    let mut samples: Vec<u64> = e_samples.to_vec();
    samples.sort_unstable();
    samples.dedup();
    if samples.len() < needed {
        return Err(BoundsError::TooFewSamples);
    }
    let hn = h_n(n)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &e in &samples {
        let k = &hn * rising_factorial(e, n)?;
        let k_u64: u64 = (&k).try_into().map_err(|_| BoundsError::TooFewSamples)?;
        xs.push(Rational::from_integer(BigInt::from(e)));
        ys.push(Rational::from_integer(face_bound(d, k_u64)));
    }
    Ok(interpolation_degree(&xs, &ys))
}

/// Every closed-form bound for one `(E, n, d)` triple.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub edges: u64,
    pub n: u64,
    pub d: u64,
    pub rising_factorial: String,
    pub h_n: String,
    pub hyperplane_count: String,
    pub face_bound: String,
    pub n2_critical_bound: String,
    pub n2_isotopy_bound: String,
}

pub fn bound_report(e: u64, n: u64, d: u64) -> Result<BoundReport, BoundsError> {
    let rf = rising_factorial(e, n)?;
    let hn = h_n(n)?;
    let hyperplanes = &hn * &rf;
    let k_u64: u64 = (&hyperplanes)
        .try_into()
        .map_err(|_| BoundsError::TooFewSamples)?;
    Ok(BoundReport {
        edges: e,
        n,
        d,
        rising_factorial: rf.to_string(),
        h_n: hn.to_string(),
        hyperplane_count: hyperplanes.to_string(),
        face_bound: face_bound(d, k_u64).to_string(),
        n2_critical_bound: n2_critical_bound(e)?.to_string(),
        n2_isotopy_bound: n2_isotopy_bound(e)?.to_string(),
    })
}
