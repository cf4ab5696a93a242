//! Structured code packing a 2-D integer constellation point into one real
//! integer, `s = u + c·v`, so a single real stream carries both coordinates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameter: Q={q}, c={c} (need Q >= 1 and c >= 2Q+1)")]
    Param { q: i64, c: i64 },
    #[error("point ({u}, {v}) outside the constellation for Q={q}")]
    Domain { u: i64, v: i64, q: i64 },
    #[error("{0} is not a codeword")]
    Decode(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstellationParam {
    q: i64,
    c: i64,
}

impl ConstellationParam {
    pub fn new(q: i64, c: i64) -> Result<Self, CodeError> {
        if q < 1 || c < 2 * q + 1 {
            return Err(CodeError::Param { q, c });
        }
        Ok(ConstellationParam { q, c })
    }

    /// Tightest packing, `c = 2Q + 1`.
    pub fn with_q(q: i64) -> Result<Self, CodeError> {
        Self::new(q, 2 * q + 1)
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    fn contains(&self, x: i64) -> bool {
        x != 0 && x.abs() <= self.q
    }

    /// All legal points, `v`-major, each coordinate ascending.
    pub fn points(&self) -> impl Iterator<Item = ConstellationPoint> + '_ {
        let axis: Vec<i64> = (-self.q..=self.q).filter(|&x| x != 0).collect();
        let axis2 = axis.clone();
        axis.into_iter().flat_map(move |v| {
            axis2
                .clone()
                .into_iter()
                .map(move |u| ConstellationPoint { u, v })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstellationPoint {
    pub u: i64,
    pub v: i64,
}

pub fn encode(p: ConstellationPoint, param: &ConstellationParam) -> Result<i64, CodeError> {
    if !param.contains(p.u) || !param.contains(p.v) {
        return Err(CodeError::Domain {
            u: p.u,
            v: p.v,
            q: param.q,
        });
    }
    Ok(p.u + param.c * p.v)
}

pub fn decode(s: i64, param: &ConstellationParam) -> Result<ConstellationPoint, CodeError> {
    let c = param.c;
    // v = round(s / c); |u| <= Q < c/2 keeps the rounding unambiguous.
    let v = (2 * s + c).div_euclid(2 * c);
    let u = s - c * v;
    if !param.contains(u) || !param.contains(v) {
        return Err(CodeError::Decode(s));
    }
    Ok(ConstellationPoint { u, v })
}

/// All codewords in ascending order.
pub fn codebook(param: &ConstellationParam) -> Vec<i64> {
    let mut out: Vec<i64> = param
        .points()
        .map(|p| encode(p, param).expect("points are legal"))
        .collect();
    out.sort_unstable();
    out
}

/// Codeword closest to a noisy real estimate; `book` must come from
/// [`codebook`]. Ties go to the smaller codeword.
pub fn nearest_codeword(x: f64, book: &[i64]) -> i64 {
    let i = book.partition_point(|&s| (s as f64) < x);
    match (i.checked_sub(1).map(|j| book[j]), book.get(i)) {
        (Some(lo), Some(&hi)) => {
            if x - lo as f64 <= hi as f64 - x {
                lo
            } else {
                hi
            }
        }
        (Some(lo), None) => lo,
        (None, Some(&hi)) => hi,
        (None, None) => panic!("empty codebook"),
    }
}

/// Peak power of a codeword, `(cQ)² + Q²`.
pub fn power_constraint(param: &ConstellationParam) -> f64 {
    let (q, c) = (param.q as f64, param.c as f64);
    (c * q).powi(2) + q * q
}
