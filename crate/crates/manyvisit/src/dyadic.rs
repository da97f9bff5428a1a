//! Exact dyadic fixed-point arithmetic.
//!
//! Every `f64` is a dyadic rational, so a cost matrix can be scaled by a
//! power of two into `i128` without any rounding. All combinatorial
//! subroutines in this crate (trees, matchings, enumeration oracles) run
//! on these scaled integers, which makes "two independent routes computed
//! the same optimum" an exact integer comparison instead of a float one.

use crate::error::{Error, Result};

/// Largest supported scaling exponent. Costs that need a finer grid than
/// 2^-110 (for example 1e-300) are rejected rather than rounded.
pub const MAX_SHIFT: u32 = 110;

/// Scaled magnitudes must stay below 2^100 so that sums over a few
/// thousand terms and small constant multipliers stay inside `i128`.
pub const HEADROOM_BITS: u32 = 100;

/// Decompose a finite `f64` into `(m, e)` with `x = m * 2^e` exactly and
/// `m` odd (or zero).
fn decompose(x: f64) -> Option<(i128, i32)> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some((0, 0));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mut m, mut e) = if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1i128 << 52), exp_field - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    Some((sign * m, e))
}

/// Smallest shift s such that `x * 2^s` is an integer, or `None` if the
/// value is not finite or needs more than [`MAX_SHIFT`] bits.
pub fn required_shift(x: f64) -> Option<u32> {
    let (_, e) = decompose(x)?;
    if e >= 0 {
        Some(0)
    } else {
        let s = (-e) as u32;
        if s > MAX_SHIFT {
            None
        } else {
            Some(s)
        }
    }
}

/// Exact scaling: returns `x * 2^shift` as an integer, or `None` when the
/// result would not be an integer or would overflow the headroom budget.
pub fn scale_exact(x: f64, shift: u32) -> Option<i128> {
    let (m, e) = decompose(x)?;
    if m == 0 {
        return Some(0);
    }
    let s = e + shift as i32;
    if s < 0 {
        return None;
    }
    let bits = 128 - m.unsigned_abs().leading_zeros();
    if bits + s as u32 > 126 {
        return None;
    }
    Some(m << s)
}

/// Approximate inverse of [`scale_exact`] for reporting. Exact whenever
/// the scaled value fits in 53 bits.
pub fn unscale(v: i128, shift: u32) -> f64 {
    (v as f64) * (2f64).powi(-(shift as i32))
}

/// A symmetric cost matrix held exactly as integers at a common shift.
/// Diagonal entries are loop costs.
#[derive(Debug, Clone)]
pub struct DyadicCosts {
    n: usize,
    shift: u32,
    scaled: Vec<i128>,
}

impl DyadicCosts {
    /// Scale a row-major `n x n` matrix of finite costs. Fails when some
    /// entry is not exactly representable within [`MAX_SHIFT`] or the
    /// scaled magnitudes would exceed the headroom budget.
    pub fn from_costs(n: usize, costs: &[f64]) -> Result<Self> {
        if costs.len() != n * n {
            return Err(Error::Internal(format!(
                "cost slice has {} entries for n = {}",
                costs.len(),
                n
            )));
        }
        let mut shift = 0u32;
        for &c in costs {
            let s = required_shift(c).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "cost {c} cannot be scaled exactly (needs more than 2^-{MAX_SHIFT} resolution)"
                ))
            })?;
            shift = shift.max(s);
        }
        let mut scaled = Vec::with_capacity(costs.len());
        for &c in costs {
            let v = scale_exact(c, shift).ok_or_else(|| {
                Error::InvalidInput(format!("cost {c} overflows the exact integer range"))
            })?;
            if v.unsigned_abs() >= 1u128 << HEADROOM_BITS {
                return Err(Error::InvalidInput(format!(
                    "cost {c} spans too many binary orders of magnitude against the smallest cost"
                )));
            }
            scaled.push(v);
        }
        Ok(DyadicCosts { n, shift, scaled })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Scaled cost of the edge `{u, v}`; `u == v` is the loop cost.
    pub fn cost(&self, u: usize, v: usize) -> i128 {
        self.scaled[u * self.n + v]
    }

    pub fn cost_f64(&self, u: usize, v: usize) -> f64 {
        unscale(self.cost(u, v), self.shift)
    }

    pub fn to_f64(&self, v: i128) -> f64 {
        unscale(v, self.shift)
    }

    /// Largest scaled entry; used for big-M style constants.
    pub fn max_scaled(&self) -> i128 {
        self.scaled.iter().copied().max().unwrap_or(0)
    }
}
