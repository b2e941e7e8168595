use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::NormRecord;

/// Relative slack allowed when comparing computed quantities that agree in exact arithmetic.
const SLACK: f64 = 1e-12;

/// Block recursion `c_n = c_{n-1} exp(-T p(c_{n-1}, d_{n-1}))`, `d_n` likewise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayEnvelope<T> {
    pub c_seq: Vec<T>,
    pub d_seq: Vec<T>,
    /// `p(c_k, d_k)` along the sequence.
    pub rates: Vec<T>,
    pub block_length: T,
    /// Largest violation of `c_k e^{-T(n-k) p_k} <= c_n` and `d_k e^{-T(n-k) p_k} >= d_n`
    /// over `k <= n`; zero when all hold.
    pub cross_bound_excess: T,
    /// `p(0, 0)`, the rate in the limit.
    pub p_origin: T,
}

fn slack<T: Scalar>(a: T, b: T) -> T {
    T::of(SLACK) * (T::one() + a.abs().max(b.abs()))
}

impl<T: Scalar> DecayEnvelope<T> {
    pub fn cross_bounds_hold(&self) -> bool {
        self.cross_bound_excess == T::zero()
    }

    /// Decay rate of `max(|c_n|, d_n)` over the last block.
    pub fn limit_rate(&self) -> T {
        let n = self.c_seq.len() - 1;
        let size = |k: usize| self.c_seq[k].abs().max(self.d_seq[k]);
        if n == 0 || size(n) == T::zero() {
            return T::zero();
        }
        (size(n) / size(n - 1)).ln() / self.block_length
    }
}

pub fn decay_envelope<T: Scalar>(
    c0: T,
    d0: T,
    p: &dyn Fn(T, T) -> T,
    block: T,
    n_blocks: usize,
) -> Result<DecayEnvelope<T>> {
    if !(c0 <= T::zero() && d0 >= T::zero()) {
        return Err(Error::Domain(format!("need c0 <= 0 <= d0, got c0 = {c0}, d0 = {d0}")));
    }
    if !(block > T::zero()) {
        return Err(Error::Domain(format!("block length must be positive, got {block}")));
    }
    let mut c_seq = vec![c0];
    let mut d_seq = vec![d0];
    let mut rates = Vec::with_capacity(n_blocks + 1);
    for n in 0..=n_blocks {
        let rate = p(c_seq[n], d_seq[n]);
        if !(rate >= T::zero()) {
            return Err(Error::InvalidRateFunction {
                block: n,
                previous: rates.last().copied().unwrap_or(rate).as_f64(),
                next: rate.as_f64(),
            });
        }
        if let Some(&prev) = rates.last() {
            if rate < prev - slack(prev, rate) {
                return Err(Error::InvalidRateFunction {
                    block: n,
                    previous: prev.as_f64(),
                    next: rate.as_f64(),
                });
            }
        }
        rates.push(rate);
        if n < n_blocks {
            let factor = (-block * rate).exp();
            c_seq.push(c_seq[n] * factor);
            d_seq.push(d_seq[n] * factor);
        }
    }
    let mut excess = T::zero();
    for n in 0..=n_blocks {
        for k in 0..=n {
            let factor = (-block * T::of_usize(n - k) * rates[k]).exp();
            let c_bound = c_seq[k] * factor;
            let d_bound = d_seq[k] * factor;
            let over_c = c_bound - c_seq[n] - slack(c_bound, c_seq[n]);
            let over_d = d_seq[n] - d_bound - slack(d_bound, d_seq[n]);
            excess = excess.max(over_c).max(over_d);
        }
    }
    Ok(DecayEnvelope {
        c_seq,
        d_seq,
        rates,
        block_length: block,
        cross_bound_excess: excess,
        p_origin: p(T::zero(), T::zero()),
    })
}

/// `p(c, d) = kappa_minus (theta + c)`, the rate function of the logistic equation.
pub fn logistic_rate<T: Scalar>(kappa_minus: T, theta: T) -> impl Fn(T, T) -> T {
    move |c, _| kappa_minus * (theta + c)
}

/// One row per block end `t = nT`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeRow<T> {
    pub t: T,
    pub lower: T,
    pub upper: T,
    pub min_deviation: T,
    pub max_deviation: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeCheck<T> {
    pub rows: Vec<EnvelopeRow<T>>,
    pub tol: T,
    pub holds: bool,
}

/// Checks `c_n - tol <= u_{nT} - theta <= d_n + tol` on dense norm records.
pub fn envelope_check<T: Scalar>(
    norms: &[NormRecord<T>],
    theta: T,
    envelope: &DecayEnvelope<T>,
    tol: T,
) -> Result<EnvelopeCheck<T>> {
    let mut rows = Vec::new();
    for (n, (&c, &d)) in envelope.c_seq.iter().zip(&envelope.d_seq).enumerate() {
        let t = envelope.block_length * T::of_usize(n);
        let rec = norms
            .iter()
            .find(|r| (r.t - t).abs() <= T::of(1e-9) * (T::one() + t))
            .ok_or(Error::Coverage {
                required: t.as_f64(),
                available: norms.last().map_or(0.0, |r| r.t.as_f64()),
            })?;
        rows.push(EnvelopeRow {
            t,
            lower: c,
            upper: d,
            min_deviation: rec.min - theta,
            max_deviation: rec.max - theta,
        });
    }
    let holds = rows
        .iter()
        .all(|r| r.min_deviation >= r.lower - tol && r.max_deviation <= r.upper + tol);
    Ok(EnvelopeCheck { rows, tol, holds })
}
