//! Binary-input AWGN capacity, Shannon limits, and the encoding-memory
//! design procedure.

use std::sync::OnceLock;

use crate::coset::HtCodeSpec;
use crate::error::{arg, Error, Result};
use crate::hadamard::transform_order;
use crate::weight::{db_to_linear, iowef, linear_to_db};

/// Gauss-Hermite rule size used by [`biawgn_capacity`].
pub const HERMITE_NODES: usize = 128;

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `exp(-x^2)`, found by Newton iteration on the orthonormal recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (PIM4, 0.0f64);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn hermite_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(HERMITE_NODES))
}

/// `log2(1 + e^{-l})` without overflow.
fn log2_one_plus_exp_neg(l: f64) -> f64 {
    let nat = if l > 0.0 {
        (-l).exp().ln_1p()
    } else {
        -l + l.exp().ln_1p()
    };
    nat / std::f64::consts::LN_2
}

/// Capacity in bits per channel use of the binary-input AWGN channel with
/// antipodal unit-energy inputs at symbol SNR `Es/N0 = snr_linear`.
///
/// Uses `C = 1 - E[log2(1 + exp(-L))]` where the channel LLR of a
/// transmitted `+1` is `L ~ N(4 snr, 8 snr)`.
pub fn biawgn_capacity(snr_linear: f64) -> Result<f64> {
    if !(snr_linear > 0.0) || !snr_linear.is_finite() {
        return arg(format!("SNR must be positive and finite, got {snr_linear}"));
    }
    let (x, w) = hermite_rule();
    let mean = 4.0 * snr_linear;
    let scale = 4.0 * snr_linear.sqrt();
    let expect: f64 = x
        .iter()
        .zip(w)
        .map(|(&xi, &wi)| wi * log2_one_plus_exp_neg(mean + scale * xi))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt();
    Ok((1.0 - expect).clamp(0.0, 1.0))
}

/// Eb/N0 (dB) at which the BI-AWGN capacity equals `rate`.
pub fn shannon_limit(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return arg(format!("rate {rate} outside (0, 1)"));
    }
    let f = |db: f64| biawgn_capacity(rate * db_to_linear(db)).map(|c| c - rate);
    // Below -1.6 dB even unconstrained inputs cannot carry `rate` bits.
    let (mut lo, mut hi) = (-1.7, 40.0);
    if !(f(lo)? < 0.0 && f(hi)? > 0.0) {
        return Err(Error::Numeric(format!("no Shannon limit bracket for rate {rate}")));
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Unrounded memory `10^{gap/10} - 1`.
pub fn memory_estimate(gamma_db: f64, gamma_star_db: f64) -> f64 {
    db_to_linear(gamma_db - gamma_star_db) - 1.0
}

/// Encoding memory whose superposition gain `10 log10(1 + m)` closes the gap
/// between `gamma_db` and `gamma_star_db`, rounded to nearest with halves
/// away from zero. Zero when there is no gap.
pub fn required_memory(gamma_db: f64, gamma_star_db: f64) -> u32 {
    if gamma_db <= gamma_star_db {
        return 0;
    }
    memory_estimate(gamma_db, gamma_star_db).round().max(0.0) as u32
}

/// One rate of the memory design table.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub k: usize,
    pub rate: f64,
    pub gamma_star_db: f64,
    pub gamma_db: f64,
    pub gap_db: f64,
    pub memory: u32,
}

impl DesignRow {
    /// Superposition gain `10 log10(1 + m)` of the chosen memory.
    pub fn memory_gain_db(&self) -> f64 {
        linear_to_db(1.0 + f64::from(self.memory))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignTable {
    pub n: usize,
    pub target_ber: f64,
    pub rows: Vec<DesignRow>,
}

impl DesignTable {
    /// Number of interleavers the shared encoder needs.
    pub fn max_memory(&self) -> u32 {
        self.rows.iter().map(|r| r.memory).max().unwrap_or(0)
    }
}

/// Design row for the `[n, k]` code at `target_ber`.
pub fn design_row(n: usize, k: usize, target_ber: f64) -> Result<DesignRow> {
    let spec = HtCodeSpec::new(n, k)?;
    let gamma_db = iowef(&spec)?.required_ebn0(target_ber)?;
    let rate = spec.rate();
    let gamma_star_db = shannon_limit(rate)?;
    Ok(DesignRow {
        k,
        rate,
        gamma_star_db,
        gamma_db,
        gap_db: gamma_db - gamma_star_db,
        memory: required_memory(gamma_db, gamma_star_db),
    })
}

/// Rows for `K = 1..N` of the length-`n` family.
pub fn design_table(n: usize, target_ber: f64) -> Result<DesignTable> {
    transform_order(n)?;
    let rows = (1..n)
        .map(|k| design_row(n, k, target_ber))
        .collect::<Result<Vec<_>>>()?;
    Ok(DesignTable { n, target_ber, rows })
}
