//! Input-output weight enumeration and union-bound error prediction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::BinaryVector;
use crate::coset::HtCodeSpec;
use crate::error::{arg, Error, Result};

/// Largest dimension accepted by [`iowef`].
pub const IOWEF_MAX_K: usize = 24;

/// Input-output weight enumerating function `A(X, Y) = sum A_{w,d} X^w Y^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iowef {
    n: usize,
    k: usize,
    terms: BTreeMap<(usize, usize), u64>,
}

impl Iowef {
    /// Builds an enumerator from explicit terms, checking that they describe
    /// a linear `[n, k]` code: counts sum to `2^k` and `A_{0,0} = 1`.
    pub fn from_terms(
        n: usize,
        k: usize,
        terms: impl IntoIterator<Item = ((usize, usize), u64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((w, d), c) in terms {
            if w > k || d > n {
                return arg(format!("term X^{w}Y^{d} out of range for [{n},{k}]"));
            }
            if c > 0 {
                *map.entry((w, d)).or_insert(0) += c;
            }
        }
        let total: u64 = map.values().sum();
        if k >= 64 || total != 1u64 << k {
            return arg(format!("term counts sum to {total}, expected 2^{k}"));
        }
        if map.get(&(0, 0)) != Some(&1) {
            return arg("A_{0,0} must be 1");
        }
        Ok(Self { n, k, terms: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.terms
    }

    pub fn count(&self, w: usize, d: usize) -> u64 {
        self.terms.get(&(w, d)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Smallest nonzero output weight.
    pub fn min_distance(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter(|&&(w, _)| w > 0)
            .map(|&(_, d)| d)
            .min()
    }

    /// Polynomial text such as `1 + XY^4 + XY^8 + X^2Y^4`, terms ordered by
    /// input weight then output weight.
    pub fn polynomial(&self) -> String {
        let mut s = String::new();
        for (i, (&(w, d), &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            if (w, d) == (0, 0) {
                write!(s, "{c}").unwrap();
                continue;
            }
            if c != 1 {
                write!(s, "{c}").unwrap();
            }
            push_power(&mut s, 'X', w);
            push_power(&mut s, 'Y', d);
        }
        s
    }

    /// Bit error probability bound for BPSK on AWGN at `ebn0_db`:
    /// `(1/K) sum w A_{w,d} Q(sqrt(2 d R Eb/N0))`. Not clamped; it can
    /// exceed 1 at low SNR.
    pub fn union_bound_ber(&self, ebn0_db: f64) -> f64 {
        let gamma = db_to_linear(ebn0_db);
        let rate = self.k as f64 / self.n as f64;
        self.terms
            .iter()
            .filter(|&(&(w, _), _)| w > 0)
            .map(|(&(w, d), &c)| w as f64 * c as f64 * q_function((2.0 * d as f64 * rate * gamma).sqrt()))
            .sum::<f64>()
            / self.k as f64
    }

    /// Eb/N0 (dB) at which the union bound equals `target_ber`.
    pub fn required_ebn0(&self, target_ber: f64) -> Result<f64> {
        required_ebn0(self, target_ber)
    }
}

fn push_power(s: &mut String, var: char, e: usize) {
    match e {
        0 => {}
        1 => s.push(var),
        e => write!(s, "{var}^{e}").unwrap(),
    }
}

/// Exhaustive IOWEF over all `2^K` information words (Gray-code order, so
/// each step XORs one generator row).
pub fn iowef(spec: &HtCodeSpec) -> Result<Iowef> {
    let k = spec.k();
    if k > IOWEF_MAX_K {
        return Err(Error::Capability(format!(
            "IOWEF enumeration limited to K <= {IOWEF_MAX_K}, got {k}"
        )));
    }
    let rows = spec.generator_rows();
    let mut terms = BTreeMap::new();
    let mut cw = BinaryVector::zeros(spec.n());
    let mut gray = 0u64;
    terms.insert((0, 0), 1);
    for step in 1..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        gray ^= 1 << bit;
        cw.xor_assign(&rows[bit]);
        *terms
            .entry((gray.count_ones() as usize, cw.weight()))
            .or_insert(0) += 1;
    }
    Ok(Iowef {
        n: spec.n(),
        k,
        terms,
    })
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Free-function form of [`Iowef::union_bound_ber`].
pub fn union_bound_ber(iowef: &Iowef, ebn0_db: f64) -> f64 {
    iowef.union_bound_ber(ebn0_db)
}

/// Bracket searched by [`required_ebn0`], in dB.
pub const REQUIRED_EBN0_BRACKET: (f64, f64) = (-2.0, 15.0);

/// Bisection on Eb/N0 until the union bound is within a relative `1e-6` of
/// `target_ber`.
pub fn required_ebn0(iowef: &Iowef, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return arg(format!("target BER {target_ber} outside (0, 0.5)"));
    }
    let (mut lo, mut hi) = REQUIRED_EBN0_BRACKET;
    let f = |x: f64| iowef.union_bound_ber(x) - target_ber;
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::Numeric(format!(
            "union bound does not bracket {target_ber} on [{lo}, {hi}] dB: bound is {:.3e} .. {:.3e}",
            flo + target_ber,
            fhi + target_ber
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm / target_ber).abs() < 1e-6 {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A BER-versus-Eb/N0 curve with strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    points: Vec<(f64, f64)>,
}

impl BerCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return arg("BER curve abscissae must be strictly increasing");
            }
        }
        if let Some(&(_, b)) = points.iter().find(|&&(_, b)| !(0.0..=1.0).contains(&b)) {
            return arg(format!("BER value {b} outside [0, 1]"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// BER at `ebn0_db`, linear in log-BER between neighbouring points.
    /// `None` outside the sampled range or where a neighbour has zero BER.
    pub fn ber_at(&self, ebn0_db: f64) -> Option<f64> {
        let pts = &self.points;
        if let Some(&(_, b)) = pts.iter().find(|&&(x, _)| x == ebn0_db) {
            return Some(b);
        }
        let i = pts.windows(2).position(|w| w[0].0 < ebn0_db && ebn0_db < w[1].0)?;
        let ((x0, b0), (x1, b1)) = (pts[i], pts[i + 1]);
        if b0 <= 0.0 || b1 <= 0.0 {
            return None;
        }
        let t = (ebn0_db - x0) / (x1 - x0);
        Some((b0.ln() + t * (b1.ln() - b0.ln())).exp())
    }

    /// First Eb/N0 at which the curve crosses down through `target_ber`,
    /// interpolated linearly in log-BER.
    pub fn ebn0_at(&self, target_ber: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let ((x0, b0), (x1, b1)) = (w[0], w[1]);
            if b0 >= target_ber && b1 < target_ber && b0 > 0.0 && b1 > 0.0 {
                let t = (target_ber.ln() - b0.ln()) / (b1.ln() - b0.ln());
                Some(x0 + t * (x1 - x0))
            } else {
                None
            }
        })
    }
}
