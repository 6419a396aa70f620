//! Soft messages on binary variables.
//!
//! A [`SoftMessage`] is a probability mass function `(p0, p1)` on one bit.
//! The log-likelihood ratio form is `llr = ln(p0 / p1)`, so a positive LLR
//! favours 0.

use std::ops::{Deref, DerefMut};

use crate::bits::BinaryVector;

/// Floor applied to both probabilities after every normalization.
pub const PROB_CLIP: f64 = 1e-12;

/// Magnitude bound on LLRs inside the coupled-graph decoder.
pub const LLR_CLAMP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftMessage {
    pub p0: f64,
    pub p1: f64,
}

impl SoftMessage {
    pub const UNIFORM: SoftMessage = SoftMessage { p0: 0.5, p1: 0.5 };

    /// Normalizes a nonnegative pair and clips it away from 0 and 1.
    ///
    /// A pair with zero or non-finite mass carries no usable evidence and
    /// becomes uniform.
    #[inline]
    pub fn new(p0: f64, p1: f64) -> Self {
        let s = p0 + p1;
        if !(s > 0.0) || !s.is_finite() {
            return Self::UNIFORM;
        }
        // Clip the smaller mass so it stays at or above the floor exactly.
        if p0 <= p1 {
            let q0 = (p0 / s).max(PROB_CLIP);
            SoftMessage { p0: q0, p1: 1.0 - q0 }
        } else {
            let q1 = (p1 / s).max(PROB_CLIP);
            SoftMessage { p0: 1.0 - q1, p1: q1 }
        }
    }

    /// Message concentrated on `bit` (up to the clip).
    pub fn certain(bit: bool) -> Self {
        if bit {
            Self::new(0.0, 1.0)
        } else {
            Self::new(1.0, 0.0)
        }
    }

    #[inline]
    pub fn from_llr(llr: f64) -> Self {
        if llr.is_nan() {
            return Self::UNIFORM;
        }
        // p0 = 1 / (1 + e^{-llr}), evaluated without overflow on either side.
        let p0 = if llr >= 0.0 {
            1.0 / (1.0 + (-llr).exp())
        } else {
            let e = llr.exp();
            e / (1.0 + e)
        };
        Self::new(p0, 1.0 - p0)
    }

    #[inline]
    pub fn llr(&self) -> f64 {
        (self.p0 / self.p1).ln()
    }

    /// Hard decision; ties decide 0.
    #[inline]
    pub fn decide(&self) -> bool {
        self.p1 > self.p0
    }

    pub fn prob(&self, bit: bool) -> f64 {
        if bit {
            self.p1
        } else {
            self.p0
        }
    }

    /// Swaps the roles of 0 and 1.
    pub fn complement(&self) -> Self {
        SoftMessage {
            p0: self.p1,
            p1: self.p0,
        }
    }

    /// Binary entropy in bits.
    pub fn entropy(&self) -> f64 {
        binary_entropy(self.p0)
    }
}

impl Default for SoftMessage {
    fn default() -> Self {
        Self::UNIFORM
    }
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

#[inline]
pub fn clamp_llr(llr: f64) -> f64 {
    if llr.is_nan() {
        0.0
    } else {
        llr.clamp(-LLR_CLAMP, LLR_CLAMP)
    }
}

/// A vector of soft messages, one per position of an attached binary vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MessageVector(pub Vec<SoftMessage>);

impl MessageVector {
    pub fn uniform(len: usize) -> Self {
        MessageVector(vec![SoftMessage::UNIFORM; len])
    }

    /// Messages concentrated on the bits of `v`.
    pub fn certain(v: &BinaryVector) -> Self {
        MessageVector(v.iter().map(SoftMessage::certain).collect())
    }

    pub fn from_llrs(llrs: &[f64]) -> Self {
        MessageVector(llrs.iter().map(|&l| SoftMessage::from_llr(l)).collect())
    }

    pub fn llrs(&self) -> Vec<f64> {
        self.0.iter().map(SoftMessage::llr).collect()
    }

    pub fn hard_decision(&self) -> BinaryVector {
        BinaryVector::from_bools(self.0.iter().map(SoftMessage::decide))
    }

    /// Mean binary entropy in bits; zero for an empty vector.
    pub fn mean_entropy(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(SoftMessage::entropy).sum::<f64>() / self.0.len() as f64
    }
}

impl Deref for MessageVector {
    type Target = Vec<SoftMessage>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl DerefMut for MessageVector {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

impl From<Vec<SoftMessage>> for MessageVector {
    fn from(v: Vec<SoftMessage>) -> Self {
        MessageVector(v)
    }
}

impl FromIterator<SoftMessage> for MessageVector {
    fn from_iter<I: IntoIterator<Item = SoftMessage>>(iter: I) -> Self {
        MessageVector(iter.into_iter().collect())
    }
}
