//! The binary Hadamard transform, its butterfly network, and soft-in
//! soft-out processing over that network.
//!
//! `H_2 = [[1, 1], [0, 1]]` and `H_N = [[H, H], [0, H]]`, so entry `(r, c)`
//! of `H_N` is 1 exactly when the bits of `r` are a subset of the bits of
//! `c`. Stage `s` of the fast transform pairs indices `j < j'` that differ
//! only in bit `s` and maps `(a, b)` to `(a, a + b)`.

use crate::bits::BinaryVector;
use crate::error::{arg, Error, Result};
use crate::message::{MessageVector, SoftMessage};

/// Largest length accepted by [`exact_extrinsic`].
pub const EXACT_EXTRINSIC_MAX_LEN: usize = 16;

/// Two indices whose binary expansions differ only in bit `stage`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ButterflyPair {
    pub j: usize,
    pub j_prime: usize,
    pub stage: u32,
}

/// Returns `p` such that `len == 2^p`, rejecting lengths below 2.
pub fn transform_order(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return arg(format!("length {len} is not a power of two >= 2"));
    }
    Ok(len.trailing_zeros())
}

/// All `stage`-complementary pairs of `{0, .., 2^p - 1}`, ascending in `j`.
pub fn complementary_pairs(p: u32, stage: u32) -> Result<Vec<ButterflyPair>> {
    if stage >= p {
        return arg(format!("stage {stage} out of range for p = {p}"));
    }
    if p >= usize::BITS {
        return arg(format!("p = {p} too large"));
    }
    let bit = 1usize << stage;
    Ok((0..1usize << p)
        .filter(|j| j & bit == 0)
        .map(|j| ButterflyPair {
            j,
            j_prime: j | bit,
            stage,
        })
        .collect())
}

/// The `2^p x 2^p` binary Hadamard matrix as a list of rows.
pub fn hadamard_matrix(p: u32) -> Result<Vec<BinaryVector>> {
    if p < 1 {
        return arg("hadamard_matrix requires p >= 1");
    }
    if p > 16 {
        return Err(Error::Capability(format!("explicit matrix for p = {p} is too large")));
    }
    let n = 1usize << p;
    Ok((0..n)
        .map(|r| BinaryVector::from_bools((0..n).map(|c| r & c == r)))
        .collect())
}

/// Hamming weight of row `r` of `H_{2^p}`.
pub fn row_weight(p: u32, r: usize) -> usize {
    1usize << (p - r.count_ones())
}

const STAGE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Forward transform of the low `2^p` bits of a single word.
#[inline]
pub(crate) fn fht_word(mut w: u64, p: u32) -> u64 {
    for (s, mask) in STAGE_MASKS.iter().enumerate().take(p as usize) {
        w ^= (w & mask) << (1u32 << s);
    }
    w
}

/// In-place transform of a packed vector of length `2^p`.
pub(crate) fn fht_words(words: &mut [u64], p: u32) {
    for s in 0..p.min(6) {
        let mask = STAGE_MASKS[s as usize];
        let shift = 1u32 << s;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    for s in 6..p {
        let bit = 1usize << (s - 6);
        for wj in 0..words.len() {
            if wj & bit == 0 {
                let a = words[wj];
                words[wj | bit] ^= a;
            }
        }
    }
}

/// `u H_N` over GF(2), computed with `p` stages of butterflies.
///
/// The transform is an involution: applying it twice returns `u`.
pub fn fht(u: &BinaryVector) -> Result<BinaryVector> {
    let p = transform_order(u.len())?;
    let mut out = u.clone();
    fht_words(out.words_mut(), p);
    Ok(out)
}

/// Exact extrinsic messages on both sides of the transform by enumerating
/// all `2^N` input vectors.
///
/// The message for position `j` excludes the prior on that position, so it
/// does not change when only that prior changes.
pub fn exact_extrinsic(
    prior_u0: &[SoftMessage],
    prior_up: &[SoftMessage],
) -> Result<(MessageVector, MessageVector)> {
    let n = prior_u0.len();
    if prior_up.len() != n {
        return arg(format!(
            "prior lengths differ: {} vs {}",
            prior_u0.len(),
            prior_up.len()
        ));
    }
    let p = transform_order(n)?;
    if n > EXACT_EXTRINSIC_MAX_LEN {
        return Err(Error::Capability(format!(
            "exact extrinsic enumeration limited to N <= {EXACT_EXTRINSIC_MAX_LEN}, got {n}"
        )));
    }

    let mut acc_u0 = vec![[0.0f64; 2]; n];
    let mut acc_up = vec![[0.0f64; 2]; n];
    let (mut pre0, mut suf0) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut prep, mut sufp) = (vec![0.0; n + 1], vec![0.0; n + 1]);

    for u0 in 0..(1u64 << n) {
        let up = fht_word(u0, p);
        let full_u0 = prior_products(u0, prior_u0, &mut pre0, &mut suf0);
        let full_up = prior_products(up, prior_up, &mut prep, &mut sufp);
        for k in 0..n {
            acc_u0[k][((u0 >> k) & 1) as usize] += full_up * pre0[k] * suf0[k + 1];
            acc_up[k][((up >> k) & 1) as usize] += full_u0 * prep[k] * sufp[k + 1];
        }
    }

    let finish = |acc: Vec<[f64; 2]>| acc.into_iter().map(|[a, b]| SoftMessage::new(a, b)).collect();
    Ok((finish(acc_u0), finish(acc_up)))
}

/// Prefix and suffix products of `priors` evaluated at the bits of `word`;
/// returns the full product.
fn prior_products(word: u64, priors: &[SoftMessage], pre: &mut [f64], suf: &mut [f64]) -> f64 {
    let n = priors.len();
    pre[0] = 1.0;
    for k in 0..n {
        pre[k + 1] = pre[k] * priors[k].prob((word >> k) & 1 == 1);
    }
    suf[n] = 1.0;
    for k in (0..n).rev() {
        suf[k] = suf[k + 1] * priors[k].prob((word >> k) & 1 == 1);
    }
    pre[n]
}

#[inline]
fn xor_convolve(a: SoftMessage, b: SoftMessage) -> (f64, f64) {
    (a.p0 * b.p0 + a.p1 * b.p1, a.p0 * b.p1 + a.p1 * b.p0)
}

/// Reusable state for the iterative forward-backward SISO processor on the
/// butterfly network of `H_N`.
///
/// Every stage boundary `s = 0..=p` carries two message arrays: the
/// left-to-right (forward) messages and the right-to-left (backward) ones.
/// The forward messages at boundary 0 are the priors on `U_0`; the backward
/// messages at boundary `p` are the priors on `U_p`. All other messages start
/// uniform on each run.
#[derive(Debug, Clone)]
pub struct HadamardSiso {
    p: u32,
    n: usize,
    fwd: Vec<SoftMessage>,
    bwd: Vec<SoftMessage>,
}

impl HadamardSiso {
    pub fn new(n: usize) -> Result<Self> {
        let p = transform_order(n)?;
        let len = (p as usize + 1) * n;
        Ok(Self {
            p,
            n,
            fwd: vec![SoftMessage::UNIFORM; len],
            bwd: vec![SoftMessage::UNIFORM; len],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn order(&self) -> u32 {
        self.p
    }

    /// Runs `iterations` rounds of a full backward sweep followed by a full
    /// forward sweep, writing the extrinsic messages on `U_0` and `U_p`.
    ///
    /// Slice lengths must all equal `N`; `iterations` must be at least 1.
    pub fn run(
        &mut self,
        prior_u0: &[SoftMessage],
        prior_up: &[SoftMessage],
        iterations: usize,
        ext_u0: &mut [SoftMessage],
        ext_up: &mut [SoftMessage],
    ) {
        let n = self.n;
        let p = self.p as usize;
        debug_assert!(iterations >= 1);
        debug_assert!(prior_u0.len() == n && prior_up.len() == n);
        debug_assert!(ext_u0.len() == n && ext_up.len() == n);

        self.fwd.fill(SoftMessage::UNIFORM);
        self.bwd.fill(SoftMessage::UNIFORM);
        self.fwd[..n].copy_from_slice(prior_u0);
        self.bwd[p * n..].copy_from_slice(prior_up);

        for _ in 0..iterations {
            for s in (0..p).rev() {
                let left = &self.fwd[s * n..(s + 1) * n];
                let (lo, hi) = self.bwd.split_at_mut((s + 1) * n);
                let out = &mut lo[s * n..];
                let right = &hi[..n];
                backward_stage(s as u32, left, right, out);
            }
            for s in 0..p {
                let right = &self.bwd[(s + 1) * n..(s + 2) * n];
                let (lo, hi) = self.fwd.split_at_mut((s + 1) * n);
                let left = &lo[s * n..];
                let out = &mut hi[..n];
                forward_stage(s as u32, left, right, out);
            }
        }

        ext_u0.copy_from_slice(&self.bwd[..n]);
        ext_up.copy_from_slice(&self.fwd[p * n..]);
    }
}

/// Messages toward `U_s` from the stage-`s` butterflies.
#[inline]
fn backward_stage(s: u32, left: &[SoftMessage], right: &[SoftMessage], out: &mut [SoftMessage]) {
    let bit = 1usize << s;
    let n = left.len();
    for block in (0..n).step_by(2 * bit) {
        for j in block..block + bit {
            let jp = j + bit;
            let (x0, x1) = xor_convolve(left[jp], right[jp]);
            out[j] = SoftMessage::new(right[j].p0 * x0, right[j].p1 * x1);
            let (y0, y1) = (left[j].p0 * right[j].p0, left[j].p1 * right[j].p1);
            let r = right[jp];
            out[jp] = SoftMessage::new(y0 * r.p0 + y1 * r.p1, y0 * r.p1 + y1 * r.p0);
        }
    }
}

/// Messages toward `U_{s+1}` from the stage-`s` butterflies.
#[inline]
fn forward_stage(s: u32, left: &[SoftMessage], right: &[SoftMessage], out: &mut [SoftMessage]) {
    let bit = 1usize << s;
    let n = left.len();
    for block in (0..n).step_by(2 * bit) {
        for j in block..block + bit {
            let jp = j + bit;
            let (x0, x1) = xor_convolve(right[jp], left[jp]);
            out[j] = SoftMessage::new(left[j].p0 * x0, left[j].p1 * x1);
            let (y0, y1) = (left[j].p0 * right[j].p0, left[j].p1 * right[j].p1);
            let l = left[jp];
            out[jp] = SoftMessage::new(y0 * l.p0 + y1 * l.p1, y0 * l.p1 + y1 * l.p0);
        }
    }
}

/// Iterative SISO processing over the butterfly network; see [`HadamardSiso`].
pub fn siso_fht(
    prior_u0: &[SoftMessage],
    prior_up: &[SoftMessage],
    iterations: usize,
) -> Result<(MessageVector, MessageVector)> {
    if iterations < 1 {
        return arg("SISO needs at least one iteration");
    }
    if prior_u0.len() != prior_up.len() {
        return arg(format!(
            "prior lengths differ: {} vs {}",
            prior_u0.len(),
            prior_up.len()
        ));
    }
    let n = prior_u0.len();
    let mut siso = HadamardSiso::new(n)?;
    let mut ext_u0 = MessageVector::uniform(n);
    let mut ext_up = MessageVector::uniform(n);
    siso.run(prior_u0, prior_up, iterations, &mut ext_u0, &mut ext_up);
    Ok((ext_u0, ext_up))
}
