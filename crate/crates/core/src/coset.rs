//! Multiple-rate HT-coset codes.
//!
//! An `[N, K]` code pads its `K` information bits with `N - K` frozen zeros,
//! places them on the rows of `H_N` in RM-rule order, and transforms. All
//! dimensions `1..N` of one length share the encoder and the decoder; only
//! the number of active rows changes.

use crate::bits::BinaryVector;
use crate::error::{arg, Error, Result};
use crate::hadamard::{fht_words, row_weight, transform_order, HadamardSiso};
use crate::message::{MessageVector, SoftMessage};

/// Largest dimension accepted by [`map_decode_oracle`].
pub const MAP_MAX_K: usize = 20;

/// Row order of `H_{2^p}` by descending Hamming weight, ties kept in
/// ascending row index. Entry `i` is the row that carries input position `i`.
pub fn rm_permutation(p: u32) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..1usize << p).collect();
    rows.sort_by_key(|&r| std::cmp::Reverse(row_weight(p, r)));
    rows
}

/// One member `[N, K]` of the HT-coset family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtCodeSpec {
    p: u32,
    n: usize,
    k: usize,
    perm: Vec<usize>,
}

impl HtCodeSpec {
    /// `[n, k]` code with the RM-rule row order.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let p = transform_order(n)?;
        Self::with_permutation(n, k, rm_permutation(p))
    }

    /// `[n, k]` code with an explicit row order.
    pub fn with_permutation(n: usize, k: usize, perm: Vec<usize>) -> Result<Self> {
        let p = transform_order(n)?;
        if k < 1 || k >= n {
            return arg(format!("dimension K = {k} outside 1..={}", n - 1));
        }
        if perm.len() != n {
            return arg(format!("permutation has length {}, expected {n}", perm.len()));
        }
        let mut seen = vec![false; n];
        for &r in &perm {
            if r >= n || std::mem::replace(&mut seen[r], true) {
                return arg("row order is not a permutation");
            }
        }
        Ok(Self { p, n, k, perm })
    }

    pub fn order(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Rows of `H_N` carrying information, in input order.
    pub fn active_rows(&self) -> &[usize] {
        &self.perm[..self.k]
    }

    /// Generator rows: codeword contributed by each information bit.
    pub fn generator_rows(&self) -> Vec<BinaryVector> {
        self.active_rows()
            .iter()
            .map(|&r| {
                let mut e = BinaryVector::zeros(self.n);
                e.set(r, true);
                fht_words(e.words_mut(), self.p);
                e
            })
            .collect()
    }

    /// Zero padding, permutation onto rows, then the fast transform.
    pub fn encode(&self, u: &BinaryVector) -> Result<BinaryVector> {
        if u.len() != self.k {
            return arg(format!("information length {} != K = {}", u.len(), self.k));
        }
        let mut padded = BinaryVector::zeros(self.n);
        for (i, &row) in self.active_rows().iter().enumerate() {
            if u.get(i) {
                padded.set(row, true);
            }
        }
        fht_words(padded.words_mut(), self.p);
        Ok(padded)
    }

    /// Inverse of [`encode`](Self::encode) on codewords; `None` if `v` is not
    /// a codeword.
    pub fn unencode(&self, v: &BinaryVector) -> Option<BinaryVector> {
        if v.len() != self.n {
            return None;
        }
        let mut u0 = v.clone();
        fht_words(u0.words_mut(), self.p);
        if self.perm[self.k..].iter().any(|&r| u0.get(r)) {
            return None;
        }
        Some(BinaryVector::from_bools(self.active_rows().iter().map(|&r| u0.get(r))))
    }
}

/// Reusable SISO decoder for one code: frozen inputs are pinned to 0 and the
/// row order is applied around the butterfly network.
#[derive(Debug, Clone)]
pub struct HtSisoDecoder {
    spec: HtCodeSpec,
    siso: HadamardSiso,
    prior_u0: Vec<SoftMessage>,
    ext_u0: Vec<SoftMessage>,
}

impl HtSisoDecoder {
    pub fn new(spec: HtCodeSpec) -> Self {
        let n = spec.n;
        let mut prior_u0 = vec![SoftMessage::UNIFORM; n];
        for &r in &spec.perm[spec.k..] {
            prior_u0[r] = SoftMessage::certain(false);
        }
        Self {
            siso: HadamardSiso::new(n).expect("spec length is a power of two"),
            spec,
            prior_u0,
            ext_u0: vec![SoftMessage::UNIFORM; n],
        }
    }

    pub fn spec(&self) -> &HtCodeSpec {
        &self.spec
    }

    /// Slice-level decode; `prior_v`/`ext_v` have length `N`,
    /// `prior_u`/`ext_u` length `K`.
    pub fn decode_into(
        &mut self,
        prior_v: &[SoftMessage],
        prior_u: &[SoftMessage],
        iterations: usize,
        ext_u: &mut [SoftMessage],
        ext_v: &mut [SoftMessage],
    ) {
        for (&row, &m) in self.spec.perm[..self.spec.k].iter().zip(prior_u) {
            self.prior_u0[row] = m;
        }
        self.siso
            .run(&self.prior_u0, prior_v, iterations, &mut self.ext_u0, ext_v);
        for (out, &row) in ext_u.iter_mut().zip(&self.spec.perm[..self.spec.k]) {
            *out = self.ext_u0[row];
        }
    }
}

/// Extrinsic messages on the information bits and the coded bits.
pub fn siso_decode(
    spec: &HtCodeSpec,
    prior_v: &[SoftMessage],
    prior_u: &[SoftMessage],
    iterations: usize,
) -> Result<(MessageVector, MessageVector)> {
    if prior_v.len() != spec.n {
        return arg(format!("prior_v length {} != N = {}", prior_v.len(), spec.n));
    }
    if prior_u.len() != spec.k {
        return arg(format!("prior_u length {} != K = {}", prior_u.len(), spec.k));
    }
    if iterations < 1 {
        return arg("SISO needs at least one iteration");
    }
    let mut dec = HtSisoDecoder::new(spec.clone());
    let mut ext_u = MessageVector::uniform(spec.k);
    let mut ext_v = MessageVector::uniform(spec.n);
    dec.decode_into(prior_v, prior_u, iterations, &mut ext_u, &mut ext_v);
    Ok((ext_u, ext_v))
}

/// Exhaustive bitwise MAP decoder over the `2^K` codewords.
#[derive(Debug, Clone)]
pub struct MapDecoder {
    k: usize,
    n: usize,
    codebook: Vec<BinaryVector>,
    scratch: Vec<f64>,
}

impl MapDecoder {
    pub fn new(spec: &HtCodeSpec) -> Result<Self> {
        if spec.k > MAP_MAX_K {
            return Err(Error::Capability(format!(
                "MAP enumeration limited to K <= {MAP_MAX_K}, got {}",
                spec.k
            )));
        }
        let codebook = (0..1u64 << spec.k)
            .map(|m| spec.encode(&BinaryVector::from_u64(m, spec.k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k: spec.k,
            n: spec.n,
            scratch: vec![0.0; codebook.len()],
            codebook,
        })
    }

    /// Posterior on each information bit given independent priors on the
    /// coded bits and uniform information bits.
    pub fn posteriors(&mut self, prior_v: &[SoftMessage]) -> MessageVector {
        debug_assert_eq!(prior_v.len(), self.n);
        let log0: Vec<f64> = prior_v.iter().map(|m| m.p0.ln()).collect();
        let log1: Vec<f64> = prior_v.iter().map(|m| m.p1.ln()).collect();
        let mut best = f64::NEG_INFINITY;
        for (score, cw) in self.scratch.iter_mut().zip(&self.codebook) {
            *score = (0..self.n)
                .map(|j| if cw.get(j) { log1[j] } else { log0[j] })
                .sum();
            best = best.max(*score);
        }
        let mut acc = vec![[0.0f64; 2]; self.k];
        for (m, score) in self.scratch.iter().enumerate() {
            let w = (score - best).exp();
            for (i, a) in acc.iter_mut().enumerate() {
                a[(m >> i) & 1] += w;
            }
        }
        acc.into_iter().map(|[a, b]| SoftMessage::new(a, b)).collect()
    }
}

/// Exact a posteriori probabilities of the information bits.
pub fn map_decode_oracle(spec: &HtCodeSpec, prior_v: &[SoftMessage]) -> Result<MessageVector> {
    if prior_v.len() != spec.n {
        return arg(format!("prior_v length {} != N = {}", prior_v.len(), spec.n));
    }
    Ok(MapDecoder::new(spec)?.posteriors(prior_v))
}
