//! Block Markov superposition transmission over a product basic code.
//!
//! With `v(t)` the basic codeword of block `t` (zero outside `0..L`), the
//! transmitted block is `c(t) = v(t) + sum_{i=1..m_K} P_i(v(t - i))` for
//! `t = 0..L + m_K`, where `P_i` is the `i`-th interleaver.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BinaryVector;
use crate::coset::HtCodeSpec;
use crate::error::{arg, Result};

/// Cartesian product of HT-coset codes, each repeated `copies` times, in
/// declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicCodeSpec {
    components: Vec<(HtCodeSpec, usize)>,
}

impl BasicCodeSpec {
    pub fn new(components: Vec<(HtCodeSpec, usize)>) -> Result<Self> {
        if components.is_empty() || components.iter().all(|(_, b)| *b == 0) {
            return arg("basic code needs at least one component copy");
        }
        Ok(Self { components })
    }

    /// `C[N, K]^B`.
    pub fn homogeneous(spec: HtCodeSpec, copies: usize) -> Result<Self> {
        Self::new(vec![(spec, copies)])
    }

    pub fn components(&self) -> &[(HtCodeSpec, usize)] {
        &self.components
    }

    /// Component of every copy in transmission order.
    pub fn copies(&self) -> impl Iterator<Item = &HtCodeSpec> + '_ {
        self.components
            .iter()
            .flat_map(|(spec, b)| std::iter::repeat_n(spec, *b))
    }

    pub fn num_copies(&self) -> usize {
        self.components.iter().map(|(_, b)| b).sum()
    }

    /// Basic codeword length `n = sum B_i N_i`.
    pub fn n(&self) -> usize {
        self.components.iter().map(|(s, b)| s.n() * b).sum()
    }

    /// Basic information length `k = sum B_i K_i`.
    pub fn k(&self) -> usize {
        self.components.iter().map(|(s, b)| s.k() * b).sum()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}

/// Concatenation of the component encodings.
pub fn basic_encode(basic: &BasicCodeSpec, u: &BinaryVector) -> Result<BinaryVector> {
    if u.len() != basic.k() {
        return arg(format!("information length {} != k = {}", u.len(), basic.k()));
    }
    let mut out = BinaryVector::zeros(basic.n());
    let (mut iu, mut iv) = (0, 0);
    for spec in basic.copies() {
        let cw = spec.encode(&u.slice(iu, spec.k()))?;
        cw.write_into(&mut out, iv);
        iu += spec.k();
        iv += spec.n();
    }
    Ok(out)
}

/// `m` permutations of `0..n`, each a Fisher-Yates shuffle (rand's
/// `SliceRandom::shuffle`) driven by one ChaCha8 stream seeded with `seed`.
///
/// The `i`-th permutation does not depend on `m`, so a shorter list is a
/// prefix of a longer one with the same seed.
pub fn make_interleavers(n: usize, m: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect()
}

/// `out[j] = v[perm[j]]`.
pub fn interleave(v: &BinaryVector, perm: &[usize]) -> BinaryVector {
    debug_assert_eq!(v.len(), perm.len());
    BinaryVector::from_bools(perm.iter().map(|&src| v.get(src)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmstConfig {
    pub basic: BasicCodeSpec,
    /// Number of interleavers the encoder is furnished with.
    pub max_memory: usize,
    /// Number of superposition terms switched on, at most `max_memory`.
    pub active_memory: usize,
    pub interleaver_seed: u64,
    /// Number of data blocks `L`.
    pub blocks: usize,
}

impl BmstConfig {
    pub fn new(
        basic: BasicCodeSpec,
        max_memory: usize,
        active_memory: usize,
        interleaver_seed: u64,
        blocks: usize,
    ) -> Result<Self> {
        let cfg = Self {
            basic,
            max_memory,
            active_memory,
            interleaver_seed,
            blocks,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.active_memory > self.max_memory {
            return arg(format!(
                "active memory {} exceeds maximum memory {}",
                self.active_memory, self.max_memory
            ));
        }
        if self.blocks == 0 {
            return arg("need at least one data block");
        }
        Ok(())
    }

    /// Transmitted block count `L + m_K`.
    pub fn transmitted_blocks(&self) -> usize {
        self.blocks + self.active_memory
    }

    /// Overall rate `kL / (n (L + m_K))`.
    pub fn rate(&self) -> f64 {
        (self.basic.k() * self.blocks) as f64
            / (self.basic.n() * self.transmitted_blocks()) as f64
    }

    /// The `max_memory` interleavers; only the first `active_memory` are used.
    pub fn interleavers(&self) -> Vec<Vec<usize>> {
        make_interleavers(self.basic.n(), self.max_memory, self.interleaver_seed)
    }
}

/// Streaming encoder holding the last `m_K` basic codewords.
#[derive(Debug, Clone)]
pub struct BmstEncoder {
    config: BmstConfig,
    interleavers: Vec<Vec<usize>>,
    /// Most recent codeword first.
    history: VecDeque<BinaryVector>,
    consumed: usize,
}

impl BmstEncoder {
    pub fn new(config: BmstConfig) -> Result<Self> {
        config.validate()?;
        let interleavers = config.interleavers();
        Ok(Self {
            history: VecDeque::with_capacity(config.active_memory + 1),
            config,
            interleavers,
            consumed: 0,
        })
    }

    pub fn config(&self) -> &BmstConfig {
        &self.config
    }

    fn superpose(&mut self, v: BinaryVector) -> BinaryVector {
        let mut c = v.clone();
        for (past, perm) in self.history.iter().zip(&self.interleavers) {
            c.xor_assign(&interleave(past, perm));
        }
        self.history.push_front(v);
        self.history.truncate(self.config.active_memory);
        c
    }

    /// Encodes the next data block.
    pub fn push(&mut self, u: &BinaryVector) -> Result<BinaryVector> {
        if self.consumed >= self.config.blocks {
            return arg(format!("all {} data blocks already encoded", self.config.blocks));
        }
        let v = basic_encode(&self.config.basic, u)?;
        self.consumed += 1;
        Ok(self.superpose(v))
    }

    /// The `m_K` termination blocks, encoding all-zero data.
    pub fn finish(mut self) -> Result<Vec<BinaryVector>> {
        if self.consumed != self.config.blocks {
            return arg(format!(
                "finish after {} of {} data blocks",
                self.consumed, self.config.blocks
            ));
        }
        let n = self.config.basic.n();
        Ok((0..self.config.active_memory)
            .map(|_| self.superpose(BinaryVector::zeros(n)))
            .collect())
    }
}

/// Encodes exactly `L` data blocks into `L + m_K` transmitted blocks.
pub fn bmst_encode(config: &BmstConfig, u_blocks: &[BinaryVector]) -> Result<Vec<BinaryVector>> {
    if u_blocks.len() != config.blocks {
        return arg(format!("got {} data blocks, expected L = {}", u_blocks.len(), config.blocks));
    }
    let mut enc = BmstEncoder::new(config.clone())?;
    let mut out = u_blocks
        .iter()
        .map(|u| enc.push(u))
        .collect::<Result<Vec<_>>>()?;
    out.extend(enc.finish()?);
    Ok(out)
}
