//! Sliding-window iterative decoding of BMST over the layered normal graph.
//!
//! Layer `t` has a basic-code node `C`, an equality node `=` on `v(t)` and a
//! parity node `+` on `c(t)` that also sees the channel. The `=` node of
//! layer `t` has one edge to `C`, one to `+` of its own layer and one to `+`
//! of layer `t + i` through interleaver `i` for each active `i = 1..m_K`.
//! Tail layers `L..L+m_K` carry `v = 0` and only a `+` node.
//!
//! All node arithmetic is in LLR form clamped to `+-LLR_CLAMP`; the basic
//! code SISO works on probability pairs.

use crate::bits::BinaryVector;
use crate::bmst::{basic_encode, BasicCodeSpec, BmstConfig};
use crate::coset::HtSisoDecoder;
use crate::error::{arg, Result};
use crate::message::{clamp_llr, MessageVector, SoftMessage, LLR_CLAMP};

/// Equality-node extrinsics in LLR form: every output is the sum of all other
/// inputs.
pub fn equal_llr(incoming: &[f64], out: &mut [f64]) {
    let total: f64 = incoming.iter().sum();
    for (o, &x) in out.iter_mut().zip(incoming) {
        *o = clamp_llr(total - x);
    }
}

/// Parity-node extrinsics in LLR form with a channel observation on the
/// parity variable: output `e` is the boxplus of the channel LLR and every
/// input except `e`.
pub fn check_llr(channel: f64, incoming: &[f64], out: &mut [f64]) {
    let t: Vec<f64> = incoming.iter().map(|&x| (0.5 * x).tanh()).collect();
    let tc = (0.5 * channel).tanh();
    let m = t.len();
    // Leave-one-out products from prefix and suffix products.
    let mut suffix = vec![1.0; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] * t[i];
    }
    let mut prefix = tc;
    for i in 0..m {
        out[i] = clamp_llr(2.0 * (prefix * suffix[i + 1]).atanh());
        prefix *= t[i];
    }
}

/// Extrinsic message to each edge of an equality node.
pub fn equal_node_update(incoming: &[SoftMessage]) -> Result<MessageVector> {
    if incoming.len() < 2 {
        return arg("equality node needs at least two edges");
    }
    let llrs: Vec<f64> = incoming.iter().map(|m| clamp_llr(m.llr())).collect();
    let mut out = vec![0.0; llrs.len()];
    equal_llr(&llrs, &mut out);
    Ok(MessageVector::from_llrs(&out))
}

/// Extrinsic message to each edge of a parity node `c = v + w_1 + ...` whose
/// parity bit `c` carries the channel message.
pub fn check_node_update(incoming: &[SoftMessage], channel: SoftMessage) -> MessageVector {
    let llrs: Vec<f64> = incoming.iter().map(|m| clamp_llr(m.llr())).collect();
    let mut out = vec![0.0; llrs.len()];
    check_llr(clamp_llr(channel.llr()), &llrs, &mut out);
    MessageVector::from_llrs(&out)
}

/// True when the mean binary entropy of `posteriors` is below `threshold`.
pub fn entropy_stop(posteriors: &[SoftMessage], threshold: f64) -> bool {
    let mean = if posteriors.is_empty() {
        0.0
    } else {
        posteriors.iter().map(SoftMessage::entropy).sum::<f64>() / posteriors.len() as f64
    };
    mean < threshold
}

/// SISO decoder for the product basic code: each copy is decoded on its own
/// with uniform information priors.
#[derive(Debug, Clone)]
pub struct BasicSiso {
    /// (decoder, coded offset, info offset) per copy.
    copies: Vec<(HtSisoDecoder, usize, usize)>,
    n: usize,
    k: usize,
    prior_v: Vec<SoftMessage>,
    ext_v: Vec<SoftMessage>,
    ext_u: Vec<SoftMessage>,
    prior_u: Vec<SoftMessage>,
}

impl BasicSiso {
    pub fn new(basic: &BasicCodeSpec) -> Self {
        let (mut iv, mut iu) = (0, 0);
        let mut copies = Vec::with_capacity(basic.num_copies());
        let mut max_k = 0;
        for spec in basic.copies() {
            copies.push((HtSisoDecoder::new(spec.clone()), iv, iu));
            iv += spec.n();
            iu += spec.k();
            max_k = max_k.max(spec.k());
        }
        Self {
            copies,
            n: iv,
            k: iu,
            prior_v: vec![SoftMessage::UNIFORM; iv],
            ext_v: vec![SoftMessage::UNIFORM; iv],
            ext_u: vec![SoftMessage::UNIFORM; iu],
            prior_u: vec![SoftMessage::UNIFORM; max_k],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Probability-domain decode of every copy. Outputs have lengths `n` and
    /// `k`.
    pub fn decode(
        &mut self,
        prior_v: &[SoftMessage],
        iterations: usize,
        ext_v: &mut [SoftMessage],
        ext_u: &mut [SoftMessage],
    ) {
        for (dec, iv, iu) in &mut self.copies {
            let (n, k) = (dec.spec().n(), dec.spec().k());
            dec.decode_into(
                &prior_v[*iv..*iv + n],
                &self.prior_u[..k],
                iterations,
                &mut ext_u[*iu..*iu + k],
                &mut ext_v[*iv..*iv + n],
            );
        }
    }

    /// LLR-domain wrapper around [`decode`](Self::decode).
    pub fn decode_llr(
        &mut self,
        prior_v: &[f64],
        iterations: usize,
        ext_v: &mut [f64],
        ext_u: &mut [f64],
    ) {
        for (m, &l) in self.prior_v.iter_mut().zip(prior_v) {
            *m = SoftMessage::from_llr(l);
        }
        let (pv, mut ev, mut eu) = (
            std::mem::take(&mut self.prior_v),
            std::mem::take(&mut self.ext_v),
            std::mem::take(&mut self.ext_u),
        );
        self.decode(&pv, iterations, &mut ev, &mut eu);
        for (o, m) in ext_v.iter_mut().zip(&ev) {
            *o = clamp_llr(m.llr());
        }
        for (o, m) in ext_u.iter_mut().zip(&eu) {
            *o = clamp_llr(m.llr());
        }
        self.prior_v = pv;
        self.ext_v = ev;
        self.ext_u = eu;
    }
}

/// Extrinsic messages on the coded bits of the basic code.
pub fn layer_siso(basic: &BasicCodeSpec, prior_v: &[SoftMessage], iterations: usize) -> Result<MessageVector> {
    if prior_v.len() != basic.n() {
        return arg(format!("prior length {} != n = {}", prior_v.len(), basic.n()));
    }
    if iterations < 1 {
        return arg("SISO needs at least one iteration");
    }
    let mut siso = BasicSiso::new(basic);
    let mut ext_v = MessageVector::uniform(basic.n());
    let mut ext_u = MessageVector::uniform(basic.k());
    siso.decode(prior_v, iterations, &mut ext_v, &mut ext_u);
    Ok(ext_v)
}

/// Sliding-window schedule parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    /// Decoding delay `d`: the window covers layers `t..=t + d`.
    pub delay: usize,
    /// Maximum global rounds per window position.
    pub max_iterations: usize,
    /// Entropy threshold (bits) of the early stopping rule.
    pub stop_threshold: f64,
    /// Inner iterations of the basic-code SISO.
    pub siso_iterations: usize,
}

impl WindowConfig {
    /// Delay `2 m_K`, 18 rounds, threshold `1e-5`, three inner iterations.
    pub fn for_memory(active_memory: usize) -> Self {
        Self {
            delay: 2 * active_memory,
            max_iterations: 18,
            stop_threshold: 1e-5,
            siso_iterations: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return arg("maximum iteration count must be at least 1");
        }
        if !(self.stop_threshold > 0.0) {
            return arg("stopping threshold must be positive");
        }
        if self.siso_iterations < 1 {
            return arg("SISO iteration count must be at least 1");
        }
        Ok(())
    }
}

/// Rounds spent at each window position of the last decode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub rounds: Vec<usize>,
}

/// Reusable sliding-window decoder for one BMST configuration.
#[derive(Debug, Clone)]
pub struct SlidingWindowDecoder {
    config: BmstConfig,
    window: WindowConfig,
    /// Active interleavers only.
    interleavers: Vec<Vec<usize>>,
    siso: BasicSiso,
    // Per-frame state.
    channel: Vec<Vec<f64>>,
    from_c: Vec<Vec<f64>>,
    /// `from_plus[t][i]`: message from the `+` node of layer `t + i` into the
    /// `=` node of layer `t`, indexed by position in `v(t)`.
    from_plus: Vec<Vec<Vec<f64>>>,
    info: Vec<Vec<f64>>,
    decided: Vec<Option<BinaryVector>>,
    scratch_prior: Vec<f64>,
    scratch_in: Vec<f64>,
    scratch_out: Vec<f64>,
    stats: DecodeStats,
}

impl SlidingWindowDecoder {
    pub fn new(config: BmstConfig, window: WindowConfig) -> Result<Self> {
        config.validate()?;
        window.validate()?;
        let mut interleavers = config.interleavers();
        interleavers.truncate(config.active_memory);
        let siso = BasicSiso::new(&config.basic);
        let (n, k, l, m) = (config.basic.n(), config.basic.k(), config.blocks, config.active_memory);
        Ok(Self {
            interleavers,
            siso,
            channel: vec![vec![0.0; n]; l + m],
            from_c: vec![vec![0.0; n]; l],
            from_plus: vec![vec![vec![0.0; n]; m + 1]; l],
            info: vec![vec![0.0; k]; l],
            decided: vec![None; l],
            scratch_prior: vec![0.0; n],
            scratch_in: vec![0.0; m + 1],
            scratch_out: vec![0.0; m + 1],
            stats: DecodeStats::default(),
            config,
            window,
        })
    }

    pub fn config(&self) -> &BmstConfig {
        &self.config
    }

    pub fn window(&self) -> &WindowConfig {
        &self.window
    }

    pub fn stats(&self) -> &DecodeStats {
        &self.stats
    }

    /// Decodes from channel messages, one vector per transmitted block.
    pub fn decode(&mut self, channel_msgs: &[MessageVector]) -> Result<Vec<BinaryVector>> {
        let llrs: Vec<Vec<f64>> = channel_msgs
            .iter()
            .map(|mv| mv.iter().map(|m| clamp_llr(m.llr())).collect())
            .collect();
        self.decode_llr(&llrs)
    }

    /// Decodes from channel LLRs (`ln P(0)/P(1)`), one vector per transmitted
    /// block, returning the `L` decided information blocks.
    pub fn decode_llr(&mut self, channel: &[Vec<f64>]) -> Result<Vec<BinaryVector>> {
        let total = self.config.transmitted_blocks();
        let n = self.config.basic.n();
        if channel.len() != total {
            return arg(format!("got {} channel blocks, expected L + m_K = {total}", channel.len()));
        }
        if let Some(b) = channel.iter().find(|b| b.len() != n) {
            return arg(format!("channel block of length {}, expected n = {n}", b.len()));
        }
        for (dst, src) in self.channel.iter_mut().zip(channel) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = clamp_llr(s);
            }
        }
        self.reset();

        let l = self.config.blocks;
        let coupled = self.config.active_memory > 0;
        let mut out = Vec::with_capacity(l);
        for t in 0..l {
            let end = (t + self.window.delay).min(total - 1);
            let max_rounds = if coupled { self.window.max_iterations } else { 1 };
            let mut rounds = 0;
            for _ in 0..max_rounds {
                rounds += 1;
                for layer in t..=end {
                    self.check_layer(layer, t);
                    if layer < l {
                        self.siso_layer(layer);
                    }
                }
                if self.target_entropy_below(t) {
                    break;
                }
            }
            self.stats.rounds.push(rounds);
            let u = BinaryVector::from_bools(self.info[t].iter().map(|&x| x < 0.0));
            self.decided[t] = Some(basic_encode(&self.config.basic, &u)?);
            out.push(u);
        }
        Ok(out)
    }

    fn reset(&mut self) {
        for v in &mut self.from_c {
            v.fill(0.0);
        }
        for layer in &mut self.from_plus {
            for v in layer {
                v.fill(0.0);
            }
        }
        for v in &mut self.info {
            v.fill(0.0);
        }
        self.decided.fill(None);
        self.stats.rounds.clear();
    }

    /// Message from the `=` node of layer `t` toward the `+` node of layer
    /// `t + i`, at position `pos` of `v(t)`.
    #[inline]
    fn eq_to_plus(&self, t: usize, i: usize, pos: usize) -> f64 {
        if let Some(v) = &self.decided[t] {
            return if v.get(pos) { -LLR_CLAMP } else { LLR_CLAMP };
        }
        let mut s = self.from_c[t][pos];
        for (i2, msgs) in self.from_plus[t].iter().enumerate() {
            if i2 != i {
                s += msgs[pos];
            }
        }
        clamp_llr(s)
    }

    /// Updates the `+` node of `layer`, writing messages toward every
    /// undecided layer at or after `first_open`.
    fn check_layer(&mut self, layer: usize, first_open: usize) {
        let n = self.config.basic.n();
        let l = self.config.blocks;
        let m = self.config.active_memory;
        // Edges (i, t = layer - i) that exist.
        let edges: Vec<(usize, usize)> = (0..=m)
            .filter(|&i| i <= layer && layer - i < l)
            .map(|i| (i, layer - i))
            .collect();
        if edges.is_empty() {
            return;
        }
        let mut inc = std::mem::take(&mut self.scratch_in);
        let mut out = std::mem::take(&mut self.scratch_out);
        for j in 0..n {
            for (e, &(i, t)) in edges.iter().enumerate() {
                let pos = if i == 0 { j } else { self.interleavers[i - 1][j] };
                inc[e] = self.eq_to_plus(t, i, pos);
            }
            check_llr(self.channel[layer][j], &inc[..edges.len()], &mut out[..edges.len()]);
            for (e, &(i, t)) in edges.iter().enumerate() {
                if t >= first_open && self.decided[t].is_none() {
                    let pos = if i == 0 { j } else { self.interleavers[i - 1][j] };
                    self.from_plus[t][i][pos] = out[e];
                }
            }
        }
        self.scratch_in = inc;
        self.scratch_out = out;
    }

    fn siso_layer(&mut self, layer: usize) {
        if self.decided[layer].is_some() {
            return;
        }
        let mut prior = std::mem::take(&mut self.scratch_prior);
        prior.fill(0.0);
        for msgs in &self.from_plus[layer] {
            for (p, &x) in prior.iter_mut().zip(msgs) {
                *p += x;
            }
        }
        for p in &mut prior {
            *p = clamp_llr(*p);
        }
        let iters = self.window.siso_iterations;
        self.siso
            .decode_llr(&prior, iters, &mut self.from_c[layer], &mut self.info[layer]);
        self.scratch_prior = prior;
    }

    fn target_entropy_below(&self, t: usize) -> bool {
        let n = self.config.basic.n();
        let mut acc = 0.0;
        for j in 0..n {
            let mut s = self.from_c[t][j];
            for msgs in &self.from_plus[t] {
                s += msgs[j];
            }
            acc += SoftMessage::from_llr(s).entropy();
        }
        acc / (n as f64) < self.window.stop_threshold
    }
}

/// Decodes `L + m_K` channel message vectors into `L` information blocks.
pub fn sw_decode(
    config: &BmstConfig,
    window: &WindowConfig,
    channel_msgs: &[MessageVector],
) -> Result<Vec<BinaryVector>> {
    SlidingWindowDecoder::new(config.clone(), *window)?.decode(channel_msgs)
}
