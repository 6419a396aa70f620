use crate::files::{self, header};
use crate::{
    BmstArgs, BoundArgs, CliError, DecodeArgs, DesignArgs, EncodeArgs, IowefArgs, SimulateArgs, SystemKind,
    WindowArgs,
};
use bmst_ht::channel::{awgn_llrs, curve_csv, genie_shift_db, modulate, noise_variance, parse_curve_csv};
use bmst_ht::{
    bmst_encode, design_table, genie_bound, iowef as enumerate, simulate_ber, BasicCodeSpec, BerCurve, BinaryVector,
    BmstConfig, HtCodeSpec, HtDecoderKind, SimOptions, SlidingWindowDecoder, System, WindowConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Result<T> = std::result::Result<T, CliError>;

/// Stream offsets keeping data and noise draws apart under one seed.
const DATA_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn parse_components(s: &str) -> Result<Vec<(HtCodeSpec, usize)>> {
    let bad = || CliError::Arg(format!("invalid component list {s:?}; expected N:KxB,..."));
    s.split(',')
        .map(|part| {
            let (nk, b) = match part.trim().split_once('x') {
                Some((nk, b)) => (nk, b.parse::<usize>().map_err(|_| bad())?),
                None => (part.trim(), 1),
            };
            let (n, k) = nk.split_once(':').ok_or_else(bad)?;
            let n = n.parse().map_err(|_| bad())?;
            let k = k.parse().map_err(|_| bad())?;
            Ok((HtCodeSpec::new(n, k)?, b))
        })
        .collect()
}

impl BmstArgs {
    fn basic(&self) -> Result<BasicCodeSpec> {
        Ok(match &self.components {
            Some(list) => BasicCodeSpec::new(parse_components(list)?)?,
            None => BasicCodeSpec::homogeneous(HtCodeSpec::new(self.code.n, self.code.k)?, self.b)?,
        })
    }

    fn config(&self) -> Result<BmstConfig> {
        let m = self.m.unwrap_or(self.mk);
        Ok(BmstConfig::new(self.basic()?, m, self.mk, self.seed, self.l)?)
    }

    fn params(&self) -> Vec<(&'static str, String)> {
        let mut p = match &self.components {
            Some(c) => vec![("components", c.clone())],
            None => vec![
                ("n", self.code.n.to_string()),
                ("k", self.code.k.to_string()),
                ("b", self.b.to_string()),
            ],
        };
        p.extend([
            ("l", self.l.to_string()),
            ("m", self.m.unwrap_or(self.mk).to_string()),
            ("mk", self.mk.to_string()),
            ("seed", self.seed.to_string()),
        ]);
        p
    }
}

impl WindowArgs {
    fn config(&self, mk: usize) -> Result<WindowConfig> {
        let w = WindowConfig {
            delay: self.d.unwrap_or(2 * mk),
            max_iterations: self.imax,
            stop_threshold: self.threshold,
            siso_iterations: self.j,
        };
        w.validate()?;
        Ok(w)
    }

    fn params(&self, mk: usize) -> Vec<(&'static str, String)> {
        vec![
            ("d", self.d.unwrap_or(2 * mk).to_string()),
            ("imax", self.imax.to_string()),
            ("j", self.j.to_string()),
            ("threshold", format!("{:e}", self.threshold)),
        ]
    }
}

pub fn iowef(a: IowefArgs) -> Result<()> {
    let spec = HtCodeSpec::new(a.code.n, a.code.k)?;
    let w = enumerate(&spec)?;
    let mut s = header(
        "iowef",
        &[
            ("n", a.code.n.to_string()),
            ("k", a.code.k.to_string()),
            ("seed", "none".into()),
        ],
    );
    s.push_str(&w.polynomial());
    s.push_str("\n\nw,d,count\n");
    for (&(wt, d), &c) in w.terms() {
        s.push_str(&format!("{wt},{d},{c}\n"));
    }
    files::emit(a.common.output.as_deref(), &s)
}

pub fn design(a: DesignArgs) -> Result<()> {
    if !(a.target > 0.0 && a.target < 0.5) {
        return Err(CliError::Arg(format!("target BER {} outside (0, 0.5)", a.target)));
    }
    let table = design_table(a.n, a.target)?;
    let mut s = header(
        "design",
        &[
            ("n", a.n.to_string()),
            ("target", format!("{:e}", a.target)),
            ("seed", "none".into()),
            ("gamma", "union bound on BER at the target".into()),
            ("memory", "round(10^(gap/10) - 1), halves away from zero".into()),
        ],
    );
    s.push_str("K,rate,gamma_star_db,gamma_db,gap_db,memory\n");
    for r in &table.rows {
        s.push_str(&format!(
            "{},{:.6},{:.4},{:.4},{:.4},{}\n",
            r.k, r.rate, r.gamma_star_db, r.gamma_db, r.gap_db, r.memory
        ));
    }
    files::emit(a.common.output.as_deref(), &s)
}

pub fn encode(a: EncodeArgs) -> Result<()> {
    let cfg = a.bmst.config()?;
    let k = cfg.basic.k();
    let mut params = a.bmst.params();
    params.push(("rate", format!("{:.6}", cfg.rate())));

    let data = if a.random_data {
        let mut rng = rng_for(a.bmst.seed, DATA_STREAM);
        let blocks: Vec<BinaryVector> = (0..cfg.blocks)
            .map(|_| BinaryVector::from_bools((0..k).map(|_| rng.random::<bool>())))
            .collect();
        let mut s = header("encode (data)", &params);
        s.push_str(&files::hex_blocks(&blocks));
        files::emit(Some(&a.data), &s)?;
        blocks
    } else {
        files::parse_hex_blocks(&files::read(&a.data)?, k)?
    };
    if data.len() != cfg.blocks {
        return Err(CliError::Arg(format!(
            "data file has {} blocks, expected L = {}",
            data.len(),
            cfg.blocks
        )));
    }
    let coded = bmst_encode(&cfg, &data)?;

    if let Some(path) = &a.llr_out {
        let (sigma2, label) = match a.ebn0 {
            Some(db) if db.is_nan() => return Err(CliError::Arg("Eb/N0 is NaN".into())),
            Some(db) => (noise_variance(db, cfg.rate()), format!("{db}")),
            None => (0.0, "inf (noiseless)".into()),
        };
        let mut rng = rng_for(a.bmst.seed, NOISE_STREAM);
        let llrs: Vec<Vec<f64>> = coded
            .iter()
            .map(|c| {
                let mut out = Vec::new();
                awgn_llrs(&modulate(c), sigma2, &mut rng, &mut out);
                out
            })
            .collect();
        let mut p = params.clone();
        p.push(("ebn0_db", label));
        let mut s = header("encode (llr)", &p);
        s.push_str(&files::llr_blocks(&llrs));
        files::emit(Some(path), &s)?;
    }

    let mut s = header("encode", &params);
    s.push_str(&files::hex_blocks(&coded));
    files::emit(a.common.output.as_deref(), &s)
}

pub fn decode(a: DecodeArgs) -> Result<()> {
    let cfg = a.bmst.config()?;
    let window = a.window.config(cfg.active_memory)?;
    let llrs = files::parse_llr_blocks(&files::read(&a.llr)?)?;
    let mut dec = SlidingWindowDecoder::new(cfg.clone(), window)?;
    let blocks = dec.decode_llr(&llrs)?;
    let mut params = a.bmst.params();
    params.extend(a.window.params(cfg.active_memory));
    params.push(("llr", a.llr.display().to_string()));
    let mut s = header("decode", &params);
    s.push_str(&files::hex_blocks(&blocks));
    files::emit(a.common.output.as_deref(), &s)
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let points = files::parse_sweep(&a.ebn0)?;
    if a.map && a.system == SystemKind::Bmst {
        return Err(CliError::Arg("--map applies to --system ht only".into()));
    }
    if a.genie_out.is_some() && a.system == SystemKind::Ht {
        return Err(CliError::Arg("--genie-out applies to --system bmst only".into()));
    }
    if a.jobs == 0 {
        return Err(CliError::Arg("--jobs must be at least 1".into()));
    }
    let opts = SimOptions {
        max_frames: a.max_frames,
        max_errors: a.max_errors,
        seed: a.bmst.seed,
        all_zero: a.all_zero,
        jobs: a.jobs,
    };

    let mut params: Vec<(&str, String)> = Vec::new();
    let system = match a.system {
        SystemKind::Ht => {
            let decoder = if a.map {
                HtDecoderKind::Map
            } else {
                if a.window.j < 1 {
                    return Err(CliError::Arg("--j must be at least 1".into()));
                }
                HtDecoderKind::Siso { iterations: a.window.j }
            };
            params.extend([
                ("system", "ht".to_string()),
                ("n", a.bmst.code.n.to_string()),
                ("k", a.bmst.code.k.to_string()),
                ("decoder", if a.map { "map".into() } else { format!("siso j={}", a.window.j) }),
                ("seed", a.bmst.seed.to_string()),
            ]);
            System::HtCoset {
                spec: HtCodeSpec::new(a.bmst.code.n, a.bmst.code.k)?,
                decoder,
            }
        }
        SystemKind::Bmst => {
            let config = a.bmst.config()?;
            let window = a.window.config(config.active_memory)?;
            params.push(("system", "bmst".to_string()));
            params.extend(a.bmst.params());
            params.extend(a.window.params(config.active_memory));
            System::Bmst { config, window }
        }
    };
    params.extend([
        ("rate", format!("{:.6}", system.rate())),
        ("ebn0", a.ebn0.clone()),
        ("max_frames", a.max_frames.to_string()),
        ("max_errors", a.max_errors.to_string()),
        ("all_zero", a.all_zero.to_string()),
        ("jobs", a.jobs.to_string()),
    ]);

    // Validate the genie system before spending time on the main sweep.
    let genie = match (&system, &a.genie_out) {
        (System::Bmst { config, window }, Some(path)) => {
            let basic = BmstConfig::new(config.basic.clone(), 0, 0, config.interleaver_seed, 1)?;
            let w = WindowConfig { delay: 0, ..*window };
            Some((System::Bmst { config: basic, window: w }, config.active_memory, path))
        }
        _ => None,
    };

    let results = simulate_ber(&system, &points, &opts)?;
    let comments: Vec<String> = header("simulate", &params)
        .lines()
        .map(|l| l.trim_start_matches("# ").to_string())
        .collect();
    files::emit(a.common.output.as_deref(), &curve_csv(&results, &comments))?;

    if let Some((basic_system, mk, path)) = genie {
        let shift = genie_shift_db(mk);
        let shifted: Vec<f64> = points.iter().map(|p| p + shift).collect();
        let mut basic = simulate_ber(&basic_system, &shifted, &opts)?;
        for r in &mut basic {
            r.ebn0_db -= shift;
        }
        let mut gp = params.clone();
        gp.push(("genie", format!("uncoupled basic code at Eb/N0 + {shift:.4} dB")));
        let comments: Vec<String> = header("simulate (genie bound)", &gp)
            .lines()
            .map(|l| l.trim_start_matches("# ").to_string())
            .collect();
        files::emit(Some(path), &curve_csv(&basic, &comments))?;
    }
    Ok(())
}

pub fn bound(a: BoundArgs) -> Result<()> {
    match (&a.ebn0, &a.curve) {
        (_, Some(path)) => {
            let rows = parse_curve_csv(&files::read(path)?)?;
            let curve = BerCurve::new(rows.iter().map(|r| (r.ebn0_db, r.ber)).collect())?;
            let shifted = genie_bound(&curve, a.mk)?;
            let mut s = header(
                "bound (genie)",
                &[
                    ("curve", path.display().to_string()),
                    ("mk", a.mk.to_string()),
                    ("shift_db", format!("{:.4}", genie_shift_db(a.mk))),
                    ("seed", "none".into()),
                ],
            );
            s.push_str(bmst_ht::channel::CURVE_CSV_HEADER);
            s.push('\n');
            for (row, &(x, ber)) in rows.iter().zip(shifted.points()) {
                s.push_str(&format!("{x:.4},{ber:.6e},{},{}\n", row.frames, row.bit_errors));
            }
            files::emit(a.common.output.as_deref(), &s)
        }
        (Some(sweep), None) => {
            let points = files::parse_sweep(sweep)?;
            let spec = HtCodeSpec::new(a.code.n, a.code.k)?;
            let w = enumerate(&spec)?;
            let mut params = vec![
                ("n", a.code.n.to_string()),
                ("k", a.code.k.to_string()),
                ("ebn0", sweep.clone()),
                ("seed", "none".into()),
            ];
            if let Some(t) = a.target {
                params.push(("target", format!("{t:e}")));
                params.push(("required_ebn0_db", format!("{:.4}", w.required_ebn0(t)?)));
            }
            let mut s = header("bound (union)", &params);
            s.push_str("ebn0_db,ber_bound\n");
            for x in points {
                s.push_str(&format!("{x:.4},{:.6e}\n", w.union_bound_ber(x)));
            }
            files::emit(a.common.output.as_deref(), &s)
        }
        (None, None) => Err(CliError::Arg("bound needs --ebn0 or --curve".into())),
    }
}
