//! Text formats shared by the subcommands.

use crate::CliError;
use bmst_ht::BinaryVector;
use std::fs;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Comment header naming the tool, the subcommand and every parameter.
pub fn header(command: &str, params: &[(&str, String)]) -> String {
    let mut s = format!("# bmst-ht {VERSION}\n# command = {command}\n");
    for (k, v) in params {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Expands `start:step:stop` (inclusive), a comma list, or a single value.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Arg(format!("invalid Eb/N0 sweep {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(bad());
            }
            (0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad()),
    };
    if out.is_empty() || out.iter().any(|x| x.is_nan()) {
        return Err(bad());
    }
    Ok(out)
}

fn payload_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One hex-encoded block of `len` bits per line.
pub fn parse_hex_blocks(text: &str, len: usize) -> Result<Vec<BinaryVector>, CliError> {
    payload_lines(text)
        .map(|(no, l)| BinaryVector::from_hex(l, len).map_err(|e| CliError::Arg(format!("line {no}: {e}"))))
        .collect()
}

pub fn hex_blocks(blocks: &[BinaryVector]) -> String {
    blocks.iter().map(|b| b.to_hex() + "\n").collect()
}

/// One LLR per line, blocks separated by blank lines; comment lines are
/// ignored and do not separate blocks.
pub fn parse_llr_blocks(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut blocks = Vec::new();
    let mut cur = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.starts_with('#') {
            continue;
        }
        if l.is_empty() {
            if !cur.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let v: f64 = l
            .parse()
            .map_err(|_| CliError::Arg(format!("line {}: invalid LLR {l:?}", no + 1)))?;
        if v.is_nan() {
            return Err(CliError::Arg(format!("line {}: LLR is NaN", no + 1)));
        }
        cur.push(v);
    }
    if !cur.is_empty() {
        blocks.push(cur);
    }
    Ok(blocks)
}

pub fn llr_blocks(blocks: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        for v in b {
            s.push_str(&format!("{v}\n"));
        }
    }
    s
}
