//! Python bindings. Soft values cross the boundary as LLRs `ln P(0)/P(1)`;
//! bit vectors as lists of 0/1 integers.

use bmst_ht::capacity::design_row;
use bmst_ht::channel::genie_shift_db as shift_db;
use bmst_ht::{
    BasicCodeSpec, BinaryVector, BmstConfig, Error, HtCodeSpec, HtDecoderKind, MessageVector, SimOptions,
    SlidingWindowDecoder, System, WindowConfig,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeMap;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Argument(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_vector(bits: &[u8]) -> PyResult<BinaryVector> {
    BinaryVector::from_bits(bits).map_err(py_err)
}

fn to_list(v: &BinaryVector) -> Vec<u32> {
    v.to_bits().into_iter().map(u32::from).collect()
}

fn messages(llrs: &[f64]) -> MessageVector {
    MessageVector::from_llrs(llrs)
}

/// `u · H_N` over GF(2).
#[pyfunction]
fn fht(bits: Vec<u8>) -> PyResult<Vec<u32>> {
    Ok(to_list(&bmst_ht::fht(&to_vector(&bits)?).map_err(py_err)?))
}

/// Rows of `H_N`, `N = 2^p`.
#[pyfunction]
fn hadamard_matrix(p: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(bmst_ht::hadamard_matrix(p).map_err(py_err)?.iter().map(to_list).collect())
}

/// Exact extrinsic LLRs on both sides of the transform.
#[pyfunction]
fn exact_extrinsic(llr_u0: Vec<f64>, llr_up: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (a, b) = bmst_ht::exact_extrinsic(&messages(&llr_u0), &messages(&llr_up)).map_err(py_err)?;
    Ok((a.llrs(), b.llrs()))
}

/// Iterative SISO extrinsic LLRs after `iterations` sweeps.
#[pyfunction]
#[pyo3(signature = (llr_u0, llr_up, iterations = 3))]
fn siso_fht(llr_u0: Vec<f64>, llr_up: Vec<f64>, iterations: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (a, b) = bmst_ht::siso_fht(&messages(&llr_u0), &messages(&llr_up), iterations).map_err(py_err)?;
    Ok((a.llrs(), b.llrs()))
}

/// An `[N, K]` HT-coset code with RM-rule row order.
#[pyclass(frozen)]
struct HtCode {
    spec: HtCodeSpec,
}

#[pymethods]
impl HtCode {
    #[new]
    fn new(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { spec: HtCodeSpec::new(n, k).map_err(py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.spec.k()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.spec.rate()
    }

    #[getter]
    fn permutation(&self) -> Vec<usize> {
        self.spec.permutation().to_vec()
    }

    fn encode(&self, bits: Vec<u8>) -> PyResult<Vec<u32>> {
        Ok(to_list(&self.spec.encode(&to_vector(&bits)?).map_err(py_err)?))
    }

    /// Returns `(ext_u, ext_v)` LLRs.
    #[pyo3(signature = (llr_v, llr_u = None, iterations = 3))]
    fn siso_decode(
        &self,
        llr_v: Vec<f64>,
        llr_u: Option<Vec<f64>>,
        iterations: usize,
    ) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let prior_u = llr_u.unwrap_or_else(|| vec![0.0; self.spec.k()]);
        let (u, v) = bmst_ht::siso_decode(&self.spec, &messages(&llr_v), &messages(&prior_u), iterations)
            .map_err(py_err)?;
        Ok((u.llrs(), v.llrs()))
    }

    /// A posteriori LLRs of the information bits.
    fn map_decode(&self, llr_v: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(bmst_ht::map_decode_oracle(&self.spec, &messages(&llr_v)).map_err(py_err)?.llrs())
    }

    /// `{(w, d): A_wd}`.
    fn iowef(&self) -> PyResult<BTreeMap<(usize, usize), u64>> {
        Ok(bmst_ht::iowef(&self.spec).map_err(py_err)?.terms().clone())
    }

    fn polynomial(&self) -> PyResult<String> {
        Ok(bmst_ht::iowef(&self.spec).map_err(py_err)?.polynomial())
    }

    fn union_bound(&self, ebn0_db: f64) -> PyResult<f64> {
        Ok(bmst_ht::iowef(&self.spec).map_err(py_err)?.union_bound_ber(ebn0_db))
    }

    #[pyo3(signature = (target_ber = 1e-5))]
    fn required_ebn0(&self, target_ber: f64) -> PyResult<f64> {
        bmst_ht::iowef(&self.spec)
            .and_then(|w| w.required_ebn0(target_ber))
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("HtCode({}, {})", self.spec.n(), self.spec.k())
    }
}

/// BI-AWGN capacity in bits per use at symbol SNR `snr` (linear).
#[pyfunction]
fn capacity(snr: f64) -> PyResult<f64> {
    bmst_ht::biawgn_capacity(snr).map_err(py_err)
}

/// Eb/N0 (dB) at which capacity equals `rate`.
#[pyfunction]
fn shannon_limit(rate: f64) -> PyResult<f64> {
    bmst_ht::shannon_limit(rate).map_err(py_err)
}

#[pyfunction]
fn genie_shift_db(active_memory: usize) -> f64 {
    shift_db(active_memory)
}

/// Memory design rows for `K = 1..N-1`, one dict per row.
#[pyfunction]
#[pyo3(signature = (n, target_ber = 1e-5))]
fn design_table<'py>(py: Python<'py>, n: usize, target_ber: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut out = Vec::new();
    for k in 1..n {
        let r = design_row(n, k, target_ber).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("K", r.k)?;
        d.set_item("rate", r.rate)?;
        d.set_item("gamma_star_db", r.gamma_star_db)?;
        d.set_item("gamma_db", r.gamma_db)?;
        d.set_item("gap_db", r.gap_db)?;
        d.set_item("memory", r.memory)?;
        out.push(d);
    }
    Ok(out)
}

/// BMST over `C[N, K]^B` with `L` data blocks.
#[pyclass(frozen)]
struct Bmst {
    config: BmstConfig,
}

#[pymethods]
impl Bmst {
    #[new]
    #[pyo3(signature = (n, k, b, l, mk, m = None, seed = 0))]
    fn new(n: usize, k: usize, b: usize, l: usize, mk: usize, m: Option<usize>, seed: u64) -> PyResult<Self> {
        let basic = HtCodeSpec::new(n, k)
            .and_then(|s| BasicCodeSpec::homogeneous(s, b))
            .map_err(py_err)?;
        let config = BmstConfig::new(basic, m.unwrap_or(mk), mk, seed, l).map_err(py_err)?;
        Ok(Self { config })
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.config.rate()
    }

    /// `L` blocks of `k` bits to `L + m_K` blocks of `n` bits.
    fn encode(&self, blocks: Vec<Vec<u8>>) -> PyResult<Vec<Vec<u32>>> {
        let u = blocks.iter().map(|b| to_vector(b)).collect::<PyResult<Vec<_>>>()?;
        Ok(bmst_ht::bmst_encode(&self.config, &u).map_err(py_err)?.iter().map(to_list).collect())
    }

    /// Sliding-window decoding of `L + m_K` channel LLR blocks.
    #[pyo3(signature = (llr_blocks, d = None, imax = 18, j = 3, threshold = 1e-5))]
    fn decode(
        &self,
        py: Python<'_>,
        llr_blocks: Vec<Vec<f64>>,
        d: Option<usize>,
        imax: usize,
        j: usize,
        threshold: f64,
    ) -> PyResult<Vec<Vec<u32>>> {
        let window = WindowConfig {
            delay: d.unwrap_or(2 * self.config.active_memory),
            max_iterations: imax,
            stop_threshold: threshold,
            siso_iterations: j,
        };
        let config = self.config.clone();
        let out = py
            .detach(move || SlidingWindowDecoder::new(config, window)?.decode_llr(&llr_blocks))
            .map_err(py_err)?;
        Ok(out.iter().map(to_list).collect())
    }
}

/// Monte Carlo BER; one dict per Eb/N0 point.
#[pyfunction]
#[pyo3(signature = (
    system, ebn0, n = 8, k = 4, map = false, j = 3, b = 1, l = 10, mk = 1,
    seed = 0, max_frames = 10_000, max_errors = 100, jobs = 1
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    system: &str,
    ebn0: Vec<f64>,
    n: usize,
    k: usize,
    map: bool,
    j: usize,
    b: usize,
    l: usize,
    mk: usize,
    seed: u64,
    max_frames: u64,
    max_errors: u64,
    jobs: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = HtCodeSpec::new(n, k).map_err(py_err)?;
    let sys = match (system, map) {
        ("ht", true) => System::HtCoset { spec, decoder: HtDecoderKind::Map },
        ("ht", false) => System::HtCoset { spec, decoder: HtDecoderKind::Siso { iterations: j } },
        ("bmst", false) => {
            let basic = BasicCodeSpec::homogeneous(spec, b).map_err(py_err)?;
            System::Bmst {
                config: BmstConfig::new(basic, mk, mk, seed, l).map_err(py_err)?,
                window: WindowConfig { siso_iterations: j, ..WindowConfig::for_memory(mk) },
            }
        }
        ("bmst", true) => return Err(PyValueError::new_err("map decoding applies to system 'ht' only")),
        _ => return Err(PyValueError::new_err(format!("unknown system {system:?}"))),
    };
    let opts = SimOptions { max_frames, max_errors, seed, all_zero: false, jobs };
    let results = py
        .detach(move || bmst_ht::simulate_ber(&sys, &ebn0, &opts))
        .map_err(py_err)?;
    results
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("ebn0_db", r.ebn0_db)?;
            d.set_item("ber", r.ber)?;
            d.set_item("frames", r.frames)?;
            d.set_item("bit_errors", r.bit_errors)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pybmst(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(fht, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(exact_extrinsic, m)?)?;
    m.add_function(wrap_pyfunction!(siso_fht, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_limit, m)?)?;
    m.add_function(wrap_pyfunction!(genie_shift_db, m)?)?;
    m.add_function(wrap_pyfunction!(design_table, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_class::<HtCode>()?;
    m.add_class::<Bmst>()?;
    Ok(())
}
