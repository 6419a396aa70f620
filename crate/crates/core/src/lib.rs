//! Multiple-rate codes from the binary Hadamard transform and their block
//! Markov superposition transmission (BMST).
//!
//! * [`hadamard`]: fast transform, exact extrinsics, iterative SISO.
//! * [`coset`]: `[N, K]` HT-coset codes with RM-rule row order.
//! * [`weight`]: IOWEF enumeration and union bounds.
//! * [`capacity`]: BI-AWGN Shannon limits and encoding-memory design.
//! * [`bmst`]: superposition encoder over product basic codes.
//! * [`decoder`]: sliding-window decoder on the layered normal graph.
//! * [`channel`]: BPSK/AWGN Monte Carlo and genie-aided bounds.

pub mod bits;
pub mod bmst;
pub mod capacity;
pub mod channel;
pub mod coset;
pub mod decoder;
pub mod error;
pub mod hadamard;
pub mod message;
pub mod weight;

pub use bits::BinaryVector;
pub use bmst::{basic_encode, bmst_encode, make_interleavers, BasicCodeSpec, BmstConfig, BmstEncoder};
pub use capacity::{biawgn_capacity, design_table, required_memory, shannon_limit, DesignRow, DesignTable};
pub use channel::{genie_bound, simulate_ber, HtDecoderKind, SimOptions, SimResult, System};
pub use coset::{map_decode_oracle, rm_permutation, siso_decode, HtCodeSpec};
pub use decoder::{sw_decode, SlidingWindowDecoder, WindowConfig};
pub use error::{Error, Result};
pub use hadamard::{complementary_pairs, exact_extrinsic, fht, hadamard_matrix, siso_fht, ButterflyPair};
pub use message::{MessageVector, SoftMessage};
pub use weight::{iowef, required_ebn0, union_bound_ber, BerCurve, Iowef};
