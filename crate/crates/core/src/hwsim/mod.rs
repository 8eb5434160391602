//! Cycle-level model of the sampling coprocessor.
//!
//! The model is a single global cycle counter with per-unit state machines
//! stepped once per cycle. Two units share a dual-port 64-bit memory:
//!
//! * the AES-CTR wrapper ([`wrapper`]) expands the seed into the keystream
//!   region `[0, ceil(tau/8))`;
//! * the rejection-sampling unit ([`rejsamp`]) turns that region into packed
//!   field elements at a configurable output base.
//!
//! A central controller ([`controller`]) decodes 26-bit instructions
//! ([`isa`]) and sequences the units. The units run strictly one after the
//! other, so a run's core cycle count is the wrapper count plus the
//! sampling-unit count.
//!
//! Per-state cycle budgets of the hardware are unknown. The
//! [`TimingConfig`] knobs make the assumed costs explicit; the defaults
//! reproduce the SL1 totals of 4632 (wrapper) and 3893 (sampling) cycles.

pub mod controller;
pub mod isa;
pub mod memory;
pub mod rejsamp;
pub mod trace;
pub mod wrapper;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aesprg::CtrConfig;
use crate::error::SampleError;
use crate::params::SecLevel;

pub use controller::{run_program, standard_program, ProgramOutput, Simulator};
pub use isa::{decode, encode, Instruction, Opcode};
pub use memory::{Access, AccessKind, MemError, MemoryModel, Port, Unit, DEFAULT_DEPTH};
pub use rejsamp::{run_rejsamp_unit, RejSampFsm, RejSampUnitState};
pub use trace::TraceEvent;
pub use wrapper::{run_wrapper, SeedSource, WrapperFsm, WrapperState};

/// Cycle costs assumed by the model.
///
/// Wrapper: `wrapper_setup_cycles + blocks * (aes_latency + writeback_cycles
/// + per_block_overhead)` with `blocks = ceil(tau/16)`.
///
/// Sampling unit: `rejsamp_setup_cycles + head_words + 2 * chunks + n' +
/// out_words + stalls`, where `head_words = out_words = ceil(n'/8)` are loaded
/// two per 16-byte chunk, each chunk costs one mask and one validate cycle,
/// each element is collected in one cycle and each output word is written in
/// one cycle. Stalls only occur when the spare-byte window runs dry, which
/// needs long runs of rejected bytes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    /// Cycles from block issue to the ciphertext landing in the output buffer.
    pub aes_latency: u32,
    /// Cycles spent draining one block into memory.
    pub writeback_cycles: u32,
    /// Counter update and input-block preparation between blocks.
    pub per_block_overhead: u32,
    /// Start-up cycles before the first block issue, including the two seed
    /// loads into the key buffer.
    pub wrapper_setup_cycles: u32,
    /// Start-up cycles of the sampling unit before its first load.
    pub rejsamp_setup_cycles: u32,
    /// Memory depth in 64-bit words.
    pub mem_depth: usize,
    pub freq_hz: f64,
    #[serde(skip)]
    pub ctr: CtrConfig,
}

/// FPGA post-route clock frequency used as the default for latency figures.
pub const DEFAULT_FREQ_HZ: f64 = 222e6;

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            aes_latency: 21,
            writeback_cycles: 2,
            per_block_overhead: 2,
            wrapper_setup_cycles: 57,
            rejsamp_setup_cycles: 31,
            mem_depth: DEFAULT_DEPTH,
            freq_hz: DEFAULT_FREQ_HZ,
            ctr: CtrConfig::default(),
        }
    }
}

impl TimingConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Timing(m.to_string()));
        if self.aes_latency < 1 {
            return bad("aes_latency must be at least 1");
        }
        if self.writeback_cycles < 1 {
            return bad("writeback_cycles must be at least 1");
        }
        if self.wrapper_setup_cycles < wrapper::SEED_LOAD_CYCLES {
            return bad("wrapper_setup_cycles must cover the two seed loads");
        }
        if !(self.freq_hz.is_finite() && self.freq_hz > 0.0) {
            return bad("freq_hz must be positive");
        }
        if self.mem_depth == 0 {
            return bad("mem_depth must be positive");
        }
        Ok(())
    }

    /// Closed-form wrapper cycle count for a `tau`-byte keystream.
    pub fn wrapper_cycles(&self, tau: usize) -> u64 {
        let blocks = crate::aesprg::blocks_for(tau) as u64;
        self.wrapper_setup_cycles as u64
            + blocks * (self.aes_latency + self.writeback_cycles + self.per_block_overhead) as u64
    }

    /// Closed-form sampling-unit cycle count when no stall occurs.
    pub fn rejsamp_cycles(&self, n_prime: usize) -> u64 {
        let words = n_prime.div_ceil(8) as u64;
        let chunks = words.div_ceil(2);
        self.rejsamp_setup_cycles as u64 + words + 2 * chunks + n_prime as u64 + words
    }
}

/// Cycle totals of a program run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleReport {
    pub total_cycles: u64,
    pub wrapper_cycles: u64,
    pub rejsamp_cycles: u64,
    /// Stall cycles included in `rejsamp_cycles`.
    pub stall_cycles: u64,
    pub freq_hz: f64,
    pub latency_seconds: f64,
}

impl CycleReport {
    pub fn new(wrapper_cycles: u64, rejsamp_cycles: u64, stall_cycles: u64, freq_hz: f64) -> Self {
        let total_cycles = wrapper_cycles + rejsamp_cycles;
        CycleReport {
            total_cycles,
            wrapper_cycles,
            rejsamp_cycles,
            stall_cycles,
            freq_hz,
            latency_seconds: total_cycles as f64 / freq_hz,
        }
    }

    pub fn with_freq(&self, freq_hz: f64) -> Self {
        CycleReport::new(self.wrapper_cycles, self.rejsamp_cycles, self.stall_cycles, freq_hz)
    }

    pub fn latency_us(&self) -> f64 {
        self.latency_seconds * 1e6
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "total_cycles": self.total_cycles,
            "wrapper_cycles": self.wrapper_cycles,
            "rejsamp_cycles": self.rejsamp_cycles,
            "freq_hz": self.freq_hz,
            "latency_us": self.latency_us(),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Mem(#[from] MemError),
    #[error(transparent)]
    Decode(#[from] isa::DecodeError),
    #[error("{level} needs a memory depth of at least {required} words, configured depth is {available}")]
    Capacity { level: SecLevel, required: usize, available: usize },
    #[error("security level encoding {0:#04b} is not implemented")]
    UnsupportedLevel(u8),
    #[error("program error at instruction {index}: {reason}")]
    Program { index: usize, reason: String },
    #[error("precondition fault: {0}")]
    Precondition(String),
    #[error("output region [{base}, {end}) overlaps the keystream region [0, {tau_addrs}) without being in place")]
    Placement { base: usize, end: usize, tau_addrs: usize },
    #[error("invalid timing configuration: {0}")]
    Timing(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}
