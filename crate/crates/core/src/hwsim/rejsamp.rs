//! Rejection-sampling unit.
//!
//! The keystream region is split into the head (the first `n'` bytes, one per
//! output element) and the spare tail (bytes `n'..tau`). The head streams
//! through a 16-byte shift register: two 64-bit loads, one masking cycle, one
//! cycle comparing all sixteen bytes against `q`, then one collect cycle per
//! byte. A head byte equal to `q` takes the next non-`q` byte of the tail; the
//! tail is buffered in a small window refilled through the read port whenever
//! the head path is not using it. Once the tail is used up, rejected head
//! bytes become zero. Every eight collected elements are written out as one
//! packed word.
//!
//! This is the streaming form of the reference algorithm: a rejected position
//! `j` receives the same spare byte that the pointer `k` would select there,
//! and accepted positions are never touched.

use std::collections::VecDeque;

use super::memory::{MemoryModel, Unit};
use super::trace::{TraceEvent, Tracer};
use super::{SimError, TimingConfig};
use crate::params::{ParameterSet, BYTES_PER_WORD};

/// Bytes held in the candidate shift register.
pub const SHIFT_REG_BYTES: usize = 16;
/// Capacity of the spare-byte window; a refill needs room for a whole word.
pub const WINDOW_BYTES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejSampFsm {
    Idle,
    Load,
    Mask,
    Validate,
    Collect,
    WriteOut,
    /// A collect cycle that found the tail exhausted and emitted zero.
    ZeroFill,
    Done,
}

/// Result of one sampling-unit run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RejSampRun {
    pub cycles: u64,
    pub stalls: u64,
    pub replaced: usize,
    pub zero_filled: usize,
}

#[derive(Clone, Debug)]
pub struct RejSampUnitState {
    pub shift_reg: [u8; SHIFT_REG_BYTES],
    /// `shift_reg[i] < q`, latched in the validate cycle.
    pub valid_flags: [bool; SHIFT_REG_BYTES],
    /// Output word being assembled, first element in the top byte.
    pub b2_out: u64,
    pub valid_count: u8,
    /// Stream position of the next spare candidate.
    pub k_ptr: usize,
    pub fsm: RejSampFsm,
    window: VecDeque<(usize, u8)>,
    next_tail_word: usize,
    left: u32,
    chunk: usize,
    chunk_words: usize,
    chunk_bytes: usize,
    loaded: usize,
    collect_idx: usize,
    emitted: usize,
    out_word: usize,
    out_base: usize,
    q: u8,
    n_prime: usize,
    tau: usize,
    head_words: usize,
    tau_words: usize,
    run: RejSampRun,
}

impl RejSampUnitState {
    pub fn new(p: &ParameterSet, cfg: &TimingConfig, out_base: usize) -> Self {
        let counts = p.address_counts();
        let mut st = RejSampUnitState {
            shift_reg: [0; SHIFT_REG_BYTES],
            valid_flags: [false; SHIFT_REG_BYTES],
            b2_out: 0,
            valid_count: 0,
            k_ptr: p.n_prime,
            fsm: RejSampFsm::Idle,
            window: VecDeque::with_capacity(WINDOW_BYTES),
            next_tail_word: p.n_prime / BYTES_PER_WORD,
            left: cfg.rejsamp_setup_cycles,
            chunk: 0,
            chunk_words: 0,
            chunk_bytes: 0,
            loaded: 0,
            collect_idx: 0,
            emitted: 0,
            out_word: 0,
            out_base,
            q: p.q,
            n_prime: p.n_prime,
            tau: p.tau,
            head_words: counts.out_addrs,
            tau_words: counts.tau_addrs,
            run: RejSampRun::default(),
        };
        if st.left == 0 {
            st.start_chunk(0);
        }
        st
    }

    pub fn is_done(&self) -> bool {
        self.fsm == RejSampFsm::Done
    }

    pub fn run_stats(&self) -> RejSampRun {
        self.run
    }

    /// Output words written so far.
    pub fn words_written(&self) -> usize {
        self.out_word
    }

    fn start_chunk(&mut self, chunk: usize) {
        let first_word = 2 * chunk;
        self.chunk = chunk;
        self.chunk_words = (self.head_words - first_word).min(2);
        self.chunk_bytes = (self.n_prime - SHIFT_REG_BYTES * chunk).min(SHIFT_REG_BYTES);
        self.loaded = 0;
        self.collect_idx = 0;
        self.fsm = RejSampFsm::Load;
    }

    fn tail_pending(&self) -> bool {
        self.next_tail_word < self.tau_words
    }

    /// Reads of keystream words already overwritten by in-place output.
    fn check_clobber(&self, addr: usize, cycle: u64) -> Result<(), SimError> {
        if addr >= self.out_base && addr < self.out_base + self.out_word {
            return Err(SimError::Precondition(format!(
                "cycle {cycle}: keystream word {addr} read after being overwritten by output"
            )));
        }
        Ok(())
    }

    pub fn tick(&mut self, cycle: u64, mem: &mut MemoryModel, trace: &mut Tracer) -> Result<(), SimError> {
        let mut port_busy = false;
        match self.fsm {
            RejSampFsm::Idle => {
                self.left -= 1;
                if self.left == 0 {
                    self.start_chunk(0);
                }
            }
            RejSampFsm::Load => {
                let addr = 2 * self.chunk + self.loaded;
                self.check_clobber(addr, cycle)?;
                let word = mem.read(addr, cycle, Unit::RejSamp)?;
                port_busy = true;
                let off = BYTES_PER_WORD * self.loaded;
                self.shift_reg[off..off + BYTES_PER_WORD].copy_from_slice(&word.to_be_bytes());
                self.loaded += 1;
                if self.loaded == self.chunk_words {
                    self.fsm = RejSampFsm::Mask;
                }
            }
            RejSampFsm::Mask => {
                let q = self.q;
                self.shift_reg.iter_mut().for_each(|b| *b &= q);
                self.fsm = RejSampFsm::Validate;
            }
            RejSampFsm::Validate => {
                for (flag, &b) in self.valid_flags.iter_mut().zip(&self.shift_reg) {
                    *flag = b < self.q;
                }
                self.fsm = RejSampFsm::Collect;
            }
            RejSampFsm::Collect | RejSampFsm::ZeroFill => self.collect(cycle, trace),
            RejSampFsm::WriteOut => {
                let addr = self.out_base + self.out_word;
                mem.write(addr, self.b2_out, cycle, Unit::RejSamp)?;
                self.out_word += 1;
                self.b2_out = 0;
                self.valid_count = 0;
                self.fsm = if self.emitted == self.n_prime {
                    RejSampFsm::Done
                } else if self.collect_idx < self.chunk_bytes {
                    RejSampFsm::Collect
                } else {
                    self.start_chunk(self.chunk + 1);
                    RejSampFsm::Load
                };
            }
            RejSampFsm::Done => return Ok(()),
        }
        if !port_busy && self.window.len() + BYTES_PER_WORD <= WINDOW_BYTES && self.tail_pending() {
            self.refill(cycle, mem)?;
        }
        Ok(())
    }

    fn collect(&mut self, cycle: u64, trace: &mut Tracer) {
        let i = self.collect_idx;
        let mut label = RejSampFsm::Collect;
        let elem = if self.valid_flags[i] {
            Some(self.shift_reg[i])
        } else {
            while let Some(&(pos, b)) = self.window.front() {
                if b != self.q {
                    break;
                }
                self.window.pop_front();
                self.k_ptr = pos + 1;
            }
            if let Some((pos, b)) = self.window.pop_front() {
                self.k_ptr = pos + 1;
                self.run.replaced += 1;
                trace.emit(|| TraceEvent::new(cycle, Unit::RejSamp, "replace").with_addr(pos).with_data([b]));
                Some(b)
            } else if self.tail_pending() {
                self.run.stalls += 1;
                trace.emit(|| TraceEvent::new(cycle, Unit::RejSamp, "stall"));
                None
            } else {
                self.k_ptr = self.tau;
                self.run.zero_filled += 1;
                label = RejSampFsm::ZeroFill;
                trace.emit(|| TraceEvent::new(cycle, Unit::RejSamp, "zero_fill"));
                Some(0)
            }
        };
        let Some(e) = elem else {
            self.fsm = RejSampFsm::Collect;
            return;
        };
        self.b2_out |= (e as u64) << (56 - 8 * self.valid_count as u32);
        self.valid_count += 1;
        self.emitted += 1;
        self.collect_idx += 1;
        self.fsm = if self.valid_count as usize == BYTES_PER_WORD || self.emitted == self.n_prime {
            RejSampFsm::WriteOut
        } else if self.collect_idx == self.chunk_bytes {
            self.start_chunk(self.chunk + 1);
            RejSampFsm::Load
        } else {
            label
        };
    }

    fn refill(&mut self, cycle: u64, mem: &mut MemoryModel) -> Result<(), SimError> {
        let addr = self.next_tail_word;
        self.check_clobber(addr, cycle)?;
        let word = mem.read(addr, cycle, Unit::RejSamp)?;
        let base = addr * BYTES_PER_WORD;
        for (i, b) in word.to_be_bytes().into_iter().enumerate() {
            let pos = base + i;
            if pos >= self.n_prime && pos < self.tau {
                self.window.push_back((pos, b & self.q));
            }
        }
        self.next_tail_word += 1;
        Ok(())
    }
}

/// Checks that the output region fits and is either disjoint from the
/// keystream region or starts at address 0 (in-place, overwriting consumed
/// head words).
pub fn check_placement(p: &ParameterSet, depth: usize, out_base: usize) -> Result<(), SimError> {
    let counts = p.address_counts();
    let end = out_base + counts.out_addrs;
    if end > depth {
        return Err(SimError::Capacity { level: p.sec_level, required: end, available: depth });
    }
    if out_base != 0 && out_base < counts.tau_addrs {
        return Err(SimError::Placement { base: out_base, end, tau_addrs: counts.tau_addrs });
    }
    Ok(())
}

/// Runs the sampling unit over a populated keystream region and writes the
/// packed elements to `out_base..`.
pub fn run_rejsamp_unit(
    p: &ParameterSet,
    cfg: &TimingConfig,
    mem: &mut MemoryModel,
    out_base: usize,
    start_cycle: u64,
    trace: &mut Tracer,
) -> Result<RejSampRun, SimError> {
    cfg.validate()?;
    let tau_words = p.address_counts().tau_addrs;
    if mem.depth() < tau_words {
        return Err(SimError::Capacity { level: p.sec_level, required: tau_words, available: mem.depth() });
    }
    if let Some(missing) = (0..tau_words).find(|&a| !mem.is_written(a)) {
        return Err(SimError::Precondition(format!(
            "keystream region incomplete: word {missing} of {tau_words} not written"
        )));
    }
    check_placement(p, mem.depth(), out_base)?;

    let mut st = RejSampUnitState::new(p, cfg, out_base);
    let mut cycle = start_cycle;
    while !st.is_done() {
        st.tick(cycle, mem, trace)?;
        cycle += 1;
    }
    mem.flush();
    Ok(RejSampRun { cycles: cycle - start_cycle, ..st.run_stats() })
}
