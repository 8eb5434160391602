//! AES-CTR wrapper: key buffer B1, output buffer B2, the pipelined AES core
//! and the state machine that drains each ciphertext block into memory as two
//! 64-bit words.
//!
//! Block `b` is written to words `2b` (high half) and `2b + 1` (low half) of
//! the keystream region, so keystream byte 0 lands in the most significant
//! byte of word 0. Words past `ceil(tau/8)` are not written; bytes past `tau`
//! inside the last word are zero.

use std::collections::VecDeque;

use super::memory::{MemoryModel, Unit};
use super::trace::{TraceEvent, Tracer};
use super::{SimError, TimingConfig};
use crate::aesprg::{blocks_for, AesKey128, Block, CtrBlock, Iv, RoundState, TRANSFORMATIONS};
use crate::params::{ParameterSet, BYTES_PER_WORD};

/// Cycles of the wrapper setup spent loading the two seed words into B1.
pub const SEED_LOAD_CYCLES: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapperFsm {
    Idle,
    /// Seed load into B1, and the counter update between blocks.
    Fill,
    /// Waiting for the issued block to leave the pipeline.
    Encrypt,
    WriteHi,
    WriteLo,
    Done,
}

/// Where B1 is loaded from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedSource {
    /// Two words at `addr` and `addr + 1`, high half first.
    Memory(usize),
    /// Seed presented directly on the input bus.
    Direct(AesKey128),
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    round: RoundState,
    age: u32,
    index: u64,
}

/// Fully unrolled AES core modelled as a delay line of `latency` stages.
///
/// A block's eleven round transformations are spread over its stay in the
/// pipeline: transformation `i` is applied when the block's age reaches
/// `ceil((i + 1) * latency / 11)`. With the default latency of 21 the
/// whitening key addition happens at age 2 and each round takes two cycles,
/// the final round completing at age 21.
#[derive(Clone, Debug)]
pub struct Pipeline {
    latency: u32,
    slots: VecDeque<Slot>,
}

impl Pipeline {
    pub fn new(latency: u32) -> Self {
        Pipeline { latency, slots: VecDeque::new() }
    }

    pub fn in_flight(&self) -> usize {
        self.slots.len()
    }

    pub fn issue(&mut self, key: &AesKey128, input: Block, index: u64) {
        self.slots.push_back(Slot { round: RoundState::new(key, input), age: 0, index });
    }

    fn stage_age(&self, transformation: usize) -> u32 {
        ((transformation as u32 + 1) * self.latency).div_ceil(TRANSFORMATIONS as u32)
    }

    /// Advances every block by one cycle and returns the block that completes
    /// this cycle, if any.
    pub fn tick(&mut self) -> Option<(u64, Block)> {
        for i in 0..self.slots.len() {
            let mut slot = self.slots[i];
            slot.age += 1;
            while !slot.round.is_done() && self.stage_age(slot.round.next) <= slot.age {
                slot.round.step();
            }
            self.slots[i] = slot;
        }
        match self.slots.front() {
            Some(s) if s.age >= self.latency => {
                let s = self.slots.pop_front().unwrap();
                debug_assert!(s.round.is_done());
                Some((s.index, s.round.state))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WrapperState {
    /// Seed buffer.
    pub b1: [u8; 16],
    /// Ciphertext buffer drained into memory.
    pub b2: [u8; 16],
    /// Running 48-bit block counter.
    pub block_index: u64,
    pub pipeline: Pipeline,
    pub fsm: WrapperFsm,
    left: u32,
    seed: SeedSource,
    iv: Iv,
    blocks: u64,
    words: usize,
    tau: usize,
    cfg: TimingConfig,
    ready: bool,
}

impl WrapperState {
    pub fn new(seed: SeedSource, iv: Iv, p: &ParameterSet, cfg: &TimingConfig) -> Self {
        let idle = cfg.wrapper_setup_cycles - SEED_LOAD_CYCLES;
        let (fsm, left) = if idle == 0 { (WrapperFsm::Fill, SEED_LOAD_CYCLES) } else { (WrapperFsm::Idle, idle) };
        WrapperState {
            b1: [0; 16],
            b2: [0; 16],
            block_index: 0,
            pipeline: Pipeline::new(cfg.aes_latency),
            fsm,
            left,
            seed,
            iv,
            blocks: blocks_for(p.tau) as u64,
            words: p.address_counts().tau_addrs,
            tau: p.tau,
            cfg: *cfg,
            ready: false,
        }
    }

    pub fn is_done(&self) -> bool {
        self.fsm == WrapperFsm::Done
    }

    /// Executes one clock cycle.
    pub fn tick(&mut self, cycle: u64, mem: &mut MemoryModel, trace: &mut Tracer) -> Result<(), SimError> {
        let emerged = self.pipeline.tick();
        match self.fsm {
            WrapperFsm::Idle => {
                self.left -= 1;
                if self.left == 0 {
                    self.enter(WrapperFsm::Fill, SEED_LOAD_CYCLES);
                }
            }
            WrapperFsm::Fill if !self.ready => {
                let half = (SEED_LOAD_CYCLES - self.left) as usize;
                let word = match self.seed {
                    SeedSource::Memory(addr) => mem.read(addr + half, cycle, Unit::Wrapper)?,
                    SeedSource::Direct(key) => key.to_words()[half],
                };
                self.b1[8 * half..8 * half + 8].copy_from_slice(&word.to_be_bytes());
                self.left -= 1;
                if self.left == 0 {
                    self.ready = true;
                    trace.emit(|| TraceEvent::new(cycle, Unit::Wrapper, "b1_loaded").with_data(self.b1));
                    self.enter(WrapperFsm::Encrypt, self.cfg.aes_latency);
                }
            }
            WrapperFsm::Fill => {
                self.left -= 1;
                if self.left == 0 {
                    self.next_block();
                }
            }
            WrapperFsm::Encrypt => {
                if self.left == self.cfg.aes_latency {
                    let input = CtrBlock::new(&self.cfg.ctr, self.iv, self.block_index).to_bytes();
                    self.pipeline.issue(&AesKey128(self.b1), input, self.block_index);
                    trace.emit(|| TraceEvent::new(cycle, Unit::Wrapper, "issue").with_data(input));
                }
                self.left -= 1;
                if self.left == 0 {
                    self.enter(WrapperFsm::WriteHi, 1);
                }
            }
            WrapperFsm::WriteHi => {
                let (index, block) = emerged.ok_or_else(|| {
                    SimError::Precondition(format!("no AES output in write-back cycle {cycle}"))
                })?;
                debug_assert_eq!(index, self.block_index);
                self.b2 = block;
                trace.emit(|| TraceEvent::new(cycle, Unit::Wrapper, "b2_ready").with_data(block));
                self.write_half(0, cycle, mem)?;
                if self.cfg.writeback_cycles == 1 {
                    self.write_half(1, cycle, mem)?;
                    self.after_writeback();
                } else {
                    self.enter(WrapperFsm::WriteLo, self.cfg.writeback_cycles - 1);
                }
            }
            WrapperFsm::WriteLo => {
                if self.left == self.cfg.writeback_cycles - 1 {
                    self.write_half(1, cycle, mem)?;
                }
                self.left -= 1;
                if self.left == 0 {
                    self.after_writeback();
                }
            }
            WrapperFsm::Done => {}
        }
        Ok(())
    }

    fn enter(&mut self, fsm: WrapperFsm, left: u32) {
        self.fsm = fsm;
        self.left = left;
    }

    fn write_half(&mut self, half: usize, cycle: u64, mem: &mut MemoryModel) -> Result<(), SimError> {
        let addr = 2 * self.block_index as usize + half;
        if addr >= self.words {
            return Ok(());
        }
        let mut bytes: [u8; 8] = self.b2[8 * half..8 * half + 8].try_into().unwrap();
        // Bytes past tau in the final word are zero.
        let valid = self.tau.saturating_sub(addr * BYTES_PER_WORD).min(BYTES_PER_WORD);
        bytes[valid..].fill(0);
        mem.write(addr, u64::from_be_bytes(bytes), cycle, Unit::Wrapper)?;
        Ok(())
    }

    fn after_writeback(&mut self) {
        self.block_index += 1;
        if self.cfg.per_block_overhead > 0 {
            self.enter(WrapperFsm::Fill, self.cfg.per_block_overhead);
        } else {
            self.next_block();
        }
    }

    fn next_block(&mut self) {
        if self.block_index < self.blocks {
            self.enter(WrapperFsm::Encrypt, self.cfg.aes_latency);
        } else {
            self.enter(WrapperFsm::Done, 0);
        }
    }
}

/// Runs the wrapper to completion starting at `start_cycle`, filling the
/// keystream region of `mem`. Returns the number of cycles spent.
pub fn run_wrapper(
    seed: SeedSource,
    iv: Iv,
    p: &ParameterSet,
    cfg: &TimingConfig,
    mem: &mut MemoryModel,
    start_cycle: u64,
    trace: &mut Tracer,
) -> Result<u64, SimError> {
    cfg.validate()?;
    let required = p.required_mem_depth();
    if mem.depth() < required {
        return Err(SimError::Capacity { level: p.sec_level, required, available: mem.depth() });
    }
    let mut st = WrapperState::new(seed, iv, p, cfg);
    let mut cycle = start_cycle;
    while !st.is_done() {
        st.tick(cycle, mem, trace)?;
        cycle += 1;
    }
    mem.flush();
    Ok(cycle - start_cycle)
}
