//! Central controller: executes decoded instructions against the memory and
//! the two functional units.
//!
//! Program rules:
//!
//! * `LOAD_SEED` with `wen = 1` writes the seed to `waddr` and `waddr + 1`
//!   (two host cycles); with `wen = 0` it writes nothing.
//! * `RUN_PRG` and `RUN_FULL` need an earlier effective `LOAD_SEED`; the
//!   wrapper loads B1 from the last seed address.
//! * `RUN_REJSAMP` needs a keystream generated at the same level.
//! * `READ_RESULT` must name the level and output base of the last sampling
//!   run, and nothing but `NOP` may follow it.
//!
//! Host transfers (`LOAD_SEED`, `READ_RESULT`, `NOP`) advance the global
//! clock but are not part of the reported core cycle count.

use super::isa::{decode, encode, Instruction, Opcode};
use super::memory::{MemoryModel, Unit};
use super::rejsamp::{check_placement, run_rejsamp_unit};
use super::trace::{self, TraceEvent, Tracer};
use super::wrapper::{run_wrapper, SeedSource};
use super::{CycleReport, SimError, TimingConfig};
use crate::aesprg::{AesKey128, Iv};
use crate::params::{builtin_params, ParameterSet, SecLevel};
use crate::sampler::{unpack_words, FieldVector};

/// Outcome of [`run_program`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramOutput {
    pub report: CycleReport,
    pub result: FieldVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SamplingResult {
    level: SecLevel,
    base: usize,
}

/// A coprocessor instance. Single-threaded; independent instances share
/// nothing.
#[derive(Debug)]
pub struct Simulator {
    cfg: TimingConfig,
    mem: MemoryModel,
    trace: Tracer,
    cycle: u64,
    wrapper_cycles: u64,
    rejsamp_cycles: u64,
    stall_cycles: u64,
    seed_addr: Option<usize>,
    keystream_level: Option<SecLevel>,
    sampled: Option<SamplingResult>,
    read_done: bool,
}

impl Simulator {
    pub fn new(cfg: TimingConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        Ok(Simulator {
            mem: MemoryModel::new(cfg.mem_depth),
            cfg,
            trace: Tracer::disabled(),
            cycle: 0,
            wrapper_cycles: 0,
            rejsamp_cycles: 0,
            stall_cycles: 0,
            seed_addr: None,
            keystream_level: None,
            sampled: None,
            read_done: false,
        })
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Tracer::enabled();
        self
    }

    pub fn memory(&self) -> &MemoryModel {
        &self.mem
    }

    /// Global clock, including host transfer cycles.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn report(&self) -> CycleReport {
        CycleReport::new(self.wrapper_cycles, self.rejsamp_cycles, self.stall_cycles, self.cfg.freq_hz)
    }

    /// Unit events merged with the memory access log.
    pub fn trace_events(&self) -> Vec<TraceEvent> {
        trace::merge(self.trace.events(), self.mem.log())
    }

    pub fn trace_csv(&self) -> String {
        trace::to_csv(&self.trace_events())
    }

    /// Decodes and runs a whole program, returning the drained result.
    pub fn run(&mut self, words: &[u32], seed: &AesKey128, iv: Iv) -> Result<ProgramOutput, SimError> {
        let mut result = None;
        for (index, &word) in words.iter().enumerate() {
            let ins = decode(word)?;
            if let Some(fv) = self.execute(index, &ins, seed, iv)? {
                result = Some(fv);
            }
        }
        let result = result.ok_or_else(|| SimError::Program {
            index: words.len(),
            reason: "program ended without READ_RESULT".into(),
        })?;
        Ok(ProgramOutput { report: self.report(), result })
    }

    /// Executes one instruction; `READ_RESULT` yields the output vector.
    pub fn execute(
        &mut self,
        index: usize,
        ins: &Instruction,
        seed: &AesKey128,
        iv: Iv,
    ) -> Result<Option<FieldVector>, SimError> {
        let program = |reason: String| SimError::Program { index, reason };
        if self.read_done && ins.op != Opcode::Nop {
            return Err(program(format!("{} after READ_RESULT", ins.op)));
        }
        self.trace.emit(|| {
            TraceEvent::new(self.cycle, Unit::Controller, "decode").with_data(encode(ins).unwrap_or(0).to_be_bytes())
        });
        let level = || ins.level().ok_or(SimError::UnsupportedLevel(ins.sec_level));
        match ins.op {
            Opcode::Nop => self.cycle += 1,
            Opcode::LoadSeed => {
                if ins.wen {
                    let addr = ins.waddr as usize;
                    for (i, word) in seed.to_words().into_iter().enumerate() {
                        self.mem.write(addr + i, word, self.cycle, Unit::Host)?;
                        self.cycle += 1;
                    }
                    self.seed_addr = Some(addr);
                } else {
                    self.cycle += 1;
                }
            }
            Opcode::RunPrg => {
                let p = builtin_params(level()?);
                self.run_prg(&p, iv).map_err(|e| self.annotate(index, e))?;
            }
            Opcode::RunRejSamp => {
                let p = builtin_params(level()?);
                if self.keystream_level != Some(p.sec_level) {
                    return Err(program(format!("RUN_REJSAMP at {} without a {} keystream", p.sec_level, p.sec_level)));
                }
                self.run_sampler(&p, ins.waddr as usize)?;
            }
            Opcode::RunFull => {
                let p = builtin_params(level()?);
                self.check_capacity(&p)?;
                // Validate the output placement before spending cycles on the PRG.
                check_placement(&p, self.mem.depth(), ins.waddr as usize)?;
                self.run_prg(&p, iv).map_err(|e| self.annotate(index, e))?;
                self.run_sampler(&p, ins.waddr as usize)?;
            }
            Opcode::ReadResult => {
                let lvl = level()?;
                let sampled = self.sampled.ok_or_else(|| program("READ_RESULT before any sampling run".into()))?;
                if sampled.level != lvl || sampled.base != ins.raddr as usize {
                    return Err(program(format!(
                        "READ_RESULT for {lvl} at {} but the result is {} at {}",
                        ins.raddr, sampled.level, sampled.base
                    )));
                }
                let fv = self.drain(&builtin_params(lvl), sampled.base)?;
                self.read_done = true;
                return Ok(Some(fv));
            }
        }
        Ok(None)
    }

    fn check_capacity(&self, p: &ParameterSet) -> Result<(), SimError> {
        let required = p.required_mem_depth();
        if required > self.mem.depth() {
            return Err(SimError::Capacity { level: p.sec_level, required, available: self.mem.depth() });
        }
        Ok(())
    }

    fn annotate(&self, index: usize, e: SimError) -> SimError {
        match e {
            SimError::Program { reason, .. } => SimError::Program { index, reason },
            other => other,
        }
    }

    fn run_prg(&mut self, p: &ParameterSet, iv: Iv) -> Result<(), SimError> {
        let addr = self
            .seed_addr
            .ok_or_else(|| SimError::Program { index: 0, reason: "RUN before LOAD_SEED".into() })?;
        let cycles = run_wrapper(SeedSource::Memory(addr), iv, p, &self.cfg, &mut self.mem, self.cycle, &mut self.trace)?;
        self.cycle += cycles;
        self.wrapper_cycles += cycles;
        self.keystream_level = Some(p.sec_level);
        self.sampled = None;
        Ok(())
    }

    fn run_sampler(&mut self, p: &ParameterSet, base: usize) -> Result<(), SimError> {
        let run = run_rejsamp_unit(p, &self.cfg, &mut self.mem, base, self.cycle, &mut self.trace)?;
        self.cycle += run.cycles;
        self.rejsamp_cycles += run.cycles;
        self.stall_cycles += run.stalls;
        // In-place output consumes the keystream.
        if base == 0 {
            self.keystream_level = None;
        }
        self.sampled = Some(SamplingResult { level: p.sec_level, base });
        Ok(())
    }

    fn drain(&mut self, p: &ParameterSet, base: usize) -> Result<FieldVector, SimError> {
        let words = p.address_counts().out_addrs;
        let mut out = Vec::with_capacity(words);
        for a in base..base + words {
            out.push(self.mem.read(a, self.cycle, Unit::Host)?);
            self.cycle += 1;
        }
        Ok(FieldVector::new(unpack_words(&out, p.n_prime), p.q)?)
    }
}

/// Convenience wrapper: fresh simulator, run `words`, return report and result.
pub fn run_program(words: &[u32], seed: &AesKey128, iv: Iv, cfg: &TimingConfig) -> Result<ProgramOutput, SimError> {
    Simulator::new(*cfg)?.run(words, seed, iv)
}

/// Address where [`standard_program`] stores the seed.
pub const SEED_ADDR: u16 = 1022;

/// `LOAD_SEED; RUN_FULL; READ_RESULT` for `level`.
///
/// The output goes right after the keystream when it fits in `mem_depth`
/// and is addressable with 10 bits, otherwise in place at address 0.
pub fn standard_program(level: SecLevel, mem_depth: usize) -> Vec<u32> {
    let p = builtin_params(level);
    let counts = p.address_counts();
    let disjoint = counts.tau_addrs + counts.out_addrs <= mem_depth
        && counts.tau_addrs <= super::isa::MAX_ADDR as usize
        && counts.tau_addrs + counts.out_addrs <= SEED_ADDR as usize;
    let base = if disjoint { counts.tau_addrs as u16 } else { 0 };
    [
        Instruction::new(Opcode::LoadSeed, level, 0, SEED_ADDR, true),
        Instruction::new(Opcode::RunFull, level, 0, base, false),
        Instruction::new(Opcode::ReadResult, level, base, 0, false),
    ]
    .iter()
    .map(|ins| encode(ins).expect("fields in range"))
    .collect()
}
