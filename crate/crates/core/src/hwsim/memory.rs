//! Dual-port 64-bit word memory with per-cycle port accounting.
//!
//! Each cycle offers two ports. Any mix of two reads and writes may complete
//! in one cycle, except two writes to the same address, which is a fault.
//! A write becomes visible to reads from the next cycle on; a same-cycle read
//! of the written address returns the old contents.

use std::fmt;

use thiserror::Error;

pub const DEFAULT_DEPTH: usize = 1024;
pub const PORTS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MemError {
    #[error("address {addr} out of range for depth {depth}")]
    OutOfRange { addr: usize, depth: usize },
    #[error("write-write conflict on address {addr} in cycle {cycle}")]
    WriteConflict { addr: usize, cycle: u64 },
    #[error("more than two accesses in cycle {cycle}")]
    PortsExhausted { cycle: u64 },
    #[error("read of uninitialised address {addr} in cycle {cycle}")]
    Uninitialized { addr: usize, cycle: u64 },
    #[error("access in cycle {cycle} after cycle {last} was already used")]
    NonMonotonic { cycle: u64, last: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Port {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Read,
    Write,
}

/// Functional block that issued an access or trace event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    Host,
    Controller,
    Wrapper,
    RejSamp,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Host => "host",
            Unit::Controller => "controller",
            Unit::Wrapper => "wrapper",
            Unit::RejSamp => "rejsamp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Access {
    pub cycle: u64,
    pub port: Port,
    pub kind: AccessKind,
    pub addr: usize,
    pub data: u64,
    pub unit: Unit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryModel {
    words: Vec<u64>,
    written: Vec<bool>,
    /// Writes issued in `open_cycle`, committed once a later cycle is touched.
    staged: Vec<(usize, u64)>,
    open_cycle: Option<u64>,
    /// Number of entries of `log` belonging to `open_cycle`.
    open_accesses: usize,
    log: Vec<Access>,
}

impl Default for MemoryModel {
    fn default() -> Self {
        MemoryModel::new(DEFAULT_DEPTH)
    }
}

impl MemoryModel {
    pub fn new(depth: usize) -> Self {
        MemoryModel {
            words: vec![0; depth],
            written: vec![false; depth],
            staged: Vec::new(),
            open_cycle: None,
            open_accesses: 0,
            log: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.words.len()
    }

    pub fn log(&self) -> &[Access] {
        &self.log
    }

    pub fn write(&mut self, addr: usize, word: u64, cycle: u64, unit: Unit) -> Result<(), MemError> {
        self.check_addr(addr)?;
        let port = self.claim_port(cycle)?;
        if self.staged.iter().any(|&(a, _)| a == addr) {
            return Err(MemError::WriteConflict { addr, cycle });
        }
        self.staged.push((addr, word));
        self.record(Access { cycle, port, kind: AccessKind::Write, addr, data: word, unit });
        Ok(())
    }

    pub fn read(&mut self, addr: usize, cycle: u64, unit: Unit) -> Result<u64, MemError> {
        self.check_addr(addr)?;
        let port = self.claim_port(cycle)?;
        if !self.written[addr] {
            return Err(MemError::Uninitialized { addr, cycle });
        }
        let data = self.words[addr];
        self.record(Access { cycle, port, kind: AccessKind::Read, addr, data, unit });
        Ok(data)
    }

    /// Committed contents, ignoring writes of the still-open cycle.
    pub fn peek(&self, addr: usize) -> Option<u64> {
        self.written.get(addr).copied().unwrap_or(false).then(|| self.words[addr])
    }

    pub fn is_written(&self, addr: usize) -> bool {
        self.written.get(addr).copied().unwrap_or(false)
    }

    /// Commits every outstanding write.
    pub fn flush(&mut self) {
        for (addr, word) in self.staged.drain(..) {
            self.words[addr] = word;
            self.written[addr] = true;
        }
    }

    /// Committed words of `[start, start + len)`, `None` for unwritten ones.
    pub fn region(&self, start: usize, len: usize) -> Vec<Option<u64>> {
        (start..start + len).map(|a| self.peek(a)).collect()
    }

    fn check_addr(&self, addr: usize) -> Result<(), MemError> {
        if addr >= self.words.len() {
            return Err(MemError::OutOfRange { addr, depth: self.words.len() });
        }
        Ok(())
    }

    fn claim_port(&mut self, cycle: u64) -> Result<Port, MemError> {
        match self.open_cycle {
            Some(open) if cycle < open => return Err(MemError::NonMonotonic { cycle, last: open }),
            Some(open) if cycle == open => {}
            _ => {
                self.flush();
                self.open_cycle = Some(cycle);
                self.open_accesses = 0;
            }
        }
        let port = match self.open_accesses {
            0 => Port::A,
            1 => Port::B,
            _ => return Err(MemError::PortsExhausted { cycle }),
        };
        Ok(port)
    }

    fn record(&mut self, access: Access) {
        self.open_accesses += 1;
        self.log.push(access);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_then_load() {
        let mut m = MemoryModel::default();
        m.write(5, 0xdead_beef, 10, Unit::Host).unwrap();
        assert_eq!(m.read(5, 11, Unit::Host).unwrap(), 0xdead_beef);
    }

    #[test]
    fn write_visible_next_cycle_only() {
        let mut m = MemoryModel::default();
        m.write(5, 1, 0, Unit::Host).unwrap();
        m.write(5, 2, 1, Unit::Host).unwrap();
        assert_eq!(m.read(5, 1, Unit::Host).unwrap(), 1);
        assert_eq!(m.read(5, 2, Unit::Host).unwrap(), 2);
    }

    #[test]
    fn dual_port_read_and_write_same_cycle() {
        let mut m = MemoryModel::default();
        m.write(7, 9, 0, Unit::Host).unwrap();
        m.write(5, 3, 4, Unit::Wrapper).unwrap();
        assert_eq!(m.read(7, 4, Unit::RejSamp).unwrap(), 9);
        let ports: Vec<_> = m.log().iter().filter(|a| a.cycle == 4).map(|a| a.port).collect();
        assert_eq!(ports, vec![Port::A, Port::B]);
    }

    #[test]
    fn same_cycle_write_conflict() {
        let mut m = MemoryModel::default();
        m.write(5, 1, 3, Unit::Host).unwrap();
        assert_eq!(m.write(5, 2, 3, Unit::Host), Err(MemError::WriteConflict { addr: 5, cycle: 3 }));
    }

    #[test]
    fn two_writes_to_different_addresses_fit() {
        let mut m = MemoryModel::default();
        m.write(1, 1, 0, Unit::Host).unwrap();
        m.write(2, 2, 0, Unit::Host).unwrap();
        assert_eq!(m.read(3, 0, Unit::Host), Err(MemError::PortsExhausted { cycle: 0 }));
    }

    #[test]
    fn range_and_initialisation() {
        let mut m = MemoryModel::new(16);
        assert_eq!(m.write(16, 0, 0, Unit::Host), Err(MemError::OutOfRange { addr: 16, depth: 16 }));
        assert_eq!(m.read(3, 0, Unit::Host), Err(MemError::Uninitialized { addr: 3, cycle: 0 }));
        m.write(3, 0, 1, Unit::Host).unwrap();
        assert_eq!(m.read(3, 0, Unit::Host), Err(MemError::NonMonotonic { cycle: 0, last: 1 }));
    }

    #[test]
    fn flush_and_region() {
        let mut m = MemoryModel::new(4);
        m.write(1, 42, 0, Unit::Host).unwrap();
        assert_eq!(m.peek(1), None);
        m.flush();
        assert_eq!(m.region(0, 3), vec![None, Some(42), None]);
    }
}
