//! Event trace of a simulation, exported as CSV rows of
//! `cycle,unit,event,addr,data`.

use std::fmt::Write as _;

use super::memory::{Access, AccessKind, Unit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub cycle: u64,
    pub unit: Unit,
    pub event: &'static str,
    pub addr: Option<usize>,
    /// Hex payload, empty when the event carries none.
    pub data: String,
}

impl TraceEvent {
    pub fn new(cycle: u64, unit: Unit, event: &'static str) -> Self {
        TraceEvent { cycle, unit, event, addr: None, data: String::new() }
    }

    pub fn with_addr(mut self, addr: usize) -> Self {
        self.addr = Some(addr);
        self
    }

    pub fn with_data(mut self, data: impl AsRef<[u8]>) -> Self {
        self.data = hex::encode(data);
        self
    }
}

impl From<&Access> for TraceEvent {
    fn from(a: &Access) -> Self {
        let event = match a.kind {
            AccessKind::Read => "mem_read",
            AccessKind::Write => "mem_write",
        };
        TraceEvent::new(a.cycle, a.unit, event).with_addr(a.addr).with_data(a.data.to_be_bytes())
    }
}

/// Optional sink for unit events; disabled tracing costs one branch.
#[derive(Clone, Debug, Default)]
pub struct Tracer {
    events: Option<Vec<TraceEvent>>,
}

impl Tracer {
    pub fn enabled() -> Self {
        Tracer { events: Some(Vec::new()) }
    }

    pub fn disabled() -> Self {
        Tracer { events: None }
    }

    pub fn is_enabled(&self) -> bool {
        self.events.is_some()
    }

    pub fn emit(&mut self, make: impl FnOnce() -> TraceEvent) {
        if let Some(ev) = self.events.as_mut() {
            ev.push(make());
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        self.events.as_deref().unwrap_or(&[])
    }
}

/// Merges unit events with the memory access log, ordered by cycle.
pub fn merge(events: &[TraceEvent], accesses: &[Access]) -> Vec<TraceEvent> {
    let mut all: Vec<TraceEvent> = events.iter().cloned().chain(accesses.iter().map(TraceEvent::from)).collect();
    all.sort_by_key(|e| e.cycle);
    all
}

pub fn to_csv(events: &[TraceEvent]) -> String {
    let mut s = String::from("cycle,unit,event,addr,data\n");
    for e in events {
        let addr = e.addr.map(|a| a.to_string()).unwrap_or_default();
        writeln!(s, "{},{},{},{},{}", e.cycle, e.unit, e.event, addr, e.data).unwrap();
    }
    s
}
