//! Resource-constrained cycle scheduler for traces.
//!
//! A trace is issued greedily against one memory structure (banked or
//! multi-port) plus a set of compute units. Per cycle, ready nodes are
//! considered in ascending node-id order and issued while resources last:
//! a banked structure enforces per-bank port limits, a multi-port structure
//! enforces only its global read/write port counts, and compute classes are
//! capped by their unit counts. All units are pipelined: a port or unit
//! accepts a new operation every cycle regardless of latency.
//!
//! Two pre-passes adapt the trace to the structure: accesses touching more
//! than one machine word are split into one access per word (the pieces may
//! issue in parallel), and implicit edges are added between accesses to the
//! same word so writes never reorder against other accesses to that word.

use std::collections::BTreeMap;
use std::fmt;

use crate::amm::{self, AmmDesign, Geometry};
use crate::trace::{Ddg, NodeKind};

/// How byte addresses map onto banks of a banked structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mapping {
    /// Consecutive words rotate across banks.
    Cyclic,
    /// Each bank owns one contiguous range of `depth` words.
    Block,
}

impl Mapping {
    pub fn token(&self) -> &'static str {
        match self {
            Mapping::Cyclic => "cyclic",
            Mapping::Block => "block",
        }
    }

    pub fn from_token(s: &str) -> Option<Mapping> {
        match s {
            "cyclic" => Some(Mapping::Cyclic),
            "block" => Some(Mapping::Block),
            _ => None,
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Which structure serves the memory side of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    /// `banks` single-structure partitions; port counts are per bank.
    Banking { banks: usize, mapping: Mapping },
    /// One multi-port structure; port counts are global.
    Amm { design: AmmDesign },
}

/// One candidate memory organization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemStructureConfig {
    pub kind: StructureKind,
    /// Port width in bytes (1, 2, 4, or 8); wider accesses are split.
    pub word_bytes: u32,
    /// Read ports: per bank for banking, per structure for a multi-port
    /// design.
    pub read_ports: usize,
    pub write_ports: usize,
    pub read_latency: u32,
    pub write_latency: u32,
}

impl MemStructureConfig {
    pub fn banking(
        banks: usize,
        mapping: Mapping,
        word_bytes: u32,
        read_ports: usize,
        write_ports: usize,
    ) -> MemStructureConfig {
        MemStructureConfig {
            kind: StructureKind::Banking { banks, mapping },
            word_bytes,
            read_ports,
            write_ports,
            read_latency: 1,
            write_latency: 1,
        }
    }

    pub fn amm(
        design: AmmDesign,
        word_bytes: u32,
        read_ports: usize,
        write_ports: usize,
    ) -> MemStructureConfig {
        MemStructureConfig {
            kind: StructureKind::Amm { design },
            word_bytes,
            read_ports,
            write_ports,
            read_latency: 1,
            write_latency: 1,
        }
    }

    /// Words each bank must hold to fit `total_words` of trace footprint.
    pub fn depth_for(&self, total_words: u64) -> u64 {
        let partitions = match self.kind {
            StructureKind::Banking { banks, .. } => banks as u64,
            StructureKind::Amm { design } => design.data_banks() as u64,
        };
        total_words.div_ceil(partitions).max(1)
    }
}

/// Parallel unit counts per compute latency class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComputeConfig {
    pub units: BTreeMap<u32, usize>,
}

impl ComputeConfig {
    /// `per_class` units for every latency class the trace uses.
    pub fn uniform_for(ddg: &Ddg, per_class: usize) -> ComputeConfig {
        let mut units = BTreeMap::new();
        for n in ddg.nodes() {
            if let NodeKind::Compute { latency_class } = n.kind {
                units.insert(latency_class, per_class);
            }
        }
        ComputeConfig { units }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchedError {
    /// The trace demands something the configuration cannot provide.
    ConfigTraceMismatch(String),
}

impl fmt::Display for SchedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchedError::ConfigTraceMismatch(msg) => write!(f, "config/trace mismatch: {msg}"),
        }
    }
}

impl std::error::Error for SchedError {}

/// Resource an issued node occupied, for the issue log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueUnit {
    BankRead { bank: usize, port: usize },
    BankWrite { bank: usize, port: usize },
    AmmRead { port: usize },
    AmmWrite { port: usize },
    Compute { class: u32, unit: usize },
}

impl fmt::Display for IssueUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueUnit::BankRead { bank, port } => write!(f, "bank{bank}.r{port}"),
            IssueUnit::BankWrite { bank, port } => write!(f, "bank{bank}.w{port}"),
            IssueUnit::AmmRead { port } => write!(f, "r{port}"),
            IssueUnit::AmmWrite { port } => write!(f, "w{port}"),
            IssueUnit::Compute { class, unit } => write!(f, "c{class}.{unit}"),
        }
    }
}

/// One issued operation: which trace node went where, when. Split accesses
/// log one event per word-sized piece, all carrying the original node id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IssueEvent {
    pub cycle: u64,
    pub node: usize,
    pub unit: IssueUnit,
    /// Global word address for memory pieces (meaningless for computes).
    pub word: u64,
    pub is_load: bool,
}

/// Reads and writes issued in one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PortUse {
    pub reads: u32,
    pub writes: u32,
}

/// Outcome of one schedule run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleResult {
    /// Cycles until the last node completes; 0 for an empty trace.
    pub total_cycles: u64,
    /// First issue cycle per original node (first piece for split accesses).
    pub issue_cycle: Vec<u64>,
    /// Completion cycle per original node (last piece for split accesses).
    pub completion_cycle: Vec<u64>,
    /// Memory accesses that were ready but deferred at least once by a bank
    /// port limit. Always 0 for multi-port structures.
    pub bank_conflict_stalls: u64,
    /// Issued reads/writes per cycle, indexed by cycle.
    pub port_histogram: Vec<PortUse>,
    /// Every issued operation in (cycle, node-id) order.
    pub issue_log: Vec<IssueEvent>,
}

/// Aggregate conflict statistics of a completed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictSummary {
    pub bank_conflict_stalls: u64,
    pub memory_accesses: u64,
    /// Stalled accesses per issued access; 0 for a memory-free trace.
    pub stalls_per_access: f64,
    pub peak_reads: u32,
    pub peak_writes: u32,
}

pub fn conflict_stats(result: &ScheduleResult) -> ConflictSummary {
    let memory_accesses: u64 = result
        .port_histogram
        .iter()
        .map(|p| p.reads as u64 + p.writes as u64)
        .sum();
    ConflictSummary {
        bank_conflict_stalls: result.bank_conflict_stalls,
        memory_accesses,
        stalls_per_access: if memory_accesses == 0 {
            0.0
        } else {
            result.bank_conflict_stalls as f64 / memory_accesses as f64
        },
        peak_reads: result.port_histogram.iter().map(|p| p.reads).max().unwrap_or(0),
        peak_writes: result.port_histogram.iter().map(|p| p.writes).max().unwrap_or(0),
    }
}

/// Bank index of a byte address under a banked layout.
pub fn bank_of(addr_bytes: u64, word_bytes: u32, banks: usize, mapping: Mapping, depth: u64) -> usize {
    let word = addr_bytes / word_bytes as u64;
    match mapping {
        Mapping::Cyclic => (word % banks as u64) as usize,
        Mapping::Block => ((word / depth) as usize).min(banks - 1),
    }
}

/// Byte placement of a trace's arrays in one flat address space: arrays are
/// packed in declaration order, each base rounded up to the word size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    bases: Vec<u64>,
    total_words: u64,
    word_bytes: u32,
}

impl Layout {
    pub fn new(ddg: &Ddg, word_bytes: u32) -> Layout {
        let w = word_bytes as u64;
        let mut bases = Vec::with_capacity(ddg.arrays().len());
        let mut cursor = 0u64;
        for a in ddg.arrays() {
            cursor = cursor.div_ceil(w) * w;
            bases.push(cursor);
            cursor += a.len_bytes;
        }
        Layout { bases, total_words: cursor.div_ceil(w).max(1), word_bytes }
    }

    /// Flat byte address of `addr` within array `array`.
    pub fn global_byte(&self, array: usize, addr: u64) -> u64 {
        self.bases[array] + addr
    }

    pub fn total_words(&self) -> u64 {
        self.total_words
    }

    pub fn word_bytes(&self) -> u32 {
        self.word_bytes
    }
}

/// Internal post-split node.
struct SimNode {
    orig: usize,
    /// Global word address for memory pieces.
    word: u64,
    kind: SimKind,
    deps: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SimKind {
    Load,
    Store,
    Compute { class: u32 },
}

/// Splits accesses by word, adds same-word ordering edges, and returns the
/// internal node list.
fn lower(ddg: &Ddg, layout: &Layout) -> Vec<SimNode> {
    let w = layout.word_bytes() as u64;
    let mut sim: Vec<SimNode> = Vec::with_capacity(ddg.nodes().len());
    let mut pieces: Vec<(usize, usize)> = Vec::with_capacity(ddg.nodes().len());
    // Last writer piece and readers-since per global word, for hazard edges.
    let mut last_write: BTreeMap<u64, usize> = BTreeMap::new();
    let mut readers_since: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for node in ddg.nodes() {
        let start = sim.len();
        // Dependencies on original nodes become dependencies on all their
        // pieces.
        let base_deps = |deps: &[usize]| -> Vec<usize> {
            let mut out = Vec::new();
            for &d in deps {
                let (a, b) = pieces[d];
                out.extend(a..b);
            }
            out
        };
        match node.kind {
            NodeKind::Compute { latency_class } => {
                sim.push(SimNode {
                    orig: node.id,
                    word: 0,
                    kind: SimKind::Compute { class: latency_class },
                    deps: base_deps(&node.deps),
                });
            }
            NodeKind::Load { array, addr, size } | NodeKind::Store { array, addr, size } => {
                let is_load = matches!(node.kind, NodeKind::Load { .. });
                let first = layout.global_byte(array, addr) / w;
                let last = (layout.global_byte(array, addr) + size as u64 - 1) / w;
                for word in first..=last {
                    let mut deps = base_deps(&node.deps);
                    if is_load {
                        if let Some(&wr) = last_write.get(&word) {
                            deps.push(wr);
                        }
                    } else {
                        if let Some(&wr) = last_write.get(&word) {
                            deps.push(wr);
                        }
                        if let Some(readers) = readers_since.get(&word) {
                            deps.extend(readers.iter().copied());
                        }
                    }
                    let id = sim.len();
                    sim.push(SimNode {
                        orig: node.id,
                        word,
                        kind: if is_load { SimKind::Load } else { SimKind::Store },
                        deps,
                    });
                    if is_load {
                        readers_since.entry(word).or_default().push(id);
                    } else {
                        last_write.insert(word, id);
                        readers_since.insert(word, Vec::new());
                    }
                }
            }
        }
        pieces.push((start, sim.len()));
    }
    sim
}

/// Greedy list scheduling of `ddg` on the given structure and compute units.
///
/// Deterministic: ties always break toward the smaller node id. Returns an
/// error when the trace uses a latency class with no units, or the
/// configuration itself is malformed (zero ports, an unsupported multi-port
/// geometry, a bad word size).
pub fn schedule(
    ddg: &Ddg,
    mem: &MemStructureConfig,
    compute: &ComputeConfig,
) -> Result<ScheduleResult, SchedError> {
    if ![1, 2, 4, 8].contains(&mem.word_bytes) {
        return Err(SchedError::ConfigTraceMismatch(format!(
            "word size {} not one of 1, 2, 4, 8",
            mem.word_bytes
        )));
    }
    if mem.read_ports == 0 || mem.write_ports == 0 {
        return Err(SchedError::ConfigTraceMismatch("port counts must be positive".into()));
    }
    if mem.read_latency == 0 || mem.write_latency == 0 {
        return Err(SchedError::ConfigTraceMismatch("latencies must be positive".into()));
    }
    let layout = Layout::new(ddg, mem.word_bytes);
    let banks = match mem.kind {
        StructureKind::Banking { banks, .. } => {
            if banks == 0 {
                return Err(SchedError::ConfigTraceMismatch("bank count must be positive".into()));
            }
            banks
        }
        StructureKind::Amm { design } => {
            let geom = Geometry::new(
                mem.depth_for(layout.total_words()) as usize,
                mem.word_bytes * 8,
                design.data_banks(),
                mem.read_ports,
                mem.write_ports,
            );
            if let Err(e) = amm::provisioning(design, &geom) {
                return Err(SchedError::ConfigTraceMismatch(format!(
                    "{design} cannot serve this configuration: {e}"
                )));
            }
            0
        }
    };
    for node in ddg.nodes() {
        if let NodeKind::Compute { latency_class } = node.kind {
            match compute.units.get(&latency_class) {
                Some(&n) if n > 0 => {}
                _ => {
                    return Err(SchedError::ConfigTraceMismatch(format!(
                        "no compute units for latency class {latency_class}"
                    )))
                }
            }
        }
    }

    let sim = lower(ddg, &layout);
    let depth = mem.depth_for(layout.total_words());

    let mut pending = vec![0usize; sim.len()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); sim.len()];
    for (i, node) in sim.iter().enumerate() {
        let mut uniq = node.deps.clone();
        uniq.sort_unstable();
        uniq.dedup();
        pending[i] = uniq.len();
        for d in uniq {
            children[d].push(i);
        }
    }

    // Ready ids, kept sorted ascending; ids only ever arrive once.
    let mut ready: Vec<usize> = (0..sim.len()).filter(|&i| pending[i] == 0).collect();
    let mut completions: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut deferred = vec![false; sim.len()];
    let mut issued = 0usize;
    let mut issue_cycle = vec![u64::MAX; ddg.nodes().len()];
    let mut completion_cycle = vec![0u64; ddg.nodes().len()];
    let mut stalls = 0u64;
    let mut histogram: Vec<PortUse> = Vec::new();
    let mut log: Vec<IssueEvent> = Vec::new();
    let mut total_cycles = 0u64;
    let mut cycle = 0u64;

    let mut bank_reads = vec![0usize; banks];
    let mut bank_writes = vec![0usize; banks];

    while issued < sim.len() {
        if let Some(done) = completions.remove(&cycle) {
            for id in done {
                for &child in &children[id] {
                    pending[child] -= 1;
                    if pending[child] == 0 {
                        ready.push(child);
                    }
                }
            }
            ready.sort_unstable();
        }

        let mut reads_used = 0usize;
        let mut writes_used = 0usize;
        bank_reads.iter_mut().for_each(|b| *b = 0);
        bank_writes.iter_mut().for_each(|b| *b = 0);
        let mut compute_used: BTreeMap<u32, usize> = BTreeMap::new();
        let mut use_this_cycle = PortUse::default();

        let mut kept: Vec<usize> = Vec::with_capacity(ready.len());
        for &id in ready.iter() {
            let node = &sim[id];
            let (accepted, unit, latency) = match node.kind {
                SimKind::Compute { class } => {
                    let cap = compute.units[&class];
                    let used = compute_used.entry(class).or_insert(0);
                    if *used < cap {
                        *used += 1;
                        (true, IssueUnit::Compute { class, unit: *used - 1 }, class)
                    } else {
                        (false, IssueUnit::Compute { class, unit: 0 }, 0)
                    }
                }
                SimKind::Load | SimKind::Store => {
                    let is_load = node.kind == SimKind::Load;
                    match mem.kind {
                        StructureKind::Amm { .. } => {
                            if is_load && reads_used < mem.read_ports {
                                reads_used += 1;
                                (true, IssueUnit::AmmRead { port: reads_used - 1 }, mem.read_latency)
                            } else if !is_load && writes_used < mem.write_ports {
                                writes_used += 1;
                                (true, IssueUnit::AmmWrite { port: writes_used - 1 }, mem.write_latency)
                            } else {
                                (false, IssueUnit::AmmRead { port: 0 }, 0)
                            }
                        }
                        StructureKind::Banking { banks, mapping } => {
                            let bank = bank_of(
                                node.word * mem.word_bytes as u64,
                                mem.word_bytes,
                                banks,
                                mapping,
                                depth,
                            );
                            if is_load && bank_reads[bank] < mem.read_ports {
                                bank_reads[bank] += 1;
                                (
                                    true,
                                    IssueUnit::BankRead { bank, port: bank_reads[bank] - 1 },
                                    mem.read_latency,
                                )
                            } else if !is_load && bank_writes[bank] < mem.write_ports {
                                bank_writes[bank] += 1;
                                (
                                    true,
                                    IssueUnit::BankWrite { bank, port: bank_writes[bank] - 1 },
                                    mem.write_latency,
                                )
                            } else {
                                (false, IssueUnit::BankRead { bank, port: 0 }, 0)
                            }
                        }
                    }
                }
            };
            if !accepted {
                if matches!(node.kind, SimKind::Load | SimKind::Store)
                    && matches!(mem.kind, StructureKind::Banking { .. })
                    && !deferred[id]
                {
                    deferred[id] = true;
                    stalls += 1;
                }
                kept.push(id);
                continue;
            }
            let is_mem = matches!(node.kind, SimKind::Load | SimKind::Store);
            if is_mem {
                if node.kind == SimKind::Load {
                    use_this_cycle.reads += 1;
                } else {
                    use_this_cycle.writes += 1;
                }
            }
            let done_at = cycle + latency as u64;
            completions.entry(done_at).or_default().push(id);
            issued += 1;
            total_cycles = total_cycles.max(done_at);
            let orig = node.orig;
            issue_cycle[orig] = issue_cycle[orig].min(cycle);
            completion_cycle[orig] = completion_cycle[orig].max(done_at);
            log.push(IssueEvent {
                cycle,
                node: orig,
                unit,
                word: node.word,
                is_load: node.kind == SimKind::Load,
            });
        }
        ready = kept;
        histogram.push(use_this_cycle);

        if ready.is_empty() {
            // Nothing issuable until something completes; jump ahead.
            match completions.keys().next() {
                Some(&next) if next > cycle + 1 => cycle = next,
                _ => cycle += 1,
            }
            let gap = cycle.saturating_sub(histogram.len() as u64);
            for _ in 0..gap {
                histogram.push(PortUse::default());
            }
        } else {
            cycle += 1;
        }
    }

    histogram.truncate(total_cycles as usize);
    histogram.resize(total_cycles as usize, PortUse::default());
    let issue_cycle: Vec<u64> =
        issue_cycle.into_iter().map(|c| if c == u64::MAX { 0 } else { c }).collect();
    Ok(ScheduleResult {
        total_cycles,
        issue_cycle,
        completion_cycle,
        bank_conflict_stalls: stalls,
        port_histogram: histogram,
        issue_log: log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amm::{AmmInstance, MemRequest};
    use crate::trace::DdgBuilder;
    use proptest::prelude::*;

    fn four_stride_two_loads() -> Ddg {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 64);
        for i in 0..4 {
            b.load(a, i * 16, 8, &[]);
        }
        b.build()
    }

    fn units1() -> ComputeConfig {
        ComputeConfig { units: [(1, 1), (4, 1)].into_iter().collect() }
    }

    #[test]
    fn independent_loads_fill_all_ports_in_one_cycle() {
        let ddg = four_stride_two_loads();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 4, 1);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        assert_eq!(res.total_cycles, 1);
        assert!(res.issue_cycle.iter().all(|&c| c == 0));
        assert_eq!(res.bank_conflict_stalls, 0);
        assert_eq!(res.port_histogram, vec![PortUse { reads: 4, writes: 0 }]);
    }

    #[test]
    fn stride_two_loads_serialize_on_two_cyclic_banks() {
        // Word addresses 0, 2, 4, 6 all land in bank 0 of a 2-bank cyclic
        // split, so a single read port per bank issues one load per cycle.
        let ddg = four_stride_two_loads();
        let mem = MemStructureConfig::banking(2, Mapping::Cyclic, 8, 1, 1);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        assert_eq!(res.total_cycles, 4);
        assert_eq!(res.bank_conflict_stalls, 3);
        let stats = conflict_stats(&res);
        assert_eq!(stats.memory_accesses, 4);
        assert_eq!(stats.stalls_per_access, 0.75);
        assert_eq!(stats.peak_reads, 1);
    }

    #[test]
    fn load_compute_store_chain_sums_latencies() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 16);
        let ld = b.load(a, 0, 8, &[]);
        let c = b.compute(4, &[ld]);
        b.store(a, 8, 8, &[c]);
        let ddg = b.build();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 1, 1);
        let res = schedule(&ddg, &mem, &units1()).unwrap();
        assert_eq!(res.total_cycles, 6, "1 + 4 + 1 serial chain");
        assert_eq!(res.issue_cycle, vec![0, 1, 5]);
    }

    #[test]
    fn read_latency_delays_dependents() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 16);
        let ld = b.load(a, 0, 8, &[]);
        b.compute(1, &[ld]);
        let ddg = b.build();
        let mut mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 1, 1);
        mem.read_latency = 3;
        let res = schedule(&ddg, &mem, &units1()).unwrap();
        assert_eq!(res.issue_cycle, vec![0, 3]);
        assert_eq!(res.total_cycles, 4);
    }

    #[test]
    fn empty_trace_takes_zero_cycles() {
        let ddg = Ddg::default();
        let mem = MemStructureConfig::banking(2, Mapping::Cyclic, 8, 1, 1);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        assert_eq!(res.total_cycles, 0);
        let stats = conflict_stats(&res);
        assert_eq!(stats.memory_accesses, 0);
        assert_eq!(stats.stalls_per_access, 0.0);
    }

    #[test]
    fn bank_of_matches_the_mapping_arithmetic() {
        assert_eq!(bank_of(24, 8, 2, Mapping::Cyclic, 16), 1);
        assert_eq!(bank_of(24, 8, 2, Mapping::Block, 16), 0);
        for word in [0u64, 2, 4, 6] {
            assert_eq!(bank_of(word * 8, 8, 2, Mapping::Cyclic, 16), 0);
        }
    }

    #[test]
    fn wide_access_splits_into_word_pieces() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 16);
        let ld = b.load(a, 0, 8, &[]);
        b.compute(1, &[ld]);
        let ddg = b.build();
        // 8-byte load on a 4-byte port: two pieces, issuable in parallel.
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 4, 2, 1);
        let res = schedule(&ddg, &mem, &units1()).unwrap();
        assert_eq!(res.port_histogram[0].reads, 2);
        assert_eq!(res.issue_cycle, vec![0, 1]);
        // Same load on one port: pieces serialize, dependent waits for both.
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 4, 1, 1);
        let res = schedule(&ddg, &mem, &units1()).unwrap();
        assert_eq!(res.issue_cycle, vec![0, 2]);
        assert_eq!(res.completion_cycle[0], 2);
    }

    #[test]
    fn straddling_access_covers_both_words() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 16);
        b.load(a, 6, 4, &[]);
        let ddg = b.build();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 4, 2, 1);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        let words: Vec<u64> = res.issue_log.iter().map(|e| e.word).collect();
        assert_eq!(words, vec![1, 2]);
    }

    #[test]
    fn same_word_accesses_keep_program_order() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 8);
        b.store(a, 0, 8, &[]);
        b.load(a, 0, 8, &[]);
        b.store(a, 0, 8, &[]);
        let ddg = b.build();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 2, 2);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        // Write, then read of the written value, then overwrite: strictly
        // serialized even though the trace lists no explicit deps.
        assert!(res.issue_cycle[1] >= res.completion_cycle[0]);
        assert!(res.issue_cycle[2] >= res.completion_cycle[1]);
    }

    #[test]
    fn arrays_never_share_a_word() {
        let mut b = DdgBuilder::new();
        let a0 = b.array("A", 3);
        let a1 = b.array("B", 3);
        b.store(a0, 2, 1, &[]);
        b.store(a1, 0, 1, &[]);
        let ddg = b.build();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 1, 2);
        let res = schedule(&ddg, &mem, &ComputeConfig::default()).unwrap();
        // Bases are word-aligned, so the two stores hit distinct words and
        // may share a cycle.
        assert_eq!(res.total_cycles, 1);
    }

    #[test]
    fn missing_compute_units_are_a_config_mismatch() {
        let mut b = DdgBuilder::new();
        b.compute(9, &[]);
        let ddg = b.build();
        let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, 1, 1);
        let err = schedule(&ddg, &mem, &units1()).unwrap_err();
        assert!(matches!(err, SchedError::ConfigTraceMismatch(_)));
    }

    #[test]
    fn unsupported_multiport_geometry_is_a_config_mismatch() {
        let ddg = four_stride_two_loads();
        let mem = MemStructureConfig::amm(AmmDesign::HntxRd, 8, 4, 1);
        assert!(schedule(&ddg, &mem, &ComputeConfig::default()).is_err());
        let mem = MemStructureConfig::amm(AmmDesign::Lvt, 8, 1, 1);
        assert!(schedule(&ddg, &mem, &ComputeConfig::default()).is_err());
    }

    #[test]
    fn more_ports_never_slow_simple_traces() {
        let ddg = crate::kernels::gemm_ncubed(4, 8).unwrap();
        let compute = ComputeConfig::uniform_for(&ddg, 8);
        let mut prev = u64::MAX;
        for ports in [1, 2, 4, 8] {
            let mem = MemStructureConfig::amm(AmmDesign::Ideal, 8, ports, 2);
            let cycles = schedule(&ddg, &mem, &compute).unwrap().total_cycles;
            assert!(cycles <= prev, "{ports} ports took {cycles} > {prev}");
            prev = cycles;
        }
    }

    #[test]
    fn schedule_is_deterministic() {
        let ddg = crate::kernels::md_knn(8, 4, 7).unwrap();
        let compute = ComputeConfig::uniform_for(&ddg, 2);
        let mem = MemStructureConfig::banking(4, Mapping::Cyclic, 8, 1, 1);
        let a = schedule(&ddg, &mem, &compute).unwrap();
        let b = schedule(&ddg, &mem, &compute).unwrap();
        assert_eq!(a, b);
    }

    /// Replays the issue log's memory operations into a functional model
    /// cycle by cycle; every emitted request set must be legal.
    fn replay_into_model(ddg: &Ddg, design: AmmDesign, rports: usize, wports: usize) {
        let mem = MemStructureConfig::amm(design, 8, rports, wports);
        let compute = ComputeConfig::uniform_for(ddg, 4);
        let res = schedule(ddg, &mem, &compute).unwrap();
        let layout = Layout::new(ddg, 8);
        let geom = Geometry::new(
            mem.depth_for(layout.total_words()) as usize,
            64,
            design.data_banks(),
            rports,
            wports,
        );
        let mut inst = AmmInstance::new(design, geom).unwrap();
        let mut by_cycle: BTreeMap<u64, Vec<MemRequest>> = BTreeMap::new();
        for ev in &res.issue_log {
            match ev.unit {
                IssueUnit::AmmRead { port } => {
                    by_cycle
                        .entry(ev.cycle)
                        .or_default()
                        .push(MemRequest::Read { port, addr: ev.word as usize });
                }
                IssueUnit::AmmWrite { port } => {
                    by_cycle
                        .entry(ev.cycle)
                        .or_default()
                        .push(MemRequest::Write { port, addr: ev.word as usize, data: 0 });
                }
                _ => {}
            }
        }
        for (cycle, reqs) in by_cycle {
            inst.step(&reqs).unwrap_or_else(|e| panic!("cycle {cycle}: {e}"));
        }
    }

    #[test]
    fn emitted_request_sets_are_always_legal() {
        let gemm = crate::kernels::gemm_ncubed(4, 8).unwrap();
        let kmp = crate::kernels::kmp(3, 48, 7).unwrap();
        let fft = crate::kernels::fft_strided(16).unwrap();
        for ddg in [&gemm, &kmp, &fft] {
            replay_into_model(ddg, AmmDesign::HbntxRdwr, 2, 2);
            replay_into_model(ddg, AmmDesign::HbntxRdwr, 3, 2);
            replay_into_model(ddg, AmmDesign::Lvt, 4, 2);
            replay_into_model(ddg, AmmDesign::Ideal, 4, 2);
        }
    }

    /// Random small graphs for the safety properties.
    fn arb_ddg() -> impl Strategy<Value = Ddg> {
        let node = (
            0u8..3,
            proptest::collection::vec(any::<proptest::sample::Index>(), 0..3),
            0u64..96,
            prop_oneof![Just(1u32), Just(2), Just(4)],
        );
        proptest::collection::vec(node, 1..60).prop_map(|raw| {
            let mut b = DdgBuilder::new();
            let a = b.array("A", 128);
            for (i, (kind, dep_idx, addr, lat)) in raw.into_iter().enumerate() {
                let deps: Vec<usize> = dep_idx.iter().filter(|_| i > 0).map(|d| d.index(i)).collect();
                match kind {
                    0 => b.load(a, addr, 4, &deps),
                    1 => b.store(a, addr, 4, &deps),
                    _ => b.compute(lat, &deps),
                };
            }
            b.build()
        })
    }

    fn arb_config() -> impl Strategy<Value = MemStructureConfig> {
        prop_oneof![
            (1usize..5, prop_oneof![Just(Mapping::Cyclic), Just(Mapping::Block)], 1usize..3, 1usize..3)
                .prop_map(|(banks, mapping, r, w)| MemStructureConfig::banking(banks, mapping, 4, r, w)),
            (1usize..5, 1usize..3)
                .prop_map(|(r, w)| MemStructureConfig::amm(AmmDesign::Ideal, 4, r, w)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dependencies_and_resources_are_respected(ddg in arb_ddg(), mem in arb_config()) {
            let compute = ComputeConfig::uniform_for(&ddg, 2);
            let res = schedule(&ddg, &mem, &compute).unwrap();

            for node in ddg.nodes() {
                for &d in &node.deps {
                    prop_assert!(
                        res.issue_cycle[node.id] >= res.completion_cycle[d],
                        "node {} issued at {} before dep {} completed at {}",
                        node.id, res.issue_cycle[node.id], d, res.completion_cycle[d]
                    );
                }
            }

            let depth = mem.depth_for(Layout::new(&ddg, mem.word_bytes).total_words());
            let mut per_cycle: BTreeMap<u64, (usize, usize, BTreeMap<usize, (usize, usize)>, BTreeMap<u32, usize>)> = BTreeMap::new();
            for ev in &res.issue_log {
                let slot = per_cycle.entry(ev.cycle).or_default();
                match ev.unit {
                    IssueUnit::AmmRead { .. } => slot.0 += 1,
                    IssueUnit::AmmWrite { .. } => slot.1 += 1,
                    IssueUnit::BankRead { bank, .. } => slot.2.entry(bank).or_default().0 += 1,
                    IssueUnit::BankWrite { bank, .. } => slot.2.entry(bank).or_default().1 += 1,
                    IssueUnit::Compute { class, .. } => *slot.3.entry(class).or_default() += 1,
                }
            }
            for (cycle, (r, w, banks_used, classes)) in per_cycle {
                match mem.kind {
                    StructureKind::Amm { .. } => {
                        prop_assert!(r <= mem.read_ports && w <= mem.write_ports, "cycle {cycle}");
                        prop_assert_eq!(res.bank_conflict_stalls, 0);
                    }
                    StructureKind::Banking { banks, mapping } => {
                        let _ = (banks, mapping, depth);
                        for (bank, (br, bw)) in banks_used {
                            prop_assert!(br <= mem.read_ports, "cycle {cycle} bank {bank}");
                            prop_assert!(bw <= mem.write_ports, "cycle {cycle} bank {bank}");
                        }
                    }
                }
                for (class, used) in classes {
                    prop_assert!(used <= compute.units[&class], "cycle {cycle} class {class}");
                }
            }
        }

        #[test]
        fn cycle_count_respects_known_bounds(ddg in arb_ddg()) {
            let compute = ComputeConfig::uniform_for(&ddg, 2);
            let mem = MemStructureConfig::amm(AmmDesign::Ideal, 4, 2, 2);
            let res = schedule(&ddg, &mem, &compute).unwrap();

            // Critical path is a hard lower bound.
            let lat = |id: usize| -> u64 {
                match ddg.nodes()[id].kind {
                    NodeKind::Compute { latency_class } => latency_class as u64,
                    NodeKind::Load { .. } => mem.read_latency as u64,
                    NodeKind::Store { .. } => mem.write_latency as u64,
                }
            };
            let mut path = vec![0u64; ddg.nodes().len()];
            let mut critical = 0;
            for node in ddg.nodes() {
                let start = node.deps.iter().map(|&d| path[d]).max().unwrap_or(0);
                path[node.id] = start + lat(node.id);
                critical = critical.max(path[node.id]);
            }
            prop_assert!(res.total_cycles >= critical);

            // Fully serial execution, one word-sized piece at a time, is a
            // hard upper bound.
            let pieces = |id: usize| -> u64 {
                match ddg.nodes()[id].kind {
                    NodeKind::Compute { .. } => 1,
                    NodeKind::Load { addr, size, .. } | NodeKind::Store { addr, size, .. } => {
                        (addr + size as u64 - 1) / 4 - addr / 4 + 1
                    }
                }
            };
            let serial: u64 = (0..ddg.nodes().len()).map(|i| pieces(i) * lat(i)).sum();
            prop_assert!(res.total_cycles <= serial);
        }
    }
}
