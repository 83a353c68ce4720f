//! Functional, cycle-accurate models of multi-port memory structures.
//!
//! All structures present the same contract: a flat word-addressed space of
//! `depth * data_banks` words, up to `read_ports` reads and `write_ports`
//! writes accepted per cycle, reads returning the value the address held at
//! the start of the cycle. They differ in how that contract is realized:
//!
//! * [`AmmDesign::Ideal`]: one true multi-ported array. This is the reference
//!   model the other designs are checked against.
//! * [`AmmDesign::HntxRd`]: data banks plus one parity (reference) bank that
//!   stores the XOR of all data banks. When two reads land in the same bank,
//!   the lower port reads directly and the higher port rebuilds the word from
//!   the sibling banks and the parity bank.
//! * [`AmmDesign::BntxWr`]: two data banks stored pre-XORed with a reference
//!   bank (`phys = logical ^ ref`). Two writes into the same bank are resolved
//!   by re-pointing the reference word at the second write's offset and
//!   compensating the sibling bank so its logical value is unchanged.
//! * [`AmmDesign::HbntxRdwr`]: write side of `BntxWr` over inner banks that
//!   are provisioned with `read_ports + write_ports` read ports each, so any
//!   number of reads can decode `phys ^ ref` in one cycle.
//! * [`AmmDesign::Lvt`]: one replica bank per (read port, write port) pair and
//!   a live-value table mapping each address to its last-writer port; reads
//!   are steered to a replica owned by that writer.
//!
//! Request sets are validated before any state is touched: an illegal set
//! (bad port, bad address, oversized value, reused port, or two writes to one
//! address) leaves the instance unchanged.

mod lvt;
mod verify;
mod xor;

pub use verify::{
    check_stream_equivalence, exhaustive_equivalence, random_request_set, EquivalenceReport,
};

use std::fmt;

/// Stored word value. Values are always kept below `2^width_bits`.
pub type Word = u64;

/// Memory structure families modeled by [`AmmInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AmmDesign {
    Ideal,
    HntxRd,
    BntxWr,
    HbntxRdwr,
    Lvt,
}

impl AmmDesign {
    pub const ALL: [AmmDesign; 5] = [
        AmmDesign::Ideal,
        AmmDesign::HntxRd,
        AmmDesign::BntxWr,
        AmmDesign::HbntxRdwr,
        AmmDesign::Lvt,
    ];

    /// Short token used in CLIs and CSV files.
    pub fn token(&self) -> &'static str {
        match self {
            AmmDesign::Ideal => "ideal",
            AmmDesign::HntxRd => "hntx",
            AmmDesign::BntxWr => "bntx",
            AmmDesign::HbntxRdwr => "hbntx",
            AmmDesign::Lvt => "lvt",
        }
    }

    pub fn from_token(s: &str) -> Option<AmmDesign> {
        match s {
            "ideal" => Some(AmmDesign::Ideal),
            "hntx" | "hntx_rd" => Some(AmmDesign::HntxRd),
            "bntx" | "bntx_wr" => Some(AmmDesign::BntxWr),
            "hbntx" | "hbntx_rdwr" => Some(AmmDesign::HbntxRdwr),
            "lvt" => Some(AmmDesign::Lvt),
            _ => None,
        }
    }

    /// Number of logical data banks the design splits the address space into.
    pub fn data_banks(&self) -> usize {
        match self {
            AmmDesign::Ideal | AmmDesign::Lvt => 1,
            AmmDesign::HntxRd | AmmDesign::BntxWr | AmmDesign::HbntxRdwr => 2,
        }
    }
}

impl fmt::Display for AmmDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Shape of one memory structure instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    /// Words per data bank.
    pub depth: usize,
    /// Word width in bits, 1..=64.
    pub width_bits: u32,
    /// Logical data banks; the address space is `depth * data_banks` words.
    pub data_banks: usize,
    pub read_ports: usize,
    pub write_ports: usize,
}

impl Geometry {
    pub fn new(
        depth: usize,
        width_bits: u32,
        data_banks: usize,
        read_ports: usize,
        write_ports: usize,
    ) -> Geometry {
        Geometry { depth, width_bits, data_banks, read_ports, write_ports }
    }

    /// Total addressable words.
    pub fn addr_space(&self) -> usize {
        self.depth * self.data_banks
    }

    pub fn word_mask(&self) -> Word {
        if self.width_bits >= 64 {
            u64::MAX
        } else {
            (1u64 << self.width_bits) - 1
        }
    }
}

/// One request presented to an instance for a single cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemRequest {
    Read { port: usize, addr: usize },
    Write { port: usize, addr: usize, data: Word },
}

/// Value returned on one read port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadResponse {
    pub port: usize,
    pub value: Word,
}

/// Outcome of one accepted cycle: read responses in ascending port order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleResult {
    pub reads: Vec<ReadResponse>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmmError {
    /// The design cannot realize the requested geometry.
    UnsupportedGeometry(String),
    /// The per-cycle request set violates a port, address, or width rule.
    IllegalRequestSet(String),
}

impl fmt::Display for AmmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmmError::UnsupportedGeometry(msg) => write!(f, "unsupported geometry: {msg}"),
            AmmError::IllegalRequestSet(msg) => write!(f, "illegal request set: {msg}"),
        }
    }
}

impl std::error::Error for AmmError {}

/// Shape of one physical bank in a provisioned structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankShape {
    pub depth: usize,
    pub width_bits: u32,
    pub read_ports: usize,
    pub write_ports: usize,
}

/// Physical resources a design needs for a geometry. Cost accounting charges
/// exactly what is listed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provisioning {
    pub banks: Vec<BankShape>,
    /// Live-value table entries (0 for designs without a table).
    pub table_entries: usize,
    /// Bits per table entry: `ceil(log2(write_ports))`.
    pub table_bits_per_entry: u32,
}

impl Provisioning {
    pub fn total_data_bits(&self) -> u64 {
        self.banks.iter().map(|b| b.depth as u64 * b.width_bits as u64).sum()
    }

    pub fn table_bits(&self) -> u64 {
        self.table_entries as u64 * self.table_bits_per_entry as u64
    }
}

fn ceil_log2(n: usize) -> u32 {
    debug_assert!(n > 0);
    (n as u64).next_power_of_two().trailing_zeros()
}

/// Validates `geom` against `design` and returns the physical bank layout.
///
/// Geometry rules:
/// * `Ideal`: any port counts; one true multi-port array.
/// * `HntxRd`: exactly 2R1W over at least two data banks, plus one parity bank.
/// * `BntxWr`: exactly 1R2W over exactly two data banks, plus one reference
///   bank. The write-conflict fixup compensates the single sibling bank, which
///   is only possible with two data banks.
/// * `HbntxRdwr`: nR2W with n >= 2; two data banks plus one reference bank,
///   every inner bank carrying `n + m` read ports and one write port.
/// * `Lvt`: `read_ports * write_ports` full-size replicas plus the table;
///   requires more than one port in total, otherwise it degenerates to a
///   plain single-port bank.
pub fn provisioning(design: AmmDesign, geom: &Geometry) -> Result<Provisioning, AmmError> {
    if geom.depth == 0 {
        return Err(AmmError::UnsupportedGeometry("depth must be positive".into()));
    }
    if geom.width_bits == 0 || geom.width_bits > 64 {
        return Err(AmmError::UnsupportedGeometry(format!(
            "width_bits {} outside 1..=64",
            geom.width_bits
        )));
    }
    if geom.read_ports == 0 && geom.write_ports == 0 {
        return Err(AmmError::UnsupportedGeometry("no ports requested".into()));
    }
    let n = geom.read_ports;
    let m = geom.write_ports;
    let bank = |depth: usize, r: usize, w: usize| BankShape {
        depth,
        width_bits: geom.width_bits,
        read_ports: r,
        write_ports: w,
    };
    match design {
        AmmDesign::Ideal => {
            if geom.data_banks == 0 {
                return Err(AmmError::UnsupportedGeometry("data_banks must be positive".into()));
            }
            Ok(Provisioning {
                banks: vec![bank(geom.addr_space(), n, m)],
                table_entries: 0,
                table_bits_per_entry: 0,
            })
        }
        AmmDesign::HntxRd => {
            if n != 2 || m != 1 {
                return Err(AmmError::UnsupportedGeometry(format!(
                    "hntx provides exactly 2R1W, requested {n}R{m}W"
                )));
            }
            if geom.data_banks < 2 {
                return Err(AmmError::UnsupportedGeometry(
                    "hntx needs at least two data banks".into(),
                ));
            }
            let mut banks = vec![bank(geom.depth, 1, 1); geom.data_banks];
            banks.push(bank(geom.depth, 1, 1)); // parity bank
            Ok(Provisioning { banks, table_entries: 0, table_bits_per_entry: 0 })
        }
        AmmDesign::BntxWr => {
            if n != 1 || m != 2 {
                return Err(AmmError::UnsupportedGeometry(format!(
                    "bntx provides exactly 1R2W, requested {n}R{m}W"
                )));
            }
            if geom.data_banks != 2 {
                return Err(AmmError::UnsupportedGeometry(
                    "bntx needs exactly two data banks".into(),
                ));
            }
            // The conflict fixup reads the reference bank at both offsets.
            let banks =
                vec![bank(geom.depth, 1, 1), bank(geom.depth, 1, 1), bank(geom.depth, 2, 1)];
            Ok(Provisioning { banks, table_entries: 0, table_bits_per_entry: 0 })
        }
        AmmDesign::HbntxRdwr => {
            if m != 2 || n < 2 {
                return Err(AmmError::UnsupportedGeometry(format!(
                    "hbntx provides nR2W with n >= 2, requested {n}R{m}W"
                )));
            }
            if geom.data_banks != 2 {
                return Err(AmmError::UnsupportedGeometry(
                    "hbntx needs exactly two data banks".into(),
                ));
            }
            // Composition rule: every inner bank carries n + m read ports and
            // one write port, so a 2R2W structure is built from 4R1W banks.
            let banks = vec![bank(geom.depth, n + m, 1); 3];
            Ok(Provisioning { banks, table_entries: 0, table_bits_per_entry: 0 })
        }
        AmmDesign::Lvt => {
            if n == 0 || m == 0 {
                return Err(AmmError::UnsupportedGeometry(
                    "lvt needs at least one port of each kind".into(),
                ));
            }
            if n * m < 2 {
                return Err(AmmError::UnsupportedGeometry(
                    "lvt with a single 1R1W replica is not a multi-port structure".into(),
                ));
            }
            if geom.data_banks != 1 {
                return Err(AmmError::UnsupportedGeometry(
                    "lvt replicas already span the full space; use data_banks = 1".into(),
                ));
            }
            let banks = vec![bank(geom.addr_space(), 1, 1); n * m];
            Ok(Provisioning {
                banks,
                table_entries: geom.addr_space(),
                table_bits_per_entry: ceil_log2(m),
            })
        }
    }
}

/// One instantiated memory structure with mutable physical state.
#[derive(Debug, Clone)]
pub struct AmmInstance {
    design: AmmDesign,
    geom: Geometry,
    /// Physical banks, zero-initialized. Layout depends on the design; see
    /// [`AmmInstance::dump`] for the observable order.
    banks: Vec<Vec<Word>>,
    /// Last-writer port per address (Lvt only, empty otherwise).
    lvt: Vec<Option<u16>>,
}

impl AmmInstance {
    pub fn new(design: AmmDesign, geom: Geometry) -> Result<AmmInstance, AmmError> {
        let prov = provisioning(design, &geom)?;
        let banks = prov.banks.iter().map(|b| vec![0u64; b.depth]).collect();
        let lvt = if design == AmmDesign::Lvt { vec![None; geom.addr_space()] } else { Vec::new() };
        Ok(AmmInstance { design, geom, banks, lvt })
    }

    pub fn design(&self) -> AmmDesign {
        self.design
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn phys_bank_count(&self) -> usize {
        self.banks.len()
    }

    pub fn phys_word(&self, bank: usize, offset: usize) -> Word {
        self.banks[bank][offset]
    }

    /// Last-writer port recorded for `addr`, if the design keeps a table.
    pub fn lvt_entry(&self, addr: usize) -> Option<usize> {
        self.lvt.get(addr).copied().flatten().map(|p| p as usize)
    }

    /// Splits a flat address into (data bank, offset) by block mapping.
    fn bank_offset(&self, addr: usize) -> (usize, usize) {
        (addr / self.geom.depth, addr % self.geom.depth)
    }

    /// Applies one cycle's request set. On error the state is unchanged.
    pub fn step(&mut self, requests: &[MemRequest]) -> Result<CycleResult, AmmError> {
        self.validate(requests)?;
        let mut reads: Vec<(usize, usize)> = Vec::new();
        let mut writes: Vec<(usize, usize, Word)> = Vec::new();
        for req in requests {
            match *req {
                MemRequest::Read { port, addr } => reads.push((port, addr)),
                MemRequest::Write { port, addr, data } => writes.push((port, addr, data)),
            }
        }
        reads.sort_unstable();
        writes.sort_unstable();
        let result = match self.design {
            AmmDesign::Ideal => self.step_ideal(&reads, &writes),
            AmmDesign::HntxRd => self.step_hntx_rd(&reads, &writes),
            AmmDesign::BntxWr | AmmDesign::HbntxRdwr => self.step_bntx_family(&reads, &writes),
            AmmDesign::Lvt => self.step_lvt(&reads, &writes),
        };
        Ok(result)
    }

    fn validate(&self, requests: &[MemRequest]) -> Result<(), AmmError> {
        let space = self.geom.addr_space();
        let mask = self.geom.word_mask();
        let mut read_ports_seen = 0u64;
        let mut write_ports_seen = 0u64;
        let mut write_addrs: Vec<usize> = Vec::new();
        for req in requests {
            match *req {
                MemRequest::Read { port, addr } => {
                    if port >= self.geom.read_ports {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "read port {port} out of range (have {})",
                            self.geom.read_ports
                        )));
                    }
                    if addr >= space {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "read address {addr} outside space of {space} words"
                        )));
                    }
                    if read_ports_seen & (1 << port) != 0 {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "read port {port} used twice in one cycle"
                        )));
                    }
                    read_ports_seen |= 1 << port;
                }
                MemRequest::Write { port, addr, data } => {
                    if port >= self.geom.write_ports {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "write port {port} out of range (have {})",
                            self.geom.write_ports
                        )));
                    }
                    if addr >= space {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "write address {addr} outside space of {space} words"
                        )));
                    }
                    if data & !mask != 0 {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "write data {data:#x} wider than {} bits",
                            self.geom.width_bits
                        )));
                    }
                    if write_ports_seen & (1 << port) != 0 {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "write port {port} used twice in one cycle"
                        )));
                    }
                    write_ports_seen |= 1 << port;
                    if write_addrs.contains(&addr) {
                        return Err(AmmError::IllegalRequestSet(format!(
                            "two writes to address {addr} in one cycle"
                        )));
                    }
                    write_addrs.push(addr);
                }
            }
        }
        Ok(())
    }

    /// Reads then writes against the single true multi-port array.
    fn step_ideal(&mut self, reads: &[(usize, usize)], writes: &[(usize, usize, Word)]) -> CycleResult {
        let mut result = CycleResult::default();
        for &(port, addr) in reads {
            result.reads.push(ReadResponse { port, value: self.banks[0][addr] });
        }
        for &(_, addr, data) in writes {
            self.banks[0][addr] = data;
        }
        result
    }

    /// Value at `addr` as visible between cycles. Never changes state.
    pub fn logical_read(&self, addr: usize) -> Word {
        assert!(addr < self.geom.addr_space(), "logical_read out of range");
        match self.design {
            AmmDesign::Ideal => self.banks[0][addr],
            AmmDesign::HntxRd => {
                let (b, off) = self.bank_offset(addr);
                self.banks[b][off]
            }
            AmmDesign::BntxWr | AmmDesign::HbntxRdwr => {
                let (b, off) = self.bank_offset(addr);
                let ref_bank = self.geom.data_banks;
                self.banks[b][off] ^ self.banks[ref_bank][off]
            }
            AmmDesign::Lvt => match self.lvt[addr] {
                // Replica row 0 is as good as any: every replica owned by the
                // last writer holds the newest value.
                Some(p) => self.banks[p as usize][addr],
                None => 0,
            },
        }
    }

    /// Full physical state as text, one line per word: `bank:offset:hex`.
    ///
    /// Banks appear in physical index order (data banks first, then the
    /// parity or reference bank; for Lvt, replica `(read_port, write_port)`
    /// lives at index `read_port * write_ports + write_port`). Values are
    /// lowercase hex padded to the word's nibble width.
    pub fn dump(&self) -> String {
        let nibbles = ((self.geom.width_bits + 3) / 4) as usize;
        let mut out = String::new();
        for (b, bank) in self.banks.iter().enumerate() {
            for (off, value) in bank.iter().enumerate() {
                out.push_str(&format!("{b}:{off}:{value:0nibbles$x}\n"));
            }
        }
        out
    }
}
