//! Area, power, latency, and clock characterization of memory configurations.
//!
//! Two sources are supported. A *table* ingests externally produced
//! characterization data from CSV and returns entries verbatim. The
//! *analytic* model answers any buildable configuration from a small set of
//! coefficients; its absolute numbers are synthetic and only its orderings
//! are meaningful (see [`AnalyticParams`]).
//!
//! Every physical bank a design needs is charged: reference banks, replicas,
//! and table storage all come from [`crate::amm::provisioning`], so
//! multi-port structures never get free storage.

use std::collections::BTreeMap;
use std::fmt;

use crate::amm::{self, AmmDesign, Geometry};
use crate::sched::{MemStructureConfig, StructureKind};

/// Column layout of a cost CSV. The header line must match byte for byte.
pub const COST_CSV_HEADER: &str =
    "style,design,depth,word_bits,banks,read_ports,write_ports,area_um2,power_mw,read_lat,write_lat,clock_ns";

/// Which family of structure a cost key describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CostStyle {
    /// Plain banked memory; `banks` counts the partitions.
    Banking,
    /// One multi-port design; `banks` counts all physical banks it needs,
    /// reference banks and replicas included.
    Amm(AmmDesign),
}

impl CostStyle {
    /// `banking` or `amm`, as written in the style CSV column.
    pub fn style_token(&self) -> &'static str {
        match self {
            CostStyle::Banking => "banking",
            CostStyle::Amm(_) => "amm",
        }
    }

    /// The design token for the design CSV column, `-` for banking.
    pub fn design_token(&self) -> &'static str {
        match self {
            CostStyle::Banking => "-",
            CostStyle::Amm(d) => d.token(),
        }
    }
}

/// Lookup key for one characterized configuration. `depth` is words per
/// physical bank and `word_bits` the port width; port counts are per bank
/// for banking and per structure for a multi-port design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CostKey {
    pub style: CostStyle,
    pub depth: u64,
    pub word_bits: u32,
    pub banks: usize,
    pub read_ports: usize,
    pub write_ports: usize,
}

impl fmt::Display for CostKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} depth {} x {} bits, {} banks, {}R{}W",
            self.style.style_token(),
            self.style.design_token(),
            self.depth,
            self.word_bits,
            self.banks,
            self.read_ports,
            self.write_ports
        )
    }
}

/// Characterization of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEntry {
    pub key: CostKey,
    pub area_um2: f64,
    pub power_mw: f64,
    pub read_latency: u32,
    pub write_latency: u32,
    pub clock_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostError {
    /// A CSV line did not parse; carries the 1-based line number.
    ParseError(usize),
    /// Two CSV rows share a key; carries the second row's line number.
    DuplicateKey(usize),
    /// A CSV quantity was zero or negative; carries the line number.
    NonPositiveValue(usize),
    /// Table mode has no entry for the requested key.
    MissingEntry(String),
    /// An analytic coefficient was zero or negative; carries the field name.
    NonPositiveCoefficient(&'static str),
    /// The configuration is not buildable, so no cost exists for it.
    Unsupported(String),
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::ParseError(line) => write!(f, "line {line}: malformed cost row"),
            CostError::DuplicateKey(line) => write!(f, "line {line}: duplicate cost key"),
            CostError::NonPositiveValue(line) => {
                write!(f, "line {line}: cost quantities must be strictly positive")
            }
            CostError::MissingEntry(key) => write!(f, "no cost entry for {key}"),
            CostError::NonPositiveCoefficient(name) => {
                write!(f, "coefficient {name} must be strictly positive")
            }
            CostError::Unsupported(msg) => write!(f, "unsupported configuration: {msg}"),
        }
    }
}

impl std::error::Error for CostError {}

/// Coefficients of the analytic model. All values are synthetic defaults,
/// not measurements; only orderings between configurations are meaningful.
///
/// Area composes as one `area_bank_base + area_per_bit * depth * word_bits`
/// term per physical bank, plus `area_xor_per_port_bit * word_bits *
/// (read_ports + write_ports)` for XOR-based designs, plus
/// `area_table_per_bit` per live-value-table bit. Power mirrors area with
/// the `power_*` coefficients. The clock period grows with the address
/// decode level count and picks up a fixed adder for an XOR reconstruction
/// path or, larger, a table indirection path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub area_bank_base: f64,
    pub area_per_bit: f64,
    pub area_xor_per_port_bit: f64,
    pub area_table_per_bit: f64,
    pub power_bank_base: f64,
    pub power_per_bit: f64,
    pub power_xor_per_port_bit: f64,
    pub power_table_per_bit: f64,
    pub clock_base_ns: f64,
    pub clock_per_level_ns: f64,
    pub clock_xor_adder_ns: f64,
    pub clock_table_adder_ns: f64,
}

impl Default for AnalyticParams {
    fn default() -> AnalyticParams {
        AnalyticParams {
            area_bank_base: 12000.0,
            area_per_bit: 0.1,
            area_xor_per_port_bit: 5.0,
            area_table_per_bit: 0.5,
            power_bank_base: 4.0,
            power_per_bit: 0.0005,
            power_xor_per_port_bit: 0.02,
            power_table_per_bit: 0.001,
            clock_base_ns: 1.2,
            clock_per_level_ns: 0.05,
            clock_xor_adder_ns: 0.15,
            clock_table_adder_ns: 0.35,
        }
    }
}

impl AnalyticParams {
    fn validate(&self) -> Result<(), CostError> {
        let fields: [(&'static str, f64); 12] = [
            ("area_bank_base", self.area_bank_base),
            ("area_per_bit", self.area_per_bit),
            ("area_xor_per_port_bit", self.area_xor_per_port_bit),
            ("area_table_per_bit", self.area_table_per_bit),
            ("power_bank_base", self.power_bank_base),
            ("power_per_bit", self.power_per_bit),
            ("power_xor_per_port_bit", self.power_xor_per_port_bit),
            ("power_table_per_bit", self.power_table_per_bit),
            ("clock_base_ns", self.clock_base_ns),
            ("clock_per_level_ns", self.clock_per_level_ns),
            ("clock_xor_adder_ns", self.clock_xor_adder_ns),
            ("clock_table_adder_ns", self.clock_table_adder_ns),
        ];
        for (name, value) in fields {
            if !(value > 0.0) {
                return Err(CostError::NonPositiveCoefficient(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Table(BTreeMap<CostKey, CostEntry>),
    Analytic(AnalyticParams),
}

/// One cost source: either an ingested table or the analytic model.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    source: Source,
}

/// Analytic table from explicit coefficients.
pub fn default_analytic(params: AnalyticParams) -> Result<CostTable, CostError> {
    params.validate()?;
    Ok(CostTable { source: Source::Analytic(params) })
}

impl Default for CostTable {
    /// Analytic model with the default coefficients.
    fn default() -> CostTable {
        default_analytic(AnalyticParams::default()).expect("default coefficients are positive")
    }
}

fn parse_key_fields(fields: &[&str], line: usize) -> Result<CostKey, CostError> {
    let style = match (fields[0], fields[1]) {
        ("banking", "-") => CostStyle::Banking,
        ("amm", token) => {
            CostStyle::Amm(AmmDesign::from_token(token).ok_or(CostError::ParseError(line))?)
        }
        _ => return Err(CostError::ParseError(line)),
    };
    let err = |_| CostError::ParseError(line);
    Ok(CostKey {
        style,
        depth: fields[2].parse().map_err(err)?,
        word_bits: fields[3].parse().map_err(err)?,
        banks: fields[4].parse().map_err(err)?,
        read_ports: fields[5].parse().map_err(err)?,
        write_ports: fields[6].parse().map_err(err)?,
    })
}

/// Parses a cost CSV (header per [`COST_CSV_HEADER`]) into a table source.
pub fn load_cost_table(text: &str) -> Result<CostTable, CostError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == COST_CSV_HEADER => {}
        _ => return Err(CostError::ParseError(1)),
    }
    let mut entries = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 12 {
            return Err(CostError::ParseError(line));
        }
        let key = parse_key_fields(&fields, line)?;
        let f = |s: &str| -> Result<f64, CostError> {
            s.parse::<f64>().map_err(|_| CostError::ParseError(line))
        };
        let entry = CostEntry {
            key,
            area_um2: f(fields[7])?,
            power_mw: f(fields[8])?,
            read_latency: fields[9].parse().map_err(|_| CostError::ParseError(line))?,
            write_latency: fields[10].parse().map_err(|_| CostError::ParseError(line))?,
            clock_ns: f(fields[11])?,
        };
        if !(entry.area_um2 > 0.0 && entry.power_mw > 0.0 && entry.clock_ns > 0.0)
            || entry.read_latency < 1
            || entry.write_latency < 1
            || entry.key.depth < 1
            || entry.key.word_bits < 1
            || entry.key.banks < 1
        {
            return Err(CostError::NonPositiveValue(line));
        }
        if entries.insert(key, entry).is_some() {
            return Err(CostError::DuplicateKey(line));
        }
    }
    Ok(CostTable { source: Source::Table(entries) })
}

/// Renders entries as a cost CSV, header first, rows in the given order.
pub fn emit_cost_csv(entries: &[CostEntry]) -> String {
    let mut out = String::from(COST_CSV_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            e.key.style.style_token(),
            e.key.style.design_token(),
            e.key.depth,
            e.key.word_bits,
            e.key.banks,
            e.key.read_ports,
            e.key.write_ports,
            e.area_um2,
            e.power_mw,
            e.read_latency,
            e.write_latency,
            e.clock_ns,
        ));
    }
    out
}

fn ceil_log2(n: u64) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

/// Cost key for a scheduler memory configuration serving `total_words` of
/// trace footprint. Fails when the structure is not buildable (a banked
/// memory with more than two ports per bank, or a multi-port geometry the
/// design cannot serve).
pub fn key_for(mem: &MemStructureConfig, total_words: u64) -> Result<CostKey, CostError> {
    let depth = mem.depth_for(total_words);
    let word_bits = mem.word_bytes * 8;
    match mem.kind {
        StructureKind::Banking { banks, .. } => {
            if mem.read_ports + mem.write_ports > 2 {
                return Err(CostError::Unsupported(format!(
                    "a standard bank offers at most two ports, requested {}R{}W per bank",
                    mem.read_ports, mem.write_ports
                )));
            }
            Ok(CostKey {
                style: CostStyle::Banking,
                depth,
                word_bits,
                banks,
                read_ports: mem.read_ports,
                write_ports: mem.write_ports,
            })
        }
        StructureKind::Amm { design } => {
            let geom = Geometry::new(
                depth as usize,
                word_bits,
                design.data_banks(),
                mem.read_ports,
                mem.write_ports,
            );
            let prov = amm::provisioning(design, &geom)
                .map_err(|e| CostError::Unsupported(e.to_string()))?;
            Ok(CostKey {
                style: CostStyle::Amm(design),
                depth,
                word_bits,
                banks: prov.banks.len(),
                read_ports: mem.read_ports,
                write_ports: mem.write_ports,
            })
        }
    }
}

fn analytic_entry(params: &AnalyticParams, key: &CostKey) -> Result<CostEntry, CostError> {
    let per_bank = |depth: u64, width: u32| -> (f64, f64) {
        let bits = depth as f64 * width as f64;
        (
            params.area_bank_base + params.area_per_bit * bits,
            params.power_bank_base + params.power_per_bit * bits,
        )
    };
    let (mut area, mut power);
    let mut clock = params.clock_base_ns + params.clock_per_level_ns * ceil_log2(key.depth) as f64;
    match key.style {
        CostStyle::Banking => {
            if key.read_ports + key.write_ports > 2 {
                return Err(CostError::Unsupported(
                    "a standard bank offers at most two ports".into(),
                ));
            }
            if key.banks == 0 {
                return Err(CostError::Unsupported("bank count must be positive".into()));
            }
            let (a, p) = per_bank(key.depth, key.word_bits);
            area = key.banks as f64 * a;
            power = key.banks as f64 * p;
        }
        CostStyle::Amm(design) => {
            let geom = Geometry::new(
                key.depth as usize,
                key.word_bits,
                design.data_banks(),
                key.read_ports,
                key.write_ports,
            );
            let prov = amm::provisioning(design, &geom)
                .map_err(|e| CostError::Unsupported(e.to_string()))?;
            if prov.banks.len() != key.banks {
                return Err(CostError::Unsupported(format!(
                    "{design} at this geometry needs {} banks, key says {}",
                    prov.banks.len(),
                    key.banks
                )));
            }
            area = 0.0;
            power = 0.0;
            for b in &prov.banks {
                let (a, p) = per_bank(b.depth as u64, b.width_bits);
                area += a;
                power += p;
            }
            let ports = (key.read_ports + key.write_ports) as f64;
            match design {
                AmmDesign::HntxRd | AmmDesign::BntxWr | AmmDesign::HbntxRdwr => {
                    area += params.area_xor_per_port_bit * key.word_bits as f64 * ports;
                    power += params.power_xor_per_port_bit * key.word_bits as f64 * ports;
                    clock += params.clock_xor_adder_ns;
                }
                AmmDesign::Lvt => {
                    let table_bits = prov.table_bits() as f64;
                    area += params.area_table_per_bit * table_bits;
                    power += params.power_table_per_bit * table_bits;
                    clock += params.clock_table_adder_ns;
                }
                AmmDesign::Ideal => {}
            }
        }
    }
    Ok(CostEntry {
        key: *key,
        area_um2: area,
        power_mw: power,
        read_latency: 1,
        write_latency: 1,
        clock_ns: clock,
    })
}

/// Characterization for one key.
///
/// Table sources return the stored entry unchanged; analytic sources
/// evaluate the formulas. Both are pure: the same key always yields the
/// same entry.
pub fn cost_of(key: &CostKey, table: &CostTable) -> Result<CostEntry, CostError> {
    match &table.source {
        Source::Table(entries) => {
            entries.get(key).copied().ok_or_else(|| CostError::MissingEntry(key.to_string()))
        }
        Source::Analytic(params) => analytic_entry(params, key),
    }
}
