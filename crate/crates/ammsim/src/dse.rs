//! Design-space exploration: configuration sweeps, Pareto frontiers, the
//! area-at-matched-cycles ratio metric, and the locality-versus-ratio study.
//!
//! A [`SweepSpace`] is a Cartesian product of memory configurations crossed
//! with a set of traces. [`sweep`] evaluates every combination through the
//! scheduler and the cost model, marking unbuildable combinations infeasible
//! instead of failing, and emits points in a fixed lexicographic order so
//! identical inputs always produce identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::cost::{self, CostStyle, CostTable};
use crate::kernels::KernelSpec;
use crate::locality;
use crate::sched::{self, ComputeConfig, Layout, Mapping, MemStructureConfig};
use crate::trace::Ddg;

/// Column layout of a points CSV. The header line must match byte for byte.
pub const POINTS_CSV_HEADER: &str =
    "trace,style,design,banks,mapping,word_bytes,rports,wports,cycles,time_ns,area_um2,power_mw,feasible";

#[derive(Debug, Clone, PartialEq)]
pub enum DseError {
    /// A sweep-space config line did not parse.
    SpaceParse { line: usize, msg: String },
    /// A points CSV line did not parse; carries the 1-based line number.
    PointsParse(usize),
    /// A referenced input (trace file, cost table, kernel spec) is unusable.
    Input { path: String, msg: String },
    /// No banking/multi-port pair fell within the cycle-match tolerance.
    NoMatchedPairs,
    /// The correlation study needs at least three kernels.
    InsufficientKernels(usize),
}

impl fmt::Display for DseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DseError::SpaceParse { line, msg } => write!(f, "space config line {line}: {msg}"),
            DseError::PointsParse(line) => write!(f, "points CSV line {line}: malformed row"),
            DseError::Input { path, msg } => write!(f, "{path}: {msg}"),
            DseError::NoMatchedPairs => {
                f.write_str("no design pairs with matching cycle counts within tolerance")
            }
            DseError::InsufficientKernels(n) => {
                write!(f, "correlation needs at least 3 kernels, got {n}")
            }
        }
    }
}

impl std::error::Error for DseError {}

/// The Cartesian product of configurations to evaluate, plus the traces to
/// run them on and the cost source that prices them.
#[derive(Debug, Clone)]
pub struct SweepSpace {
    /// (display name, graph) pairs; the name lands in the points CSV.
    pub traces: Vec<(String, Ddg)>,
    pub styles: Vec<CostStyle>,
    /// Bank counts, banking style only.
    pub banks_list: Vec<usize>,
    /// Address mappings, banking style only.
    pub mapping_list: Vec<Mapping>,
    pub word_bytes_list: Vec<u32>,
    pub read_ports_list: Vec<usize>,
    pub write_ports_list: Vec<usize>,
    /// Units per compute latency class.
    pub compute_unit_list: Vec<usize>,
    pub cost: CostTable,
}

/// One evaluated configuration. Infeasible points keep their configuration
/// columns but report zero cycles, time, area, and power.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    pub trace: String,
    pub style: CostStyle,
    /// Physical banks: the partition count for banking, the provisioned
    /// bank count for a multi-port design (0 when unbuildable).
    pub banks: usize,
    /// Banking only; `None` for multi-port designs.
    pub mapping: Option<Mapping>,
    pub word_bytes: u32,
    pub rports: usize,
    pub wports: usize,
    pub cycles: u64,
    pub time_ns: f64,
    pub area_um2: f64,
    pub power_mw: f64,
    pub feasible: bool,
}

impl DesignPoint {
    fn mapping_token(&self) -> &'static str {
        self.mapping.map(|m| m.token()).unwrap_or("-")
    }

    /// Total order over configuration columns, used for deterministic
    /// tie-breaks.
    fn config_key(&self) -> impl Ord + '_ {
        (
            self.trace.as_str(),
            self.style,
            self.banks,
            self.mapping_token(),
            self.word_bytes,
            self.rports,
            self.wports,
        )
    }
}

fn infeasible_point(
    trace: &str,
    style: CostStyle,
    banks: usize,
    mapping: Option<Mapping>,
    word_bytes: u32,
    rports: usize,
    wports: usize,
) -> DesignPoint {
    DesignPoint {
        trace: trace.to_string(),
        style,
        banks,
        mapping,
        word_bytes,
        rports,
        wports,
        cycles: 0,
        time_ns: 0.0,
        area_um2: 0.0,
        power_mw: 0.0,
        feasible: false,
    }
}

/// Evaluates one configuration: cost first (it supplies the access
/// latencies), then the schedule. Any error anywhere makes the point
/// infeasible; nothing is fatal.
fn eval_point(
    trace: &str,
    ddg: &Ddg,
    mut mem: MemStructureConfig,
    units_per_class: usize,
    cost: &CostTable,
) -> DesignPoint {
    let (style, mapping) = match mem.kind {
        sched::StructureKind::Banking { mapping, .. } => (CostStyle::Banking, Some(mapping)),
        sched::StructureKind::Amm { design } => (CostStyle::Amm(design), None),
    };
    let requested_banks = match mem.kind {
        sched::StructureKind::Banking { banks, .. } => banks,
        sched::StructureKind::Amm { .. } => 0,
    };
    let fail = |banks| {
        infeasible_point(trace, style, banks, mapping, mem.word_bytes, mem.read_ports, mem.write_ports)
    };
    let total_words = Layout::new(ddg, mem.word_bytes).total_words();
    let key = match cost::key_for(&mem, total_words) {
        Ok(k) => k,
        Err(_) => return fail(requested_banks),
    };
    let entry = match cost::cost_of(&key, cost) {
        Ok(e) => e,
        Err(_) => return fail(key.banks),
    };
    mem.read_latency = entry.read_latency;
    mem.write_latency = entry.write_latency;
    let compute = ComputeConfig::uniform_for(ddg, units_per_class);
    let result = match sched::schedule(ddg, &mem, &compute) {
        Ok(r) => r,
        Err(_) => return fail(key.banks),
    };
    DesignPoint {
        trace: trace.to_string(),
        style,
        banks: key.banks,
        mapping,
        word_bytes: mem.word_bytes,
        rports: mem.read_ports,
        wports: mem.write_ports,
        cycles: result.total_cycles,
        time_ns: result.total_cycles as f64 * entry.clock_ns,
        area_um2: entry.area_um2,
        power_mw: entry.power_mw,
        feasible: true,
    }
}

/// Evaluates the full Cartesian product of `space`.
///
/// Output order is the fixed nesting trace, compute units, style, then the
/// style's own axes (banks, mapping, word, read ports, write ports for
/// banking; word, read ports, write ports for a multi-port design), each in
/// list order. Identical spaces therefore always yield identical output.
pub fn sweep(space: &SweepSpace) -> Vec<DesignPoint> {
    let mut points = Vec::new();
    for (name, ddg) in &space.traces {
        for &cu in &space.compute_unit_list {
            for &style in &space.styles {
                match style {
                    CostStyle::Banking => {
                        for &banks in &space.banks_list {
                            for &mapping in &space.mapping_list {
                                for &word in &space.word_bytes_list {
                                    for &rp in &space.read_ports_list {
                                        for &wp in &space.write_ports_list {
                                            let mem = MemStructureConfig::banking(
                                                banks, mapping, word, rp, wp,
                                            );
                                            points.push(eval_point(name, ddg, mem, cu, &space.cost));
                                        }
                                    }
                                }
                            }
                        }
                    }
                    CostStyle::Amm(design) => {
                        for &word in &space.word_bytes_list {
                            for &rp in &space.read_ports_list {
                                for &wp in &space.write_ports_list {
                                    let mem = MemStructureConfig::amm(design, word, rp, wp);
                                    points.push(eval_point(name, ddg, mem, cu, &space.cost));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    points
}

/// Renders points as CSV, header first, rows in the given order.
pub fn emit_points_csv(points: &[DesignPoint]) -> String {
    let mut out = String::from(POINTS_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.trace,
            p.style.style_token(),
            p.style.design_token(),
            p.banks,
            p.mapping_token(),
            p.word_bytes,
            p.rports,
            p.wports,
            p.cycles,
            p.time_ns,
            p.area_um2,
            p.power_mw,
            p.feasible,
        ));
    }
    out
}

/// Parses a points CSV produced by [`emit_points_csv`]. Lossless: parsing
/// and re-emitting reproduces the input bytes.
pub fn load_points_csv(text: &str) -> Result<Vec<DesignPoint>, DseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == POINTS_CSV_HEADER => {}
        _ => return Err(DseError::PointsParse(1)),
    }
    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 13 {
            return Err(DseError::PointsParse(line));
        }
        let style = parse_style_pair(fields[1], fields[2]).ok_or(DseError::PointsParse(line))?;
        let mapping = match fields[4] {
            "-" => None,
            token => Some(Mapping::from_token(token).ok_or(DseError::PointsParse(line))?),
        };
        let feasible = match fields[12] {
            "true" => true,
            "false" => false,
            _ => return Err(DseError::PointsParse(line)),
        };
        let bad = DseError::PointsParse(line);
        points.push(DesignPoint {
            trace: fields[0].to_string(),
            style,
            banks: fields[3].parse().map_err(|_| bad.clone())?,
            mapping,
            word_bytes: fields[5].parse().map_err(|_| bad.clone())?,
            rports: fields[6].parse().map_err(|_| bad.clone())?,
            wports: fields[7].parse().map_err(|_| bad.clone())?,
            cycles: fields[8].parse().map_err(|_| bad.clone())?,
            time_ns: fields[9].parse().map_err(|_| bad.clone())?,
            area_um2: fields[10].parse().map_err(|_| bad.clone())?,
            power_mw: fields[11].parse().map_err(|_| bad.clone())?,
            feasible,
        });
    }
    Ok(points)
}

fn parse_style_pair(style: &str, design: &str) -> Option<CostStyle> {
    match (style, design) {
        ("banking", "-") => Some(CostStyle::Banking),
        ("amm", token) => crate::amm::AmmDesign::from_token(token).map(CostStyle::Amm),
        _ => None,
    }
}

/// Metrics a frontier can minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Cycles,
    TimeNs,
    AreaUm2,
    PowerMw,
}

impl Metric {
    fn of(&self, p: &DesignPoint) -> f64 {
        match self {
            Metric::Cycles => p.cycles as f64,
            Metric::TimeNs => p.time_ns,
            Metric::AreaUm2 => p.area_um2,
            Metric::PowerMw => p.power_mw,
        }
    }
}

/// Non-dominated subset of the feasible points, both metrics minimized,
/// sorted by the x metric.
///
/// Duplicate (x, y) pairs are collapsed to one point; ties keep the
/// configuration that sorts first, so the result does not depend on input
/// order.
pub fn pareto(points: &[DesignPoint], x: Metric, y: Metric) -> Vec<DesignPoint> {
    let mut candidates: Vec<&DesignPoint> = points.iter().filter(|p| p.feasible).collect();
    candidates.sort_by(|a, b| {
        x.of(a)
            .total_cmp(&x.of(b))
            .then(y.of(a).total_cmp(&y.of(b)))
            .then(a.config_key().cmp(&b.config_key()))
    });
    let mut frontier: Vec<DesignPoint> = Vec::new();
    let mut best_y = f64::INFINITY;
    for p in candidates {
        if y.of(p) < best_y {
            best_y = y.of(p);
            frontier.push(p.clone());
        }
    }
    frontier
}

/// One matched frontier pair and its area ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    pub banking: DesignPoint,
    pub amm: DesignPoint,
    pub area_ratio: f64,
}

/// Outcome of [`performance_ratio`].
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub pairs: Vec<MatchedPair>,
    /// Geometric mean over pairs of banking area / multi-port area.
    pub area_ratio: f64,
    /// Banking frontier points with no cycle-matched partner.
    pub unmatched_banking: usize,
    /// Multi-port frontier points never used in a pair.
    pub unmatched_amm: usize,
}

/// Compares the cost of equal performance across the two styles.
///
/// Both inputs are reduced to their cycles/area Pareto frontiers. Every
/// banking frontier point is paired with the multi-port frontier point
/// whose cycle count is nearest, provided the difference stays within
/// `tolerance` (relative to the banking point). The headline number is the
/// geometric mean of the banking-to-multi-port area ratios over the matched
/// pairs: above 1 means banking pays more area for the same performance.
pub fn performance_ratio(
    banking_points: &[DesignPoint],
    amm_points: &[DesignPoint],
    tolerance: f64,
) -> Result<RatioReport, DseError> {
    let bf = pareto(banking_points, Metric::Cycles, Metric::AreaUm2);
    let af = pareto(amm_points, Metric::Cycles, Metric::AreaUm2);
    if bf.is_empty() || af.is_empty() {
        return Err(DseError::NoMatchedPairs);
    }
    let mut pairs = Vec::new();
    let mut amm_used = vec![false; af.len()];
    let mut unmatched_banking = 0usize;
    for b in &bf {
        let mut best: Option<(usize, u64)> = None;
        for (i, a) in af.iter().enumerate() {
            let diff = a.cycles.abs_diff(b.cycles);
            let better = match best {
                None => true,
                Some((bi, bd)) => diff < bd || (diff == bd && a.cycles < af[bi].cycles),
            };
            if better {
                best = Some((i, diff));
            }
        }
        let (idx, diff) = best.expect("frontier is non-empty");
        if diff as f64 <= tolerance * b.cycles as f64 {
            amm_used[idx] = true;
            pairs.push(MatchedPair {
                banking: b.clone(),
                amm: af[idx].clone(),
                area_ratio: b.area_um2 / af[idx].area_um2,
            });
        } else {
            unmatched_banking += 1;
        }
    }
    if pairs.is_empty() {
        return Err(DseError::NoMatchedPairs);
    }
    let mean_log: f64 =
        pairs.iter().map(|p| p.area_ratio.ln()).sum::<f64>() / pairs.len() as f64;
    Ok(RatioReport {
        area_ratio: mean_log.exp(),
        unmatched_banking,
        unmatched_amm: amm_used.iter().filter(|&&u| !u).count(),
        pairs,
    })
}

/// One kernel's coordinates in the locality-versus-ratio scatter.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    pub trace: String,
    pub locality: f64,
    pub area_ratio: f64,
}

/// Outcome of [`locality_correlation`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub pairs: Vec<KernelResult>,
    /// Spearman rank correlation between locality and area ratio.
    pub rank_correlation: f64,
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        // All-tied inputs carry no ordering information; report zero
        // correlation rather than dividing by zero.
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// Spearman rank correlation between spatial locality and area ratio over
/// at least three kernels.
pub fn locality_correlation(kernel_results: &[KernelResult]) -> Result<CorrelationReport, DseError> {
    if kernel_results.len() < 3 {
        return Err(DseError::InsufficientKernels(kernel_results.len()));
    }
    let ls: Vec<f64> = kernel_results.iter().map(|k| k.locality).collect();
    let rs: Vec<f64> = kernel_results.iter().map(|k| k.area_ratio).collect();
    let rho = pearson(&average_ranks(&ls), &average_ranks(&rs));
    Ok(CorrelationReport { pairs: kernel_results.to_vec(), rank_correlation: rho })
}

/// Full pipeline for the locality study: per trace, measure spatial
/// locality, sweep the space, compute the style-versus-style area ratio,
/// then correlate across traces. Traces where no two frontiers come within
/// the cycle tolerance of each other contribute no ratio and are left out
/// of the correlation.
pub fn locality_ratio_study(
    space: &SweepSpace,
    tolerance: f64,
) -> Result<CorrelationReport, DseError> {
    let mut results = Vec::new();
    for (name, ddg) in &space.traces {
        let hist = locality::stride_histogram(ddg);
        let l = locality::spatial_locality(&hist.merged)
            .map_err(|e| DseError::Input { path: name.clone(), msg: e.to_string() })?;
        let mut single = space.clone();
        single.traces = vec![(name.clone(), ddg.clone())];
        let points = sweep(&single);
        let (banking, amm): (Vec<DesignPoint>, Vec<DesignPoint>) =
            points.into_iter().partition(|p| p.style == CostStyle::Banking);
        match performance_ratio(&banking, &amm, tolerance) {
            Ok(ratio) => results.push(KernelResult {
                trace: name.clone(),
                locality: l,
                area_ratio: ratio.area_ratio,
            }),
            Err(DseError::NoMatchedPairs) => continue,
            Err(e) => return Err(e),
        }
    }
    locality_correlation(&results)
}

/// Relative cycle window within which two designs count as equally fast.
pub const DEFAULT_MATCH_TOLERANCE: f64 = 0.05;

fn default_styles() -> Vec<CostStyle> {
    use crate::amm::AmmDesign;
    vec![CostStyle::Banking, CostStyle::Amm(AmmDesign::HbntxRdwr), CostStyle::Amm(AmmDesign::Lvt)]
}

const DEFAULT_BANKS: [usize; 6] = [3, 4, 6, 8, 12, 16];
const DEFAULT_MAPPINGS: [Mapping; 2] = [Mapping::Cyclic, Mapping::Block];
const DEFAULT_WORD_BYTES: [u32; 1] = [8];
const DEFAULT_READ_PORTS: [usize; 9] = [1, 2, 3, 4, 6, 8, 10, 12, 16];
const DEFAULT_WRITE_PORTS: [usize; 2] = [1, 2];
const DEFAULT_COMPUTE_UNITS: [usize; 1] = [8];

/// The default exploration: the four reference kernels against banked
/// memories up to 16 banks and the two general multi-port designs up to
/// 16R2W, priced by the default analytic model.
pub fn default_space() -> SweepSpace {
    let traces = crate::kernels::default_specs()
        .iter()
        .map(|spec| (spec.to_string(), spec.generate().expect("default specs generate")))
        .collect();
    SweepSpace {
        traces,
        styles: default_styles(),
        banks_list: DEFAULT_BANKS.to_vec(),
        mapping_list: DEFAULT_MAPPINGS.to_vec(),
        word_bytes_list: DEFAULT_WORD_BYTES.to_vec(),
        read_ports_list: DEFAULT_READ_PORTS.to_vec(),
        write_ports_list: DEFAULT_WRITE_PORTS.to_vec(),
        compute_unit_list: DEFAULT_COMPUTE_UNITS.to_vec(),
        cost: CostTable::default(),
    }
}

/// Unresolved sweep description as read from a config file: file paths and
/// kernel specs, not yet loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub traces: Vec<String>,
    pub kernels: Vec<KernelSpec>,
    pub styles: Vec<CostStyle>,
    pub banks: Vec<usize>,
    pub mappings: Vec<Mapping>,
    pub word_bytes: Vec<u32>,
    pub rports: Vec<usize>,
    pub wports: Vec<usize>,
    pub compute_units: Vec<usize>,
    /// Cost CSV path; `None` selects the default analytic model.
    pub cost: Option<String>,
}

impl Default for SpaceSpec {
    fn default() -> SpaceSpec {
        SpaceSpec {
            traces: Vec::new(),
            kernels: Vec::new(),
            styles: default_styles(),
            banks: DEFAULT_BANKS.to_vec(),
            mappings: DEFAULT_MAPPINGS.to_vec(),
            word_bytes: DEFAULT_WORD_BYTES.to_vec(),
            rports: DEFAULT_READ_PORTS.to_vec(),
            wports: DEFAULT_WRITE_PORTS.to_vec(),
            compute_units: DEFAULT_COMPUTE_UNITS.to_vec(),
            cost: None,
        }
    }
}

/// Parses a line-oriented sweep config: `key = v1, v2, ...` per line, `#`
/// comments, keys `trace`, `kernel`, `style`, `banks`, `mapping`,
/// `word_bytes`, `rports`, `wports`, `compute_units`, `cost`. Omitted keys
/// keep their defaults; at least one `trace` or `kernel` is required.
pub fn parse_space(text: &str) -> Result<SpaceSpec, DseError> {
    let mut spec = SpaceSpec::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: &str| DseError::SpaceParse { line, msg: msg.to_string() };
        let (key, rest) = body.split_once('=').ok_or_else(|| err("expected 'key = values'"))?;
        let key = key.trim();
        let values: Vec<&str> = rest.split(',').map(str::trim).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(err("empty value"));
        }
        if seen.iter().any(|k| k == key) {
            return Err(err("key listed twice"));
        }
        seen.push(key.to_string());
        fn ints<T: std::str::FromStr>(
            values: &[&str],
            err: &dyn Fn(&str) -> DseError,
        ) -> Result<Vec<T>, DseError> {
            values.iter().map(|v| v.parse().map_err(|_| err(&format!("bad number '{v}'")))).collect()
        }
        match key {
            "trace" => spec.traces = values.iter().map(|v| v.to_string()).collect(),
            "kernel" => {
                spec.kernels = values
                    .iter()
                    .map(|v| KernelSpec::parse(v).map_err(|e| err(&e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            "style" => {
                spec.styles = values
                    .iter()
                    .map(|v| match *v {
                        "banking" => Ok(CostStyle::Banking),
                        token => crate::amm::AmmDesign::from_token(token)
                            .map(CostStyle::Amm)
                            .ok_or_else(|| err(&format!("unknown style '{token}'"))),
                    })
                    .collect::<Result<_, _>>()?;
            }
            "banks" => spec.banks = ints(&values, &err)?,
            "mapping" => {
                spec.mappings = values
                    .iter()
                    .map(|v| {
                        Mapping::from_token(v).ok_or_else(|| err(&format!("unknown mapping '{v}'")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            "word_bytes" => spec.word_bytes = ints(&values, &err)?,
            "rports" => spec.rports = ints(&values, &err)?,
            "wports" => spec.wports = ints(&values, &err)?,
            "compute_units" => spec.compute_units = ints(&values, &err)?,
            "cost" => {
                if values.len() != 1 {
                    return Err(err("cost takes one value"));
                }
                spec.cost = if values[0] == "analytic" { None } else { Some(values[0].to_string()) };
            }
            other => return Err(err(&format!("unknown key '{other}'"))),
        }
    }
    if spec.traces.is_empty() && spec.kernels.is_empty() {
        return Err(DseError::SpaceParse {
            line: text.lines().count() + 1,
            msg: "no 'trace' or 'kernel' entries".to_string(),
        });
    }
    Ok(spec)
}

impl SpaceSpec {
    /// Loads trace files (relative paths resolved against `base`), generates
    /// kernels, and loads the cost table, yielding a runnable space.
    pub fn resolve(&self, base: &Path) -> Result<SweepSpace, DseError> {
        let mut traces = Vec::new();
        for path in &self.traces {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| DseError::Input { path: path.clone(), msg: e.to_string() })?;
            let ddg = crate::trace::Ddg::parse(&text)
                .map_err(|e| DseError::Input { path: path.clone(), msg: e.to_string() })?;
            traces.push((path.clone(), ddg));
        }
        for spec in &self.kernels {
            let ddg = spec
                .generate()
                .map_err(|e| DseError::Input { path: spec.to_string(), msg: e.to_string() })?;
            traces.push((spec.to_string(), ddg));
        }
        let cost = match &self.cost {
            None => CostTable::default(),
            Some(path) => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| DseError::Input { path: path.clone(), msg: e.to_string() })?;
                cost::load_cost_table(&text)
                    .map_err(|e| DseError::Input { path: path.clone(), msg: e.to_string() })?
            }
        };
        Ok(SweepSpace {
            traces,
            styles: self.styles.clone(),
            banks_list: self.banks.clone(),
            mapping_list: self.mappings.clone(),
            word_bytes_list: self.word_bytes.clone(),
            read_ports_list: self.rports.clone(),
            write_ports_list: self.wports.clone(),
            compute_unit_list: self.compute_units.clone(),
            cost,
        })
    }
}

/// Groups points by their trace column, preserving first-seen order within
/// and across groups.
pub fn group_by_trace(points: &[DesignPoint]) -> Vec<(String, Vec<DesignPoint>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<DesignPoint>> = BTreeMap::new();
    for p in points {
        if !groups.contains_key(&p.trace) {
            order.push(p.trace.clone());
        }
        groups.entry(p.trace.clone()).or_default().push(p.clone());
    }
    order.into_iter().map(|t| { let g = groups.remove(&t).unwrap(); (t, g) }).collect()
}
