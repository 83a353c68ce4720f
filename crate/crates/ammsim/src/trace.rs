//! Text format and in-memory form of memory-access dependence graphs.
//!
//! A trace is a line-oriented file. `#` starts a comment, blank lines are
//! ignored, and the remaining lines are either array declarations or nodes:
//!
//! ```text
//! array <name> <byte_length>
//! node <id> LOAD <array> <addr> <size> [deps=<id>,<id>,...]
//! node <id> STORE <array> <addr> <size> [deps=...]
//! node <id> COMPUTE <latency_class> [deps=...]
//! ```
//!
//! Node ids are dense and appear in order (`node k` is the k-th node line),
//! which makes every parsed graph acyclic by construction: dependencies may
//! only point at earlier ids. Addresses are byte offsets into the named
//! array, not absolute pointers, so banking and locality analyses can work
//! per array.

use std::collections::BTreeSet;
use std::fmt;

/// One declared array: a named, contiguous byte range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayDecl {
    pub name: String,
    pub len_bytes: u64,
}

/// Payload of one trace node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Memory read of `size` bytes at byte offset `addr` of array `array`
    /// (index into [`Ddg::arrays`]).
    Load { array: usize, addr: u64, size: u32 },
    /// Memory write, same addressing as `Load`.
    Store { array: usize, addr: u64, size: u32 },
    /// Arithmetic of a given latency class (cycles to complete).
    Compute { latency_class: u32 },
}

impl NodeKind {
    pub fn is_memory(&self) -> bool {
        matches!(self, NodeKind::Load { .. } | NodeKind::Store { .. })
    }
}

/// One node of the dependence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdgNode {
    pub id: usize,
    pub kind: NodeKind,
    /// Predecessor ids, strictly smaller than `id`, sorted, deduplicated.
    pub deps: Vec<usize>,
}

/// Validated dependence graph: arrays in declaration order, nodes in id order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ddg {
    arrays: Vec<ArrayDecl>,
    nodes: Vec<DdgNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    /// Malformed line; `msg` names the offending token or rule.
    Syntax { line: usize, msg: String },
    /// Node references an array that has not been declared yet.
    UnknownArray { line: usize, name: String },
    /// Dependency on the node itself or a later node.
    ForwardDependency { line: usize, dep: usize },
    /// Access extends past the declared end of its array.
    OutOfBounds { line: usize, msg: String },
}

impl TraceError {
    pub fn line(&self) -> usize {
        match self {
            TraceError::Syntax { line, .. }
            | TraceError::UnknownArray { line, .. }
            | TraceError::ForwardDependency { line, .. }
            | TraceError::OutOfBounds { line, .. } => *line,
        }
    }
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
            TraceError::UnknownArray { line, name } => {
                write!(f, "line {line}: unknown array '{name}'")
            }
            TraceError::ForwardDependency { line, dep } => {
                write!(f, "line {line}: dependency on not-yet-declared node {dep}")
            }
            TraceError::OutOfBounds { line, msg } => write!(f, "line {line}: {msg}"),
        }
    }
}

impl std::error::Error for TraceError {}

impl Ddg {
    pub fn arrays(&self) -> &[ArrayDecl] {
        &self.arrays
    }

    pub fn nodes(&self) -> &[DdgNode] {
        &self.nodes
    }

    pub fn array_index(&self, name: &str) -> Option<usize> {
        self.arrays.iter().position(|a| a.name == name)
    }

    /// Parses trace text into a validated graph, stopping at the first error.
    pub fn parse(text: &str) -> Result<Ddg, TraceError> {
        let mut ddg = Ddg::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            match tokens[0] {
                "array" => ddg.parse_array(&tokens, line)?,
                "node" => ddg.parse_node(&tokens, line)?,
                other => {
                    return Err(TraceError::Syntax {
                        line,
                        msg: format!("expected 'array' or 'node', found '{other}'"),
                    })
                }
            }
        }
        Ok(ddg)
    }

    fn parse_array(&mut self, tokens: &[&str], line: usize) -> Result<(), TraceError> {
        if tokens.len() != 3 {
            return Err(TraceError::Syntax {
                line,
                msg: "array line needs exactly: array <name> <byte_length>".into(),
            });
        }
        let name = tokens[1];
        if self.array_index(name).is_some() {
            return Err(TraceError::Syntax {
                line,
                msg: format!("array '{name}' declared twice"),
            });
        }
        let len_bytes = parse_num(tokens[2], line, "array byte length")?;
        if len_bytes == 0 {
            return Err(TraceError::Syntax { line, msg: "array byte length must be positive".into() });
        }
        self.arrays.push(ArrayDecl { name: name.to_string(), len_bytes });
        Ok(())
    }

    fn parse_node(&mut self, tokens: &[&str], line: usize) -> Result<(), TraceError> {
        if tokens.len() < 3 {
            return Err(TraceError::Syntax { line, msg: "truncated node line".into() });
        }
        let id = parse_num(tokens[1], line, "node id")? as usize;
        if id != self.nodes.len() {
            return Err(TraceError::Syntax {
                line,
                msg: format!("node id {id} out of order, expected {}", self.nodes.len()),
            });
        }
        let (kind, rest) = match tokens[2] {
            "LOAD" | "STORE" => {
                if tokens.len() < 6 {
                    return Err(TraceError::Syntax {
                        line,
                        msg: format!("{} needs <array> <addr> <size>", tokens[2]),
                    });
                }
                let array = self.array_index(tokens[3]).ok_or_else(|| TraceError::UnknownArray {
                    line,
                    name: tokens[3].to_string(),
                })?;
                let addr = parse_num(tokens[4], line, "address")?;
                let size = parse_num(tokens[5], line, "size")? as u32;
                if size == 0 {
                    return Err(TraceError::Syntax { line, msg: "access size must be positive".into() });
                }
                let end = addr + size as u64;
                if end > self.arrays[array].len_bytes {
                    return Err(TraceError::OutOfBounds {
                        line,
                        msg: format!(
                            "access [{addr}, {end}) exceeds array '{}' of {} bytes",
                            self.arrays[array].name, self.arrays[array].len_bytes
                        ),
                    });
                }
                let kind = if tokens[2] == "LOAD" {
                    NodeKind::Load { array, addr, size }
                } else {
                    NodeKind::Store { array, addr, size }
                };
                (kind, &tokens[6..])
            }
            "COMPUTE" => {
                if tokens.len() < 4 {
                    return Err(TraceError::Syntax {
                        line,
                        msg: "COMPUTE needs <latency_class>".into(),
                    });
                }
                let class = parse_num(tokens[3], line, "latency class")? as u32;
                if class == 0 {
                    return Err(TraceError::Syntax {
                        line,
                        msg: "latency class must be positive".into(),
                    });
                }
                (NodeKind::Compute { latency_class: class }, &tokens[4..])
            }
            other => {
                return Err(TraceError::Syntax {
                    line,
                    msg: format!("unknown opcode '{other}'"),
                })
            }
        };
        let deps = match rest {
            [] => Vec::new(),
            [one] if one.starts_with("deps=") => {
                let mut deps = BTreeSet::new();
                for part in one["deps=".len()..].split(',') {
                    if part.is_empty() {
                        return Err(TraceError::Syntax {
                            line,
                            msg: "empty entry in deps list".into(),
                        });
                    }
                    let dep = parse_num(part, line, "dependency id")? as usize;
                    if dep >= id {
                        return Err(TraceError::ForwardDependency { line, dep });
                    }
                    deps.insert(dep);
                }
                deps.into_iter().collect()
            }
            _ => {
                return Err(TraceError::Syntax {
                    line,
                    msg: format!("unexpected trailing tokens {rest:?}"),
                })
            }
        };
        self.nodes.push(DdgNode { id, kind, deps });
        Ok(())
    }

    /// Writes the graph back out in the canonical form: arrays first, then
    /// nodes in id order, deps sorted ascending. `parse(emit(g)) == g`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for a in &self.arrays {
            out.push_str(&format!("array {} {}\n", a.name, a.len_bytes));
        }
        for n in &self.nodes {
            match n.kind {
                NodeKind::Load { array, addr, size } => {
                    out.push_str(&format!(
                        "node {} LOAD {} {addr} {size}",
                        n.id, self.arrays[array].name
                    ));
                }
                NodeKind::Store { array, addr, size } => {
                    out.push_str(&format!(
                        "node {} STORE {} {addr} {size}",
                        n.id, self.arrays[array].name
                    ));
                }
                NodeKind::Compute { latency_class } => {
                    out.push_str(&format!("node {} COMPUTE {latency_class}", n.id));
                }
            }
            if !n.deps.is_empty() {
                let list: Vec<String> = n.deps.iter().map(|d| d.to_string()).collect();
                out.push_str(&format!(" deps={}", list.join(",")));
            }
            out.push('\n');
        }
        out
    }

    /// Re-checks every structural invariant and returns all violations.
    ///
    /// Reported line numbers refer to the canonical [`Ddg::emit`] layout
    /// (arrays first, then nodes), so they are meaningful even for graphs
    /// built programmatically.
    pub fn validate(&self) -> Vec<TraceError> {
        let mut errors = Vec::new();
        let node_line = |id: usize| self.arrays.len() + id + 1;
        for (seen, a) in self.arrays.iter().enumerate() {
            if self.arrays[..seen].iter().any(|b| b.name == a.name) {
                errors.push(TraceError::Syntax {
                    line: seen + 1,
                    msg: format!("array '{}' declared twice", a.name),
                });
            }
            if a.len_bytes == 0 {
                errors.push(TraceError::Syntax {
                    line: seen + 1,
                    msg: format!("array '{}' has zero length", a.name),
                });
            }
        }
        for (pos, n) in self.nodes.iter().enumerate() {
            let line = node_line(pos);
            if n.id != pos {
                errors.push(TraceError::Syntax {
                    line,
                    msg: format!("node id {} out of order, expected {pos}", n.id),
                });
            }
            match n.kind {
                NodeKind::Load { array, addr, size } | NodeKind::Store { array, addr, size } => {
                    if array >= self.arrays.len() {
                        errors.push(TraceError::UnknownArray {
                            line,
                            name: format!("<index {array}>"),
                        });
                    } else if addr + size as u64 > self.arrays[array].len_bytes {
                        errors.push(TraceError::OutOfBounds {
                            line,
                            msg: format!(
                                "access [{addr}, {}) exceeds array '{}' of {} bytes",
                                addr + size as u64,
                                self.arrays[array].name,
                                self.arrays[array].len_bytes
                            ),
                        });
                    }
                    if size == 0 {
                        errors.push(TraceError::Syntax {
                            line,
                            msg: "access size must be positive".into(),
                        });
                    }
                }
                NodeKind::Compute { latency_class } => {
                    if latency_class == 0 {
                        errors.push(TraceError::Syntax {
                            line,
                            msg: "latency class must be positive".into(),
                        });
                    }
                }
            }
            for &dep in &n.deps {
                if dep >= pos {
                    errors.push(TraceError::ForwardDependency { line, dep });
                }
            }
        }
        errors
    }

    /// Widest single level of the graph under unit latencies: nodes are
    /// layered by longest dependency path, and the largest layer is an
    /// easily-computed witness of how much parallelism the trace exposes.
    pub fn parallelism_width(&self) -> usize {
        let mut level = vec![0usize; self.nodes.len()];
        let mut width_at: Vec<usize> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let l = n.deps.iter().map(|&d| level[d] + 1).max().unwrap_or(0);
            level[i] = l;
            if l >= width_at.len() {
                width_at.resize(l + 1, 0);
            }
            width_at[l] += 1;
        }
        width_at.into_iter().max().unwrap_or(0)
    }
}

fn parse_num(token: &str, line: usize, what: &str) -> Result<u64, TraceError> {
    token.parse::<u64>().map_err(|_| TraceError::Syntax {
        line,
        msg: format!("{what} '{token}' is not a non-negative integer"),
    })
}

/// Incremental graph construction for the kernel generators. Methods panic
/// on malformed input (an out-of-range dep or array is a programming error
/// in the generator, not a runtime condition).
#[derive(Debug, Default)]
pub struct DdgBuilder {
    ddg: Ddg,
}

impl DdgBuilder {
    pub fn new() -> DdgBuilder {
        DdgBuilder::default()
    }

    /// Declares an array and returns its index.
    pub fn array(&mut self, name: &str, len_bytes: u64) -> usize {
        assert!(self.ddg.array_index(name).is_none(), "array '{name}' declared twice");
        assert!(len_bytes > 0, "array '{name}' must have positive length");
        self.ddg.arrays.push(ArrayDecl { name: name.to_string(), len_bytes });
        self.ddg.arrays.len() - 1
    }

    pub fn load(&mut self, array: usize, addr: u64, size: u32, deps: &[usize]) -> usize {
        self.push(NodeKind::Load { array, addr, size }, deps)
    }

    pub fn store(&mut self, array: usize, addr: u64, size: u32, deps: &[usize]) -> usize {
        self.push(NodeKind::Store { array, addr, size }, deps)
    }

    pub fn compute(&mut self, latency_class: u32, deps: &[usize]) -> usize {
        self.push(NodeKind::Compute { latency_class }, deps)
    }

    fn push(&mut self, kind: NodeKind, deps: &[usize]) -> usize {
        let id = self.ddg.nodes.len();
        if let NodeKind::Load { array, addr, size } | NodeKind::Store { array, addr, size } = kind {
            let decl = self.ddg.arrays.get(array).expect("undeclared array index");
            assert!(size > 0, "access size must be positive");
            assert!(
                addr + size as u64 <= decl.len_bytes,
                "access [{addr}, {}) exceeds array '{}' of {} bytes",
                addr + size as u64,
                decl.name,
                decl.len_bytes
            );
        }
        if let NodeKind::Compute { latency_class } = kind {
            assert!(latency_class > 0, "latency class must be positive");
        }
        let mut dep_set: Vec<usize> = deps.to_vec();
        dep_set.sort_unstable();
        dep_set.dedup();
        if let Some(&worst) = dep_set.last() {
            assert!(worst < id, "node {id} depends on not-yet-declared node {worst}");
        }
        self.ddg.nodes.push(DdgNode { id, kind, deps: dep_set });
        id
    }

    pub fn build(self) -> Ddg {
        debug_assert!(self.ddg.validate().is_empty());
        self.ddg
    }
}
