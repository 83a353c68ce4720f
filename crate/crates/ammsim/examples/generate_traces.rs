//! Generates dependence-graph traces from the built-in kernel generators.
//!
//! Each generator turns a few parameters (matrix size, transform length,
//! text length, ...) into a trace: array declarations plus load, store, and
//! compute nodes with explicit dependence edges. The text form round-trips
//! through the parser unchanged, so traces can be stored, diffed, and
//! hand-edited.
//!
//! Run with: cargo run --example generate_traces

use ammsim::kernels::{self, KernelSpec};
use ammsim::trace::Ddg;

fn main() {
    println!("{:<12} {:>7} {:>7} {:>6} {:>7}", "kernel", "nodes", "edges", "arrays", "width");
    for spec in ["gemm:8", "fft:64", "kmp:2048", "md:32", "stencil:16", "sort:256"] {
        let spec = KernelSpec::parse(spec).expect("valid kernel spec");
        let ddg = spec.generate().expect("kernel generates");
        let edges: usize = ddg.nodes().iter().map(|n| n.deps.len()).sum();
        println!(
            "{:<12} {:>7} {:>7} {:>6} {:>7}",
            spec.to_string(),
            ddg.nodes().len(),
            edges,
            ddg.arrays().len(),
            ddg.parallelism_width(),
        );
    }

    // A trace small enough to read in full: a 2x2 matrix multiply.
    let tiny = kernels::gemm_ncubed(2, 8).expect("tiny gemm");
    println!();
    println!("gemm n=2 as text:");
    for line in tiny.emit().lines() {
        println!("  {line}");
    }

    // The text form is the interchange format; parse(emit(g)) == g.
    let reparsed = Ddg::parse(&tiny.emit()).expect("emitted trace parses");
    assert_eq!(reparsed.emit(), tiny.emit());
    let problems = reparsed.validate();
    println!();
    println!("round-trip identical, validator reports {} problems", problems.len());
}
