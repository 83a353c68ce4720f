//! Ties spatial locality to how much a multi-port memory is worth.
//!
//! For each kernel the study sweeps banked and multi-port configurations,
//! reduces both to their cycles/area Pareto frontiers, pairs up frontier
//! points of equal performance (within a cycle tolerance), and records the
//! geometric mean of the banking-to-multi-port area ratios. Correlating
//! that ratio with the kernel's locality score across kernels gives the
//! headline: the lower the locality, the more area a banked memory burns
//! to keep up, so the more a true multi-port structure is worth.
//!
//! Sizes here are scaled down so the whole study runs in a few seconds;
//! `ammsim report --mode correlation` covers the full-size version.
//!
//! Run with: cargo run --example locality_vs_ratio

use ammsim::dse::{self, DEFAULT_MATCH_TOLERANCE};
use ammsim::kernels::KernelSpec;

fn main() {
    let mut space = dse::default_space();
    space.traces = ["fft:128", "gemm:8", "kmp:4096", "md:64"]
        .iter()
        .map(|s| {
            let spec = KernelSpec::parse(s).expect("valid kernel spec");
            (spec.to_string(), spec.generate().expect("kernel generates"))
        })
        .collect();

    let report = dse::locality_ratio_study(&space, DEFAULT_MATCH_TOLERANCE)
        .expect("study finds matched pairs");

    println!("{:<14} {:>10} {:>12}", "kernel", "locality", "area ratio");
    for k in &report.pairs {
        println!("{:<14} {:>10.6} {:>12.4}", k.trace, k.locality, k.area_ratio);
    }
    println!();
    println!("Spearman rank correlation: {:.4}", report.rank_correlation);
    if report.rank_correlation < 0.0 {
        println!("negative: scattered-access kernels profit most from true multi-porting");
    }
}
