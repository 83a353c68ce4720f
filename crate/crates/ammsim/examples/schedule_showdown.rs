//! Schedules the same accesses onto a banked memory and a multi-port design.
//!
//! Part one is the classic banking pathology: four independent loads with a
//! word stride of two. Under a cyclic two-bank layout every one of them maps
//! to bank 0, so a single read port per bank serializes them completely. A
//! four-read-port structure issues all four in the first cycle.
//!
//! Part two scales read ports on a neighbor-gather kernel and watches the
//! cycle count fall until the dependence structure, not the memory, is the
//! limit.
//!
//! Run with: cargo run --example schedule_showdown

use ammsim::amm::AmmDesign;
use ammsim::kernels;
use ammsim::sched::{self, ComputeConfig, Mapping, MemStructureConfig};
use ammsim::trace::{Ddg, DdgBuilder};

fn stride_two_loads() -> Ddg {
    let mut b = DdgBuilder::new();
    let a = b.array("a", 64);
    for word in 0..4u64 {
        b.load(a, word * 2 * 8, 8, &[]);
    }
    b.build()
}

fn main() {
    let ddg = stride_two_loads();
    let compute = ComputeConfig::uniform_for(&ddg, 1);

    let banked = MemStructureConfig::banking(2, Mapping::Cyclic, 8, 1, 1);
    let r = sched::schedule(&ddg, &banked, &compute).expect("trace fits config");
    println!("four stride-2 loads, 2 banks cyclic, 1R per bank:");
    println!("  total {} cycles, {} bank conflict stalls", r.total_cycles, r.bank_conflict_stalls);
    for ev in &r.issue_log {
        println!("  cycle {}: node {} on {} (word {})", ev.cycle, ev.node, ev.unit, ev.word);
    }

    let multi = MemStructureConfig::amm(AmmDesign::Ideal, 8, 4, 1);
    let r = sched::schedule(&ddg, &multi, &compute).expect("trace fits config");
    println!();
    println!("same loads, one 4R1W structure:");
    println!("  total {} cycles, {} bank conflict stalls", r.total_cycles, r.bank_conflict_stalls);
    for ev in &r.issue_log {
        println!("  cycle {}: node {} on {} (word {})", ev.cycle, ev.node, ev.unit, ev.word);
    }

    // Port scaling on something real: 64 atoms, 16 neighbors each.
    let md = kernels::md_knn(64, 16, 7).expect("kernel generates");
    let compute = ComputeConfig::uniform_for(&md, 8);
    println!();
    println!("md-knn with 64 atoms on an nR2W structure:");
    println!("  {:>6} {:>8} {:>11} {:>11}", "rports", "cycles", "peak reads", "peak writes");
    for rports in [2usize, 4, 8, 16] {
        let mem = MemStructureConfig::amm(AmmDesign::HbntxRdwr, 8, rports, 2);
        let r = sched::schedule(&md, &mem, &compute).expect("trace fits config");
        let stats = sched::conflict_stats(&r);
        println!(
            "  {rports:>6} {:>8} {:>11} {:>11}",
            r.total_cycles, stats.peak_reads, stats.peak_writes
        );
    }
}
