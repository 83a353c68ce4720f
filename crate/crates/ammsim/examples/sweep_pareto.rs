//! Sweeps a configuration space for one kernel and extracts the Pareto set.
//!
//! Every combination of style, bank count, mapping, and port counts is
//! scheduled and priced; infeasible combinations (a banked memory cannot
//! exceed two ports per bank, some designs reject certain port counts)
//! stay in the table flagged as such. The Pareto step keeps the points no
//! other point beats on both cycles and area. The whole table serializes
//! to CSV and loads back losslessly.
//!
//! Run with: cargo run --example sweep_pareto

use ammsim::amm::AmmDesign;
use ammsim::cost::{CostStyle, CostTable};
use ammsim::dse::{self, DesignPoint, Metric, SweepSpace};
use ammsim::kernels::KernelSpec;
use ammsim::sched::Mapping;

fn style_label(p: &DesignPoint) -> &'static str {
    match p.style {
        CostStyle::Banking => "banking",
        CostStyle::Amm(d) => d.token(),
    }
}

fn main() {
    let spec = KernelSpec::parse("md:64").expect("valid kernel spec");
    let ddg = spec.generate().expect("kernel generates");
    let space = SweepSpace {
        traces: vec![(spec.to_string(), ddg)],
        styles: vec![
            CostStyle::Banking,
            CostStyle::Amm(AmmDesign::HbntxRdwr),
            CostStyle::Amm(AmmDesign::Lvt),
        ],
        banks_list: vec![2, 4, 8],
        mapping_list: vec![Mapping::Cyclic, Mapping::Block],
        word_bytes_list: vec![8],
        read_ports_list: vec![1, 2, 4, 8],
        write_ports_list: vec![1, 2],
        compute_unit_list: vec![8],
        cost: CostTable::default(),
    };

    let points = dse::sweep(&space);
    let feasible = points.iter().filter(|p| p.feasible).count();
    println!("evaluated {} configurations, {} feasible", points.len(), feasible);

    let frontier = dse::pareto(&points, Metric::Cycles, Metric::AreaUm2);
    println!();
    println!("cycles/area Pareto frontier:");
    println!(
        "  {:<7} {:>5} {:>7} {:>6} {:>6} {:>8} {:>12}",
        "style", "banks", "map", "rports", "wports", "cycles", "area_um2"
    );
    for p in &frontier {
        println!(
            "  {:<7} {:>5} {:>7} {:>6} {:>6} {:>8} {:>12.1}",
            style_label(p),
            p.banks,
            p.mapping.map(|m| m.token()).unwrap_or("-"),
            p.rports,
            p.wports,
            p.cycles,
            p.area_um2,
        );
    }

    // CSV round-trip: the loaded points compare equal, floats included.
    let csv = dse::emit_points_csv(&points);
    let reloaded = dse::load_points_csv(&csv).expect("emitted CSV loads");
    assert_eq!(reloaded, points);
    println!();
    println!("points CSV round-trips all {} rows losslessly", points.len());
}
