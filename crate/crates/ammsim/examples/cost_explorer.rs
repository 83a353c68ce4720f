//! Prices memory configurations with the analytic cost model.
//!
//! Every configuration maps to a cost key (style, depth, word bits, banks,
//! ports). The analytic model charges each provisioned bank a base cost
//! plus a per-bit cost, XOR designs pay per-port encode logic and an adder
//! on the clock path, and the replica design pays for its last-writer
//! table. A cost table can also be serialized to CSV and reloaded, which
//! is how measured numbers would replace the model.
//!
//! Run with: cargo run --example cost_explorer

use ammsim::amm::{provisioning, AmmDesign, Geometry};
use ammsim::cost::{self, CostTable};
use ammsim::sched::{Mapping, MemStructureConfig};

const TOTAL_WORDS: u64 = 4096;

fn configs() -> Vec<(&'static str, MemStructureConfig)> {
    vec![
        ("banking 4x1R1W", MemStructureConfig::banking(4, Mapping::Cyclic, 8, 1, 1)),
        ("banking 8x1R1W", MemStructureConfig::banking(8, Mapping::Cyclic, 8, 1, 1)),
        ("hbntx 4R2W", MemStructureConfig::amm(AmmDesign::HbntxRdwr, 8, 4, 2)),
        ("lvt 2R2W", MemStructureConfig::amm(AmmDesign::Lvt, 8, 2, 2)),
        ("lvt 4R2W", MemStructureConfig::amm(AmmDesign::Lvt, 8, 4, 2)),
    ]
}

fn main() {
    let table = CostTable::default();

    println!("pricing {TOTAL_WORDS} words of 8 bytes:");
    println!(
        "  {:<16} {:>6} {:>6} {:>12} {:>10} {:>9}",
        "config", "banks", "depth", "area_um2", "power_mw", "clock_ns"
    );
    let mut entries = Vec::new();
    for (label, mem) in configs() {
        let key = cost::key_for(&mem, TOTAL_WORDS).expect("priceable configuration");
        let entry = cost::cost_of(&key, &table).expect("analytic model answers any key");
        println!(
            "  {:<16} {:>6} {:>6} {:>12.1} {:>10.3} {:>9.2}",
            label, key.banks, key.depth, entry.area_um2, entry.power_mw, entry.clock_ns
        );
        entries.push(entry);
    }

    // Where the numbers come from: the physical resources each design needs.
    println!();
    println!("provisioning behind two of those keys:");
    for (design, rp, wp) in [(AmmDesign::HbntxRdwr, 4, 2), (AmmDesign::Lvt, 2, 2)] {
        let banks = design.data_banks();
        let geom = Geometry::new(TOTAL_WORDS as usize / banks, 64, banks, rp, wp);
        let prov = provisioning(design, &geom).expect("valid geometry");
        let shape = prov.banks[0];
        println!(
            "  {:>5} {rp}R{wp}W: {} banks of {}x{}b ({}R{}W each), {} table bits",
            design.token(),
            prov.banks.len(),
            shape.depth,
            shape.width_bits,
            shape.read_ports,
            shape.write_ports,
            prov.table_bits(),
        );
    }

    // CSV round-trip: emit, reload, and answer the same keys from the table.
    let csv = cost::emit_cost_csv(&entries);
    println!();
    println!("cost CSV ({} data rows):", entries.len());
    for line in csv.lines().take(3) {
        println!("  {line}");
    }
    println!("  ...");
    let reloaded = cost::load_cost_table(&csv).expect("emitted CSV loads");
    for entry in &entries {
        let again = cost::cost_of(&entry.key, &reloaded).expect("key survives round-trip");
        assert_eq!(again, *entry);
    }
    println!("reloaded table answers all {} keys identically", entries.len());
}
