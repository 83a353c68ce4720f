//! Walks through how the 1R2W XOR design absorbs two same-bank writes.
//!
//! The structure splits the address space over two data banks and adds one
//! reference bank; a data bank stores `logical ^ reference` at each offset,
//! so a read XORs the two. When both write ports land in the same data bank
//! in one cycle, only one physical write into that bank is possible. The
//! lower port writes normally; the higher port is absorbed by re-pointing
//! the reference word at its offset and compensating the sibling bank so
//! the sibling's logical value there stays unchanged.
//!
//! Run with: cargo run --example xor_write_conflict

use ammsim::amm::{AmmDesign, AmmInstance, Geometry, MemRequest};

fn show(inst: &AmmInstance, label: &str) {
    println!("{label}");
    println!("  physical  bank0[2]={:#04x}  bank0[4]={:#04x}", inst.phys_word(0, 2), inst.phys_word(0, 4));
    println!("            bank1[2]={:#04x}  bank1[4]={:#04x}", inst.phys_word(1, 2), inst.phys_word(1, 4));
    println!("            ref  [2]={:#04x}  ref  [4]={:#04x}", inst.phys_word(2, 2), inst.phys_word(2, 4));
    println!(
        "  logical   b0[2]={:#04x}  b0[4]={:#04x}  b1[4]={:#04x}",
        inst.logical_read(2),
        inst.logical_read(4),
        inst.logical_read(8 + 4),
    );
}

fn main() {
    // Depth 8 per bank: addresses 0..8 live in bank 0, 8..16 in bank 1.
    let geom = Geometry::new(8, 8, 2, 1, 2);
    let mut inst = AmmInstance::new(AmmDesign::BntxWr, geom).expect("1R2W geometry");
    show(&inst, "before: everything zero");

    // Both writes hit bank 0 in the same cycle: a write conflict.
    let conflict = [
        MemRequest::Write { port: 0, addr: 2, data: 0x11 },
        MemRequest::Write { port: 1, addr: 4, data: 0x22 },
    ];
    inst.step(&conflict).expect("legal request set");
    println!();
    show(&inst, "after W(2)=0x11 and W(4)=0x22, both into bank 0:");
    println!();
    println!("the second write never touched bank 0: ref[4] took the value and");
    println!("bank1[4] was compensated, so bank 1's logical word 4 still reads 0");

    // Reads confirm the decode, one per cycle on the single read port.
    println!();
    for addr in [2usize, 4, 8 + 4] {
        let res = inst
            .step(&[MemRequest::Read { port: 0, addr }])
            .expect("legal request set");
        println!("read  addr {addr:>2} -> {:#04x}", res.reads[0].value);
    }

    // A later single write at the conflicted offset re-encodes cleanly.
    inst.step(&[MemRequest::Write { port: 0, addr: 4, data: 0x77 }]).expect("legal request set");
    println!();
    show(&inst, "after a lone W(4)=0x77:");

    println!();
    println!("full dump (bank:offset:hex):");
    for line in inst.dump().lines().take(6) {
        println!("  {line}");
    }
    println!("  ... {} words total", geom.addr_space() + geom.depth);
}
