//! Equivalence checking of every design against the ideal reference model.
//!
//! The oracle is deliberately dumb: an [`AmmDesign::Ideal`] instance stepped
//! with the same request stream. After every cycle the checker compares read
//! responses bit for bit, sweeps `logical_read` over the whole address space,
//! and re-checks the design's structural invariant (parity for HntxRd, decode
//! agreement for the BntxWr family, last-writer table consistency for Lvt).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AmmDesign, AmmError, AmmInstance, Geometry, MemRequest};

/// Summary of a completed equivalence run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub cycles: u64,
    pub reads_compared: u64,
    pub invariant_checks: u64,
}

/// Draws one legal request set: each read port fires with probability ~0.7
/// at a uniform address, each write port likewise but with pairwise distinct
/// write addresses and an in-range value.
pub fn random_request_set(geom: &Geometry, rng: &mut ChaCha8Rng) -> Vec<MemRequest> {
    let space = geom.addr_space();
    let mask = geom.word_mask();
    let mut reqs = Vec::new();
    for port in 0..geom.read_ports {
        if rng.gen_range(0..10) < 7 {
            reqs.push(MemRequest::Read { port, addr: rng.gen_range(0..space) });
        }
    }
    let mut write_addrs: Vec<usize> = Vec::new();
    for port in 0..geom.write_ports {
        if rng.gen_range(0..10) < 7 {
            let addr = loop {
                let a = rng.gen_range(0..space);
                if !write_addrs.contains(&a) {
                    break a;
                }
            };
            write_addrs.push(addr);
            reqs.push(MemRequest::Write { port, addr, data: rng.gen::<u64>() & mask });
        }
    }
    reqs
}

/// Design under test paired with its ideal shadow and an external last-writer
/// record used to audit the live-value table.
#[derive(Clone)]
struct Checked {
    dut: AmmInstance,
    oracle: AmmInstance,
    last_writer: Vec<Option<u16>>,
}

impl Checked {
    fn new(design: AmmDesign, geom: Geometry) -> Result<Checked, AmmError> {
        let dut = AmmInstance::new(design, geom)?;
        let oracle = AmmInstance::new(AmmDesign::Ideal, geom)?;
        let last_writer = vec![None; geom.addr_space()];
        Ok(Checked { dut, oracle, last_writer })
    }

    /// Steps both models and cross-checks them. Returns the number of read
    /// responses compared, or a description of the first divergence.
    fn step(&mut self, reqs: &[MemRequest], cycle: u64) -> Result<u64, String> {
        let got = self.dut.step(reqs);
        let want = self.oracle.step(reqs);
        match (&got, &want) {
            (Ok(g), Ok(w)) => {
                if g != w {
                    return Err(format!(
                        "cycle {cycle}: responses diverge for {reqs:?}: {:?} vs ideal {:?}",
                        g.reads, w.reads
                    ));
                }
            }
            (Err(_), Err(_)) => return Ok(0),
            _ => {
                return Err(format!(
                    "cycle {cycle}: legality verdicts diverge for {reqs:?}: {got:?} vs {want:?}"
                ));
            }
        }
        for req in reqs {
            if let MemRequest::Write { port, addr, .. } = *req {
                self.last_writer[addr] = Some(port as u16);
            }
        }
        self.audit(cycle)?;
        Ok(got.unwrap().reads.len() as u64)
    }

    /// Whole-state audit run after every accepted cycle.
    fn audit(&self, cycle: u64) -> Result<(), String> {
        let geom = *self.dut.geometry();
        for addr in 0..geom.addr_space() {
            let got = self.dut.logical_read(addr);
            let want = self.oracle.logical_read(addr);
            if got != want {
                return Err(format!(
                    "cycle {cycle}: logical_read({addr}) = {got:#x}, ideal holds {want:#x}"
                ));
            }
        }
        match self.dut.design() {
            AmmDesign::HntxRd => {
                let parity = geom.data_banks;
                for off in 0..geom.depth {
                    let mut x = 0u64;
                    for b in 0..geom.data_banks {
                        x ^= self.dut.phys_word(b, off);
                    }
                    if x != self.dut.phys_word(parity, off) {
                        return Err(format!(
                            "cycle {cycle}: parity bank stale at offset {off}"
                        ));
                    }
                }
            }
            AmmDesign::Lvt => {
                for addr in 0..geom.addr_space() {
                    let want = self.last_writer[addr].map(|p| p as usize);
                    if self.dut.lvt_entry(addr) != want {
                        return Err(format!(
                            "cycle {cycle}: table entry for {addr} is {:?}, expected {want:?}",
                            self.dut.lvt_entry(addr)
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Runs `cycles` random legal request sets through `design` and the ideal
/// shadow, auditing after every cycle.
pub fn check_stream_equivalence(
    design: AmmDesign,
    geom: Geometry,
    cycles: u64,
    seed: u64,
) -> Result<EquivalenceReport, String> {
    let mut pair = Checked::new(design, geom).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reads = 0u64;
    for cycle in 0..cycles {
        let reqs = random_request_set(&geom, &mut rng);
        reads += pair.step(&reqs, cycle)?;
    }
    Ok(EquivalenceReport {
        cycles,
        reads_compared: reads,
        invariant_checks: cycles * geom.addr_space() as u64,
    })
}

/// Exhaustively walks short request streams and audits every prefix.
///
/// Full exhaustion over all legal request sets is hopeless (the per-cycle
/// alphabet alone runs into the thousands), so coverage is tiered:
///
/// * tier 1: streams up to length 6 over single-request cycles drawn from a
///   small address/value set that still exercises both banks, two offsets,
///   and (for Lvt) distinct ports;
/// * tier 2: streams over the complete legal request-set alphabet on that
///   reduced address/value set, with the depth chosen so the walk stays
///   within `budget` stream prefixes.
///
/// Returns the number of stream prefixes audited.
pub fn exhaustive_equivalence(
    design: AmmDesign,
    geom: Geometry,
    budget: u64,
) -> Result<u64, String> {
    let addrs: Vec<usize> = if geom.data_banks >= 2 {
        vec![0, 1, geom.depth]
    } else {
        vec![0, 1]
    };
    let mut vals: Vec<u64> = vec![1];
    if geom.word_mask() >= 2 {
        vals.push(2);
    }
    let singles = single_request_alphabet(design, &geom, &addrs, &vals);
    let composites = full_request_alphabet(&geom, &addrs, &vals);

    let mut checked = 0u64;
    let base = Checked::new(design, geom).map_err(|e| e.to_string())?;

    let len1 = 6.min(fitting_depth(singles.len() as u64, budget));
    walk(&base, &singles, len1, &mut checked)?;
    let len2 = 6.min(fitting_depth(composites.len() as u64, budget));
    walk(&base, &composites, len2, &mut checked)?;
    Ok(checked)
}

/// Largest depth whose full tree of `alpha`-ary streams stays within budget.
fn fitting_depth(alpha: u64, budget: u64) -> usize {
    let mut total = 0u64;
    let mut level = 1u64;
    for depth in 1..=6usize {
        level = match level.checked_mul(alpha) {
            Some(v) => v,
            None => return depth - 1,
        };
        total = total.saturating_add(level);
        if total > budget {
            return depth.max(2) - 1;
        }
    }
    6
}

fn walk(
    state: &Checked,
    alphabet: &[Vec<MemRequest>],
    depth: usize,
    checked: &mut u64,
) -> Result<(), String> {
    if depth == 0 {
        return Ok(());
    }
    for reqs in alphabet {
        let mut next = state.clone();
        next.step(reqs, *checked)?;
        *checked += 1;
        walk(&next, alphabet, depth - 1, checked)?;
    }
    Ok(())
}

fn single_request_alphabet(
    design: AmmDesign,
    geom: &Geometry,
    addrs: &[usize],
    vals: &[u64],
) -> Vec<Vec<MemRequest>> {
    // Port symmetry: for the XOR designs a lone request behaves identically
    // on every port, so singles stick to port 0 and leave port interplay to
    // the composite tier. Lvt replicas are owned per port, so both extreme
    // ports are driven.
    let mut read_ports = vec![0usize];
    let mut write_ports = vec![0usize];
    if design == AmmDesign::Lvt {
        if geom.read_ports > 1 {
            read_ports.push(geom.read_ports - 1);
        }
        if geom.write_ports > 1 {
            write_ports.push(geom.write_ports - 1);
        }
    }
    let mut alphabet = Vec::new();
    for &port in &read_ports {
        for &addr in addrs {
            alphabet.push(vec![MemRequest::Read { port, addr }]);
        }
    }
    for &port in &write_ports {
        for &addr in addrs {
            for &data in vals {
                alphabet.push(vec![MemRequest::Write { port, addr, data }]);
            }
        }
    }
    alphabet
}

/// Every legal request set over the reduced address/value sets: each read
/// port optionally fires at any address, each write port optionally fires at
/// any (address, value), minus sets writing one address twice.
fn full_request_alphabet(
    geom: &Geometry,
    addrs: &[usize],
    vals: &[u64],
) -> Vec<Vec<MemRequest>> {
    let mut read_choice: Vec<Option<usize>> = vec![None];
    read_choice.extend(addrs.iter().copied().map(Some));
    let mut write_choice: Vec<Option<(usize, u64)>> = vec![None];
    for &a in addrs {
        for &v in vals {
            write_choice.push(Some((a, v)));
        }
    }
    let mut alphabet = Vec::new();
    let mut read_idx = vec![0usize; geom.read_ports];
    loop {
        let mut write_idx = vec![0usize; geom.write_ports];
        loop {
            let mut reqs = Vec::new();
            let mut write_addrs: Vec<usize> = Vec::new();
            let mut legal = true;
            for (port, &ri) in read_idx.iter().enumerate() {
                if let Some(addr) = read_choice[ri] {
                    reqs.push(MemRequest::Read { port, addr });
                }
            }
            for (port, &wi) in write_idx.iter().enumerate() {
                if let Some((addr, data)) = write_choice[wi] {
                    if write_addrs.contains(&addr) {
                        legal = false;
                        break;
                    }
                    write_addrs.push(addr);
                    reqs.push(MemRequest::Write { port, addr, data });
                }
            }
            if legal {
                alphabet.push(reqs);
            }
            if !bump(&mut write_idx, write_choice.len()) {
                break;
            }
        }
        if !bump(&mut read_idx, read_choice.len()) {
            break;
        }
    }
    alphabet
}

/// Odometer increment; false once every combination has been produced.
fn bump(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}
