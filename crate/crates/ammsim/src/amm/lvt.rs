//! Step logic for the live-value-table design.

use super::{AmmInstance, CycleResult, ReadResponse, Word};

impl AmmInstance {
    /// Replica `(r, p)` lives at physical index `r * write_ports + p`. A write
    /// on port `p` refreshes the `p`-owned replica in every read row and
    /// records `p` in the table; a read on port `r` consults the table and
    /// picks the replica in its own row, so each physical bank serves at most
    /// one read and one write per cycle. Addresses never written read as zero.
    pub(super) fn step_lvt(
        &mut self,
        reads: &[(usize, usize)],
        writes: &[(usize, usize, Word)],
    ) -> CycleResult {
        let m = self.geom.write_ports;
        let mut result = CycleResult::default();
        for &(port, addr) in reads {
            let value = match self.lvt[addr] {
                Some(p) => self.banks[port * m + p as usize][addr],
                None => 0,
            };
            result.reads.push(ReadResponse { port, value });
        }
        for &(port, addr, data) in writes {
            for r in 0..self.geom.read_ports {
                self.banks[r * m + port][addr] = data;
            }
            self.lvt[addr] = Some(port as u16);
        }
        result
    }
}
