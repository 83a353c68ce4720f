//! Deterministic trace generators with kernel-shaped address patterns.
//!
//! Each generator reproduces the *access pattern* and *dependence shape* of a
//! well-known kernel, not its arithmetic: a matrix multiply walks A rows and
//! B columns with a loop-carried accumulation chain, a strided FFT touches
//! butterfly pairs whose distance halves per stage, a string matcher streams
//! bytes through a serial compare chain, and a particle kernel gathers
//! neighbor positions through an index array.
//!
//! Every generator models a datapath with a fixed, modest amount of overlap:
//! iteration `i` is tied to iteration `i - W` with an explicit dependence,
//! for a small per-kernel window `W`. Without this, a trace would claim
//! unbounded memory-level parallelism no real unrolled loop provides, and
//! scheduling results would degenerate into pure port arithmetic. The window
//! edges change no addresses, so locality statistics are unaffected.
//!
//! All generators are pure functions of their parameters (plus an explicit
//! seed where control flow or data is input-dependent), so a trace can be
//! regenerated bit-identically anywhere.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trace::{Ddg, DdgBuilder};

/// Overlapped C-matrix elements in flight in the matrix-multiply datapath.
const GEMM_ELEM_WINDOW: usize = 4;
/// Overlapped k-iterations inside one element's dot product. The running
/// accumulator serializes successive k steps, so this stays at 1.
const GEMM_K_WINDOW: usize = 1;
/// Overlapped butterflies in the FFT datapath.
const FFT_BFLY_WINDOW: usize = 8;
/// Text-byte prefetch depth of the string matcher.
const KMP_TEXT_WINDOW: usize = 8;
/// Overlapped atoms in the particle kernel.
const MD_ATOM_WINDOW: usize = 8;
/// Overlapped neighbor slots inside one atom.
const MD_NEIGHBOR_WINDOW: usize = 4;
/// Overlapped grid cells in the stencil.
const STENCIL_CELL_WINDOW: usize = 4;

/// Default pattern length for [`Kernel::Kmp`] when only a text length is
/// given.
pub const DEFAULT_KMP_PATTERN_LEN: usize = 4;
/// Default neighbor count for [`Kernel::MdKnn`] when only an atom count is
/// given.
pub const DEFAULT_MD_NEIGHBORS: usize = 16;
/// Seed used by the standard kernel set.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    /// Transform length must be a power of two (and at least 2).
    NotPowerOfTwo(usize),
    /// Any other impossible shape (empty matrix, pattern longer than text...).
    BadShape(String),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::NotPowerOfTwo(n) => {
                write!(f, "transform length {n} is not a power of two >= 2")
            }
            KernelError::BadShape(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for KernelError {}

/// Dense n x n x n matrix multiply, row-major, `element_size` bytes per
/// element.
///
/// The j loop is unrolled in blocks of [`GEMM_ELEM_WINDOW`]: the block
/// shares one load of `A[i][k]` (the datapath holds it in a register), then
/// each element loads its own `B[k][j]`, multiplies (latency 4), and extends
/// its accumulate chain (latency 1); per (i, j) one store of `C[i][j]`.
/// Produces `n^2 ceil(n/W)` A loads, `n^3` B loads, `2n^3` computes, and
/// `n^2` stores.
pub fn gemm_ncubed(n: usize, element_size: u32) -> Result<Ddg, KernelError> {
    if n == 0 {
        return Err(KernelError::BadShape("matrix dimension must be positive".into()));
    }
    if ![1, 2, 4, 8].contains(&element_size) {
        return Err(KernelError::BadShape(format!(
            "element size {element_size} not one of 1, 2, 4, 8"
        )));
    }
    let es = element_size as u64;
    let bytes = (n * n) as u64 * es;
    let mut b = DdgBuilder::new();
    let a_arr = b.array("A", bytes);
    let b_arr = b.array("B", bytes);
    let c_arr = b.array("C", bytes);
    let mut elem_tail: Vec<usize> = Vec::new();
    for i in 0..n {
        for j0 in (0..n).step_by(GEMM_ELEM_WINDOW) {
            let width = GEMM_ELEM_WINDOW.min(n - j0);
            let gate_of = |e: usize, tail: &[usize]| -> Option<usize> {
                if e >= GEMM_ELEM_WINDOW { Some(tail[e - GEMM_ELEM_WINDOW]) } else { None }
            };
            let mut adds: Vec<Vec<usize>> = vec![Vec::new(); width];
            for k in 0..n {
                let dep_for = |lane: usize, adds: &[Vec<usize>]| -> Vec<usize> {
                    if k >= GEMM_K_WINDOW {
                        vec![adds[lane][k - GEMM_K_WINDOW]]
                    } else {
                        gate_of(i * n + j0 + lane, &elem_tail).into_iter().collect()
                    }
                };
                let la = b.load(a_arr, (i * n + k) as u64 * es, element_size, &dep_for(0, &adds));
                for lane in 0..width {
                    let j = j0 + lane;
                    let lb =
                        b.load(b_arr, (k * n + j) as u64 * es, element_size, &dep_for(lane, &adds));
                    let mul = b.compute(4, &[la, lb]);
                    let add = match adds[lane].last() {
                        Some(&prev) => b.compute(1, &[mul, prev]),
                        None => b.compute(1, &[mul]),
                    };
                    adds[lane].push(add);
                }
            }
            for lane in 0..width {
                let e = i * n + j0 + lane;
                let st = b.store(c_arr, e as u64 * es, element_size, &[*adds[lane].last().unwrap()]);
                elem_tail.push(st);
            }
        }
    }
    Ok(b.build())
}

/// Radix-2 in-place transform over `n` packed complex points (one 8-byte
/// word each), with a stage-major twiddle ROM.
///
/// Stage `s` (0-based, of log2 n stages) pairs elements `t` and
/// `t + n / 2^(s+1)`, so the pair distance starts at half the array and
/// shrinks to one element. Each butterfly loads its two points and its
/// twiddle factor, multiplies (latency 4), combines (latency 1), and stores
/// both points back; stage order is enforced by the real data flow from
/// stores to the next stage's loads. The ROM lays each stage's factors out
/// contiguously (`n - 1` words total), so a group walks its factors
/// stride-1 and later stages re-read the same few words.
pub fn fft_strided(n: usize) -> Result<Ddg, KernelError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(KernelError::NotPowerOfTwo(n));
    }
    let mut b = DdgBuilder::new();
    let data = b.array("data", n as u64 * 8);
    let rom = b.array("twiddle", (n as u64 - 1) * 8);
    let mut last_store: Vec<Option<usize>> = vec![None; n];
    let mut bfly_tail: Vec<usize> = Vec::new();
    let stages = n.trailing_zeros() as usize;
    let mut stage_base = 0u64;
    for s in 0..stages {
        let half = n >> (s + 1);
        for group in (0..n).step_by(2 * half) {
            for (j, t) in (group..group + half).enumerate() {
                let u = t + half;
                let bi = bfly_tail.len();
                let gate = if bi >= FFT_BFLY_WINDOW { Some(bfly_tail[bi - FFT_BFLY_WINDOW]) } else { None };
                let dep_of = |last: Option<usize>| -> Vec<usize> {
                    last.into_iter().chain(gate).collect()
                };
                let lt = b.load(data, t as u64 * 8, 8, &dep_of(last_store[t]));
                let lu = b.load(data, u as u64 * 8, 8, &dep_of(last_store[u]));
                let lw = b.load(rom, (stage_base + j as u64) * 8, 8, &dep_of(None));
                let mul = b.compute(4, &[lu, lw]);
                let combine = b.compute(1, &[mul, lt]);
                let st_t = b.store(data, t as u64 * 8, 8, &[combine]);
                let st_u = b.store(data, u as u64 * 8, 8, &[combine]);
                last_store[t] = Some(st_t);
                last_store[u] = Some(st_u);
                bfly_tail.push(st_u);
            }
        }
        stage_base += half as u64;
    }
    Ok(b.build())
}

/// Knuth-Morris-Pratt over a seeded two-letter text.
///
/// The trace follows the real algorithm on concrete data: the failure-table
/// build, then the scan, with one 1-byte text load per position (strictly
/// increasing addresses) and a serial compare chain carrying the matcher
/// state. Mismatches walk the 4-byte failure table. Text loads may run ahead
/// of the chain by [`KMP_TEXT_WINDOW`] positions.
pub fn kmp(pattern_len: usize, text_len: usize, seed: u64) -> Result<Ddg, KernelError> {
    if pattern_len == 0 || pattern_len > text_len {
        return Err(KernelError::BadShape(format!(
            "need 1 <= pattern_len <= text_len, got {pattern_len} and {text_len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Two-letter alphabet, biased so partial matches actually occur.
    let symbol = |rng: &mut ChaCha8Rng| -> u8 { u8::from(rng.gen_range(0..4) == 0) };
    let pattern: Vec<u8> = (0..pattern_len).map(|_| symbol(&mut rng)).collect();
    let text: Vec<u8> = (0..text_len).map(|_| symbol(&mut rng)).collect();

    let mut b = DdgBuilder::new();
    let pat = b.array("pattern", pattern_len as u64);
    let txt = b.array("text", text_len as u64);
    let fail = b.array("fail", pattern_len as u64 * 4);

    let mut fail_vals = vec![0usize; pattern_len];
    // `chain` is the serial matcher state: every compare and failure-table
    // hop extends it.
    let mut chain: Option<usize> = None;
    let with_chain = |chain: &Option<usize>, extra: &[usize]| -> Vec<usize> {
        extra.iter().copied().chain(chain.iter().copied()).collect()
    };

    let st = b.store(fail, 0, 4, &[]);
    let mut last_fail_store = vec![st; pattern_len];
    let mut k = 0usize;
    for q in 1..pattern_len {
        loop {
            let lpk = b.load(pat, k as u64, 1, &with_chain(&chain, &[]));
            let lpq = b.load(pat, q as u64, 1, &with_chain(&chain, &[]));
            let cmp = b.compute(1, &with_chain(&chain, &[lpk, lpq]));
            chain = Some(cmp);
            if pattern[k] == pattern[q] {
                k += 1;
                break;
            }
            if k == 0 {
                break;
            }
            let lf = b.load(fail, (k as u64 - 1) * 4, 4, &[cmp, last_fail_store[k - 1]]);
            chain = Some(lf);
            k = fail_vals[k - 1];
        }
        fail_vals[q] = k;
        last_fail_store[q] = b.store(fail, q as u64 * 4, 4, &with_chain(&chain, &[]));
    }

    let mut iter_last: Vec<usize> = Vec::new();
    let mut q = 0usize;
    for i in 0..text_len {
        let gate: Vec<usize> = if i >= KMP_TEXT_WINDOW { vec![iter_last[i - KMP_TEXT_WINDOW]] } else { vec![] };
        let lt = b.load(txt, i as u64, 1, &gate);
        loop {
            let lp = b.load(pat, q as u64, 1, &with_chain(&chain, &[]));
            let cmp = b.compute(1, &with_chain(&chain, &[lt, lp]));
            chain = Some(cmp);
            if pattern[q] == text[i] {
                q += 1;
                break;
            }
            if q == 0 {
                break;
            }
            let lf = b.load(fail, (q as u64 - 1) * 4, 4, &[cmp, last_fail_store[q - 1]]);
            chain = Some(lf);
            q = fail_vals[q - 1];
        }
        if q == pattern_len {
            // Full match: restart from the failure link of the last position.
            let lf = b.load(
                fail,
                (pattern_len as u64 - 1) * 4,
                4,
                &with_chain(&chain, &[last_fail_store[pattern_len - 1]]),
            );
            chain = Some(lf);
            q = fail_vals[pattern_len - 1];
        }
        iter_last.push(chain.unwrap());
    }
    Ok(b.build())
}

/// Per-atom k-nearest-neighbor force kernel with gather addressing.
///
/// The neighbor-list array is laid out slot-major (`NL[j][i]` for slot j of
/// atom i), as produced by a builder that fills slot 0 for all atoms, then
/// slot 1, and so on. Each 4-byte index load feeds three 8-byte gathers from
/// the x/y/z position arrays at a seeded random neighbor, followed by a
/// multiply (latency 4), an accumulate chain (latency 1), and three force
/// stores per atom.
pub fn md_knn(atoms: usize, k: usize, seed: u64) -> Result<Ddg, KernelError> {
    if k == 0 || atoms < k {
        return Err(KernelError::BadShape(format!(
            "need atoms >= k >= 1, got atoms={atoms}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DdgBuilder::new();
    let nl = b.array("nl", (atoms * k) as u64 * 4);
    let px = b.array("pos_x", atoms as u64 * 8);
    let py = b.array("pos_y", atoms as u64 * 8);
    let pz = b.array("pos_z", atoms as u64 * 8);
    let fx = b.array("force_x", atoms as u64 * 8);
    let fy = b.array("force_y", atoms as u64 * 8);
    let fz = b.array("force_z", atoms as u64 * 8);
    let mut atom_tail: Vec<usize> = Vec::new();
    for i in 0..atoms {
        let gate = if i >= MD_ATOM_WINDOW { Some(atom_tail[i - MD_ATOM_WINDOW]) } else { None };
        let mut adds: Vec<usize> = Vec::new();
        for j in 0..k {
            let mut nl_deps: Vec<usize> = Vec::new();
            if j >= MD_NEIGHBOR_WINDOW {
                nl_deps.push(adds[j - MD_NEIGHBOR_WINDOW]);
            } else if let Some(g) = gate {
                nl_deps.push(g);
            }
            let ln = b.load(nl, (j * atoms + i) as u64 * 4, 4, &nl_deps);
            let nb = rng.gen_range(0..atoms) as u64;
            let lx = b.load(px, nb * 8, 8, &[ln]);
            let ly = b.load(py, nb * 8, 8, &[ln]);
            let lz = b.load(pz, nb * 8, 8, &[ln]);
            let mul = b.compute(4, &[lx, ly, lz]);
            let add = match adds.last() {
                Some(&prev) => b.compute(1, &[mul, prev]),
                None => b.compute(1, &[mul]),
            };
            adds.push(add);
        }
        let last = *adds.last().unwrap();
        b.store(fx, i as u64 * 8, 8, &[last]);
        b.store(fy, i as u64 * 8, 8, &[last]);
        let sz = b.store(fz, i as u64 * 8, 8, &[last]);
        atom_tail.push(sz);
    }
    Ok(b.build())
}

/// Five-point stencil over an n x n grid of 8-byte doubles, interior cells
/// only, reading `in` and writing `out`.
pub fn stencil2d(n: usize) -> Result<Ddg, KernelError> {
    if n < 3 {
        return Err(KernelError::BadShape(format!("grid side {n} too small for a 5-point stencil")));
    }
    let mut b = DdgBuilder::new();
    let bytes = (n * n) as u64 * 8;
    let src = b.array("in", bytes);
    let dst = b.array("out", bytes);
    let mut cell_tail: Vec<usize> = Vec::new();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let c = cell_tail.len();
            let gate: Vec<usize> =
                if c >= STENCIL_CELL_WINDOW { vec![cell_tail[c - STENCIL_CELL_WINDOW]] } else { vec![] };
            let at = |r: usize, col: usize| (r * n + col) as u64 * 8;
            let loads: Vec<usize> = [
                at(i, j),
                at(i - 1, j),
                at(i + 1, j),
                at(i, j - 1),
                at(i, j + 1),
            ]
            .iter()
            .map(|&addr| b.load(src, addr, 8, &gate))
            .collect();
            let scale = b.compute(4, &loads);
            let sum = b.compute(1, &[scale]);
            let st = b.store(dst, at(i, j), 8, &[sum]);
            cell_tail.push(st);
        }
    }
    Ok(b.build())
}

/// Bottom-up merge sort of n seeded 4-byte keys, ping-ponging between two
/// buffers. The trace follows the real comparison outcomes, so loads from
/// the two runs interleave data-dependently while stores stream sequentially.
pub fn merge_sort(n: usize, seed: u64) -> Result<Ddg, KernelError> {
    if n == 0 {
        return Err(KernelError::BadShape("cannot sort zero elements".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
    let mut b = DdgBuilder::new();
    let buf_a = b.array("keys", n as u64 * 4);
    let buf_b = b.array("scratch", n as u64 * 4);
    // last_store[buffer][slot] orders reuse of each slot across passes.
    let mut last_store: [Vec<Option<usize>>; 2] = [vec![None; n], vec![None; n]];
    let mut src = 0usize;
    let mut width = 1usize;
    let mut chain: Option<usize> = None;
    while width < n {
        let dst = 1 - src;
        let (src_arr, dst_arr) = if src == 0 { (buf_a, buf_b) } else { (buf_b, buf_a) };
        let mut sorted = keys.clone();
        let mut lo = 0usize;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut l, mut r) = (lo, mid);
            for out in lo..hi {
                let take_left = r >= hi || (l < mid && keys[l] <= keys[r]);
                let idx = if take_left { l } else { r };
                let mut deps: Vec<usize> = last_store[src][idx].into_iter().collect();
                if let Some(c) = chain {
                    deps.push(c);
                }
                let ld = b.load(src_arr, idx as u64 * 4, 4, &deps);
                let cmp = b.compute(1, &[ld]);
                chain = Some(cmp);
                let st = b.store(dst_arr, out as u64 * 4, 4, &[cmp]);
                last_store[dst][out] = Some(st);
                sorted[out] = keys[idx];
                if take_left {
                    l += 1;
                } else {
                    r += 1;
                }
            }
            lo = hi;
        }
        keys = sorted;
        src = dst;
        width *= 2;
    }
    Ok(b.build())
}

/// The kernels exposed through the CLI and the sweep configuration format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    GemmNcubed,
    FftStrided,
    Kmp,
    MdKnn,
    Stencil,
    Sort,
}

impl Kernel {
    pub const ALL: [Kernel; 6] = [
        Kernel::GemmNcubed,
        Kernel::FftStrided,
        Kernel::Kmp,
        Kernel::MdKnn,
        Kernel::Stencil,
        Kernel::Sort,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            Kernel::GemmNcubed => "gemm",
            Kernel::FftStrided => "fft",
            Kernel::Kmp => "kmp",
            Kernel::MdKnn => "md",
            Kernel::Stencil => "stencil",
            Kernel::Sort => "sort",
        }
    }

    pub fn from_token(s: &str) -> Option<Kernel> {
        match s {
            "gemm" | "gemm-ncubed" => Some(Kernel::GemmNcubed),
            "fft" | "fft-strided" => Some(Kernel::FftStrided),
            "kmp" => Some(Kernel::Kmp),
            "md" | "md-knn" => Some(Kernel::MdKnn),
            "stencil" => Some(Kernel::Stencil),
            "sort" => Some(Kernel::Sort),
            _ => None,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One kernel instantiation: the primary size knob plus a seed.
///
/// `size` means the matrix dimension (gemm), transform length (fft), text
/// length (kmp, with a pattern of [`DEFAULT_KMP_PATTERN_LEN`]), atom count
/// (md, with [`DEFAULT_MD_NEIGHBORS`] neighbors), grid side (stencil), or
/// key count (sort).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub size: usize,
    pub seed: u64,
}

impl KernelSpec {
    pub fn generate(&self) -> Result<Ddg, KernelError> {
        match self.kernel {
            Kernel::GemmNcubed => gemm_ncubed(self.size, 8),
            Kernel::FftStrided => fft_strided(self.size),
            Kernel::Kmp => kmp(DEFAULT_KMP_PATTERN_LEN.min(self.size), self.size, self.seed),
            Kernel::MdKnn => md_knn(self.size, DEFAULT_MD_NEIGHBORS.min(self.size), self.seed),
            Kernel::Stencil => stencil2d(self.size),
            Kernel::Sort => merge_sort(self.size, self.seed),
        }
    }

    /// Parses `name:size` or `name:size:seed`; the seed defaults to
    /// [`DEFAULT_SEED`]. This is the inverse of the `Display` form.
    pub fn parse(s: &str) -> Result<KernelSpec, KernelError> {
        let bad = || KernelError::BadShape(format!("bad kernel spec '{s}', want name:size[:seed]"));
        let mut parts = s.split(':');
        let kernel = parts.next().and_then(Kernel::from_token).ok_or_else(bad)?;
        let size = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let seed = match parts.next() {
            Some(p) => p.parse().map_err(|_| bad())?,
            None => DEFAULT_SEED,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(KernelSpec { kernel, size, seed })
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kernel, self.size, self.seed)
    }
}

/// The four standard kernels at their reference sizes, used by the default
/// sweep and the locality-versus-ratio study.
pub fn default_specs() -> [KernelSpec; 4] {
    [
        KernelSpec { kernel: Kernel::FftStrided, size: 512, seed: DEFAULT_SEED },
        KernelSpec { kernel: Kernel::GemmNcubed, size: 17, seed: DEFAULT_SEED },
        KernelSpec { kernel: Kernel::Kmp, size: 131072, seed: DEFAULT_SEED },
        KernelSpec { kernel: Kernel::MdKnn, size: 256, seed: DEFAULT_SEED },
    ]
}
