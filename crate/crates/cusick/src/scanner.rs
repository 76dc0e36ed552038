//! Exhaustive minimum scan of the carry value `c_t` over all `t` below a
//! power of two.
//!
//! Because `c_{2t} = c_t`, only odd shifts are evaluated directly; every
//! even shift is covered by expanding an odd witness by powers of two.
//! The walk shares work through the pair recurrence: both children of a
//! binary prefix reuse a single mixture, so scanning everything below
//! `2^B` costs roughly one mixture per integer below `2^(B-1)` instead of
//! one independent evaluation per integer.
//!
//! Two evaluation modes are offered:
//!
//! * [`ScanMode::Exact`] keeps dyadic arithmetic throughout. The reported
//!   minimum is exact.
//! * [`ScanMode::Float`] walks fixed-window `f64` distributions with a
//!   tracked error radius. Every shift whose value could tie the running
//!   minimum, and every shift too close to 1/2 to classify, is re-checked
//!   with exact arithmetic, so the final result is identical to the exact
//!   mode's — the floats only narrow the candidate set.
//!
//! Long scans can stream per-subtree results to a checkpoint file and
//! resume after an interruption; a truncated trailing record (e.g. from a
//! crash mid-write) is discarded and recomputed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{Read as _, Seek, SeekFrom, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carrydist::{dist_for_u64, CarryDistribution, DistPair};
use crate::dyadic::Dyadic;
use crate::{Error, Result};

/// Widest supported scan. The argmin and violation bookkeeping use `u64`
/// shift values and the full walk below `2^40` is already a multi-day job,
/// so wider requests are rejected up front instead of overflowing later.
pub const MAX_SCAN_BITS: u32 = 40;

/// Depth at which the sequential prefix walk hands subtrees to the thread
/// pool. `2^(SPLIT-1)` subtrees is plenty of parallel slack while keeping
/// the checkpoint frontier small.
const SPLIT_DEPTH: u32 = 12;

/// How the per-shift values are evaluated during the walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Dyadic arithmetic everywhere; slowest, no recheck phase.
    Exact,
    /// `f64` windows with certified error radii plus an exact recheck of
    /// every near-minimal or near-1/2 shift.
    Float,
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanMode::Exact => "exact",
            ScanMode::Float => "float",
        })
    }
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ScanMode::Exact),
            "float" => Ok(ScanMode::Float),
            other => Err(Error::InvalidArgument(format!(
                "unknown scan mode `{other}` (expected `exact` or `float`)"
            ))),
        }
    }
}

/// Parameters of a scan.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Scan everything in `1 ≤ t < 2^bits`.
    pub bits: u32,
    /// Evaluation strategy.
    pub mode: ScanMode,
    /// Float mode: carry exponents below this are folded into the error
    /// radius instead of being stored. Must lie in `[-300, -8]`.
    pub tail_cut: i64,
    /// Worker threads. `None` uses the ambient rayon pool; `Some(n)`
    /// builds a dedicated n-thread pool for this scan.
    pub threads: Option<usize>,
    /// Optional checkpoint file for interrupt/resume.
    pub checkpoint: Option<PathBuf>,
}

impl ScanConfig {
    pub fn new(bits: u32, mode: ScanMode) -> Self {
        ScanConfig {
            bits,
            mode,
            tail_cut: DEFAULT_TAIL_CUT,
            threads: None,
            checkpoint: None,
        }
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn with_tail_cut(mut self, tail_cut: i64) -> Self {
        self.tail_cut = tail_cut;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

/// Outcome of a scan. The minimum and every argmin are exact in both modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub bits: u32,
    pub mode: ScanMode,
    /// Least carry value over `1 ≤ t < 2^bits`.
    pub minimum: Dyadic,
    /// The minimum rounded to 12 decimal digits, for quick reading.
    pub minimum_decimal: String,
    /// Odd minimizers, ascending.
    pub argmin_odd: Vec<u64>,
    /// Every minimizer below `2^bits` (odd witnesses expanded by shifts),
    /// ascending.
    pub argmin: Vec<u64>,
    /// Number of `t` in `1 ≤ t < 2^bits` with `c_t ≤ 1/2`.
    pub violations: u64,
    /// Odd shifts evaluated; always `2^(bits-1)`.
    pub scanned_odd: u64,
    /// Float mode only: shifts re-evaluated exactly (0 in exact mode).
    pub exact_rechecks: u64,
}

impl ScanResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("scan result serializes")
    }
}

/// Scans `1 ≤ t < 2^bits` and returns the exact minimum of `c_t`, all
/// minimizers, and the number of shifts with `c_t ≤ 1/2`.
pub fn scan_min_ct(config: &ScanConfig) -> Result<ScanResult> {
    scan_min_ct_with_progress(config, None)
}

/// [`scan_min_ct`] with a progress callback, invoked as `(done, total)`
/// parallel subtrees. The callback may be called concurrently from worker
/// threads.
pub fn scan_min_ct_with_progress(
    config: &ScanConfig,
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> Result<ScanResult> {
    let bits = config.bits;
    if bits == 0 {
        return Err(Error::InvalidArgument(
            "scan width must be at least 1 bit".into(),
        ));
    }
    if bits > MAX_SCAN_BITS {
        return Err(Error::ScanTooWide { bits, max: MAX_SCAN_BITS });
    }
    if !(-300..=-8).contains(&config.tail_cut) {
        return Err(Error::InvalidArgument(format!(
            "float tail cut {} outside the supported range [-300, -8]",
            config.tail_cut
        )));
    }
    match config.threads {
        None => scan_inner(config, progress),
        Some(0) => Err(Error::InvalidArgument(
            "thread count must be positive".into(),
        )),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build a {n}-thread pool: {e}")))?
            .install(|| scan_inner(config, progress)),
    }
}

fn scan_inner(
    config: &ScanConfig,
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> Result<ScanResult> {
    let bits = config.bits;
    let half = Dyadic::new(BigInt::one(), 1);
    let split = bits.saturating_sub(1).min(SPLIT_DEPTH);
    let (shallow, frontier) = shallow_and_frontier(bits, split, &half);
    let total = frontier.len() as u64;

    let checkpoint = match &config.checkpoint {
        Some(path) => Some(Checkpoint::open(path, config, split, &frontier)?),
        None => None,
    };
    let completed: BTreeMap<u32, SubtreeStats> = checkpoint
        .as_ref()
        .map(|c| c.completed.clone())
        .unwrap_or_default();

    let counter = AtomicU64::new(completed.len() as u64);
    if let Some(cb) = progress {
        cb(counter.load(Ordering::Relaxed).min(total), total);
    }
    let write_err: Mutex<Option<std::io::Error>> = Mutex::new(None);

    let pending: Vec<(u32, &DistPair)> = frontier
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u32, p))
        .filter(|(i, _)| !completed.contains_key(i))
        .collect();

    let fresh: Vec<(u32, SubtreeStats)> = pending
        .par_iter()
        .map(|&(index, pair)| {
            let stats = match config.mode {
                ScanMode::Exact => SubtreeStats::Exact(walk_exact(pair.clone(), bits, &half)),
                ScanMode::Float => SubtreeStats::Float(walk_float(pair, bits, config.tail_cut)),
            };
            if let Some(cp) = &checkpoint {
                if let Err(e) = cp.append(index, &stats) {
                    let mut slot = write_err.lock().unwrap();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                }
            }
            let done = counter.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                cb(done.min(total), total);
            }
            (index, stats)
        })
        .collect();

    if let Some(e) = write_err.into_inner().unwrap() {
        return Err(Error::Io(e));
    }

    let mut parts = completed;
    parts.extend(fresh);
    debug_assert_eq!(parts.len(), frontier.len());

    assemble(bits, config.mode, shallow, parts, &half)
}

/// Counts the shifts in `1 ≤ t < 2^bits` with `c_t ≤ 1/2`. The expected
/// answer is zero for every width anyone has ever checked.
pub fn verify_conjecture_range(bits: u32, mode: ScanMode) -> Result<u64> {
    Ok(scan_min_ct(&ScanConfig::new(bits, mode))?.violations)
}

// ---------------------------------------------------------------------------
// Shared walk plumbing
// ---------------------------------------------------------------------------

/// Bit length of a nonzero shift.
fn bitlen(t: u64) -> u32 {
    debug_assert!(t > 0);
    64 - t.leading_zeros()
}

/// Number of shifts `t·2^k < 2^bits`: the odd witness plus its doublings.
fn expanded_count(bits: u32, t: u64) -> u64 {
    u64::from(bits - bitlen(t) + 1)
}

fn prefix_to_u64(prefix: &BigUint) -> u64 {
    prefix.iter_u64_digits().next().unwrap_or(0)
}

/// Walks the prefix tree sequentially down to `split`, evaluating odd
/// prefixes shallower than the frontier exactly, and returns the exact
/// running statistics together with the frontier pairs sorted by prefix.
///
/// The zero prefix only ever expands towards 1 — a leading zero does not
/// change the pair — so each `t ≥ 1` appears exactly once, at depth equal
/// to its bit length.
fn shallow_and_frontier(bits: u32, split: u32, half: &Dyadic) -> (ExactStats, Vec<DistPair>) {
    let mut stats = ExactStats::empty();
    let mut frontier = Vec::new();
    let mut stack = vec![DistPair::initial()];
    while let Some(node) = stack.pop() {
        let depth = node.prefix().bits() as u32;
        if depth == split {
            frontier.push(node);
            continue;
        }
        debug_assert!(depth < split);
        if node.prefix().bit(0) {
            let t = prefix_to_u64(node.prefix());
            stats.observe(t, &node.lo.c_value(), half, expanded_count(bits, t));
        }
        if node.prefix().is_zero() {
            stack.push(node.append_bit(1));
        } else {
            let (c0, c1) = node.children();
            stack.push(c1);
            stack.push(c0);
        }
    }
    frontier.sort_by(|a, b| a.prefix().cmp(b.prefix()));
    (stats, frontier)
}

// ---------------------------------------------------------------------------
// Exact mode
// ---------------------------------------------------------------------------

/// Running exact statistics: minimum, odd minimizers, violation count
/// (expanded over shifts), and odd evaluations.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct ExactStats {
    min: Option<Dyadic>,
    argmin_odd: Vec<u64>,
    violations: u64,
    scanned_odd: u64,
}

impl ExactStats {
    fn empty() -> Self {
        ExactStats { min: None, argmin_odd: Vec::new(), violations: 0, scanned_odd: 0 }
    }

    fn observe(&mut self, t: u64, c: &Dyadic, half: &Dyadic, expanded: u64) {
        self.scanned_odd += 1;
        if c <= half {
            self.violations += expanded;
        }
        self.offer(t, c);
    }

    /// Folds an exact value into the minimum/argmin without touching the
    /// violation or evaluation counters.
    fn offer(&mut self, t: u64, c: &Dyadic) {
        match &self.min {
            Some(m) if c > m => {}
            Some(m) if c == m => self.argmin_odd.push(t),
            _ => {
                self.min = Some(c.clone());
                self.argmin_odd = vec![t];
            }
        }
    }

    fn merge(&mut self, other: ExactStats) {
        self.scanned_odd += other.scanned_odd;
        self.violations += other.violations;
        if let Some(c) = other.min {
            match &self.min {
                Some(m) if &c > m => {}
                Some(m) if &c == m => self.argmin_odd.extend(other.argmin_odd),
                _ => {
                    self.min = Some(c);
                    self.argmin_odd = other.argmin_odd;
                }
            }
        }
    }
}

/// Depth-first exact evaluation of one frontier subtree.
fn walk_exact(root: DistPair, bits: u32, half: &Dyadic) -> ExactStats {
    let mut stats = ExactStats::empty();
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let depth = node.prefix().bits() as u32;
        if node.prefix().bit(0) {
            let t = prefix_to_u64(node.prefix());
            stats.observe(t, &node.lo.c_value(), half, expanded_count(bits, t));
        }
        if depth < bits {
            if node.prefix().is_zero() {
                stack.push(node.append_bit(1));
            } else {
                let (c0, c1) = node.children();
                stack.push(c1);
                stack.push(c0);
            }
        }
    }
    stats
}

// ---------------------------------------------------------------------------
// Float mode
// ---------------------------------------------------------------------------

/// Default lowest carry exponent kept in the float window. Everything
/// below is folded into the error radius; the geometric tail keeps that
/// mass under `2^-48` per distribution.
pub const DEFAULT_TAIL_CUT: i64 = -48;
/// Absolute slack absorbing f64 rounding in one mixture step (the true
/// per-step rounding is below `2^-52`; this is ~30x headroom).
const STEP_SLACK: f64 = 7e-15;
/// Absolute slack absorbing the rounding of the initial exact-to-float
/// conversion of a frontier distribution.
const CONVERT_SLACK: f64 = 1e-14;
/// Absolute slack absorbing the rounding of one tail-sum evaluation.
const SUM_SLACK: f64 = 2e-14;
/// Head start granted to float upper bounds derived from exact shallow
/// values, covering the downward rounding of `Dyadic::to_f64`.
const EXACT_TO_F64_SLACK: f64 = 1e-15;

/// A carry distribution restricted to `j ≥ low`, with `err` bounding the
/// total variation distance to the true distribution (dropped tail mass
/// plus accumulated f64 rounding).
#[derive(Clone, Debug)]
struct FloatDist {
    /// `probs[i] = δ(low + i)`; the top index is `hi - low`.
    probs: Vec<f64>,
    low: i64,
    hi: i64,
    err: f64,
}

impl FloatDist {
    fn from_exact(d: &CarryDistribution, low: i64) -> Self {
        debug_assert!(d.j_min() > low + 4, "frontier tails start far above the window");
        let hi = d.support_max().unwrap_or(d.j_min() - 1).max(0);
        let mut probs = Vec::with_capacity((hi - low + 1) as usize);
        for j in low..=hi {
            probs.push(d.delta_at(j).to_f64());
        }
        // Mass below the window is exactly tail_coeff · 2^low.
        let err = d.tail_coeff().to_f64() * 2f64.powi(low as i32) + CONVERT_SLACK;
        FloatDist { probs, low, hi, err }
    }

    fn get(&self, j: i64) -> f64 {
        if j < self.low || j > self.hi {
            0.0
        } else {
            self.probs[(j - self.low) as usize]
        }
    }

    /// Mass at `j ≥ 0`, i.e. the float image of the carry value.
    fn c_sum(&self) -> f64 {
        self.probs[(-self.low) as usize..].iter().sum()
    }
}

/// `½·shift(a, +1) + ½·shift(b, -1)` in the float window. The bottom bin
/// of `b` falls out of the window; its weight joins the error radius.
fn float_mix(a: &FloatDist, b: &FloatDist) -> FloatDist {
    debug_assert_eq!(a.low, b.low);
    let low = a.low;
    let hi = (a.hi + 1).max(b.hi - 1).max(0);
    let mut probs = Vec::with_capacity((hi - low + 1) as usize);
    for j in low..=hi {
        probs.push(0.5 * a.get(j - 1) + 0.5 * b.get(j + 1));
    }
    let dropped = 0.5 * b.get(low);
    FloatDist { probs, low, hi, err: 0.5 * (a.err + b.err) + dropped + STEP_SLACK }
}

struct FloatPair {
    lo: FloatDist,
    hi: FloatDist,
    t: u64,
    depth: u32,
}

/// A shift whose value might tie the global minimum: `low` is a certified
/// lower bound on its exact carry value.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Candidate {
    t: u64,
    low: f64,
}

/// Per-subtree float statistics. `best_upper` certifies that the subtree
/// minimum is at most that value; `candidates` contains every shift whose
/// certified interval reached below the subtree's running upper bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct FloatStats {
    best_upper: f64,
    candidates: Vec<Candidate>,
    /// Shifts whose interval straddles 1/2; resolved exactly afterwards.
    ambiguous: Vec<u64>,
    /// Violations certain from the float interval alone, expanded.
    sure_violations: u64,
    scanned_odd: u64,
}

/// Depth-first float evaluation of one frontier subtree.
fn walk_float(root: &DistPair, bits: u32, tail_cut: i64) -> FloatStats {
    let mut stats = FloatStats {
        best_upper: f64::INFINITY,
        candidates: Vec::new(),
        ambiguous: Vec::new(),
        sure_violations: 0,
        scanned_odd: 0,
    };
    let seed = FloatPair {
        lo: FloatDist::from_exact(&root.lo, tail_cut),
        hi: FloatDist::from_exact(&root.hi, tail_cut),
        t: prefix_to_u64(root.prefix()),
        depth: root.prefix().bits() as u32,
    };
    let mut stack = vec![seed];
    while let Some(node) = stack.pop() {
        if node.t & 1 == 1 {
            stats.scanned_odd += 1;
            let c = node.lo.c_sum();
            let e = node.lo.err + SUM_SLACK;
            let (low, upp) = (c - e, c + e);
            if upp < stats.best_upper {
                stats.best_upper = upp;
            }
            if low <= stats.best_upper {
                stats.candidates.push(Candidate { t: node.t, low });
            }
            if upp <= 0.5 {
                stats.sure_violations += expanded_count(bits, node.t);
            } else if low <= 0.5 {
                stats.ambiguous.push(node.t);
            }
        }
        if node.depth < bits {
            if node.t == 0 {
                // Only the degenerate one-bit scan seeds the walk at the
                // empty prefix; a leading zero keeps the pair unchanged.
                let mixed = float_mix(&node.lo, &node.hi);
                stack.push(FloatPair { lo: mixed, hi: node.hi.clone(), t: 1, depth: node.depth + 1 });
            } else {
                let mixed = float_mix(&node.lo, &node.hi);
                let t0 = node.t << 1;
                stack.push(FloatPair {
                    lo: mixed.clone(),
                    hi: node.hi.clone(),
                    t: t0 | 1,
                    depth: node.depth + 1,
                });
                stack.push(FloatPair { lo: node.lo.clone(), hi: mixed, t: t0, depth: node.depth + 1 });
            }
        }
    }
    // The running upper bound only ever decreased, so prune once more.
    let cutoff = stats.best_upper;
    stats.candidates.retain(|c| c.low <= cutoff);
    stats
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
enum SubtreeStats {
    Exact(ExactStats),
    Float(FloatStats),
}

fn assemble(
    bits: u32,
    mode: ScanMode,
    shallow: ExactStats,
    parts: BTreeMap<u32, SubtreeStats>,
    half: &Dyadic,
) -> Result<ScanResult> {
    let mut exact = shallow;
    let mut rechecks = 0u64;

    match mode {
        ScanMode::Exact => {
            for (_, part) in parts {
                match part {
                    SubtreeStats::Exact(stats) => exact.merge(stats),
                    SubtreeStats::Float(_) => {
                        return Err(Error::CheckpointMismatch(
                            "float subtree record in an exact scan".into(),
                        ))
                    }
                }
            }
        }
        ScanMode::Float => {
            let mut floats = Vec::with_capacity(parts.len());
            for (_, part) in parts {
                match part {
                    SubtreeStats::Float(stats) => floats.push(stats),
                    SubtreeStats::Exact(_) => {
                        return Err(Error::CheckpointMismatch(
                            "exact subtree record in a float scan".into(),
                        ))
                    }
                }
            }

            let mut global_upper = match &exact.min {
                Some(m) => m.to_f64() + EXACT_TO_F64_SLACK,
                None => f64::INFINITY,
            };
            for stats in &floats {
                global_upper = global_upper.min(stats.best_upper);
            }

            let mut need_min: BTreeSet<u64> = BTreeSet::new();
            let mut need_violation: BTreeSet<u64> = BTreeSet::new();
            for stats in &floats {
                exact.scanned_odd += stats.scanned_odd;
                exact.violations += stats.sure_violations;
                for cand in &stats.candidates {
                    if cand.low <= global_upper {
                        need_min.insert(cand.t);
                    }
                }
                need_violation.extend(stats.ambiguous.iter().copied());
            }

            let union: Vec<u64> = need_min.union(&need_violation).copied().collect();
            rechecks = union.len() as u64;
            let values: BTreeMap<u64, Dyadic> = union
                .into_par_iter()
                .map(|t| (t, dist_for_u64(t).c_value()))
                .collect();

            for &t in &need_violation {
                if values[&t] <= *half {
                    exact.violations += expanded_count(bits, t);
                }
            }
            for &t in &need_min {
                exact.offer(t, &values[&t]);
            }
        }
    }

    debug_assert_eq!(exact.scanned_odd, 1u64 << (bits - 1));

    let minimum = exact.min.expect("the scan always evaluates t = 1");
    let mut argmin_odd = exact.argmin_odd;
    argmin_odd.sort_unstable();
    argmin_odd.dedup();
    let mut argmin = Vec::new();
    for &t in &argmin_odd {
        for k in 0..=(bits - bitlen(t)) {
            argmin.push(t << k);
        }
    }
    argmin.sort_unstable();

    Ok(ScanResult {
        bits,
        mode,
        minimum_decimal: minimum.to_decimal(12),
        minimum,
        argmin_odd,
        argmin,
        violations: exact.violations,
        scanned_odd: exact.scanned_odd,
        exact_rechecks: rechecks,
    })
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

const MAGIC: u32 = u32::from_le_bytes(*b"CSCN");
const CHECKPOINT_VERSION: u32 = 1;
/// Upper bound on a sane record length; anything larger is treated as a
/// corrupt tail rather than allocated.
const MAX_RECORD_LEN: u32 = 1 << 28;

#[derive(Serialize)]
struct RecordRef<'a> {
    index: u32,
    stats: &'a SubtreeStats,
}

#[derive(Deserialize)]
struct RecordOwned {
    index: u32,
    stats: SubtreeStats,
}

/// An open checkpoint file, positioned at its end for appending. Layout:
/// a fixed header (magic, version, bits, split depth, mode, float tail
/// cut, frontier count), the frontier pairs, then length-framed
/// per-subtree records in completion order. All integers are
/// little-endian.
struct Checkpoint {
    file: Mutex<File>,
    completed: BTreeMap<u32, SubtreeStats>,
}

impl Checkpoint {
    fn open(path: &Path, config: &ScanConfig, split: u32, frontier: &[DistPair]) -> Result<Self> {
        if path.exists() {
            Checkpoint::resume(path, config, split, frontier)
        } else {
            Checkpoint::create(path, config, split, frontier)
        }
    }

    fn create(path: &Path, config: &ScanConfig, split: u32, frontier: &[DistPair]) -> Result<Self> {
        let mut file = File::create(path).map_err(|e| with_path(e, path))?;
        file.write_all(&MAGIC.to_le_bytes())?;
        file.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        file.write_all(&config.bits.to_le_bytes())?;
        file.write_all(&split.to_le_bytes())?;
        file.write_all(&[mode_byte(config.mode)])?;
        file.write_all(&config.tail_cut.to_le_bytes())?;
        file.write_all(&(frontier.len() as u32).to_le_bytes())?;
        for pair in frontier {
            let payload = serde_json::to_vec(pair).expect("pair serializes");
            file.write_all(&(payload.len() as u32).to_le_bytes())?;
            file.write_all(&payload)?;
        }
        file.flush()?;
        Ok(Checkpoint { file: Mutex::new(file), completed: BTreeMap::new() })
    }

    fn resume(path: &Path, config: &ScanConfig, split: u32, frontier: &[DistPair]) -> Result<Self> {
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .open(path)
            .map_err(|e| with_path(e, path))?;

        let mismatch = |what: &str| Error::CheckpointMismatch(what.to_string());
        let magic = read_u32(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if magic != MAGIC {
            return Err(mismatch("not a scan checkpoint file"));
        }
        let version = read_u32(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let file_bits = read_u32(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if file_bits != config.bits {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint was taken for a {file_bits}-bit scan, not {}-bit",
                config.bits
            )));
        }
        let file_split = read_u32(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if file_split != split {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint frontier depth {file_split} differs from {split}"
            )));
        }
        let mut mode_buf = [0u8; 1];
        file.read_exact(&mut mode_buf)
            .map_err(|_| mismatch("truncated header"))?;
        if mode_buf[0] != mode_byte(config.mode) {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint was taken in {} mode, not {} mode",
                byte_mode(mode_buf[0]),
                config.mode
            )));
        }
        let file_tail_cut = read_i64(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if file_tail_cut != config.tail_cut {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint float tail cut {file_tail_cut} differs from {}",
                config.tail_cut
            )));
        }
        let count = read_u32(&mut file).ok_or_else(|| mismatch("truncated header"))?;
        if count as usize != frontier.len() {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint frontier has {count} subtrees, expected {}",
                frontier.len()
            )));
        }
        for expected in frontier {
            let payload =
                read_record(&mut file).ok_or_else(|| mismatch("truncated frontier"))?;
            let stored: DistPair = serde_json::from_slice(&payload)
                .map_err(|_| mismatch("unreadable frontier entry"))?;
            if &stored != expected {
                return Err(mismatch("frontier pair differs from this scan's"));
            }
        }

        // Per-subtree records: keep reading until the file ends or turns
        // into a truncated tail, which is cut off and recomputed.
        let mut completed = BTreeMap::new();
        loop {
            let record_start = file.stream_position()?;
            match read_record(&mut file) {
                Some(payload) => match serde_json::from_slice::<RecordOwned>(&payload) {
                    Ok(record) => {
                        completed.insert(record.index, record.stats);
                    }
                    Err(_) => {
                        file.set_len(record_start)?;
                        break;
                    }
                },
                None => {
                    file.set_len(record_start)?;
                    break;
                }
            }
        }
        file.seek(SeekFrom::End(0))?;
        Ok(Checkpoint { file: Mutex::new(file), completed })
    }

    fn append(&self, index: u32, stats: &SubtreeStats) -> std::io::Result<()> {
        let payload = serde_json::to_vec(&RecordRef { index, stats }).expect("record serializes");
        let mut file = self.file.lock().unwrap();
        file.write_all(&(payload.len() as u32).to_le_bytes())?;
        file.write_all(&payload)?;
        file.flush()
    }
}

fn mode_byte(mode: ScanMode) -> u8 {
    match mode {
        ScanMode::Exact => 0,
        ScanMode::Float => 1,
    }
}

fn byte_mode(byte: u8) -> &'static str {
    match byte {
        0 => "exact",
        1 => "float",
        _ => "unknown",
    }
}

fn read_u32(file: &mut File) -> Option<u32> {
    let mut buf = [0u8; 4];
    file.read_exact(&mut buf).ok()?;
    Some(u32::from_le_bytes(buf))
}

fn with_path(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn read_i64(file: &mut File) -> Option<i64> {
    let mut buf = [0u8; 8];
    file.read_exact(&mut buf).ok()?;
    Some(i64::from_le_bytes(buf))
}

/// Reads one length-framed record, or `None` if the file ends first or the
/// frame is obviously corrupt.
fn read_record(file: &mut File) -> Option<Vec<u8>> {
    let len = read_u32(file)?;
    if len == 0 || len > MAX_RECORD_LEN {
        return None;
    }
    let mut payload = vec![0u8; len as usize];
    file.read_exact(&mut payload).ok()?;
    Some(payload)
}
