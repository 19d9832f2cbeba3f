//! Classification by layer extension with isomorph rejection.
//!
//! A set of length `n` is split into four layers along the first coordinate.
//! The first layer runs over class representatives of length `n-1`, the
//! second over all sets of length `n-1`; the resulting semi-codes are reduced
//! to classes. Each semi-code representative is extended by every third
//! layer, the fourth layer is forced, and the completed sets are
//! canonicalized and deduplicated.

use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{check_dim, Error, Result};
use crate::hypercube::{cells, classify_set, small_kind, small_line_masks, CodeSet, SetKind};
use crate::split::bipartition;
use crate::symmetry::engine::{pack, unpack};
use crate::symmetry::{
    complement_flags, group_order, orbit_small, with_canonizer, GroupSummary, Mode, MAX_CANON_DIM,
};

/// The family being classified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    DoubleMds,
    Unitrade,
    DoubleCode,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::DoubleMds, Kind::Unitrade, Kind::DoubleCode];

    pub fn name(self) -> &'static str {
        match self {
            Kind::DoubleMds => "dmds",
            Kind::Unitrade => "unitrade",
            Kind::DoubleCode => "doublecode",
        }
    }

    pub fn accepts(self, k: SetKind) -> bool {
        match self {
            Kind::DoubleMds => k.is_double_mds,
            Kind::Unitrade => k.is_unitrade,
            Kind::DoubleCode => k.is_double_code,
        }
    }

    /// Largest length the classifier handles for this family.
    pub fn max_dim(self) -> usize {
        match self {
            Kind::DoubleMds => MAX_CANON_DIM,
            _ => 3,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown kind {s:?} (dmds, unitrade, doublecode)")))
    }
}

/// One equivalence class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub n: usize,
    /// Canonical representative.
    pub rep: CodeSet,
    pub group: GroupSummary,
    /// `24^n·n!/|Aut|`.
    pub class_size: u64,
    pub equiv_to_complement: bool,
    pub isotopic_to_complement: bool,
    /// A double-code whose induced subgraph is bipartite.
    pub splittable: bool,
}

impl ClassRecord {
    /// Builds the record of the class containing `s`.
    pub fn of_set(s: &CodeSet) -> Result<ClassRecord> {
        let (rep, group) = crate::symmetry::canonical_form(s)?;
        let n = rep.dim();
        let (equiv, iso) = complement_flags(&rep)?;
        let splittable = classify_set(&rep).is_double_code && bipartition(&rep).splittable;
        Ok(ClassRecord {
            n,
            class_size: group.class_size(n),
            rep,
            group,
            equiv_to_complement: equiv,
            isotopic_to_complement: iso,
            splittable,
        })
    }

    /// Number of isotopy classes inside this equivalence class, `n!/P`.
    pub fn isotopy_classes(&self) -> u64 {
        let fact: u64 = (1..=self.n as u64).product();
        fact / self.group.perm_order
    }
}

/// A pair of layers `(first, second)` of length `n-1`, standing for the
/// first two layers of a set of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemiCode {
    pub first: CodeSet,
    pub second: CodeSet,
    /// Number of semi-codes in the class (`M_i`).
    pub orbit_size: u64,
}

/// A semi-code class with its number of completions (`R_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiCount {
    pub semi: SemiCode,
    pub completions: u64,
}

/// Both sides of the double count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoubleCount {
    /// `Σ M_i R_i` over semi-code classes.
    pub via_semis: u128,
    /// `Σ 24^n·n!/|Aut(C_j)|` over classes.
    pub via_classes: u128,
}

impl DoubleCount {
    pub fn equal(&self) -> bool {
        self.via_semis == self.via_classes
    }
}

/// Result of a classification run.
#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub kind: Kind,
    /// Sorted by representative.
    pub classes: Vec<ClassRecord>,
    /// Empty for `n = 1`, which is enumerated directly.
    pub semis: Vec<SemiCount>,
    pub count: DoubleCount,
}

impl Classification {
    pub fn total(&self) -> u128 {
        self.count.via_classes
    }

    pub fn isotopy_classes(&self) -> u64 {
        self.classes.iter().map(|c| c.isotopy_classes()).sum()
    }
}

/// Work partitioning and checkpointing for [`classify_with`].
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Semi-code class `i` belongs to shard `i % shards`.
    pub shards: usize,
    /// Finished shards are appended here.
    pub journal: Option<PathBuf>,
    /// Skip shards already completed in the journal.
    pub resume: bool,
    /// Report shard progress on stderr.
    pub verbose: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { shards: 1, journal: None, resume: false, verbose: false }
    }
}

/// Forced fourth layer of a double-MDS-code: every cell needs exactly two
/// of the four layers.
///
/// ```
/// use freqcube::classifier::complete_fourth_layer;
/// use freqcube::hypercube::CodeSet;
///
/// let a = CodeSet::from_indices(1, [0, 1]).unwrap();
/// let d = complete_fourth_layer(&a, &a, &a.complement()).unwrap().unwrap();
/// assert_eq!(d, a.complement());
/// ```
pub fn complete_fourth_layer(l1: &CodeSet, l2: &CodeSet, l3: &CodeSet) -> Result<Option<CodeSet>> {
    let n = l1.dim();
    if l2.dim() != n || l3.dim() != n {
        return Err(Error::Precondition("layers differ in dimension".into()));
    }
    let three = l1.intersection(l2).intersection(l3);
    let none = l1.union(l2).union(l3).complement();
    if !three.is_empty() || !none.is_empty() {
        return Ok(None);
    }
    Ok(Some(l1.symmetric_difference(l2).symmetric_difference(l3)))
}

/// Small-set data for one level of the recursion.
struct Level {
    k: usize,
    masks: Vec<u64>,
    full: u64,
}

impl Level {
    fn new(k: usize) -> Level {
        let w = cells(k) as u32;
        Level { k, masks: small_line_masks(k), full: if w == 64 { !0 } else { (1u64 << w) - 1 } }
    }

    /// Fourth layer completing `(a, b, c)` within the family, if any.
    #[inline]
    fn complete(&self, kind: Kind, a: u64, b: u64, c: u64) -> Option<u64> {
        match kind {
            Kind::DoubleMds => ((a & b & c) == 0 && (a | b | c) == self.full).then_some(a ^ b ^ c),
            Kind::Unitrade => Some(a ^ b ^ c),
            Kind::DoubleCode => {
                let d = a ^ b ^ c;
                ((a & b & c) == 0 && small_kind(&self.masks, d).is_double_code).then_some(d)
            }
        }
    }
}

/// Canonical key and `|Aut|` of a set of length `k+1` given by its layers.
fn canon_key(k: usize, layers: &[u64; 4]) -> ([u64; 4], u64) {
    with_canonizer(|c| {
        let r = c.search(k + 1, layers, Mode::Full, false);
        let key = if k + 1 == 4 { r.image } else { [pack(k + 1, &r.image), 0, 0, 0] };
        (key, r.count)
    })
}

fn key_to_set(n: usize, key: &[u64; 4]) -> CodeSet {
    if n == 4 {
        CodeSet::from_words(4, key)
    } else {
        CodeSet::from_small(n, key[0])
    }
}

/// Canonical representatives (as small sets) of length `k <= 3`.
fn small_reps(k: usize, kind: Kind) -> Result<Vec<u64>> {
    if k == 1 {
        let mut reps: Vec<u64> = (0..16u64)
            .filter(|&s| kind.accepts(small_kind(&small_line_masks(1), s)))
            .map(|s| canon_key(0, &unpack(1, s)).0[0])
            .collect();
        reps.sort_unstable();
        reps.dedup();
        return Ok(reps);
    }
    let prev = small_reps(k - 1, kind)?;
    let run = run_levels(k, kind, &prev, &ClassifyOptions::default())?;
    let mut reps: Vec<u64> = run.classes.keys().map(|key| key[0]).collect();
    reps.sort_unstable();
    Ok(reps)
}

/// Every member of the classes with representatives `reps`.
fn expand(k: usize, reps: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = reps.par_iter().flat_map_iter(|&r| orbit_small(k, r)).collect();
    out.sort_unstable();
    out
}

fn semi_classes_small(k: usize, reps: &[u64], all: &[u64]) -> Vec<(u64, u64, u64)> {
    let group2 = 2 * group_order(k) as u64;
    let mut found: Vec<(u64, u64, u64)> = reps
        .iter()
        .flat_map(|&a| all.iter().map(move |&b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| {
            with_canonizer(|c| {
                let r = c.search_semi(k, a, b, false);
                (r.image[0], r.image[1], group2 / r.count)
            })
        })
        .collect();
    found.par_sort_unstable();
    found.dedup();
    found
}

/// Semi-code classes of length `n` for the given family, with `M_i`.
pub fn semi_code_classes(n: usize, kind: Kind) -> Result<Vec<SemiCode>> {
    check_dim(n, 2, kind.max_dim())?;
    let k = n - 1;
    let reps = small_reps(k, kind)?;
    let all = expand(k, &reps);
    Ok(semi_classes_small(k, &reps, &all)
        .into_iter()
        .map(|(a, b, m)| SemiCode {
            first: CodeSet::from_small(k, a),
            second: CodeSet::from_small(k, b),
            orbit_size: m,
        })
        .collect())
}

struct LevelRun {
    classes: FxHashMap<[u64; 4], u64>,
    semis: Vec<(u64, u64, u64, u64)>,
}

/// Shard output: completion counts and canonical keys with `|Aut|`.
#[derive(Default)]
struct ShardResult {
    counts: Vec<(usize, u64)>,
    classes: FxHashMap<[u64; 4], u64>,
}

fn run_shard(
    level: &Level,
    kind: Kind,
    semis: &[(u64, u64, u64)],
    all: &[u64],
    indices: &[usize],
) -> ShardResult {
    let k = level.k;
    indices
        .par_iter()
        .fold(ShardResult::default, |mut acc, &i| {
            let (a, b, _) = semis[i];
            let mut r = 0u64;
            for &c in all {
                if let Some(d) = level.complete(kind, a, b, c) {
                    r += 1;
                    let (key, aut) = canon_key(k, &[a, b, c, d]);
                    acc.classes.entry(key).or_insert(aut);
                }
            }
            acc.counts.push((i, r));
            acc
        })
        .reduce(ShardResult::default, |mut x, y| {
            x.counts.extend(y.counts);
            for (key, aut) in y.classes {
                x.classes.entry(key).or_insert(aut);
            }
            x
        })
}

fn run_levels(n: usize, kind: Kind, prev_reps: &[u64], opts: &ClassifyOptions) -> Result<LevelRun> {
    let k = n - 1;
    let level = Level::new(k);
    let all = expand(k, prev_reps);
    let semis = semi_classes_small(k, prev_reps, &all);
    let shards = opts.shards.max(1);

    let mut journal = match &opts.journal {
        Some(path) => Some(Journal::open(path, n, kind, shards, semis.len(), opts.resume)?),
        None => None,
    };
    let mut counts: Vec<Option<u64>> = vec![None; semis.len()];
    let mut classes: FxHashMap<[u64; 4], u64> = FxHashMap::default();
    let done: FxHashSet<usize> = journal.as_ref().map(|j| j.done.keys().copied().collect()).unwrap_or_default();
    if let Some(j) = &journal {
        for block in j.done.values() {
            for &(i, r) in &block.counts {
                counts[i] = Some(r);
            }
            for (key, &aut) in &block.classes {
                classes.entry(*key).or_insert(aut);
            }
        }
    }
    for shard in 0..shards {
        if done.contains(&shard) {
            continue;
        }
        let indices: Vec<usize> = (shard..semis.len()).step_by(shards).collect();
        let res = run_shard(&level, kind, &semis, &all, &indices);
        if let Some(j) = journal.as_mut() {
            j.append(shard, n, &res)?;
        }
        if opts.verbose {
            eprintln!("shard {}/{shards}: {} semi-codes, {} classes so far", shard + 1, indices.len(), classes.len());
        }
        for (i, r) in res.counts {
            counts[i] = Some(r);
        }
        for (key, aut) in res.classes {
            classes.entry(key).or_insert(aut);
        }
    }
    let semis = semis
        .iter()
        .zip(counts)
        .map(|(&(a, b, m), r)| {
            r.map(|r| (a, b, m, r))
                .ok_or_else(|| Error::Validation("journal is missing a semi-code class".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelRun { classes, semis })
}

/// Classifies all sets of the family in `H(n,4)`.
///
/// ```
/// use freqcube::classifier::{classify, Kind};
///
/// let c = classify(2, Kind::DoubleMds).unwrap();
/// assert_eq!(c.total(), 90);
/// assert!(c.count.equal());
/// ```
pub fn classify(n: usize, kind: Kind) -> Result<Classification> {
    classify_with(n, kind, &ClassifyOptions::default())
}

/// [`classify`] with sharding and a resumable journal.
pub fn classify_with(n: usize, kind: Kind, opts: &ClassifyOptions) -> Result<Classification> {
    check_dim(n, 1, kind.max_dim())?;
    if n == 1 {
        return classify_base(kind);
    }
    let prev = small_reps(n - 1, kind)?;
    finish(n, kind, &prev, opts)
}

/// Classifies length `n` from a complete class list of length `n-1`.
pub fn classify_from(prev: &[ClassRecord], kind: Kind, opts: &ClassifyOptions) -> Result<Classification> {
    let k = prev.first().map(|c| c.n).ok_or_else(|| Error::Precondition("no previous-level classes".into()))?;
    check_dim(k + 1, 2, kind.max_dim())?;
    let mut reps = Vec::with_capacity(prev.len());
    for c in prev {
        if c.n != k || !kind.accepts(classify_set(&c.rep)) {
            return Err(Error::Precondition(format!("previous-level class {} is not a {kind} of length {k}", c.rep)));
        }
        reps.push(c.rep.to_small());
    }
    finish(k + 1, kind, &reps, opts)
}

fn finish(n: usize, kind: Kind, prev: &[u64], opts: &ClassifyOptions) -> Result<Classification> {
    let run = run_levels(n, kind, prev, opts)?;
    let mut keys: Vec<([u64; 4], u64)> = run.classes.into_iter().collect();
    keys.sort_unstable();
    let classes = keys
        .par_iter()
        .map(|(key, aut)| {
            let rec = ClassRecord::of_set(&key_to_set(n, key))?;
            if rec.rep != key_to_set(n, key) || rec.group.aut_order != *aut {
                return Err(Error::Validation(format!("representative {} is not a canonical fixed point", rec.rep)));
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = n - 1;
    let semis: Vec<SemiCount> = run
        .semis
        .iter()
        .map(|&(a, b, m, r)| SemiCount {
            semi: SemiCode { first: CodeSet::from_small(k, a), second: CodeSet::from_small(k, b), orbit_size: m },
            completions: r,
        })
        .collect();
    let count = validate_double_count(&semis, &classes)?;
    Ok(Classification { n, kind, classes, semis, count })
}

fn classify_base(kind: Kind) -> Result<Classification> {
    let members: Vec<CodeSet> = (0..16usize)
        .map(|m| CodeSet::from_indices(1, (0..4).filter(|&i| m >> i & 1 == 1)))
        .collect::<Result<_>>()?;
    let members: Vec<CodeSet> = members.into_iter().filter(|s| kind.accepts(classify_set(s))).collect();
    let mut classes: Vec<ClassRecord> = Vec::new();
    for s in &members {
        let rec = ClassRecord::of_set(s)?;
        if !classes.iter().any(|c| c.rep == rec.rep) {
            classes.push(rec);
        }
    }
    classes.sort_by(|a, b| a.rep.cmp(&b.rep));
    let via_classes = classes.iter().map(|c| c.class_size as u128).sum();
    let count = DoubleCount { via_semis: members.len() as u128, via_classes };
    if !count.equal() {
        return Err(Error::Validation(format!("{} sets but class sizes sum to {via_classes}", members.len())));
    }
    Ok(Classification { n: 1, kind, classes, semis: Vec::new(), count })
}

/// Compares `Σ M_i R_i` with `Σ 24^n·n!/|Aut(C_j)|`; a mismatch is an error.
pub fn validate_double_count(semis: &[SemiCount], classes: &[ClassRecord]) -> Result<DoubleCount> {
    let count = DoubleCount {
        via_semis: semis.iter().map(|s| s.semi.orbit_size as u128 * s.completions as u128).sum(),
        via_classes: classes.iter().map(|c| group_order(c.n) / c.group.aut_order as u128).sum(),
    };
    if !count.equal() {
        return Err(Error::Validation(format!(
            "double count mismatch: {} via semi-codes, {} via classes",
            count.via_semis, count.via_classes
        )));
    }
    Ok(count)
}

/// `Σ M_i R_i` for length `n`, counting completions without canonicalizing
/// them.
pub fn count_via_semis(n: usize, kind: Kind) -> Result<(Vec<SemiCount>, u128)> {
    check_dim(n, 2, kind.max_dim())?;
    let k = n - 1;
    let reps = small_reps(k, kind)?;
    let all = expand(k, &reps);
    let level = Level::new(k);
    let semis: Vec<SemiCount> = semi_classes_small(k, &reps, &all)
        .into_par_iter()
        .map(|(a, b, m)| {
            let r = all.iter().filter(|&&c| level.complete(kind, a, b, c).is_some()).count() as u64;
            SemiCount {
                semi: SemiCode { first: CodeSet::from_small(k, a), second: CodeSet::from_small(k, b), orbit_size: m },
                completions: r,
            }
        })
        .collect();
    let total = semis.iter().map(|s| s.semi.orbit_size as u128 * s.completions as u128).sum();
    Ok((semis, total))
}

/// Every set of the family of length `n <= 3`, in increasing order.
pub fn enumerate_all(n: usize, kind: Kind) -> Result<Vec<CodeSet>> {
    check_dim(n, 1, 3)?;
    let reps = small_reps(n, kind)?;
    Ok(expand(n, &reps).into_iter().map(|s| CodeSet::from_small(n, s)).collect())
}

/// Append-only record of finished shards.
struct Journal {
    file: File,
    done: FxHashMap<usize, ShardResult>,
}

impl Journal {
    fn header(n: usize, kind: Kind, shards: usize, semis: usize) -> String {
        format!("# freqcube journal n={n} kind={kind} shards={shards} semis={semis}")
    }

    fn open(path: &Path, n: usize, kind: Kind, shards: usize, semis: usize, resume: bool) -> Result<Journal> {
        let header = Self::header(n, kind, shards, semis);
        let mut done = FxHashMap::default();
        if resume && path.exists() {
            let reader = BufReader::new(File::open(path)?);
            let mut lines = reader.lines().enumerate();
            match lines.next() {
                Some((_, Ok(h))) if h == header => {}
                Some((_, Ok(h))) => {
                    return Err(Error::Precondition(format!("journal header {h:?} does not match {header:?}")))
                }
                _ => return Err(Error::Parse { line: 1, message: "empty journal".into() }),
            }
            let mut current: Option<(usize, ShardResult)> = None;
            for (no, line) in lines {
                let line = line?;
                let bad = |m: &str| Error::Parse { line: no + 1, message: m.to_string() };
                let mut f = line.split_whitespace();
                match (f.next(), f.next(), f.next()) {
                    (Some("shard"), Some(id), None) => {
                        current = Some((id.parse().map_err(|_| bad("bad shard id"))?, ShardResult::default()));
                    }
                    (Some("r"), Some(i), Some(r)) => {
                        let (_, res) = current.as_mut().ok_or_else(|| bad("record outside a shard"))?;
                        let i: usize = i.parse().map_err(|_| bad("bad index"))?;
                        if i >= semis {
                            return Err(bad("semi-code index out of range"));
                        }
                        res.counts.push((i, r.parse().map_err(|_| bad("bad count"))?));
                    }
                    (Some("c"), Some(hex), Some(aut)) => {
                        let (_, res) = current.as_mut().ok_or_else(|| bad("record outside a shard"))?;
                        let set = CodeSet::from_hex(n, hex).map_err(|e| bad(&e.to_string()))?;
                        let key = set_key(&set);
                        res.classes.insert(key, aut.parse().map_err(|_| bad("bad automorphism count"))?);
                    }
                    (Some("end"), Some(id), None) => {
                        let id: usize = id.parse().map_err(|_| bad("bad shard id"))?;
                        match current.take() {
                            Some((open, res)) if open == id => {
                                done.insert(id, res);
                            }
                            _ => return Err(bad("unmatched end")),
                        }
                    }
                    _ => return Err(bad("unrecognized journal line")),
                }
            }
        }
        let file = if done.is_empty() && !(resume && path.exists()) {
            let mut f = File::create(path)?;
            writeln!(f, "{header}")?;
            f.sync_data()?;
            f
        } else {
            OpenOptions::new().append(true).open(path)?
        };
        Ok(Journal { file, done })
    }

    fn append(&mut self, shard: usize, n: usize, res: &ShardResult) -> Result<()> {
        let mut block = format!("shard {shard}\n");
        for &(i, r) in &res.counts {
            block.push_str(&format!("r {i} {r}\n"));
        }
        let mut keys: Vec<_> = res.classes.iter().collect();
        keys.sort_unstable();
        for (key, aut) in keys {
            block.push_str(&format!("c {} {aut}\n", key_to_set(n, key).to_hex()));
        }
        block.push_str(&format!("end {shard}\n"));
        self.file.write_all(block.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }
}

fn set_key(s: &CodeSet) -> [u64; 4] {
    if s.dim() == 4 {
        let w = s.words();
        [w[0], w[1], w[2], w[3]]
    } else {
        [s.to_small(), 0, 0, 0]
    }
}
