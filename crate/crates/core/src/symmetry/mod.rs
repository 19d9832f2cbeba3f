//! Equivalence of code sets: isotopies and coordinate permutations,
//! canonical representatives, automorphism groups and complement relations.

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;

use crate::classifier::ClassRecord;
use crate::error::{check_dim, Error, Result};
use crate::hypercube::CodeSet;

pub(crate) mod engine;
mod transform;

pub use engine::Canonizer;
pub(crate) use engine::Mode;
pub use transform::{all_transforms, apply, group_order, isotopy_group_order, Transform};

use engine::{pack, unpack, Elem};

/// Largest dimension handled by canonicalization.
pub const MAX_CANON_DIM: usize = 4;

thread_local! {
    static CANON: RefCell<Canonizer> = RefCell::new(Canonizer::new());
}

/// Runs `f` with this thread's canonicalization caches.
pub(crate) fn with_canonizer<R>(f: impl FnOnce(&mut Canonizer) -> R) -> R {
    CANON.with(|c| f(&mut c.borrow_mut()))
}

/// The permutation group induced by `Aut(S)` on coordinates, up to
/// conjugacy. Orders 2 and 4 are split by structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PermGroupType {
    /// Determined by its order alone (1, 3, 6, 8, 12, 24, ...).
    Order(u64),
    /// Order 2, generated by a transposition (`2'`).
    TwoTransposition,
    /// Order 2, a fixed-point-free involution (`2''`).
    TwoFixedPointFree,
    /// Order 4 containing a transposition (`4'`).
    FourTransposition,
    /// Order 4, identity plus fixed-point-free involutions (`4''`).
    FourFixedPointFree,
    /// Cyclic of order 4 (`4°`).
    FourCyclic,
}

impl PermGroupType {
    pub fn order(&self) -> u64 {
        match *self {
            PermGroupType::Order(k) => k,
            PermGroupType::TwoTransposition | PermGroupType::TwoFixedPointFree => 2,
            _ => 4,
        }
    }

    /// Classifies a permutation group given by its elements (each a
    /// permutation of `0..n`).
    pub fn from_elements(perms: &[Vec<u8>]) -> PermGroupType {
        let order = perms.len() as u64;
        let moved = |p: &Vec<u8>| p.iter().enumerate().filter(|&(i, &x)| i != x as usize).count();
        let is_involution = |p: &Vec<u8>| p.iter().enumerate().all(|(i, &x)| p[x as usize] as usize == i);
        let has_transposition = perms.iter().any(|p| moved(p) == 2 && is_involution(p));
        let fpf = perms
            .iter()
            .filter(|p| moved(p) > 0)
            .all(|p| moved(p) == p.len() && is_involution(p));
        let has_order4 = perms.iter().any(|p| !is_involution(p) && {
            let sq: Vec<u8> = p.iter().map(|&x| p[x as usize]).collect();
            is_involution(&sq)
        });
        match order {
            2 if has_transposition => PermGroupType::TwoTransposition,
            2 if fpf => PermGroupType::TwoFixedPointFree,
            4 if has_order4 => PermGroupType::FourCyclic,
            4 if has_transposition => PermGroupType::FourTransposition,
            4 if fpf => PermGroupType::FourFixedPointFree,
            k => PermGroupType::Order(k),
        }
    }

    /// Label without accents; unambiguous for `n <= 3`.
    pub fn plain_label(&self) -> String {
        self.order().to_string()
    }

    /// Sort key placing accents in the order `'`, `''`, `°`.
    pub fn sort_key(&self) -> (u64, u8) {
        let accent = match self {
            PermGroupType::Order(_) => 0,
            PermGroupType::TwoTransposition | PermGroupType::FourTransposition => 1,
            PermGroupType::TwoFixedPointFree | PermGroupType::FourFixedPointFree => 2,
            PermGroupType::FourCyclic => 3,
        };
        (self.order(), accent)
    }
}

impl fmt::Display for PermGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermGroupType::Order(k) => write!(f, "{k}"),
            PermGroupType::TwoTransposition => f.write_str("2'"),
            PermGroupType::TwoFixedPointFree => f.write_str("2''"),
            PermGroupType::FourTransposition => f.write_str("4'"),
            PermGroupType::FourFixedPointFree => f.write_str("4''"),
            PermGroupType::FourCyclic => f.write_str("4°"),
        }
    }
}

impl FromStr for PermGroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "2'" => PermGroupType::TwoTransposition,
            "2''" => PermGroupType::TwoFixedPointFree,
            "4'" => PermGroupType::FourTransposition,
            "4''" => PermGroupType::FourFixedPointFree,
            "4°" | "4o" => PermGroupType::FourCyclic,
            other => PermGroupType::Order(
                other
                    .parse()
                    .map_err(|_| Error::Precondition(format!("bad permutation group label {other:?}")))?,
            ),
        })
    }
}

/// Orders of `Aut(S)` and `Atop(S)` and the induced coordinate group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSummary {
    pub aut_order: u64,
    pub atop_order: u64,
    /// `|Aut| / |Atop|`.
    pub perm_order: u64,
    pub perm_type: PermGroupType,
}

impl GroupSummary {
    /// Size of the equivalence class, `24^n·n!/|Aut|`.
    pub fn class_size(&self, n: usize) -> u64 {
        (group_order(n) / self.aut_order as u128) as u64
    }

    fn from_sigmas(aut_order: u64, sigmas: impl Iterator<Item = Vec<u8>>) -> GroupSummary {
        let mut seen: FxHashSet<Vec<u8>> = FxHashSet::default();
        let mut atop = 0u64;
        for s in sigmas {
            if s.iter().enumerate().all(|(i, &x)| i == x as usize) {
                atop += 1;
            }
            seen.insert(s);
        }
        let perms: Vec<Vec<u8>> = seen.into_iter().collect();
        GroupSummary {
            aut_order,
            atop_order: atop,
            perm_order: perms.len() as u64,
            perm_type: PermGroupType::from_elements(&perms),
        }
    }
}

fn layers0(s: &CodeSet) -> [u64; 4] {
    let n = s.dim();
    if n == 4 {
        let w = s.words();
        [w[0], w[1], w[2], w[3]]
    } else {
        unpack(n, s.to_small())
    }
}

fn from_image(n: usize, image: &[u64; 4]) -> CodeSet {
    if n == 4 {
        CodeSet::from_words(4, image)
    } else {
        CodeSet::from_small(n, pack(n, image))
    }
}

fn check_canon_dim(s: &CodeSet) -> Result<()> {
    check_dim(s.dim(), 1, MAX_CANON_DIM)
}

impl Canonizer {
    /// Canonical representative (least image under the group) and `|Aut|`.
    pub fn canonical_rep(&mut self, s: &CodeSet) -> Result<(CodeSet, u64)> {
        check_canon_dim(s)?;
        let n = s.dim();
        if n <= 3 {
            let info = self.small(n, s.to_small(), Mode::Full);
            return Ok((CodeSet::from_small(n, info.rep), info.class.aut.len() as u64));
        }
        let r = self.search(n, &layers0(s), Mode::Full, false);
        Ok((from_image(n, &r.image), r.count))
    }

    /// Canonical representative with full group data.
    pub fn canonical_form(&mut self, s: &CodeSet) -> Result<(CodeSet, GroupSummary)> {
        check_canon_dim(s)?;
        let n = s.dim();
        if n <= 3 {
            let info = self.small(n, s.to_small(), Mode::Full);
            let aut = &info.class.aut;
            let summary = GroupSummary::from_sigmas(aut.len() as u64, aut.iter().map(|e| e.t.sigma().to_vec()));
            return Ok((CodeSet::from_small(n, info.rep), summary));
        }
        let r = self.search(n, &layers0(s), Mode::Full, true);
        let s0 = r.sigma(&r.witnesses[0], n);
        let mut inv0 = [0u8; 8];
        for i in 0..n {
            inv0[s0[i] as usize] = i as u8;
        }
        // Aut(rep) = { w ∘ w0^{-1} }, so its coordinate part is σ_w ∘ σ_w0^{-1}.
        let sigmas = r.witnesses.iter().map(|w| {
            let sw = r.sigma(w, n);
            (0..n).map(|j| sw[inv0[j] as usize]).collect::<Vec<u8>>()
        });
        let summary = GroupSummary::from_sigmas(r.count, sigmas);
        Ok((from_image(n, &r.image), summary))
    }

    /// A transform mapping `s` onto its canonical representative.
    pub fn transporter(&mut self, s: &CodeSet) -> Result<(CodeSet, Transform)> {
        check_canon_dim(s)?;
        let n = s.dim();
        if n <= 3 {
            let info = self.small(n, s.to_small(), Mode::Full);
            return Ok((CodeSet::from_small(n, info.rep), info.transporter.t));
        }
        let r = self.search(n, &layers0(s), Mode::Full, false);
        Ok((from_image(n, &r.image), r.transporter()))
    }

    /// All automorphisms of `s`.
    pub fn automorphisms(&mut self, s: &CodeSet) -> Result<Vec<Transform>> {
        check_canon_dim(s)?;
        let n = s.dim();
        let (w0, ws) = if n <= 3 {
            let info = self.small(n, s.to_small(), Mode::Full);
            let t0 = info.transporter.t;
            (t0, info.class.aut.iter().map(|e| e.t.compose(&t0)).collect::<Vec<_>>())
        } else {
            let r = self.search(n, &layers0(s), Mode::Full, true);
            let ws: Vec<Transform> = r.witnesses.iter().map(|w| r.transform(w)).collect();
            (ws[0], ws)
        };
        // Stabilizer of s: w0^{-1} ∘ w for every w with w(s) = rep.
        let inv = w0.inverse();
        Ok(ws.iter().map(|w| inv.compose(w)).collect())
    }

    /// Canonical representative under isotopies only.
    pub fn isotopy_canonical_form(&mut self, s: &CodeSet) -> Result<CodeSet> {
        Ok(self.isotopy_canonical_with_order(s)?.0)
    }

    /// Isotopy canonical form and `|Atop|`.
    pub fn isotopy_canonical_with_order(&mut self, s: &CodeSet) -> Result<(CodeSet, u64)> {
        check_canon_dim(s)?;
        let n = s.dim();
        if n <= 3 {
            let info = self.small(n, s.to_small(), Mode::Isotopy);
            return Ok((CodeSet::from_small(n, info.rep), info.class.aut.len() as u64));
        }
        let r = self.search(n, &layers0(s), Mode::Isotopy, false);
        Ok((from_image(n, &r.image), r.count))
    }
}

/// Canonical representative (lexicographically least image) with group data.
///
/// ```
/// use freqcube::hypercube::CodeSet;
/// use freqcube::symmetry::canonical_form;
///
/// let s = CodeSet::from_indices(1, [2, 3]).unwrap();
/// let (rep, g) = canonical_form(&s).unwrap();
/// assert_eq!(rep, CodeSet::from_indices(1, [2, 3]).unwrap());
/// assert_eq!(g.aut_order, 4);
/// ```
pub fn canonical_form(s: &CodeSet) -> Result<(CodeSet, GroupSummary)> {
    with_canonizer(|c| c.canonical_form(s))
}

/// Canonical representative and `|Aut|`, skipping the permutation-group data.
pub fn canonical_rep(s: &CodeSet) -> Result<(CodeSet, u64)> {
    with_canonizer(|c| c.canonical_rep(s))
}

pub fn isotopy_canonical_form(s: &CodeSet) -> Result<CodeSet> {
    with_canonizer(|c| c.isotopy_canonical_form(s))
}

pub fn automorphisms(s: &CodeSet) -> Result<Vec<Transform>> {
    with_canonizer(|c| c.automorphisms(s))
}

pub fn transporter(s: &CodeSet) -> Result<(CodeSet, Transform)> {
    with_canonizer(|c| c.transporter(s))
}

pub fn equivalent(a: &CodeSet, b: &CodeSet) -> Result<bool> {
    Ok(a.dim() == b.dim() && canonical_rep(a)?.0 == canonical_rep(b)?.0)
}

pub fn isotopic(a: &CodeSet, b: &CodeSet) -> Result<bool> {
    Ok(a.dim() == b.dim() && isotopy_canonical_form(a)? == isotopy_canonical_form(b)?)
}

/// `(equivalent to complement, isotopic to complement)`.
pub fn complement_flags(s: &CodeSet) -> Result<(bool, bool)> {
    let c = s.complement();
    Ok((equivalent(s, &c)?, isotopic(s, &c)?))
}

/// Number of isotopy classes inside the equivalence class of `s`: distinct
/// isotopy canonical forms of `σ(s)` over all coordinate permutations `σ`.
pub fn isotopy_classes_in_orbit(s: &CodeSet) -> Result<usize> {
    let n = s.dim();
    let mut seen = HashSet::new();
    for sigma in transform::permutations(n) {
        let t = Transform::coordinate_permutation(&sigma)?;
        seen.insert(isotopy_canonical_form(&t.apply(s)?)?);
    }
    Ok(seen.len())
}

/// The equivalence class of a small set, by closure under generators.
pub(crate) fn orbit_small(k: usize, s: u64) -> Vec<u64> {
    let gens: Vec<Elem> = transform::generators(k).into_iter().map(Elem::new).collect();
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    seen.insert(s);
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        for g in &gens {
            let y = engine::apply_tbl(&g.tbl, x);
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    let mut out: Vec<u64> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Every set equivalent to `s` (for `n <= 3`), in increasing order.
pub fn orbit(s: &CodeSet) -> Result<Vec<CodeSet>> {
    check_dim(s.dim(), 1, 3)?;
    let n = s.dim();
    let mut out: Vec<CodeSet> = orbit_small(n, s.to_small()).into_iter().map(|x| CodeSet::from_small(n, x)).collect();
    out.sort();
    Ok(out)
}

/// One row of the automorphism table: classes sharing `P·T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutRow {
    pub perm_type: PermGroupType,
    /// `T = |Atop|`.
    pub atop: u64,
    /// `N`: classes in the row.
    pub classes: u64,
    /// `N'`: classes equivalent to their complement.
    pub equiv_complement: u64,
    /// `N''`: classes isotopic to their complement.
    pub isotopic_complement: u64,
    /// `N*`: splittable classes.
    pub splittable: u64,
    /// Isotopy classes of codes, `N·n!/P`.
    pub code_isotopy_classes: u64,
    /// Equivalence classes of frequency cubes, `(N+N')/2`.
    pub cube_classes: u64,
    /// Of those, `(N−N')/2` have `P·T` automorphisms; `N'` have twice as many.
    pub cube_classes_plain_aut: u64,
    /// Isotopy classes of frequency cubes, `(N+N')·n!/2P`.
    pub cube_isotopy_classes: u64,
    /// Of those, `(N+N'−2N'')·n!/2P` have `T` autotopies.
    pub cube_isotopy_plain_atop: u64,
    /// and `N''·n!/P` have `2T`.
    pub cube_isotopy_double_atop: u64,
}

impl AutRow {
    pub fn aut_order(&self) -> u64 {
        self.perm_type.order() * self.atop
    }
}

/// Per-row and total frequency-cube quantities for a complete class list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyReport {
    pub n: usize,
    pub rows: Vec<AutRow>,
    pub total_classes: u64,
    pub total_equiv_complement: u64,
    pub total_isotopic_complement: u64,
    pub total_splittable: u64,
    pub total_codes: u128,
    pub code_isotopy_classes: u64,
    pub cube_classes: u64,
    pub cube_isotopy_classes: u64,
}

fn exact_div(num: u64, den: u64, what: &str) -> Result<u64> {
    if den == 0 || !num.is_multiple_of(den) {
        return Err(Error::Validation(format!("{what}: {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

/// `T` descending, then `P` descending, then accent.
type RowKey = (Reverse<u64>, Reverse<u64>, u8);

/// Aggregates class records into the automorphism table with the derived
/// frequency-cube counts.
pub fn frequency_cube_counts(classes: &[ClassRecord]) -> Result<FrequencyReport> {
    let n = classes.first().map(|c| c.n).ok_or_else(|| Error::Precondition("no classes".into()))?;
    let fact: u64 = (1..=n as u64).product();
    let mut groups: BTreeMap<RowKey, Vec<&ClassRecord>> = BTreeMap::new();
    for c in classes {
        if c.n != n {
            return Err(Error::Validation("classes of mixed dimension".into()));
        }
        groups
            .entry({
                let (p, accent) = c.group.perm_type.sort_key();
                (Reverse(c.group.atop_order), Reverse(p), accent)
            })
            .or_default()
            .push(c);
    }
    let mut rows = Vec::new();
    for recs in groups.values() {
        let g = recs[0].group;
        let n_all = recs.len() as u64;
        let n_eq = recs.iter().filter(|r| r.equiv_to_complement).count() as u64;
        let n_iso = recs.iter().filter(|r| r.isotopic_to_complement).count() as u64;
        let n_split = recs.iter().filter(|r| r.splittable).count() as u64;
        if n_eq > n_all || n_iso > n_eq {
            return Err(Error::Validation(format!(
                "inconsistent row {}·{}: N={n_all} N'={n_eq} N''={n_iso}",
                g.perm_type, g.atop_order
            )));
        }
        let p = g.perm_type.order();
        rows.push(AutRow {
            perm_type: g.perm_type,
            atop: g.atop_order,
            classes: n_all,
            equiv_complement: n_eq,
            isotopic_complement: n_iso,
            splittable: n_split,
            code_isotopy_classes: exact_div(n_all * fact, p, "N·n!/P")?,
            cube_classes: exact_div(n_all + n_eq, 2, "(N+N')/2")?,
            cube_classes_plain_aut: exact_div(n_all - n_eq, 2, "(N-N')/2")?,
            cube_isotopy_classes: exact_div((n_all + n_eq) * fact, 2 * p, "(N+N')n!/2P")?,
            cube_isotopy_plain_atop: exact_div((n_all + n_eq - 2 * n_iso) * fact, 2 * p, "(N+N'-2N'')n!/2P")?,
            cube_isotopy_double_atop: exact_div(n_iso * fact, p, "N''n!/P")?,
        });
    }
    Ok(FrequencyReport {
        n,
        total_classes: rows.iter().map(|r| r.classes).sum(),
        total_equiv_complement: rows.iter().map(|r| r.equiv_complement).sum(),
        total_isotopic_complement: rows.iter().map(|r| r.isotopic_complement).sum(),
        total_splittable: rows.iter().map(|r| r.splittable).sum(),
        total_codes: classes.iter().map(|c| c.class_size as u128).sum(),
        code_isotopy_classes: rows.iter().map(|r| r.code_isotopy_classes).sum(),
        cube_classes: rows.iter().map(|r| r.cube_classes).sum(),
        cube_isotopy_classes: rows.iter().map(|r| r.cube_isotopy_classes).sum(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u8]) -> Vec<u8> {
        v.to_vec()
    }

    #[test]
    fn perm_group_types() {
        let id = p(&[0, 1, 2, 3]);
        assert_eq!(PermGroupType::from_elements(std::slice::from_ref(&id)), PermGroupType::Order(1));
        assert_eq!(
            PermGroupType::from_elements(&[id.clone(), p(&[1, 0, 2, 3])]),
            PermGroupType::TwoTransposition
        );
        assert_eq!(
            PermGroupType::from_elements(&[id.clone(), p(&[1, 0, 3, 2])]),
            PermGroupType::TwoFixedPointFree
        );
        let klein = [id.clone(), p(&[1, 0, 3, 2]), p(&[2, 3, 0, 1]), p(&[3, 2, 1, 0])];
        assert_eq!(PermGroupType::from_elements(&klein), PermGroupType::FourFixedPointFree);
        let c4 = [id.clone(), p(&[1, 2, 3, 0]), p(&[2, 3, 0, 1]), p(&[3, 0, 1, 2])];
        assert_eq!(PermGroupType::from_elements(&c4), PermGroupType::FourCyclic);
        let v = [id.clone(), p(&[1, 0, 2, 3]), p(&[0, 1, 3, 2]), p(&[1, 0, 3, 2])];
        assert_eq!(PermGroupType::from_elements(&v), PermGroupType::FourTransposition);
        for t in ["1", "2'", "2''", "4'", "4''", "4°", "6", "24"] {
            assert_eq!(t.parse::<PermGroupType>().unwrap().to_string(), t);
        }
        assert_eq!("4o".parse::<PermGroupType>().unwrap(), PermGroupType::FourCyclic);
        assert!("x".parse::<PermGroupType>().is_err());
    }

    #[test]
    fn canonical_n1() {
        let s = CodeSet::from_indices(1, [0, 1]).unwrap();
        let (rep, g) = canonical_form(&s).unwrap();
        assert_eq!(rep, CodeSet::from_indices(1, [2, 3]).unwrap());
        assert_eq!(g.aut_order, 4);
        assert_eq!(g.class_size(1), 6);
        assert_eq!(complement_flags(&s).unwrap(), (true, true));
    }

    #[test]
    fn automorphisms_fix_the_set() {
        let s = CodeSet::from_indices(2, [0, 1, 4, 5, 10, 11, 14, 15]).unwrap();
        let auts = automorphisms(&s).unwrap();
        assert_eq!(auts.len() as u64, canonical_form(&s).unwrap().1.aut_order);
        for a in &auts {
            assert_eq!(a.apply(&s).unwrap(), s);
        }
        let (rep, t) = transporter(&s).unwrap();
        assert_eq!(t.apply(&s).unwrap(), rep);
    }

    #[test]
    fn orbit_sizes_match_stabilizers() {
        for idx in [vec![0usize, 1, 4, 5, 10, 11, 14, 15], vec![0, 5, 10], vec![]] {
            let s = CodeSet::from_indices(2, idx).unwrap();
            let o = orbit(&s).unwrap();
            let (_, g) = canonical_form(&s).unwrap();
            assert_eq!(o.len() as u64, g.class_size(2));
        }
    }

    #[test]
    fn n4_group_data_on_a_product_code() {
        // x1+x2+x3+x4 parity over {0,1} halves: a highly symmetric code.
        let s = CodeSet::from_indices(
            4,
            (0..256).filter(|&i: &usize| (0..4).map(|k| (i >> (2 * k)) & 1).sum::<usize>() % 2 == 0),
        )
        .unwrap();
        let (rep, g) = canonical_form(&s).unwrap();
        assert_eq!(canonical_rep(&rep).unwrap().0, rep);
        assert_eq!(g.perm_order, 24);
        assert_eq!(g.aut_order, g.perm_order * g.atop_order);
        let (_, iso_t) = with_canonizer(|c| c.isotopy_canonical_with_order(&s)).unwrap();
        assert_eq!(iso_t, g.atop_order);
    }
}
