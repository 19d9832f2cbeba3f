//! Testing sets for double-MDS-codes: the trivial set `{0,1,2}^n`, sets
//! derived from unitrades `D` with few unitrade subsets, verification,
//! reconstruction, Cartesian powers and the resulting upper bound.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classifier::ClassRecord;
use crate::error::{check_dim, Error, Result};
use crate::gf2::{build_a, restrict_columns, row_to_set, unitrades_within, Gf2Matrix, XorBasis};
use crate::hypercube::{cells, classify_set, enumerate_lines, CodeSet, Point, MAX_DIM};

/// How a testing set was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Trivial,
    DerivedFromD,
    Product,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Trivial => "trivial",
            Provenance::DerivedFromD => "derived-from-D",
            Provenance::Product => "product",
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Provenance::Trivial, Provenance::DerivedFromD, Provenance::Product]
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown provenance {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestingSet {
    pub points: CodeSet,
    pub provenance: Provenance,
}

impl TestingSet {
    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Header line, then one point per line with space-separated symbols.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} size={} provenance={}\n", self.dim(), self.len(), self.provenance.tag());
        for p in self.points.points() {
            let syms: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
            out.push_str(&syms.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TestingSet> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
        let bad = |line: usize, m: &str| Error::Parse { line, message: m.to_string() };
        let mut n = None;
        let mut size = None;
        let mut prov = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("size", v)) => size = v.parse::<usize>().ok(),
                Some(("provenance", v)) => prov = Some(v.parse::<Provenance>().map_err(|e| bad(1, &e.to_string()))?),
                _ => return Err(bad(1, &format!("unexpected header field {field:?}"))),
            }
        }
        let (n, size, provenance) = match (n, size, prov) {
            (Some(n), Some(s), Some(p)) => (n, s, p),
            _ => return Err(bad(1, "header needs n, size and provenance")),
        };
        check_dim(n, 1, MAX_DIM).map_err(|e| bad(1, &e.to_string()))?;
        let mut points = CodeSet::empty(n)?;
        let mut last = None;
        for (no, line) in lines {
            let coords: Vec<u8> = line
                .split_whitespace()
                .map(|t| t.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(no + 1, "bad symbol"))?;
            if coords.len() != n {
                return Err(bad(no + 1, &format!("expected {n} symbols")));
            }
            let p = Point::new(&coords).map_err(|e| bad(no + 1, &e.to_string()))?;
            if last.is_some_and(|l| l >= p.index()) {
                return Err(bad(no + 1, "points must be strictly increasing"));
            }
            last = Some(p.index());
            points.insert(p.index());
        }
        if points.len() != size {
            return Err(bad(1, &format!("header size {size} but {} points", points.len())));
        }
        Ok(TestingSet { points, provenance })
    }
}

/// A unitrade `D` and the dimension `k_D` of the space of unitrades inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialUnitrade {
    pub d: CodeSet,
    pub k_d: usize,
}

/// `{0,1,2}^n`.
pub fn trivial_testing_set(n: usize) -> Result<TestingSet> {
    check_dim(n, 1, MAX_DIM)?;
    let points =
        CodeSet::from_indices(n, (0..cells(n)).filter(|&i| Point::from_index(n, i).coords().iter().all(|&x| x < 3)))?;
    Ok(TestingSet { points, provenance: Provenance::Trivial })
}

/// `k_D = |D| - rank(A restricted to the columns of D)`.
///
/// ```
/// use freqcube::gf2::basis_unitrade;
/// use freqcube::hypercube::{CodeSet, Point};
/// use freqcube::testing_sets::compute_kd;
///
/// assert_eq!(compute_kd(&CodeSet::empty(3).unwrap()).unwrap(), 0);
/// let d = basis_unitrade(&Point::new(&[1, 2, 3]).unwrap()).unwrap();
/// assert_eq!(compute_kd(&d).unwrap(), 1);
/// ```
pub fn compute_kd(d: &CodeSet) -> Result<usize> {
    if !classify_set(d).is_unitrade {
        return Err(Error::Precondition("D is not a unitrade".into()));
    }
    let a = build_a(d.dim())?;
    Ok(d.len() - restrict_columns(&a, d).rank())
}

fn key(s: &CodeSet) -> [u64; 4] {
    let mut k = [0u64; 4];
    for (dst, w) in k.iter_mut().zip(s.words()) {
        *dst = *w;
    }
    k
}

fn fingerprints_distinct(codes: &[[u64; 4]], mask: [u64; 4]) -> bool {
    let mut f: Vec<[u64; 4]> = codes.iter().map(|c| [c[0] & mask[0], c[1] & mask[1], c[2] & mask[2], c[3] & mask[3]]).collect();
    f.sort_unstable();
    f.windows(2).all(|w| w[0] != w[1])
}

fn code_keys(codes: &[CodeSet]) -> Result<Vec<[u64; 4]>> {
    if codes.iter().any(|c| c.dim() > 4) {
        return Err(Error::Precondition("code lists are supported up to n=4".into()));
    }
    Ok(codes.iter().map(key).collect())
}

/// Whether no two codes of `codes` differ inside `d` only, i.e. the traces
/// `C \ D` are pairwise distinct.
pub fn hypothesis_holds(d: &CodeSet, codes: &[CodeSet]) -> Result<bool> {
    Ok(fingerprints_distinct(&code_keys(codes)?, key(&d.complement())))
}

/// The same hypothesis checked code by code: `C △ U` is never a
/// double-MDS-code for a nonempty unitrade `U ⊆ D`.
pub fn hypothesis_by_subsets(d: &CodeSet, codes: &[CodeSet]) -> Result<bool> {
    let basis = unitrades_within(d)?;
    if basis.len() > 16 {
        return Err(Error::Precondition(format!("2^{} unitrade subsets is too many to list", basis.len())));
    }
    let mut subsets = Vec::new();
    for mask in 1u32..1 << basis.len() {
        let mut u = CodeSet::empty(d.dim())?;
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                u = u.symmetric_difference(b);
            }
        }
        subsets.push(u);
    }
    Ok(codes
        .par_iter()
        .all(|c| subsets.iter().all(|u| !classify_set(&c.symmetric_difference(u)).is_double_mds)))
}

/// Unitrade classes satisfying the hypothesis with `k_D >= 2`.
pub fn find_special_unitrades(unitrades: &[ClassRecord], codes: &[CodeSet]) -> Result<Vec<SpecialUnitrade>> {
    let keys = code_keys(codes)?;
    let mut out: Vec<SpecialUnitrade> = unitrades
        .par_iter()
        .filter(|c| fingerprints_distinct(&keys, key(&c.rep.complement())))
        .map(|c| Ok(SpecialUnitrade { d: c.rep.clone(), k_d: compute_kd(&c.rep)? }))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|s| s.k_d >= 2)
        .collect();
    out.sort_by(|a, b| (a.k_d, a.d.len(), &a.d).cmp(&(b.k_d, b.d.len(), &b.d)));
    Ok(out)
}

/// Greedily extends the row space of `A` by unit rows of points outside `D`,
/// in lexicographic order, until the rank is `4^n - k_D`.
pub fn derive_testing_set(d: &SpecialUnitrade) -> Result<TestingSet> {
    let n = d.d.dim();
    let a = build_a(n)?;
    let mut basis = XorBasis::new(cells(n));
    for r in 0..a.nrows() {
        basis.insert(a.row(r));
    }
    let target = cells(n) - d.k_d;
    let mut points = CodeSet::empty(n)?;
    for u in d.d.complement().iter() {
        if basis.rank() == target {
            break;
        }
        let unit = CodeSet::from_indices(n, [u])?;
        if basis.insert(unit.words()) {
            points.insert(u);
        }
    }
    if basis.rank() != target || points.len() != 3usize.pow(n as u32) - d.k_d {
        return Err(Error::Validation(format!(
            "rank extension reached {} instead of {target}; D is not a unitrade with k_D={}",
            basis.rank(),
            d.k_d
        )));
    }
    Ok(TestingSet { points, provenance: Provenance::DerivedFromD })
}

/// Whether the traces `C ∩ T` are pairwise distinct over `codes`.
pub fn verify_testing_set(t: &TestingSet, codes: &[CodeSet]) -> Result<bool> {
    if codes.iter().any(|c| c.dim() != t.dim()) {
        return Err(Error::Precondition("codes and testing set differ in dimension".into()));
    }
    Ok(fingerprints_distinct(&code_keys(codes)?, key(&t.points)))
}

/// Removes each point of `t` in turn and reports whether the rest is still
/// a testing set.
pub fn removal_scan(t: &TestingSet, codes: &[CodeSet]) -> Result<Vec<(Point, bool)>> {
    let keys = code_keys(codes)?;
    Ok(t.points
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&p| {
            let mut rest = t.points.clone();
            rest.remove(p);
            (Point::from_index(t.dim(), p), fingerprints_distinct(&keys, key(&rest)))
        })
        .collect())
}

/// The double-MDS-code agreeing with `values` on `t`, found by solving
/// `A X = 0, X|_T = values` and keeping the double-MDS solution.
pub fn reconstruct(t: &TestingSet, values: &CodeSet) -> Result<CodeSet> {
    let n = t.dim();
    if values.dim() != n || !values.is_subset(&t.points) {
        return Err(Error::Precondition("values must be a subset of the testing set".into()));
    }
    let mut m = build_a(n)?;
    let mut rhs = vec![false; m.nrows()];
    for p in t.points.iter() {
        m.push_row(CodeSet::from_indices(n, [p])?.words().to_vec());
        rhs.push(values.contains(p));
    }
    let inconsistent = || Error::Validation("values inconsistent with any code".into());
    let sol = m.solve(&rhs).ok_or_else(inconsistent)?;
    if sol.kernel.len() > 20 {
        return Err(Error::Precondition(format!("solution space of dimension {} is too large", sol.kernel.len())));
    }
    let mut found = Vec::new();
    for mask in 0u32..1 << sol.kernel.len() {
        let mut x = sol.particular.clone();
        for (i, k) in sol.kernel.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (a, b) in x.iter_mut().zip(k) {
                    *a ^= b;
                }
            }
        }
        let c = row_to_set(n, &x)?;
        if classify_set(&c).is_double_mds {
            found.push(c);
        }
    }
    match found.len() {
        0 => Err(inconsistent()),
        1 => Ok(found.pop().expect("one candidate")),
        k => Err(Error::Validation(format!("{k} codes agree with the values; not a testing set"))),
    }
}

/// Completes a double-MDS-code from partial knowledge by repeatedly filling
/// the last unknown cell of a line. Returns `None` if propagation stalls or
/// a line would not meet the code in two cells.
pub fn propagate_lines(known: &CodeSet, values: &CodeSet) -> Result<Option<CodeSet>> {
    let n = known.dim();
    let lines: Vec<[usize; 4]> = enumerate_lines(n)?.iter().map(|l| l.indices()).collect();
    let mut known = known.clone();
    let mut out = values.intersection(&known);
    loop {
        let mut progress = false;
        for l in &lines {
            let unknown: Vec<usize> = l.iter().copied().filter(|&i| !known.contains(i)).collect();
            if unknown.len() != 1 {
                continue;
            }
            let ones = l.iter().filter(|&&i| out.contains(i)).count();
            match ones {
                1 => out.insert(unknown[0]),
                2 => {}
                _ => return Ok(None),
            }
            known.insert(unknown[0]);
            progress = true;
        }
        if known.len() == known.universe() {
            return Ok(classify_set(&out).is_double_mds.then_some(out));
        }
        if !progress {
            return Ok(None);
        }
    }
}

/// `T^l ⊂ Σ^{3l}` for a testing set `T` of length 3.
pub fn product_testing_set(t: &TestingSet, l: usize) -> Result<TestingSet> {
    if t.dim() != 3 {
        return Err(Error::Precondition("the product needs a testing set of length 3".into()));
    }
    check_dim(3 * l, 3, MAX_DIM)?;
    if l == 1 {
        return Ok(t.clone());
    }
    let base: Vec<usize> = t.points.iter().collect();
    let mut idx = vec![0usize];
    for _ in 0..l {
        idx = idx.iter().flat_map(|&hi| base.iter().map(move |&lo| hi * 64 + lo)).collect();
    }
    Ok(TestingSet { points: CodeSet::from_indices(3 * l, idx)?, provenance: Provenance::Product })
}

/// Exponent data of the bound `N_n <= 2^(α_n^n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperBound {
    pub n: usize,
    /// `α_n`.
    pub alpha: f64,
    /// `α_n^n`, the size of the testing set behind the bound.
    pub bound_bits: u128,
}

/// `α_n` from testing sets of size `25^l`, `25^l·3` or `25^l·9` for
/// `n = 3l, 3l+1, 3l+2`.
///
/// ```
/// use freqcube::testing_sets::upper_bound;
///
/// let b = upper_bound(5).unwrap();
/// assert_eq!(b.bound_bits, 225);
/// assert!(b.alpha < 2.955);
/// ```
pub fn upper_bound(n: usize) -> Result<UpperBound> {
    check_dim(n, 3, 80)?;
    let (l, r) = (n / 3, n % 3);
    let bound_bits = 25u128.pow(l as u32) * 3u128.pow(r as u32);
    let alpha = ((l as f64 * 25f64.ln() + r as f64 * 3f64.ln()) / n as f64).exp();
    Ok(UpperBound { n, alpha, bound_bits })
}

/// Rank over GF(2) of the span of `sets`.
pub fn span_rank(sets: &[CodeSet]) -> usize {
    let Some(first) = sets.first() else { return 0 };
    let mut basis = XorBasis::new(first.universe());
    for s in sets {
        basis.insert(s.words());
    }
    basis.rank()
}

/// The matrix whose rows are the unit vectors of `t`.
pub fn selection_matrix(t: &TestingSet) -> Result<Gf2Matrix> {
    let n = t.dim();
    let rows: Vec<CodeSet> = t.points.iter().map(|p| CodeSet::from_indices(n, [p])).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Gf2Matrix::zeros(0, cells(n)));
    }
    Gf2Matrix::from_sets(&rows)
}

impl fmt::Display for TestingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{enumerate_all, Kind};
    use crate::gf2::basis_unitrade;

    #[test]
    fn trivial_sets() {
        assert_eq!(trivial_testing_set(1).unwrap().len(), 3);
        assert_eq!(trivial_testing_set(2).unwrap().len(), 9);
        let codes = enumerate_all(2, Kind::DoubleMds).unwrap();
        let t = trivial_testing_set(2).unwrap();
        assert!(verify_testing_set(&t, &codes).unwrap());
        for c in &codes {
            let v = c.intersection(&t.points);
            assert_eq!(&reconstruct(&t, &v).unwrap(), c);
            assert_eq!(propagate_lines(&t.points, &v).unwrap().as_ref(), Some(c));
        }
    }

    #[test]
    fn basis_unitrade_is_not_special() {
        let codes = enumerate_all(3, Kind::DoubleMds).unwrap();
        let d = basis_unitrade(&Point::new(&[1, 1, 1]).unwrap()).unwrap();
        assert!(!hypothesis_holds(&d, &codes).unwrap());
        assert!(!hypothesis_by_subsets(&d, &codes).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let t = trivial_testing_set(2).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("n=2 size=9 provenance=trivial\n0 0\n0 1\n"));
        assert_eq!(TestingSet::from_text(&text).unwrap(), t);
        assert!(TestingSet::from_text("n=2 size=2 provenance=trivial\n0 0\n").is_err());
        assert!(TestingSet::from_text("n=2 size=2 provenance=trivial\n0 1\n0 0\n").is_err());
        assert!(TestingSet::from_text("").is_err());
    }

    #[test]
    fn bounds() {
        assert!(upper_bound(2).is_err());
        let b3 = upper_bound(3).unwrap();
        assert!((b3.alpha - 25f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(upper_bound(4).unwrap().bound_bits, 75);
        assert_eq!(upper_bound(6).unwrap().bound_bits, 625);
    }

    #[test]
    fn products() {
        let t = trivial_testing_set(3).unwrap();
        assert_eq!(product_testing_set(&t, 1).unwrap(), t);
        let t2 = product_testing_set(&t, 2).unwrap();
        assert_eq!(t2.len(), 729);
        assert_eq!(t2.points, trivial_testing_set(6).unwrap().points);
    }
}
