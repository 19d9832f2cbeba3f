//! Linear algebra over GF(2) on packed bit rows, the line-incidence matrix
//! `A` of `H(n,4)` and the unitrade space (its kernel).

use crate::error::{check_dim, Error, Result};
use crate::hypercube::{cells, enumerate_lines, word_bit, CodeSet, Point};

/// Packed bit vector; bit `j` lives in word `j / 64` at position `63 - j % 64`,
/// the same layout as [`CodeSet`].
pub type BitRow = Vec<u64>;

fn words_for(cols: usize) -> usize {
    cols.div_ceil(64).max(1)
}

#[inline]
fn get_bit(row: &[u64], j: usize) -> bool {
    let (w, b) = word_bit(j);
    row[w] & b != 0
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    row.iter().position(|&w| w != 0).map(|i| i * 64 + row[i].leading_zeros() as usize)
}

/// A dense matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitRow>,
}

/// Solutions of `M x = b`: `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: BitRow,
    pub kernel: Vec<BitRow>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { cols, rows: vec![vec![0; words_for(cols)]; rows] }
    }

    pub fn identity(m: usize) -> Self {
        let mut out = Self::zeros(m, m);
        for i in 0..m {
            out.set(i, i, true);
        }
        out
    }

    /// Rows given as code sets; the column count is their universe size.
    pub fn from_sets(sets: &[CodeSet]) -> Result<Self> {
        let cols = sets.first().map(|s| s.universe()).unwrap_or(0);
        if sets.iter().any(|s| s.universe() != cols) {
            return Err(Error::Precondition("rows of different length".into()));
        }
        Ok(Gf2Matrix { cols, rows: sets.iter().map(|s| s.words().to_vec()).collect() })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(&self.rows[r], c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let (w, b) = word_bit(c);
        if v {
            self.rows[r][w] |= b;
        } else {
            self.rows[r][w] &= !b;
        }
    }

    pub fn push_row(&mut self, row: BitRow) {
        assert_eq!(row.len(), words_for(self.cols));
        self.rows.push(row);
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.nrows());
        for r in 0..self.nrows() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    /// `M x` as one bit per row.
    pub fn mul_vec(&self, x: &[u64]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1)
            .collect()
    }

    /// Reduced row echelon form of `[M | rhs]`; returns pivot columns in
    /// order, with reduced rows and right-hand sides, or `None` if a zero row
    /// has right-hand side 1.
    fn rref(&self, rhs: &[bool]) -> Option<(Vec<usize>, Vec<BitRow>, Vec<bool>)> {
        let mut rows = self.rows.clone();
        let mut b = rhs.to_vec();
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..self.cols {
            let Some(p) = (top..rows.len()).find(|&r| get_bit(&rows[r], c)) else { continue };
            rows.swap(top, p);
            b.swap(top, p);
            let pivot_row = rows[top].clone();
            let pivot_b = b[top];
            for r in 0..rows.len() {
                if r != top && get_bit(&rows[r], c) {
                    xor_into(&mut rows[r], &pivot_row);
                    b[r] ^= pivot_b;
                }
            }
            pivots.push(c);
            top += 1;
            if top == rows.len() {
                break;
            }
        }
        if b[top..].iter().any(|&x| x) {
            return None;
        }
        rows.truncate(top);
        b.truncate(top);
        Some((pivots, rows, b))
    }

    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new(self.cols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    /// A basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<BitRow> {
        self.solve(&vec![false; self.nrows()]).expect("homogeneous systems are solvable").kernel
    }

    /// All solutions of `M x = rhs`, or `None`.
    pub fn solve(&self, rhs: &[bool]) -> Option<AffineSolution> {
        assert_eq!(rhs.len(), self.nrows());
        let (pivots, rows, b) = self.rref(rhs)?;
        let w = words_for(self.cols);
        let mut particular = vec![0u64; w];
        for (i, &c) in pivots.iter().enumerate() {
            if b[i] {
                let (wi, bit) = word_bit(c);
                particular[wi] |= bit;
            }
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut kernel = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; w];
            let (wi, bit) = word_bit(f);
            v[wi] |= bit;
            for (i, &c) in pivots.iter().enumerate() {
                if get_bit(&rows[i], f) {
                    let (wc, bc) = word_bit(c);
                    v[wc] |= bc;
                }
            }
            kernel.push(v);
        }
        Some(AffineSolution { particular, kernel })
    }
}

/// Incrementally built row space with leading-bit pivots.
#[derive(Clone, Debug, Default)]
pub struct XorBasis {
    rows: Vec<BitRow>,
    /// Row index by leading column.
    by_pivot: Vec<Option<usize>>,
}

impl XorBasis {
    pub fn new(cols: usize) -> Self {
        XorBasis { rows: Vec::new(), by_pivot: vec![None; cols] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` until its leading bit is not a pivot; zero iff `v` is in
    /// the span.
    pub fn reduce(&self, v: &[u64]) -> BitRow {
        let mut v = v.to_vec();
        while let Some(c) = leading_bit(&v) {
            match self.by_pivot[c] {
                Some(i) => xor_into(&mut v, &self.rows[i]),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&w| w == 0)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        while let Some(c) = leading_bit(&v) {
            match self.by_pivot[c] {
                Some(i) => xor_into(&mut v, &self.rows[i]),
                None => {
                    self.by_pivot[c] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
        false
    }
}

/// The line-incidence matrix of `H(n,4)`: one row per line (direction-major),
/// one column per cell.
///
/// ```
/// use freqcube::gf2::build_a;
///
/// assert_eq!(build_a(3).unwrap().rank(), 64 - 27);
/// ```
pub fn build_a(n: usize) -> Result<Gf2Matrix> {
    check_dim(n, 1, 6)?;
    let rows: Vec<CodeSet> = enumerate_lines(n)?
        .iter()
        .map(|l| CodeSet::from_indices(n, l.indices()))
        .collect::<Result<_>>()?;
    Gf2Matrix::from_sets(&rows)
}

/// Whether `A X_s = 0`, i.e. `s` is a unitrade.
pub fn in_kernel(a: &Gf2Matrix, s: &CodeSet) -> bool {
    a.mul_vec(s.words()).iter().all(|&b| !b)
}

/// `{1,2,3}^n` as a code set.
pub fn nonzero_core(n: usize) -> Result<CodeSet> {
    CodeSet::from_indices(n, (0..cells(n)).filter(|&i| Point::from_index(n, i).coords().iter().all(|&x| x != 0)))
}

/// `D_a`: the `2^n` words obtained from `a ∈ {1,2,3}^n` by replacing any
/// coordinates with 0.
pub fn basis_unitrade(a: &Point) -> Result<CodeSet> {
    let n = a.dim();
    if a.coords().contains(&0) {
        return Err(Error::Precondition(format!("{a} has a zero coordinate")));
    }
    let idx = (0..1usize << n).map(|mask| {
        (0..n).fold(0usize, |acc, i| acc * 4 + if mask >> i & 1 == 1 { a.coords()[i] as usize } else { 0 })
    });
    CodeSet::from_indices(n, idx)
}

/// The `3^n` sets `D_a`, with `a` in lexicographic order.
pub fn kernel_basis(n: usize) -> Result<Vec<CodeSet>> {
    check_dim(n, 1, 6)?;
    nonzero_core(n)?.points().map(|a| basis_unitrade(&a)).collect()
}

/// The unique unitrade whose intersection with `{1,2,3}^n` is `core`.
///
/// ```
/// use freqcube::gf2::unitrade_from_core;
/// use freqcube::hypercube::{classify_set, CodeSet};
///
/// let core = CodeSet::from_indices(2, [5, 15]).unwrap(); // (1,1), (3,3)
/// let u = unitrade_from_core(&core).unwrap();
/// assert!(classify_set(&u).is_unitrade);
/// assert_eq!(u.intersection(&freqcube::gf2::nonzero_core(2).unwrap()), core);
/// ```
pub fn unitrade_from_core(core: &CodeSet) -> Result<CodeSet> {
    let n = core.dim();
    check_dim(n, 1, 6)?;
    if !core.is_subset(&nonzero_core(n)?) {
        return Err(Error::Precondition("core has points with a zero coordinate".into()));
    }
    let mut out = CodeSet::empty(n)?;
    for a in core.points() {
        out = out.symmetric_difference(&basis_unitrade(&a)?);
    }
    Ok(out)
}

/// `A` restricted to the columns in `d` (columns numbered by rank in `d`).
pub fn restrict_columns(a: &Gf2Matrix, d: &CodeSet) -> Gf2Matrix {
    let cols: Vec<usize> = d.iter().collect();
    let mut out = Gf2Matrix::zeros(a.nrows(), cols.len());
    for r in 0..a.nrows() {
        for (j, &c) in cols.iter().enumerate() {
            if a.get(r, c) {
                out.set(r, j, true);
            }
        }
    }
    out
}

/// A basis of the unitrades contained in `d`.
pub fn unitrades_within(d: &CodeSet) -> Result<Vec<CodeSet>> {
    let n = d.dim();
    let a = build_a(n)?;
    let cols: Vec<usize> = d.iter().collect();
    restrict_columns(&a, d)
        .nullspace()
        .into_iter()
        .map(|v| CodeSet::from_indices(n, cols.iter().enumerate().filter(|(j, _)| get_bit(&v, *j)).map(|(_, &c)| c)))
        .collect()
}

/// Converts a bit row over `4^n` columns into a code set.
pub fn row_to_set(n: usize, row: &[u64]) -> Result<CodeSet> {
    CodeSet::from_indices(n, (0..cells(n)).filter(|&j| get_bit(row, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::classify_set;

    fn dense(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
        (0..rows).map(|r| (0..cols).map(|c| f(r, c)).collect()).collect()
    }

    fn kron(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
        dense(ar * br, ac * bc, |r, c| a[r / br][c / bc] && b[r % br][c % bc])
    }

    /// `A_i = I_{4^(i-1)} ⊗ (1,1,1,1) ⊗ I_{4^(n-i)}`, stacked for `i = 1..n`.
    fn kronecker_a(n: usize) -> Vec<Vec<bool>> {
        let eye = |m: usize| dense(m, m, |r, c| r == c);
        let ones = vec![vec![true; 4]];
        let mut out = Vec::new();
        for i in 1..=n {
            out.extend(kron(&kron(&eye(cells(i - 1)), &ones), &eye(cells(n - i))));
        }
        out
    }

    #[test]
    fn matches_kronecker_definition() {
        for n in 1..=3 {
            let a = build_a(n).unwrap();
            let k = kronecker_a(n);
            assert_eq!(a.nrows(), k.len());
            for (r, row) in k.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    assert_eq!(a.get(r, c), v, "n={n} r={r} c={c}");
                }
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(Gf2Matrix::zeros(5, 7).rank(), 0);
        assert_eq!(Gf2Matrix::identity(70).rank(), 70);
        for n in 1..=4 {
            let a = build_a(n).unwrap();
            assert_eq!(a.rank(), cells(n) - 3usize.pow(n as u32));
            assert_eq!(a.nullspace().len(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn basis_sets() {
        let d = basis_unitrade(&Point::new(&[2]).unwrap()).unwrap();
        assert_eq!(d, CodeSet::from_indices(1, [0, 2]).unwrap());
        let d = basis_unitrade(&Point::new(&[1, 3]).unwrap()).unwrap();
        assert_eq!(d, CodeSet::from_indices(2, [7, 3, 4, 0]).unwrap());
        let a = build_a(3).unwrap();
        let basis = kernel_basis(3).unwrap();
        assert_eq!(basis.len(), 27);
        let mut span = XorBasis::new(64);
        for d in &basis {
            assert_eq!(d.len(), 8);
            assert!(in_kernel(&a, d));
            assert!(span.insert(d.words()));
        }
    }

    #[test]
    fn solve_affine() {
        let mut m = Gf2Matrix::zeros(2, 3);
        m.set(0, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        m.set(1, 2, true);
        let sol = m.solve(&[true, false]).unwrap();
        assert_eq!(m.mul_vec(&sol.particular), vec![true, false]);
        assert_eq!(sol.kernel.len(), 1);
        assert_eq!(m.mul_vec(&sol.kernel[0]), vec![false, false]);
        let mut inconsistent = Gf2Matrix::zeros(2, 2);
        inconsistent.set(0, 0, true);
        inconsistent.set(1, 0, true);
        assert!(inconsistent.solve(&[true, false]).is_none());
    }

    #[test]
    fn unitrades_inside_a_set() {
        let d = basis_unitrade(&Point::new(&[1, 2, 3]).unwrap()).unwrap();
        assert_eq!(unitrades_within(&d).unwrap(), vec![d.clone()]);
        let e = basis_unitrade(&Point::new(&[3, 3, 3]).unwrap()).unwrap();
        let both = d.union(&e);
        let within = unitrades_within(&both).unwrap();
        assert_eq!(within.len(), 2);
        assert!(within.iter().all(|u| classify_set(u).is_unitrade && u.is_subset(&both)));
    }

    #[test]
    fn xor_basis() {
        let mut b = XorBasis::new(128);
        let v = |bits: &[usize]| {
            let mut r = vec![0u64; 2];
            for &j in bits {
                let (w, m) = word_bit(j);
                r[w] |= m;
            }
            r
        };
        assert!(b.insert(&v(&[3, 100])));
        assert!(b.insert(&v(&[100])));
        assert!(!b.insert(&v(&[3])));
        assert!(b.contains(&v(&[3, 100])));
        assert!(!b.contains(&v(&[4])));
        assert_eq!(b.rank(), 2);
    }
}
