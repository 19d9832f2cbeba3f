//! Points, lines and code sets of the Hamming graph H(n,4).
//!
//! Cells of `Σ^n` (with `Σ = {0,1,2,3}`) are addressed by their
//! lexicographic index `idx(t) = Σ t_i·4^(n-1-i)`, so the first coordinate is
//! the most significant digit. A [`CodeSet`] is a bit vector over these
//! indices; its hex form lists bits in index order, most significant bit of
//! the first digit being cell 0.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{check_dim, Error, Result};

/// Alphabet size.
pub const Q: usize = 4;
/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// `4^n`.
pub const fn cells(n: usize) -> usize {
    1 << (2 * n)
}

/// A word of `Σ^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    n: u8,
    coords: [u8; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[u8]) -> Result<Self> {
        check_dim(coords.len(), 1, MAX_DIM)?;
        if let Some(&bad) = coords.iter().find(|&&c| c as usize >= Q) {
            return Err(Error::Precondition(format!("symbol {bad} not in 0..4")));
        }
        let mut buf = [0u8; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Point { n: coords.len() as u8, coords: buf })
    }

    /// Decodes a lexicographic index. Panics if `idx >= 4^n`.
    pub fn from_index(n: usize, idx: usize) -> Self {
        assert!(n <= MAX_DIM && idx < cells(n), "index {idx} out of range for n={n}");
        let mut coords = [0u8; MAX_DIM];
        let mut rest = idx;
        for i in (0..n).rev() {
            coords[i] = (rest & 3) as u8;
            rest >>= 2;
        }
        Point { n: n as u8, coords }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords[..self.n as usize]
    }

    pub fn index(&self) -> usize {
        self.coords().iter().fold(0, |acc, &c| (acc << 2) | c as usize)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A subset of `Σ^n`, stored as a `4^n`-bit vector.
///
/// The derived ordering compares bit vectors lexicographically in cell-index
/// order (a set missing cell 0 sorts before one containing it), which is the
/// order used for canonical representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeSet {
    n: u8,
    words: SmallVec<[u64; 4]>,
}

#[inline]
pub(crate) fn word_bit(idx: usize) -> (usize, u64) {
    (idx >> 6, 1u64 << (63 - (idx & 63)))
}

fn word_count(n: usize) -> usize {
    (cells(n) / 64).max(1)
}

/// Mask of the bits in use for a single-word set of dimension `n <= 3`.
fn valid_mask(n: usize) -> u64 {
    let w = cells(n);
    if w >= 64 {
        !0
    } else {
        !0u64 << (64 - w)
    }
}

impl CodeSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n, 1, MAX_DIM)?;
        Ok(CodeSet { n: n as u8, words: SmallVec::from_elem(0, word_count(n)) })
    }

    /// The whole space `Σ^n`.
    pub fn full(n: usize) -> Result<Self> {
        Ok(Self::empty(n)?.complement())
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for i in idx {
            if i >= cells(n) {
                return Err(Error::Precondition(format!("index {i} out of range for n={n}")));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn from_points<'a>(n: usize, pts: impl IntoIterator<Item = &'a Point>) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for p in pts {
            if p.dim() != n {
                return Err(Error::Precondition(format!("point {p} is not of dimension {n}")));
            }
            s.insert(p.index());
        }
        Ok(s)
    }

    /// Builds a set from raw words in the storage layout. Bits beyond `4^n`
    /// are cleared.
    pub(crate) fn from_words(n: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), word_count(n));
        let mut words: SmallVec<[u64; 4]> = SmallVec::from_slice(words);
        words[0] &= valid_mask(n);
        CodeSet { n: n as u8, words }
    }

    /// Bit words in the layout used by [`crate::gf2`] rows.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// For `n <= 3`: the set as a `4^n`-bit integer whose most significant
    /// bit is cell 0.
    pub(crate) fn to_small(&self) -> u64 {
        debug_assert!(self.dim() <= 3);
        self.words[0] >> (64 - cells(self.dim()))
    }

    pub(crate) fn from_small(n: usize, s: u64) -> Self {
        debug_assert!(n <= 3);
        let w = cells(n);
        let word = if w == 64 { s } else { s << (64 - w) };
        CodeSet { n: n as u8, words: SmallVec::from_elem(word, 1) }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Number of cells in the ambient space, `4^n`.
    pub fn universe(&self) -> usize {
        cells(self.dim())
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        let (w, b) = word_bit(idx);
        self.words[w] & b != 0
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        p.dim() == self.dim() && self.contains(p.index())
    }

    #[inline]
    pub fn insert(&mut self, idx: usize) {
        let (w, b) = word_bit(idx);
        self.words[w] |= b;
    }

    #[inline]
    pub fn remove(&mut self, idx: usize) {
        let (w, b) = word_bit(idx);
        self.words[w] &= !b;
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        if value {
            self.insert(idx)
        } else {
            self.remove(idx)
        }
    }

    /// Member indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let lz = rest.leading_zeros() as usize;
                rest &= !(1u64 << (63 - lz));
                Some(wi * 64 + lz)
            })
        })
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let n = self.dim();
        self.iter().map(move |i| Point::from_index(n, i))
    }

    pub fn complement(&self) -> CodeSet {
        let mut words: SmallVec<[u64; 4]> = self.words.iter().map(|w| !w).collect();
        words[0] &= valid_mask(self.dim());
        CodeSet { n: self.n, words }
    }

    fn zip_with(&self, other: &CodeSet, f: impl Fn(u64, u64) -> u64) -> CodeSet {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        CodeSet { n: self.n, words }
    }

    pub fn symmetric_difference(&self, other: &CodeSet) -> CodeSet {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn intersection(&self, other: &CodeSet) -> CodeSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &CodeSet) -> CodeSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn is_subset(&self, other: &CodeSet) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowercase hex, `ceil(4^n / 4)` digits, most significant bit = cell 0.
    pub fn to_hex(&self) -> String {
        let digits = self.universe().div_ceil(4);
        let mut out = String::with_capacity(digits);
        for k in 0..digits {
            let bit = 4 * k;
            let nib = (self.words[bit >> 6] >> (60 - (bit & 63))) & 0xf;
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut s = Self::empty(n)?;
        let digits = s.universe().div_ceil(4);
        let hex = hex.trim();
        if hex.len() != digits {
            return Err(Error::Precondition(format!(
                "expected {digits} hex digits for n={n}, got {}",
                hex.len()
            )));
        }
        for (k, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .filter(|_| !ch.is_ascii_uppercase())
                .ok_or_else(|| Error::Precondition(format!("invalid hex digit {ch:?}")))?
                as u64;
            let bit = 4 * k;
            s.words[bit >> 6] |= nib << (60 - (bit & 63));
        }
        if s.words[0] & !valid_mask(n) != 0 {
            return Err(Error::Precondition("bits set beyond 4^n".into()));
        }
        Ok(s)
    }

    /// Parses a hex string, inferring `n` from its length.
    pub fn from_hex_any(hex: &str) -> Result<Self> {
        let hex = hex.trim();
        let n = (1..=MAX_DIM)
            .find(|&n| cells(n).div_ceil(4) == hex.len())
            .ok_or_else(|| Error::Precondition(format!("no dimension has {} hex digits", hex.len())))?;
        Self::from_hex(n, hex)
    }
}

impl fmt::Debug for CodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CodeSet(n={}, {})", self.n, self.to_hex())
    }
}

impl fmt::Display for CodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A line of H(n,4): the four cells that agree everywhere except in
/// `direction` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub direction: usize,
    /// The member whose `direction` coordinate is 0.
    pub base: Point,
}

impl Line {
    pub fn stride(&self) -> usize {
        cells(self.base.dim() - 1 - self.direction)
    }

    pub fn indices(&self) -> [usize; 4] {
        let b = self.base.index();
        let s = self.stride();
        [b, b + s, b + 2 * s, b + 3 * s]
    }

    pub fn points(&self) -> [Point; 4] {
        let n = self.base.dim();
        self.indices().map(|i| Point::from_index(n, i))
    }
}

/// All `n·4^(n-1)` lines, direction-major, bases in lexicographic order.
pub fn enumerate_lines(n: usize) -> Result<Vec<Line>> {
    check_dim(n, 1, MAX_DIM)?;
    let mut out = Vec::with_capacity(n * cells(n - 1));
    for direction in 0..n {
        for base in line_bases(n, direction) {
            out.push(Line { direction, base: Point::from_index(n, base) });
        }
    }
    Ok(out)
}

/// Indices of the line bases in one direction, in increasing order.
pub(crate) fn line_bases(n: usize, direction: usize) -> impl Iterator<Item = usize> {
    let stride = cells(n - 1 - direction);
    let blocks = cells(direction);
    (0..blocks).flat_map(move |hi| (0..stride).map(move |lo| hi * 4 * stride + lo))
}

/// Line masks of a small set of dimension `1 <= k <= 3` (cell `i` at bit
/// `4^k - 1 - i`).
pub(crate) fn small_line_masks(k: usize) -> Vec<u64> {
    let w = cells(k);
    let mut out = Vec::with_capacity(k * cells(k - 1));
    for d in 0..k {
        let stride = cells(k - 1 - d);
        for b in line_bases(k, d) {
            out.push((0..4).fold(0u64, |m, v| m | 1u64 << (w - 1 - (b + v * stride))));
        }
    }
    out
}

/// [`classify_set`] for a small set given its line masks.
#[inline]
pub(crate) fn small_kind(masks: &[u64], s: u64) -> SetKind {
    let (mut zero, mut four) = (false, false);
    for &m in masks {
        match (s & m).count_ones() {
            0 => zero = true,
            4 => four = true,
            2 => {}
            _ => return SetKind::default(),
        }
    }
    SetKind { is_unitrade: true, is_double_code: !four, is_double_mds: !four && !zero }
}

/// Which of the nested line-intersection classes a set belongs to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SetKind {
    pub is_unitrade: bool,
    pub is_double_code: bool,
    pub is_double_mds: bool,
}

/// Histogram of `|S ∩ L|` over all lines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LineReport {
    pub histogram: [usize; 5],
}

impl LineReport {
    pub fn kind(&self) -> SetKind {
        let h = &self.histogram;
        let even = h[1] == 0 && h[3] == 0;
        SetKind {
            is_unitrade: even,
            is_double_code: even && h[4] == 0,
            is_double_mds: even && h[4] == 0 && h[0] == 0,
        }
    }
}

/// Line-intersection counts for every line, without short-circuiting.
pub fn line_report(s: &CodeSet) -> LineReport {
    let n = s.dim();
    let mut histogram = [0usize; 5];
    for d in 0..n {
        let stride = cells(n - 1 - d);
        for b in line_bases(n, d) {
            let c = (0..4).filter(|&v| s.contains(b + v * stride)).count();
            histogram[c] += 1;
        }
    }
    LineReport { histogram }
}

/// Classifies `s` by counting its intersection with each line. Stops at the
/// first odd count.
pub fn classify_set(s: &CodeSet) -> SetKind {
    let n = s.dim();
    let (mut zero, mut four) = (false, false);
    for d in 0..n {
        let stride = cells(n - 1 - d);
        for b in line_bases(n, d) {
            let c = (0..4).filter(|&v| s.contains(b + v * stride)).count();
            match c {
                0 => zero = true,
                4 => four = true,
                2 => {}
                _ => return SetKind::default(),
            }
        }
    }
    SetKind { is_unitrade: true, is_double_code: !four, is_double_mds: !four && !zero }
}

/// The layer of `s` at `coordinate = value`, as a set of dimension `n-1`.
pub fn layer(s: &CodeSet, direction: usize, value: u8) -> Result<CodeSet> {
    let n = s.dim();
    check_dim(n, 2, MAX_DIM)?;
    if direction >= n || value as usize >= Q {
        return Err(Error::Precondition(format!(
            "layer ({direction}, {value}) out of range for n={n}"
        )));
    }
    let stride = cells(n - 1 - direction);
    let mut out = CodeSet::empty(n - 1)?;
    for j in 0..cells(n - 1) {
        // Insert `value` as the digit at `direction`.
        let hi = j / stride;
        let lo = j % stride;
        let src = (hi * 4 + value as usize) * stride + lo;
        if s.contains(src) {
            out.insert(j);
        }
    }
    Ok(out)
}

/// All `4n` layers, ordered by direction then value.
pub fn layers(s: &CodeSet) -> Result<Vec<CodeSet>> {
    let n = s.dim();
    let mut out = Vec::with_capacity(4 * n);
    for d in 0..n {
        for v in 0..4 {
            out.push(layer(s, d, v)?);
        }
    }
    Ok(out)
}

/// Stacks four sets of dimension `n-1` as the layers of the first coordinate.
pub fn stack_layers(parts: [&CodeSet; 4]) -> Result<CodeSet> {
    let m = parts[0].dim();
    if parts.iter().any(|p| p.dim() != m) {
        return Err(Error::Precondition("layers differ in dimension".into()));
    }
    let mut out = CodeSet::empty(m + 1)?;
    let w = cells(m);
    for (v, p) in parts.iter().enumerate() {
        for i in p.iter() {
            out.insert(v * w + i);
        }
    }
    Ok(out)
}

pub fn complement(s: &CodeSet) -> CodeSet {
    s.complement()
}
