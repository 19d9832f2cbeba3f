//! Splittability of double-codes: bipartiteness of the induced subgraph of
//! `H(n,4)`, odd cycles, the edge 3-coloring and a non-splittable code all
//! of whose layers split.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;

use crate::classifier::ClassRecord;
use crate::error::{check_dim, Error, Result};
use crate::hypercube::{cells, classify_set, layers, CodeSet, Point, MAX_DIM};

/// Color of an edge of `H(n,4)`, determined by the unordered pair of values
/// in the coordinate where its ends differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeColor(u8);

impl EdgeColor {
    /// `{0,1},{2,3} -> 1`, `{0,2},{1,3} -> 2`, `{0,3},{1,2} -> 3`.
    pub fn of(a: u8, b: u8) -> Result<EdgeColor> {
        if a > 3 || b > 3 || a == b {
            return Err(Error::Precondition(format!("no edge between symbols {a} and {b}")));
        }
        Ok(EdgeColor(a ^ b))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for EdgeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of a bipartiteness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub splittable: bool,
    /// The two color classes when splittable.
    pub parts: Option<(CodeSet, CodeSet)>,
    /// An odd cycle of the induced subgraph when not splittable.
    pub witness_cycle: Option<Vec<Point>>,
}

/// Cells of `s` adjacent to `idx` (same line, both in `s`).
fn neighbors(s: &CodeSet, idx: usize, out: &mut Vec<usize>) {
    out.clear();
    let n = s.dim();
    for d in 0..n {
        let stride = cells(n - 1 - d);
        let v = (idx / stride) % 4;
        let base = idx - v * stride;
        for w in 0..4 {
            if w != v && s.contains(base + w * stride) {
                out.push(base + w * stride);
            }
        }
    }
}

/// Two-colors the subgraph of `H(n,4)` induced by `s`, or finds an odd cycle.
/// Works for any set; the result is meaningful as a split into two
/// independent sets.
pub fn bipartition(s: &CodeSet) -> SplitResult {
    let u = s.universe();
    let mut color = vec![-1i8; u];
    let mut parent = vec![usize::MAX; u];
    let mut depth = vec![0u32; u];
    let mut queue = VecDeque::new();
    let mut nb = Vec::new();
    for root in s.iter() {
        if color[root] >= 0 {
            continue;
        }
        color[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            neighbors(s, x, &mut nb);
            for &y in &nb {
                if color[y] < 0 {
                    color[y] = 1 - color[x];
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    let cycle = splice(x, y, &parent, &depth);
                    let n = s.dim();
                    return SplitResult {
                        splittable: false,
                        parts: None,
                        witness_cycle: Some(cycle.into_iter().map(|i| Point::from_index(n, i)).collect()),
                    };
                }
            }
        }
    }
    let n = s.dim();
    let part = |c: i8| CodeSet::from_indices(n, s.iter().filter(|&i| color[i] == c)).expect("same dimension");
    SplitResult { splittable: true, parts: Some((part(0), part(1))), witness_cycle: None }
}

/// Closes the BFS tree paths from `x` and `y` through their lowest common
/// ancestor into a cycle.
fn splice(x: usize, y: usize, parent: &[usize], depth: &[u32]) -> Vec<usize> {
    let (mut a, mut b) = (x, y);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// Splittability of a double-code.
///
/// ```
/// use freqcube::hypercube::CodeSet;
/// use freqcube::split::is_splittable;
///
/// // Rows {0,1},{0,1},{2,3},{2,3}: two disjoint 4-cycles.
/// let s = CodeSet::from_indices(2, [0, 1, 4, 5, 10, 11, 14, 15]).unwrap();
/// assert!(is_splittable(&s).unwrap().splittable);
/// ```
pub fn is_splittable(s: &CodeSet) -> Result<SplitResult> {
    if !classify_set(s).is_double_code {
        return Err(Error::Precondition("splittability is defined for double-codes only".into()));
    }
    Ok(bipartition(s))
}

/// Whether some direction carries edges of all three colors in `cycle`.
/// Errors if consecutive points (cyclically) are not adjacent or a vertex
/// repeats.
pub fn odd_cycle_color_check(cycle: &[Point]) -> Result<bool> {
    if cycle.len() < 3 {
        return Err(Error::Precondition("a cycle needs at least 3 vertices".into()));
    }
    let n = cycle[0].dim();
    let mut seen = std::collections::HashSet::new();
    let mut colors = [0u8; MAX_DIM];
    for (i, p) in cycle.iter().enumerate() {
        if p.dim() != n || !seen.insert(p.index()) {
            return Err(Error::Precondition(format!("vertex {p} repeated or of wrong dimension")));
        }
        let q = &cycle[(i + 1) % cycle.len()];
        let diff: Vec<usize> = (0..n).filter(|&d| p.coords()[d] != q.coords()[d]).collect();
        if diff.len() != 1 {
            return Err(Error::Precondition(format!("{p} and {q} are not adjacent")));
        }
        let d = diff[0];
        colors[d] |= 1 << EdgeColor::of(p.coords()[d], q.coords()[d])?.value();
    }
    Ok(colors[..n].contains(&0b1110))
}

const ALPHA: [u8; 4] = [1, 1, 0, 0];
const BETA: [u8; 4] = [1, 0, 1, 0];
const GAMMA: [u8; 4] = [0, 1, 1, 0];

/// Value of the frequency function defining [`construct_nonsplittable`].
fn sector_value(x: &[u8]) -> u8 {
    let n = x.len();
    let head = &x[..n - 1];
    let last = x[n - 1] as usize;
    let parity = head.iter().fold(0u8, |acc, &v| acc ^ (v & 1));
    let high: Vec<bool> = head.iter().map(|&v| v >= 2).collect();
    let twos = high.iter().take_while(|&&h| h).count();
    let prefix = high[twos..].iter().all(|&h| !h);
    let term = if high.iter().all(|&h| !h) {
        ALPHA[last]
    } else if twos == n - 1 {
        GAMMA[last]
    } else if prefix {
        BETA[last] ^ 1
    } else {
        BETA[last]
    };
    parity ^ term
}

/// A double-MDS-code of length `n >= 3` that is not splittable although
/// every layer is.
pub fn construct_nonsplittable(n: usize) -> Result<CodeSet> {
    check_dim(n, 3, MAX_DIM)?;
    CodeSet::from_indices(
        n,
        (0..cells(n)).filter(|&i| sector_value(Point::from_index(n, i).coords()) == 1),
    )
}

/// The odd cycle of length `2n+1` inside [`construct_nonsplittable`]`(n)`.
pub fn nonsplittable_cycle(n: usize) -> Result<Vec<Point>> {
    check_dim(n, 3, MAX_DIM)?;
    let mk = |prefix_twos: usize, zeros_then_twos: Option<usize>, last: u8| {
        let mut v = vec![0u8; n];
        match zeros_then_twos {
            None => v[..prefix_twos].fill(2),
            Some(z) => v[z..n - 1].fill(2),
        }
        v[n - 1] = last;
        Point::new(&v).expect("valid coordinates")
    };
    let mut out = vec![mk(0, None, 0), mk(0, None, 1)];
    for k in 1..=n - 2 {
        out.push(mk(k, None, 1));
    }
    out.push(mk(n - 1, None, 1));
    out.push(mk(n - 1, None, 2));
    out.push(mk(0, Some(1), 2));
    for z in 1..=n - 2 {
        out.push(mk(0, Some(z), 0));
    }
    Ok(out)
}

/// Splittability of one class and of its layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub rep: CodeSet,
    pub splittable: bool,
    pub layers_splittable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub entries: Vec<CensusEntry>,
    /// Classes with all layers splittable but not splittable themselves.
    pub exceptional: usize,
    /// Splittable classes with a non-splittable layer (always 0).
    pub violations: usize,
    pub splittable: usize,
}

/// Compares code and layer splittability over a set of class records.
pub fn layer_splittability_census(classes: &[ClassRecord]) -> Result<CensusReport> {
    let entries: Vec<CensusEntry> = classes
        .par_iter()
        .map(|c| {
            let splittable = is_splittable(&c.rep)?.splittable;
            let mut layers_splittable = true;
            for l in layers(&c.rep)? {
                if !is_splittable(&l)?.splittable {
                    layers_splittable = false;
                    break;
                }
            }
            Ok(CensusEntry { rep: c.rep.clone(), splittable, layers_splittable })
        })
        .collect::<Result<_>>()?;
    Ok(CensusReport {
        exceptional: entries.iter().filter(|e| e.layers_splittable && !e.splittable).count(),
        violations: entries.iter().filter(|e| e.splittable && !e.layers_splittable).count(),
        splittable: entries.iter().filter(|e| e.splittable).count(),
        entries,
    })
}
