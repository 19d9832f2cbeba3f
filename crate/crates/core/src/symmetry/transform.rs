use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::hypercube::{CodeSet, MAX_DIM};

/// An element of the equivalence group `S_4 ≀ S_n`: symbol permutations
/// `θ_i` applied coordinate-wise, followed by the coordinate permutation `σ`.
///
/// The image of `x` is `y` with `y[σ(i)] = θ_i(x[i])`. Coordinates are
/// 0-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transform {
    n: u8,
    sigma: [u8; MAX_DIM],
    theta: [[u8; 4]; MAX_DIM],
}

const ID4: [u8; 4] = [0, 1, 2, 3];

fn is_perm(p: &[u8], len: usize) -> bool {
    let mut seen = 0u32;
    p.len() == len && p.iter().all(|&x| (x as usize) < len && seen & (1 << x) == 0 && {
        seen |= 1 << x;
        true
    })
}

impl Transform {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        let mut sigma = [0u8; MAX_DIM];
        for (i, s) in sigma.iter_mut().enumerate() {
            *s = i as u8;
        }
        Transform { n: n as u8, sigma, theta: [ID4; MAX_DIM] }
    }

    pub fn new(sigma: &[u8], thetas: &[[u8; 4]]) -> Result<Self> {
        let n = sigma.len();
        check_dim(n, 1, MAX_DIM)?;
        if thetas.len() != n {
            return Err(Error::Precondition(format!("{} symbol permutations for n={n}", thetas.len())));
        }
        if !is_perm(sigma, n) || !thetas.iter().all(|t| is_perm(t, 4)) {
            return Err(Error::Precondition("not a permutation".into()));
        }
        let mut t = Transform::identity(n);
        t.sigma[..n].copy_from_slice(sigma);
        t.theta[..n].copy_from_slice(thetas);
        Ok(t)
    }

    /// An isotopy (coordinate permutation is the identity).
    pub fn isotopy(thetas: &[[u8; 4]]) -> Result<Self> {
        let sigma: Vec<u8> = (0..thetas.len() as u8).collect();
        Self::new(&sigma, thetas)
    }

    /// A pure coordinate permutation.
    pub fn coordinate_permutation(sigma: &[u8]) -> Result<Self> {
        Self::new(sigma, &vec![ID4; sigma.len()])
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn sigma(&self) -> &[u8] {
        &self.sigma[..self.dim()]
    }

    pub fn thetas(&self) -> &[[u8; 4]] {
        &self.theta[..self.dim()]
    }

    pub fn is_isotopy(&self) -> bool {
        self.sigma().iter().enumerate().all(|(i, &s)| s as usize == i)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Transform) -> Transform {
        assert_eq!(self.n, first.n, "dimension mismatch");
        let mut out = Transform::identity(self.dim());
        for i in 0..self.dim() {
            let mid = first.sigma[i] as usize;
            out.sigma[i] = self.sigma[mid];
            for x in 0..4 {
                out.theta[i][x] = self.theta[mid][first.theta[i][x] as usize];
            }
        }
        out
    }

    pub fn inverse(&self) -> Transform {
        let mut out = Transform::identity(self.dim());
        for i in 0..self.dim() {
            let j = self.sigma[i] as usize;
            out.sigma[j] = i as u8;
            for x in 0..4 {
                out.theta[j][self.theta[i][x] as usize] = x as u8;
            }
        }
        out
    }

    /// Image of a single cell index.
    #[inline]
    pub fn map_index(&self, idx: usize) -> usize {
        let n = self.dim();
        let mut out = 0usize;
        for i in 0..n {
            let x = (idx >> (2 * (n - 1 - i))) & 3;
            let y = self.theta[i][x] as usize;
            out |= y << (2 * (n - 1 - self.sigma[i] as usize));
        }
        out
    }

    pub fn apply(&self, s: &CodeSet) -> Result<CodeSet> {
        if s.dim() != self.dim() {
            return Err(Error::Precondition(format!(
                "transform of dimension {} applied to a set of dimension {}",
                self.dim(),
                s.dim()
            )));
        }
        CodeSet::from_indices(s.dim(), s.iter().map(|i| self.map_index(i)))
    }

    /// Builds a transform of dimension `m` from a choice for target
    /// coordinate 0 and a transform `inner` of dimension `m-1` acting on the
    /// remaining source coordinates (in increasing order) and targets `1..m`.
    ///
    /// `order[j]` is the source symbol of coordinate `c` sent to `j`.
    pub(crate) fn lift(c: usize, order: [u8; 4], inner: &Transform) -> Transform {
        let m = inner.dim() + 1;
        let mut out = Transform::identity(m);
        out.sigma[c] = 0;
        for (j, &v) in order.iter().enumerate() {
            out.theta[c][v as usize] = j as u8;
        }
        let mut r = 0;
        for s in 0..m {
            if s == c {
                continue;
            }
            out.sigma[s] = 1 + inner.sigma[r];
            out.theta[s] = inner.theta[r];
            r += 1;
        }
        out
    }

    pub(crate) fn raw_sigma(&self) -> [u8; MAX_DIM] {
        self.sigma
    }
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transform(sigma={:?}, thetas={:?})", self.sigma(), self.thetas())
    }
}

/// Applies `t` to `s`.
pub fn apply(t: &Transform, s: &CodeSet) -> Result<CodeSet> {
    t.apply(s)
}

/// `24^n · n!`, the order of the equivalence group.
pub fn group_order(n: usize) -> u128 {
    let fact: u128 = (1..=n as u128).product();
    24u128.pow(n as u32) * fact
}

/// `24^n`, the order of the isotopy group.
pub fn isotopy_group_order(n: usize) -> u128 {
    24u128.pow(n as u32)
}

/// Generators of `S_4 ≀ S_n`: adjacent coordinate swaps and adjacent symbol
/// swaps in every coordinate.
pub(crate) fn generators(n: usize) -> Vec<Transform> {
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut sigma: Vec<u8> = (0..n as u8).collect();
        sigma.swap(i, i + 1);
        out.push(Transform::coordinate_permutation(&sigma).unwrap());
    }
    for i in 0..n {
        for a in 0..3 {
            let mut thetas = vec![ID4; n];
            thetas[i].swap(a, a + 1);
            out.push(Transform::isotopy(&thetas).unwrap());
        }
    }
    out
}

/// Every element of the group for small `n` (`24^n·n!` of them).
pub fn all_transforms(n: usize) -> Result<Vec<Transform>> {
    check_dim(n, 1, 3)?;
    let perms4 = permutations(4);
    let sigmas = permutations(n);
    let mut out = Vec::with_capacity(group_order(n) as usize);
    let total_iso = 24usize.pow(n as u32);
    for sigma in &sigmas {
        for code in 0..total_iso {
            let mut rest = code;
            let thetas: Vec<[u8; 4]> = (0..n)
                .map(|_| {
                    let p = &perms4[rest % 24];
                    rest /= 24;
                    [p[0], p[1], p[2], p[3]]
                })
                .collect();
            out.push(Transform::new(sigma, &thetas)?);
        }
    }
    Ok(out)
}

/// All permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: u32, k: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for x in 0..k as u8 {
            if used & (1 << x) == 0 {
                prefix.push(x);
                rec(prefix, used | (1 << x), k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 0, k, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_matches_sequential_application() {
        let all = all_transforms(2).unwrap();
        let s = CodeSet::from_indices(2, [0, 1, 6, 11]).unwrap();
        for (i, a) in all.iter().enumerate().step_by(37) {
            let b = &all[(i * 7 + 3) % all.len()];
            let seq = a.apply(&b.apply(&s).unwrap()).unwrap();
            assert_eq!(seq, a.compose(b).apply(&s).unwrap());
            assert_eq!(a.inverse().apply(&a.apply(&s).unwrap()).unwrap(), s);
            assert!(a.compose(&a.inverse()) == Transform::identity(2));
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(group_order(3), 82944);
        assert_eq!(group_order(4), 7962624);
        assert_eq!(all_transforms(1).unwrap().len(), 24);
        assert_eq!(all_transforms(2).unwrap().len(), 1152);
    }

    #[test]
    fn relabel_and_transpose() {
        let t = Transform::isotopy(&[[1, 0, 2, 3]]).unwrap();
        let s = CodeSet::from_indices(1, [0, 2]).unwrap();
        assert_eq!(t.apply(&s).unwrap(), CodeSet::from_indices(1, [1, 2]).unwrap());

        let swap = Transform::coordinate_permutation(&[1, 0]).unwrap();
        let s = CodeSet::from_indices(2, [1, 2, 7]).unwrap();
        // (0,1)->(1,0), (0,2)->(2,0), (1,3)->(3,1)
        assert_eq!(swap.apply(&s).unwrap(), CodeSet::from_indices(2, [4, 8, 13]).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Transform::new(&[0, 0], &[ID4, ID4]).is_err());
        assert!(Transform::new(&[0, 1], &[ID4, [0, 1, 1, 3]]).is_err());
        assert!(Transform::new(&[0], &[ID4, ID4]).is_err());
        let t = Transform::identity(2);
        assert!(t.apply(&CodeSet::empty(3).unwrap()).is_err());
    }

    #[test]
    fn lift_places_coordinate_first() {
        let inner = Transform::new(&[1, 0], &[[0, 1, 2, 3], [3, 2, 1, 0]]).unwrap();
        let t = Transform::lift(1, [2, 0, 1, 3], &inner);
        assert_eq!(t.sigma(), &[2, 0, 1]);
        assert_eq!(t.thetas()[1], [1, 2, 0, 3]);
        assert_eq!(t.thetas()[2], [3, 2, 1, 0]);
    }
}
