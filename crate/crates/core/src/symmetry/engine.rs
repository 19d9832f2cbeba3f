//! Minimum-image canonicalization under `S_4 ≀ S_m`.
//!
//! A set of dimension `m` is viewed as four layers along target coordinate 0.
//! Its least image starts with the least canonical form among the `4m`
//! layers (or the four layers of coordinate 0 for isotopies); the remaining
//! layers are then minimised over the stabilizer of that first layer, which
//! is known explicitly from the recursive call. Every optimal transform is
//! found exactly once, so the number of optimal transforms is `|Aut|`.
//!
//! Sets of dimension `k <= 3` are held as `4^k`-bit integers whose most
//! significant bit is cell 0 ("small sets"); their canonical data is cached.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::transform::Transform;

pub(crate) type Table = [u8; 64];

#[inline]
pub(crate) const fn width(k: usize) -> u32 {
    1 << (2 * k)
}

#[inline]
pub(crate) fn mask(k: usize) -> u64 {
    let w = width(k);
    if w >= 64 {
        !0
    } else {
        (1u64 << w) - 1
    }
}

/// Applies a bit-position table to a small set.
#[inline]
pub(crate) fn apply_tbl(tbl: &Table, mut s: u64) -> u64 {
    let mut out = 0u64;
    while s != 0 {
        let p = s.trailing_zeros() as usize;
        out |= 1u64 << tbl[p];
        s &= s - 1;
    }
    out
}

/// A transform of dimension `k <= 3` together with its position table.
#[derive(Clone)]
pub(crate) struct Elem {
    pub t: Transform,
    pub tbl: Table,
}

impl Elem {
    pub fn new(t: Transform) -> Elem {
        let k = t.dim();
        debug_assert!(k <= 3);
        let w = width(k) as usize;
        let mut tbl = [0u8; 64];
        for idx in 0..w {
            let dst = t.map_index(idx);
            tbl[w - 1 - idx] = (w - 1 - dst) as u8;
        }
        Elem { t, tbl }
    }
}

pub(crate) struct ClassInfo {
    /// `Aut(rep)`, identity first.
    pub aut: Vec<Elem>,
}

pub(crate) struct SetInfo {
    pub rep: u64,
    /// Maps the set onto `rep`.
    pub transporter: Elem,
    pub class: Arc<ClassInfo>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Mode {
    /// Isotopies and coordinate permutations.
    Full,
    /// Isotopies only.
    Isotopy,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Witness {
    cand: u16,
    order: [u8; 4],
    aut_idx: u32,
}

struct Cand {
    info: Arc<SetInfo>,
    c: u8,
    v0: u8,
}

/// Result of a top-level search.
pub(crate) struct Search {
    /// The least image as four layers along coordinate 0.
    pub image: [u64; 4],
    /// Number of transforms achieving the image.
    pub count: u64,
    pub witnesses: Vec<Witness>,
    cands: Vec<Cand>,
}

impl Search {
    pub fn transform(&self, w: &Witness) -> Transform {
        let cand = &self.cands[w.cand as usize];
        let a = &cand.info.class.aut[w.aut_idx as usize];
        let inner = a.t.compose(&cand.info.transporter.t);
        Transform::lift(cand.c as usize, w.order, &inner)
    }

    /// Coordinate permutation of a witness, without building the transform.
    pub fn sigma(&self, w: &Witness, m: usize) -> [u8; 8] {
        let cand = &self.cands[w.cand as usize];
        let a = cand.info.class.aut[w.aut_idx as usize].t.raw_sigma();
        let t0 = cand.info.transporter.t.raw_sigma();
        let mut out = [0u8; 8];
        out[cand.c as usize] = 0;
        let mut r = 0;
        for s in 0..m {
            if s == cand.c as usize {
                continue;
            }
            out[s] = 1 + a[t0[r] as usize];
            r += 1;
        }
        out
    }

    pub fn transporter(&self) -> Transform {
        self.transform(&self.witnesses[0])
    }
}

/// Packs four layers of dimension `k-1` into a small set of dimension `k`.
#[inline]
pub(crate) fn pack(k: usize, l: &[u64; 4]) -> u64 {
    if k == 0 {
        return l[0];
    }
    let w = width(k - 1);
    (l[0] << (3 * w)) | (l[1] << (2 * w)) | (l[2] << w) | l[3]
}

#[inline]
pub(crate) fn unpack(k: usize, s: u64) -> [u64; 4] {
    let w = width(k - 1);
    let m = mask(k - 1);
    [(s >> (3 * w)) & m, (s >> (2 * w)) & m, (s >> w) & m, s & m]
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Per-thread canonicalization state: caches of small-set canonical data.
pub struct Canonizer {
    sets: [Vec<FxHashMap<u64, Arc<SetInfo>>>; 2],
    classes: [Vec<FxHashMap<u64, Arc<ClassInfo>>>; 2],
    /// `layer_pos[k][c][v][j]`: source bit position of cell `j` of layer
    /// `(c, v)` of a small set of dimension `k`.
    layer_pos: Vec<Vec<[Vec<u8>; 4]>>,
    trivial: Arc<SetInfo>,
}

impl Default for Canonizer {
    fn default() -> Self {
        Self::new()
    }
}

fn mode_slot(mode: Mode) -> usize {
    match mode {
        Mode::Full => 0,
        Mode::Isotopy => 1,
    }
}

impl Canonizer {
    pub fn new() -> Self {
        let mut layer_pos = vec![Vec::new()];
        for k in 1..=3usize {
            let w = width(k) as usize;
            let w1 = width(k - 1) as usize;
            let mut per_c = Vec::new();
            for c in 0..k {
                let stride = width(k - 1 - c) as usize;
                let mut per_v: [Vec<u8>; 4] = Default::default();
                for (v, slot) in per_v.iter_mut().enumerate() {
                    *slot = (0..w1)
                        .map(|j| {
                            let src = (j / stride * 4 + v) * stride + j % stride;
                            (w - 1 - src) as u8
                        })
                        .collect();
                }
                per_c.push(per_v);
            }
            layer_pos.push(per_c);
        }
        let id0 = Elem::new(Transform::identity(0));
        let trivial_class = Arc::new(ClassInfo { aut: vec![id0.clone()] });
        Canonizer {
            sets: [vec![FxHashMap::default(); 4], vec![FxHashMap::default(); 4]],
            classes: [vec![FxHashMap::default(); 4], vec![FxHashMap::default(); 4]],
            layer_pos,
            trivial: Arc::new(SetInfo { rep: 0, transporter: id0, class: trivial_class }),
        }
    }

    /// Number of cached small sets, for diagnostics.
    pub fn cached_sets(&self) -> usize {
        self.sets.iter().flatten().map(|m| m.len()).sum()
    }

    /// Layer `(c, v)` of a small set of dimension `k >= 1`.
    #[inline]
    pub(crate) fn small_layer(&self, k: usize, s: u64, c: usize, v: usize) -> u64 {
        if c == 0 {
            return unpack(k, s)[v];
        }
        let pos = &self.layer_pos[k][c][v];
        let w1 = pos.len();
        let mut out = 0u64;
        for (j, &p) in pos.iter().enumerate() {
            out |= ((s >> p) & 1) << (w1 - 1 - j);
        }
        out
    }

    /// Layer `(c, v)` of a set of dimension `m` given by its coordinate-0
    /// layers.
    #[inline]
    pub(crate) fn layer_of(&self, m: usize, l0: &[u64; 4], c: usize, v: usize) -> u64 {
        if c == 0 {
            return l0[v];
        }
        let parts = [
            self.small_layer(m - 1, l0[0], c - 1, v),
            self.small_layer(m - 1, l0[1], c - 1, v),
            self.small_layer(m - 1, l0[2], c - 1, v),
            self.small_layer(m - 1, l0[3], c - 1, v),
        ];
        pack(m - 1, &parts)
    }

    /// Canonical data of a small set of dimension `k <= 3`.
    pub(crate) fn small(&mut self, k: usize, s: u64, mode: Mode) -> Arc<SetInfo> {
        if k == 0 {
            if s == 0 {
                return self.trivial.clone();
            }
            let id0 = Elem::new(Transform::identity(0));
            let slot = mode_slot(mode);
            if let Some(hit) = self.sets[slot][0].get(&s) {
                return hit.clone();
            }
            let class = Arc::new(ClassInfo { aut: vec![id0.clone()] });
            let info = Arc::new(SetInfo { rep: s, transporter: id0, class });
            self.sets[slot][0].insert(s, info.clone());
            return info;
        }
        let slot = mode_slot(mode);
        if let Some(hit) = self.sets[slot][k].get(&s) {
            return hit.clone();
        }
        let l0 = unpack(k, s);
        let class_known = |me: &Self, rep: u64| me.classes[slot][k].get(&rep).cloned();
        // Search once without collecting; only unseen classes need the full
        // automorphism list.
        let quick = self.search(k, &l0, mode, false);
        let rep = pack(k, &quick.image);
        let transporter = Elem::new(quick.transporter());
        let class = match class_known(self, rep) {
            Some(c) => c,
            None => {
                let full = self.search(k, &l0, mode, true);
                let w0_inv = full.transform(&full.witnesses[0]).inverse();
                let mut aut: Vec<Elem> = full
                    .witnesses
                    .iter()
                    .map(|w| Elem::new(full.transform(w).compose(&w0_inv)))
                    .collect();
                let id = Transform::identity(k);
                if let Some(pos) = aut.iter().position(|e| e.t == id) {
                    aut.swap(0, pos);
                }
                let c = Arc::new(ClassInfo { aut });
                self.classes[slot][k].insert(rep, c.clone());
                c
            }
        };
        let info = Arc::new(SetInfo { rep, transporter, class });
        self.sets[slot][k].insert(s, info.clone());
        info
    }

    /// Least image of a set of dimension `m` (`1 <= m <= 4`), given by its
    /// layers along coordinate 0.
    pub(crate) fn search(&mut self, m: usize, l0: &[u64; 4], mode: Mode, collect: bool) -> Search {
        let k = m - 1;
        let coords = match mode {
            Mode::Full => m,
            Mode::Isotopy => 1,
        };
        let mut lay = [[0u64; 4]; 4];
        let mut infos: Vec<Arc<SetInfo>> = Vec::with_capacity(4 * coords);
        let mut first = u64::MAX;
        for c in 0..coords {
            for v in 0..4 {
                let l = self.layer_of(m, l0, c, v);
                lay[c][v] = l;
                let info = self.small(k, l, mode);
                first = first.min(info.rep);
                infos.push(info);
            }
        }
        let mut cands = Vec::new();
        for (i, info) in infos.into_iter().enumerate() {
            if info.rep == first {
                cands.push(Cand { info, c: (i / 4) as u8, v0: (i % 4) as u8 });
            }
        }

        let mut best = [u64::MAX; 3];
        let mut count = 0u64;
        let mut witnesses = Vec::new();
        for (ci, cand) in cands.iter().enumerate() {
            let c = cand.c as usize;
            let mut others = [0u8; 3];
            let mut r = 0;
            for v in 0..4u8 {
                if v != cand.v0 {
                    others[r] = v;
                    r += 1;
                }
            }
            let t0 = &cand.info.transporter.tbl;
            let tr = others.map(|v| apply_tbl(t0, lay[c][v as usize]));
            for (ai, a) in cand.info.class.aut.iter().enumerate() {
                let imgs = tr.map(|x| apply_tbl(&a.tbl, x));
                let mut sorted = imgs;
                sorted.sort_unstable();
                match sorted.cmp(&best) {
                    std::cmp::Ordering::Greater => continue,
                    std::cmp::Ordering::Less => {
                        best = sorted;
                        count = 0;
                        witnesses.clear();
                    }
                    std::cmp::Ordering::Equal => {}
                }
                for p in PERMS3.iter() {
                    if imgs[p[0]] == sorted[0] && imgs[p[1]] == sorted[1] && imgs[p[2]] == sorted[2] {
                        count += 1;
                        if collect || witnesses.is_empty() {
                            witnesses.push(Witness {
                                cand: ci as u16,
                                order: [cand.v0, others[p[0]], others[p[1]], others[p[2]]],
                                aut_idx: ai as u32,
                            });
                        }
                    }
                }
            }
        }
        Search { image: [first, best[0], best[1], best[2]], count, witnesses, cands }
    }

    /// Least image of the semi-code `(a, b)` (two layers of dimension `k`)
    /// under `S_4 ≀ S_k` acting on both layers plus the swap of the two.
    pub(crate) fn search_semi(&mut self, k: usize, a: u64, b: u64, collect: bool) -> Search {
        let ia = self.small(k, a, Mode::Full);
        let ib = self.small(k, b, Mode::Full);
        let first = ia.rep.min(ib.rep);
        let mut cands = Vec::new();
        let mut rests = Vec::new();
        if ia.rep == first {
            cands.push(Cand { info: ia, c: 0, v0: 0 });
            rests.push(b);
        }
        if ib.rep == first {
            cands.push(Cand { info: ib, c: 0, v0: 1 });
            rests.push(a);
        }
        let mut best = u64::MAX;
        let mut count = 0u64;
        let mut witnesses = Vec::new();
        for (ci, cand) in cands.iter().enumerate() {
            let tr = apply_tbl(&cand.info.transporter.tbl, rests[ci]);
            let order = if cand.v0 == 0 { [0, 1, 2, 3] } else { [1, 0, 2, 3] };
            for (ai, el) in cand.info.class.aut.iter().enumerate() {
                let img = apply_tbl(&el.tbl, tr);
                if img > best {
                    continue;
                }
                if img < best {
                    best = img;
                    count = 0;
                    witnesses.clear();
                }
                count += 1;
                if collect || witnesses.is_empty() {
                    witnesses.push(Witness { cand: ci as u16, order, aut_idx: ai as u32 });
                }
            }
        }
        Search { image: [first, best, 0, 0], count, witnesses, cands }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::transform::all_transforms;

    fn brute_min(k: usize, s: u64, iso: bool) -> (u64, usize) {
        let set = crate::hypercube::CodeSet::from_small(k, s);
        let mut best = u64::MAX;
        let mut cnt = 0;
        for t in all_transforms(k).unwrap() {
            if iso && !t.is_isotopy() {
                continue;
            }
            let img = t.apply(&set).unwrap().to_small();
            if img < best {
                best = img;
                cnt = 0;
            }
            if img == best {
                cnt += 1;
            }
        }
        (best, cnt)
    }

    #[test]
    fn matches_brute_force_small() {
        let mut c = Canonizer::new();
        for s in 0..16u64 {
            for (iso, mode) in [(false, Mode::Full), (true, Mode::Isotopy)] {
                let info = c.small(1, s, mode);
                let (b, cnt) = brute_min(1, s, iso);
                assert_eq!(info.rep, b);
                assert_eq!(info.class.aut.len(), cnt);
            }
        }
        for s in (0..65536u64).step_by(97) {
            for (iso, mode) in [(false, Mode::Full), (true, Mode::Isotopy)] {
                let info = c.small(2, s, mode);
                let (b, cnt) = brute_min(2, s, iso);
                assert_eq!(info.rep, b, "set {s:04x}");
                assert_eq!(info.class.aut.len(), cnt);
                let img = apply_tbl(&info.transporter.tbl, s);
                assert_eq!(img, info.rep);
            }
        }
    }

    #[test]
    fn layers_match_general_extraction() {
        let c = Canonizer::new();
        let s: u64 = 0x9d3a_61f0_0c5e_b247;
        let set = crate::hypercube::CodeSet::from_small(3, s);
        for d in 0..3 {
            for v in 0..4 {
                let want = crate::hypercube::layer(&set, d, v as u8).unwrap().to_small();
                assert_eq!(c.small_layer(3, s, d, v), want);
                assert_eq!(c.layer_of(3, &unpack(3, s), d, v), want);
            }
        }
    }

    #[test]
    fn aut_elements_stabilize() {
        let mut c = Canonizer::new();
        let s: u64 = 0x0f0f_3c3c_a5a5_9966;
        let info = c.small(3, s, Mode::Full);
        for e in &info.class.aut {
            assert_eq!(apply_tbl(&e.tbl, info.rep), info.rep);
        }
        assert_eq!(apply_tbl(&info.transporter.tbl, s), info.rep);
    }
}
