use std::collections::HashSet;

use freqcube::classifier::{classify, classify_with, enumerate_all, ClassifyOptions, Kind};
use freqcube::gf2::XorBasis;
use freqcube::hypercube::{classify_set, CodeSet};
use freqcube::symmetry::{canonical_form, frequency_cube_counts, group_order, isotopy_canonical_form};

/// All Latin squares of order 4 as MDS codes of length 3.
fn latin_square_codes() -> Vec<CodeSet> {
    let mut perms = Vec::new();
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut rows = [[0u8; 4]; 4];
    fn rec(r: usize, rows: &mut [[u8; 4]; 4], perms: &[[u8; 4]], out: &mut Vec<CodeSet>) {
        if r == 4 {
            let idx = (0..16).map(|c| c * 4 + rows[c / 4][c % 4] as usize);
            out.push(CodeSet::from_indices(3, idx).unwrap());
            return;
        }
        for p in perms {
            if (0..r).all(|q| (0..4).all(|c| rows[q][c] != p[c])) {
                rows[r] = *p;
                rec(r + 1, rows, perms, out);
            }
        }
    }
    rec(0, &mut rows, &perms, &mut out);
    out
}

#[test]
fn dmds_n3_counts() {
    let c = classify(3, Kind::DoubleMds).unwrap();
    assert_eq!(c.classes.len(), 10);
    assert_eq!(c.total(), 51678);
    assert_eq!(c.isotopy_classes(), 26);
    assert!(c.count.equal());
    let g = group_order(3) as u64;
    for r in &c.classes {
        assert!(classify_set(&r.rep).is_double_mds);
        assert_eq!(canonical_form(&r.rep).unwrap().0, r.rep);
        assert_eq!(r.group.aut_order * r.class_size, g);
        assert_eq!(r.group.aut_order, r.group.atop_order * r.group.perm_order);
    }
}

#[test]
fn isotopy_classes_by_direct_canonical_form() {
    let codes = enumerate_all(3, Kind::DoubleMds).unwrap();
    assert_eq!(codes.len(), 51678);
    let forms: HashSet<CodeSet> = codes.iter().map(|s| isotopy_canonical_form(s).unwrap()).collect();
    assert_eq!(forms.len(), 26);
}

#[test]
fn splittable_count_matches_latin_square_pairs() {
    let squares = latin_square_codes();
    assert_eq!(squares.len(), 576);
    let mut unions = HashSet::new();
    for (i, a) in squares.iter().enumerate() {
        for b in &squares[i + 1..] {
            if a.intersection(b).is_empty() {
                unions.insert(a.union(b));
            }
        }
    }
    assert_eq!(unions.len(), 8478);

    let c = classify(3, Kind::DoubleMds).unwrap();
    let by_classes: u64 = c.classes.iter().filter(|r| r.splittable).map(|r| r.class_size).sum();
    assert_eq!(by_classes, unions.len() as u64);
    let codes = enumerate_all(3, Kind::DoubleMds).unwrap();
    let splittable: HashSet<CodeSet> =
        codes.into_iter().filter(|s| freqcube::split::bipartition(s).splittable).collect();
    assert_eq!(splittable, unions);

    // The class with |Aut| = 6·4 is among them.
    let r = c.classes.iter().find(|r| r.group.perm_order == 6 && r.group.atop_order == 4).unwrap();
    assert!(r.splittable && unions.contains(&r.rep));
    let report = frequency_cube_counts(&c.classes).unwrap();
    assert_eq!(report.total_splittable, 6);
}

#[test]
fn unitrade_and_double_code_n3() {
    let u = classify(3, Kind::Unitrade).unwrap();
    assert_eq!(u.total(), 1 << 27);
    assert_eq!(u.classes.len(), 2528);
    assert_eq!(u.classes.iter().filter(|r| r.equiv_to_complement).count(), 312);

    let d = classify(3, Kind::DoubleCode).unwrap();
    assert!(d.count.equal());
    assert_eq!(d.classes.len(), 105);
    let dc: HashSet<&CodeSet> = d.classes.iter().map(|r| &r.rep).collect();
    // Classes that are double-codes or complements of double-codes.
    let either = u
        .classes
        .iter()
        .filter(|r| {
            let comp = canonical_form(&r.rep.complement()).unwrap().0;
            dc.contains(&r.rep) || dc.contains(&comp)
        })
        .count();
    assert_eq!(either, 200);
}

#[test]
fn double_code_differences_span_all_unitrades() {
    let all = enumerate_all(3, Kind::DoubleCode).unwrap();
    let base = &all[0];
    let mut basis = XorBasis::new(64);
    for s in &all {
        basis.insert(s.symmetric_difference(base).words());
        if basis.rank() == 27 {
            break;
        }
    }
    assert_eq!(basis.rank(), 27);
}

#[test]
fn sharded_run_matches_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let opts = ClassifyOptions {
        shards: 5,
        journal: Some(dir.path().join("j")),
        resume: false,
        verbose: false,
    };
    let a = classify_with(3, Kind::Unitrade, &opts).unwrap();
    let b = classify(3, Kind::Unitrade).unwrap();
    assert_eq!(a.classes, b.classes);
    let resumed = classify_with(3, Kind::Unitrade, &ClassifyOptions { resume: true, ..opts }).unwrap();
    assert_eq!(resumed.classes, b.classes);
}
