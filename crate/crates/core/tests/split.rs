use freqcube::classifier::{classify, enumerate_all, Kind};
use freqcube::hypercube::{classify_set, layer, layers, Point};
use freqcube::split::{
    bipartition, construct_nonsplittable, is_splittable, layer_splittability_census, nonsplittable_cycle,
    odd_cycle_color_check, EdgeColor,
};
use freqcube::symmetry::canonical_rep;

/// Canonical representatives of the two classes in `H(4,4)` that are not
/// splittable although all their layers are.
const EXCEPTIONAL_N4: [&str; 2] = [
    "33cc33cccc33cc3335aca3c55c3aca53ca53cc3333cc35accc335c3aa3c533cc",
    "33cc35acca53cc3335aca5a55a5aca53ca53ca5335ac35accc335a5aa5a533cc",
];

#[test]
fn construction_for_small_n() {
    for n in 3..=8 {
        let s = construct_nonsplittable(n).unwrap();
        assert!(classify_set(&s).is_double_mds, "n={n}");
        let r = is_splittable(&s).unwrap();
        assert!(!r.splittable);
        assert!(odd_cycle_color_check(r.witness_cycle.as_ref().unwrap()).unwrap());
        for d in 0..n {
            for v in 0..4 {
                assert!(is_splittable(&layer(&s, d, v).unwrap()).unwrap().splittable, "n={n} d={d} v={v}");
            }
        }
        let cycle = nonsplittable_cycle(n).unwrap();
        assert_eq!(cycle.len(), 2 * n + 1);
        assert!(cycle.iter().all(|p| s.contains_point(p)));
        assert!(odd_cycle_color_check(&cycle).unwrap());
    }
}

/// Sector of a point: which head coordinates are in `{2,3}`.
fn sector(p: &Point) -> Vec<bool> {
    let c = p.coords();
    c[..c.len() - 1].iter().map(|&v| v >= 2).collect()
}

#[test]
fn construction_edge_colors_by_sector() {
    for n in 3..=6 {
        let s = construct_nonsplittable(n).unwrap();
        for p in s.points() {
            for d in 0..n {
                for v in (p.coords()[d] + 1)..4 {
                    let mut q = p.coords().to_vec();
                    q[d] = v;
                    let q = Point::new(&q).unwrap();
                    if !s.contains_point(&q) {
                        continue;
                    }
                    let color = EdgeColor::of(p.coords()[d], v).unwrap().value();
                    if d < n - 1 {
                        if sector(&p) == sector(&q) {
                            assert_ne!(color, 1, "n={n} {p} {q}");
                        }
                    } else {
                        let sec = sector(&p);
                        match color {
                            1 => assert!(sec.iter().all(|&h| !h), "n={n} {p} {q}"),
                            3 => assert!(sec.iter().all(|&h| h), "n={n} {p} {q}"),
                            _ => {}
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn construction_n4_is_exceptional_class() {
    let rep = canonical_rep(&construct_nonsplittable(4).unwrap()).unwrap().0;
    assert!(EXCEPTIONAL_N4.contains(&rep.to_hex().as_str()), "{}", rep.to_hex());
}

#[test]
fn parts_are_mds_codes() {
    for c in enumerate_all(3, Kind::DoubleMds).unwrap().iter().step_by(13) {
        let r = bipartition(c);
        if let Some((a, b)) = r.parts {
            assert_eq!(a.union(&b), *c);
            assert!(a.intersection(&b).is_empty());
            for part in [&a, &b] {
                let report = freqcube::hypercube::line_report(part);
                assert_eq!(report.histogram[1], report.histogram.iter().sum::<usize>(), "{}", c.to_hex());
                assert!(bipartition(part).splittable);
            }
        } else {
            assert!(odd_cycle_color_check(r.witness_cycle.as_ref().unwrap()).unwrap());
        }
    }
}

#[test]
fn census_n3() {
    let c = classify(3, Kind::DoubleMds).unwrap();
    let r = layer_splittability_census(&c.classes).unwrap();
    assert_eq!(r.violations, 0);
    assert_eq!(r.splittable, 6);
    for e in &r.entries {
        if e.splittable {
            assert!(layers(&e.rep).unwrap().iter().all(|l| is_splittable(l).unwrap().splittable));
        }
    }
}
