use freqcube::classifier::{classify, enumerate_all, Kind};
use freqcube::hypercube::{classify_set, CodeSet, Point};
use freqcube::symmetry::Transform;
use freqcube::testing_sets::{
    compute_kd, derive_testing_set, find_special_unitrades, hypothesis_by_subsets, hypothesis_holds,
    product_testing_set, propagate_lines, reconstruct, removal_scan, trivial_testing_set, verify_testing_set,
    Provenance, SpecialUnitrade, TestingSet,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn specials() -> (Vec<SpecialUnitrade>, Vec<CodeSet>) {
    let u = classify(3, Kind::Unitrade).unwrap();
    let codes = enumerate_all(3, Kind::DoubleMds).unwrap();
    (find_special_unitrades(&u.classes, &codes).unwrap(), codes)
}

#[test]
fn special_unitrades_and_derived_sets() {
    let (sp, codes) = specials();
    let shape: Vec<(usize, usize)> = sp.iter().map(|s| (s.d.len(), s.k_d)).collect();
    assert_eq!(shape, [(32, 2), (38, 2)]);
    for s in &sp {
        assert_eq!(compute_kd(&s.d).unwrap(), s.k_d);
        assert!(hypothesis_holds(&s.d, &codes).unwrap());
        assert!(hypothesis_by_subsets(&s.d, &codes).unwrap());
        let t = derive_testing_set(s).unwrap();
        assert_eq!(t.len(), 27 - s.k_d);
        assert!(t.points.intersection(&s.d).is_empty());
        assert_eq!(t.provenance, Provenance::DerivedFromD);
        assert!(verify_testing_set(&t, &codes).unwrap());
        for c in codes.iter().step_by(97) {
            assert_eq!(&reconstruct(&t, &c.intersection(&t.points)).unwrap(), c);
        }
        // No single point can be dropped.
        let scan = removal_scan(&t, &codes).unwrap();
        assert_eq!(scan.len(), 25);
        assert!(scan.iter().all(|(_, still_testing)| !still_testing));
        assert_eq!(TestingSet::from_text(&t.to_text()).unwrap(), t);
    }
}

#[test]
fn both_checks_agree_on_small_unitrades() {
    let u = classify(3, Kind::Unitrade).unwrap();
    let codes = enumerate_all(3, Kind::DoubleMds).unwrap();
    let mut checked = 0;
    for r in u.classes.iter().filter(|r| r.rep.len() >= 16 && r.rep.len() <= 24).step_by(5) {
        let k = compute_kd(&r.rep).unwrap();
        if k > 4 {
            continue;
        }
        assert_eq!(
            hypothesis_holds(&r.rep, &codes).unwrap(),
            hypothesis_by_subsets(&r.rep, &codes).unwrap(),
            "{}",
            r.rep.to_hex()
        );
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn trivial_set_propagates() {
    for n in 1..=4 {
        let t = trivial_testing_set(n).unwrap();
        assert_eq!(t.len(), 3usize.pow(n as u32));
        // Coordinate sum mod 4 in {0, 1}.
        let idx = (0..4usize.pow(n as u32))
            .filter(|&i| Point::from_index(n, i).coords().iter().map(|&v| v as usize).sum::<usize>() % 4 < 2);
        let code = CodeSet::from_indices(n, idx).unwrap();
        assert!(classify_set(&code).is_double_mds);
        let got = propagate_lines(&t.points, &code).unwrap();
        assert_eq!(got, Some(code));
    }
}

fn random_transform(rng: &mut StdRng, n: usize) -> Transform {
    let mut sigma: Vec<u8> = (0..n as u8).collect();
    sigma.shuffle(rng);
    let thetas: Vec<[u8; 4]> = (0..n)
        .map(|_| {
            let mut t = [0, 1, 2, 3];
            t.shuffle(rng);
            t
        })
        .collect();
    Transform::new(&sigma, &thetas).unwrap()
}

/// `{(x, y) : χ_A(x) + χ_B(y) = 1}` for codes `A`, `B` of length 3.
fn product_code(a: &CodeSet, b: &CodeSet) -> CodeSet {
    let idx = (0..4096).filter(|&i| a.contains(i / 64) != b.contains(i % 64));
    CodeSet::from_indices(6, idx).unwrap()
}

#[test]
fn product_set_separates_random_pairs() {
    let (sp, codes) = specials();
    let t = derive_testing_set(&sp[0]).unwrap();
    let t2 = product_testing_set(&t, 2).unwrap();
    assert_eq!(t2.len(), 625);
    assert_eq!(t2.provenance, Provenance::Product);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let pick = |rng: &mut StdRng| codes[rng.gen_range(0..codes.len())].clone();
        let (a1, b1, a2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let b2 = if rng.gen_bool(0.5) { b1.clone() } else { pick(&mut rng) };
        let g = random_transform(&mut rng, 6);
        let c1 = g.apply(&product_code(&a1, &b1)).unwrap();
        let c2 = g.apply(&product_code(&a2, &b2)).unwrap();
        assert!(classify_set(&c1).is_double_mds);
        if c1 != c2 {
            assert_ne!(c1.intersection(&t2.points), c2.intersection(&t2.points));
        }
    }
}
