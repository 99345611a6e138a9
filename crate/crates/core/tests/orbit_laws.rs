use arithdyn::orbit::{detect_cycle, is_wandering, search_long_cycles, CycleOutcome, Orbit};
use arithdyn::IntPoly;
use num_bigint::BigInt;

/// Every polynomial with degree <= 3 and coefficients in [-4, 4].
fn all_maps() -> impl Iterator<Item = IntPoly> {
    (0..9usize.pow(4)).map(|mut code| {
        let coeffs: Vec<i64> = (0..4)
            .map(|_| {
                let c = (code % 9) as i64 - 4;
                code /= 9;
                c
            })
            .collect();
        IntPoly::from_i64(&coeffs)
    })
}

#[test]
fn cycle_length_law_exhaustive() {
    let r = search_long_cycles(4, 3, 20, 3, 64).unwrap();
    assert!(r.long_cycles.is_empty(), "{:?}", r.long_cycles.first());
    assert_eq!(r.maps, 6561);
}

#[test]
fn finite_criterion_agrees_with_cycle_detection() {
    let mut checked = 0;
    for poly in all_maps() {
        if poly.is_constant() {
            continue;
        }
        for s in -20..=20 {
            let start = BigInt::from(s);
            let wanders = is_wandering(&poly, &start).unwrap();
            let outcome = detect_cycle(&poly, &start, 64).unwrap();
            assert_eq!(wanders, outcome.is_wandering(), "{poly} from {s}");
            if let CycleOutcome::Cycle(c) = outcome {
                assert!(c.period == 1 || c.period == 2, "{poly} from {s}");
                let terms = arithdyn::orbit::prefix(&poly, &start, c.preperiod + c.period);
                assert_eq!(terms[c.preperiod], terms[c.preperiod + c.period]);
                if c.preperiod > 0 {
                    assert!(!c.cycle.contains(&terms[c.preperiod - 1]), "preperiod not minimal");
                }
            }
            checked += 1;
        }
    }
    assert_eq!(checked, (6561 - 9) * 41);
}

#[test]
fn extension_is_reproducible() {
    let f: IntPoly = "x^3-2x+5".parse().unwrap();
    let run = || {
        let mut o = Orbit::new(f.clone(), BigInt::from(-3));
        o.extend(7).unwrap().to_vec()
    };
    assert_eq!(run(), run());
    let mut o = Orbit::new(f.clone(), BigInt::from(-3));
    let xs = o.extend(7).unwrap().to_vec();
    for w in xs.windows(2) {
        assert_eq!(f.eval(&w[0]), w[1]);
    }
}
