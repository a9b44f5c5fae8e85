mod common;

use common::lambda::{allowed, brute_force, cost, pairs, random_instance, random_set};
use geonarrate::calculus::{BaseRelation, RelationSet};
use geonarrate::integrate::{relax, resolve, scenario_distance, MergeOptions};
use geonarrate::Error;
use rand::Rng;

#[test]
fn lambda_optimal_and_union_exact_on_small_instances() {
    let mut rng = common::rng(30);
    let (mut solved, mut unsat, mut ties) = (0, 0, 0);
    for round in 0..1_500 {
        let n = 2 + round % 3;
        let inst = random_instance(&mut rng, n);
        let got = resolve(&inst.q, &inst.ics, &MergeOptions::default());
        match brute_force(&inst) {
            None => {
                assert!(matches!(got, Err(Error::Inconsistent(_))), "{}\n{:?}", inst.q.to_text(), inst.ics);
                unsat += 1;
            }
            Some((d, union, count)) => {
                let r = got.unwrap_or_else(|e| panic!("{e}\n{}\n{:?}", inst.q.to_text(), inst.ics));
                assert_eq!(r.distance, d, "{}", inst.q.to_text());
                assert_eq!(r.scenarios, count);
                let labels: Vec<_> = pairs(n).iter().map(|&(i, j)| r.resolved.label(i, j)).collect();
                assert_eq!(labels, union, "{}\n{:?}", inst.q.to_text(), inst.ics);
                // compliance
                for (i, j) in pairs(n) {
                    assert!(r.resolved.label(i, j).is_subset(allowed(&inst, i, j)));
                }
                // idempotence
                assert_eq!(resolve(&r.resolved, &inst.ics, &MergeOptions::default()).unwrap().distance, 0);
                solved += 1;
                if count > 1 {
                    ties += 1;
                }
            }
        }
    }
    assert!(solved > 500 && unsat > 20 && ties > 50, "{solved} {unsat} {ties}");
    println!("solved {solved} (with ties {ties}), unsatisfiable {unsat}");
}

#[test]
fn relax_enumerates_exactly_the_distance_shell() {
    let mut rng = common::rng(31);
    for round in 0..200 {
        let n = 2 + round % 2;
        let inst = random_instance(&mut rng, n);
        let ps = pairs(n);
        let total = 8usize.pow(ps.len() as u32);
        for i in 0..=ps.len() as u32 * 4 {
            let got: Vec<Vec<RelationSet>> =
                relax(&inst.q, i, &inst.ics).iter().map(|s| ps.iter().map(|&(a, b)| s.label(a, b)).collect()).collect();
            // lexicographic over pairs in order, tags ascending
            let mut expected: Vec<Vec<RelationSet>> = Vec::new();
            for code in 0..total {
                let atoms: Vec<usize> = (0..ps.len()).rev().map(|k| (code >> (3 * k)) & 7).collect();
                let ok = ps.iter().enumerate().all(|(k, &(a, b))| allowed(&inst, a, b).contains(BaseRelation::from_index(atoms[k]).unwrap()));
                let d: u32 = ps.iter().enumerate().map(|(k, &(a, b))| cost(atoms[k], inst.q.label(a, b))).sum();
                if ok && d == i {
                    expected.push(atoms.iter().map(|&x| RelationSet::single(BaseRelation::from_index(x).unwrap())).collect());
                }
            }
            assert_eq!(got, expected, "i={i}\n{}", inst.q.to_text());
        }
    }
}

#[test]
fn distance_is_symmetric() {
    let mut rng = common::rng(32);
    for _ in 0..500 {
        let n = rng.gen_range(2..=5);
        let a = random_instance(&mut rng, n).q;
        let mut b = a.clone();
        for (i, j) in pairs(n) {
            b.set_label(i, j, random_set(&mut rng, 1, 1));
        }
        let mut a1 = a.clone();
        for (i, j) in pairs(n) {
            a1.set_label(i, j, random_set(&mut rng, 1, 1));
        }
        assert_eq!(scenario_distance(&a1, &b).unwrap(), scenario_distance(&b, &a1).unwrap());
        assert_eq!(scenario_distance(&a1, &a1).unwrap(), 0);
    }
}
