mod common;

use common::abduction::{brute_min_cost, replay};
use common::fixture;
use geonarrate::abduce::{explain, AbduceOptions, Problem};
use geonarrate::qcn::parse_blocks;

fn terms(ex: &geonarrate::abduce::Explanation) -> Vec<String> {
    ex.delta.iter().map(|p| p.event.term()).collect()
}

#[test]
fn appearance_inside() {
    let obs = parse_blocks(&fixture("appearance_inside.qcn")).unwrap();
    let opts = AbduceOptions::default();
    let found = explain(&obs, &opts).unwrap();
    assert_eq!(found[0].cost, 3);
    let mut set = found[0].event_set();
    set.sort();
    assert_eq!(set, ["appearance(b)", "tran(a, c, ec)", "tran(b, a, ntpp)"]);
    for ex in &found {
        replay(&obs, ex).unwrap();
    }
    let problem = Problem::new(&obs, &opts.abducibles).unwrap();
    assert_eq!(brute_min_cost(&problem, 3), Some(3));
}

#[test]
fn rural_merge() {
    let obs = parse_blocks(&fixture("rural_merge.qcn")).unwrap();
    let opts = AbduceOptions::default();
    let found = explain(&obs, &opts).unwrap();
    let best = &found[0];
    assert_eq!(best.cost, 4);
    let t = terms(best);
    for want in [
        "merge([rz1, rz3], rz_new)",
        "disappearance(rz1)",
        "disappearance(rz3)",
        "appearance(rz_new)",
        "disappearance(mg1)",
        "disappearance(mg3)",
        "tran(rz2, prk1, ec)",
    ] {
        assert!(t.iter().any(|x| x == want), "missing {want} in {t:?}");
    }
    replay(&obs, best).unwrap();
    let problem = Problem::new(&obs, &opts.abducibles).unwrap();
    assert_eq!(brute_min_cost(&problem, 3), None);
    let order = best.ordering_constraints().join("\n");
    assert!(order.contains("appearance(rz_new) = merge([rz1, rz3], rz_new)"), "{order}");
}
