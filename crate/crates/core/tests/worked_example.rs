use std::sync::Arc;

use cpnego_core::cpnet::PrefRelation;
use cpnego_core::fixtures;
use cpnego_core::pareto::ParetoOracle;
use cpnego_core::protocol::negotiate_with_order;
use cpnego_core::ProtocolOptions;

#[test]
fn worked_example_chosen_is_pareto_optimal() {
    let (n1, n2) = fixtures::worked_example();
    let oracle = ParetoOracle::new(&[&n1, &n2], 1 << 8).unwrap();
    let r = negotiate_with_order([Arc::new(n1.clone()), Arc::new(n2.clone())], vec![0, 1, 2], 3, ProtocolOptions::default())
        .unwrap();
    assert!(r.agreements.iter().all(|o| oracle.is_po(o)));
    assert_eq!(n1.compare(&r.agreements[0], &r.agreements[1], 256).unwrap(), PrefRelation::Better);
}
