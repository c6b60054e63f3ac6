use std::sync::Arc;

use proptest::prelude::*;

use cpnego_core::cpnet::PrefRelation;
use cpnego_core::domain::{AttrIx, Outcome, PartialAssignment};
use cpnego_core::generator::{random_instance, DomainRule, GenConfig};
use cpnego_core::protocol::negotiate;
use cpnego_core::ProtocolOptions;

fn config(m: usize, multi: bool) -> GenConfig {
    GenConfig {
        domain: if multi { DomainRule::Uniform { max: 3 } } else { DomainRule::Binary },
        ..GenConfig::binary(m)
    }
}

/// Binds attribute `a` of `o` when bit `a` of `mask` is set.
fn partial_of(o: &Outcome, mask: u32) -> PartialAssignment {
    let mut x = PartialAssignment::empty(o.len());
    for a in 0..o.len() {
        if mask >> a & 1 == 1 {
            x = x.with(a, o.get(a));
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn project_then_combine_restores(seed in any::<u64>(), m in 1usize..7, mask in any::<u32>(), idx in any::<u64>()) {
        let [net, _] = random_instance(&config(m, true), seed).unwrap();
        let space = net.space();
        let o = space.outcome_at(idx % space.outcome_count().unwrap() as u64);
        let full = PartialAssignment::from(&o);
        let left: Vec<AttrIx> = (0..m).filter(|a| mask >> a & 1 == 1).collect();
        let right: Vec<AttrIx> = (0..m).filter(|a| mask >> a & 1 == 0).collect();
        let l = full.project(&left, space).unwrap();
        let r = full.project(&right, space).unwrap();
        prop_assert_eq!(l.combine(&r, space).unwrap(), full.clone());
        prop_assert!(l.is_extended_by(&o));
    }

    #[test]
    fn completion_count_is_product_of_free_domains(seed in any::<u64>(), m in 1usize..7, mask in any::<u32>()) {
        let [net, _] = random_instance(&config(m, true), seed).unwrap();
        let space = net.space();
        let x = partial_of(&space.outcome_at(0), mask);
        let expected: usize = (0..m).filter(|&a| !x.is_bound(a)).map(|a| space.domain_size(a)).product();
        prop_assert_eq!(space.completions(&x).count(), expected);
        prop_assert!(space.completions(&x).all(|o| x.is_extended_by(&o)));
    }

    #[test]
    fn optimal_completion_beats_every_other_completion(seed in any::<u64>(), m in 1usize..7, mask in any::<u32>(), multi in any::<bool>()) {
        let [net, _] = random_instance(&config(m, multi), seed).unwrap();
        let space = net.space();
        let x = partial_of(&space.outcome_at(seed % 2), mask);
        let best = net.optimal_completion(&x).unwrap();
        prop_assert!(x.is_extended_by(&best));
        for o in space.completions(&x) {
            let rel = net.compare(&best, &o, 1 << 12).unwrap();
            prop_assert!(matches!(rel, PrefRelation::Better | PrefRelation::Same));
        }
    }

    #[test]
    fn compare_is_antisymmetric_and_penalty_orders(seed in any::<u64>(), m in 1usize..7, i in any::<u64>(), j in any::<u64>()) {
        let [net, _] = random_instance(&config(m, true), seed).unwrap();
        let space = net.space();
        let n = space.outcome_count().unwrap() as u64;
        let (o, p) = (space.outcome_at(i % n), space.outcome_at(j % n));
        let rel = net.compare(&o, &p, 1 << 12).unwrap();
        prop_assert_eq!(net.compare(&p, &o, 1 << 12).unwrap(), rel.reverse());
        if rel == PrefRelation::Better {
            prop_assert!(net.penalty(&o) < net.penalty(&p));
        }
    }

    #[test]
    fn negotiation_returns_a_final_agreement(seed in any::<u64>(), m in 1usize..6, multi in any::<bool>()) {
        let [a, b] = random_instance(&config(m, multi), seed).unwrap();
        let r = negotiate([Arc::new(a), Arc::new(b)], seed, ProtocolOptions::default()).unwrap();
        prop_assert!(r.agreements.contains(&r.chosen));
        prop_assert!(r.stats.s_iter as usize >= m);
        prop_assert!(!r.initial.is_empty());
    }
}
