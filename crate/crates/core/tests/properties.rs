use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use ppcem::em::{em_redexes, em_step, p_redexes, DecomposeOrder};
use ppcem::free::free_variables;
use ppcem::gen::TermGen;
use ppcem::measure::Measure;
use ppcem::outcome::{disjoint_union, MatchOutcome};
use ppcem::parallel::parallel_reducts;
use ppcem::ppc::{ppc_redexes, ppc_step};
use ppcem::strategy::{replay, run, DfLr, DfReordered, Full, Verdict};
use ppcem::subst::{alpha_equiv, alpha_key, canonicalize, is_canonical, substitute};
use ppcem::{parse, Bottom, Name, Term};

fn bot() -> Bottom {
    Bottom::default()
}

fn any_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(|s| TermGen::new(s).any_term(&bot()))
}

fn small_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(|s| TermGen::new(s).small(10, &bot()))
}

fn pure_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(|s| TermGen::new(s).pure_term())
}

/// Terms reachable from `t` in at most `depth` explicit steps.
fn em_closure(t: &Term, depth: usize, bottom: &Bottom) -> HashSet<Term> {
    let mut seen = HashSet::from([alpha_key(t)]);
    let mut frontier = vec![t.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for u in &frontier {
            for r in em_redexes(u) {
                let v = em_step(u, &r, bottom).unwrap();
                if seen.insert(alpha_key(&v)) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn canonicalize_is_idempotent_and_alpha_preserving(t in any_term()) {
        let c = canonicalize(&t);
        prop_assert!(is_canonical(&c));
        prop_assert!(alpha_equiv(&c, &t));
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn substitution_respects_free_variables(t in any_term(), s in pure_term()) {
        let x = Name::new("f");
        let sigma = BTreeMap::from([(x.clone(), s.clone())]);
        let out = substitute(&t, &sigma);
        let mut allowed = free_variables(&t);
        allowed.remove(&x);
        allowed.extend(free_variables(&s));
        prop_assert!(free_variables(&out).is_subset(&allowed));
        if !free_variables(&t).contains(&x) {
            prop_assert!(alpha_equiv(&out, &t));
        }
    }

    #[test]
    fn every_p_step_lowers_the_measure(t in any_term()) {
        let b = bot();
        for r in p_redexes(&t) {
            let u = em_step(&t, &r, &b).unwrap();
            prop_assert!(Measure::of(&u, &b) < Measure::of(&t, &b), "{} at {:?}", r.tag, r.path);
        }
    }

    /// →EM ⊆ ⟹ ⊆ →EM*.
    #[test]
    fn parallel_reduction_is_sandwiched(t in small_term()) {
        let b = bot();
        let Ok(par) = parallel_reducts(&t, &b, 20_000) else { return Ok(()) };
        let keys: HashSet<Term> = par.iter().map(alpha_key).collect();
        for r in em_redexes(&t) {
            prop_assert!(keys.contains(&alpha_key(&em_step(&t, &r, &b).unwrap())));
        }
        let reach = em_closure(&t, 12, &b);
        for u in &par {
            prop_assert!(reach.contains(&alpha_key(u)), "{} not reached from {}", u, t);
        }
    }

    /// t ⟹ t' implies t^σ ⟹ t'^σ.
    #[test]
    fn parallel_reduction_is_stable_under_substitution(t in small_term(), s in pure_term()) {
        let b = bot();
        let sigma = BTreeMap::from([(Name::new("f"), s)]);
        let Ok(par) = parallel_reducts(&t, &b, 20_000) else { return Ok(()) };
        let Ok(par_s) = parallel_reducts(&substitute(&t, &sigma), &b, 200_000) else { return Ok(()) };
        let keys: HashSet<Term> = par_s.iter().map(alpha_key).collect();
        for u in &par {
            prop_assert!(keys.contains(&alpha_key(&substitute(u, &sigma))));
        }
    }

    /// A root implicit step commutes with substitution.
    #[test]
    fn implicit_step_commutes_with_substitution(seed in any::<u64>(), s in pure_term()) {
        let b = bot();
        let t = TermGen::new(seed).pure_with_redex();
        let sigma = BTreeMap::from([(Name::new("f"), s)]);
        for path in ppc_redexes(&t) {
            let Ok(u) = ppc_step(&t, &path, &b) else { continue };
            let ts = substitute(&t, &sigma);
            prop_assert!(ppc_redexes(&ts).contains(&path));
            let us = ppc_step(&ts, &path, &b).unwrap();
            prop_assert!(alpha_equiv(&us, &substitute(&u, &sigma)), "{} at {:?}", t, path);
        }
    }

    #[test]
    fn traces_replay_to_their_result(t in any_term()) {
        let b = bot();
        let r = run(&t, &Full, 200, &b);
        let steps: Vec<_> = r.trace.iter().map(|s| ppcem::em::Redex { path: s.path.clone(), tag: s.rule }).collect();
        prop_assert_eq!(replay(&t, &steps, DecomposeOrder::InPlace, &b).unwrap(), r.result);
    }

    /// When every matching resolves, the order of Δ does not matter.
    #[test]
    fn decomposition_order_is_irrelevant_for_resolved_runs(t in any_term()) {
        let b = bot();
        let lr = run(&t, &DfLr, 2_000, &b);
        let re = run(&t, &DfReordered, 2_000, &b);
        // pure results: no matching was left pending
        if lr.verdict == Verdict::NormalForm && re.verdict == Verdict::NormalForm
            && lr.result.is_pure() && re.result.is_pure() {
            prop_assert!(alpha_equiv(&lr.result, &re.result), "{} vs {}", lr.result, re.result);
        }
    }

    #[test]
    fn union_of_decided_outcomes_is_commutative(a in pure_term(), b in pure_term()) {
        let x = Name::new("x");
        let y = Name::new("y");
        let cases = [
            MatchOutcome::Fail,
            MatchOutcome::Wait,
            MatchOutcome::Subst(BTreeMap::from([(x.clone(), a.clone())])),
            MatchOutcome::Subst(BTreeMap::from([(x, b.clone())])),
            MatchOutcome::Subst(BTreeMap::from([(y, b)])),
        ];
        for l in &cases {
            for r in &cases {
                prop_assert!(disjoint_union(l.clone(), r.clone()).alpha_eq(&disjoint_union(r.clone(), l.clone())));
            }
        }
    }
}

#[test]
fn non_linear_critical_pair_rejoins_at_failure() {
    let b = bot();
    let t = parse("x[x; {}; (^c ~ ^x), (^d ~ ^x)]").unwrap();
    let binds: Vec<_> = em_redexes(&t).into_iter().filter(|r| r.tag == ppcem::em::RuleTag::MatchBind).collect();
    assert_eq!(binds.len(), 2);
    for r in binds {
        let u = em_step(&t, &r, &b).unwrap();
        let nf = run(&u, &Full, 10, &b).result;
        assert!(alpha_equiv(&nf, b.term()), "{u} ends in {nf}");
    }
}
