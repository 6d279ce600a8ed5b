//! Three-valued match results and their disjoint union.

use crate::subst::alpha_equiv;
use crate::term::{DecidedMatch, Subst};

/// Result of meta-level compound matching.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MatchOutcome {
    Subst(Subst),
    Fail,
    Wait,
}

impl MatchOutcome {
    pub fn empty() -> Self {
        MatchOutcome::Subst(Subst::new())
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, MatchOutcome::Wait)
    }

    /// Same outcome, comparing bound terms up to α.
    pub fn alpha_eq(&self, other: &MatchOutcome) -> bool {
        match (self, other) {
            (MatchOutcome::Subst(a), MatchOutcome::Subst(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|((k1, v1), (k2, v2))| k1 == k2 && alpha_equiv(v1, v2))
            }
            (MatchOutcome::Fail, MatchOutcome::Fail) | (MatchOutcome::Wait, MatchOutcome::Wait) => true,
            _ => false,
        }
    }
}

impl From<DecidedMatch> for MatchOutcome {
    fn from(m: DecidedMatch) -> Self {
        match m {
            DecidedMatch::Fail => MatchOutcome::Fail,
            DecidedMatch::Subst(s) => MatchOutcome::Subst(s),
        }
    }
}

/// `ρ1 ⊎ ρ2`: failure absorbs everything, then `wait` absorbs, and
/// substitutions with overlapping domains fail.
pub fn disjoint_union(r1: MatchOutcome, r2: MatchOutcome) -> MatchOutcome {
    match (r1, r2) {
        (MatchOutcome::Fail, _) | (_, MatchOutcome::Fail) => MatchOutcome::Fail,
        (MatchOutcome::Wait, _) | (_, MatchOutcome::Wait) => MatchOutcome::Wait,
        (MatchOutcome::Subst(mut a), MatchOutcome::Subst(b)) => {
            for (k, v) in b {
                if a.contains_key(&k) {
                    return MatchOutcome::Fail;
                }
                a.insert(k, v);
            }
            MatchOutcome::Subst(a)
        }
    }
}

/// `⊎` over a multiset of outcomes: failure if any component fails or two
/// substitutions overlap, otherwise `wait` if any component waits.
///
/// The binary operator is not associative once `wait` and overlapping
/// domains meet, so folding it over an unordered collection is ambiguous;
/// this reading lets failure win, as it does in the binary case.
pub fn union_all(outcomes: impl IntoIterator<Item = MatchOutcome>) -> MatchOutcome {
    let mut acc = Subst::new();
    let mut waiting = false;
    for r in outcomes {
        match r {
            MatchOutcome::Fail => return MatchOutcome::Fail,
            MatchOutcome::Wait => waiting = true,
            MatchOutcome::Subst(s) => {
                for (k, v) in s {
                    if acc.insert(k, v).is_some() {
                        return MatchOutcome::Fail;
                    }
                }
            }
        }
    }
    if waiting {
        MatchOutcome::Wait
    } else {
        MatchOutcome::Subst(acc)
    }
}

/// `⊎` restricted to decided matches.
pub fn disjoint_union_decided(m1: DecidedMatch, m2: DecidedMatch) -> DecidedMatch {
    match disjoint_union(m1.into(), m2.into()) {
        MatchOutcome::Subst(s) => DecidedMatch::Subst(s),
        MatchOutcome::Fail => DecidedMatch::Fail,
        MatchOutcome::Wait => unreachable!("decided matches never union to wait"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;
    use crate::term::Term;
    use proptest::prelude::*;

    fn single(k: &str, v: &str) -> MatchOutcome {
        let mut s = Subst::new();
        s.insert(Name::new(k), Term::var(v));
        MatchOutcome::Subst(s)
    }

    #[test]
    fn bottom_absorbs_wait() {
        assert_eq!(disjoint_union(MatchOutcome::Fail, MatchOutcome::Wait), MatchOutcome::Fail);
        assert_eq!(disjoint_union(MatchOutcome::Wait, MatchOutcome::Fail), MatchOutcome::Fail);
    }

    #[test]
    fn overlapping_domains_fail() {
        assert_eq!(disjoint_union(single("x", "a"), single("x", "b")), MatchOutcome::Fail);
        assert_eq!(disjoint_union(single("x", "a"), single("x", "a")), MatchOutcome::Fail);
    }

    #[test]
    fn empty_union() {
        assert_eq!(disjoint_union(MatchOutcome::empty(), MatchOutcome::empty()), MatchOutcome::empty());
        assert_eq!(disjoint_union(MatchOutcome::Wait, single("x", "a")), MatchOutcome::Wait);
    }

    fn outcome() -> impl Strategy<Value = MatchOutcome> {
        prop_oneof![
            Just(MatchOutcome::Fail),
            Just(MatchOutcome::Wait),
            proptest::collection::btree_map(0..4u8, 0..3u8, 0..3).prop_map(|m| {
                MatchOutcome::Subst(
                    m.into_iter()
                        .map(|(k, v)| (Name::new(&format!("x{k}")), Term::var(format!("v{v}").as_str())))
                        .collect(),
                )
            }),
        ]
    }

    fn masks_overlap(a: &MatchOutcome, b: &MatchOutcome, c: &MatchOutcome) -> bool {
        let any_wait = [a, b, c].iter().any(|r| **r == MatchOutcome::Wait);
        let substs: Vec<&Subst> = [a, b, c]
            .into_iter()
            .filter_map(|r| match r {
                MatchOutcome::Subst(s) => Some(s),
                _ => None,
            })
            .collect();
        let overlap = substs.iter().enumerate().any(|(i, s)| {
            substs[i + 1..].iter().any(|t| s.keys().any(|k| t.contains_key(k)))
        });
        any_wait && overlap
    }

    #[test]
    fn wait_masks_a_later_overlap() {
        let left = disjoint_union(disjoint_union(MatchOutcome::Wait, single("x", "a")), single("x", "b"));
        let right = disjoint_union(MatchOutcome::Wait, disjoint_union(single("x", "a"), single("x", "b")));
        assert_eq!(left, MatchOutcome::Wait);
        assert_eq!(right, MatchOutcome::Fail);
        assert_eq!(union_all([MatchOutcome::Wait, single("x", "a"), single("x", "b")]), MatchOutcome::Fail);
    }

    proptest! {
        #[test]
        fn union_all_is_order_independent(a in outcome(), b in outcome(), c in outcome()) {
            let abc = union_all([a.clone(), b.clone(), c.clone()]);
            prop_assert_eq!(abc.clone(), union_all([c.clone(), a.clone(), b.clone()]));
            prop_assert_eq!(abc, union_all([b, c, a]));
        }

        #[test]
        fn commutative(a in outcome(), b in outcome()) {
            prop_assert_eq!(disjoint_union(a.clone(), b.clone()), disjoint_union(b, a));
        }

        // `wait` hides an overlap that appears later in a fold, so the
        // operator is associative only away from that combination
        #[test]
        fn associative_without_masked_overlap(a in outcome(), b in outcome(), c in outcome()) {
            prop_assume!(!masks_overlap(&a, &b, &c));
            let left = disjoint_union(disjoint_union(a.clone(), b.clone()), c.clone());
            let right = disjoint_union(a, disjoint_union(b, c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn decided_never_waits(a in outcome(), b in outcome()) {
            prop_assume!(a.is_decided() && b.is_decided());
            prop_assert!(disjoint_union(a, b).is_decided());
        }
    }
}
