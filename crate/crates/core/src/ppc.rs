//! The implicit calculus: meta-level compound matching, the domain check,
//! and the single β_m rule.

use crate::name::Name;
use crate::outcome::{disjoint_union, MatchOutcome};
use crate::subst::{canonicalize, substitute};
use crate::term::{Bottom, Path, Subst, Term};

/// `d ::= x̂ | d t`
pub fn is_data_structure(t: &Term) -> bool {
    match t {
        Term::Matchable(_) => true,
        Term::App(f, _) => is_data_structure(f),
        _ => false,
    }
}

/// `m ::= d | [θ] t → t`
pub fn is_matchable_form(t: &Term) -> bool {
    matches!(t, Term::Case(_)) || is_data_structure(t)
}

/// `{a /θ p}`: the first applicable equation wins.
pub fn compound_match(a: &Term, p: &Term, theta: &[Name]) -> MatchOutcome {
    if let Term::Matchable(x) = p {
        if theta.contains(x) {
            let mut s = Subst::new();
            s.insert(x.clone(), a.clone());
            return MatchOutcome::Subst(s);
        }
        if a == p {
            return MatchOutcome::empty();
        }
    }
    let both = is_matchable_form(a) && is_matchable_form(p);
    if let (Term::App(a1, a2), Term::App(p1, p2)) = (a, p) {
        if both {
            return disjoint_union(compound_match(a1, p1, theta), compound_match(a2, p2, theta));
        }
    }
    if both {
        MatchOutcome::Fail
    } else {
        MatchOutcome::Wait
    }
}

/// `{a /θ p}` followed by the check that the domain is exactly `θ`.
pub fn checked_match(a: &Term, p: &Term, theta: &[Name]) -> MatchOutcome {
    match compound_match(a, p, theta) {
        MatchOutcome::Subst(s) => {
            let covers = s.len() == theta.len() && theta.iter().all(|x| s.contains_key(x));
            if covers {
                MatchOutcome::Subst(s)
            } else {
                MatchOutcome::Fail
            }
        }
        other => other,
    }
}

/// Contractum of a β_m redex, or `None` when the node is not one.
pub fn contract(t: &Term, bottom: &Bottom) -> Option<Term> {
    let Term::App(f, a) = t else { return None };
    let Term::Case(c) = &**f else { return None };
    match checked_match(a, &c.pattern, &c.binders) {
        MatchOutcome::Subst(s) => Some(substitute(&c.body, &s)),
        MatchOutcome::Fail => Some(bottom.term().clone()),
        MatchOutcome::Wait => None,
    }
}

/// Positions of all β_m redexes, leftmost-outermost first.
pub fn ppc_redexes(t: &Term) -> Vec<Path> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<Path>) {
        if let Term::App(f, a) = t {
            if let Term::Case(c) = &**f {
                if checked_match(a, &c.pattern, &c.binders).is_decided() {
                    out.push(path.clone());
                }
            }
        }
        for (slot, c) in t.children().into_iter().enumerate() {
            path.push(slot);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    if t.is_pure() {
        go(t, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PpcError {
    #[error("term is not pure")]
    NotPure,
    #[error("no β_m redex at {0:?}")]
    NotARedex(Path),
}

pub fn ppc_step(t: &Term, path: &[usize], bottom: &Bottom) -> Result<Term, PpcError> {
    if !t.is_pure() {
        return Err(PpcError::NotPure);
    }
    let not_redex = || PpcError::NotARedex(path.to_vec());
    let out = t
        .replace_at(path, |node| contract(node, bottom).ok_or_else(not_redex))
        .ok_or_else(not_redex)??;
    Ok(canonicalize(&out))
}

/// Reduce with the leftmost-outermost redex until normal or out of budget.
/// Returns the final term and the number of steps taken.
pub fn ppc_normalize(t: &Term, bottom: &Bottom, max_steps: usize) -> (Term, usize, bool) {
    let mut cur = canonicalize(t);
    for n in 0..max_steps {
        let Some(path) = ppc_redexes(&cur).into_iter().next() else {
            return (cur, n, true);
        };
        cur = ppc_step(&cur, &path, bottom).expect("listed redex");
    }
    let normal = ppc_redexes(&cur).is_empty();
    (cur, max_steps, normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::alpha_equiv;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn names(xs: &[&str]) -> Vec<Name> {
        xs.iter().map(|s| Name::new(s)).collect()
    }

    fn subst(pairs: &[(&str, &str)]) -> MatchOutcome {
        MatchOutcome::Subst(pairs.iter().map(|(k, v)| (Name::new(k), p(v))).collect())
    }

    #[test]
    fn grammar_membership() {
        assert!(is_data_structure(&p("^c t")));
        assert!(!is_data_structure(&p("[x] ^x -> x")));
        assert!(is_matchable_form(&p("[x] ^x -> x")));
        assert!(!is_matchable_form(&p("x t")));
    }

    #[test]
    fn compound_matching_examples() {
        assert_eq!(compound_match(&p("^c t"), &p("^c ^x"), &names(&["x"])), subst(&[("x", "t")]));
        assert_eq!(compound_match(&p("^c t"), &p("y ^x"), &names(&["x"])), MatchOutcome::Wait);
        assert_eq!(compound_match(&p("^c"), &p("^c ^x"), &names(&["x"])), MatchOutcome::Fail);
    }

    #[test]
    fn binding_equation_comes_first() {
        assert_eq!(compound_match(&p("^x"), &p("^x"), &names(&["x"])), subst(&[("x", "^x")]));
        assert_eq!(compound_match(&p("^x"), &p("^x"), &[]), MatchOutcome::empty());
    }

    #[test]
    fn check_requires_full_domain() {
        assert_eq!(checked_match(&p("^c t"), &p("^c ^x"), &names(&["x", "y"])), MatchOutcome::Fail);
        assert_eq!(checked_match(&p("^c t"), &p("^c ^x"), &names(&["x"])), subst(&[("x", "t")]));
        assert_eq!(checked_match(&p("^c"), &p("^c"), &[]), MatchOutcome::empty());
    }

    #[test]
    fn non_linear_patterns_fail() {
        let r = compound_match(&p("^c a b"), &p("^c ^x ^x"), &names(&["x"]));
        assert_eq!(r, MatchOutcome::Fail);
    }

    #[test]
    fn beta_m_examples() {
        let bot = Bottom::default();
        let step = |s: &str| ppc_step(&p(s), &[], &bot);
        assert!(alpha_equiv(&step("([x] ^c ^x -> x) (^c t)").unwrap(), &p("t")));
        assert!(alpha_equiv(&step("([x, y] ^c ^x -> x y) (^c t)").unwrap(), bot.term()));
        assert!(alpha_equiv(&step("([x] ^c ^x -> x) ^c").unwrap(), bot.term()));
        assert!(ppc_redexes(&p("([x] y ^x -> x) (^c t)")).is_empty());
        assert_eq!(step("([x] y ^x -> x) (^c t)"), Err(PpcError::NotARedex(vec![])));
    }

    #[test]
    fn redexes_are_listed_outermost_first() {
        let t = p("([x] ^x -> x) (([y] ^y -> y) ^c)");
        assert_eq!(ppc_redexes(&t), vec![vec![], vec![1]]);
    }
}
