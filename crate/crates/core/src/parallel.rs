//! Parallel reduction `⟹`: any set of non-overlapping redexes, each one
//! contracted after its components have been reduced in parallel.
//!
//! Reduct sets grow exponentially, so enumeration carries a budget on the
//! size of every intermediate set and reports overflow instead of
//! truncating.

use std::collections::HashSet;

use crate::em::{classify_pair, resolution_rule, PairClass, RuleTag};
use crate::outcome::disjoint_union_decided;
use crate::subst::{alpha_key, canonicalize, substitute};
use crate::term::{Bottom, DecidedMatch, Delta, Matching, Record, Subst, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("parallel reduct set exceeds the budget of {0}")]
pub struct Overflow(pub usize);

struct Enum<'a> {
    budget: usize,
    bottom: &'a Bottom,
}

/// Cartesian product of `factors`, refusing to build more than `budget`
/// combinations.
fn product(factors: &[Vec<Term>], budget: usize) -> Result<Vec<Vec<Term>>, Overflow> {
    let total = factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
    match total {
        Some(n) if n <= budget => {}
        _ => return Err(Overflow(budget)),
    }
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for prefix in &out {
            for choice in f {
                let mut v = prefix.clone();
                v.push(choice.clone());
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}

impl Enum<'_> {
    fn check(&self, set: &HashSet<Term>) -> Result<(), Overflow> {
        if set.len() > self.budget {
            Err(Overflow(self.budget))
        } else {
            Ok(())
        }
    }

    fn reducts(&self, t: &Term) -> Result<Vec<Term>, Overflow> {
        let mut out: HashSet<Term> = HashSet::new();
        match t {
            Term::Var(_) | Term::Matchable(_) => {
                out.insert(t.clone());
            }
            Term::App(f, a) => {
                let fs = self.reducts(f)?;
                let as_ = self.reducts(a)?;
                for v in product(&[fs, as_.clone()], self.budget)? {
                    out.insert(Term::app(v[0].clone(), v[1].clone()));
                }
                match &**f {
                    Term::Case(c) => {
                        let factors = [self.reducts(&c.pattern)?, self.reducts(&c.body)?, as_];
                        for v in product(&factors, self.budget)? {
                            let pending = vec![(v[2].clone(), v[0].clone())];
                            out.insert(Term::matching(v[1].clone(), c.binders.clone(), DecidedMatch::empty(), pending));
                        }
                    }
                    Term::Matchable(_) => {
                        for a2 in as_ {
                            out.insert(Term::sapp((**f).clone(), a2));
                        }
                    }
                    Term::SApp(t1, t2) => {
                        let factors = [self.reducts(t1)?, self.reducts(t2)?, as_];
                        for v in product(&factors, self.budget)? {
                            out.insert(Term::sapp(Term::sapp(v[0].clone(), v[1].clone()), v[2].clone()));
                        }
                    }
                    _ => {}
                }
            }
            Term::SApp(f, a) => {
                for v in product(&[self.reducts(f)?, self.reducts(a)?], self.budget)? {
                    out.insert(Term::sapp(v[0].clone(), v[1].clone()));
                }
            }
            Term::Case(c) => {
                for v in product(&[self.reducts(&c.pattern)?, self.reducts(&c.body)?], self.budget)? {
                    out.insert(Term::case(c.binders.clone(), v[0].clone(), v[1].clone()));
                }
            }
            Term::Matching(m) => self.matching(m, &mut out)?,
        }
        self.check(&out)?;
        Ok(out.into_iter().collect())
    }

    /// Parallel reducts of a record: componentwise, `⊥ ⟹ ⊥`.
    fn records(&self, r: &DecidedMatch) -> Result<Vec<DecidedMatch>, Overflow> {
        let DecidedMatch::Subst(s) = r else { return Ok(vec![DecidedMatch::Fail]) };
        let keys: Vec<_> = s.keys().cloned().collect();
        let factors = s.values().map(|v| self.reducts(v)).collect::<Result<Vec<_>, _>>()?;
        Ok(product(&factors, self.budget)?
            .into_iter()
            .map(|vals| DecidedMatch::Subst(keys.iter().cloned().zip(vals).collect()))
            .collect())
    }

    /// Parallel reducts of the pairs other than `skip`, in order.
    fn deltas(&self, pending: &Delta, skip: Option<usize>) -> Result<Vec<Delta>, Overflow> {
        let mut factors = Vec::new();
        for (j, (a, p)) in pending.iter().enumerate() {
            if Some(j) != skip {
                factors.push(self.reducts(a)?);
                factors.push(self.reducts(p)?);
            }
        }
        Ok(product(&factors, self.budget)?
            .into_iter()
            .map(|v| v.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
            .collect())
    }

    fn matching(&self, m: &Matching, out: &mut HashSet<Term>) -> Result<(), Overflow> {
        let bodies = self.reducts(&m.body)?;
        let records = self.records(&m.record)?;
        let build = |b: &Term, r: DecidedMatch, d: Delta| Term::matching(b.clone(), m.binders.clone(), r, d);

        // congruence
        let deltas = self.deltas(&m.pending, None)?;
        self.guard(bodies.len() * records.len() * deltas.len())?;
        for b in &bodies {
            for r in &records {
                for d in &deltas {
                    out.insert(build(b, r.clone(), d.clone()));
                }
            }
        }
        self.check(out)?;

        // one matching step on some pair
        for (j, (a, p)) in m.pending.iter().enumerate() {
            let rest = self.deltas(&m.pending, Some(j))?;
            match classify_pair(&m.binders, a, p) {
                PairClass::Bind(x) => {
                    let args = self.reducts(a)?;
                    self.guard(bodies.len() * records.len() * args.len() * rest.len())?;
                    for b in &bodies {
                        for r in &records {
                            for a2 in &args {
                                let mut single = Subst::new();
                                single.insert(x.clone(), a2.clone());
                                let r2 = disjoint_union_decided(r.clone(), DecidedMatch::Subst(single));
                                for d in &rest {
                                    out.insert(build(b, r2.clone(), d.clone()));
                                }
                            }
                        }
                    }
                }
                PairClass::Rule(RuleTag::MatchConst) => {
                    self.guard(bodies.len() * records.len() * rest.len())?;
                    for b in &bodies {
                        for r in &records {
                            for d in &rest {
                                out.insert(build(b, r.clone(), d.clone()));
                            }
                        }
                    }
                }
                PairClass::Rule(RuleTag::MatchDecompose) => {
                    let (Term::SApp(a1, a2), Term::SApp(p1, p2)) = (a, p) else { unreachable!() };
                    let parts = [self.reducts(a1)?, self.reducts(p1)?, self.reducts(a2)?, self.reducts(p2)?];
                    let parts = product(&parts, self.budget)?;
                    self.guard(bodies.len() * records.len() * parts.len() * rest.len())?;
                    for b in &bodies {
                        for r in &records {
                            for v in &parts {
                                for d in &rest {
                                    let mut d2 = d.clone();
                                    d2.splice(j..j, [(v[0].clone(), v[1].clone()), (v[2].clone(), v[3].clone())]);
                                    out.insert(build(b, r.clone(), d2));
                                }
                            }
                        }
                    }
                }
                PairClass::Rule(tag) if tag.is_fail() => {
                    for b in &bodies {
                        for d in &rest {
                            out.insert(build(b, DecidedMatch::Fail, d.clone()));
                        }
                    }
                }
                _ => {}
            }
            self.check(out)?;
        }

        // resolution
        match resolution_rule(m) {
            Some(RuleTag::ResolveSubst) => {
                for b in &bodies {
                    for r in &records {
                        let DecidedMatch::Subst(s) = r else { unreachable!() };
                        out.insert(substitute(b, s));
                    }
                }
            }
            Some(_) => {
                out.insert(self.bottom.term().clone());
            }
            None => {}
        }
        Ok(())
    }

    fn guard(&self, n: usize) -> Result<(), Overflow> {
        if n > self.budget {
            Err(Overflow(self.budget))
        } else {
            Ok(())
        }
    }
}

/// All `t'` with `t ⟹ t'`, up to α, each in bound-name convention form.
pub fn parallel_reducts(t: &Term, bottom: &Bottom, budget: usize) -> Result<Vec<Term>, Overflow> {
    let raw = Enum { budget, bottom }.reducts(t)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in raw {
        let r = canonicalize(&r);
        if seen.insert(alpha_key(&r)) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Whether `t ⟹ target` up to α.
pub fn parallel_derivable(t: &Term, target: &Term, bottom: &Bottom, budget: usize) -> Result<bool, Overflow> {
    let key = alpha_key(target);
    Ok(parallel_reducts(t, bottom, budget)?
        .iter()
        .any(|r| alpha_key(r) == key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{em_redexes, em_step};
    use crate::subst::alpha_equiv;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn identity_is_always_a_reduct() {
        let bot = Bottom::default();
        for src in ["x", "([x] ^c ^x -> x) (^c t)", "b[x; {}; (^c @ t ~ ^x @ z)]"] {
            let t = p(src);
            assert!(parallel_derivable(&t, &t, &bot, 10_000).unwrap());
        }
    }

    #[test]
    fn init_reduces_components_at_once() {
        let bot = Bottom::default();
        let t = p("([x] ^c ^x -> x) (^d t)");
        let target = p("x[x; {}; (^d @ t ~ ^c @ ^x)]");
        assert!(parallel_derivable(&t, &target, &bot, 10_000).unwrap());
        // two initialisations nested in each other are not one parallel step
        let t = p("([x] ^x -> x) (([y] ^y -> y) ^c)");
        let rs = parallel_reducts(&t, &bot, 10_000).unwrap();
        assert!(rs.iter().any(|r| alpha_equiv(r, &p("x[x; {}; (y[y; {}; (^c ~ ^y)] ~ ^x)]"))));
    }

    #[test]
    fn single_steps_are_parallel_steps() {
        let bot = Bottom::default();
        let t = p("([x] ^c ^x -> x x) (^c (([y] ^y -> y) ^d))");
        for r in em_redexes(&t) {
            let next = em_step(&t, &r, &bot).unwrap();
            assert!(parallel_derivable(&t, &next, &bot, 100_000).unwrap(), "{r:?}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let bot = Bottom::default();
        let t = p("^a (^b (^c (^d (^e (^f (^g ^h))))))");
        assert_eq!(parallel_reducts(&t, &bot, 16), Err(Overflow(16)));
        assert_eq!(parallel_reducts(&t, &bot, 1000).unwrap().len(), 128);
    }
}
