//! Term language shared by the implicit calculus, the explicit-matching
//! calculus and its partial-substitution variant.
//!
//! A matching `b⟨θ; μ; Δ⟩` stores its partial result in a [`Record`]. The
//! explicit calculus records a [`DecidedMatch`]; the partial-substitution
//! variant records only the names already used (see `partial::TauMatch`).
//! Everything that does not look inside the record (free names, paths,
//! substitution, α-equivalence) is generic over it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::name::Name;

/// Child indices from the root of a term.
///
/// Slots are numbered as follows: application and structural application
/// `0` function / head, `1` argument; case `0` pattern, `1` body; matching
/// `0` body, then one slot per term of the record, then for every pending
/// pair its argument followed by its pattern.
pub type Path = Vec<usize>;

/// The partial result stored inside a matching.
pub trait Record: Clone + Eq + Hash + fmt::Debug + Send + Sync + Sized + 'static {
    fn is_fail(&self) -> bool;
    /// Record holding no information yet (empty substitution, no used name).
    fn empty() -> Self;
    fn fail() -> Self;
    /// Terms held by the record, in slot order.
    fn terms(&self) -> Vec<&Term<Self>>;
    /// Same record with its terms replaced, in slot order.
    fn with_terms(&self, terms: Vec<Term<Self>>) -> Self;
    /// Names the record is about (domain of a substitution, used names).
    fn domain(&self) -> Vec<Name>;
    fn rename_domain(&self, rename: &dyn Fn(&Name) -> Name) -> Self;
}

/// `⊥` or a finite substitution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum DecidedMatch {
    Fail,
    Subst(Subst),
}

/// Substitution ordered by name.
pub type Subst<M = DecidedMatch> = BTreeMap<Name, Term<M>>;

/// Pending `(argument, pattern)` pairs. Stored in insertion order; the core
/// relation treats it as a multiset.
pub type Delta<M = DecidedMatch> = Vec<(Term<M>, Term<M>)>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term<M: Record = DecidedMatch> {
    Var(Name),
    Matchable(Name),
    App(Arc<Term<M>>, Arc<Term<M>>),
    SApp(Arc<Term<M>>, Arc<Term<M>>),
    Case(Arc<Case<M>>),
    Matching(Arc<Matching<M>>),
}

/// `[θ] p → b`
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Case<M: Record = DecidedMatch> {
    pub binders: Vec<Name>,
    pub pattern: Term<M>,
    pub body: Term<M>,
}

/// `b⟨θ; record; Δ⟩`
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matching<M: Record = DecidedMatch> {
    pub body: Term<M>,
    pub binders: Vec<Name>,
    pub record: M,
    pub pending: Delta<M>,
}

impl<M: Record> Matching<M> {
    pub fn record_len(&self) -> usize {
        self.record.terms().len()
    }

    pub fn arg_slot(&self, pair: usize) -> usize {
        1 + self.record_len() + 2 * pair
    }

    /// Pair index addressed by a child slot, if the slot is an argument slot.
    pub fn pair_of_arg_slot(&self, slot: usize) -> Option<usize> {
        let first = 1 + self.record_len();
        if slot < first {
            return None;
        }
        let rel = slot - first;
        (rel.is_multiple_of(2) && rel / 2 < self.pending.len()).then_some(rel / 2)
    }

    pub fn binds(&self, name: &Name) -> bool {
        self.binders.contains(name)
    }
}

impl Record for DecidedMatch {
    fn is_fail(&self) -> bool {
        matches!(self, DecidedMatch::Fail)
    }

    fn empty() -> Self {
        DecidedMatch::Subst(Subst::new())
    }

    fn fail() -> Self {
        DecidedMatch::Fail
    }

    fn terms(&self) -> Vec<&Term<Self>> {
        match self {
            DecidedMatch::Fail => Vec::new(),
            DecidedMatch::Subst(s) => s.values().collect(),
        }
    }

    fn with_terms(&self, terms: Vec<Term<Self>>) -> Self {
        match self {
            DecidedMatch::Fail => DecidedMatch::Fail,
            DecidedMatch::Subst(s) => {
                assert_eq!(s.len(), terms.len(), "record arity changed");
                DecidedMatch::Subst(s.keys().cloned().zip(terms).collect())
            }
        }
    }

    fn domain(&self) -> Vec<Name> {
        match self {
            DecidedMatch::Fail => Vec::new(),
            DecidedMatch::Subst(s) => s.keys().cloned().collect(),
        }
    }

    fn rename_domain(&self, rename: &dyn Fn(&Name) -> Name) -> Self {
        match self {
            DecidedMatch::Fail => DecidedMatch::Fail,
            DecidedMatch::Subst(s) => {
                DecidedMatch::Subst(s.iter().map(|(k, v)| (rename(k), v.clone())).collect())
            }
        }
    }
}

impl DecidedMatch {
    pub fn subst(&self) -> Option<&Subst> {
        match self {
            DecidedMatch::Fail => None,
            DecidedMatch::Subst(s) => Some(s),
        }
    }
}

impl<M: Record> Term<M> {
    pub fn var(name: impl Into<Name>) -> Self {
        Term::Var(name.into())
    }

    pub fn matchable(name: impl Into<Name>) -> Self {
        Term::Matchable(name.into())
    }

    pub fn app(fun: Term<M>, arg: Term<M>) -> Self {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn sapp(head: Term<M>, arg: Term<M>) -> Self {
        Term::SApp(Arc::new(head), Arc::new(arg))
    }

    pub fn case(binders: Vec<Name>, pattern: Term<M>, body: Term<M>) -> Self {
        Term::Case(Arc::new(Case {
            binders,
            pattern,
            body,
        }))
    }

    pub fn matching(body: Term<M>, binders: Vec<Name>, record: M, pending: Delta<M>) -> Self {
        Term::Matching(Arc::new(Matching {
            body,
            binders,
            record,
            pending,
        }))
    }

    /// No structural application and no matching.
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Var(_) | Term::Matchable(_) => true,
            Term::App(f, a) => f.is_pure() && a.is_pure(),
            Term::Case(c) => c.pattern.is_pure() && c.body.is_pure(),
            Term::SApp(..) | Term::Matching(_) => false,
        }
    }

    pub fn contains_matching(&self) -> bool {
        match self {
            Term::Matching(_) => true,
            _ => self.children().into_iter().any(Term::contains_matching),
        }
    }

    /// Number of syntax nodes (names, applications, cases, matchings).
    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Term::node_count)
            .sum::<usize>()
    }

    /// Immediate subterms in slot order.
    pub fn children(&self) -> Vec<&Term<M>> {
        match self {
            Term::Var(_) | Term::Matchable(_) => Vec::new(),
            Term::App(f, a) | Term::SApp(f, a) => vec![f, a],
            Term::Case(c) => vec![&c.pattern, &c.body],
            Term::Matching(m) => {
                let mut out = vec![&m.body];
                out.extend(m.record.terms());
                for (a, p) in &m.pending {
                    out.push(a);
                    out.push(p);
                }
                out
            }
        }
    }

    pub fn child(&self, slot: usize) -> Option<&Term<M>> {
        match self {
            Term::App(f, a) | Term::SApp(f, a) => match slot {
                0 => Some(f),
                1 => Some(a),
                _ => None,
            },
            Term::Case(c) => match slot {
                0 => Some(&c.pattern),
                1 => Some(&c.body),
                _ => None,
            },
            Term::Matching(_) => self.children().get(slot).copied(),
            _ => None,
        }
    }

    /// Rebuild this node with the child at `slot` replaced.
    pub fn with_child(&self, slot: usize, new: Term<M>) -> Option<Term<M>> {
        Some(match self {
            Term::App(f, a) => match slot {
                0 => Term::App(Arc::new(new), a.clone()),
                1 => Term::App(f.clone(), Arc::new(new)),
                _ => return None,
            },
            Term::SApp(f, a) => match slot {
                0 => Term::SApp(Arc::new(new), a.clone()),
                1 => Term::SApp(f.clone(), Arc::new(new)),
                _ => return None,
            },
            Term::Case(c) => match slot {
                0 => Term::case(c.binders.clone(), new, c.body.clone()),
                1 => Term::case(c.binders.clone(), c.pattern.clone(), new),
                _ => return None,
            },
            Term::Matching(m) => {
                let r = m.record_len();
                if slot == 0 {
                    Term::matching(new, m.binders.clone(), m.record.clone(), m.pending.clone())
                } else if slot <= r {
                    let mut terms: Vec<Term<M>> = m.record.terms().into_iter().cloned().collect();
                    terms[slot - 1] = new;
                    Term::matching(
                        m.body.clone(),
                        m.binders.clone(),
                        m.record.with_terms(terms),
                        m.pending.clone(),
                    )
                } else {
                    let rel = slot - 1 - r;
                    let (pair, side) = (rel / 2, rel % 2);
                    if pair >= m.pending.len() {
                        return None;
                    }
                    let mut pending = m.pending.clone();
                    if side == 0 {
                        pending[pair].0 = new;
                    } else {
                        pending[pair].1 = new;
                    }
                    Term::matching(m.body.clone(), m.binders.clone(), m.record.clone(), pending)
                }
            }
            Term::Var(_) | Term::Matchable(_) => return None,
        })
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term<M>> {
        let mut cur = self;
        for &slot in path {
            cur = cur.child(slot)?;
        }
        Some(cur)
    }

    /// Replace the subterm at `path` by `f(subterm)`.
    pub fn replace_at<E>(
        &self,
        path: &[usize],
        f: impl FnOnce(&Term<M>) -> Result<Term<M>, E>,
    ) -> Option<Result<Term<M>, E>> {
        match path.split_first() {
            None => Some(f(self)),
            Some((&slot, rest)) => {
                let child = self.child(slot)?;
                match child.replace_at(rest, f)? {
                    Ok(new) => Some(Ok(self.with_child(slot, new)?)),
                    Err(e) => Some(Err(e)),
                }
            }
        }
    }

    /// Every name occurring anywhere, bound or free, including binder lists
    /// and record domains.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        self.visit_names(&mut |n| {
            if !out.contains(n) {
                out.insert(n.clone());
            }
        });
    }

    /// Calls `f` on every name occurrence, as enumerated by [`Term::all_names`].
    pub fn visit_names(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Term::Var(x) | Term::Matchable(x) => f(x),
            Term::App(g, a) | Term::SApp(g, a) => {
                g.visit_names(f);
                a.visit_names(f);
            }
            Term::Case(c) => {
                c.binders.iter().for_each(&mut *f);
                c.pattern.visit_names(f);
                c.body.visit_names(f);
            }
            Term::Matching(m) => {
                m.binders.iter().for_each(&mut *f);
                m.record.domain().iter().for_each(&mut *f);
                m.body.visit_names(f);
                for v in m.record.terms() {
                    v.visit_names(f);
                }
                for (a, p) in &m.pending {
                    a.visit_names(f);
                    p.visit_names(f);
                }
            }
        }
    }

    /// Change the record type of a pure term.
    pub fn cast_pure<N: Record>(&self) -> Option<Term<N>> {
        Some(match self {
            Term::Var(x) => Term::Var(x.clone()),
            Term::Matchable(x) => Term::Matchable(x.clone()),
            Term::App(f, a) => Term::app(f.cast_pure()?, a.cast_pure()?),
            Term::SApp(f, a) => Term::sapp(f.cast_pure()?, a.cast_pure()?),
            Term::Case(c) => Term::case(c.binders.clone(), c.pattern.cast_pure()?, c.body.cast_pure()?),
            Term::Matching(_) => return None,
        })
    }
}

/// The closed normal term standing for a failed match.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bottom(Term);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BottomError {
    #[error("bottom must be a pure term")]
    NotPure,
    #[error("bottom must be closed (free names: {0})")]
    NotClosed(String),
    #[error("bottom must be in normal form")]
    NotNormal,
}

impl Default for Bottom {
    /// `[x] x̂ → x`
    fn default() -> Self {
        Bottom(Term::case(
            vec![Name::new("x")],
            Term::matchable("x"),
            Term::var("x"),
        ))
    }
}

impl Bottom {
    pub fn new(term: Term) -> Result<Self, BottomError> {
        if !term.is_pure() {
            return Err(BottomError::NotPure);
        }
        let free = crate::free::free_names(&term);
        if !free.is_empty() {
            let names: Vec<String> = free.iter().map(Name::to_string).collect();
            return Err(BottomError::NotClosed(names.join(", ")));
        }
        if !pure_normal(&term) {
            return Err(BottomError::NotNormal);
        }
        Ok(Bottom(term))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn as_record<M: Record>(&self) -> Term<M> {
        self.0.cast_pure().expect("bottom is pure")
    }

    pub fn size(&self) -> u64 {
        crate::measure::size_with(&self.0, 0)
    }
}

/// A pure term with no application headed by a case or a constructor.
fn pure_normal(t: &Term) -> bool {
    match t {
        Term::App(f, _) if matches!(**f, Term::Case(_) | Term::Matchable(_)) => false,
        _ => t.children().into_iter().all(pure_normal),
    }
}

impl<M: Record> fmt::Debug for Term<M>
where
    Term<M>: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for DecidedMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecidedMatch::Fail => f.write_str("#fail"),
            DecidedMatch::Subst(s) => f.debug_map().entries(s.iter()).finish(),
        }
    }
}

impl fmt::Debug for Bottom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bottom({})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn slots_of_a_matching() {
        let mut s = Subst::new();
        s.insert(n("x"), Term::matchable("c"));
        let m: Term = Term::matching(
            Term::var("b"),
            vec![n("x")],
            DecidedMatch::Subst(s),
            vec![(Term::var("t"), Term::var("z"))],
        );
        assert_eq!(m.child(0), Some(&Term::var("b")));
        assert_eq!(m.child(1), Some(&Term::matchable("c")));
        assert_eq!(m.child(2), Some(&Term::var("t")));
        assert_eq!(m.child(3), Some(&Term::var("z")));
        assert_eq!(m.child(4), None);
        let Term::Matching(mm) = &m else { unreachable!() };
        assert_eq!(mm.pair_of_arg_slot(2), Some(0));
        assert_eq!(mm.pair_of_arg_slot(3), None);
        let replaced = m.with_child(3, Term::matchable("z")).unwrap();
        assert_eq!(replaced.at(&[3]), Some(&Term::matchable("z")));
    }

    #[test]
    fn replace_at_rebuilds_spine() {
        let t: Term = Term::app(Term::var("f"), Term::app(Term::var("g"), Term::var("h")));
        let r = t
            .replace_at::<()>(&[1, 0], |_| Ok(Term::matchable("k")))
            .unwrap()
            .unwrap();
        assert_eq!(r, Term::app(Term::var("f"), Term::app(Term::matchable("k"), Term::var("h"))));
        assert!(t.replace_at::<()>(&[0, 0], |x| Ok(x.clone())).is_none());
    }

    #[test]
    fn bottom_validation() {
        assert_eq!(Bottom::default().size(), 2);
        assert!(matches!(Bottom::new(Term::var("x")), Err(BottomError::NotClosed(_))));
        let id = |x: &str| Term::case(vec![n(x)], Term::matchable(x), Term::var(x));
        let redex = Term::app(id("y"), id("z"));
        assert_eq!(Bottom::new(redex), Err(BottomError::NotNormal));
        assert!(matches!(Bottom::new(Term::matchable("c")), Err(BottomError::NotClosed(_))));
        let other = Term::case(vec![n("y")], Term::matchable("y"), Term::var("y"));
        assert!(Bottom::new(other).is_ok());
    }
}
