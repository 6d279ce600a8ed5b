//! Capture-avoiding substitution, the bound-name convention and
//! α-equivalence.
//!
//! All three walk the term with two scoped environments, one for variable
//! occurrences and one for matchable occurrences, because a binder list
//! scopes over different occurrence kinds in different children.

use std::collections::BTreeSet;

use crate::free::{free_names, NameSet};
use crate::name::{Fresh, Name};
use crate::term::{Record, Subst, Term};

/// Innermost-last environment; `None` marks a binder that shadows an outer
/// entry without changing the name.
struct Scope<T> {
    frames: Vec<(Name, Option<T>)>,
}

impl<T> Scope<T> {
    fn new() -> Self {
        Scope { frames: Vec::new() }
    }

    fn lookup(&self, name: &Name) -> Option<&T> {
        self.frames
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| v.as_ref())
    }

    fn push(&mut self, name: Name, value: Option<T>) {
        self.frames.push((name, value));
    }

    fn truncate(&mut self, len: usize) {
        self.frames.truncate(len);
    }

    fn len(&self) -> usize {
        self.frames.len()
    }
}

/// Generic traversal that renames binder lists through `rename_binder` and
/// rewrites variable occurrences through `on_var`.
trait Walker<M: Record> {
    fn rename_binder(&mut self, name: &Name) -> Name;
    fn vars(&mut self) -> &mut Scope<Term<M>>;
    fn mats(&mut self) -> &mut Scope<Name>;

    fn walk(&mut self, t: &Term<M>) -> Term<M> {
        match t {
            Term::Var(x) => self.vars().lookup(x).cloned().unwrap_or_else(|| t.clone()),
            Term::Matchable(x) => match self.mats().lookup(x) {
                Some(n) => Term::Matchable(n.clone()),
                None => t.clone(),
            },
            Term::App(f, a) => Term::app(self.walk(f), self.walk(a)),
            Term::SApp(f, a) => Term::sapp(self.walk(f), self.walk(a)),
            Term::Case(c) => {
                let renamed: Vec<Name> = c.binders.iter().map(|n| self.rename_binder(n)).collect();
                let pattern = self.under_pattern_binders(&c.binders, &renamed, &c.pattern);
                let body = self.under_body_binders(&c.binders, &renamed, &c.body);
                Term::case(renamed, pattern, body)
            }
            Term::Matching(m) => {
                let terms: Vec<Term<M>> = m.record.terms().into_iter().map(|v| self.walk(v)).collect();
                let renamed: Vec<Name> = m.binders.iter().map(|n| self.rename_binder(n)).collect();
                let body = self.under_body_binders(&m.binders, &renamed, &m.body);
                let pending = m
                    .pending
                    .iter()
                    .map(|(a, p)| (self.walk(a), self.under_pattern_binders(&m.binders, &renamed, p)))
                    .collect();
                let (old, new) = (m.binders.clone(), renamed.clone());
                let record = m.record.with_terms(terms).rename_domain(&|k| {
                    old.iter()
                        .position(|b| b == k)
                        .map(|i| new[i].clone())
                        .unwrap_or_else(|| k.clone())
                });
                Term::matching(body, renamed, record, pending)
            }
        }
    }

    fn under_pattern_binders(&mut self, old: &[Name], new: &[Name], t: &Term<M>) -> Term<M> {
        let mark = self.mats().len();
        for (o, n) in old.iter().zip(new) {
            self.mats().push(o.clone(), Some(n.clone()));
        }
        let out = self.walk(t);
        self.mats().truncate(mark);
        out
    }

    fn under_body_binders(&mut self, old: &[Name], new: &[Name], t: &Term<M>) -> Term<M> {
        let mark = self.vars().len();
        for (o, n) in old.iter().zip(new) {
            let value = (o != n).then(|| Term::Var(n.clone()));
            self.vars().push(o.clone(), value);
        }
        let out = self.walk(t);
        self.vars().truncate(mark);
        out
    }
}

struct Substituter<M: Record> {
    vars: Scope<Term<M>>,
    mats: Scope<Name>,
    clash: NameSet,
    fresh: Fresh,
}

impl<M: Record> Walker<M> for Substituter<M> {
    fn rename_binder(&mut self, name: &Name) -> Name {
        if self.clash.contains(name) {
            self.fresh.rename(name)
        } else {
            name.clone()
        }
    }
    fn vars(&mut self) -> &mut Scope<Term<M>> {
        &mut self.vars
    }
    fn mats(&mut self) -> &mut Scope<Name> {
        &mut self.mats
    }
}

/// `t^σ` without restoring the bound-name convention afterwards.
///
/// Binders meeting `dom(σ) ∪ fn(σ)` are renamed first, so the operation is
/// total.
pub(crate) fn substitute_raw<M: Record>(t: &Term<M>, sigma: &Subst<M>) -> Term<M> {
    if sigma.is_empty() {
        return t.clone();
    }
    let mut clash: NameSet = sigma.keys().cloned().collect();
    let mut fresh = Fresh::new();
    t.visit_names(&mut |n| fresh.reserve(n));
    for (k, v) in sigma {
        clash.extend(free_names(v));
        fresh.reserve(k);
        v.visit_names(&mut |n| fresh.reserve(n));
    }
    let mut vars = Scope::new();
    for (k, v) in sigma {
        vars.push(k.clone(), Some(v.clone()));
    }
    let mut s = Substituter {
        vars,
        mats: Scope::new(),
        clash,
        fresh,
    };
    s.walk(t)
}

/// `t^σ`, capture-avoiding; the result satisfies the bound-name convention.
pub fn substitute<M: Record>(t: &Term<M>, sigma: &Subst<M>) -> Term<M> {
    canonicalize(&substitute_raw(t, sigma))
}

struct Canonicalizer<M: Record> {
    vars: Scope<Term<M>>,
    mats: Scope<Name>,
    seen: NameSet,
    fresh: Fresh,
}

impl<M: Record> Walker<M> for Canonicalizer<M> {
    fn rename_binder(&mut self, name: &Name) -> Name {
        let out = if self.seen.contains(name) {
            self.fresh.rename(name)
        } else {
            name.clone()
        };
        self.seen.insert(out.clone());
        out
    }
    fn vars(&mut self) -> &mut Scope<Term<M>> {
        &mut self.vars
    }
    fn mats(&mut self) -> &mut Scope<Name> {
        &mut self.mats
    }
}

/// Rename bound names so that all binders are pairwise distinct and
/// disjoint from the free names. The first binder of each name keeps it.
pub fn canonicalize<M: Record>(t: &Term<M>) -> Term<M> {
    let mut fresh = Fresh::new();
    t.visit_names(&mut |n| fresh.reserve(n));
    let mut c = Canonicalizer {
        vars: Scope::new(),
        mats: Scope::new(),
        seen: free_names(t),
        fresh,
    };
    c.walk(t)
}

/// All binders pairwise distinct and disjoint from the free names.
pub fn is_canonical<M: Record>(t: &Term<M>) -> bool {
    fn binders<M: Record>(t: &Term<M>, seen: &mut NameSet) -> bool {
        let own = match t {
            Term::Case(c) => &c.binders[..],
            Term::Matching(m) => &m.binders[..],
            _ => &[],
        };
        for n in own {
            if !seen.insert(n.clone()) {
                return false;
            }
        }
        t.children().into_iter().all(|c| binders(c, seen))
    }
    let mut seen = free_names(t);
    binders(t, &mut seen)
}

struct AlphaKey<M: Record> {
    vars: Scope<Term<M>>,
    mats: Scope<Name>,
    next: u32,
}

impl<M: Record> Walker<M> for AlphaKey<M> {
    fn rename_binder(&mut self, _name: &Name) -> Name {
        self.next += 1;
        // the empty base cannot be written in source syntax
        Name::tagged("", self.next)
    }
    fn vars(&mut self) -> &mut Scope<Term<M>> {
        &mut self.vars
    }
    fn mats(&mut self) -> &mut Scope<Name> {
        &mut self.mats
    }
}

/// Representative of the α-class of `t`: binders are renamed positionally,
/// free names are kept. Two terms are α-equivalent iff their keys are equal.
pub fn alpha_key<M: Record>(t: &Term<M>) -> Term<M> {
    AlphaKey {
        vars: Scope::new(),
        mats: Scope::new(),
        next: 0,
    }
    .walk(t)
}

pub fn alpha_equiv<M: Record>(t1: &Term<M>, t2: &Term<M>) -> bool {
    t1 == t2 || alpha_key(t1) == alpha_key(t2)
}

/// Every binder name appearing in a binder list of `t`.
pub fn bound_names<M: Record>(t: &Term<M>) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fn go<M: Record>(t: &Term<M>, out: &mut BTreeSet<Name>) {
        match t {
            Term::Case(c) => out.extend(c.binders.iter().cloned()),
            Term::Matching(m) => out.extend(m.binders.iter().cloned()),
            _ => {}
        }
        for c in t.children() {
            go(c, out);
        }
    }
    go(t, &mut out);
    out
}
