//! Free variables, free matchables and free names.
//!
//! A case `[θ] p → b` binds matchables of `p` and variables of `b`. A
//! matching `b⟨θ; μ; Δ⟩` binds variables of `b` and matchables of the
//! patterns of `Δ`; the record's codomain and the arguments of `Δ` are
//! outside its scope.

use std::collections::BTreeSet;

use crate::name::Name;
use crate::term::{Record, Term};

pub type NameSet = BTreeSet<Name>;

pub fn free_variables<M: Record>(t: &Term<M>) -> NameSet {
    let mut out = NameSet::new();
    fv_into(t, &mut out);
    out
}

pub fn free_matchables<M: Record>(t: &Term<M>) -> NameSet {
    let mut out = NameSet::new();
    fm_into(t, &mut out);
    out
}

pub fn free_names<M: Record>(t: &Term<M>) -> NameSet {
    let mut out = free_variables(t);
    out.extend(free_matchables(t));
    out
}

fn minus(set: NameSet, binders: &[Name]) -> impl Iterator<Item = Name> + '_ {
    set.into_iter().filter(move |n| !binders.contains(n))
}

fn fv_into<M: Record>(t: &Term<M>, out: &mut NameSet) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Matchable(_) => {}
        Term::App(f, a) | Term::SApp(f, a) => {
            fv_into(f, out);
            fv_into(a, out);
        }
        Term::Case(c) => {
            fv_into(&c.pattern, out);
            out.extend(minus(free_variables(&c.body), &c.binders));
        }
        Term::Matching(m) => {
            out.extend(minus(free_variables(&m.body), &m.binders));
            for v in m.record.terms() {
                fv_into(v, out);
            }
            for (a, p) in &m.pending {
                fv_into(a, out);
                fv_into(p, out);
            }
        }
    }
}

fn fm_into<M: Record>(t: &Term<M>, out: &mut NameSet) {
    match t {
        Term::Var(_) => {}
        Term::Matchable(x) => {
            out.insert(x.clone());
        }
        Term::App(f, a) | Term::SApp(f, a) => {
            fm_into(f, out);
            fm_into(a, out);
        }
        Term::Case(c) => {
            out.extend(minus(free_matchables(&c.pattern), &c.binders));
            fm_into(&c.body, out);
        }
        Term::Matching(m) => {
            fm_into(&m.body, out);
            for v in m.record.terms() {
                fm_into(v, out);
            }
            let mut patterns = NameSet::new();
            for (a, p) in &m.pending {
                fm_into(a, out);
                fm_into(p, &mut patterns);
            }
            out.extend(minus(patterns, &m.binders));
        }
    }
}
