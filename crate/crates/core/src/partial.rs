//! The partial-substitution variant: a matching remembers only which of its
//! names have been used, and each binding goes straight into the body.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::em::{
    classify_pair, contract_app, contract_shared_pair, enumerate, same_names, site, DecomposeOrder, MatchingRules,
    PairClass, Redex, RuleTag, Site, StepError, UnknownRule,
};
use crate::name::Name;
use crate::subst::{canonicalize, substitute};
use crate::syntax::{eat_fail, parse_name_set, Parser, RecordSyntax};
use crate::term::{Bottom, DecidedMatch, Matching, Record, Subst, Term};
use crate::ParseError;

/// `⊥` or the set `τ` of matching names already bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TauMatch {
    Fail,
    Used(BTreeSet<Name>),
}

pub type PTerm = Term<TauMatch>;

impl Record for TauMatch {
    fn is_fail(&self) -> bool {
        matches!(self, TauMatch::Fail)
    }

    fn empty() -> Self {
        TauMatch::Used(BTreeSet::new())
    }

    fn fail() -> Self {
        TauMatch::Fail
    }

    fn terms(&self) -> Vec<&Term<Self>> {
        Vec::new()
    }

    fn with_terms(&self, terms: Vec<Term<Self>>) -> Self {
        assert!(terms.is_empty(), "used-name records hold no terms");
        self.clone()
    }

    fn domain(&self) -> Vec<Name> {
        match self {
            TauMatch::Fail => Vec::new(),
            TauMatch::Used(s) => s.iter().cloned().collect(),
        }
    }

    fn rename_domain(&self, rename: &dyn Fn(&Name) -> Name) -> Self {
        match self {
            TauMatch::Fail => TauMatch::Fail,
            TauMatch::Used(s) => TauMatch::Used(s.iter().map(rename).collect()),
        }
    }
}

impl RecordSyntax for TauMatch {
    fn parse_record(p: &mut Parser) -> Result<Self, ParseError> {
        if eat_fail(p) {
            return Ok(TauMatch::Fail);
        }
        parse_name_set(p).map(TauMatch::Used)
    }

    fn fmt_record(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauMatch::Fail => f.write_str("#fail"),
            TauMatch::Used(s) => {
                f.write_str("{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Rules of the variant. Everything not listed separately is shared with
/// the explicit calculus (`MatchBind`, `ResolveSubst` and
/// `ResolveDomMismatch` never appear under `Shared`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsTag {
    Shared(RuleTag),
    /// Bind an unused name and substitute it into the body at once.
    PartialBind,
    /// Second binding of an already used name.
    NonLinearFail,
    /// `τ = θ`, nothing pending.
    ResolveUsed,
    /// `τ ≠ θ`, nothing pending.
    ResolveUsedMismatch,
}

impl PsTag {
    pub fn name(self) -> &'static str {
        match self {
            PsTag::Shared(t) => t.name(),
            PsTag::PartialBind => "PartialBind",
            PsTag::NonLinearFail => "NonLinearFail",
            PsTag::ResolveUsed => "ResolveUsed",
            PsTag::ResolveUsedMismatch => "ResolveUsedMismatch",
        }
    }

    pub fn is_pair_rule(self) -> bool {
        match self {
            PsTag::Shared(t) => t.is_pair_rule(),
            PsTag::PartialBind | PsTag::NonLinearFail => true,
            PsTag::ResolveUsed | PsTag::ResolveUsedMismatch => false,
        }
    }

    /// Variant rules that may stand for a given rule of the explicit
    /// calculus under translation.
    pub fn counterparts(em: RuleTag) -> Vec<PsTag> {
        match em {
            RuleTag::MatchBind => vec![PsTag::PartialBind, PsTag::NonLinearFail],
            RuleTag::ResolveSubst => vec![PsTag::ResolveUsed],
            RuleTag::ResolveDomMismatch => vec![PsTag::ResolveUsedMismatch],
            other => vec![PsTag::Shared(other)],
        }
    }
}

impl fmt::Display for PsTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PsTag {
    type Err = UnknownRule;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let own = [PsTag::PartialBind, PsTag::NonLinearFail, PsTag::ResolveUsed, PsTag::ResolveUsedMismatch];
        if let Some(t) = own.into_iter().find(|t| t.name() == s) {
            return Ok(t);
        }
        match s.parse::<RuleTag>()? {
            RuleTag::MatchBind | RuleTag::ResolveSubst | RuleTag::ResolveDomMismatch => Err(UnknownRule(s.to_string())),
            t => Ok(PsTag::Shared(t)),
        }
    }
}

struct PsRules;

impl MatchingRules<TauMatch> for PsRules {
    type Tag = PsTag;

    fn shared(&self, tag: RuleTag) -> PsTag {
        PsTag::Shared(tag)
    }

    fn resolution(&self, m: &Matching<TauMatch>) -> Option<PsTag> {
        match &m.record {
            TauMatch::Fail => Some(PsTag::Shared(RuleTag::ResolveFail)),
            TauMatch::Used(tau) if m.pending.is_empty() => {
                let tau: Vec<Name> = tau.iter().cloned().collect();
                Some(if same_names(&tau, &m.binders) {
                    PsTag::ResolveUsed
                } else {
                    PsTag::ResolveUsedMismatch
                })
            }
            _ => None,
        }
    }

    fn pair(&self, m: &Matching<TauMatch>, j: usize) -> Option<PsTag> {
        let (a, p) = &m.pending[j];
        match (classify_pair(&m.binders, a, p), &m.record) {
            (PairClass::Bind(x), TauMatch::Used(tau)) => Some(if tau.contains(&x) {
                PsTag::NonLinearFail
            } else {
                PsTag::PartialBind
            }),
            (PairClass::Rule(tag), _) => Some(PsTag::Shared(tag)),
            _ => None,
        }
    }
}

/// Every redex of the variant, in pre-order.
pub fn ps_redexes(t: &PTerm) -> Vec<Redex<PsTag>> {
    enumerate(t, &PsRules)
}

pub fn ps_step(t: &PTerm, r: &Redex<PsTag>, bottom: &Bottom) -> Result<PTerm, StepError> {
    let err = || StepError::NotARedex {
        path: r.path.clone(),
        tag: r.tag.to_string(),
    };
    let site = site(t, &r.path, r.tag.is_pair_rule()).ok_or_else(err)?;
    let out = match site {
        Site::Node(path) => t.replace_at(&path, |node| {
            let new = match (r.tag, node) {
                (PsTag::Shared(tag), _) if !tag.is_pair_rule() && tag != RuleTag::ResolveFail => {
                    contract_app(node, tag)
                }
                (tag, Term::Matching(m)) if PsRules.resolution(m) == Some(tag) => Some(match tag {
                    PsTag::ResolveUsed => m.body.clone(),
                    _ => bottom.as_record(),
                }),
                _ => None,
            };
            new.ok_or_else(err)
        }),
        Site::Pair(path, j) => t.replace_at(&path, |node| {
            let Term::Matching(m) = node else { return Err(err()) };
            if PsRules.pair(m, j) != Some(r.tag) {
                return Err(err());
            }
            contract_pair(m, j, r.tag).ok_or_else(err)
        }),
    };
    Ok(canonicalize(&out.ok_or_else(err)??))
}

fn contract_pair(m: &Matching<TauMatch>, j: usize, tag: PsTag) -> Option<PTerm> {
    let bind = |m: &Matching<TauMatch>| {
        let mut pending = m.pending.clone();
        let (a, p) = pending.remove(j);
        let Term::Matchable(x) = p else { unreachable!() };
        (x, a, pending)
    };
    match tag {
        PsTag::Shared(t) => contract_shared_pair(m, j, t, DecomposeOrder::InPlace),
        PsTag::PartialBind => {
            let (x, a, pending) = bind(m);
            let TauMatch::Used(mut tau) = m.record.clone() else { return None };
            let mut s = Subst::new();
            s.insert(x.clone(), a);
            tau.insert(x);
            Some(Term::matching(substitute(&m.body, &s), m.binders.clone(), TauMatch::Used(tau), pending))
        }
        PsTag::NonLinearFail => {
            let (_, _, pending) = bind(m);
            Some(Term::matching(m.body.clone(), m.binders.clone(), TauMatch::Fail, pending))
        }
        PsTag::ResolveUsed | PsTag::ResolveUsedMismatch => None,
    }
}

/// `b⟨θ;σ;Δ⟩ ↦ b^σ⟨θ;dom σ;Δ⟩`, recursively; failed matchings keep `⊥`.
pub fn translate(t: &Term) -> PTerm {
    match t {
        Term::Var(x) => Term::Var(x.clone()),
        Term::Matchable(x) => Term::Matchable(x.clone()),
        Term::App(f, a) => Term::app(translate(f), translate(a)),
        Term::SApp(f, a) => Term::sapp(translate(f), translate(a)),
        Term::Case(c) => Term::case(c.binders.clone(), translate(&c.pattern), translate(&c.body)),
        Term::Matching(m) => {
            let pending = m.pending.iter().map(|(a, p)| (translate(a), translate(p))).collect();
            let body = translate(&m.body);
            let (body, record) = match &m.record {
                DecidedMatch::Fail => (body, TauMatch::Fail),
                DecidedMatch::Subst(s) => {
                    let s: Subst<TauMatch> = s.iter().map(|(k, v)| (k.clone(), translate(v))).collect();
                    (substitute(&body, &s), TauMatch::Used(s.keys().cloned().collect()))
                }
            };
            Term::matching(body, m.binders.clone(), record, pending)
        }
    }
}

/// Replace every failed matching by `⊥`. A failed matching can only
/// resolve to `⊥`, but the two calculi may reach it with different bodies.
pub fn fail_collapse(t: &PTerm, bottom: &Bottom) -> PTerm {
    match t {
        Term::Var(_) | Term::Matchable(_) => t.clone(),
        Term::App(f, a) => Term::app(fail_collapse(f, bottom), fail_collapse(a, bottom)),
        Term::SApp(f, a) => Term::sapp(fail_collapse(f, bottom), fail_collapse(a, bottom)),
        Term::Case(c) => Term::case(c.binders.clone(), fail_collapse(&c.pattern, bottom), fail_collapse(&c.body, bottom)),
        Term::Matching(m) if m.record.is_fail() => bottom.as_record(),
        Term::Matching(m) => Term::matching(
            fail_collapse(&m.body, bottom),
            m.binders.clone(),
            m.record.clone(),
            m.pending
                .iter()
                .map(|(a, p)| (fail_collapse(a, bottom), fail_collapse(p, bottom)))
                .collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{em_redexes, em_step};
    use crate::subst::alpha_equiv;
    use crate::syntax::{parse, parse_with};

    fn pp(s: &str) -> PTerm {
        parse_with(s, &Bottom::default()).unwrap()
    }

    fn step_tag(t: &PTerm, tag: PsTag, bot: &Bottom) -> PTerm {
        let r = ps_redexes(t)
            .into_iter()
            .find(|r| r.tag == tag)
            .unwrap_or_else(|| panic!("no {tag} redex in {t}"));
        ps_step(t, &r, bot).unwrap()
    }

    #[test]
    fn record_syntax_round_trips() {
        for src in ["b[x; {x}; (t ~ z)]", "b[x, y; #fail; ]", "b[; {}; (^c ~ ^c)]"] {
            let t = pp(src);
            assert_eq!(pp(&t.to_string()), t);
        }
    }

    #[test]
    fn internal_matching_gets_solved() {
        use RuleTag::*;
        let bot = Bottom::default();
        let mut t = translate(&parse("([x] ^x z -> ([] x -> b) ^c) (^c t)").unwrap());
        let script = [
            PsTag::Shared(InitB),
            PsTag::Shared(InitB),
            PsTag::Shared(StructHat),
            PsTag::Shared(StructHat),
            PsTag::Shared(MatchDecompose),
            PsTag::PartialBind,
        ];
        for tag in script {
            t = step_tag(&t, tag, &bot);
        }
        assert!(alpha_equiv(&t, &pp("b[; {}; (^c ~ ^c)][x; {x}; (t ~ z)]")));
        t = step_tag(&t, PsTag::Shared(MatchConst), &bot);
        t = step_tag(&t, PsTag::ResolveUsed, &bot);
        assert!(alpha_equiv(&t, &pp("b[x; {x}; (t ~ z)]")));
        assert!(ps_redexes(&t).is_empty());
    }

    #[test]
    fn resolution_rules() {
        let bot = Bottom::default();
        let t = pp("b[x; {}; ]");
        assert_eq!(ps_redexes(&t)[0].tag, PsTag::ResolveUsedMismatch);
        assert!(alpha_equiv(&ps_step(&t, &ps_redexes(&t)[0], &bot).unwrap(), &bot.as_record()));
        let t = pp("b[x; #fail; (^c ~ ^x)]");
        assert_eq!(ps_redexes(&t)[0].tag, PsTag::Shared(RuleTag::ResolveFail));
        let t = pp("b[x; {x}; ]");
        assert_eq!(ps_step(&t, &ps_redexes(&t)[0], &bot).unwrap(), pp("b"));
    }

    #[test]
    fn second_use_of_a_name_fails() {
        let bot = Bottom::default();
        let mut t = pp("x[x; {}; (^c ~ ^x), (^d ~ ^x)]");
        t = step_tag(&t, PsTag::PartialBind, &bot);
        assert!(alpha_equiv(&t, &pp("^c[x; {x}; (^d ~ ^x)]")));
        t = step_tag(&t, PsTag::NonLinearFail, &bot);
        t = step_tag(&t, PsTag::Shared(RuleTag::ResolveFail), &bot);
        assert!(alpha_equiv(&t, &bot.as_record()));
    }

    #[test]
    fn translation() {
        let t = parse("(x y)[x; {x := ^c}; (t ~ z)]").unwrap();
        assert!(alpha_equiv(&translate(&t), &pp("(^c y)[x; {x}; (t ~ z)]")));
        let pure = parse("([x] ^c ^x -> x) (^c t)").unwrap();
        assert_eq!(translate(&pure), pure.cast_pure().unwrap());
        let failed = parse("x[x; #fail; (t ~ ^x)]").unwrap();
        assert_eq!(translate(&failed), pp("x[x; #fail; (t ~ ^x)]"));
    }

    #[test]
    fn em_steps_map_to_variant_steps() {
        let bot = Bottom::default();
        let t = parse("([x] ^c ^x -> x x) (^c t)").unwrap();
        let mut cur = t;
        while let Some(r) = em_redexes(&cur).into_iter().next() {
            let next = em_step(&cur, &r, &bot).unwrap();
            let from = translate(&cur);
            let want = translate(&next);
            let ok = ps_redexes(&from)
                .into_iter()
                .filter(|q| PsTag::counterparts(r.tag).contains(&q.tag))
                .any(|q| alpha_equiv(&fail_collapse(&ps_step(&from, &q, &bot).unwrap(), &bot), &fail_collapse(&want, &bot)));
            assert!(ok, "{} --{}--> {}", cur, r.tag, next);
            cur = next;
        }
    }
}
