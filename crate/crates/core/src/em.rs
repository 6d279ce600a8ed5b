//! The explicit-matching calculus: initialisation, structural application,
//! matching and resolution rules, plus the operations defined on top of
//! them (forgetful map, well-formedness, `→p` normalisation, purification
//! and the semantics of a matching).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::free::free_names;
use crate::name::Name;
use crate::outcome::{disjoint_union_decided, union_all, MatchOutcome};
use crate::ppc::compound_match;
use crate::subst::{alpha_key, canonicalize, substitute};
use crate::term::{Bottom, DecidedMatch, Delta, Matching, Path, Record, Subst, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleTag {
    InitB,
    StructHat,
    StructBullet,
    MatchBind,
    MatchConst,
    MatchDecompose,
    FailConstMismatch,
    FailSAppVsConst,
    FailCaseVsConst,
    FailConstVsSApp,
    FailCaseVsSApp,
    FailCasePattern,
    ResolveSubst,
    ResolveDomMismatch,
    ResolveFail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Init,
    Struct,
    Match,
    Resolve,
}

impl RuleTag {
    pub const ALL: [RuleTag; 15] = [
        RuleTag::InitB,
        RuleTag::StructHat,
        RuleTag::StructBullet,
        RuleTag::MatchBind,
        RuleTag::MatchConst,
        RuleTag::MatchDecompose,
        RuleTag::FailConstMismatch,
        RuleTag::FailSAppVsConst,
        RuleTag::FailCaseVsConst,
        RuleTag::FailConstVsSApp,
        RuleTag::FailCaseVsSApp,
        RuleTag::FailCasePattern,
        RuleTag::ResolveSubst,
        RuleTag::ResolveDomMismatch,
        RuleTag::ResolveFail,
    ];

    pub fn family(self) -> Family {
        use RuleTag::*;
        match self {
            InitB => Family::Init,
            StructHat | StructBullet => Family::Struct,
            ResolveSubst | ResolveDomMismatch | ResolveFail => Family::Resolve,
            _ => Family::Match,
        }
    }

    /// Member of `→p`, i.e. anything but initialisation.
    pub fn is_p(self) -> bool {
        self != RuleTag::InitB
    }

    /// Rules acting on one pending pair; their redex path ends at the
    /// pair's argument slot.
    pub fn is_pair_rule(self) -> bool {
        self.family() == Family::Match
    }

    /// One of the six failure rules.
    pub fn is_fail(self) -> bool {
        use RuleTag::*;
        matches!(
            self,
            FailConstMismatch | FailSAppVsConst | FailCaseVsConst | FailConstVsSApp | FailCaseVsSApp | FailCasePattern
        )
    }

    pub fn name(self) -> &'static str {
        use RuleTag::*;
        match self {
            InitB => "InitB",
            StructHat => "StructHat",
            StructBullet => "StructBullet",
            MatchBind => "MatchBind",
            MatchConst => "MatchConst",
            MatchDecompose => "MatchDecompose",
            FailConstMismatch => "FailConstMismatch",
            FailSAppVsConst => "FailSAppVsConst",
            FailCaseVsConst => "FailCaseVsConst",
            FailConstVsSApp => "FailConstVsSApp",
            FailCaseVsSApp => "FailCaseVsSApp",
            FailCasePattern => "FailCasePattern",
            ResolveSubst => "ResolveSubst",
            ResolveDomMismatch => "ResolveDomMismatch",
            ResolveFail => "ResolveFail",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule {0}")]
pub struct UnknownRule(pub String);

impl FromStr for RuleTag {
    type Err = UnknownRule;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// A rule applicable at a position. Pair rules are addressed by the
/// argument slot of the pair inside its matching.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Redex<T = RuleTag> {
    pub path: Path,
    pub tag: T,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no {tag} redex at {path:?}")]
    NotARedex { path: Path, tag: String },
}

/// `d ::= x̂ | t•t`, `m ::= d | case`
pub fn is_matchable_form<M: Record>(t: &Term<M>) -> bool {
    matches!(t, Term::Matchable(_) | Term::SApp(..) | Term::Case(_))
}

/// How a pending pair can be consumed, independently of the record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PairClass {
    /// Pattern `x̂` with `x ∈ θ` and `fn(a) ∩ θ = ∅`.
    Bind(Name),
    /// Pattern `x̂` with `x ∈ θ`, but a bound name occurs free in the argument.
    BindBlocked(Name),
    Rule(RuleTag),
    None,
}

pub(crate) fn classify_pair<M: Record>(binders: &[Name], a: &Term<M>, p: &Term<M>) -> PairClass {
    use RuleTag::*;
    match p {
        Term::Matchable(x) if binders.contains(x) => {
            if free_names(a).iter().any(|n| binders.contains(n)) {
                PairClass::BindBlocked(x.clone())
            } else {
                PairClass::Bind(x.clone())
            }
        }
        Term::Matchable(x) => match a {
            Term::Matchable(y) if y == x => PairClass::Rule(MatchConst),
            Term::Matchable(_) => PairClass::Rule(FailConstMismatch),
            Term::SApp(..) => PairClass::Rule(FailSAppVsConst),
            Term::Case(_) => PairClass::Rule(FailCaseVsConst),
            _ => PairClass::None,
        },
        Term::SApp(..) => match a {
            Term::SApp(..) => PairClass::Rule(MatchDecompose),
            Term::Matchable(_) => PairClass::Rule(FailConstVsSApp),
            Term::Case(_) => PairClass::Rule(FailCaseVsSApp),
            _ => PairClass::None,
        },
        Term::Case(_) if is_matchable_form(a) => PairClass::Rule(FailCasePattern),
        _ => PairClass::None,
    }
}

/// Rule for an application node, decided by its function.
pub(crate) fn app_rule<M: Record>(f: &Term<M>) -> Option<RuleTag> {
    match f {
        Term::Case(_) => Some(RuleTag::InitB),
        Term::Matchable(_) => Some(RuleTag::StructHat),
        Term::SApp(..) => Some(RuleTag::StructBullet),
        _ => None,
    }
}

/// Matching-level rules of one calculus; everything else is shared.
pub(crate) trait MatchingRules<M: Record> {
    type Tag: Copy + Eq;
    fn shared(&self, tag: RuleTag) -> Self::Tag;
    fn resolution(&self, m: &Matching<M>) -> Option<Self::Tag>;
    fn pair(&self, m: &Matching<M>, j: usize) -> Option<Self::Tag>;
}

/// All redexes in pre-order: a node's own rules before its children; at a
/// matching, resolution first, then each pair's rule just before the
/// pair's argument.
pub(crate) fn enumerate<M: Record, R: MatchingRules<M>>(t: &Term<M>, rules: &R) -> Vec<Redex<R::Tag>> {
    fn go<M: Record, R: MatchingRules<M>>(t: &Term<M>, rules: &R, path: &mut Path, out: &mut Vec<Redex<R::Tag>>) {
        fn visit<M: Record, R: MatchingRules<M>>(
            slot: usize,
            c: &Term<M>,
            rules: &R,
            path: &mut Path,
            out: &mut Vec<Redex<R::Tag>>,
        ) {
            path.push(slot);
            go(c, rules, path, out);
            path.pop();
        }
        match t {
            Term::Var(_) | Term::Matchable(_) => {}
            Term::App(f, a) => {
                if let Some(tag) = app_rule(f) {
                    out.push(Redex { path: path.clone(), tag: rules.shared(tag) });
                }
                visit(0, f, rules, path, out);
                visit(1, a, rules, path, out);
            }
            Term::SApp(f, a) => {
                visit(0, f, rules, path, out);
                visit(1, a, rules, path, out);
            }
            Term::Case(c) => {
                visit(0, &c.pattern, rules, path, out);
                visit(1, &c.body, rules, path, out);
            }
            Term::Matching(m) => {
                if let Some(tag) = rules.resolution(m) {
                    out.push(Redex { path: path.clone(), tag });
                }
                visit(0, &m.body, rules, path, out);
                for (i, v) in m.record.terms().into_iter().enumerate() {
                    visit(1 + i, v, rules, path, out);
                }
                for (j, (a, p)) in m.pending.iter().enumerate() {
                    let slot = m.arg_slot(j);
                    if let Some(tag) = rules.pair(m, j) {
                        let mut at = path.clone();
                        at.push(slot);
                        out.push(Redex { path: at, tag });
                    }
                    visit(slot, a, rules, path, out);
                    visit(slot + 1, p, rules, path, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, rules, &mut Vec::new(), &mut out);
    out
}

/// Where a redex lives: the node itself, or a matching and one of its pairs.
pub(crate) enum Site {
    Node(Path),
    Pair(Path, usize),
}

pub(crate) fn site<M: Record>(t: &Term<M>, path: &[usize], pair_rule: bool) -> Option<Site> {
    if !pair_rule {
        t.at(path)?;
        return Some(Site::Node(path.to_vec()));
    }
    let (&slot, parent) = path.split_last()?;
    let Term::Matching(m) = t.at(parent)? else { return None };
    Some(Site::Pair(parent.to_vec(), m.pair_of_arg_slot(slot)?))
}

/// Shared contractions: initialisation and structural application.
pub(crate) fn contract_app<M: Record>(node: &Term<M>, tag: RuleTag) -> Option<Term<M>> {
    let Term::App(f, a) = node else { return None };
    match (tag, &**f) {
        (RuleTag::InitB, Term::Case(c)) => Some(Term::matching(
            c.body.clone(),
            c.binders.clone(),
            M::empty(),
            vec![((**a).clone(), c.pattern.clone())],
        )),
        (RuleTag::StructHat, Term::Matchable(_)) | (RuleTag::StructBullet, Term::SApp(..)) => {
            Some(Term::SApp(f.clone(), a.clone()))
        }
        _ => None,
    }
}

/// Where decomposition puts the two new pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecomposeOrder {
    /// In place of the decomposed pair (list reading of `(a1,p1)(a2,p2)Δ`).
    #[default]
    InPlace,
    /// At the tail of the list.
    Append,
}

/// Shared pair contractions: the record is left to the caller except for
/// failures, which always record `⊥`.
pub(crate) fn contract_shared_pair<M: Record>(
    m: &Matching<M>,
    j: usize,
    tag: RuleTag,
    order: DecomposeOrder,
) -> Option<Term<M>> {
    let mut pending = m.pending.clone();
    let (a, p) = pending.remove(j);
    let record = match tag {
        RuleTag::MatchConst => m.record.clone(),
        RuleTag::MatchDecompose => {
            let (Term::SApp(a1, a2), Term::SApp(p1, p2)) = (&a, &p) else { return None };
            let new = [((**a1).clone(), (**p1).clone()), ((**a2).clone(), (**p2).clone())];
            match order {
                DecomposeOrder::InPlace => {
                    pending.splice(j..j, new);
                }
                DecomposeOrder::Append => pending.extend(new),
            }
            m.record.clone()
        }
        t if t.is_fail() => M::fail(),
        _ => return None,
    };
    Some(Term::matching(m.body.clone(), m.binders.clone(), record, pending))
}

pub(crate) fn same_names(a: &[Name], b: &[Name]) -> bool {
    let x: HashSet<&Name> = a.iter().collect();
    let y: HashSet<&Name> = b.iter().collect();
    x == y
}

struct EmRules;

impl MatchingRules<DecidedMatch> for EmRules {
    type Tag = RuleTag;

    fn shared(&self, tag: RuleTag) -> RuleTag {
        tag
    }

    fn resolution(&self, m: &Matching<DecidedMatch>) -> Option<RuleTag> {
        match &m.record {
            DecidedMatch::Fail => Some(RuleTag::ResolveFail),
            DecidedMatch::Subst(s) if m.pending.is_empty() => {
                let dom: Vec<Name> = s.keys().cloned().collect();
                Some(if same_names(&dom, &m.binders) {
                    RuleTag::ResolveSubst
                } else {
                    RuleTag::ResolveDomMismatch
                })
            }
            _ => None,
        }
    }

    fn pair(&self, m: &Matching<DecidedMatch>, j: usize) -> Option<RuleTag> {
        let (a, p) = &m.pending[j];
        match classify_pair(&m.binders, a, p) {
            PairClass::Bind(_) => Some(RuleTag::MatchBind),
            PairClass::Rule(tag) => Some(tag),
            PairClass::BindBlocked(_) | PairClass::None => None,
        }
    }
}

/// Every redex of the full relation, in pre-order.
pub fn em_redexes(t: &Term) -> Vec<Redex> {
    enumerate(t, &EmRules)
}

/// Every `→p` redex, in pre-order.
pub fn p_redexes(t: &Term) -> Vec<Redex> {
    em_redexes(t).into_iter().filter(|r| r.tag.is_p()).collect()
}

/// The rule admissible for pair `j` of a matching, if any.
pub fn pair_rule(m: &Matching, j: usize) -> Option<RuleTag> {
    EmRules.pair(m, j)
}

/// The resolution rule admissible at a matching, if any.
pub fn resolution_rule(m: &Matching) -> Option<RuleTag> {
    EmRules.resolution(m)
}

pub fn em_step(t: &Term, r: &Redex, bottom: &Bottom) -> Result<Term, StepError> {
    em_step_ordered(t, r, bottom, DecomposeOrder::InPlace)
}

pub fn em_step_ordered(t: &Term, r: &Redex, bottom: &Bottom, order: DecomposeOrder) -> Result<Term, StepError> {
    let err = || StepError::NotARedex {
        path: r.path.clone(),
        tag: r.tag.to_string(),
    };
    let site = site(t, &r.path, r.tag.is_pair_rule()).ok_or_else(err)?;
    let out = match site {
        Site::Node(path) => t.replace_at(&path, |node| contract_node(node, r.tag, bottom).ok_or_else(err)),
        Site::Pair(path, j) => t.replace_at(&path, |node| {
            let Term::Matching(m) = node else { return Err(err()) };
            if pair_rule(m, j) != Some(r.tag) {
                return Err(err());
            }
            contract_pair(m, j, r.tag, order).ok_or_else(err)
        }),
    };
    Ok(canonicalize(&out.ok_or_else(err)??))
}

fn contract_node(node: &Term, tag: RuleTag, bottom: &Bottom) -> Option<Term> {
    match (tag.family(), node) {
        (Family::Init | Family::Struct, _) => contract_app(node, tag),
        (Family::Resolve, Term::Matching(m)) => {
            if resolution_rule(m) != Some(tag) {
                return None;
            }
            Some(match &m.record {
                DecidedMatch::Subst(s) if tag == RuleTag::ResolveSubst => substitute(&m.body, s),
                _ => bottom.term().clone(),
            })
        }
        _ => None,
    }
}

fn contract_pair(m: &Matching, j: usize, tag: RuleTag, order: DecomposeOrder) -> Option<Term> {
    if tag != RuleTag::MatchBind {
        return contract_shared_pair(m, j, tag, order);
    }
    let mut pending = m.pending.clone();
    let (a, p) = pending.remove(j);
    let Term::Matchable(x) = p else { return None };
    let mut single = Subst::new();
    single.insert(x, a);
    let record = disjoint_union_decided(m.record.clone(), DecidedMatch::Subst(single));
    Some(Term::matching(m.body.clone(), m.binders.clone(), record, pending))
}

/// `⌈·⌉`: structural applications become functional ones; matchings are
/// kept and forgotten componentwise.
pub fn forget(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Matchable(_) => t.clone(),
        Term::App(f, a) | Term::SApp(f, a) => Term::app(forget(f), forget(a)),
        Term::Case(c) => Term::case(c.binders.clone(), forget(&c.pattern), forget(&c.body)),
        Term::Matching(m) => Term::matching(
            forget(&m.body),
            m.binders.clone(),
            forget_record(&m.record),
            m.pending.iter().map(|(a, p)| (forget(a), forget(p))).collect(),
        ),
    }
}

pub fn forget_record(r: &DecidedMatch) -> DecidedMatch {
    match r {
        DecidedMatch::Fail => DecidedMatch::Fail,
        DecidedMatch::Subst(s) => DecidedMatch::Subst(s.iter().map(|(k, v)| (k.clone(), forget(v))).collect()),
    }
}

/// Every structural application is headed by a matchable or by another
/// structural application.
pub fn is_well_formed(t: &Term) -> bool {
    match t {
        Term::SApp(f, _) if !matches!(**f, Term::Matchable(_) | Term::SApp(..)) => false,
        _ => t.children().into_iter().all(is_well_formed),
    }
}

/// Decide `⌈t⌉ →•* t` by exhaustive search. Exponential in the number of
/// applications; meant for small terms.
pub fn well_formed_by_search(t: &Term, bottom: &Bottom) -> bool {
    let goal = alpha_key(t);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([forget(t)]);
    while let Some(cur) = queue.pop_front() {
        let key = alpha_key(&cur);
        if key == goal {
            return true;
        }
        if !seen.insert(key) {
            continue;
        }
        for r in em_redexes(&cur) {
            if r.tag.family() == Family::Struct {
                queue.push_back(em_step(&cur, &r, bottom).expect("listed redex"));
            }
        }
    }
    false
}

/// The `→p` normal form, always contracting the first `→p` redex.
/// `observe` sees every step as `(before, redex, after)`.
pub fn normalize_p_with(t: &Term, bottom: &Bottom, mut observe: impl FnMut(&Term, &Redex, &Term)) -> Term {
    let mut cur = canonicalize(t);
    while let Some(r) = p_redexes(&cur).into_iter().next() {
        let next = em_step(&cur, &r, bottom).expect("listed redex");
        observe(&cur, &r, &next);
        cur = next;
    }
    cur
}

pub fn normalize_p(t: &Term, bottom: &Bottom) -> Term {
    normalize_p_with(t, bottom, |_, _, _| {})
}

/// `t↓ = ⌈normalize_p(t)⌉`, with whether it is pure (no matching left).
pub fn purify(t: &Term, bottom: &Bottom) -> (Term, bool) {
    let out = forget(&normalize_p(t, bottom));
    let pure = out.is_pure();
    (out, pure)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the semantics is only defined on matchings without nested matchings")]
pub struct NestedMatching;

/// `⟦μ;Δ⟧ = ⌈μ⌉ ⊎ ⊎_{(a,p)∈Δ} {⌈a⌉ /θ ⌈p⌉}`, folded as a multiset.
pub fn matching_semantics(theta: &[Name], mu: &DecidedMatch, delta: &Delta) -> Result<MatchOutcome, NestedMatching> {
    let nested = mu.terms().into_iter().any(Term::contains_matching)
        || delta.iter().any(|(a, p)| a.contains_matching() || p.contains_matching());
    if nested {
        return Err(NestedMatching);
    }
    let parts = std::iter::once(forget_record(mu).into()).chain(
        delta
            .iter()
            .map(|(a, p)| compound_match(&forget(a), &forget(p), theta)),
    );
    Ok(union_all(parts))
}

/// Why a matching of a term cannot make progress.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StuckReason {
    /// The pattern is neither a matchable form nor reducible here.
    PatternNotMatchable,
    /// The pattern is a matchable form but the argument is not.
    ArgumentNotMatchable,
    /// Binding `x` is blocked: a name bound by the matching occurs free in
    /// the argument.
    BoundNameInArgument(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stuck {
    /// Path of the matching.
    pub path: Path,
    pub pair: usize,
    pub reason: StuckReason,
}

/// Pending pairs with no applicable rule, for diagnostics.
pub fn stuck_pairs(t: &Term) -> Vec<Stuck> {
    fn go(t: &Term, path: &mut Path, out: &mut Vec<Stuck>) {
        if let Term::Matching(m) = t {
            for (j, (a, p)) in m.pending.iter().enumerate() {
                let reason = match classify_pair(&m.binders, a, p) {
                    PairClass::BindBlocked(_) => {
                        let names: Vec<String> = free_names(a)
                            .into_iter()
                            .filter(|n| m.binders.contains(n))
                            .map(|n| n.to_string())
                            .collect();
                        Some(StuckReason::BoundNameInArgument(names.join(", ")))
                    }
                    PairClass::None if !is_matchable_form(p) => Some(StuckReason::PatternNotMatchable),
                    PairClass::None => Some(StuckReason::ArgumentNotMatchable),
                    _ => None,
                };
                if let Some(reason) = reason {
                    out.push(Stuck { path: path.clone(), pair: j, reason });
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
    go(t, &mut Vec::new(), &mut out);
    out
}
