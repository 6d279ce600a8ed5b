//! Redex-selection policies and the reduction driver.

use std::fmt;

use serde_json::{json, Value};

use crate::em::{app_rule, em_redexes, em_step_ordered, is_matchable_form, pair_rule, resolution_rule, DecomposeOrder, Redex, StepError};
use crate::partial::{ps_redexes, ps_step, PTerm, PsTag, TauMatch};
use crate::ppc::{ppc_redexes, ppc_step};
use crate::subst::canonicalize;
use crate::syntax::RecordSyntax;
use crate::term::{Bottom, DecidedMatch, Path, Record, Term};

pub trait Strategy: Sync {
    fn name(&self) -> &'static str;
    /// Redexes the policy allows, in preference order.
    fn admissible(&self, t: &Term) -> Vec<Redex>;
    fn decompose_order(&self) -> DecomposeOrder {
        DecomposeOrder::InPlace
    }
    fn select(&self, t: &Term) -> Option<Redex> {
        self.admissible(t).into_iter().next()
    }
}

/// The unrestricted relation; picks the first redex in pre-order.
pub struct Full;

/// `Δ` read as a list: pair rules act on the head only.
pub struct DfLr;

/// As [`DfLr`], but decomposition appends its two pairs.
pub struct DfReordered;

/// Weak, matching-driven reduction: root rules, the function of an
/// application, and inside the head pair of a matching.
pub struct MatchingDriven;

pub const STRATEGY_NAMES: [&str; 4] = ["full", "df-lr", "df-reordered", "matching-driven"];

pub fn strategy_by_name(name: &str) -> Option<&'static dyn Strategy> {
    match name {
        "full" => Some(&Full),
        "df-lr" => Some(&DfLr),
        "df-reordered" => Some(&DfReordered),
        "matching-driven" => Some(&MatchingDriven),
        _ => None,
    }
}

impl Strategy for Full {
    fn name(&self) -> &'static str {
        "full"
    }
    fn admissible(&self, t: &Term) -> Vec<Redex> {
        em_redexes(t)
    }
}

/// Whether a pair rule addresses the head pair of its matching.
fn on_head_pair(t: &Term, r: &Redex) -> bool {
    if !r.tag.is_pair_rule() {
        return true;
    }
    let (&slot, parent) = r.path.split_last().expect("pair rules sit below a matching");
    match t.at(parent) {
        Some(Term::Matching(m)) => m.pair_of_arg_slot(slot) == Some(0),
        _ => false,
    }
}

impl Strategy for DfLr {
    fn name(&self) -> &'static str {
        "df-lr"
    }
    fn admissible(&self, t: &Term) -> Vec<Redex> {
        em_redexes(t).into_iter().filter(|r| on_head_pair(t, r)).collect()
    }
}

impl Strategy for DfReordered {
    fn name(&self) -> &'static str {
        "df-reordered"
    }
    fn admissible(&self, t: &Term) -> Vec<Redex> {
        DfLr.admissible(t)
    }
    fn decompose_order(&self) -> DecomposeOrder {
        DecomposeOrder::Append
    }
}

impl Strategy for MatchingDriven {
    fn name(&self) -> &'static str {
        "matching-driven"
    }
    fn admissible(&self, t: &Term) -> Vec<Redex> {
        let mut out = Vec::new();
        driven(t, &mut Vec::new(), &mut out);
        out
    }
}

fn driven(t: &Term, path: &mut Path, out: &mut Vec<Redex>) {
    let mut under = |slot: usize, c: &Term, out: &mut Vec<Redex>| {
        path.push(slot);
        driven(c, path, out);
        path.pop();
    };
    match t {
        Term::App(f, _) => match app_rule(f) {
            // a case in function position is initialised at once
            Some(tag) => out.push(Redex { path: path.clone(), tag }),
            None => under(0, f, out),
        },
        Term::Matching(m) => {
            if let Some(tag) = resolution_rule(m) {
                out.push(Redex { path: path.clone(), tag });
                return;
            }
            let Some((a, p)) = m.pending.first() else { return };
            let slot = m.arg_slot(0);
            if !is_matchable_form(p) {
                under(slot + 1, p, out);
            } else if let Some(tag) = pair_rule(m, 0) {
                let mut at = path.clone();
                at.push(slot);
                out.push(Redex { path: at, tag });
            } else if matches!(p, Term::SApp(..)) || matches!(p, Term::Matchable(x) if !m.binds(x)) {
                under(slot, a, out);
            }
        }
        _ => {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NormalForm,
    BudgetExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NormalForm => "normal-form",
            Verdict::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Clone)]
pub struct TraceStep<T, M: Record = DecidedMatch> {
    pub path: Path,
    pub rule: T,
    pub term: Term<M>,
}

#[derive(Clone)]
pub struct Run<T, M: Record = DecidedMatch> {
    pub initial: Term<M>,
    pub result: Term<M>,
    pub trace: Vec<TraceStep<T, M>>,
    pub verdict: Verdict,
}

impl<T: fmt::Display, M: RecordSyntax> Run<T, M> {
    /// `[{step, path, rule, term}, …]`, steps numbered from 1.
    pub fn trace_json(&self) -> Value {
        Value::Array(
            self.trace
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "step": i + 1,
                        "path": s.path,
                        "rule": s.rule.to_string(),
                        "term": s.term.to_string(),
                    })
                })
                .collect(),
        )
    }

    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.trace.iter().enumerate() {
            out.push_str(&format!("{:>4}  {:<20} {:<12} {}\n", i + 1, s.rule.to_string(), format!("{:?}", s.path), s.term));
        }
        out
    }
}

/// Drive `step` with `select` from the canonical form of `t`.
pub fn run_with<T: Clone, M: Record>(
    t: &Term<M>,
    max_steps: usize,
    mut select: impl FnMut(&Term<M>) -> Option<Redex<T>>,
    mut step: impl FnMut(&Term<M>, &Redex<T>) -> Term<M>,
) -> Run<T, M> {
    let initial = canonicalize(t);
    let mut cur = initial.clone();
    let mut trace = Vec::new();
    loop {
        let Some(r) = select(&cur) else {
            return Run { initial, result: cur, trace, verdict: Verdict::NormalForm };
        };
        if trace.len() == max_steps {
            return Run { initial, result: cur, trace, verdict: Verdict::BudgetExhausted };
        }
        cur = step(&cur, &r);
        trace.push(TraceStep { path: r.path, rule: r.tag, term: cur.clone() });
    }
}

pub fn run(t: &Term, strategy: &dyn Strategy, max_steps: usize, bottom: &Bottom) -> Run<crate::em::RuleTag> {
    let order = strategy.decompose_order();
    run_with(
        t,
        max_steps,
        |u| strategy.select(u),
        |u, r| em_step_ordered(u, r, bottom, order).expect("strategies select listed redexes"),
    )
}

/// The single rule of the implicit calculus, for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BetaM;

impl fmt::Display for BetaM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BetaM")
    }
}

/// Leftmost-outermost reduction in the implicit calculus.
pub fn run_ppc(t: &Term, max_steps: usize, bottom: &Bottom) -> Run<BetaM> {
    run_with(
        t,
        max_steps,
        |u| ppc_redexes(u).into_iter().next().map(|path| Redex { path, tag: BetaM }),
        |u, r| ppc_step(u, &r.path, bottom).expect("listed redex"),
    )
}

/// First redex in pre-order of the partial-substitution variant.
pub fn run_partial(t: &PTerm, max_steps: usize, bottom: &Bottom) -> Run<PsTag, TauMatch> {
    run_with(
        t,
        max_steps,
        |u| ps_redexes(u).into_iter().next(),
        |u, r| ps_step(u, r, bottom).expect("listed redex"),
    )
}

/// Re-apply a recorded `(path, rule)` sequence.
pub fn replay(t: &Term, steps: &[Redex], order: DecomposeOrder, bottom: &Bottom) -> Result<Term, StepError> {
    steps
        .iter()
        .try_fold(canonicalize(t), |cur, r| em_step_ordered(&cur, r, bottom, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::RuleTag;
    use crate::subst::alpha_equiv;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn tags<T: Copy, M: Record>(r: &Run<T, M>) -> Vec<T> {
        r.trace.iter().map(|s| s.rule).collect()
    }

    #[test]
    fn df_lr_golden_trace() {
        use RuleTag::*;
        let bot = Bottom::default();
        let r = run(&p("([x] ^c ^x -> x) (^c ^y)"), &DfLr, 100, &bot);
        assert_eq!(r.verdict, Verdict::NormalForm);
        assert_eq!(r.result, p("^y"));
        assert_eq!(
            tags(&r),
            vec![InitB, StructHat, StructHat, MatchDecompose, MatchConst, MatchBind, ResolveSubst]
        );
        let paths: Vec<Path> = r.trace.iter().map(|s| s.path.clone()).collect();
        assert_eq!(paths, vec![vec![], vec![1], vec![2], vec![1], vec![1], vec![1], vec![]]);
    }

    #[test]
    fn normal_forms_have_empty_traces() {
        let bot = Bottom::default();
        for s in STRATEGY_NAMES {
            let r = run(&p("^c @ ^d"), strategy_by_name(s).unwrap(), 10, &bot);
            assert!(r.trace.is_empty());
            assert_eq!(r.verdict, Verdict::NormalForm);
        }
    }

    #[test]
    fn budget_is_reported() {
        let bot = Bottom::default();
        let omega = p("([x] ^x -> x x) ([x] ^x -> x x)");
        let r = run(&omega, &Full, 20, &bot);
        assert_eq!(r.verdict, Verdict::BudgetExhausted);
        assert_eq!(r.trace.len(), 20);
    }

    #[test]
    fn head_pair_decomposition() {
        let bot = Bottom::default();
        let t = p("b[x; {}; (^c @ t ~ ^c @ ^x), (^d ~ ^d)]");
        let lr = DfLr.select(&t).unwrap();
        assert_eq!(lr.tag, RuleTag::MatchDecompose);
        let a = em_step_ordered(&t, &lr, &bot, DecomposeOrder::InPlace).unwrap();
        assert_eq!(a, p("b[x; {}; (^c ~ ^c), (t ~ ^x), (^d ~ ^d)]"));
        let b = em_step_ordered(&t, &lr, &bot, DfReordered.decompose_order()).unwrap();
        assert_eq!(b, p("b[x; {}; (^d ~ ^d), (^c ~ ^c), (t ~ ^x)]"));
        assert_eq!(DfLr.select(&p("b[; {}; ]")).unwrap().tag, RuleTag::ResolveSubst);
    }

    #[test]
    fn reordering_reaches_the_same_result() {
        let bot = Bottom::default();
        let t = p("([x, y] ^c ^x (^d ^y) -> y x) (^c ^e (^d ^f))");
        let a = run(&t, &DfLr, 100, &bot);
        let b = run(&t, &DfReordered, 100, &bot);
        assert!(alpha_equiv(&a.result, &b.result));
        assert_eq!(a.result, p("^f @ ^e"));
    }

    #[test]
    fn matching_driven_choices() {
        let md = |s: &str| MatchingDriven.admissible(&p(s));
        // pattern first
        let r = md("b[x; {}; (([y] ^y -> y) ^c ~ ([z] ^z -> ^d) ^e)]");
        assert_eq!(r, vec![Redex { path: vec![2], tag: RuleTag::InitB }]);
        // argument under a structural pattern
        let r = md("b[x; {}; (^c t ~ ^c @ ^x)]");
        assert_eq!(r, vec![Redex { path: vec![1], tag: RuleTag::StructHat }]);
        // binding without evaluating the argument
        let r = md("x[x; {}; (([y] ^y -> y) ^c ~ ^x)]");
        assert_eq!(r, vec![Redex { path: vec![1], tag: RuleTag::MatchBind }]);
        // nothing under a case or a structural application
        assert!(md("[x] ^x -> ([y] ^y -> y) ^c").is_empty());
        assert!(md("^c @ (([y] ^y -> y) ^c)").is_empty());
    }

    #[test]
    fn trace_json_schema() {
        let bot = Bottom::default();
        let r = run(&p("([x] ^c ^x -> x) (^c ^d)"), &DfLr, 100, &bot);
        let j = r.trace_json();
        let first = &j[0];
        assert_eq!(first["step"], 1);
        assert_eq!(first["path"], json!([]));
        assert_eq!(first["rule"], "InitB");
        assert!(first["term"].is_string());
        assert_eq!(j.as_array().unwrap().last().unwrap()["term"], "^d");
    }

    #[test]
    fn replay_reproduces_the_result() {
        let bot = Bottom::default();
        let t = p("([x, y] ^c ^x ^y -> y x) (^c ^e (([z] ^z -> z) ^f))");
        for s in STRATEGY_NAMES {
            let st = strategy_by_name(s).unwrap();
            let r = run(&t, st, 100, &bot);
            let steps: Vec<Redex> = r.trace.iter().map(|s| Redex { path: s.path.clone(), tag: s.rule }).collect();
            assert_eq!(replay(&t, &steps, st.decompose_order(), &bot).unwrap(), r.result);
        }
    }

    #[test]
    fn other_engines() {
        let bot = Bottom::default();
        let r = run_ppc(&p("([x] ^c ^x -> x) (^c ^d)"), 10, &bot);
        assert_eq!(r.result, p("^d"));
        assert_eq!(r.trace.len(), 1);
        let r = run_ppc(&p("([x] y ^x -> x) (^c ^d)"), 10, &bot);
        assert!(r.trace.is_empty());
        let pt = crate::partial::translate(&p("([x] ^c ^x -> x) (^c ^d)"));
        let r = run_partial(&pt, 100, &bot);
        assert_eq!(r.result.to_string(), "^d");
    }
}
