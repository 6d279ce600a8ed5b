use ppcem::em::forget;
use ppcem::em::RuleTag::{self, *};
use ppcem::strategy::{run, run_ppc, strategy_by_name, DfLr, MatchingDriven, Verdict};
use ppcem::subst::alpha_equiv;
use ppcem::{parse, Bottom, Term};

fn p(s: &str) -> Term {
    parse(s).unwrap()
}

#[test]
fn df_lr_trace_is_frozen() {
    let r = run(&p("([x] ^c ^x -> x) (^c ^y)"), &DfLr, 100, &Bottom::default());
    let got: Vec<(RuleTag, Vec<usize>)> = r.trace.iter().map(|s| (s.rule, s.path.clone())).collect();
    let want = vec![
        (InitB, vec![]),
        (StructHat, vec![1]),
        (StructHat, vec![2]),
        (MatchDecompose, vec![1]),
        (MatchConst, vec![1]),
        (MatchBind, vec![1]),
        (ResolveSubst, vec![]),
    ];
    assert_eq!(got, want);
    assert_eq!(r.result, p("^y"));
    assert_eq!(r.verdict, Verdict::NormalForm);
}

#[test]
fn strategies_agree_on_a_decided_match() {
    let bot = Bottom::default();
    let t = p("([x, y] ^c ^x ^y -> y x) (^c ^d ^e)");
    for name in ["full", "df-lr", "df-reordered", "matching-driven"] {
        let r = run(&t, strategy_by_name(name).unwrap(), 100, &bot);
        // →• may also fire on the result, so compare modulo bullets
        assert!(alpha_equiv(&forget(&r.result), &p("^e ^d")), "{name}: {}", r.result);
    }
    let ppc = run_ppc(&t, 10, &bot);
    assert_eq!(ppc.trace.len(), 1);
    assert!(alpha_equiv(&ppc.result, &p("^e ^d")));
}

#[test]
fn matching_driven_reduces_the_argument_only_on_demand() {
    let bot = Bottom::default();
    // the argument's own redex is never touched: the pattern fails first
    let t = p("([x] ^c ^x -> x) (^d (([y] ^y -> y) ^e))");
    let r = run(&t, &MatchingDriven, 100, &bot);
    assert!(alpha_equiv(&r.result, bot.term()));
    let rules: Vec<RuleTag> = r.trace.iter().map(|s| s.rule).collect();
    assert_eq!(rules, [InitB, StructHat, StructHat, MatchDecompose, FailConstMismatch, ResolveFail]);
}

#[test]
fn failing_match_ends_in_bottom() {
    let bot = Bottom::default();
    let r = run(&p("([x] ^c ^x -> x) (^d ^e)"), &DfLr, 100, &bot);
    assert!(alpha_equiv(&r.result, bot.term()));
    assert_eq!(r.trace.last().unwrap().rule, ResolveFail);
}
