//! Property suites over seeded random terms, shared by the CLI and the
//! acceptance tests. Every suite returns pass / fail / inconclusive tallies;
//! a failure is only reported when the evidence is complete.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::thread;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::em::{
    app_rule, em_redexes, em_step, forget, forget_record, is_matchable_form, matching_semantics, normalize_p_with,
    p_redexes, pair_rule, resolution_rule, Family, Redex, RuleTag,
};
use crate::gen::TermGen;
use crate::measure::Measure;
use crate::outcome::MatchOutcome;
use crate::parallel::parallel_reducts;
use crate::partial::{fail_collapse, ps_redexes, ps_step, translate, PTerm, PsTag, TauMatch};
use crate::ppc::{compound_match, ppc_redexes, ppc_step};
use crate::strategy::{run, run_ppc, DfLr, MatchingDriven, Strategy};
use crate::subst::{alpha_equiv, alpha_key};
use crate::syntax::{parse, parse_with};
use crate::term::{Bottom, Path, Term};

/// Failures kept verbatim per tally.
const KEEP: usize = 5;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
    pub inconclusive: u64,
    /// The first few failures, for the report.
    pub failures: Vec<String>,
}

impl Tally {
    pub fn total(&self) -> u64 {
        self.pass + self.fail + self.inconclusive
    }

    pub fn inconclusive_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.total() as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.fail == 0
    }

    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Pass => self.pass += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
            Outcome::Fail(msg) => {
                self.fail += 1;
                if self.failures.len() < KEEP {
                    self.failures.push(msg);
                }
            }
        }
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pass {} fail {} inconclusive {}", self.pass, self.fail, self.inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Inconclusive,
}

/// Checks the termination measure on every `→p` step it is shown.
#[derive(Default)]
pub struct Audit {
    steps: AtomicU64,
    violations: AtomicU64,
    examples: Mutex<Vec<String>>,
}

impl Audit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns whether the step is fine; non-`→p` steps are ignored.
    pub fn observe(&self, before: &Term, r: &Redex, after: &Term, bottom: &Bottom) -> bool {
        if !r.tag.is_p() {
            return true;
        }
        self.steps.fetch_add(1, Ordering::Relaxed);
        let (m0, m1) = (Measure::of(before, bottom), Measure::of(after, bottom));
        if m1 < m0 {
            return true;
        }
        self.violations.fetch_add(1, Ordering::Relaxed);
        let mut ex = self.examples.lock().unwrap();
        if ex.len() < KEEP {
            ex.push(format!("{before} --{}@{:?}--> {after}: {m0:?} to {m1:?}", r.tag, r.path));
        }
        false
    }

    pub fn steps(&self) -> u64 {
        self.steps.load(Ordering::Relaxed)
    }

    pub fn violations(&self) -> u64 {
        self.violations.load(Ordering::Relaxed)
    }

    pub fn examples(&self) -> Vec<String> {
        self.examples.lock().unwrap().clone()
    }
}

pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub bottom: Bottom,
}

impl SuiteConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        SuiteConfig { seed, count, bottom: Bottom::default() }
    }
}

fn term_seed(seed: u64, i: usize) -> u64 {
    // splitmix64 of the pair
    let mut z = seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run `check` on `count` instances, each with its own generator, spread
/// over the available cores. The tally does not depend on the sharding.
fn sharded(cfg: &SuiteConfig, check: impl Fn(&mut TermGen) -> Outcome + Sync) -> Tally {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(cfg.count.max(1));
    let check = &check;
    let mut results: Vec<(usize, Outcome)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..cfg.count)
                        .step_by(workers)
                        .map(|i| (i, check(&mut TermGen::new(term_seed(cfg.seed, i)))))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    let mut tally = Tally::default();
    for (_, o) in results {
        tally.add(o);
    }
    tally
}

fn audited_step(t: &Term, r: &Redex, bottom: &Bottom, audit: &Audit) -> Term {
    let next = em_step(t, r, bottom).expect("listed redex");
    audit.observe(t, r, &next, bottom);
    next
}

fn audited_purify(t: &Term, bottom: &Bottom, audit: &Audit) -> (Term, bool) {
    let nf = normalize_p_with(t, bottom, |a, r, b| {
        audit.observe(a, r, b, bottom);
    });
    let out = forget(&nf);
    let pure = out.is_pure();
    (out, pure)
}

// ---------------------------------------------------------------- simulation

/// An explicit-matching sequence standing for one implicit step.
pub struct Simulation {
    pub steps: Vec<Redex>,
    pub result: Term,
    /// `⌈μ⌉` just before resolution equals `{a /θ p}`.
    pub record_forgets_to_match: bool,
}

/// Innermost structural redex on the application spine of `t`, relative
/// to `t`.
fn spine_redex(t: &Term) -> Option<Redex> {
    let Term::App(f, _) = t else { return None };
    match app_rule(f) {
        Some(tag @ (RuleTag::StructHat | RuleTag::StructBullet)) => Some(Redex { path: vec![], tag }),
        Some(_) => None,
        None => spine_redex(f).map(|mut r| {
            r.path.insert(0, 0);
            r
        }),
    }
}

fn at(base: &[usize], rel: impl IntoIterator<Item = usize>) -> Path {
    base.iter().copied().chain(rel).collect()
}

/// Initialise the redex at `path`, run the created matching with matching
/// rules and the structural steps they need, then resolve it.
pub fn simulate_ppc_step(t: &Term, path: &[usize], bottom: &Bottom, audit: &Audit) -> Result<Simulation, String> {
    let Some(Term::App(f, a)) = t.at(path) else { return Err(format!("no application at {path:?}")) };
    let Term::Case(c) = &**f else { return Err(format!("no case at {path:?}")) };
    let expected = compound_match(a, &c.pattern, &c.binders);
    let mut steps = vec![Redex { path: path.to_vec(), tag: RuleTag::InitB }];
    let mut cur = audited_step(t, &steps[0], bottom, audit);
    let mut forgets = false;
    for _ in 0..100_000 {
        let Some(Term::Matching(m)) = cur.at(path) else {
            return Err(format!("matching at {path:?} vanished in {cur}"));
        };
        let next = if let Some(tag) = resolution_rule(m) {
            let mu: MatchOutcome = forget_record(&m.record).into();
            forgets = mu.alpha_eq(&expected);
            Redex { path: path.to_vec(), tag }
        } else if let Some(j) = (0..m.pending.len()).find(|&j| pair_rule(m, j).is_some()) {
            Redex { path: at(path, [m.arg_slot(j)]), tag: pair_rule(m, j).unwrap() }
        } else {
            let spine = m.pending.iter().enumerate().find_map(|(j, (a, p))| {
                let slot = m.arg_slot(j);
                if let Some(r) = spine_redex(p) {
                    return Some(Redex { path: at(path, std::iter::once(slot + 1).chain(r.path)), tag: r.tag });
                }
                if is_matchable_form(p) {
                    if let Some(r) = spine_redex(a) {
                        return Some(Redex { path: at(path, std::iter::once(slot).chain(r.path)), tag: r.tag });
                    }
                }
                None
            });
            spine.ok_or_else(|| format!("matching at {path:?} is stuck in {cur}"))?
        };
        cur = audited_step(&cur, &next, bottom, audit);
        let resolved = next.tag.family() == Family::Resolve;
        steps.push(next);
        if resolved {
            return Ok(Simulation { steps, result: cur, record_forgets_to_match: forgets });
        }
    }
    Err("schedule did not finish".into())
}

/// Every implicit step of a random pure term is matched by explicit
/// matching reaching the α-same term.
pub fn simulation(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let t = g.pure_with_redex();
        let paths = ppc_redexes(&t);
        let path = paths.choose(g.rng()).unwrap().clone();
        let target = ppc_step(&t, &path, &cfg.bottom).expect("listed redex");
        match simulate_ppc_step(&t, &path, &cfg.bottom, audit) {
            Err(e) => Outcome::Fail(format!("{t} at {path:?}: {e}")),
            Ok(s) if !s.record_forgets_to_match => {
                Outcome::Fail(format!("{t} at {path:?}: record does not forget to the compound match"))
            }
            Ok(s) if alpha_equiv(&s.result, &target) => Outcome::Pass,
            Ok(s) => Outcome::Fail(format!("{t} at {path:?}: implicit {target}, explicit {}", s.result)),
        }
    })
}

// ---------------------------------------------------------------- projection

fn projects(tp: &Term, tp2: &Term, bottom: &Bottom) -> bool {
    alpha_equiv(tp, tp2)
        || ppc_redexes(tp)
            .iter()
            .any(|q| alpha_equiv(&ppc_step(tp, q, bottom).expect("listed redex"), tp2))
}

/// Every explicit step between terms with pure purifications is zero or
/// one implicit step between the purifications.
pub fn projection(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let (t, tp) = loop {
            let t = g.reachable(8, &cfg.bottom);
            let (tp, pure) = audited_purify(&t, &cfg.bottom, audit);
            if pure {
                break (t, tp);
            }
        };
        for r in em_redexes(&t) {
            let t2 = audited_step(&t, &r, &cfg.bottom, audit);
            let (tp2, pure2) = audited_purify(&t2, &cfg.bottom, audit);
            if pure2 && !projects(&tp, &tp2, &cfg.bottom) {
                return Outcome::Fail(format!("{t} --{}@{:?}--> {t2}: purifications {tp} and {tp2}", r.tag, r.path));
            }
        }
        Outcome::Pass
    })
}

// --------------------------------------------------------------- termination

/// `→p` normalisation terminates, first-redex and random-redex, with the
/// measure decreasing on every step.
pub fn termination(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    const CAP: usize = 100_000;
    sharded(cfg, |g| {
        let t = g.any_term(&cfg.bottom);
        let before = audit.violations();
        let mut n = 0;
        let mut capped = false;
        normalize_p_with(&t, &cfg.bottom, |a, r, b| {
            n += 1;
            capped |= n > CAP;
            audit.observe(a, r, b, &cfg.bottom);
        });
        let mut cur = t.clone();
        for _ in 0..CAP {
            let rs = p_redexes(&cur);
            let Some(r) = rs.choose(g.rng()) else { break };
            cur = audited_step(&cur, r, &cfg.bottom, audit);
        }
        if capped || !p_redexes(&cur).is_empty() {
            Outcome::Fail(format!("{t}: no →p normal form within {CAP} steps"))
        } else if audit.violations() > before {
            Outcome::Fail(format!("{t}: measure did not decrease"))
        } else {
            Outcome::Pass
        }
    })
}

// ---------------------------------------------------------------- confluence

/// Breadth-first reducts of one side of a join search.
struct Side {
    seen: HashSet<Term>,
    frontier: Vec<Term>,
    depth: usize,
    capped: bool,
}

impl Side {
    fn new(t: Term) -> Self {
        Side { seen: HashSet::from([alpha_key(&t)]), frontier: vec![t], depth: 0, capped: false }
    }

    fn exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    fn can_grow(&self, max_depth: usize) -> bool {
        !self.frontier.is_empty() && self.depth < max_depth && !self.capped
    }

    /// One more level; returns the keys first seen on it.
    fn grow(&mut self, cap: usize, bottom: &Bottom, audit: &Audit) -> Vec<Term> {
        let mut fresh = Vec::new();
        let mut next = Vec::new();
        'outer: for t in std::mem::take(&mut self.frontier) {
            for r in em_redexes(&t) {
                let u = audited_step(&t, &r, bottom, audit);
                let k = alpha_key(&u);
                if self.seen.insert(k.clone()) {
                    fresh.push(k);
                    next.push(u);
                    if self.seen.len() > cap {
                        self.capped = true;
                        break 'outer;
                    }
                }
            }
        }
        self.frontier = next;
        self.depth += 1;
        fresh
    }
}

fn first_redex_path(t: &Term, max_depth: usize, bottom: &Bottom, audit: &Audit) -> Vec<Term> {
    let mut keys = vec![alpha_key(t)];
    let mut cur = t.clone();
    for _ in 0..max_depth {
        let Some(r) = em_redexes(&cur).into_iter().next() else { break };
        cur = audited_step(&cur, &r, bottom, audit);
        keys.push(alpha_key(&cur));
    }
    keys
}

/// Look for a common reduct of `t1` and `t2` within `max_depth` steps on
/// each side.
pub fn join(t1: &Term, t2: &Term, max_depth: usize, cap: usize, bottom: &Bottom, audit: &Audit) -> Outcome {
    // cheap probe first: the leftmost-outermost paths often meet already
    let path1 = first_redex_path(t1, max_depth, bottom, audit);
    let path2: HashSet<Term> = first_redex_path(t2, max_depth, bottom, audit).into_iter().collect();
    if path1.iter().any(|k| path2.contains(k)) {
        return Outcome::Pass;
    }
    let mut s1 = Side::new(t1.clone());
    let mut s2 = Side::new(t2.clone());
    loop {
        let grow_first = match (s1.can_grow(max_depth), s2.can_grow(max_depth)) {
            (false, false) => break,
            (true, false) => true,
            (false, true) => false,
            (true, true) => s1.seen.len() <= s2.seen.len(),
        };
        let (me, other) = if grow_first { (&mut s1, &s2) } else { (&mut s2, &s1) };
        let fresh = me.grow(cap, bottom, audit);
        if fresh.iter().any(|k| other.seen.contains(k)) {
            return Outcome::Pass;
        }
    }
    if s1.exhausted() && s2.exhausted() {
        Outcome::Fail(format!("{t1} and {t2} have disjoint finite reduct sets"))
    } else {
        Outcome::Inconclusive
    }
}

fn random_walk(t: &Term, steps: usize, g: &mut TermGen, bottom: &Bottom, audit: &Audit) -> Term {
    let mut cur = t.clone();
    for _ in 0..steps {
        let rs = em_redexes(&cur);
        let Some(r) = rs.choose(g.rng()) else { break };
        cur = audited_step(&cur, r, bottom, audit);
    }
    cur
}

/// Distinct reducts explored per side before a join search gives up.
pub const JOIN_CAP: usize = 1_500;

/// Two random diverging sequences of at most `k` steps rejoin within `2k`.
pub fn confluence(cfg: &SuiteConfig, k: usize, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let t = g.any_term(&cfg.bottom);
        let n1 = g.rng().gen_range(1..=k);
        let n2 = g.rng().gen_range(1..=k);
        let t1 = random_walk(&t, n1, g, &cfg.bottom, audit);
        let t2 = random_walk(&t, n2, g, &cfg.bottom, audit);
        match join(&t1, &t2, 2 * k, JOIN_CAP, &cfg.bottom, audit) {
            Outcome::Fail(msg) => Outcome::Fail(format!("from {t}: {msg}")),
            o => o,
        }
    })
}

// ------------------------------------------------------------------- diamond

/// `t1 ⟸ t ⟹ t2` closes with one parallel step on each side.
pub fn diamond(cfg: &SuiteConfig, max_nodes: usize) -> Tally {
    const BUDGET: usize = 200_000;
    sharded(cfg, |g| {
        let t = g.small(max_nodes, &cfg.bottom);
        let Ok(reducts) = parallel_reducts(&t, &cfg.bottom, BUDGET) else { return Outcome::Inconclusive };
        let mut next: Vec<HashSet<Term>> = Vec::new();
        for r in &reducts {
            match parallel_reducts(r, &cfg.bottom, BUDGET) {
                Ok(rs) => next.push(rs.iter().map(alpha_key).collect()),
                Err(_) => return Outcome::Inconclusive,
            }
        }
        for i in 0..reducts.len() {
            for j in i + 1..reducts.len() {
                if next[i].is_disjoint(&next[j]) {
                    return Outcome::Fail(format!("{t}: {} and {} do not close", reducts[i], reducts[j]));
                }
            }
        }
        Outcome::Pass
    })
}

// ----------------------------------------------------------------- semantics

fn semantics_of(t: &Term) -> Option<MatchOutcome> {
    let Term::Matching(m) = t else { return None };
    matching_semantics(&m.binders, &m.record, &m.pending).ok()
}

/// The meaning of a matching is stable under matching and structural steps.
pub fn semantics(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let mut cur = g.flat_matching();
        for _ in 0..60 {
            let Some(sem) = semantics_of(&cur) else { return Outcome::Fail(format!("{cur}: no semantics")) };
            let steps: Vec<Redex> = em_redexes(&cur)
                .into_iter()
                .filter(|r| matches!(r.tag.family(), Family::Struct | Family::Match))
                .collect();
            let mut succ = Vec::new();
            for r in &steps {
                let u = audited_step(&cur, r, &cfg.bottom, audit);
                match semantics_of(&u) {
                    Some(s) if s.alpha_eq(&sem) => succ.push(u),
                    other => {
                        return Outcome::Fail(format!(
                            "{cur} --{}@{:?}--> {u}: {sem:?} became {other:?}",
                            r.tag, r.path
                        ))
                    }
                }
            }
            let Some(u) = succ.choose(g.rng()) else { break };
            cur = u.clone();
        }
        Outcome::Pass
    })
}

// --------------------------------------------------------------- determinism

/// Matching-driven selection admits at most one redex, and only listed ones.
pub fn determinism(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let mut cur = g.any_term(&cfg.bottom);
        for _ in 0..60 {
            let adm = MatchingDriven.admissible(&cur);
            if adm.len() > 1 {
                return Outcome::Fail(format!("{cur}: {} admissible redexes", adm.len()));
            }
            let Some(r) = adm.into_iter().next() else { break };
            if !em_redexes(&cur).contains(&r) {
                return Outcome::Fail(format!("{cur}: selected {r:?} is not a redex"));
            }
            cur = audited_step(&cur, &r, &cfg.bottom, audit);
        }
        Outcome::Pass
    })
}

// ------------------------------------------------------------------- partial

/// Whether `from` reaches `target` (both compared after collapsing failed
/// matchings) with variant steps drawn from `tags`. `None` when the search
/// hit its cap.
pub fn ps_reaches(from: &PTerm, target: &PTerm, tags: &[PsTag], bottom: &Bottom, max_depth: usize) -> Option<bool> {
    const CAP: usize = 5_000;
    let goal = alpha_key(&fail_collapse(target, bottom));
    let mut seen = HashSet::from([alpha_key(from)]);
    let mut frontier = vec![from.clone()];
    for depth in 0..=max_depth {
        if frontier.iter().any(|t| alpha_key(&fail_collapse(t, bottom)) == goal) {
            return Some(true);
        }
        if depth == max_depth {
            return if frontier.is_empty() { Some(false) } else { None };
        }
        let mut next = Vec::new();
        for t in &frontier {
            for r in ps_redexes(t).into_iter().filter(|r| tags.contains(&r.tag)) {
                let u = ps_step(t, &r, bottom).expect("listed redex");
                if seen.insert(alpha_key(&u)) {
                    next.push(u);
                }
            }
        }
        if seen.len() > CAP {
            return None;
        }
        if next.is_empty() {
            return Some(false);
        }
        frontier = next;
    }
    Some(false)
}

/// Each explicit step is mirrored, through the translation, by zero or
/// more steps of the partial-substitution variant.
pub fn partial_simulation(cfg: &SuiteConfig, audit: &Audit) -> Tally {
    sharded(cfg, |g| {
        let t = g.reachable(8, &cfg.bottom);
        let from = translate(&t);
        let mut capped = false;
        for r in em_redexes(&t) {
            let t2 = audited_step(&t, &r, &cfg.bottom, audit);
            match ps_reaches(&from, &translate(&t2), &PsTag::counterparts(r.tag), &cfg.bottom, 8) {
                Some(true) => {}
                Some(false) => {
                    return Outcome::Fail(format!("{t} --{}@{:?}--> {t2}: no variant counterpart", r.tag, r.path))
                }
                None => capped = true,
            }
        }
        if capped {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        }
    })
}

/// A variant step from `translate(t)` with no explicit counterpart: no
/// explicit reduct `t'` of `t` within `max_depth` steps translates to a
/// term the variant step can reach.
pub fn reverse_counterexample(t: &Term, bottom: &Bottom, max_depth: usize) -> Option<(Redex<PsTag>, PTerm)> {
    let audit = Audit::new();
    let from = translate(t);
    let mut reducts = vec![t.clone()];
    let mut seen = HashSet::from([alpha_key(t)]);
    let mut frontier = vec![t.clone()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for u in &frontier {
            for r in em_redexes(u) {
                let v = audited_step(u, &r, bottom, &audit);
                if seen.insert(alpha_key(&v)) {
                    next.push(v.clone());
                    reducts.push(v);
                }
            }
        }
        frontier = next;
    }
    let images: HashSet<PTerm> = reducts
        .iter()
        .map(|u| alpha_key(&fail_collapse(&translate(u), bottom)))
        .collect();
    ps_redexes(&from).into_iter().find_map(|r| {
        let u = ps_step(&from, &r, bottom).expect("listed redex");
        (!images.contains(&alpha_key(&fail_collapse(&u, bottom)))).then_some((r, u))
    })
}

// ----------------------------------------------------------------- roundtrip

/// `parse(print(t)) ≡α t`, for terms and their translations.
pub fn roundtrip(cfg: &SuiteConfig) -> Tally {
    sharded(cfg, |g| {
        let t = g.any_term(&cfg.bottom);
        let src = t.to_string();
        match parse(&src) {
            Ok(u) if alpha_equiv(&t, &u) => {}
            Ok(u) => return Outcome::Fail(format!("{src} reparsed as {u}")),
            Err(e) => return Outcome::Fail(format!("{src}: {e}")),
        }
        let pt = translate(&t);
        let src = pt.to_string();
        match parse_with::<TauMatch>(&src, &cfg.bottom) {
            Ok(u) if alpha_equiv(&pt, &u) => Outcome::Pass,
            Ok(u) => Outcome::Fail(format!("{src} reparsed as {u}")),
            Err(e) => Outcome::Fail(format!("{src}: {e}")),
        }
    })
}

// ------------------------------------------------------------------- compare

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub rows: Vec<String>,
    pub mismatches: usize,
    pub ppc_result: String,
    pub em_result: String,
}

/// Run both calculi from a pure term: each implicit step is simulated by
/// explicit matching, each explicit step is projected back.
pub fn compare(t: &Term, max_steps: usize, bottom: &Bottom) -> Result<CompareReport, String> {
    if !t.is_pure() {
        return Err("compare needs a pure term".into());
    }
    let audit = Audit::new();
    let mut rows = Vec::new();
    let mut mismatches = 0;

    let ppc = run_ppc(t, max_steps, bottom);
    let mut before = ppc.initial.clone();
    for (i, s) in ppc.trace.iter().enumerate() {
        let (ok, detail) = match simulate_ppc_step(&before, &s.path, bottom, &audit) {
            Ok(sim) if alpha_equiv(&sim.result, &s.term) && sim.record_forgets_to_match => {
                (true, format!("{} explicit steps", sim.steps.len()))
            }
            Ok(sim) => (false, format!("explicit result {}", sim.result)),
            Err(e) => (false, e),
        };
        mismatches += usize::from(!ok);
        rows.push(format!(
            "ppc {:>3} {:<10} {:<4} {}  ->  {}",
            i + 1,
            format!("{:?}", s.path),
            if ok { "ok" } else { "FAIL" },
            detail,
            s.term
        ));
        before = s.term.clone();
    }

    let em = run(t, &DfLr, max_steps, bottom);
    let (mut p0, mut pure0) = audited_purify(&em.initial, bottom, &audit);
    for (i, s) in em.trace.iter().enumerate() {
        let (p1, pure1) = audited_purify(&s.term, bottom, &audit);
        let status = if !(pure0 && pure1) {
            "n/a"
        } else if alpha_equiv(&p0, &p1) {
            "=0"
        } else if projects(&p0, &p1, bottom) {
            "=1"
        } else {
            mismatches += 1;
            "FAIL"
        };
        rows.push(format!("em  {:>3} {:<16} {:<10} {:<4} {}", i + 1, s.rule.to_string(), format!("{:?}", s.path), status, s.term));
        (p0, pure0) = (p1, pure1);
    }
    Ok(CompareReport {
        rows,
        mismatches,
        ppc_result: ppc.result.to_string(),
        em_result: em.result.to_string(),
    })
}

pub const SUITE_NAMES: [&str; 9] = [
    "termination",
    "confluence",
    "simulation",
    "projection",
    "semantics",
    "determinism",
    "partial",
    "diamond",
    "roundtrip",
];

/// Run a suite by its CLI name.
pub fn run_suite(name: &str, cfg: &SuiteConfig, audit: &Audit) -> Option<Tally> {
    Some(match name {
        "termination" => termination(cfg, audit),
        "confluence" => confluence(cfg, 4, audit),
        "simulation" => simulation(cfg, audit),
        "projection" => projection(cfg, audit),
        "semantics" => semantics(cfg, audit),
        "determinism" => determinism(cfg, audit),
        "partial" => partial_simulation(cfg, audit),
        "diamond" => diamond(cfg, 10),
        "roundtrip" => roundtrip(cfg),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::DecidedMatch;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn sharding_does_not_change_the_tally() {
        let cfg = SuiteConfig::new(11, 40);
        let a = roundtrip(&cfg);
        let b = roundtrip(&cfg);
        assert_eq!((a.pass, a.fail), (b.pass, b.fail));
        assert_eq!(a.total(), 40);
    }

    #[test]
    fn simulation_of_a_simple_step() {
        let bot = Bottom::default();
        let audit = Audit::new();
        let t = p("([x] ^c ^x -> x) (^c ^d)");
        let s = simulate_ppc_step(&t, &[], &bot, &audit).unwrap();
        assert_eq!(s.result, p("^d"));
        assert!(s.record_forgets_to_match);
        assert_eq!(s.steps.first().unwrap().tag, RuleTag::InitB);
        assert_eq!(s.steps.last().unwrap().tag, RuleTag::ResolveSubst);
        assert_eq!(audit.violations(), 0);
    }

    #[test]
    fn join_finds_common_reducts() {
        let bot = Bottom::default();
        let audit = Audit::new();
        let t1 = p("([x] ^x -> x) ^c");
        let t2 = p("x[x; {}; (^c ~ ^x)]");
        assert_eq!(join(&t1, &t2, 8, 1000, &bot, &audit), Outcome::Pass);
        assert!(matches!(join(&p("^c"), &p("^d"), 8, 1000, &bot, &audit), Outcome::Fail(_)));
    }

    #[test]
    fn audit_flags_increases() {
        let bot = Bottom::default();
        let audit = Audit::new();
        let r = Redex { path: vec![], tag: RuleTag::StructHat };
        assert!(!audit.observe(&p("^c @ ^d"), &r, &p("^c ^d"), &bot));
        assert_eq!(audit.violations(), 1);
        assert!(audit.observe(&p("^c ^d"), &r, &p("^c @ ^d"), &bot));
    }

    #[test]
    fn compare_example() {
        let bot = Bottom::default();
        let r = compare(&p("([x] ^c ^x -> x) (^c ^d)"), 100, &bot).unwrap();
        assert_eq!(r.mismatches, 0);
        assert_eq!(r.ppc_result, "^d");
        assert_eq!(r.em_result, "^d");
        let r = compare(&p("^c"), 100, &bot).unwrap();
        assert!(r.rows.is_empty());
    }

    #[test]
    fn small_runs_of_every_suite() {
        let audit = Audit::new();
        let cfg = SuiteConfig::new(2, 30);
        for name in SUITE_NAMES {
            let t = run_suite(name, &cfg, &audit).unwrap();
            assert_eq!(t.total(), 30, "{name}");
        }
    }

    #[test]
    fn decided_record_type_is_used() {
        // the variant translation keeps failed records
        let t = p("x[x; #fail; (^c ~ ^x)]");
        let Term::Matching(m) = &t else { unreachable!() };
        assert_eq!(m.record, DecidedMatch::Fail);
        assert!(matches!(translate(&t), Term::Matching(_)));
    }
}
