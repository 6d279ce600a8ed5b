//! Seeded random terms for the property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::em::{em_redexes, em_step};
use crate::free::free_variables;
use crate::name::Name;
use crate::ppc::ppc_redexes;
use crate::subst::canonicalize;
use crate::term::{Bottom, DecidedMatch, Subst, Term};

/// Shape knobs. Probabilities are per node.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_depth: u32,
    /// Chance that an inner node is an application rather than a case.
    pub app_bias: f64,
    /// Chance that a leaf is a matchable rather than a variable.
    pub matchable_bias: f64,
    /// Chance that a term position holds a case applied to an argument
    /// built to fit its pattern.
    pub redex_bias: f64,
    pub constructors: Vec<&'static str>,
    pub binder_pool: Vec<&'static str>,
    pub free_pool: Vec<&'static str>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            app_bias: 0.55,
            matchable_bias: 0.5,
            redex_bias: 0.25,
            constructors: vec!["c", "d", "e"],
            binder_pool: vec!["x", "y", "z", "u", "v", "w"],
            free_pool: vec!["f", "g"],
        }
    }
}

pub struct TermGen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl TermGen {
    pub fn new(seed: u64) -> Self {
        Self::with_config(seed, GenConfig::default())
    }

    pub fn with_config(seed: u64, cfg: GenConfig) -> Self {
        TermGen { rng: ChaCha8Rng::seed_from_u64(seed), cfg }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn pick(&mut self, pool: &[&'static str]) -> Name {
        Name::new(pool.choose(&mut self.rng).expect("non-empty pool"))
    }

    fn constructor(&mut self) -> Term {
        let pool = self.cfg.constructors.clone();
        Term::Matchable(self.pick(&pool))
    }

    fn leaf(&mut self, scope: &[Name]) -> Term {
        if self.rng.gen_bool(self.cfg.matchable_bias) {
            return self.constructor();
        }
        if !scope.is_empty() && self.rng.gen_bool(0.85) {
            return Term::Var(scope.choose(&mut self.rng).unwrap().clone());
        }
        let pool = self.cfg.free_pool.clone();
        Term::Var(self.pick(&pool))
    }

    fn binders(&mut self, max: usize) -> Vec<Name> {
        let n = self.rng.gen_range(0..=max);
        let mut pool = self.cfg.binder_pool.clone();
        pool.shuffle(&mut self.rng);
        pool.into_iter().take(n).map(Name::new).collect()
    }

    /// A pure term over variables in `scope`.
    fn pure(&mut self, depth: u32, scope: &[Name]) -> Term {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf(scope);
        }
        if self.rng.gen_bool(self.cfg.redex_bias) {
            return self.redex(depth, scope);
        }
        if self.rng.gen_bool(self.cfg.app_bias) {
            if self.rng.gen_bool(0.5) {
                self.data(depth, scope)
            } else {
                Term::app(self.pure(depth - 1, scope), self.pure(depth - 1, scope))
            }
        } else {
            let theta = self.binders(2);
            let pattern = self.pattern(depth - 1, &theta, scope);
            let mut inner = scope.to_vec();
            inner.extend(theta.iter().cloned());
            let body = self.pure(depth - 1, &inner);
            Term::case(theta, pattern, body)
        }
    }

    /// `ĉ t₁ … tₙ`
    fn data(&mut self, depth: u32, scope: &[Name]) -> Term {
        let n = self.rng.gen_range(1..=2);
        let mut t = self.constructor();
        for _ in 0..n {
            t = Term::app(t, self.pure(depth.saturating_sub(1), scope));
        }
        t
    }

    /// A pattern over `θ`: mostly a data structure whose leaves are the
    /// matchables of `θ` and constructors, occasionally something that
    /// makes matching wait or fail.
    fn pattern(&mut self, depth: u32, theta: &[Name], scope: &[Name]) -> Term {
        let leaf = |g: &mut TermGen| -> Term {
            if !theta.is_empty() && g.rng.gen_bool(0.6) {
                Term::Matchable(theta.choose(&mut g.rng).unwrap().clone())
            } else {
                g.constructor()
            }
        };
        if depth == 0 || self.rng.gen_bool(0.3) {
            return leaf(self);
        }
        match self.rng.gen_range(0..20) {
            0 if !scope.is_empty() => Term::Var(scope.choose(&mut self.rng).unwrap().clone()),
            1 => self.pure(depth - 1, scope),
            _ => {
                let head = if !theta.is_empty() && self.rng.gen_bool(0.15) {
                    Term::Matchable(theta.choose(&mut self.rng).unwrap().clone())
                } else {
                    self.constructor()
                };
                let n = self.rng.gen_range(1..=2);
                let mut t = head;
                for _ in 0..n {
                    t = Term::app(t, self.pattern(depth - 1, theta, scope));
                }
                t
            }
        }
    }

    /// An argument shaped like `p`: matchables of `θ` become arbitrary
    /// terms, and now and then a constructor is swapped.
    fn fit(&mut self, p: &Term, theta: &[Name], depth: u32, scope: &[Name]) -> Term {
        match p {
            Term::Matchable(x) if theta.contains(x) => self.pure(depth.saturating_sub(1), scope),
            Term::Matchable(_) if self.rng.gen_bool(0.1) => self.constructor(),
            Term::App(f, a) => Term::app(self.fit(f, theta, depth, scope), self.fit(a, theta, depth, scope)),
            _ => p.clone(),
        }
    }

    fn redex(&mut self, depth: u32, scope: &[Name]) -> Term {
        let theta = self.binders(2);
        let pattern = self.pattern(depth.saturating_sub(1).max(1), &theta, scope);
        let mut inner = scope.to_vec();
        inner.extend(theta.iter().cloned());
        let body = self.pure(depth.saturating_sub(1), &inner);
        let arg = if self.rng.gen_bool(0.85) {
            self.fit(&pattern, &theta, depth, scope)
        } else {
            self.pure(depth.saturating_sub(1), scope)
        };
        Term::app(Term::case(theta, pattern, body), arg)
    }

    /// Bind leftover free variables under an outer case.
    fn close(&mut self, t: Term) -> Term {
        let fv: Vec<Name> = free_variables(&t).into_iter().collect();
        if fv.is_empty() {
            return t;
        }
        let mut pattern = self.constructor();
        for x in &fv {
            pattern = Term::app(pattern, Term::Matchable(x.clone()));
        }
        Term::case(fv, pattern, t)
    }

    /// A closed pure term in bound-name convention form.
    pub fn pure_term(&mut self) -> Term {
        let d = self.cfg.max_depth;
        let t = self.pure(d, &[]);
        canonicalize(&self.close(t))
    }

    /// A pure term, possibly open, with at least one decided redex.
    pub fn pure_with_redex(&mut self) -> Term {
        loop {
            let d = self.cfg.max_depth;
            let t = if self.rng.gen_bool(0.5) { self.redex(d, &[]) } else { self.pure(d, &[]) };
            let t = canonicalize(&t);
            if !ppc_redexes(&t).is_empty() {
                return t;
            }
        }
    }

    /// A term reached from a pure one by up to `max_steps` random steps.
    pub fn reachable(&mut self, max_steps: usize, bottom: &Bottom) -> Term {
        let mut t = self.pure_with_redex();
        let n = self.rng.gen_range(0..=max_steps);
        for _ in 0..n {
            let rs = em_redexes(&t);
            let Some(r) = rs.choose(&mut self.rng) else { break };
            t = em_step(&t, r, bottom).expect("listed redex");
        }
        t
    }

    /// Data built with structural applications, `ĉ•t₁•…`, or its functional
    /// form.
    fn structured(&mut self, depth: u32, theta: &[Name], scope: &[Name], as_pattern: bool) -> Term {
        let structural = self.rng.gen_bool(0.6);
        let head = if as_pattern && !theta.is_empty() && self.rng.gen_bool(0.15) {
            Term::Matchable(theta.choose(&mut self.rng).unwrap().clone())
        } else {
            self.constructor()
        };
        if depth == 0 || self.rng.gen_bool(0.3) {
            return if as_pattern && !theta.is_empty() && self.rng.gen_bool(0.6) {
                Term::Matchable(theta.choose(&mut self.rng).unwrap().clone())
            } else {
                head
            };
        }
        let n = self.rng.gen_range(1..=2);
        let mut t = head;
        for _ in 0..n {
            let arg = if as_pattern {
                self.structured(depth - 1, theta, scope, true)
            } else if self.rng.gen_bool(0.5) {
                self.structured(depth - 1, theta, scope, false)
            } else {
                self.pure(depth - 1, scope)
            };
            t = if structural { Term::sapp(t, arg) } else { Term::app(t, arg) };
        }
        t
    }

    /// `b⟨θ;μ;Δ⟩` with no matching inside `μ` or `Δ`.
    pub fn flat_matching(&mut self) -> Term {
        let mut theta = self.binders(3);
        if theta.is_empty() {
            theta.push(Name::new("x"));
        }
        let body = self.pure(2, &theta);
        let record = if self.rng.gen_bool(0.15) {
            DecidedMatch::Fail
        } else {
            let mut s = Subst::new();
            for x in &theta {
                if self.rng.gen_bool(0.3) {
                    let v = self.structured(2, &[], &[], false);
                    s.insert(x.clone(), v);
                }
            }
            DecidedMatch::Subst(s)
        };
        let n = self.rng.gen_range(1..=3);
        let mut pending = Vec::new();
        for _ in 0..n {
            let p = self.structured(2, &theta, &[], true);
            let a = if self.rng.gen_bool(0.7) {
                self.fit_structured(&p, &theta)
            } else {
                self.structured(2, &[], &[], false)
            };
            pending.push((a, p));
        }
        canonicalize(&Term::matching(body, theta, record, pending))
    }

    fn fit_structured(&mut self, p: &Term, theta: &[Name]) -> Term {
        match p {
            Term::Matchable(x) if theta.contains(x) => self.structured(1, &[], &[], false),
            Term::Matchable(_) if self.rng.gen_bool(0.1) => self.constructor(),
            Term::App(f, a) | Term::SApp(f, a) => {
                let f = self.fit_structured(f, theta);
                let a = self.fit_structured(a, theta);
                // the argument may be at a different stage of structuring
                let structural = match p {
                    Term::SApp(..) => self.rng.gen_bool(0.8),
                    _ => self.rng.gen_bool(0.2),
                };
                if structural && matches!(f, Term::Matchable(_) | Term::SApp(..)) {
                    Term::sapp(f, a)
                } else {
                    Term::app(f, a)
                }
            }
            _ => p.clone(),
        }
    }

    /// Any of the shapes above, sometimes placed under a context.
    pub fn any_term(&mut self, bottom: &Bottom) -> Term {
        let t = match self.rng.gen_range(0..4) {
            0 => self.pure_term(),
            1 => self.pure_with_redex(),
            2 => self.reachable(8, bottom),
            _ => self.flat_matching(),
        };
        if self.rng.gen_bool(0.2) {
            let ctx = self.pure(2, &[]);
            canonicalize(&if self.rng.gen_bool(0.5) { Term::app(ctx, t) } else { Term::app(t, ctx) })
        } else {
            t
        }
    }

    /// A term with at most `max_nodes` nodes, from any generator.
    pub fn small(&mut self, max_nodes: usize, bottom: &Bottom) -> Term {
        let saved = self.cfg.max_depth;
        self.cfg.max_depth = 3;
        let t = loop {
            let t = self.any_term(bottom);
            if t.node_count() <= max_nodes {
                break t;
            }
        };
        self.cfg.max_depth = saved;
        t
    }
}
