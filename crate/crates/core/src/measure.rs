//! The two measures whose lexicographic product decreases along every
//! `→p` step: the multiset of lengths of maximal potentially nested chains
//! of matchings, and the weighted term size.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::name::Name;
use crate::subst::canonicalize;
use crate::term::{Bottom, Record, Term};

/// Size of a term where every matching contributes `bottom_size`.
pub fn size_with<M: Record>(t: &Term<M>, bottom_size: u64) -> u64 {
    match t {
        Term::Var(_) | Term::Matchable(_) => 1,
        Term::App(f, a) => size_with(f, bottom_size) + size_with(a, bottom_size) + 2,
        Term::SApp(f, a) => size_with(f, bottom_size) + size_with(a, bottom_size) + 1,
        Term::Case(c) => size_with(&c.pattern, bottom_size) + size_with(&c.body, bottom_size),
        Term::Matching(m) => {
            // a list with repetitions sums each copy, which is the
            // multiplicity-weighted sum over the multiset
            size_with(&m.body, bottom_size)
                + bottom_size
                + m.record.terms().into_iter().map(|v| size_with(v, bottom_size)).sum::<u64>()
                + m.pending
                    .iter()
                    .map(|(a, p)| size_with(a, bottom_size) + size_with(p, bottom_size))
                    .sum::<u64>()
        }
    }
}

pub fn size<M: Record>(t: &Term<M>, bottom: &Bottom) -> u64 {
    size_with(t, bottom.size())
}

/// Finite multiset of chain lengths, compared by the multiset extension of
/// the order on naturals.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ChainDepth {
    counts: BTreeMap<usize, u64>,
}

impl ChainDepth {
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Self {
        let mut d = ChainDepth::default();
        for l in lengths {
            d.add(l, 1);
        }
        d
    }

    fn add(&mut self, len: usize, count: u64) {
        if count > 0 {
            let c = self.counts.entry(len).or_insert(0);
            *c = c.saturating_add(count);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, len: usize) -> u64 {
        self.counts.get(&len).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&l, &c)| (l, c))
    }
}

impl Ord for ChainDepth {
    /// On a total order the multiset extension is decided by the largest
    /// element whose multiplicities differ.
    fn cmp(&self, other: &Self) -> Ordering {
        let keys: BTreeSet<usize> = self.counts.keys().chain(other.counts.keys()).copied().collect();
        for k in keys.into_iter().rev() {
            match self.count(k).cmp(&other.count(k)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for ChainDepth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ChainDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        for (l, c) in self.iter() {
            for _ in 0..c.min(8) {
                items.push(l.to_string());
            }
            if c > 8 {
                items.push(format!("…×{c}"));
            }
        }
        write!(f, "{{{}}}", items.join(", "))
    }
}

struct Node {
    binders: Vec<Name>,
    /// matchings occurring anywhere in the pending pairs or the record
    nested: Vec<usize>,
    /// variables occurring anywhere in the pending pairs or the record
    vars: BTreeSet<Name>,
}

fn collect<M: Record>(t: &Term<M>, nodes: &mut Vec<Node>) -> Vec<usize> {
    match t {
        Term::Matching(m) => {
            let id = nodes.len();
            nodes.push(Node {
                binders: m.binders.clone(),
                nested: Vec::new(),
                vars: BTreeSet::new(),
            });
            let mut inside = collect(&m.body, nodes);
            let mut nested = Vec::new();
            let mut vars = BTreeSet::new();
            let work = m
                .record
                .terms()
                .into_iter()
                .chain(m.pending.iter().flat_map(|(a, p)| [a, p]));
            for c in work {
                nested.extend(collect(c, nodes));
                all_variables(c, &mut vars);
            }
            nodes[id].nested = nested.clone();
            nodes[id].vars = vars;
            inside.extend(nested);
            inside.push(id);
            inside
        }
        _ => t.children().into_iter().flat_map(|c| collect(c, nodes)).collect(),
    }
}

/// Variable occurrences, bound or not.
fn all_variables<M: Record>(t: &Term<M>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        _ => {
            for c in t.children() {
                all_variables(c, out);
            }
        }
    }
}

/// The multiset of lengths of the maximal potentially nested chains of `t`.
///
/// Matching `j` may follow matching `i` in a chain when `j` occurs inside the
/// pending pairs or record of `i`, or when a variable bound by `j` occurs
/// there. The term is first put in bound-name convention form, which the
/// second condition relies on.
pub fn chain_depth<M: Record>(t: &Term<M>) -> ChainDepth {
    let t = canonicalize(t);
    let mut nodes = Vec::new();
    collect(&t, &mut nodes);
    let n = nodes.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        succ[i].extend(nodes[i].nested.iter().copied());
        for j in 0..n {
            if i != j && nodes[j].binders.iter().any(|b| nodes[i].vars.contains(b)) {
                succ[i].insert(j);
            }
        }
        succ[i].remove(&i);
    }
    let mut has_pred = vec![false; n];
    for s in &succ {
        for &j in s {
            has_pred[j] = true;
        }
    }
    // paths-to-sink length profile per node, memoised; the graph is acyclic
    // for convention-form terms, back edges are ignored defensively
    let mut memo: Vec<Option<ChainDepth>> = vec![None; n];
    let mut on_stack = vec![false; n];
    fn profile(
        v: usize,
        succ: &[BTreeSet<usize>],
        memo: &mut Vec<Option<ChainDepth>>,
        on_stack: &mut Vec<bool>,
    ) -> ChainDepth {
        if let Some(p) = &memo[v] {
            return p.clone();
        }
        on_stack[v] = true;
        let mut out = ChainDepth::default();
        let mut any = false;
        for &w in &succ[v] {
            if on_stack[w] {
                continue;
            }
            any = true;
            for (l, c) in profile(w, succ, memo, on_stack).iter() {
                out.add(l + 1, c);
            }
        }
        if !any {
            out.add(1, 1);
        }
        on_stack[v] = false;
        memo[v] = Some(out.clone());
        out
    }
    let mut depth = ChainDepth::default();
    for (v, &pred) in has_pred.iter().enumerate() {
        if !pred {
            for (l, c) in profile(v, &succ, &mut memo, &mut on_stack).iter() {
                depth.add(l, c);
            }
        }
    }
    depth
}

/// `(chain_depth, size)` ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Measure {
    pub depth: ChainDepth,
    pub size: u64,
}

impl Measure {
    pub fn of<M: Record>(t: &Term<M>, bottom: &Bottom) -> Self {
        Measure {
            depth: chain_depth(t),
            size: size(t, bottom),
        }
    }
}

impl Ord for Measure {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth.cmp(&other.depth).then(self.size.cmp(&other.size))
    }
}

impl PartialOrd for Measure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
