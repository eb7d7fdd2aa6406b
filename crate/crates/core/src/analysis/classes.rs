use std::collections::{BTreeMap, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use serde::Serialize;

use super::reliance::{reliance_graph, RelianceGraph};
use crate::model::{Label, Predicate, RuleSet};

/// True iff no positive-reliance cycle passes through an existential rule.
pub fn is_r_acyclic(rules: &RuleSet, graph: &RelianceGraph) -> bool {
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..rules.len()).map(|i| g.add_node(i)).collect();
    let mut self_loop = vec![false; rules.len()];
    for (a, b) in &graph.pos_edges {
        let (i, j) = (idx(rules, a), idx(rules, b));
        if i == j {
            self_loop[i] = true;
        }
        g.add_edge(nodes[i], nodes[j], ());
    }
    tarjan_scc(&g).iter().all(|scc| {
        let cyclic = scc.len() > 1 || self_loop[g[scc[0]]];
        !cyclic || scc.iter().all(|&n| !rules.rules()[g[n]].is_existential())
    })
}

fn idx(rules: &RuleSet, l: &Label) -> usize {
    rules.index_of(l).expect("reliance edges only name rules of the set")
}

/// An ordered partition with `→⁺` non-decreasing and `→⁻` strictly increasing
/// across blocks, or `None` if no such partition exists.
///
/// Blocks are the strongly connected components of the combined graph, in
/// topological order; ties go to the component holding the earliest rule.
pub fn r_stratify(rules: &RuleSet, graph: &RelianceGraph) -> Option<Vec<Vec<Label>>> {
    let mut g: DiGraph<usize, bool> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..rules.len()).map(|i| g.add_node(i)).collect();
    for (a, b) in &graph.pos_edges {
        g.add_edge(nodes[idx(rules, a)], nodes[idx(rules, b)], false);
    }
    for (a, b) in &graph.neg_edges {
        g.add_edge(nodes[idx(rules, a)], nodes[idx(rules, b)], true);
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; rules.len()];
    for (c, scc) in sccs.iter().enumerate() {
        for &n in scc {
            comp[g[n]] = c;
        }
    }
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        if g[e] && comp[g[a]] == comp[g[b]] {
            return None;
        }
    }
    let order = topo_min_first(sccs.len(), &g, &comp, |c| sccs[c].iter().map(|&n| g[n]).min().unwrap());
    let labels = rules.labels();
    Some(
        order
            .into_iter()
            .map(|c| {
                let mut members: Vec<usize> = sccs[c].iter().map(|&n| g[n]).collect();
                members.sort_unstable();
                members.into_iter().map(|i| labels[i].clone()).collect()
            })
            .collect(),
    )
}

/// Kahn's algorithm over components, always emitting the ready component with
/// the smallest key.
fn topo_min_first<E>(n: usize, g: &DiGraph<usize, E>, comp: &[usize], key: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        let (ca, cb) = (comp[g[a]], comp[g[b]]);
        if ca != cb && !succ[ca].contains(&cb) {
            succ[ca].push(cb);
            indeg[cb] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<(usize, usize)> =
        (0..n).filter(|&c| indeg[c] == 0).map(|c| (key(c), c)).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let c = first.1;
        out.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.insert((key(d), d));
            }
        }
    }
    out
}

/// Checks a candidate R-stratification edge by edge. Returns the first
/// violated edge as `(from, to, negative)`.
pub fn validate_r_stratification(
    partition: &[Vec<Label>],
    graph: &RelianceGraph,
) -> Result<(), (Label, Label, bool)> {
    let level: HashMap<&Label, usize> =
        partition.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |l| (l, i))).collect();
    for (a, b) in &graph.pos_edges {
        if level.get(a) > level.get(b) || !level.contains_key(a) || !level.contains_key(b) {
            return Err((a.clone(), b.clone(), false));
        }
    }
    for (a, b) in &graph.neg_edges {
        if level.get(a) >= level.get(b) || !level.contains_key(a) || !level.contains_key(b) {
            return Err((a.clone(), b.clone(), true));
        }
    }
    Ok(())
}

/// Every rule has a positive body atom holding all its universal variables.
pub fn is_guarded(rules: &RuleSet) -> bool {
    rules.iter().all(|r| {
        r.body_pos().iter().any(|a| {
            let vs = a.vars();
            r.univ_vars().iter().all(|v| vs.contains(v))
        })
    })
}

/// A level map `ℓ` over predicates with head ≥ positive body and head >
/// negative body, or `None`. Levels start at 0 and are as small as possible.
pub fn predicate_stratify(rules: &RuleSet) -> Option<BTreeMap<Predicate, usize>> {
    let mut g: DiGraph<Predicate, bool> = DiGraph::new();
    let mut ix: HashMap<Predicate, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<Predicate, bool>, p: &Predicate| *ix.entry(p.clone()).or_insert_with(|| g.add_node(p.clone()));
    for r in rules {
        for p in r.predicates() {
            node(&mut g, p);
        }
        for h in r.head() {
            let hn = node(&mut g, &h.pred);
            for b in r.body_pos() {
                let bn = node(&mut g, &b.pred);
                g.add_edge(bn, hn, false);
            }
            for b in r.body_neg() {
                let bn = node(&mut g, &b.pred);
                g.add_edge(bn, hn, true);
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; g.node_count()];
    for (c, scc) in sccs.iter().enumerate() {
        for &n in scc {
            comp[n.index()] = c;
        }
    }
    // tarjan_scc yields components in reverse topological order
    let mut level = vec![0usize; sccs.len()];
    for c in (0..sccs.len()).rev() {
        for &n in &sccs[c] {
            for e in g.edges(n) {
                let t = comp[e.target().index()];
                let strict = *e.weight();
                if t == c {
                    if strict {
                        return None;
                    }
                    continue;
                }
                level[t] = level[t].max(level[c] + usize::from(strict));
            }
        }
    }
    let mut out = BTreeMap::new();
    for n in g.node_indices() {
        out.insert(g[n].clone(), level[comp[n.index()]]);
    }
    Some(out)
}

/// Checks both level conditions for every rule.
pub fn validate_predicate_levels(rules: &RuleSet, levels: &BTreeMap<Predicate, usize>) -> bool {
    rules.iter().all(|r| {
        r.head().iter().all(|h| {
            let Some(&lh) = levels.get(&h.pred) else { return false };
            r.body_pos().iter().all(|b| levels.get(&b.pred).is_some_and(|&lb| lh >= lb))
                && r.body_neg().iter().all(|b| levels.get(&b.pred).is_some_and(|&lb| lh > lb))
        })
    })
}

/// Summary of the class checks for a rule set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub r_acyclic: bool,
    pub r_stratification: Option<Vec<Vec<Label>>>,
    pub guarded: bool,
    /// Predicate levels keyed by `name/arity`.
    pub stratified: Option<BTreeMap<String, usize>>,
    pub reliance: RelianceGraph,
}

impl ClassReport {
    pub fn r_stratified(&self) -> bool {
        self.r_stratification.is_some()
    }
}

/// Runs every class check. `jobs` bounds the parallel reliance tests.
pub fn analyze(rules: &RuleSet, jobs: usize) -> ClassReport {
    let reliance = reliance_graph(rules, jobs);
    ClassReport {
        r_acyclic: is_r_acyclic(rules, &reliance),
        r_stratification: r_stratify(rules, &reliance),
        guarded: is_guarded(rules),
        stratified: predicate_stratify(rules).map(|m| m.into_iter().map(|(p, l)| (p.to_string(), l)).collect()),
        reliance,
    }
}
