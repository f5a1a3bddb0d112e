//! Directed-graph machinery: input-reachability, driver-rooted spanning
//! forests with topological orders, cycle detection through strongly
//! connected components, signed incidence matrices, and the auxiliary
//! graph built from zero/nonzero matrix patterns.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Interaction digraph on vertices `1..=N` without self-loops.
///
/// An edge `(i, j)` means vertex `i` directly influences vertex `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DiGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(i, j) in &edges {
            if i == 0 || j == 0 || i > vertex_count || j > vertex_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({i},{j}) out of range for {vertex_count} vertices (ids are 1-based)"
                )));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop on vertex {i}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidInput(format!("duplicate edge ({i},{j})")));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges in insertion order; this order fixes the rows of `K_I`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// 0-based successor lists, sorted ascending for determinism.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.edges {
            adj[i - 1].push(j - 1);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Vertices lying on at least one directed cycle.
    pub fn cycle_vertices(&self) -> BTreeSet<usize> {
        cycle_vertices_of(&self.adjacency())
            .into_iter()
            .map(|v| v + 1)
            .collect()
    }
}

fn check_drivers(g: &DiGraph, drivers: &BTreeSet<usize>) -> Result<()> {
    for &d in drivers {
        if d == 0 || d > g.vertex_count() {
            return Err(Error::InvalidInput(format!(
                "driver {d} out of range for {} vertices",
                g.vertex_count()
            )));
        }
    }
    Ok(())
}

/// All vertices reachable from the driving set by forward traversal
/// (drivers themselves included).
pub fn input_reachable_set(g: &DiGraph, drivers: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    check_drivers(g, drivers)?;
    let adj = g.adjacency();
    let mut reached: Vec<bool> = vec![false; g.vertex_count()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &d in drivers {
        if !reached[d - 1] {
            reached[d - 1] = true;
            queue.push_back(d - 1);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !reached[v] {
                reached[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(reached
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(v, _)| v + 1)
        .collect())
}

pub fn is_globally_input_reachable(g: &DiGraph, drivers: &BTreeSet<usize>) -> Result<bool> {
    Ok(input_reachable_set(g, drivers)?.len() == g.vertex_count())
}

/// Vertices NOT reachable from the driving set.
pub fn unreachable_set(g: &DiGraph, drivers: &BTreeSet<usize>) -> Result<Vec<usize>> {
    let reached = input_reachable_set(g, drivers)?;
    Ok((1..=g.vertex_count())
        .filter(|v| !reached.contains(v))
        .collect())
}

/// One tree of a driver-rooted spanning forest. `order` starts at the
/// root and lists every tree vertex parent-before-child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub order: Vec<usize>,
    pub parent: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    pub trees: Vec<SpanningTree>,
}

impl SpanningForest {
    /// Tree edges `(parent, child)` across the whole forest.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.trees
            .iter()
            .flat_map(|t| t.parent.iter().map(|(&child, &par)| (par, child)))
            .collect()
    }
}

/// Deterministic driver-rooted spanning forest by multi-source BFS,
/// visiting lowest ids first. Every driver roots its own tree and the
/// trees partition the vertex set.
pub fn rooted_spanning_forest(g: &DiGraph, drivers: &BTreeSet<usize>) -> Result<SpanningForest> {
    check_drivers(g, drivers)?;
    let unreachable = unreachable_set(g, drivers)?;
    if !unreachable.is_empty() {
        return Err(Error::NotInputReachable { unreachable });
    }
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut tree_of: Vec<Option<usize>> = vec![None; n];
    let mut trees: Vec<SpanningTree> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &d in drivers {
        if tree_of[d - 1].is_none() {
            tree_of[d - 1] = Some(trees.len());
            trees.push(SpanningTree {
                root: d,
                order: vec![d],
                parent: BTreeMap::new(),
            });
            queue.push_back(d - 1);
        }
    }
    while let Some(u) = queue.pop_front() {
        let tree_idx = tree_of[u].expect("queued vertices are assigned");
        for &v in &adj[u] {
            if tree_of[v].is_none() {
                tree_of[v] = Some(tree_idx);
                trees[tree_idx].order.push(v + 1);
                trees[tree_idx].parent.insert(v + 1, u + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(SpanningForest { trees })
}

/// Signed incidence matrix `K_I` and head-selector `K`.
///
/// Row `k` of `K_I` carries `+1` at the tail and `−1` at the head of the
/// `k`th edge; `K_{jk} = 1` exactly where `[K_I]_{kj} = −1`. These
/// factor any Laplacian of the graph as `L = −K·diag(w)·K_I`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidencePair {
    pub k_incidence: DMatrix<f64>,
    pub k_head: DMatrix<f64>,
}

pub fn incidence_matrices(g: &DiGraph) -> IncidencePair {
    let n = g.vertex_count();
    let m = g.edges().len();
    let mut k_incidence = DMatrix::<f64>::zeros(m, n);
    let mut k_head = DMatrix::<f64>::zeros(n, m);
    for (k, &(tail, head)) in g.edges().iter().enumerate() {
        k_incidence[(k, tail - 1)] = 1.0;
        k_incidence[(k, head - 1)] = -1.0;
        k_head[(head - 1, k)] = 1.0;
    }
    IncidencePair {
        k_incidence,
        k_head,
    }
}

/// Dense zero/nonzero pattern, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Pattern {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_matrix(m: &DMatrix<f64>, zero_tol: f64) -> Self {
        let mut p = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() > zero_tol {
                    p.set(i, j, true);
                }
            }
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.cols + j] = value;
    }
}

/// Auxiliary graph of a matrix pair `[H, P]`: state vertices indexed by
/// the rows of `H`, input vertices by the columns of `P`, with an edge
/// `v_i → v_j` whenever `H_{ji} ≠ 0` and `z_i → v_j` whenever `P_{ji} ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    state_count: usize,
    input_count: usize,
    /// 0-based: state_adj[i] lists states j with an edge v_i → v_j.
    state_adj: Vec<Vec<usize>>,
    /// 0-based: input_adj[i] lists states j with an edge z_i → v_j.
    input_adj: Vec<Vec<usize>>,
}

impl AuxGraph {
    pub fn from_patterns(h: &Pattern, p: &Pattern) -> Result<Self> {
        let n = h.rows();
        if h.cols() != n {
            return Err(Error::InvalidInput(
                "auxiliary graph state pattern must be square".into(),
            ));
        }
        if p.rows() != n {
            return Err(Error::InvalidInput(format!(
                "input pattern has {} rows, expected {n}",
                p.rows()
            )));
        }
        let m = p.cols();
        let mut state_adj = vec![Vec::new(); n];
        let mut input_adj = vec![Vec::new(); m];
        for (i, list) in state_adj.iter_mut().enumerate() {
            for j in 0..n {
                if h.get(j, i) {
                    list.push(j);
                }
            }
        }
        for (i, list) in input_adj.iter_mut().enumerate() {
            for j in 0..n {
                if p.get(j, i) {
                    list.push(j);
                }
            }
        }
        for list in state_adj.iter_mut().chain(input_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            state_count: n,
            input_count: m,
            state_adj,
            input_adj,
        })
    }

    pub fn from_matrices(h: &DMatrix<f64>, p: &DMatrix<f64>, zero_tol: f64) -> Result<Self> {
        Self::from_patterns(
            &Pattern::from_matrix(h, zero_tol),
            &Pattern::from_matrix(p, zero_tol),
        )
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    /// 0-based state vertices lying on at least one cycle. Only state
    /// vertices can close cycles; input vertices have no in-edges.
    pub fn cycle_vertices(&self) -> BTreeSet<usize> {
        cycle_vertices_of(&self.state_adj)
    }

    /// 0-based state vertices reachable from any input vertex.
    pub fn input_reachable(&self) -> BTreeSet<usize> {
        let mut reached = vec![false; self.state_count];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for list in &self.input_adj {
            for &v in list {
                if !reached[v] {
                    reached[v] = true;
                    queue.push_back(v);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.state_adj[u] {
                if !reached[v] {
                    reached[v] = true;
                    queue.push_back(v);
                }
            }
        }
        reached
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(v, _)| v)
            .collect()
    }

    /// True iff every vertex of every cycle is input-reachable.
    pub fn every_cycle_input_reachable(&self) -> bool {
        let reached = self.input_reachable();
        self.cycle_vertices().is_subset(&reached)
    }
}

/// Vertices on cycles of a 0-based adjacency structure: members of a
/// strongly connected component of size ≥ 2, plus self-loop vertices.
fn cycle_vertices_of(adj: &[Vec<usize>]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for comp in tarjan_scc(adj) {
        if comp.len() >= 2 {
            out.extend(comp);
        } else {
            let v = comp[0];
            if adj[v].contains(&v) {
                out.insert(v);
            }
        }
    }
    out
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

/// Tarjan SCC on a 0-based adjacency list.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut state = TarjanState {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            strongconnect(v, adj, &mut state);
        }
    }
    state.comps
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut TarjanState) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn chain(n: usize) -> DiGraph {
        DiGraph::new(n, (1..n).map(|i| (i, i + 1)).collect()).unwrap()
    }

    fn drivers(ids: &[usize]) -> BTreeSet<usize> {
        ids.iter().copied().collect()
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(DiGraph::new(2, vec![(1, 1)]).is_err());
        assert!(DiGraph::new(2, vec![(1, 2), (1, 2)]).is_err());
        assert!(DiGraph::new(2, vec![(0, 1)]).is_err());
        assert!(DiGraph::new(2, vec![(1, 3)]).is_err());
    }

    #[test]
    fn reachability_on_chain() {
        let g = chain(3);
        let r = input_reachable_set(&g, &drivers(&[1])).unwrap();
        assert_eq!(r, drivers(&[1, 2, 3]));
        let r = input_reachable_set(&g, &drivers(&[2])).unwrap();
        assert_eq!(r, drivers(&[2, 3]));
    }

    #[test]
    fn reachability_without_edges() {
        let g = DiGraph::new(2, vec![]).unwrap();
        let r = input_reachable_set(&g, &drivers(&[1])).unwrap();
        assert_eq!(r, drivers(&[1]));
    }

    #[test]
    fn global_reachability_examples() {
        let g = chain(3);
        assert!(is_globally_input_reachable(&g, &drivers(&[1])).unwrap());
        assert!(!is_globally_input_reachable(&g, &drivers(&[3])).unwrap());
        // Two disjoint chains, one driver per chain root.
        let g = DiGraph::new(4, vec![(1, 2), (3, 4)]).unwrap();
        assert!(is_globally_input_reachable(&g, &drivers(&[1, 3])).unwrap());
    }

    #[test]
    fn driver_out_of_range_is_rejected() {
        let g = chain(3);
        assert!(input_reachable_set(&g, &drivers(&[4])).is_err());
    }

    #[test]
    fn forest_on_chain() {
        let f = rooted_spanning_forest(&chain(3), &drivers(&[1])).unwrap();
        assert_eq!(f.trees.len(), 1);
        assert_eq!(f.trees[0].order, vec![1, 2, 3]);
        assert_eq!(f.trees[0].parent[&2], 1);
        assert_eq!(f.trees[0].parent[&3], 2);
    }

    #[test]
    fn forest_on_star() {
        let g = DiGraph::new(4, vec![(1, 2), (1, 3), (1, 4)]).unwrap();
        let f = rooted_spanning_forest(&g, &drivers(&[1])).unwrap();
        assert_eq!(f.trees[0].order, vec![1, 2, 3, 4]);
        assert!(f.trees[0].parent.values().all(|&p| p == 1));
    }

    #[test]
    fn forest_reports_unreachable() {
        let g = chain(3);
        match rooted_spanning_forest(&g, &drivers(&[2])) {
            Err(crate::Error::NotInputReachable { unreachable }) => {
                assert_eq!(unreachable, vec![1]);
            }
            other => panic!("expected unreachable error, got {other:?}"),
        }
    }

    #[test]
    fn every_driver_roots_its_own_tree() {
        let g = chain(4);
        let f = rooted_spanning_forest(&g, &drivers(&[1, 3])).unwrap();
        assert_eq!(f.trees.len(), 2);
        assert_eq!(f.trees[0].root, 1);
        assert_eq!(f.trees[0].order, vec![1, 2]);
        assert_eq!(f.trees[1].root, 3);
        assert_eq!(f.trees[1].order, vec![3, 4]);
    }

    #[test]
    fn incidence_single_edge() {
        let g = DiGraph::new(2, vec![(1, 2)]).unwrap();
        let pair = incidence_matrices(&g);
        assert_eq!(pair.k_incidence, dmatrix![1.0, -1.0]);
        assert_eq!(pair.k_head, dmatrix![0.0; 1.0]);
        // −K·w·K_I for w = diag(w1)
        let w = dmatrix![3.0];
        let lap = -&pair.k_head * w * &pair.k_incidence;
        assert_eq!(lap, dmatrix![0.0, 0.0; -3.0, 3.0]);
    }

    #[test]
    fn incidence_two_cycle() {
        let g = DiGraph::new(2, vec![(1, 2), (2, 1)]).unwrap();
        let pair = incidence_matrices(&g);
        assert_eq!(pair.k_incidence, dmatrix![1.0, -1.0; -1.0, 1.0]);
        assert_eq!(pair.k_head, dmatrix![0.0, 1.0; 1.0, 0.0]);
    }

    #[test]
    fn incidence_chain_of_three() {
        let pair = incidence_matrices(&chain(3));
        assert_eq!(pair.k_incidence, dmatrix![1.0, -1.0, 0.0; 0.0, 1.0, -1.0]);
    }

    #[test]
    fn incidence_of_empty_edge_set_is_degenerate() {
        let g = DiGraph::new(2, vec![]).unwrap();
        let pair = incidence_matrices(&g);
        assert_eq!(pair.k_incidence.nrows(), 0);
        assert_eq!(pair.k_head.ncols(), 0);
    }

    #[test]
    fn cycle_vertices_examples() {
        assert!(chain(3).cycle_vertices().is_empty());
        let g = DiGraph::new(2, vec![(1, 2), (2, 1)]).unwrap();
        assert_eq!(g.cycle_vertices(), drivers(&[1, 2]));
    }

    #[test]
    fn aux_graph_self_loop_counts_as_cycle() {
        // H with H_{22} ≠ 0 only: self-loop on state vertex 2 (0-based 1).
        let mut h = Pattern::zeros(2, 2);
        h.set(1, 1, true);
        let p = Pattern::zeros(2, 0);
        let aux = AuxGraph::from_patterns(&h, &p).unwrap();
        assert_eq!(aux.cycle_vertices(), [1usize].into_iter().collect());
        assert!(!aux.every_cycle_input_reachable());
    }

    #[test]
    fn aux_graph_cycle_reachability() {
        // H = [[0,1],[1,0]] pattern: edges v1→v2 and v2→v1 (a 2-cycle).
        let mut h = Pattern::zeros(2, 2);
        h.set(0, 1, true);
        h.set(1, 0, true);
        // P touching vertex 1.
        let mut p = Pattern::zeros(2, 1);
        p.set(0, 0, true);
        let aux = AuxGraph::from_patterns(&h, &p).unwrap();
        assert!(aux.every_cycle_input_reachable());
        // Same H, all-zero P: the cycle is unreachable.
        let p0 = Pattern::zeros(2, 1);
        let aux0 = AuxGraph::from_patterns(&h, &p0).unwrap();
        assert!(!aux0.every_cycle_input_reachable());
    }

    #[test]
    fn aux_graph_without_cycles_is_vacuously_fine() {
        let h = Pattern::zeros(3, 3);
        let p = Pattern::zeros(3, 1);
        let aux = AuxGraph::from_patterns(&h, &p).unwrap();
        assert!(aux.every_cycle_input_reachable());
    }

    fn random_digraph(seed: u64, n: usize, density: f64) -> DiGraph {
        let mut rng = crate::linalg::RandomSource::from_seed(seed);
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j && rng.uniform().abs() < density {
                    edges.push((i, j));
                }
            }
        }
        DiGraph::new(n, edges).unwrap()
    }

    proptest! {
        #[test]
        fn forest_edges_are_graph_edges_in_topological_order(seed in 0u64..300) {
            let n = 2 + (seed % 6) as usize;
            let g = random_digraph(seed, n, 0.5);
            let ds = drivers(&[1]);
            if let Ok(f) = rooted_spanning_forest(&g, &ds) {
                let covered: usize = f.trees.iter().map(|t| t.order.len()).sum();
                prop_assert_eq!(covered, n);
                prop_assert_eq!(f.edges().len(), n - f.trees.len());
                for t in &f.trees {
                    for (pos, v) in t.order.iter().enumerate() {
                        if *v == t.root {
                            prop_assert_eq!(pos, 0);
                            continue;
                        }
                        let par = t.parent[v];
                        prop_assert!(g.has_edge(par, *v));
                        let par_pos = t.order.iter().position(|x| *x == par).unwrap();
                        prop_assert!(par_pos < pos);
                    }
                }
            }
        }

        #[test]
        fn adding_input_columns_is_monotone(seed in 0u64..300) {
            // every_cycle_input_reachable never flips true → false when
            // more driver columns are added to P.
            let n = 2 + (seed % 5) as usize;
            let g = random_digraph(seed.wrapping_add(917), n, 0.4);
            let mut h = Pattern::zeros(n, n);
            for &(i, j) in g.edges() {
                h.set(j - 1, i - 1, true);
            }
            let mut p_small = Pattern::zeros(n, 1);
            p_small.set(0, 0, true);
            let mut p_big = Pattern::zeros(n, 2);
            p_big.set(0, 0, true);
            p_big.set(n - 1, 1, true);
            let small = AuxGraph::from_patterns(&h, &p_small).unwrap();
            let big = AuxGraph::from_patterns(&h, &p_big).unwrap();
            if small.every_cycle_input_reachable() {
                prop_assert!(big.every_cycle_input_reachable());
            }
        }
    }
}
