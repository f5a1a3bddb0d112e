//! The system data model and lumped assembly: subsystem dynamics coupled
//! through relative outputs over a weighted digraph, the Kronecker-product
//! lumped pair, the incidence-based linear parameterization, heterogeneous
//! variants, built-in example generators, and JSON ingestion.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::graph::{self, DiGraph, Pattern};
use crate::linalg::RandomSource;
use crate::{Error, Result};

/// Per-edge weight map; keys are 1-based `(from, to)` edges.
pub type EdgeWeights = BTreeMap<(usize, usize), f64>;

/// The fixed triple `(A, B, C)` describing each node's intrinsic
/// dynamics: `n` states, `r` interaction channels, `B = [b_1 … b_r]`,
/// `C = col(c_1, …, c_r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemDynamics {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl SubsystemDynamics {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput("A must be square".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput(
                "state dimension must be positive".into(),
            ));
        }
        let r = b.ncols();
        if r == 0 {
            return Err(Error::InvalidInput("channel count must be positive".into()));
        }
        if b.nrows() != n {
            return Err(Error::InvalidInput(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        if c.nrows() != r || c.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "C is {}x{}, expected {r}x{n}",
                c.nrows(),
                c.ncols()
            )));
        }
        for m in [&a, &b, &c] {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput(
                    "subsystem matrices must be finite".into(),
                ));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn channel_count(&self) -> usize {
        self.b.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// Input column `b_k` (0-based k).
    pub fn b_col(&self, k: usize) -> DVector<f64> {
        self.b.column(k).clone_owned()
    }

    /// Output row `c_k` (0-based k).
    pub fn c_row(&self, k: usize) -> RowDVector<f64> {
        self.c.row(k).clone_owned()
    }

    /// The product `BC`.
    pub fn bc(&self) -> DMatrix<f64> {
        &self.b * &self.c
    }
}

/// Interaction graph together with the driving-vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    graph: DiGraph,
    drivers: BTreeSet<usize>,
}

impl NetworkTopology {
    pub fn new(graph: DiGraph, drivers: BTreeSet<usize>) -> Result<Self> {
        if drivers.is_empty() {
            return Err(Error::InvalidInput("driver set must be nonempty".into()));
        }
        for &d in &drivers {
            if d == 0 || d > graph.vertex_count() {
                return Err(Error::InvalidInput(format!(
                    "driver {d} out of range for {} vertices",
                    graph.vertex_count()
                )));
            }
        }
        Ok(Self { graph, drivers })
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn drivers(&self) -> &BTreeSet<usize> {
        &self.drivers
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Selector matrix `Δ = [e_i]` over drivers in ascending order.
    pub fn delta(&self) -> DMatrix<f64> {
        let n = self.vertex_count();
        let mut delta = DMatrix::<f64>::zeros(n, self.drivers.len());
        for (col, &d) in self.drivers.iter().enumerate() {
            delta[(d - 1, col)] = 1.0;
        }
        delta
    }
}

/// The three subsystem interaction fashions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fashion {
    #[serde(rename = "siso")]
    Siso,
    #[serde(rename = "equal")]
    EquallyWeighted,
    #[serde(rename = "multi")]
    MultiWeighted,
}

impl std::fmt::Display for Fashion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Fashion::Siso => "siso",
            Fashion::EquallyWeighted => "equal",
            Fashion::MultiWeighted => "multi",
        };
        write!(f, "{name}")
    }
}

/// Per-channel edge weights. Equally weighted assignments store their
/// shared map once; multi-weighted assignments store one map per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment {
    maps: Vec<EdgeWeights>,
}

impl WeightAssignment {
    /// Single stored map: SISO, or the shared map of an equally
    /// weighted assignment.
    pub fn single(map: EdgeWeights) -> Self {
        Self { maps: vec![map] }
    }

    pub fn multi(maps: Vec<EdgeWeights>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput(
                "weight assignment needs at least one channel".into(),
            ));
        }
        Ok(Self { maps })
    }

    pub fn stored_channels(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[EdgeWeights] {
        &self.maps
    }

    /// Map feeding Laplacian `L_k` (0-based k) under the given fashion.
    pub fn channel(&self, k: usize, fashion: Fashion) -> &EdgeWeights {
        match fashion {
            Fashion::EquallyWeighted => &self.maps[0],
            _ => &self.maps[k],
        }
    }

    /// Checks the stored shape against a fashion and channel count.
    pub fn check_fashion(&self, fashion: Fashion, r: usize) -> Result<()> {
        let ok = match fashion {
            Fashion::Siso => r == 1 && self.maps.len() == 1,
            Fashion::EquallyWeighted => self.maps.len() == 1,
            Fashion::MultiWeighted => self.maps.len() == r,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFashion(format!(
                "{} channel maps stored, fashion {fashion} with r={r}",
                self.maps.len()
            )))
        }
    }

    /// Uniform scaling of every stored weight.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            maps: self
                .maps
                .iter()
                .map(|m| m.iter().map(|(&e, &w)| (e, w * factor)).collect())
                .collect(),
        }
    }
}

/// The assembled pair `A_sys = I⊗A − Σ_k L_k⊗b_k c_k`, `B_sys = Δ⊗B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpedSystem {
    pub a_sys: DMatrix<f64>,
    pub b_sys: DMatrix<f64>,
}

/// Weighted Laplacian of the topology: entry `(i, j)`, `i ≠ j`, equals
/// `−w(edge j→i)` and each diagonal entry makes its row sum zero.
pub fn laplacian_from_weights(topo: &NetworkTopology, w: &EdgeWeights) -> Result<DMatrix<f64>> {
    let n = topo.vertex_count();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (&(from, to), &wt) in w {
        if !topo.graph().has_edge(from, to) {
            return Err(Error::InvalidInput(format!(
                "weight on non-edge ({from},{to})"
            )));
        }
        if !wt.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite weight on edge ({from},{to})"
            )));
        }
        lap[(to - 1, from - 1)] -= wt;
        lap[(to - 1, to - 1)] += wt;
    }
    Ok(lap)
}

/// Assemble the lumped pair for a fashion-consistent weight assignment.
pub fn assemble_lumped(
    sub: &SubsystemDynamics,
    topo: &NetworkTopology,
    fashion: Fashion,
    w: &WeightAssignment,
) -> Result<LumpedSystem> {
    if fashion == Fashion::Siso && sub.channel_count() != 1 {
        return Err(Error::InvalidFashion(format!(
            "siso fashion requires r=1, got r={}",
            sub.channel_count()
        )));
    }
    w.check_fashion(fashion, sub.channel_count())?;
    let n_v = topo.vertex_count();
    let eye = DMatrix::<f64>::identity(n_v, n_v);
    let mut a_sys = eye.kronecker(sub.a());
    for k in 0..sub.channel_count() {
        let lap = laplacian_from_weights(topo, w.channel(k, fashion))?;
        let outer = sub.b_col(k) * sub.c_row(k);
        a_sys -= lap.kronecker(&outer);
    }
    let b_sys = topo.delta().kronecker(sub.b());
    Ok(LumpedSystem { a_sys, b_sys })
}

/// Rank-one linear parameterization of `[A_sys, B_sys]` over the edge
/// weights: `A_sys = I⊗A + [K⊗b_1 … K⊗b_r]·diag{Λ_1…Λ_r}·col{K_I⊗c_i}`
/// with `B_sys = Δ⊗B` constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParameterization {
    /// `I⊗A`.
    pub constant_a: DMatrix<f64>,
    /// `Δ⊗B`.
    pub input_part: DMatrix<f64>,
    /// `[K⊗b_1, …, K⊗b_r]`, one block per channel.
    pub input_factors: DMatrix<f64>,
    /// `col{K_I⊗c_1, …, K_I⊗c_r}`.
    pub output_stack: DMatrix<f64>,
    /// Edge order fixing the Λ diagonals.
    pub edges: Vec<(usize, usize)>,
    channel_count: usize,
}

impl LinearParameterization {
    pub fn is_degenerate(&self) -> bool {
        self.edges.is_empty()
    }

    /// Rebuild `(A_sys, B_sys)` at a concrete weight assignment. Must
    /// agree exactly with [`assemble_lumped`].
    pub fn reconstruct(&self, w: &WeightAssignment, fashion: Fashion) -> Result<LumpedSystem> {
        w.check_fashion(fashion, self.channel_count)?;
        let m = self.edges.len();
        let mut diag = DMatrix::<f64>::zeros(self.channel_count * m, self.channel_count * m);
        for k in 0..self.channel_count {
            let map = w.channel(k, fashion);
            for (pos, edge) in self.edges.iter().enumerate() {
                if let Some(&wt) = map.get(edge) {
                    diag[(k * m + pos, k * m + pos)] = wt;
                }
            }
        }
        let a_sys = &self.constant_a + &self.input_factors * diag * &self.output_stack;
        Ok(LumpedSystem {
            a_sys,
            b_sys: self.input_part.clone(),
        })
    }
}

/// Build the rank-one parameterization from the incidence factorization
/// `L_k = −K Λ_k K_I`. An empty edge set yields a degenerate (constant)
/// parameterization with zero-width factors.
pub fn linear_parameterization(
    sub: &SubsystemDynamics,
    topo: &NetworkTopology,
) -> LinearParameterization {
    let n_v = topo.vertex_count();
    let r = sub.channel_count();
    let m = topo.graph().edges().len();
    let pair = graph::incidence_matrices(topo.graph());
    let eye = DMatrix::<f64>::identity(n_v, n_v);
    let constant_a = eye.kronecker(sub.a());
    let input_part = topo.delta().kronecker(sub.b());
    let n = sub.state_dim();
    let mut input_factors = DMatrix::<f64>::zeros(n * n_v, r * m);
    let mut output_stack = DMatrix::<f64>::zeros(r * m, n * n_v);
    for k in 0..r {
        let b_col = DMatrix::from_column_slice(n, 1, sub.b_col(k).as_slice());
        let gk = pair.k_head.kronecker(&b_col);
        input_factors
            .view_mut((0, k * m), (n * n_v, m))
            .copy_from(&gk);
        let c_vals: Vec<f64> = sub.c_row(k).iter().copied().collect();
        let c_row = DMatrix::from_row_slice(1, n, &c_vals);
        let hk = pair.k_incidence.kronecker(&c_row);
        output_stack
            .view_mut((k * m, 0), (m, n * n_v))
            .copy_from(&hk);
    }
    LinearParameterization {
        constant_a,
        input_part,
        input_factors,
        output_stack,
        edges: topo.graph().edges().to_vec(),
        channel_count: r,
    }
}

/// One heterogeneous SISO subsystem `(A_[i], b_[i], c_[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroSubsystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
}

impl HeteroSubsystem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::InvalidInput(
                "heterogeneous subsystem dimensions are inconsistent".into(),
            ));
        }
        Ok(Self { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Per-vertex subsystem triples; state dimensions may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroSubsystemList {
    pub subs: Vec<HeteroSubsystem>,
}

impl HeteroSubsystemList {
    pub fn total_dim(&self) -> usize {
        self.subs.iter().map(|s| s.dim()).sum()
    }
}

/// Block assembly for heterogeneous SISO subsystems: diagonal blocks
/// `A_[i] − (Σ_j l_ij) b_[i]c_[i]`, off-diagonal blocks `l_ij·b_[i]c_[j]`,
/// and `B_sys` stacking `b_[i]` at driver blocks.
pub fn assemble_heterogeneous(
    subs: &HeteroSubsystemList,
    topo: &NetworkTopology,
    w: &EdgeWeights,
) -> Result<LumpedSystem> {
    let n_v = topo.vertex_count();
    if subs.subs.len() != n_v {
        return Err(Error::InvalidInput(format!(
            "{} subsystem triples for {n_v} vertices",
            subs.subs.len()
        )));
    }
    let lap = laplacian_from_weights(topo, w)?;
    let dims: Vec<usize> = subs.subs.iter().map(|s| s.dim()).collect();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total = subs.total_dim();
    let mut a_sys = DMatrix::<f64>::zeros(total, total);
    for i in 0..n_v {
        let si = &subs.subs[i];
        let row_sum = lap[(i, i)];
        let diag = &si.a - row_sum * &si.b * &si.c;
        a_sys
            .view_mut((offsets[i], offsets[i]), (dims[i], dims[i]))
            .copy_from(&diag);
        for j in 0..n_v {
            if i == j {
                continue;
            }
            let l_ij = -lap[(i, j)];
            if l_ij != 0.0 {
                let block = l_ij * &si.b * &subs.subs[j].c;
                a_sys
                    .view_mut((offsets[i], offsets[j]), (dims[i], dims[j]))
                    .copy_from(&block);
            }
        }
    }
    let mut b_sys = DMatrix::<f64>::zeros(total, topo.drivers().len());
    for (col, &d) in topo.drivers().iter().enumerate() {
        let i = d - 1;
        b_sys
            .view_mut((offsets[i], col), (dims[i], 1))
            .copy_from(&subs.subs[i].b);
    }
    Ok(LumpedSystem { a_sys, b_sys })
}

/// Structured perturbation of the subsystem state matrix: a boolean
/// mask whose nonzero entries vary independently per vertex, with
/// optional concrete realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroPerturbation {
    pub pattern: Pattern,
    pub per_vertex: Option<Vec<DMatrix<f64>>>,
}

impl HeteroPerturbation {
    pub fn validate(&self, n: usize, vertices: usize) -> Result<()> {
        if self.pattern.rows() != n || self.pattern.cols() != n {
            return Err(Error::InvalidInput(format!(
                "perturbation pattern is {}x{}, expected {n}x{n}",
                self.pattern.rows(),
                self.pattern.cols()
            )));
        }
        if let Some(fills) = &self.per_vertex {
            if fills.len() != vertices {
                return Err(Error::InvalidInput(format!(
                    "{} perturbation realizations for {vertices} vertices",
                    fills.len()
                )));
            }
            for (v, m) in fills.iter().enumerate() {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::InvalidInput(format!(
                        "realization {} is {}x{}, expected {n}x{n}",
                        v + 1,
                        m.nrows(),
                        m.ncols()
                    )));
                }
                for i in 0..n {
                    for j in 0..n {
                        if !self.pattern.get(i, j) && m[(i, j)] != 0.0 {
                            return Err(Error::InvalidInput(format!(
                                "realization {} has value outside the pattern at ({},{})",
                                v + 1,
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// One random realization of the mask, entries bounded away from zero.
    pub fn sample_fill(&self, rng: &mut RandomSource) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(self.pattern.rows(), self.pattern.cols());
        for i in 0..self.pattern.rows() {
            for j in 0..self.pattern.cols() {
                if self.pattern.get(i, j) {
                    m[(i, j)] = rng.nonzero();
                }
            }
        }
        m
    }
}

/// Lumped assembly with per-vertex state perturbations added on the
/// diagonal blocks (SISO coupling).
pub fn assemble_perturbed(
    sub: &SubsystemDynamics,
    topo: &NetworkTopology,
    w: &WeightAssignment,
    fills: &[DMatrix<f64>],
) -> Result<LumpedSystem> {
    if fills.len() != topo.vertex_count() {
        return Err(Error::InvalidInput(format!(
            "{} perturbation fills for {} vertices",
            fills.len(),
            topo.vertex_count()
        )));
    }
    let n = sub.state_dim();
    let mut lumped = assemble_lumped(sub, topo, Fashion::Siso, w)?;
    for (i, fill) in fills.iter().enumerate() {
        if fill.nrows() != n || fill.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "perturbation fill {} has wrong dimensions",
                i + 1
            )));
        }
        let mut block = lumped.a_sys.view_mut((i * n, i * n), (n, n));
        block += fill.view((0, 0), (n, n));
    }
    Ok(lumped)
}

/// Complete analyzable model: subsystem, topology, fashion, optional
/// (advisory) reference weights, optional structured perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub sub: SubsystemDynamics,
    pub topo: NetworkTopology,
    pub fashion: Fashion,
    pub weights: Option<WeightAssignment>,
    pub hetero: Option<HeteroPerturbation>,
}

impl Model {
    pub fn new(
        sub: SubsystemDynamics,
        topo: NetworkTopology,
        fashion: Fashion,
        weights: Option<WeightAssignment>,
        hetero: Option<HeteroPerturbation>,
    ) -> Result<Self> {
        if fashion == Fashion::Siso && sub.channel_count() != 1 {
            return Err(Error::InvalidFashion("siso fashion requires r = 1".into()));
        }
        if let Some(w) = &weights {
            w.check_fashion(fashion, sub.channel_count())?;
            for map in w.maps() {
                for &(from, to) in map.keys() {
                    if !topo.graph().has_edge(from, to) {
                        return Err(Error::InvalidInput(format!(
                            "reference weight on non-edge ({from},{to})"
                        )));
                    }
                }
            }
        }
        if let Some(h) = &hetero {
            if fashion != Fashion::Siso {
                return Err(Error::InvalidFashion(
                    "structured perturbations require the siso fashion".into(),
                ));
            }
            h.validate(sub.state_dim(), topo.vertex_count())?;
        }
        Ok(Self {
            sub,
            topo,
            fashion,
            weights,
            hetero,
        })
    }
}

/// Built-in example generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleName {
    /// Mass-spring-damper chain: n=2, r=2, multi-weighted.
    Msd,
    /// Connected tanks: n=1, SISO.
    Tanks,
    /// Power network swing dynamics: n=2, SISO with a damping
    /// perturbation at entry (2,2).
    Power,
}

impl std::str::FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "msd" => Ok(ExampleName::Msd),
            "tanks" => Ok(ExampleName::Tanks),
            "power" => Ok(ExampleName::Power),
            other => Err(Error::InvalidInput(format!("unknown example '{other}'"))),
        }
    }
}

fn bidirectional_chain(n: usize) -> Result<DiGraph> {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((i, i + 1));
        edges.push((i + 1, i));
    }
    DiGraph::new(n, edges)
}

fn unit_weights(g: &DiGraph) -> EdgeWeights {
    g.edges().iter().map(|&e| (e, 1.0)).collect()
}

/// Generate a named example model with its reference weights (the
/// weights induced by unit physical constants). The reference weights
/// are advisory; analysis treats weights as free.
pub fn example_model(name: ExampleName, n_vertices: usize) -> Result<(Model, WeightAssignment)> {
    if n_vertices < 2 {
        return Err(Error::InvalidInput(
            "examples need at least 2 subsystems".into(),
        ));
    }
    let graph = bidirectional_chain(n_vertices)?;
    let reference = unit_weights(&graph);
    let drivers: BTreeSet<usize> = [1].into_iter().collect();
    match name {
        ExampleName::Msd => {
            // Unit masses, springs and dampers make every per-channel
            // weight k_i/m_i, μ_i/m_i equal to one.
            let sub = SubsystemDynamics::new(
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
                DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]),
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            )?;
            let topo = NetworkTopology::new(graph, drivers)?;
            let weights = WeightAssignment::multi(vec![reference.clone(), reference])?;
            let model = Model::new(
                sub,
                topo,
                Fashion::MultiWeighted,
                Some(weights.clone()),
                None,
            )?;
            Ok((model, weights))
        }
        ExampleName::Tanks => {
            let sub = SubsystemDynamics::new(
                DMatrix::from_row_slice(1, 1, &[0.0]),
                DMatrix::from_row_slice(1, 1, &[1.0]),
                DMatrix::from_row_slice(1, 1, &[1.0]),
            )?;
            let topo = NetworkTopology::new(graph, drivers)?;
            let weights = WeightAssignment::single(reference);
            let model = Model::new(sub, topo, Fashion::Siso, Some(weights.clone()), None)?;
            Ok((model, weights))
        }
        ExampleName::Power => {
            let sub = SubsystemDynamics::new(
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
                DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
                DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            )?;
            let topo = NetworkTopology::new(graph, drivers)?;
            let mut pattern = Pattern::zeros(2, 2);
            pattern.set(1, 1, true);
            // Unit inertia and damping give −d_i/m_i = −1 at entry (2,2).
            let fill = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]);
            let hetero = HeteroPerturbation {
                pattern,
                per_vertex: Some(vec![fill; n_vertices]),
            };
            let weights = WeightAssignment::single(reference);
            let model = Model::new(
                sub,
                topo,
                Fashion::Siso,
                Some(weights.clone()),
                Some(hetero),
            )?;
            Ok((model, weights))
        }
    }
}

// ---------------------------------------------------------------------------
// JSON document schema
// ---------------------------------------------------------------------------

/// Parse an `"i,j"` edge key (1-based).
pub fn parse_edge_key(key: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "edge key '{key}' must be 'i,j'"
        )));
    }
    let i = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidInput(format!("bad vertex id in key '{key}'")))?;
    let j = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidInput(format!("bad vertex id in key '{key}'")))?;
    Ok((i, j))
}

/// Parse an `"i,j[,k]"` weight key; the channel defaults to 1.
pub fn parse_weight_key(key: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "weight key '{key}' must be 'i,j' or 'i,j,k'"
        )));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("bad index in key '{key}'")))
    };
    let i = parse(parts[0])?;
    let j = parse(parts[1])?;
    let k = if parts.len() == 3 {
        parse(parts[2])?
    } else {
        1
    };
    Ok((i, j, k))
}

pub(crate) fn edge_key(edge: (usize, usize)) -> String {
    format!("{},{}", edge.0, edge.1)
}

fn default_channel() -> usize {
    1
}

/// One channel of reference weights in a model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelWeightsDocument {
    #[serde(default = "default_channel")]
    pub k: usize,
    pub values: BTreeMap<String, f64>,
}

/// `weights` accepts one channel object or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsDocument {
    One(ChannelWeightsDocument),
    Many(Vec<ChannelWeightsDocument>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeteroDocument {
    pub pattern: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_vertex: Option<Vec<Vec<Vec<f64>>>>,
}

/// On-disk model document. Indices are 1-based and unknown keys are
/// rejected. `N` (the vertex count) may be omitted, in which case it is
/// inferred from the largest id used by `edges` and `drivers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub n: usize,
    pub r: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    pub edges: Vec<(usize, usize)>,
    pub drivers: Vec<usize>,
    pub fashion: Fashion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hetero: Option<HeteroDocument>,
}

fn matrix_from_rows(
    rows: &[Vec<f64>],
    what: &str,
    nrows: usize,
    ncols: usize,
) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidInput(format!(
            "{what} must be {nrows}x{ncols}"
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn into_model(self) -> Result<Model> {
        let sub = SubsystemDynamics::new(
            matrix_from_rows(&self.a, "A", self.n, self.n)?,
            matrix_from_rows(&self.b, "B", self.n, self.r)?,
            matrix_from_rows(&self.c, "C", self.r, self.n)?,
        )?;
        let inferred = self
            .edges
            .iter()
            .flat_map(|&(i, j)| [i, j])
            .chain(self.drivers.iter().copied())
            .max()
            .unwrap_or(0);
        let n_vertices = match self.vertex_count {
            Some(n) => {
                if n < inferred {
                    return Err(Error::InvalidInput(format!(
                        "N={n} but ids up to {inferred} are used"
                    )));
                }
                n
            }
            None => inferred,
        };
        let graph = DiGraph::new(n_vertices, self.edges.clone())?;
        let topo = NetworkTopology::new(graph, self.drivers.iter().copied().collect())?;
        let weights = match self.weights {
            None => None,
            Some(doc) => Some(weights_from_document(&doc, self.r, self.fashion)?),
        };
        let hetero = match self.hetero {
            None => None,
            Some(doc) => {
                let rows = doc.pattern.len();
                let cols = doc.pattern.first().map_or(0, |r| r.len());
                if doc.pattern.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidInput("ragged hetero pattern".into()));
                }
                let mut pattern = Pattern::zeros(rows, cols);
                for (i, row) in doc.pattern.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        match v {
                            0 => {}
                            1 => pattern.set(i, j, true),
                            other => {
                                return Err(Error::InvalidInput(format!(
                                    "pattern entries must be 0 or 1, got {other}"
                                )))
                            }
                        }
                    }
                }
                let per_vertex = match doc.per_vertex {
                    None => None,
                    Some(fills) => {
                        let mut out = Vec::with_capacity(fills.len());
                        for f in &fills {
                            out.push(matrix_from_rows(f, "per_vertex entry", self.n, self.n)?);
                        }
                        Some(out)
                    }
                };
                Some(HeteroPerturbation {
                    pattern,
                    per_vertex,
                })
            }
        };
        Model::new(sub, topo, self.fashion, weights, hetero)
    }

    pub fn from_model(model: &Model) -> Self {
        let weights = model.weights.as_ref().map(|w| {
            let channels: Vec<ChannelWeightsDocument> = w
                .maps()
                .iter()
                .enumerate()
                .map(|(k, map)| ChannelWeightsDocument {
                    k: k + 1,
                    values: map.iter().map(|(&e, &v)| (edge_key(e), v)).collect(),
                })
                .collect();
            if channels.len() == 1 {
                WeightsDocument::One(channels.into_iter().next().unwrap())
            } else {
                WeightsDocument::Many(channels)
            }
        });
        let hetero = model.hetero.as_ref().map(|h| HeteroDocument {
            pattern: (0..h.pattern.rows())
                .map(|i| {
                    (0..h.pattern.cols())
                        .map(|j| u8::from(h.pattern.get(i, j)))
                        .collect()
                })
                .collect(),
            per_vertex: h
                .per_vertex
                .as_ref()
                .map(|fills| fills.iter().map(matrix_to_rows).collect()),
        });
        ModelDocument {
            n: model.sub.state_dim(),
            r: model.sub.channel_count(),
            a: matrix_to_rows(model.sub.a()),
            b: matrix_to_rows(model.sub.b()),
            c: matrix_to_rows(model.sub.c()),
            vertex_count: Some(model.topo.vertex_count()),
            edges: model.topo.graph().edges().to_vec(),
            drivers: model.topo.drivers().iter().copied().collect(),
            fashion: model.fashion,
            weights,
            hetero,
        }
    }
}

fn weights_from_document(
    doc: &WeightsDocument,
    r: usize,
    fashion: Fashion,
) -> Result<WeightAssignment> {
    let channels: Vec<&ChannelWeightsDocument> = match doc {
        WeightsDocument::One(c) => vec![c],
        WeightsDocument::Many(cs) => cs.iter().collect(),
    };
    let stored = match fashion {
        Fashion::Siso | Fashion::EquallyWeighted => 1,
        Fashion::MultiWeighted => r,
    };
    let mut maps: Vec<EdgeWeights> = vec![EdgeWeights::new(); stored];
    let mut seen = BTreeSet::new();
    for ch in channels {
        if ch.k == 0 || ch.k > stored {
            return Err(Error::InvalidInput(format!(
                "weights channel k={} out of range 1..={stored} for fashion {fashion}",
                ch.k
            )));
        }
        if !seen.insert(ch.k) {
            return Err(Error::InvalidInput(format!(
                "duplicate weights channel k={}",
                ch.k
            )));
        }
        for (key, &value) in &ch.values {
            let edge = parse_edge_key(key)?;
            maps[ch.k - 1].insert(edge, value);
        }
    }
    if stored == 1 {
        Ok(WeightAssignment::single(maps.into_iter().next().unwrap()))
    } else {
        WeightAssignment::multi(maps)
    }
}
