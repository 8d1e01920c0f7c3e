//! Syndrome belief-propagation decoding over GF(2).
//!
//! The depolarizing channel is treated as two independent binary symmetric
//! channels: a stabilizer matrix `A = (A1 | A2)` on `N` qubits becomes a
//! Tanner graph over `2N` binary variables (the first `N` are the X error
//! bits, the last `N` the Z error bits) with adjacency `Ã = (A2 | A1)`, the
//! half swap being forced by the symplectic syndrome. Messages run in the
//! log-likelihood-ratio domain with a flooding schedule and stop early once
//! the hard decision reproduces the observed syndrome. A retry heuristic
//! perturbs the priors around unsatisfied checks to escape the degenerate
//! fixed points stabilizer codes are prone to.

use crate::bits::BitVec;
use crate::stabilizer::{PauliErrorPattern, StabilizerMatrix, Syndrome};
use rand::Rng;
use thiserror::Error;

/// Messages and posteriors are clamped to this magnitude in LLR domain.
pub const LLR_CLAMP: f64 = 30.0;
/// Priors are clamped into [PRIOR_FLOOR, 1 - PRIOR_FLOOR].
pub const PRIOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecoderError {
    #[error("check {check} has no adjacent variables")]
    IsolatedCheck { check: usize },
}

/// How a single flip-probability estimate is split over the two binary
/// channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorSplit {
    /// Exact per-half marginal of the symmetric depolarizing model:
    /// `P(X or Y) = P(Z or Y) = 2f'/3`.
    #[default]
    Marginal,
    /// The raw flip probability `f'` on every binary variable.
    Raw,
}

impl std::fmt::Display for PriorSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PriorSplit::Marginal => write!(f, "marginal"),
            PriorSplit::Raw => write!(f, "raw"),
        }
    }
}

/// Bipartite check/variable adjacency in compressed form.
///
/// Immutable once built; any number of decode contexts may share it.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    n_vars: usize,
    check_offsets: Vec<usize>,
    edge_var: Vec<u32>,
    var_offsets: Vec<usize>,
    var_edge: Vec<u32>,
    max_check_degree: usize,
}

impl TannerGraph {
    /// Builds a graph from explicit per-check variable lists.
    pub fn from_checks(n_vars: usize, checks: &[Vec<usize>]) -> Self {
        let mut check_offsets = Vec::with_capacity(checks.len() + 1);
        let mut edge_var = Vec::new();
        check_offsets.push(0);
        for check in checks {
            let mut vars: Vec<usize> = check.clone();
            vars.sort_unstable();
            vars.dedup();
            for &v in &vars {
                assert!(v < n_vars, "variable {v} out of range {n_vars}");
                edge_var.push(v as u32);
            }
            check_offsets.push(edge_var.len());
        }
        Self::finish(n_vars, check_offsets, edge_var)
    }

    /// Builds the decoding graph of a stabilizer matrix: `2N` variables and
    /// one check per row, adjacent through `Ã = (A2 | A1)`.
    pub fn from_stabilizers(a: &StabilizerMatrix) -> Self {
        let n = a.n_qubits();
        let mut check_offsets = Vec::with_capacity(a.n_rows() + 1);
        let mut edge_var = Vec::new();
        check_offsets.push(0);
        for row in a.rows() {
            // Z half of the stabilizer detects X errors (variables 0..N)
            for i in row.z().ones() {
                edge_var.push(i as u32);
            }
            // X half detects Z errors (variables N..2N)
            for i in row.x().ones() {
                edge_var.push((n + i) as u32);
            }
            check_offsets.push(edge_var.len());
        }
        Self::finish(2 * n, check_offsets, edge_var)
    }

    fn finish(n_vars: usize, check_offsets: Vec<usize>, edge_var: Vec<u32>) -> Self {
        let n_checks = check_offsets.len() - 1;
        let mut var_degree = vec![0usize; n_vars];
        for &v in &edge_var {
            var_degree[v as usize] += 1;
        }
        let mut var_offsets = Vec::with_capacity(n_vars + 1);
        var_offsets.push(0);
        for i in 0..n_vars {
            var_offsets.push(var_offsets[i] + var_degree[i]);
        }
        let mut cursor = var_offsets.clone();
        let mut var_edge = vec![0u32; edge_var.len()];
        for e in 0..edge_var.len() {
            let v = edge_var[e] as usize;
            var_edge[cursor[v]] = e as u32;
            cursor[v] += 1;
        }
        let max_check_degree = (0..n_checks)
            .map(|j| check_offsets[j + 1] - check_offsets[j])
            .max()
            .unwrap_or(0);
        TannerGraph {
            n_vars,
            check_offsets,
            edge_var,
            var_offsets,
            var_edge,
            max_check_degree,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn check_degree(&self, j: usize) -> usize {
        self.check_offsets[j + 1] - self.check_offsets[j]
    }

    /// Variables adjacent to check `j`, ascending.
    pub fn check_vars(&self, j: usize) -> &[u32] {
        &self.edge_var[self.check_offsets[j]..self.check_offsets[j + 1]]
    }

    /// Edge ids incident to variable `i`.
    fn var_edges(&self, i: usize) -> &[u32] {
        &self.var_edge[self.var_offsets[i]..self.var_offsets[i + 1]]
    }

    pub fn var_degree(&self, i: usize) -> usize {
        self.var_offsets[i + 1] - self.var_offsets[i]
    }

    /// Rejects graphs with isolated checks (all-identity stabilizer rows),
    /// which can never be satisfied by message passing.
    pub fn validate(&self) -> Result<(), DecoderError> {
        for j in 0..self.n_checks() {
            if self.check_degree(j) == 0 {
                return Err(DecoderError::IsolatedCheck { check: j });
            }
        }
        Ok(())
    }

    /// Parity of each check under the given error bits: `Ã·e` over GF(2).
    pub fn syndrome_of_bits(&self, error_bits: &BitVec) -> BitVec {
        assert_eq!(error_bits.len(), self.n_vars, "error length mismatch");
        let mut out = BitVec::zeros(self.n_checks());
        for j in 0..self.n_checks() {
            let mut parity = false;
            for &v in self.check_vars(j) {
                parity ^= error_bits.get(v as usize);
            }
            out.set(j, parity);
        }
        out
    }
}

/// Per-variable flip probabilities, clamped away from exactly 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector(Vec<f64>);

impl PriorVector {
    pub fn new(probs: Vec<f64>) -> Self {
        PriorVector(
            probs
                .into_iter()
                .map(|p| p.clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR))
                .collect(),
        )
    }

    pub fn uniform(len: usize, p: f64) -> Self {
        PriorVector(vec![p.clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Decoder-facing priors for a flip-probability estimate: every binary
/// variable (both the X and the Z half) gets the same marginal.
pub fn init_priors(f_prime_est: f64, n_qubits: usize, split: PriorSplit) -> PriorVector {
    let est = f_prime_est.clamp(0.0, 1.0);
    let p = match split {
        PriorSplit::Marginal => 2.0 * est / 3.0,
        PriorSplit::Raw => est,
    };
    PriorVector::uniform(2 * n_qubits, p)
}

/// Message from a check node to one neighbor, given the messages from all
/// its other neighbors: `p = (1 - (-1)^s · prod(1 - 2 p_in)) / 2`.
pub fn check_message(others: &[f64], syndrome_bit: bool) -> f64 {
    let mut delta: f64 = if syndrome_bit { -1.0 } else { 1.0 };
    for &p in others {
        delta *= 1.0 - 2.0 * p;
    }
    (1.0 - delta) / 2.0
}

/// All leave-one-out check messages at once: entry `k` is the message sent
/// to neighbor `k` computed from the other incoming messages.
pub fn check_node_update(incoming: &[f64], syndrome_bit: bool) -> Vec<f64> {
    let d = incoming.len();
    let deltas: Vec<f64> = incoming.iter().map(|&p| 1.0 - 2.0 * p).collect();
    let mut suffix = vec![1.0; d + 1];
    for k in (0..d).rev() {
        suffix[k] = suffix[k + 1] * deltas[k];
    }
    let sign = if syndrome_bit { -1.0 } else { 1.0 };
    let mut out = Vec::with_capacity(d);
    let mut prefix = 1.0;
    for k in 0..d {
        let loo = prefix * suffix[k + 1];
        out.push((1.0 - sign * loo) / 2.0);
        prefix *= deltas[k];
    }
    out
}

/// Message from a bit node to one neighbor: the prior combined with the
/// messages from all its other neighbors, normalized.
pub fn bit_message(prior: f64, others: &[f64]) -> f64 {
    let mut w1 = prior;
    let mut w0 = 1.0 - prior;
    for &p in others {
        w1 *= p;
        w0 *= 1.0 - p;
    }
    if w0 + w1 == 0.0 {
        0.5
    } else {
        w1 / (w0 + w1)
    }
}

/// All leave-one-out bit messages plus the belief (which uses every
/// incoming message).
pub fn bit_node_update(prior: f64, incoming: &[f64]) -> (Vec<f64>, f64) {
    let d = incoming.len();
    let mut suffix1 = vec![1.0; d + 1];
    let mut suffix0 = vec![1.0; d + 1];
    for k in (0..d).rev() {
        suffix1[k] = suffix1[k + 1] * incoming[k];
        suffix0[k] = suffix0[k + 1] * (1.0 - incoming[k]);
    }
    let mut out = Vec::with_capacity(d);
    let mut prefix1 = 1.0;
    let mut prefix0 = 1.0;
    for k in 0..d {
        let w1 = prior * prefix1 * suffix1[k + 1];
        let w0 = (1.0 - prior) * prefix0 * suffix0[k + 1];
        out.push(if w0 + w1 == 0.0 { 0.5 } else { w1 / (w0 + w1) });
        prefix1 *= incoming[k];
        prefix0 *= 1.0 - incoming[k];
    }
    let w1 = prior * prefix1;
    let w0 = (1.0 - prior) * prefix0;
    let belief = if w0 + w1 == 0.0 { 0.5 } else { w1 / (w0 + w1) };
    (out, belief)
}

/// Outcome of a decode attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Estimated error pattern, reassembled from the X and Z bit halves.
    pub error_estimate: PauliErrorPattern,
    /// True iff the estimate reproduces the observed syndrome.
    pub converged: bool,
    /// BP iterations used by the returned attempt (0 means the priors alone
    /// already satisfied the syndrome).
    pub iterations: u32,
    /// Retries consumed: the index of the returned attempt, or the full
    /// retry budget when no attempt converged.
    pub retries_used: u32,
    /// Unsatisfied checks of the returned estimate (0 when converged).
    pub unsatisfied_checks: u32,
}

/// Scratch state for one in-flight decode; reusable across decodes of the
/// same graph. Each context must be owned by a single thread at a time.
#[derive(Debug, Clone)]
pub struct DecodeContext {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    hard: Vec<bool>,
    best_hard: Vec<bool>,
    prior_llr: Vec<f64>,
    work_priors: Vec<f64>,
    syn: Vec<bool>,
    tanh_buf: Vec<f64>,
    suffix_buf: Vec<f64>,
    touched: Vec<bool>,
}

impl DecodeContext {
    pub fn new(graph: &TannerGraph) -> Self {
        DecodeContext {
            v2c: vec![0.0; graph.n_edges()],
            c2v: vec![0.0; graph.n_edges()],
            total: vec![0.0; graph.n_vars()],
            hard: vec![false; graph.n_vars()],
            best_hard: vec![false; graph.n_vars()],
            prior_llr: vec![0.0; graph.n_vars()],
            work_priors: vec![0.0; graph.n_vars()],
            syn: vec![false; graph.n_checks()],
            tanh_buf: vec![0.0; graph.max_check_degree],
            suffix_buf: vec![0.0; graph.max_check_degree + 1],
            touched: vec![false; graph.n_vars()],
        }
    }

    fn load(&mut self, graph: &TannerGraph, syndrome: &Syndrome, priors: &PriorVector) {
        assert_eq!(syndrome.len(), graph.n_checks(), "syndrome length mismatch");
        assert_eq!(priors.len(), graph.n_vars(), "prior length mismatch");
        for j in 0..graph.n_checks() {
            self.syn[j] = syndrome.get(j);
        }
        self.work_priors.copy_from_slice(priors.as_slice());
        self.refresh_prior_llr();
    }

    fn refresh_prior_llr(&mut self) {
        for (llr, &p) in self.prior_llr.iter_mut().zip(&self.work_priors) {
            *llr = ((1.0 - p) / p).ln();
        }
    }
}

fn syndrome_satisfied(ctx: &DecodeContext, graph: &TannerGraph) -> bool {
    for j in 0..graph.n_checks() {
        let mut parity = false;
        for &v in graph.check_vars(j) {
            parity ^= ctx.hard[v as usize];
        }
        if parity != ctx.syn[j] {
            return false;
        }
    }
    true
}

fn count_unsatisfied(ctx: &DecodeContext, graph: &TannerGraph) -> u32 {
    let mut n = 0;
    for j in 0..graph.n_checks() {
        let mut parity = false;
        for &v in graph.check_vars(j) {
            parity ^= ctx.hard[v as usize];
        }
        if parity != ctx.syn[j] {
            n += 1;
        }
    }
    n
}

/// One flooding iteration: every check node updates, then every bit node.
fn bp_iteration(ctx: &mut DecodeContext, graph: &TannerGraph) {
    for j in 0..graph.n_checks() {
        let start = graph.check_offsets[j];
        let end = graph.check_offsets[j + 1];
        let d = end - start;
        for k in 0..d {
            ctx.tanh_buf[k] = (0.5 * ctx.v2c[start + k]).tanh();
        }
        ctx.suffix_buf[d] = 1.0;
        for k in (0..d).rev() {
            ctx.suffix_buf[k] = ctx.suffix_buf[k + 1] * ctx.tanh_buf[k];
        }
        let sign = if ctx.syn[j] { -1.0 } else { 1.0 };
        let mut prefix = 1.0;
        for k in 0..d {
            let loo: f64 = prefix * ctx.suffix_buf[k + 1];
            let msg = sign * 2.0 * loo.atanh();
            ctx.c2v[start + k] = msg.clamp(-LLR_CLAMP, LLR_CLAMP);
            prefix *= ctx.tanh_buf[k];
        }
    }
    for i in 0..graph.n_vars() {
        let mut total = ctx.prior_llr[i];
        for &e in graph.var_edges(i) {
            total += ctx.c2v[e as usize];
        }
        for &e in graph.var_edges(i) {
            let out = total - ctx.c2v[e as usize];
            ctx.v2c[e as usize] = out.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        ctx.total[i] = total;
        ctx.hard[i] = total < 0.0;
    }
}

/// Core BP loop on loaded state. Returns (converged, iterations, unsatisfied).
fn run_bp(ctx: &mut DecodeContext, graph: &TannerGraph, max_iter: u32) -> (bool, u32, u32) {
    // iteration-0 hard decision straight from the priors
    for i in 0..graph.n_vars() {
        ctx.total[i] = ctx.prior_llr[i];
        ctx.hard[i] = ctx.prior_llr[i] < 0.0;
    }
    if syndrome_satisfied(ctx, graph) {
        return (true, 0, 0);
    }
    for i in 0..graph.n_vars() {
        let llr = ctx.prior_llr[i];
        for &e in graph.var_edges(i) {
            ctx.v2c[e as usize] = llr;
        }
    }
    for it in 1..=max_iter {
        bp_iteration(ctx, graph);
        if syndrome_satisfied(ctx, graph) {
            return (true, it, 0);
        }
    }
    (false, max_iter, count_unsatisfied(ctx, graph))
}

fn assemble_estimate(hard: &[bool], n_qubits: usize) -> PauliErrorPattern {
    let x = BitVec::from_bools(&hard[..n_qubits]);
    let z = BitVec::from_bools(&hard[n_qubits..]);
    PauliErrorPattern::new(x, z).expect("equal halves")
}

/// Plain syndrome BP with a flooding schedule and early termination on
/// syndrome match. Non-convergence is a result state, not an error.
pub fn bp_decode(
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorVector,
    max_iter: u32,
) -> DecodeResult {
    let mut ctx = DecodeContext::new(graph);
    bp_decode_with(&mut ctx, graph, syndrome, priors, max_iter)
}

pub fn bp_decode_with(
    ctx: &mut DecodeContext,
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorVector,
    max_iter: u32,
) -> DecodeResult {
    assert!(graph.n_vars() % 2 == 0, "stabilizer graphs have 2N variables");
    ctx.load(graph, syndrome, priors);
    let (converged, iterations, unsatisfied) = run_bp(ctx, graph, max_iter);
    DecodeResult {
        error_estimate: assemble_estimate(&ctx.hard, graph.n_vars() / 2),
        converged,
        iterations,
        retries_used: 0,
        unsatisfied_checks: unsatisfied,
    }
}

/// BP with the degeneracy-breaking retry heuristic.
///
/// After a failed attempt, the prior odds of every variable adjacent to an
/// unsatisfied check are multiplied by `1 + perturb_strength·u` with `u`
/// drawn uniformly per variable, and BP reruns on the perturbed priors.
/// Perturbations accumulate across retries. The best attempt (fewest
/// unsatisfied checks, ties to the earlier attempt) is returned if none
/// converges.
pub fn decode_with_retries<R: Rng + ?Sized>(
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorVector,
    max_iter: u32,
    max_retries: u32,
    perturb_strength: f64,
    rng: &mut R,
) -> DecodeResult {
    let mut ctx = DecodeContext::new(graph);
    decode_with_retries_ctx(
        &mut ctx,
        graph,
        syndrome,
        priors,
        max_iter,
        max_retries,
        perturb_strength,
        rng,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn decode_with_retries_ctx<R: Rng + ?Sized>(
    ctx: &mut DecodeContext,
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorVector,
    max_iter: u32,
    max_retries: u32,
    perturb_strength: f64,
    rng: &mut R,
) -> DecodeResult {
    assert!(graph.n_vars() % 2 == 0, "stabilizer graphs have 2N variables");
    assert!(
        (0.0..1.0).contains(&perturb_strength),
        "perturb_strength outside (0, 1)"
    );
    let n_qubits = graph.n_vars() / 2;
    ctx.load(graph, syndrome, priors);

    let mut best_unsat = u32::MAX;
    let mut best_iterations = 0;
    for attempt in 0..=max_retries {
        if attempt > 0 {
            perturb_frustrated(ctx, graph, perturb_strength, rng);
        }
        let (converged, iterations, unsatisfied) = run_bp(ctx, graph, max_iter);
        if converged {
            return DecodeResult {
                error_estimate: assemble_estimate(&ctx.hard, n_qubits),
                converged: true,
                iterations,
                retries_used: attempt,
                unsatisfied_checks: 0,
            };
        }
        if unsatisfied < best_unsat {
            best_unsat = unsatisfied;
            best_iterations = iterations;
            ctx.best_hard.copy_from_slice(&ctx.hard);
        }
    }
    DecodeResult {
        error_estimate: assemble_estimate(&ctx.best_hard, n_qubits),
        converged: false,
        iterations: best_iterations,
        retries_used: max_retries,
        unsatisfied_checks: best_unsat,
    }
}

/// Raise the flip odds of variables adjacent to currently unsatisfied
/// checks, based on the hard decisions left by the last attempt.
fn perturb_frustrated<R: Rng + ?Sized>(
    ctx: &mut DecodeContext,
    graph: &TannerGraph,
    strength: f64,
    rng: &mut R,
) {
    ctx.touched.iter_mut().for_each(|t| *t = false);
    for j in 0..graph.n_checks() {
        let mut parity = false;
        for &v in graph.check_vars(j) {
            parity ^= ctx.hard[v as usize];
        }
        if parity != ctx.syn[j] {
            for &v in graph.check_vars(j) {
                ctx.touched[v as usize] = true;
            }
        }
    }
    for i in 0..graph.n_vars() {
        if ctx.touched[i] {
            let p = ctx.work_priors[i];
            let odds = p / (1.0 - p) * (1.0 + strength * rng.gen::<f64>());
            ctx.work_priors[i] = (odds / (1.0 + odds)).clamp(PRIOR_FLOOR, 1.0 - PRIOR_FLOOR);
        }
    }
    ctx.refresh_prior_llr();
}

/// Posterior flip probabilities after exactly `iterations` flooding rounds,
/// with no early termination. On a cycle-free graph this reproduces the
/// exact posterior marginals once `iterations` reaches the tree diameter.
pub fn bp_posteriors(
    graph: &TannerGraph,
    syndrome_bits: &BitVec,
    priors: &PriorVector,
    iterations: u32,
) -> Vec<f64> {
    assert_eq!(syndrome_bits.len(), graph.n_checks(), "syndrome length");
    assert_eq!(priors.len(), graph.n_vars(), "prior length");
    let mut ctx = DecodeContext::new(graph);
    for j in 0..graph.n_checks() {
        ctx.syn[j] = syndrome_bits.get(j);
    }
    ctx.work_priors.copy_from_slice(priors.as_slice());
    ctx.refresh_prior_llr();
    for i in 0..graph.n_vars() {
        ctx.total[i] = ctx.prior_llr[i];
        let llr = ctx.prior_llr[i];
        for &e in graph.var_edges(i) {
            ctx.v2c[e as usize] = llr;
        }
    }
    for _ in 0..iterations {
        bp_iteration(&mut ctx, graph);
    }
    ctx.total.iter().map(|&llr| 1.0 / (1.0 + llr.exp())).collect()
}
