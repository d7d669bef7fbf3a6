//! Free-embedding optimization: every query and document gets its own
//! directly optimized unit vector, trained with full-batch InfoNCE and Adam.
//! A solved run is a constructive witness that the qrel matrix is row-wise
//! order preserving at dimension `d`; a failed run proves nothing.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qrel::{check_rop, QrelMatrix, ScoreMatrix};

/// Query vectors `U` (d×m) and document vectors `V` (d×n), one unit-norm
/// vector per column.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair {
    pub queries: Array2<f64>,
    pub docs: Array2<f64>,
}

impl EmbeddingPair {
    pub fn new(queries: Array2<f64>, docs: Array2<f64>) -> Result<Self> {
        if queries.nrows() != docs.nrows() {
            return Err(Error::shape(format!(
                "query dimension {} != doc dimension {}",
                queries.nrows(),
                docs.nrows()
            )));
        }
        if queries.nrows() == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
        }
        if queries.iter().chain(docs.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("embeddings must be finite".into()));
        }
        Ok(Self { queries, docs })
    }

    /// Seeded isotropic start: i.i.d. standard normal entries, then each
    /// column scaled to unit length.
    pub fn random(d: usize, m: usize, n: usize, rng: &mut impl rand::Rng) -> Self {
        let mut sample = |rows, cols| {
            let mut a = Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng));
            normalize_columns(&mut a);
            a
        };
        let queries = sample(d, m);
        let docs = sample(d, n);
        Self { queries, docs }
    }

    pub fn dim(&self) -> usize {
        self.queries.nrows()
    }

    pub fn num_queries(&self) -> usize {
        self.queries.ncols()
    }

    pub fn num_docs(&self) -> usize {
        self.docs.ncols()
    }

    /// `B = UᵀV`.
    pub fn scores(&self) -> ScoreMatrix {
        ScoreMatrix::new(self.queries.t().dot(&self.docs)).expect("finite embeddings give finite scores")
    }

    pub fn query_vector(&self, i: usize) -> Vec<f64> {
        self.queries.column(i).to_vec()
    }

    pub fn doc_vector(&self, j: usize) -> Vec<f64> {
        self.docs.column(j).to_vec()
    }
}

pub(crate) fn normalize_columns(a: &mut Array2<f64>) {
    for mut col in a.axis_iter_mut(Axis(1)) {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|x| x / norm);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub objective: Objective,
    /// InfoNCE softmax temperature.
    pub temperature: f64,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub max_steps: usize,
    /// Stop after this many consecutive steps without a new best loss.
    pub patience: usize,
    /// Minimum absolute loss decrease that counts as a new best.
    pub min_improvement: f64,
    pub eval_every: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Upper bound on the working set (scores, parameters, moments) in bytes.
    pub memory_budget_bytes: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            objective: Objective::PairInfoNce,
            temperature: 0.09,
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            max_steps: 200_000,
            patience: 1000,
            min_improvement: 1e-7,
            eval_every: 25,
            seed: 0,
            restarts: 1,
            memory_budget_bytes: 2 << 30,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(0.0 < self.adam_beta1 && self.adam_beta1 < 1.0 && 0.0 < self.adam_beta2 && self.adam_beta2 < 1.0) {
            return bad("Adam betas must lie in (0, 1)");
        }
        if !(self.adam_epsilon > 0.0) {
            return bad("Adam epsilon must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be >= 1");
        }
        if self.eval_every == 0 {
            return bad("eval_every must be >= 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Every query fully separated (accuracy 1.0).
    pub solved: bool,
    pub steps_run: usize,
    pub final_loss: f64,
    pub accuracy: f64,
    pub embeddings: EmbeddingPair,
    /// Restart index that produced this result.
    pub restart: usize,
}

fn check_queries(a: &QrelMatrix) -> Result<()> {
    match (0..a.num_queries()).find(|&i| a.relevant_count(i) == 0) {
        Some(i) => Err(Error::DegenerateQuery(i)),
        None => Ok(()),
    }
}

fn check_shapes(a: &QrelMatrix, e: &EmbeddingPair) -> Result<()> {
    if (e.num_queries(), e.num_docs()) != a.shape() {
        return Err(Error::shape(format!(
            "embeddings cover {}x{} but qrels are {:?}",
            e.num_queries(),
            e.num_docs(),
            a.shape()
        )));
    }
    Ok(())
}

/// Training objective for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// One InfoNCE term per query: all relevant documents share the
    /// numerator, every document is in the denominator. See [`infonce_loss`].
    SetInfoNce,
    /// One InfoNCE term per (query, relevant document) pair, contrasted
    /// against that query's irrelevant documents, averaged over all pairs.
    PairInfoNce,
}

impl Objective {
    pub fn loss(self, a: &QrelMatrix, e: &EmbeddingPair, temperature: f64) -> Result<f64> {
        self.loss_and_grad(a, e, temperature).map(|(l, _, _)| l)
    }

    /// Loss with its analytic gradients `(dL/dU, dL/dV)`.
    pub fn loss_and_grad(
        self,
        a: &QrelMatrix,
        e: &EmbeddingPair,
        temperature: f64,
    ) -> Result<(f64, Array2<f64>, Array2<f64>)> {
        check_shapes(a, e)?;
        check_queries(a)?;
        if !(temperature > 0.0) {
            return Err(Error::InvalidArgument("temperature must be positive".into()));
        }
        let mut ws = Workspace::new(e.dim(), a.num_queries(), a.num_docs());
        ws.compute_scores(e);
        let loss = ws.loss_and_grad_from_scores(a, e, temperature, self);
        Ok((loss, ws.grad_queries, ws.grad_docs))
    }

    /// Number of terms the summed row losses are averaged over.
    fn terms(self, a: &QrelMatrix) -> usize {
        match self {
            Objective::SetInfoNce => a.num_queries(),
            Objective::PairInfoNce => (0..a.num_queries()).map(|i| a.relevant_count(i)).sum(),
        }
    }

    fn row(self, rel: &[bool], scores: &[f64], inv_temp: f64, grad_row: Option<&mut [f64]>) -> f64 {
        match self {
            Objective::SetInfoNce => set_row_loss(rel, scores, inv_temp, grad_row),
            Objective::PairInfoNce => pair_row_loss(rel, scores, inv_temp, grad_row),
        }
    }
}

/// `logsumexp(all) − logsumexp(relevant)` of `scores / temperature`,
/// writing `p − q` into `grad_row` when given.
fn set_row_loss(rel: &[bool], scores: &[f64], inv_temp: f64, grad_row: Option<&mut [f64]>) -> f64 {
    let mut max_all = f64::NEG_INFINITY;
    let mut max_rel = f64::NEG_INFINITY;
    for (&r, &s) in rel.iter().zip(scores) {
        let l = s * inv_temp;
        max_all = max_all.max(l);
        if r {
            max_rel = max_rel.max(l);
        }
    }
    let mut sum_all = 0.0;
    let mut sum_rel = 0.0;
    for (&r, &s) in rel.iter().zip(scores) {
        let l = s * inv_temp;
        sum_all += (l - max_all).exp();
        if r {
            sum_rel += (l - max_rel).exp();
        }
    }
    let lse_all = max_all + sum_all.ln();
    let lse_rel = max_rel + sum_rel.ln();
    if let Some(g) = grad_row {
        for ((g, &r), &s) in g.iter_mut().zip(rel).zip(scores) {
            let l = s * inv_temp;
            let p = (l - lse_all).exp();
            let q = if r { (l - lse_rel).exp() } else { 0.0 };
            *g = p - q;
        }
    }
    (lse_all - lse_rel).max(0.0)
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `Σ_r log(1 + Σ_k exp(l_k − l_r))` over relevant `r` and irrelevant `k`,
/// with `l = scores / temperature`; gradient w.r.t. `l` into `grad_row`.
fn pair_row_loss(rel: &[bool], scores: &[f64], inv_temp: f64, grad_row: Option<&mut [f64]>) -> f64 {
    let max_neg = rel
        .iter()
        .zip(scores)
        .filter(|(&r, _)| !r)
        .map(|(_, &s)| s * inv_temp)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_neg == f64::NEG_INFINITY {
        if let Some(g) = grad_row {
            g.fill(0.0);
        }
        return 0.0;
    }
    let sum_neg: f64 =
        rel.iter().zip(scores).filter(|(&r, _)| !r).map(|(_, &s)| (s * inv_temp - max_neg).exp()).sum();
    let lse_neg = max_neg + sum_neg.ln();

    let mut total = 0.0;
    let mut neg_weight = 0.0;
    let mut grad_row = grad_row;
    for (j, (&r, &s)) in rel.iter().zip(scores).enumerate() {
        if !r {
            continue;
        }
        let z = lse_neg - s * inv_temp;
        total += softplus(z);
        let w = sigmoid(z);
        neg_weight += w;
        if let Some(g) = grad_row.as_deref_mut() {
            g[j] = -w;
        }
    }
    if let Some(g) = grad_row {
        for ((g, &r), &s) in g.iter_mut().zip(rel).zip(scores) {
            if !r {
                *g = neg_weight * (s * inv_temp - lse_neg).exp();
            }
        }
    }
    total
}

/// Full-batch InfoNCE loss: the mean over queries of
/// `−log(Σ_{relevant} exp(s/τ) / Σ_{all} exp(s/τ))`.
pub fn infonce_loss(a: &QrelMatrix, e: &EmbeddingPair, temperature: f64) -> Result<f64> {
    Objective::SetInfoNce.loss(a, e, temperature)
}

/// Analytic gradients `(dL/dU, dL/dV)` of [`infonce_loss`].
pub fn infonce_grad(a: &QrelMatrix, e: &EmbeddingPair, temperature: f64) -> Result<(Array2<f64>, Array2<f64>)> {
    Objective::SetInfoNce.loss_and_grad(a, e, temperature).map(|(_, gu, gv)| (gu, gv))
}

/// Fraction of queries whose relevant scores all strictly exceed their
/// irrelevant scores.
pub fn accuracy(a: &QrelMatrix, e: &EmbeddingPair) -> Result<f64> {
    check_shapes(a, e)?;
    Ok(accuracy_of_scores(a, e.scores().entries().view()))
}

fn accuracy_of_scores(a: &QrelMatrix, b: ArrayView2<f64>) -> f64 {
    if a.num_queries() == 0 {
        return 1.0;
    }
    let ok = (0..a.num_queries())
        .filter(|&i| {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (&r, &s) in a.row(i).iter().zip(b.row(i)) {
                if r {
                    hi = hi.min(s);
                } else {
                    lo = lo.max(s);
                }
            }
            hi > lo
        })
        .count();
    ok as f64 / a.num_queries() as f64
}

/// Preallocated buffers for one optimization run.
struct Workspace {
    scores: Array2<f64>,
    dscores: Array2<f64>,
    grad_queries: Array2<f64>,
    grad_docs: Array2<f64>,
}

impl Workspace {
    fn new(d: usize, m: usize, n: usize) -> Self {
        Self {
            scores: Array2::zeros((m, n)),
            dscores: Array2::zeros((m, n)),
            grad_queries: Array2::zeros((d, m)),
            grad_docs: Array2::zeros((d, n)),
        }
    }

    fn compute_scores(&mut self, e: &EmbeddingPair) {
        general_mat_mul(1.0, &e.queries.t(), &e.docs, 0.0, &mut self.scores);
    }

    /// Assumes `compute_scores` already ran for `e`.
    fn loss_and_grad_from_scores(
        &mut self,
        a: &QrelMatrix,
        e: &EmbeddingPair,
        temperature: f64,
        objective: Objective,
    ) -> f64 {
        let terms = objective.terms(a).max(1) as f64;
        let inv_temp = 1.0 / temperature;
        let mut total = 0.0;
        for (i, (srow, mut grow)) in self
            .scores
            .axis_iter(Axis(0))
            .zip(self.dscores.axis_iter_mut(Axis(0)))
            .enumerate()
        {
            total += objective.row(
                a.row(i),
                srow.as_slice().expect("contiguous"),
                inv_temp,
                Some(grow.as_slice_mut().expect("contiguous")),
            );
        }
        let scale = inv_temp / terms;
        self.dscores.mapv_inplace(|g| g * scale);
        // dU = V dBᵀ, dV = U dB
        general_mat_mul(1.0, &e.docs, &self.dscores.t(), 0.0, &mut self.grad_queries);
        general_mat_mul(1.0, &e.queries, &self.dscores, 0.0, &mut self.grad_docs);
        total / terms
    }
}

/// Adam moments for one parameter matrix.
struct Adam {
    first: Array2<f64>,
    second: Array2<f64>,
}

impl Adam {
    fn new(shape: (usize, usize)) -> Self {
        Self { first: Array2::zeros(shape), second: Array2::zeros(shape) }
    }

    fn step(&mut self, param: &mut Array2<f64>, grad: &Array2<f64>, cfg: &OptimizerConfig, t: usize) {
        let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
        let c1 = 1.0 - b1.powi(t as i32);
        let c2 = 1.0 - b2.powi(t as i32);
        let lr = cfg.learning_rate;
        let eps = cfg.adam_epsilon;
        ndarray::Zip::from(param)
            .and(grad)
            .and(&mut self.first)
            .and(&mut self.second)
            .for_each(|p, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            });
    }
}

/// Snapshot handed to [`solve_observed`] after every optimizer step.
pub struct StepState<'a> {
    pub step: usize,
    pub loss: f64,
    pub best_loss: f64,
    pub embeddings: &'a EmbeddingPair,
}

fn working_set_bytes(d: usize, m: usize, n: usize) -> Option<usize> {
    let scores = m.checked_mul(n)?.checked_mul(2)?;
    // params, grads, two moments
    let params = d.checked_mul(m.checked_add(n)?)?.checked_mul(4)?;
    scores.checked_add(params)?.checked_mul(std::mem::size_of::<f64>())
}

fn seeded_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// One restart of the optimizer. `observer` sees the state after each step.
pub fn solve_observed(
    a: &QrelMatrix,
    d: usize,
    cfg: &OptimizerConfig,
    restart: usize,
    mut observer: impl FnMut(&StepState<'_>),
) -> Result<SolveResult> {
    cfg.validate()?;
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    check_queries(a)?;
    let (m, n) = a.shape();
    match working_set_bytes(d, m, n) {
        Some(bytes) if bytes <= cfg.memory_budget_bytes => {}
        _ => {
            return Err(Error::Capacity(format!(
                "d={d}, m={m}, n={n} exceeds the {} byte memory budget",
                cfg.memory_budget_bytes
            )))
        }
    }

    let mut rng = seeded_rng(cfg.seed, restart);
    let mut emb = EmbeddingPair::random(d, m, n, &mut rng);
    let mut ws = Workspace::new(d, m, n);
    let mut adam_q = Adam::new((d, m));
    let mut adam_d = Adam::new((d, n));

    let mut best_loss = f64::INFINITY;
    let mut since_best = 0usize;
    let mut last_loss = f64::NAN;
    let mut acc;
    let mut step = 0usize;

    loop {
        ws.compute_scores(&emb);
        if step.is_multiple_of(cfg.eval_every) || step == cfg.max_steps {
            acc = accuracy_of_scores(a, ws.scores.view());
            if acc == 1.0 || step == cfg.max_steps {
                break;
            }
        }
        let loss = ws.loss_and_grad_from_scores(a, &emb, cfg.temperature, cfg.objective);
        last_loss = loss;
        if loss < best_loss - cfg.min_improvement {
            best_loss = loss;
            since_best = 0;
        } else {
            since_best += 1;
        }

        step += 1;
        adam_q.step(&mut emb.queries, &ws.grad_queries, cfg, step);
        adam_d.step(&mut emb.docs, &ws.grad_docs, cfg, step);
        normalize_columns(&mut emb.queries);
        normalize_columns(&mut emb.docs);
        observer(&StepState { step, loss, best_loss, embeddings: &emb });

        if since_best >= cfg.patience {
            ws.compute_scores(&emb);
            acc = accuracy_of_scores(a, ws.scores.view());
            break;
        }
    }

    let final_loss = if acc == 1.0 || last_loss.is_nan() {
        ws.loss_and_grad_from_scores(a, &emb, cfg.temperature, cfg.objective)
    } else {
        last_loss
    };
    Ok(SolveResult { solved: acc == 1.0, steps_run: step, final_loss, accuracy: acc, embeddings: emb, restart })
}

/// Optimizes free embeddings for `a` at dimension `d`, running up to
/// `cfg.restarts` seeds in order and stopping at the first solved one.
/// Without a solve, the restart with the highest accuracy (then lowest
/// loss) is returned.
pub fn solve(a: &QrelMatrix, d: usize, cfg: &OptimizerConfig) -> Result<SolveResult> {
    solve_restarts(a, d, cfg, 0..cfg.restarts)
}

pub(crate) fn solve_restarts(
    a: &QrelMatrix,
    d: usize,
    cfg: &OptimizerConfig,
    restarts: std::ops::Range<usize>,
) -> Result<SolveResult> {
    let mut best: Option<SolveResult> = None;
    for r in restarts {
        let res = solve_observed(a, d, cfg, r, |_| {})?;
        if res.solved {
            return Ok(res);
        }
        let better = best.as_ref().is_none_or(|b| {
            res.accuracy > b.accuracy || (res.accuracy == b.accuracy && res.final_loss < b.final_loss)
        });
        if better {
            best = Some(res);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("at least one restart is required".into()))
}

/// An optimizer-found, independently re-verified upper bound on the sign
/// rank of `2A − 1`.
#[derive(Debug, Clone)]
pub struct SignRankBound {
    /// Smallest dimension at which a row-wise order-preserving witness was found.
    pub witness_dim: usize,
    /// `witness_dim + 1`: shifting each row by its threshold adds at most one to the rank.
    pub bound: usize,
    pub embeddings: EmbeddingPair,
}

/// Searches `d = 1..=d_max` for the smallest dimension the optimizer solves.
/// The bound is emitted only after `check_rop` accepts the final scores.
pub fn sign_rank_upper_bound(a: &QrelMatrix, d_max: usize, cfg: &OptimizerConfig) -> Result<Option<SignRankBound>> {
    if d_max == 0 {
        return Err(Error::InvalidArgument("d_max must be >= 1".into()));
    }
    for d in 1..=d_max {
        let res = solve(a, d, cfg)?;
        if res.solved && check_rop(a, &res.embeddings.scores())? {
            return Ok(Some(SignRankBound { witness_dim: d, bound: d + 1, embeddings: res.embeddings }));
        }
    }
    Ok(None)
}
