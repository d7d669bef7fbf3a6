//! Critical-n scans: for a fixed dimension, grow the number of documents
//! (and with it every top-k combination as a query) until free-embedding
//! optimization stops solving, then fit a cubic through the critical points.

use std::io::Write;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_embed::{solve_restarts, OptimizerConfig};
use crate::qrel::QrelMatrix;

/// `C(n, k)` in 128-bit arithmetic; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i) here, and C(n, i) * (n - i) is divisible by (i + 1)
        let num = u128::from(n - i);
        let den = u128::from(i + 1);
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul(num / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binomial_or_capacity(n: usize, k: usize) -> Result<u128> {
    binomial(n as u64, k as u64).ok_or_else(|| Error::Capacity(format!("C({n}, {k}) overflows 128 bits")))
}

/// Smallest `n` with `C(n, k) >= m`. Empty queries need no documents,
/// so `k = 0` gives 0.
pub fn min_docs_for_queries(m: u64, k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    let target = u128::from(m);
    let enough = |n: u64| binomial(n, k).is_none_or(|c| c >= target);
    if enough(k) {
        return k;
    }
    // gallop to a bracket (lo fails, hi succeeds), then bisect
    let mut lo = k;
    let mut hi = k * 2;
    while !enough(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if enough(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial((n - next - 1) as u64, remaining as u64).expect("fits: bounded by C(n, k)");
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Qrels whose rows are k-subsets of `n` documents: every subset (in
/// lexicographic order) when `m` is `None`, otherwise `m` distinct subsets
/// sampled uniformly with `seed` and listed in lexicographic order.
pub fn dense_qrels(n: usize, k: usize, m: Option<usize>, seed: u64) -> Result<QrelMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    let total = binomial_or_capacity(n, k)?;
    let ranks: Vec<u128> = match m {
        None => {
            if total > usize::MAX as u128 {
                return Err(Error::Capacity(format!("C({n}, {k}) rows do not fit in memory")));
            }
            (0..total).collect()
        }
        Some(m) => {
            if m as u128 > total {
                return Err(Error::Capacity(format!("{m} queries requested but C({n}, {k}) = {total}")));
            }
            let total = usize::try_from(total)
                .map_err(|_| Error::Capacity(format!("C({n}, {k}) too large to sample from")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<u128> =
                index::sample(&mut rng, total, m).into_iter().map(|r| r as u128).collect();
            picked.sort_unstable();
            picked
        }
    };
    let rows: Vec<Vec<usize>> = ranks.into_iter().map(|r| unrank_combination(n, k, r)).collect();
    QrelMatrix::from_relevant_sets(n, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub n: usize,
    pub solved: bool,
    pub steps: usize,
    pub accuracy: f64,
    /// Restarts actually run, including failure confirmations.
    pub restarts: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub d: usize,
    /// Largest scanned `n` that solved.
    pub critical_n: usize,
    /// First scanned `n` that did not solve.
    pub first_failed_n: usize,
    pub trials: Vec<Trial>,
}

impl SweepPoint {
    /// Optimizer steps used by the solve at `critical_n`.
    pub fn critical_steps(&self) -> usize {
        self.trials.iter().find(|t| t.n == self.critical_n).map_or(0, |t| t.steps)
    }

    pub fn wall_seconds(&self) -> f64 {
        self.trials.iter().map(|t| t.wall_seconds).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_start: usize,
    /// Stop (without a failure) once this `n` has solved.
    pub n_max: Option<usize>,
    /// Extra restarts spent on a failing `n` before the scan ends.
    pub confirm_restarts: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { n_start: 3, n_max: None, confirm_restarts: 2 }
    }
}

/// Scans `n = n_start, n_start+1, …` over the qrels produced by `build`,
/// stopping at the first `n` that fails even after the confirmation
/// restarts. When `n_max` is reached without failing, `first_failed_n` is
/// reported as `n_max + 1`.
pub fn find_critical_n_with(
    d: usize,
    cfg: &OptimizerConfig,
    scan: &ScanConfig,
    mut build: impl FnMut(usize) -> Result<QrelMatrix>,
) -> Result<SweepPoint> {
    let mut trials = Vec::new();
    let mut critical = None;
    let mut n = scan.n_start;
    loop {
        if scan.n_max.is_some_and(|max| n > max) {
            break;
        }
        let a = build(n)?;
        let started = Instant::now();
        let mut res = solve_restarts(&a, d, cfg, 0..cfg.restarts)?;
        let mut restarts = res.restart + 1;
        if !res.solved && scan.confirm_restarts > 0 {
            let extra = cfg.restarts..cfg.restarts + scan.confirm_restarts;
            let retry = solve_restarts(&a, d, cfg, extra)?;
            restarts = if retry.solved { retry.restart + 1 } else { cfg.restarts + scan.confirm_restarts };
            if retry.solved || retry.accuracy > res.accuracy {
                res = retry;
            }
        }
        log::debug!("d={d} n={n} solved={} steps={} acc={:.4}", res.solved, res.steps_run, res.accuracy);
        trials.push(Trial {
            n,
            solved: res.solved,
            steps: res.steps_run,
            accuracy: res.accuracy,
            restarts,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
        if !res.solved {
            break;
        }
        critical = Some(n);
        n += 1;
    }
    let critical_n = critical.ok_or(Error::Scan { d, n: scan.n_start })?;
    Ok(SweepPoint { d, critical_n, first_failed_n: critical_n + 1, trials })
}

/// Critical-n scan over the full top-`k` dense qrels `C(n, k)`.
pub fn find_critical_n(d: usize, k: usize, cfg: &OptimizerConfig, scan: &ScanConfig) -> Result<SweepPoint> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    if scan.n_start <= k {
        return Err(Error::InvalidArgument(format!("n_start must exceed k={k}")));
    }
    find_critical_n_with(d, cfg, scan, |n| dense_qrels(n, k, None, 0))
}

/// `y = c0 + c1·d + c2·d² + c3·d³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicFit {
    pub coefficients: [f64; 4],
    pub r_squared: f64,
}

impl CubicFit {
    pub fn eval(&self, d: f64) -> f64 {
        let [c0, c1, c2, c3] = self.coefficients;
        c0 + d * (c1 + d * (c2 + d * c3))
    }
}

/// Ordinary least squares for a cubic in `d`, solved by Householder QR on
/// the Vandermonde design matrix.
pub fn fit_cubic(points: &[(f64, f64)]) -> Result<CubicFit> {
    const P: usize = 4;
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < P {
        return Err(Error::Fit(format!("need at least {P} distinct d values, got {}", distinct.len())));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite input".into()));
    }

    let rows = points.len();
    let mut a: Vec<[f64; P]> = points.iter().map(|&(x, _)| [1.0, x, x * x, x * x * x]).collect();
    let mut y: Vec<f64> = points.iter().map(|p| p.1).collect();

    for col in 0..P {
        let norm = (col..rows).map(|r| a[r][col] * a[r][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Fit("singular design matrix".into()));
        }
        let alpha = if a[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..rows).map(|r| a[r][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in col..P {
                let s: f64 = (col..rows).map(|r| v[r - col] * a[r][c]).sum::<f64>() * 2.0 / vnorm2;
                for r in col..rows {
                    a[r][c] -= s * v[r - col];
                }
            }
            let s: f64 = (col..rows).map(|r| v[r - col] * y[r]).sum::<f64>() * 2.0 / vnorm2;
            for r in col..rows {
                y[r] -= s * v[r - col];
            }
        }
    }

    let scale = (0..P).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    if (0..P).any(|i| a[i][i].abs() <= scale * 1e-13) {
        return Err(Error::Fit("singular design matrix".into()));
    }
    let mut coef = [0.0; P];
    for i in (0..P).rev() {
        let s: f64 = ((i + 1)..P).map(|j| a[i][j] * coef[j]).sum();
        coef[i] = (y[i] - s) / a[i][i];
    }

    let mean = points.iter().map(|p| p.1).sum::<f64>() / rows as f64;
    let fit = CubicFit { coefficients: coef, r_squared: 0.0 };
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - fit.eval(x)).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(CubicFit { coefficients: coef, r_squared })
}

pub fn extrapolate(fit: &CubicFit, d: usize) -> f64 {
    fit.eval(d as f64)
}

/// Dimensions of common production embedding models.
pub const EXTRAPOLATION_DIMS: [usize; 5] = [512, 768, 1024, 3072, 4096];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub d: usize,
    pub critical_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub coefficients: [f64; 4],
    pub r_squared: f64,
    pub extrapolation: Vec<Extrapolation>,
}

impl FitReport {
    pub fn new(fit: &CubicFit) -> Self {
        let extrapolation = EXTRAPOLATION_DIMS
            .iter()
            .map(|&d| Extrapolation { d, critical_n: extrapolate(fit, d) })
            .collect();
        Self { coefficients: fit.coefficients, r_squared: fit.r_squared, extrapolation }
    }
}

/// Writes `d,critical_n,first_failed_n,steps,wall_seconds`. Timings are
/// left empty unless `with_timings`, so that reruns are byte-identical.
pub fn write_sweep_csv<W: Write>(mut w: W, points: &[SweepPoint], with_timings: bool) -> Result<()> {
    writeln!(w, "d,critical_n,first_failed_n,steps,wall_seconds")?;
    for p in points {
        let wall = if with_timings { format!("{:.3}", p.wall_seconds()) } else { String::new() };
        writeln!(w, "{},{},{},{},{}", p.d, p.critical_n, p.first_failed_n, p.critical_steps(), wall)?;
    }
    Ok(())
}

/// Critical-n values for d = 4..=45 from the free-embedding experiments
/// reported alongside the cubic trend.
pub const REFERENCE_CRITICAL_N: [(usize, usize); 42] = [
    (4, 10),
    (5, 14),
    (6, 19),
    (7, 24),
    (8, 28),
    (9, 32),
    (10, 36),
    (11, 42),
    (12, 47),
    (13, 54),
    (14, 62),
    (15, 70),
    (16, 79),
    (17, 89),
    (18, 99),
    (19, 109),
    (20, 120),
    (21, 132),
    (22, 144),
    (23, 157),
    (24, 170),
    (25, 184),
    (26, 198),
    (27, 213),
    (28, 229),
    (29, 245),
    (30, 261),
    (31, 278),
    (32, 296),
    (33, 314),
    (34, 333),
    (35, 352),
    (36, 372),
    (37, 392),
    (38, 413),
    (39, 434),
    (40, 460),
    (41, 484),
    (42, 505),
    (43, 545),
    (44, 605),
    (45, 626),
];
