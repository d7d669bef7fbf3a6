//! Analytic InfoNCE gradients against an independent scalar-loop oracle.

use embedcap::free_embed::{infonce_grad, infonce_loss, EmbeddingPair, Objective};
use embedcap::qrel::QrelMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct evaluation of the loss formula with plain loops and no
/// max-subtraction; the instances are small enough that exp cannot overflow.
fn oracle_loss(a: &QrelMatrix, u: &Array2<f64>, v: &Array2<f64>, tau: f64) -> f64 {
    let (m, n) = a.shape();
    let d = u.nrows();
    let mut total = 0.0;
    for i in 0..m {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let mut s = 0.0;
            for r in 0..d {
                s += u[[r, i]] * v[[r, j]];
            }
            let e = (s / tau).exp();
            den += e;
            if a.get(i, j) {
                num += e;
            }
        }
        total += -(num / den).ln();
    }
    total / m as f64
}

/// Per-pair variant: each relevant document against the query's
/// irrelevant documents, averaged over all pairs.
fn oracle_pair_loss(a: &QrelMatrix, u: &Array2<f64>, v: &Array2<f64>, tau: f64) -> f64 {
    let (m, n) = a.shape();
    let score = |i: usize, j: usize| (0..u.nrows()).map(|r| u[[r, i]] * v[[r, j]]).sum::<f64>() / tau;
    let mut total = 0.0;
    let mut pairs = 0;
    for i in 0..m {
        let neg: f64 = (0..n).filter(|&j| !a.get(i, j)).map(|j| score(i, j).exp()).sum();
        for j in (0..n).filter(|&j| a.get(i, j)) {
            let pos = score(i, j).exp();
            total += -(pos / (pos + neg)).ln();
            pairs += 1;
        }
    }
    total / pairs as f64
}

fn random_instance(rng: &mut ChaCha8Rng) -> (QrelMatrix, EmbeddingPair) {
    let m = rng.random_range(1..=6);
    let n = rng.random_range(2..=6);
    let d = rng.random_range(1..=4);
    let rows: Vec<Vec<u8>> = (0..m)
        .map(|_| {
            let mut row: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.4))).collect();
            if !row.contains(&1) {
                row[rng.random_range(0..n)] = 1;
            }
            row
        })
        .collect();
    let a = QrelMatrix::from_rows(&rows).unwrap();
    let e = EmbeddingPair::random(d, m, n, rng);
    (a, e)
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

#[test]
fn loss_matches_scalar_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (a, e) = random_instance(&mut rng);
        let fast = infonce_loss(&a, &e, 1.0).unwrap();
        let slow = oracle_loss(&a, &e.queries, &e.docs, 1.0);
        assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
        assert!(fast >= 0.0);
    }
}

#[test]
fn gradients_match_central_differences() {
    let h = 1e-5;
    let tau = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (a, e) = random_instance(&mut rng);
        let (gu, gv) = infonce_grad(&a, &e, tau).unwrap();
        for (which, grad) in [(0, &gu), (1, &gv)] {
            for ((r, c), &g) in grad.indexed_iter() {
                let mut plus = (e.queries.clone(), e.docs.clone());
                let mut minus = (e.queries.clone(), e.docs.clone());
                if which == 0 {
                    plus.0[[r, c]] += h;
                    minus.0[[r, c]] -= h;
                } else {
                    plus.1[[r, c]] += h;
                    minus.1[[r, c]] -= h;
                }
                let fd = (oracle_loss(&a, &plus.0, &plus.1, tau) - oracle_loss(&a, &minus.0, &minus.1, tau)) / (2.0 * h);
                assert!(
                    rel_err(g, fd) <= 1e-4 || (g - fd).abs() < 1e-9,
                    "grad {which}[{r},{c}]: analytic {g} vs fd {fd}"
                );
            }
        }
    }
}

#[test]
fn pair_objective_matches_oracle_and_differences() {
    let h = 1e-5;
    let tau = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let (a, e) = random_instance(&mut rng);
        let (loss, gu, gv) = Objective::PairInfoNce.loss_and_grad(&a, &e, tau).unwrap();
        let slow = oracle_pair_loss(&a, &e.queries, &e.docs, tau);
        assert!((loss - slow).abs() < 1e-10, "{loss} vs {slow}");
        for (which, grad) in [(0, &gu), (1, &gv)] {
            for ((r, c), &g) in grad.indexed_iter() {
                let mut plus = (e.queries.clone(), e.docs.clone());
                let mut minus = (e.queries.clone(), e.docs.clone());
                if which == 0 {
                    plus.0[[r, c]] += h;
                    minus.0[[r, c]] -= h;
                } else {
                    plus.1[[r, c]] += h;
                    minus.1[[r, c]] -= h;
                }
                let fd = (oracle_pair_loss(&a, &plus.0, &plus.1, tau) - oracle_pair_loss(&a, &minus.0, &minus.1, tau))
                    / (2.0 * h);
                assert!(
                    rel_err(g, fd) <= 1e-4 || (g - fd).abs() < 1e-9,
                    "pair grad {which}[{r},{c}]: analytic {g} vs fd {fd}"
                );
            }
        }
    }
}
