//! Property tests over random qrel and score matrices.

use std::collections::HashSet;

use embedcap::metrics::{average_query_strength, doc_graph_density, query_graph, DocNodeSet, GraphMetricsReport};
use embedcap::qrel::{
    check_gt, check_rop, make_rt_certificate, shift_rows, sign_agrees, sign_matrix, QrelMatrix, ScoreMatrix,
};
use embedcap::retrieval::{dense_search, recall_at_k, Bm25Params, DenseVectorStore, Hit, InvertedIndex, RetrievalRun, Truncation};
use embedcap::sweep::{binomial, dense_qrels, fit_cubic};
use proptest::prelude::*;

fn qrels_and_scores(max: usize) -> impl Strategy<Value = (QrelMatrix, ScoreMatrix)> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(any::<bool>(), m * n),
            proptest::collection::vec(-1.0f64..1.0, m * n),
            any::<bool>(),
        )
            .prop_map(move |(bits, noise, separated)| {
                let rows: Vec<Vec<u8>> = bits.chunks(n).map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect();
                let a = QrelMatrix::from_rows(&rows).unwrap();
                // half the cases push relevant scores up so that both outcomes occur
                let lift = if separated { 2.5 } else { 0.0 };
                let scores: Vec<Vec<f64>> = (0..m)
                    .map(|i| (0..n).map(|j| noise[i * n + j] + if a.get(i, j) { lift } else { 0.0 }).collect())
                    .collect();
                (a, ScoreMatrix::from_rows(&scores).unwrap())
            })
    })
}

fn pair_qrels(max_docs: usize) -> impl Strategy<Value = QrelMatrix> {
    (3..=max_docs).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n).prop_filter("distinct", |(a, b)| a != b), 1..=12)
            .prop_map(move |pairs| {
                let sets: Vec<Vec<usize>> = pairs.into_iter().map(|(a, b)| vec![a.min(b), a.max(b)]).collect();
                QrelMatrix::from_relevant_sets(n, &sets).unwrap()
            })
    })
}

fn permute(a: &QrelMatrix, rows: &[usize], cols: &[usize]) -> QrelMatrix {
    let sets: Vec<Vec<usize>> = rows
        .iter()
        .map(|&i| {
            let rel: HashSet<usize> = a.relevant(i).into_iter().collect();
            (0..cols.len()).filter(|&j| rel.contains(&cols[j])).collect()
        })
        .collect();
    QrelMatrix::from_relevant_sets(a.num_docs(), &sets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rop_iff_rt_certificate((a, b) in qrels_and_scores(8)) {
        let rop = check_rop(&a, &b).unwrap();
        let cert = make_rt_certificate(&a, &b).unwrap();
        prop_assert_eq!(rop, cert.is_some());
        if let Some(c) = cert {
            prop_assert!(c.verify(&a, &b).unwrap());
        }
    }

    #[test]
    fn certificates_chain((a, b) in qrels_and_scores(8), tau in -1.0f64..3.0) {
        if check_gt(&a, &b, tau).unwrap() {
            let c = make_rt_certificate(&a, &b).unwrap();
            prop_assert!(c.is_some());
            let constant = vec![tau; a.num_queries()];
            prop_assert!(sign_agrees(&sign_matrix(&a), &shift_rows(&b, &constant).unwrap()).unwrap());
        }
        if let Some(c) = make_rt_certificate(&a, &b).unwrap() {
            let shifted = shift_rows(&b, c.row_thresholds.as_deref().unwrap()).unwrap();
            prop_assert!(sign_agrees(&sign_matrix(&a), &shifted).unwrap());
        }
    }

    #[test]
    fn sign_matrix_inverts((a, _) in qrels_and_scores(8)) {
        let s = sign_matrix(&a);
        for ((i, j), &v) in s.entries().indexed_iter() {
            prop_assert_eq!((v + 1) / 2 == 1, a.get(i, j));
        }
        prop_assert_eq!(s.to_qrels().shape(), a.shape());
    }

    #[test]
    fn checkers_are_pure((a, b) in qrels_and_scores(6), tau in -1.0f64..3.0) {
        prop_assert_eq!(check_rop(&a, &b).unwrap(), check_rop(&a, &b).unwrap());
        prop_assert_eq!(check_gt(&a, &b, tau).unwrap(), check_gt(&a, &b, tau).unwrap());
        prop_assert_eq!(make_rt_certificate(&a, &b).unwrap(), make_rt_certificate(&a, &b).unwrap());
    }

    #[test]
    fn dense_rows_are_distinct_k_subsets(n in 2usize..12, k in 1usize..4, seed in any::<u64>(), frac in 0.0f64..1.0) {
        prop_assume!(k <= n);
        let total = binomial(n as u64, k as u64).unwrap() as usize;
        let all = dense_qrels(n, k, None, seed).unwrap();
        prop_assert_eq!(all.num_queries(), total);
        let m = ((total as f64 * frac) as usize).max(1);
        let some = dense_qrels(n, k, Some(m), seed).unwrap();
        prop_assert_eq!(some.num_queries(), m);
        let rows: HashSet<Vec<usize>> = (0..m).map(|i| some.relevant(i)).collect();
        prop_assert_eq!(rows.len(), m);
        prop_assert!((0..m).all(|i| some.relevant_count(i) == k));
    }

    #[test]
    fn cubic_fit_is_exact_on_cubics(c in proptest::array::uniform4(-5.0f64..5.0), start in 1usize..20) {
        let pts: Vec<(f64, f64)> = (start..start + 8)
            .map(|d| {
                let x = d as f64;
                (x, c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x)
            })
            .collect();
        let fit = fit_cubic(&pts).unwrap();
        for (got, want) in fit.coefficients.iter().zip(c) {
            prop_assert!((got - want).abs() < 1e-6 * (1.0 + want.abs()), "{:?} vs {:?}", fit.coefficients, c);
        }
        let ss_tot: f64 = {
            let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            pts.iter().map(|p| (p.1 - mean).powi(2)).sum()
        };
        if ss_tot > 1e-6 {
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cubic_residuals_satisfy_normal_equations(ys in proptest::collection::vec(0.0f64..100.0, 4..12)) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 + 2.0, y)).collect();
        let fit = fit_cubic(&pts).unwrap();
        for p in 0..4 {
            let dot: f64 = pts.iter().map(|&(x, y)| x.powi(p) * (y - fit.eval(x))).sum();
            let scale: f64 = pts.iter().map(|&(x, y)| (x.powi(p) * y).abs()).sum::<f64>().max(1.0);
            prop_assert!(dot.abs() / scale < 1e-8, "column {p}: {dot}");
        }
    }

    #[test]
    fn metrics_ignore_row_and_column_order(a in pair_qrels(9), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<usize> = (0..a.num_queries()).collect();
        let mut cols: Vec<usize> = (0..a.num_docs()).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let p = permute(&a, &rows, &cols);
        let r1 = GraphMetricsReport::compute(&a).unwrap();
        let r2 = GraphMetricsReport::compute(&p).unwrap();
        prop_assert_eq!(r1.doc_graph_edges, r2.doc_graph_edges);
        prop_assert_eq!(r1.query_graph_edges, r2.query_graph_edges);
        prop_assert!((r1.average_query_strength - r2.average_query_strength).abs() < 1e-12);
        prop_assert_eq!(
            doc_graph_density(&a, DocNodeSet::AllDocs),
            doc_graph_density(&p, DocNodeSet::AllDocs)
        );
        for r in [&r1, &r2] {
            prop_assert!((0.0..=1.0).contains(&r.doc_graph_density));
            prop_assert!((0.0..=1.0).contains(&r.query_graph_density));
            prop_assert!(r.average_query_strength >= 0.0);
        }
    }

    #[test]
    fn pair_weights_are_thirds_or_one(a in pair_qrels(9)) {
        for e in query_graph(&a).unwrap().edges {
            prop_assert!(e.weight == 1.0 || e.weight == 1.0 / 3.0, "{}", e.weight);
        }
    }

    #[test]
    fn strength_bounded_by_degree_times_min_weight(a in pair_qrels(9)) {
        let g = query_graph(&a).unwrap();
        if let Some(min_w) = g.edges.iter().map(|e| e.weight).reduce(f64::min) {
            let avg_degree = 2.0 * g.edges.len() as f64 / g.nodes as f64;
            prop_assert!(average_query_strength(&a).unwrap() >= avg_degree * min_w - 1e-12);
        }
    }

    #[test]
    fn unit_doc_density_iff_judged_pairs_all_covered(a in pair_qrels(6)) {
        let judged: Vec<usize> = a.column_counts().iter().enumerate().filter(|(_, &c)| c > 0).map(|(j, _)| j).collect();
        let covered: HashSet<(usize, usize)> = (0..a.num_queries()).map(|i| { let r = a.relevant(i); (r[0], r[1]) }).collect();
        let all_pairs = judged.iter().enumerate().all(|(x, &p)| judged[x + 1..].iter().all(|&q| covered.contains(&(p, q))));
        prop_assert_eq!(doc_graph_density(&a, DocNodeSet::JudgedOnly) == 1.0, all_pairs);
    }

    #[test]
    fn bm25_scores_ignore_document_order(
        docs in proptest::collection::vec(proptest::collection::vec(0usize..8, 1..10), 2..12),
        q in proptest::collection::vec(0usize..8, 1..4),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let word = |w: usize| format!("w{w}");
        let texts: Vec<(String, String)> = docs
            .iter()
            .enumerate()
            .map(|(i, ws)| (format!("d{i:02}"), ws.iter().map(|&w| word(w)).collect::<Vec<_>>().join(" ")))
            .collect();
        let mut shuffled = texts.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let query = q.iter().map(|&w| word(w)).collect::<Vec<_>>().join(" ");
        let a = InvertedIndex::build(texts.iter().map(|(i, t)| (i.as_str(), t.as_str())));
        let b = InvertedIndex::build(shuffled.iter().map(|(i, t)| (i.as_str(), t.as_str())));
        let p = Bm25Params::default();
        prop_assert_eq!(a.search(&query, 100, p).unwrap(), b.search(&query, 100, p).unwrap());
    }

    #[test]
    fn recall_is_monotone_in_k(a in pair_qrels(8), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = a.num_docs();
        let mut run = RetrievalRun::new("r", n);
        for qid in a.query_ids() {
            let mut order: Vec<&String> = a.doc_ids().iter().collect();
            order.shuffle(&mut rng);
            run.results.insert(
                qid.clone(),
                order.iter().enumerate().map(|(r, d)| Hit { doc_id: (*d).clone(), score: (n - r) as f64 }).collect(),
            );
        }
        let recalls: Vec<f64> = (1..=n).map(|k| recall_at_k(&run, &a, k).unwrap()).collect();
        prop_assert!(recalls.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(recalls[n - 1], 1.0);
    }

    #[test]
    fn full_truncation_is_bitwise_identity(
        vs in proptest::collection::vec(proptest::collection::vec(0.1f64..1.0, 5), 2..8),
    ) {
        let store = DenseVectorStore::new(vs.iter().enumerate().map(|(i, v)| (format!("x{i}"), v.clone())).collect()).unwrap();
        let full = dense_search(&store, &store, Truncation::Full, store.len(), "t").unwrap();
        let same = dense_search(&store, &store, Truncation::To(store.dim()), store.len(), "t").unwrap();
        for (q, hits) in &full.results {
            let other = &same.results[q];
            prop_assert!(hits.iter().zip(other).all(|(a, b)| a.doc_id == b.doc_id && a.score.to_bits() == b.score.to_bits()));
        }
    }
}

#[test]
fn min_docs_exhaustive_against_running_binomials() {
    for k in 1u64..=5 {
        // walk n upward keeping C(n-1, k) and C(n, k)
        let mut n = k;
        let mut prev: u128 = 0;
        let mut cur: u128 = 1;
        let mut m: u64 = 1;
        while m <= 1_000_000 {
            while u128::from(m) > cur {
                n += 1;
                prev = cur;
                cur = cur * u128::from(n) / u128::from(n - k);
            }
            assert!(prev < u128::from(m) && u128::from(m) <= cur);
            assert_eq!(embedcap::sweep::min_docs_for_queries(m, k), n, "m={m} k={k}");
            m += 1;
        }
    }
}
