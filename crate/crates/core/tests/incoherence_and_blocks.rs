mod common;

use common::{dim, gaussian, oracle_singular_values, rng};
use tubal_core::{
    concatenate, conj_transpose, ibtsvt, identity_tensor, incoherence_report, partition, standard_basis, svt, tnn,
    tproduct, IbtsvtConfig, Tensor3, DEFAULT_RANK_TOL,
};

#[test]
fn identity_block_report() {
    let rep = incoherence_report(&identity_tensor(4, 3).unwrap(), DEFAULT_RANK_TOL).unwrap();
    assert_eq!((rep.r, rep.n, rep.n3), (4, 4, 3));
    assert!((rep.mu_u - 3.0).abs() < 1e-9);
    assert!((rep.mu_v - 3.0).abs() < 1e-9);
}

#[test]
fn coherent_rank_one_block() {
    for (n, n3) in [(4, 3), (5, 2), (3, 6)] {
        let e = standard_basis(0, n, n3).unwrap();
        let l = tproduct(&e, &conj_transpose(&e)).unwrap();
        let rep = incoherence_report(&l, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(rep.r, 1);
        assert!((rep.mu_u - (n * n3) as f64).abs() < 1e-9);
        assert!((rep.mu_v - (n * n3) as f64).abs() < 1e-9);
    }
}

#[test]
fn random_low_rank_blocks() {
    for seed in 0..100 {
        let mut r = rng(500 + seed);
        let l = tproduct(&gaussian(&mut r, 8, 2, 4), &gaussian(&mut r, 2, 8, 4)).unwrap();
        let rep = incoherence_report(&l, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(rep.r, 2);
        for mu in [rep.mu_u, rep.mu_v, rep.mu_uv, rep.mu] {
            assert!(mu.is_finite() && mu >= 1.0);
        }
        assert!(rep.mu_u <= (8 * 4) as f64 + 1e-9);
        assert_eq!(rep.mu, rep.mu_u.max(rep.mu_v).max(rep.mu_uv));
    }
}

#[test]
fn scale_invariance() {
    let mut r = rng(21);
    for _ in 0..10 {
        let l = tproduct(&gaussian(&mut r, 6, 3, 4), &gaussian(&mut r, 3, 6, 4)).unwrap();
        let base = incoherence_report(&l, DEFAULT_RANK_TOL).unwrap();
        for c in [-3.0, 0.01, 250.0] {
            let rep = incoherence_report(&l.scale(c), DEFAULT_RANK_TOL).unwrap();
            assert_eq!(rep.r, base.r);
            assert!((rep.mu_u - base.mu_u).abs() < 1e-9 * base.mu_u);
            assert!((rep.mu_v - base.mu_v).abs() < 1e-9 * base.mu_v);
            assert!((rep.mu_uv - base.mu_uv).abs() < 1e-9 * base.mu_uv);
        }
    }
}

#[test]
fn row_permutation_keeps_mu_u() {
    let mut r = rng(22);
    let l = tproduct(&gaussian(&mut r, 6, 2, 3), &gaussian(&mut r, 2, 6, 3)).unwrap();
    let perm = [3, 0, 5, 1, 4, 2];
    let permuted = Tensor3::from_fn(6, 6, 3, |i, j, k| l.get(perm[i], j, k)).unwrap();
    let a = incoherence_report(&l, DEFAULT_RANK_TOL).unwrap();
    let b = incoherence_report(&permuted, DEFAULT_RANK_TOL).unwrap();
    assert!((a.mu_u - b.mu_u).abs() < 1e-9 * a.mu_u);
    assert!((a.mu_v - b.mu_v).abs() < 1e-9 * a.mu_v);
}

#[test]
fn partition_round_trip_many() {
    let mut r = rng(23);
    for _ in 0..60 {
        let (n1, n2, n3) = (dim(&mut r, 12), dim(&mut r, 12), dim(&mut r, 4));
        let (b1, b2) = (dim(&mut r, n1), dim(&mut r, n2));
        let x = gaussian(&mut r, n1, n2, n3);
        let (grid, blocks) = partition(&x, b1, b2).unwrap();
        assert_eq!(grid.len(), n1.div_ceil(b1) * n2.div_ceil(b2));
        assert!(blocks.iter().all(|b| b.n3() == n3));
        let covered: usize = grid.descriptors().iter().map(|d| d.height * d.width).sum();
        assert_eq!(covered, n1 * n2);
        assert_eq!(concatenate(&grid, &blocks).unwrap(), x);
    }
}

#[test]
fn thresholds_decay_geometrically() {
    let mut r = rng(24);
    let x = gaussian(&mut r, 8, 8, 5);
    let cfg = IbtsvtConfig { eps: 1e-14, max_iters: 12, ..Default::default() };
    let res = ibtsvt(&x, &cfg).unwrap();
    let tau0 = 20.0 / (2.0 * 5.0f64).sqrt();
    assert_eq!(res.tau0, tau0);
    for (k, &t) in res.thresholds.iter().enumerate() {
        let expected = tau0 * 1.8f64.powi(-(k as i32 + 1));
        assert!((t - expected).abs() <= 1e-12 * expected);
    }
    assert!(res.thresholds.windows(2).all(|w| w[1] < w[0]));
    let total: f64 = res.thresholds.iter().sum();
    assert!(total <= tau0 / 0.8);
}

#[test]
fn block_tnn_never_increases() {
    let mut r = rng(25);
    let x = gaussian(&mut r, 6, 5, 4);
    let mut previous: Option<Vec<f64>> = None;
    for iters in 1..=8 {
        let cfg = IbtsvtConfig { eps: 1e-14, max_iters: iters, ..Default::default() };
        let res = ibtsvt(&x, &cfg).unwrap();
        let (_, blocks) = partition(&res.l, 2, 2).unwrap();
        let norms: Vec<f64> = blocks.iter().map(|b| tnn(b).unwrap()).collect();
        if let Some(prev) = &previous {
            for (now, before) in norms.iter().zip(prev) {
                assert!(*now <= before + 1e-12);
            }
        }
        previous = Some(norms);
    }
}

#[test]
fn single_block_matches_direct_iteration() {
    let mut r = rng(26);
    let x = gaussian(&mut r, 5, 4, 3);
    let cfg = IbtsvtConfig { block_rows: 5, block_cols: 4, max_iters: 6, eps: 1e-14, ..Default::default() };
    let res = ibtsvt(&x, &cfg).unwrap();
    let mut direct = x.clone();
    for k in 1..=res.iterations {
        direct = svt(&direct, cfg.threshold_at(3, k)).unwrap();
    }
    assert_eq!(res.l, direct);
}

#[test]
fn shrinkage_is_bounded_by_threshold_sum() {
    // every Fourier singular value well above the total shrinkage
    let mut r = rng(27);
    let x = tproduct(&gaussian(&mut r, 6, 6, 4), &identity_tensor(6, 4).unwrap().scale(1.0))
        .unwrap()
        .add(&identity_tensor(6, 4).unwrap().scale(200.0))
        .unwrap();
    let res = ibtsvt(&x, &IbtsvtConfig::default()).unwrap();
    let total: f64 = res.thresholds.iter().sum();
    let (_, xb) = partition(&x, 2, 2).unwrap();
    let (_, lb) = partition(&res.l, 2, 2).unwrap();
    for (xp, lp) in xb.iter().zip(&lb) {
        let delta = xp.sub(lp).unwrap();
        for s in oracle_singular_values(&delta) {
            assert!(s[0] <= total + 1e-9);
        }
    }
}

#[test]
fn stops_on_relative_change() {
    let mut r = rng(28);
    let x = gaussian(&mut r, 8, 8, 6);
    let res = ibtsvt(&x, &IbtsvtConfig::default()).unwrap();
    assert!(res.iterations >= 1);
    if res.converged {
        assert!(*res.history.last().unwrap() <= 1e-2);
        assert!(res.history[..res.history.len() - 1].iter().all(|&h| h > 1e-2));
    } else {
        assert_eq!(res.iterations, 50);
    }
}
