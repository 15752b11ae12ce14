mod common;

use common::*;
use proptest::prelude::*;
use sparsh_core::{
    amg_solve, cg, gallery, pbicgstab, pcg, setup, smooth, vcycle, AmgConfig, CsrMatrix, CycleParams, DirectMethod,
    Factorization, Preconditioner, SmootherKind, Termination,
};

const SMOOTHERS: [SmootherKind; 4] = [
    SmootherKind::WeightedJacobi { omega: 2.0 / 3.0 },
    SmootherKind::GaussSeidelForward,
    SmootherKind::GaussSeidelBackward,
    SmootherKind::GaussSeidelSymmetric,
];

fn multilevel(a: &CsrMatrix, coarse_target: usize) -> sparsh_core::Hierarchy {
    setup(a, &AmgConfig { coarse_target, ..AmgConfig::default() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_solution_is_a_fixed_point(n in 1usize..40, seed in any::<u64>(), sweeps in 1usize..4) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 3, false, true);
        let x = random_vec(&mut r, n);
        let f = a.spmv(&x).unwrap();
        for kind in SMOOTHERS {
            let y = smooth(kind, &a, &x, &f, sweeps).unwrap();
            for (p, q) in x.iter().zip(&y) {
                prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn gauss_seidel_matches_triangular_solve(n in 1usize..30, seed in any::<u64>()) {
        // One forward sweep from x is x + (D + L)⁻¹ (f − A x).
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 3, false, true);
        let x = random_vec(&mut r, n);
        let f = random_vec(&mut r, n);
        let dense = a.to_dense();
        let res: Vec<f64> = f.iter().zip(a.spmv(&x).unwrap()).map(|(p, q)| p - q).collect();
        let mut corr = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|j| dense[i * n + j] * corr[j]).sum();
            corr[i] = (res[i] - s) / dense[i * n + i];
        }
        let y = smooth(SmootherKind::GaussSeidelForward, &a, &x, &f, 1).unwrap();
        for i in 0..n {
            prop_assert!((y[i] - (x[i] + corr[i])).abs() <= 1e-10 * (1.0 + y[i].abs()));
        }
    }

    #[test]
    fn coarse_factorization_solves(seed in any::<u64>(), dense in any::<bool>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, 100, 4, false, true);
        let b = random_vec(&mut r, 100);
        let method = if dense { DirectMethod::Dense } else { DirectMethod::Skyline };
        let f = Factorization::factor_with(&a, method).unwrap();
        let x = f.solve(&b).unwrap();
        prop_assert!(norm(&a.residual(&b, &x).unwrap()) <= 1e-10 * norm(&b));
    }
}

#[test]
fn jacobi_residual_does_not_grow() {
    let a = gallery::poisson2d(12, 12).unwrap();
    for seed in 0..10 {
        let mut r = rng(seed);
        let f = random_vec(&mut r, 144);
        let mut x = random_vec(&mut r, 144);
        let mut prev = norm(&a.residual(&f, &x).unwrap());
        for _ in 0..20 {
            x = smooth(SmootherKind::jacobi(), &a, &x, &f, 1).unwrap();
            let now = norm(&a.residual(&f, &x).unwrap());
            assert!(now <= prev * (1.0 + 1e-12), "seed {seed}: {now} > {prev}");
            prev = now;
        }
    }
}

#[test]
fn symmetric_gauss_seidel_is_symmetric_operator() {
    let a = random_spd(&mut rng(3), 60, 4);
    let zero = vec![0.0; 60];
    let mut r = rng(4);
    for _ in 0..10 {
        let f = random_vec(&mut r, 60);
        let g = random_vec(&mut r, 60);
        let bf = smooth(SmootherKind::GaussSeidelSymmetric, &a, &zero, &f, 2).unwrap();
        let bg = smooth(SmootherKind::GaussSeidelSymmetric, &a, &zero, &g, 2).unwrap();
        let (l, rr) = (dot(&bf, &g), dot(&f, &bg));
        assert!((l - rr).abs() <= 1e-12 * l.abs().max(rr.abs()));
    }
}

#[test]
fn vcycle_is_linear_and_symmetric() {
    let a = gallery::poisson2d(24, 24).unwrap();
    let h = multilevel(&a, 20);
    assert!(h.num_levels() >= 4);
    let params = CycleParams::default();
    let n = a.nrows();
    let zero = vec![0.0; n];
    let b = |v: &[f64]| vcycle(&h, 0, v, &zero, &params).unwrap();
    let mut r = rng(9);
    for _ in 0..5 {
        let f = random_vec(&mut r, n);
        let g = random_vec(&mut r, n);
        let (bf, bg) = (b(&f), b(&g));
        let combo: Vec<f64> = f.iter().zip(&g).map(|(p, q)| 2.5 * p - q).collect();
        let bc = b(&combo);
        for i in 0..n {
            assert!((bc[i] - (2.5 * bf[i] - bg[i])).abs() <= 1e-10 * (1.0 + bc[i].abs()));
        }
        let (l, rr) = (dot(&bf, &g), dot(&f, &bg));
        assert!((l - rr).abs() <= 1e-9 * l.abs().max(rr.abs()));
    }
}

#[test]
fn vcycle_residual_decreases_every_cycle() {
    let a = gallery::poisson2d(64, 64).unwrap();
    let h = setup(&a, &AmgConfig::default()).unwrap();
    let f = random_vec(&mut rng(1), a.nrows());
    let mut x = vec![0.0; a.nrows()];
    let mut prev = norm(&f);
    for _ in 0..5 {
        x = vcycle(&h, 0, &f, &x, &CycleParams::default()).unwrap();
        let now = norm(&a.residual(&f, &x).unwrap());
        assert!(now < prev);
        prev = now;
    }
}

#[test]
fn amg_solve_history_is_true_residual() {
    let a = gallery::poisson2d(20, 20).unwrap();
    let h = multilevel(&a, 10);
    let b = random_vec(&mut rng(2), 400);
    let (x, rep) = amg_solve(&h, &b, 1e-9, 200).unwrap();
    assert!(rep.converged());
    let mut y = vec![0.0; 400];
    assert_eq!(rep.residual_history[0], norm(&b));
    for k in 1..=rep.iterations {
        y = vcycle(&h, 0, &b, &y, &CycleParams::default()).unwrap();
        let res = norm(&a.residual(&b, &y).unwrap());
        assert!((res - rep.residual_history[k]).abs() <= 1e-12 * res.max(1e-300));
    }
    assert_eq!(x, y);
    assert_eq!(rep.true_residual, rep.final_residual());
}

/// Textbook CG from a zero guess, written independently of the crate.
fn textbook_cg(dense: &[f64], n: usize, b: &[f64], iters: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = seq_dot(&r, &r);
    let mut hist = vec![rr.sqrt()];
    for _ in 0..iters {
        let ap = dense_matvec(dense, n, &p);
        let alpha = rr / seq_dot(&ap, &p);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = seq_dot(&r, &r);
        hist.push(rr_new.sqrt());
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    (x, hist)
}

/// Textbook BiCGStab with shadow residual `r₀`.
fn textbook_bicgstab(dense: &[f64], n: usize, b: &[f64], iters: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let shadow = r.clone();
    let mut p = r.clone();
    let mut rho = seq_dot(&r, &shadow);
    for _ in 0..iters {
        let v = dense_matvec(dense, n, &p);
        let alpha = rho / seq_dot(&shadow, &v);
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        let t = dense_matvec(dense, n, &s);
        let omega = seq_dot(&t, &s) / seq_dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        let rho_new = seq_dot(&shadow, &r);
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
    }
    x
}

fn seq_dot(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += x[i] * y[i];
    }
    s
}

#[test]
fn pcg_identity_matches_textbook_cg_bitwise() {
    for seed in 0..5 {
        let mut r = rng(100 + seed);
        let a = random_spd(&mut r, 50, 4);
        let b = random_vec(&mut r, 50);
        let (x_ref, hist_ref) = textbook_cg(&a.to_dense(), 50, &b, 5);
        let (x, rep) = pcg(&a, &b, &Preconditioner::Identity, 1e-300, 5).unwrap();
        assert_eq!(rep.iterations, 5);
        assert_eq!(x, x_ref);
        assert_eq!(rep.residual_history, hist_ref);
    }
}

#[test]
fn pbicgstab_identity_matches_textbook() {
    for seed in 0..5 {
        let mut r = rng(200 + seed);
        let a = random_matrix(&mut r, 50, 4, false, true);
        let b = random_vec(&mut r, 50);
        let x_ref = textbook_bicgstab(&a.to_dense(), 50, &b, 5);
        let (x, rep) = pbicgstab(&a, &b, &Preconditioner::Identity, 1e-300, 5).unwrap();
        assert_eq!(rep.iterations, 5);
        for (p, q) in x.iter().zip(&x_ref) {
            assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }
}

#[test]
fn exact_preconditioner_converges_in_one_step() {
    let a = gallery::poisson2d(10, 10).unwrap();
    let h = setup(&a, &AmgConfig::default()).unwrap();
    assert_eq!(h.num_levels(), 1);
    let b = random_vec(&mut rng(7), 100);
    let m = Preconditioner::amg(&h);
    let (_, rep) = pcg(&a, &b, &m, 1e-8, 10).unwrap();
    assert_eq!((rep.iterations, rep.termination), (1, Termination::Converged));
    let (_, rep) = pbicgstab(&a, &b, &m, 1e-8, 10).unwrap();
    assert_eq!((rep.iterations, rep.termination), (1, Termination::Converged));
}

#[test]
fn cg_residuals_are_orthogonal() {
    let a = random_spd(&mut rng(8), 80, 5);
    let b = random_vec(&mut rng(9), 80);
    let residual_after = |k: usize| {
        let (x, _) = cg(&a, &b, 1e-300, k).unwrap();
        a.residual(&b, &x).unwrap()
    };
    let rs: Vec<Vec<f64>> = (0..5).map(residual_after).collect();
    for i in 0..5 {
        for j in 0..i {
            let c = dot(&rs[i], &rs[j]) / (norm(&rs[i]) * norm(&rs[j]));
            assert!(c.abs() < 1e-8, "r{i}·r{j} = {c}");
        }
    }
}

#[test]
fn amg_pcg_beats_cg_and_agrees() {
    let a = gallery::poisson2d(48, 48).unwrap();
    let h = setup(&a, &AmgConfig { coarse_target: 50, ..AmgConfig::default() }).unwrap();
    let b = vec![1.0; a.nrows()];
    let (x1, plain) = cg(&a, &b, 1e-9, 5000).unwrap();
    let (x2, pre) = pcg(&a, &b, &Preconditioner::amg(&h), 1e-9, 5000).unwrap();
    assert!(plain.converged() && pre.converged());
    assert!(pre.iterations < plain.iterations);
    let diff: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| p - q).collect();
    assert!(norm(&diff) <= 1e-6 * norm(&x1));
}

#[test]
fn solves_are_deterministic() {
    let a = gallery::convdiff2d(30, 30, 1.0, 100.0, 1.0).unwrap();
    let b = random_vec(&mut rng(10), 900);
    let run = || {
        let h = setup(&a, &AmgConfig { coarse_target: 30, ..AmgConfig::default() }).unwrap();
        let stats = h.stats();
        let (x, rep) = pbicgstab(&a, &b, &Preconditioner::amg(&h), 1e-10, 100).unwrap();
        (stats, x, rep.residual_history)
    };
    assert_eq!(run(), run());
}

#[test]
fn coarse_solver_variants_agree() {
    let a = gallery::poisson2d(16, 16).unwrap();
    let b = random_vec(&mut rng(12), 256);
    let solve = |cfg: AmgConfig| {
        let h = setup(&a, &cfg).unwrap();
        amg_solve(&h, &b, 1e-10, 500).unwrap()
    };
    let base = AmgConfig { coarse_target: 30, ..AmgConfig::default() };
    let (x_dense, r1) = solve(AmgConfig { direct_method: DirectMethod::Dense, ..base });
    let (x_sky, r2) = solve(AmgConfig { direct_method: DirectMethod::Skyline, ..base });
    let (x_cg, r3) = solve(AmgConfig { coarse_solver: sparsh_core::CoarseSolverKind::cg(), ..base });
    assert!(r1.converged() && r2.converged() && r3.converged());
    for other in [&x_sky, &x_cg] {
        let diff: Vec<f64> = x_dense.iter().zip(other).map(|(p, q)| p - q).collect();
        assert!(norm(&diff) <= 1e-8 * norm(&x_dense));
    }
}
