//! Metrics checked against independent, deliberately naive implementations.

use rand::Rng;
use ssclust::matching::{min_cost_matching, CostMatrix};
use ssclust::metrics::{kl_spherical_gaussian, nmi};
use ssclust::rng::stream;

/// NMI straight from the definition: probabilities over every label pair.
fn nmi_brute_force(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let p_a = |u: usize| a.iter().filter(|&&x| x == u).count() as f64 / n;
    let p_b = |v: usize| b.iter().filter(|&&x| x == v).count() as f64 / n;
    let p_ab = |u: usize, v: usize| a.iter().zip(b).filter(|&(&x, &y)| x == u && y == v).count() as f64 / n;
    let entropy =
        |p: &dyn Fn(usize) -> f64, k: usize| -> f64 { (0..k).map(p).filter(|&q| q > 0.0).map(|q| -q * q.ln()).sum() };
    let (h_a, h_b) = (entropy(&p_a, ka), entropy(&p_b, kb));
    let mut info = 0.0;
    for u in 0..ka {
        for v in 0..kb {
            let joint = p_ab(u, v);
            if joint > 0.0 {
                info += joint * (joint / (p_a(u) * p_b(v))).ln();
            }
        }
    }
    if h_a + h_b == 0.0 {
        return 1.0;
    }
    (2.0 * info / (h_a + h_b)).clamp(0.0, 1.0)
}

#[test]
fn nmi_matches_definition() {
    let mut rng = stream(31, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..80);
        let (ka, kb) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..kb)).collect();
        let got = nmi(&a, &b).unwrap();
        let want = nmi_brute_force(&a, &b);
        assert!((got - want).abs() < 1e-10, "{a:?} {b:?}: {got} vs {want}");
    }
}

fn normal_log_pdf(x: f64, mu: f64, var: f64) -> f64 {
    -0.5 * ((x - mu).powi(2) / var + (2.0 * std::f64::consts::PI * var).ln())
}

/// `∫ p ln(p/q)` by composite Simpson over ±14 standard deviations of `p`.
fn kl_quadrature(mu1: f64, var1: f64, mu2: f64, var2: f64) -> f64 {
    let half_width = 14.0 * var1.sqrt();
    let (lo, hi) = (mu1 - half_width, mu1 + half_width);
    let steps = 20_000;
    let h = (hi - lo) / steps as f64;
    let f = |x: f64| {
        let lp = normal_log_pdf(x, mu1, var1);
        lp.exp() * (lp - normal_log_pdf(x, mu2, var2))
    };
    let mut sum = f(lo) + f(hi);
    for i in 1..steps {
        sum += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn gaussian_kl_matches_quadrature() {
    let mut rng = stream(32, 0);
    for _ in 0..100 {
        let (mu1, mu2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (var1, var2) = (rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0));
        let got = kl_spherical_gaussian(&[mu1], var1, &[mu2], var2).unwrap();
        let want = kl_quadrature(mu1, var1, mu2, var2);
        assert!((got - want).abs() < 1e-6, "{mu1} {var1} {mu2} {var2}: {got} vs {want}");
    }
}

fn best_by_enumeration(matrix: &CostMatrix) -> f64 {
    fn go(matrix: &CostMatrix, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        let k = matrix.size();
        if row == k {
            *best = best.min(acc);
            return;
        }
        for c in 0..k {
            if !used[c] {
                used[c] = true;
                go(matrix, row + 1, used, acc + matrix.get(row, c), best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(matrix, 0, &mut vec![false; matrix.size()], 0.0, &mut best);
    best
}

#[test]
fn matching_matches_enumeration() {
    let mut rng = stream(33, 0);
    for trial in 0..200 {
        let k = 1 + trial % 7;
        // integer costs make every permutation's total exact
        let costs: Vec<f64> = (0..k * k).map(|_| f64::from(rng.gen_range(0..50u32))).collect();
        let matrix = CostMatrix::new(k, costs).unwrap();
        assert_eq!(
            min_cost_matching(&matrix).cost,
            best_by_enumeration(&matrix),
            "trial {trial}"
        );
    }
}
