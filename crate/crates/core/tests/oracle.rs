use pronylab::applications::gauss_quadrature_from_moments;
use pronylab::prony::{hankel_map, pade_numerator};
use pronylab::{moments, prony_solve, MomentVector, SolveOutcome, SpikeSignal};
use pronylab_oracle::{brute_force_solve, forward_moments, series_expand_rational, SearchBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(rng: &mut ChaCha8Rng) -> SpikeSignal {
    loop {
        let x: Vec<f64> = {
            let mut v = vec![rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
            v.sort_by(f64::total_cmp);
            v
        };
        if x[1] - x[0] < 0.5 {
            continue;
        }
        let a = (0..2)
            .map(|_| rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        return SpikeSignal::new(a, x).unwrap();
    }
}

#[test]
fn moments_agree_with_direct_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let s = random_pair(&mut rng);
        let ours = moments(&s, 8);
        let theirs = forward_moments(s.amplitudes(), s.nodes(), 8);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn solver_agrees_with_brute_force_for_two_spikes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let s = random_pair(&mut rng);
        let mu = moments(&s, 4);
        let ours = prony_solve(&MomentVector::new(mu.clone()).unwrap()).into_real_signal().unwrap();
        let brute = brute_force_solve(&mu, 2, &SearchBox::default());
        assert!(brute.residual < 1e-8, "brute force residual {}", brute.residual);
        for (a, b) in ours.nodes().iter().zip(&brute.nodes) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }
}

#[test]
fn single_spike_agrees_with_brute_force() {
    let mu = forward_moments(&[1.5], &[-0.4], 2);
    let ours = prony_solve(&MomentVector::new(mu.clone()).unwrap()).into_real_signal().unwrap();
    let brute = brute_force_solve(&mu, 1, &SearchBox::default());
    assert!((ours.nodes()[0] - brute.nodes[0]).abs() < 1e-6);
    assert!((ours.amplitudes()[0] - brute.amplitudes[0]).abs() < 1e-6);
}

#[test]
fn complex_solutions_have_no_real_fit() {
    let mu = [2.0, 0.0, -0.5, 0.0];
    assert!(matches!(
        prony_solve(&MomentVector::new(mu.to_vec()).unwrap()).outcome,
        SolveOutcome::Complex { .. }
    ));
    assert!(brute_force_solve(&mu, 2, &SearchBox::default()).residual > 1e-3);
}

#[test]
fn pade_approximant_reproduces_the_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = random_pair(&mut rng);
        let mu = MomentVector::new(moments(&s, 4)).unwrap();
        let q = hankel_map(&mu).unwrap();
        let p = pade_numerator(&mu, &q).unwrap();
        let series = series_expand_rational(&p, q.low_coeffs(), 10);
        let exact = moments(&s, 10);
        for (a, b) in series.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn gauss_rules_match_oracle_moments() {
    // Lebesgue moments on [-1, 1], weight (1 - x^2) on [-1, 1], and the
    // uniform weight on [0, 1].
    let cases: [Vec<f64>; 3] = [
        (0..6).map(|k| if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 }).collect(),
        (0..6)
            .map(|k| if k % 2 == 0 { 2.0 / (k as f64 + 1.0) - 2.0 / (k as f64 + 3.0) } else { 0.0 })
            .collect(),
        (0..6).map(|k| 1.0 / (k as f64 + 1.0)).collect(),
    ];
    for m in cases {
        let q = gauss_quadrature_from_moments(&MomentVector::new(m.clone()).unwrap()).unwrap();
        assert!(q.weights.iter().all(|w| *w > 0.0));
        let reproduced = forward_moments(&q.weights, &q.nodes, 6);
        for (a, b) in reproduced.iter().zip(&m) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
