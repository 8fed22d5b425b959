use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shotzone_core::nn::*;

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn randn(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

fn batch(rng: &mut ChaCha8Rng, shape: NetShape, n: usize) -> Vec<Example> {
    (0..n)
        .map(|_| {
            let steps = rng.gen_range(1..=6);
            Example {
                steps: randn(rng, steps * shape.context),
                aux: randn(rng, shape.aux),
                target: rng.gen_range(0..shape.classes),
            }
        })
        .collect()
}

#[test]
fn dense_layers_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for act in [Activation::Identity, Activation::Tanh, Activation::Relu] {
        for _ in 0..4 {
            let (i, o) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let mut obj = DenseObjective {
                layer: Dense::new(i, o, act, &mut rng),
                x: randn(&mut rng, i),
                r: randn(&mut rng, o),
            };
            let report = gradient_check(&mut obj, EPS, TOL, None);
            assert!(report.passed(), "{act:?} {i}x{o}: {report:?}");
        }
    }
}

#[test]
fn lstm_unroll_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let (d, h) = (rng.gen_range(1..9), rng.gen_range(1..9));
        let mut obj = LstmObjective {
            cell: LstmCell::new(d, h, &mut rng),
            xs: randn(&mut rng, 6 * d),
            r: randn(&mut rng, 6 * h),
        };
        let report = gradient_check(&mut obj, EPS, TOL, None);
        assert!(report.passed(), "lstm {d}->{h}: {report:?}");
    }
}

#[test]
fn small_networks_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 0..12 {
        let topology = [Topology::FeedForward, Topology::Lstm, Topology::PersonalizedLstm][k % 3];
        let shape = NetShape {
            context: rng.gen_range(2..8),
            aux: rng.gen_range(1..6),
            hidden: rng.gen_range(2..7),
            layers: rng.gen_range(1..4),
            head: rng.gen_range(3..9),
            classes: 17,
        };
        let net = Network::new(topology, shape, &mut rng);
        let batch = batch(&mut rng, shape, 3);
        let mut obj = NetworkObjective { net, batch };
        let report = gradient_check(&mut obj, EPS, TOL, None);
        assert!(report.passed(), "{topology:?} {shape:?}: {report:?}");
    }
}

#[test]
fn corrupted_backward_pass_is_named() {
    struct Corrupt(NetworkObjective);
    impl Objective for Corrupt {
        fn blocks(&self) -> Vec<(String, usize)> {
            self.0.blocks()
        }
        fn param_mut(&mut self, b: usize, i: usize) -> &mut f64 {
            self.0.param_mut(b, i)
        }
        fn loss(&self) -> f64 {
            self.0.loss()
        }
        fn gradient(&self) -> Vec<Vec<f64>> {
            let mut g = self.0.gradient();
            // halve the bias gradient of the top LSTM layer
            g[3].iter_mut().for_each(|v| *v *= 0.5);
            g
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let shape = NetShape { context: 4, aux: 3, hidden: 5, layers: 2, head: 6, classes: 17 };
    let net = Network::new(Topology::PersonalizedLstm, shape, &mut rng);
    let batch = batch(&mut rng, shape, 4);
    let report = gradient_check(&mut Corrupt(NetworkObjective { net, batch }), EPS, TOL, None);
    assert_eq!(report.failing, vec!["lstm1.b".to_string()]);
}

#[test]
fn report_is_deterministic() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let shape = NetShape { context: 6, aux: 4, hidden: 5, layers: 2, head: 7, classes: 17 };
        let net = Network::new(Topology::PersonalizedLstm, shape, &mut rng);
        let batch = batch(&mut rng, shape, 4);
        gradient_check(&mut NetworkObjective { net, batch }, EPS, TOL, None)
    };
    assert_eq!(run(), run());
}

#[test]
fn softmax_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..20 {
        let z = randn(&mut rng, 17).iter().map(|v| v * 4.0).collect::<Vec<_>>();
        let t = rng.gen_range(0..17);
        let (_, _, g) = softmax_xent(&z, t);
        for k in 0..17 {
            let mut up = z.clone();
            up[k] += EPS;
            let mut down = z.clone();
            down[k] -= EPS;
            let n = (softmax_xent(&up, t).0 - softmax_xent(&down, t).0) / (2.0 * EPS);
            assert!((g[k] - n).abs() / g[k].abs().max(n.abs()).max(1e-8) < 1e-6 || (g[k] - n).abs() < 1e-10);
        }
    }
}

#[test]
fn adam_solves_a_quadratic_bowl() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let center = randn(&mut rng, 10);
    let scale: Vec<f64> = (0..10).map(|i| 1.0 + i as f64 * 0.5).collect();
    let loss = |p: &[f64]| -> f64 { p.iter().zip(&center).zip(&scale).map(|((x, c), s)| s * (x - c).powi(2)).sum() };
    let mut p = vec![0.0; 10];
    let mut opt = Adam::new(AdamConfig { lr: 1e-2, ..Default::default() }, &[10]);
    let mut history = Vec::new();
    for _ in 0..2000 {
        let g: Vec<f64> = p.iter().zip(&center).zip(&scale).map(|((x, c), s)| 2.0 * s * (x - c)).collect();
        opt.step(&mut [&mut p], &[&g]).unwrap();
        history.push(loss(&p));
    }
    assert!(*history.last().unwrap() < 1e-6, "{}", history.last().unwrap());
}

#[test]
fn full_personalized_model_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let shape = NetShape { context: 39, aux: 46, hidden: 64, layers: 2, head: 64, classes: 17 };
    let net = Network::new(Topology::PersonalizedLstm, shape, &mut rng);
    let batch = batch(&mut rng, shape, 4);
    let mut obj = NetworkObjective { net, batch };
    let report = gradient_check(&mut obj, EPS, TOL, None);
    assert!(report.checked() > 70_000);
    assert!(report.passed(), "{:?} {}", report.failing, report.max_rel_error);
}
