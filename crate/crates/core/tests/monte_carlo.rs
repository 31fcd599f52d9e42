use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use groupshap::inference::moments;
use groupshap::simgen::{compound_symmetry, generate, stream_rng, Alternative, SimSpec, ZModel};

fn null_spec(model: ZModel) -> SimSpec {
    SimSpec {
        model,
        k: 5,
        s: 100,
        rho: 0.5,
        sigma2: 4.0,
        alternative: Alternative::Null,
        replications: 10_000,
        seed: 31,
        alpha: 0.05,
    }
}

#[test]
fn null_means_vanish_and_pooled_covariance_recovers_sigma() {
    for model in ZModel::ALL {
        let spec = null_spec(model);
        let k = spec.k;
        let mut mean_sum = vec![0.0; k];
        let mut cross = DMatrix::<f64>::zeros(k, k);
        for rep in 0..spec.replications as u64 {
            let sample = generate(&spec, rep).unwrap();
            let phi = &sample.phi;
            for (j, m) in mean_sum.iter_mut().enumerate() {
                *m += phi.column(j).mean();
            }
            // mu = 0, so the pooled second moment is the covariance
            cross += phi.tr_mul(phi);
        }
        let reps = spec.replications as f64;
        let n = reps * spec.s as f64;
        let sigma = compound_symmetry(k, spec.rho, spec.sigma2);

        // Var(phi_bar_j) = sigma2 / S per replication
        let se = (spec.sigma2 / spec.s as f64 / reps).sqrt();
        for (j, m) in mean_sum.iter().enumerate() {
            let mean = m / reps;
            assert!(mean.abs() <= 4.0 * se, "{model}: column {j} mean {mean} (se {se})");
        }

        let pooled = cross / n;
        for i in 0..k {
            for j in 0..k {
                let rel = (pooled[(i, j)] - sigma[(i, j)]).abs() / sigma[(i, j)];
                assert!(rel <= 0.02, "{model}: entry ({i},{j}) {} vs {}", pooled[(i, j)], sigma[(i, j)]);
            }
        }
    }
}

#[test]
fn trace_estimators_unbiased_at_moderate_sample() {
    // Sigma = diag(1, 2), S = 50: tr(Sigma^2) = 5 and tr(Sigma^3) = 9
    let reps = 100_000;
    let s = 50;
    let scale = [1.0f64, 2.0f64.sqrt()];
    let mut rng = stream_rng(77, 3, 0, 0);
    let (mut sum2, mut sq2, mut sum3, mut sq3) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..reps {
        let phi = DMatrix::from_fn(s, 2, |_, j| scale[j] * rng.sample::<f64, _>(StandardNormal));
        let m = moments(&phi).unwrap();
        sum2 += m.tr2_hat;
        sq2 += m.tr2_hat * m.tr2_hat;
        sum3 += m.tr3_hat;
        sq3 += m.tr3_hat * m.tr3_hat;
    }
    let n = reps as f64;
    let (mean2, mean3) = (sum2 / n, sum3 / n);
    let se2 = ((sq2 / n - mean2 * mean2) / n).sqrt();
    let se3 = ((sq3 / n - mean3 * mean3) / n).sqrt();
    assert!((mean2 - 5.0).abs() <= 3.0 * se2, "tr2_hat mean {mean2} se {se2}");
    assert!((mean3 - 9.0).abs() <= 3.0 * se3, "tr3_hat mean {mean3} se {se3}");

    // the plug-in traces are biased upward at this size, which is what the
    // corrections are for
    let mut plug = 0.0;
    for _ in 0..2_000 {
        let phi = DMatrix::from_fn(s, 2, |_, j| scale[j] * rng.sample::<f64, _>(StandardNormal));
        plug += moments(&phi).unwrap().tr_sq;
    }
    assert!(plug / 2_000.0 > 5.05);
}
