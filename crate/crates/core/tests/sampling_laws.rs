use ndr_core::dist::{FieldParams, GammaPairParams};
use ndr_core::sampling::{map_chunks, sample_batch, SampleBatch, SampleKind, SeedSpec};
use ndr_core::validate::{empirical_correlation, run_suite, PairStats, SuiteConfig};

/// Raw moments `E[X^j]`, j = 1..4, of Gamma(k, sigma).
fn gamma_raw_moments(k: f64, s: f64) -> [f64; 8] {
    let mut out = [0.0; 8];
    let mut acc = 1.0;
    for (j, o) in out.iter_mut().enumerate() {
        acc *= (k + j as f64) * s;
        *o = acc;
    }
    out
}

#[test]
fn marginal_moments_match_gamma_law() {
    let n = 1_000_000;
    for (i, &(k, s)) in [(1.0, 1.0), (3.0, 0.5), (12.0, 2.88)].iter().enumerate() {
        let p = GammaPairParams::new(s, 0.64, k).unwrap();
        let SampleBatch::Gamma(pairs) = sample_batch(&p, n, SeedSpec::new(77, i as u64), SampleKind::Gamma).unwrap()
        else {
            panic!("wrong batch kind");
        };
        let raw = gamma_raw_moments(k, s);
        for coord in 0..2 {
            for j in 1..=4 {
                let vals: Vec<f64> = pairs
                    .iter()
                    .map(|q| if coord == 0 { q.x1 } else { q.x2 }.powi(j))
                    .collect();
                let mean = vals.iter().sum::<f64>() / n as f64;
                let se = ((raw[2 * j as usize - 1] - raw[j as usize - 1].powi(2)) / n as f64).sqrt();
                let z = (mean - raw[j as usize - 1]).abs() / se;
                assert!(z < 5.0, "k={k} s={s} coord={coord} j={j}: z={z}");
            }
        }
    }
}

#[test]
fn correlation_map_reproduces_square_law() {
    for i in 0..10 {
        let rz = f64::from(i) / 10.0;
        let fp = FieldParams::new(0.7, rz).unwrap();
        let p = fp.gamma_pair(1.0).unwrap();
        let SampleBatch::Intensity(pairs) =
            sample_batch(&p, 1_000_000, SeedSpec::new(11, i as u64), SampleKind::Intensity).unwrap()
        else {
            panic!("wrong batch kind");
        };
        let c = empirical_correlation(&pairs).unwrap();
        assert!((c - rz * rz).abs() <= 0.01, "rho_z={rz}: {c}");
    }
}

#[test]
fn disjoint_streams_are_uncorrelated() {
    let p = GammaPairParams::new(1.0, 0.5, 2.0).unwrap();
    let n = 1_000_000;
    let draw = |stream| match sample_batch(&p, n, SeedSpec::new(5, stream), SampleKind::Ndr).unwrap() {
        SampleBatch::Ndr(v) => v,
        _ => unreachable!(),
    };
    let (a, b) = (draw(1), draw(2));
    let mut s = PairStats::default();
    for (x, y) in a.iter().zip(&b) {
        s.push(*x, *y);
    }
    assert!(s.correlation().unwrap().abs() <= 4.0 / (n as f64).sqrt());
}

#[test]
fn ratio_and_ndr_agree_on_the_same_pairs() {
    let p = GammaPairParams::new(2.88, 0.64, 12.0).unwrap();
    let worst = map_chunks(200_000, SeedSpec::new(3, 0), |rng, len| {
        let sampler = ndr_core::sampling::GammaPairSampler::new(&p).unwrap();
        (0..len)
            .map(|_| {
                let q = sampler.sample(rng);
                let z = q.ratio().unwrap();
                ((z - 1.0).abs() / (z + 1.0) - q.ndr().unwrap()).abs()
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn quick_suite_passes_and_detects_perturbation() {
    let report = run_suite(&SuiteConfig::quick()).unwrap();
    for c in report.failures() {
        eprintln!("failed: {c:?}");
    }
    assert!(report.pass);
    let tilted = run_suite(&SuiteConfig {
        perturb: 0.05,
        ..SuiteConfig::quick()
    })
    .unwrap();
    assert!(!tilted.pass);
}
