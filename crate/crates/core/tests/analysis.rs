use bohmsim::analysis::{
    box_counting_dimension, density_histogram, fit_conic, l1_distance, run_ensemble, sample_born,
    EnsembleSpec, GridSpec, HistogramGrid, Sampler,
};
use bohmsim::dynamics::IntegratorConfig;
use bohmsim::wavefunctions::{AnyModel, ModelSpec, QubitSpec};
use proptest::prelude::*;

const BOX: [f64; 4] = [-8.0, 8.0, -8.0, 8.0];

fn qubit(c2: f64) -> AnyModel<f64> {
    ModelSpec::Qubit(QubitSpec::with_c2(c2)).build().unwrap()
}

fn right_half_mass(m: &AnyModel<f64>) -> f64 {
    let rho = density_histogram(m, 0.0, &GridSpec::new(BOX, 360, 360)).unwrap();
    rho.p
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 360 >= 180)
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn blob_masses_follow_the_coefficients() {
    assert!((right_half_mass(&qubit(std::f64::consts::FRAC_1_SQRT_2)) - 0.5).abs() < 0.01);
    assert!((right_half_mass(&qubit(0.5)) - 0.75).abs() < 0.01);
}

#[test]
fn born_samples_sit_in_the_blobs() {
    let pts = sample_born(&qubit(std::f64::consts::FRAC_1_SQRT_2), 0.0, 10_000, 3, BOX).unwrap();
    let right: Vec<_> = pts.iter().filter(|p| p[0] > 0.0).collect();
    let mean = right.iter().map(|p| p[0]).sum::<f64>() / right.len() as f64;
    assert!((mean - 2.5 * 2f64.sqrt()).abs() < 0.05, "{mean}");

    let pts = sample_born(&qubit(0.5), 0.0, 10_000, 4, BOX).unwrap();
    let frac = pts.iter().filter(|p| p[0] > 0.0).count() as f64 / 1e4;
    assert!((frac - 0.75).abs() < 0.02, "{frac}");

    let pts = sample_born(&qubit(0.0), 0.0, 2_000, 5, BOX).unwrap();
    assert!(pts.iter().all(|p| p[0] > 0.0));
}

#[test]
fn density_histogram_is_resolution_consistent() {
    let m = qubit(std::f64::consts::FRAC_1_SQRT_2);
    let coarse = density_histogram(&m, 2.0, &GridSpec::new(BOX, 360, 360)).unwrap();
    let fine = density_histogram(&m, 2.0, &GridSpec::new(BOX, 720, 720))
        .unwrap()
        .rebin(2)
        .unwrap();
    let worst = coarse
        .p
        .iter()
        .zip(&fine.p)
        .fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn ensemble_is_independent_of_worker_count() {
    let m = qubit(std::f64::consts::FRAC_1_SQRT_2);
    let spec = EnsembleSpec {
        n: 24,
        t_max: 100.0,
        seed: 9,
        grid: GridSpec::new(BOX, 60, 60),
        ..EnsembleSpec::default()
    };
    let cfg = IntegratorConfig::default();
    let a = run_ensemble(&m, &spec, &cfg, 1).unwrap();
    let b = run_ensemble(&m, &spec, &cfg, 8).unwrap();
    assert_eq!(a.histogram, b.histogram);
    assert_eq!(a.summaries, b.summaries);
}

#[test]
fn explicit_sampler_needs_matching_count() {
    let spec = EnsembleSpec {
        n: 3,
        sampler: Sampler::Explicit {
            points: vec![vec![1.0, 1.0]],
        },
        ..EnsembleSpec::default()
    };
    assert!(spec.validate().is_err());
}

#[test]
fn section_diagnostics_on_fixtures() {
    let circle: Vec<[f64; 2]> = (0..400)
        .map(|k| {
            let a = k as f64 * 0.7;
            [1.5 * a.cos() + 0.2, 0.5 * a.sin()]
        })
        .collect();
    let fit = fit_conic(&circle).unwrap();
    assert!(fit.is_ellipse && fit.max_distance < 1e-10);
    let d = box_counting_dimension(&circle, 2..=6).unwrap();
    assert!((d - 1.0).abs() < 0.2, "{d}");
}

proptest! {
    #[test]
    fn histogram_csv_round_trips(points in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 0..200)) {
        let mut h = HistogramGrid::new(&GridSpec::new(BOX, 13, 7));
        for (x, y) in &points {
            h.add(*x, *y);
        }
        prop_assert_eq!(h.total + h.overflow, points.len() as u64);
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        prop_assert_eq!(HistogramGrid::read_csv(&buf[..]).unwrap(), h);
    }

    #[test]
    fn l1_is_a_bounded_symmetric_distance(a in prop::collection::vec(0.0..1.0f64, 16), b in prop::collection::vec(0.0..1.0f64, 16)) {
        let spec = GridSpec::new(BOX, 4, 4);
        let mass = |v: &[f64]| {
            let s: f64 = v.iter().sum::<f64>().max(1e-12);
            bohmsim::analysis::GridMass { spec: spec.clone(), p: v.iter().map(|x| x / s).collect() }
        };
        let (p, q) = (mass(&a), mass(&b));
        let d = l1_distance(&p, &q).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&d));
        prop_assert!((d - l1_distance(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!(l1_distance(&p, &p).unwrap() == 0.0);
    }

    #[test]
    fn rebinning_preserves_mass(v in prop::collection::vec(0.0..1.0f64, 36)) {
        let m = bohmsim::analysis::GridMass { spec: GridSpec::new(BOX, 6, 6), p: v.clone() };
        for f in [2, 3, 6] {
            let r = m.rebin(f).unwrap();
            prop_assert!((r.p.iter().sum::<f64>() - v.iter().sum::<f64>()).abs() < 1e-12);
        }
        prop_assert!(m.rebin(4).is_err());
    }
}
