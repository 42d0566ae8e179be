mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use common::*;
use inharmonic::omt::{
    chs, maximal_harmonic_order, omt_distance, q_cost, weighted_harmonic_fit, LineSpectrum,
};

fn arb_spectrum(max_atoms: usize) -> impl Strategy<Value = LineSpectrum> {
    prop::collection::vec((0.05..PI - 0.05, 0.01..2.0f64), 1..=max_atoms).prop_filter_map(
        "distinct frequencies",
        |mut atoms| {
            atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
            if atoms.windows(2).any(|w| w[1].0 - w[0].0 < 1e-3) {
                return None;
            }
            let (f, p): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
            Some(spectrum(&f, &p))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn plan_conserves_mass(a in arb_spectrum(5), b in arb_spectrum(5)) {
        let b = b.scaled(a.total_power() / b.total_power()).unwrap();
        let (cost, plan) = omt_distance(&a, &b).unwrap();
        prop_assert!(cost >= 0.0);
        for (got, atom) in plan.source_marginal(a.len()).iter().zip(a.atoms()) {
            prop_assert!((got - atom.mass()).abs() <= 1e-12 * a.total_mass());
        }
        for (got, atom) in plan.target_marginal(b.len()).iter().zip(b.atoms()) {
            prop_assert!((got - atom.mass()).abs() <= 1e-12 * a.total_mass());
        }
    }

    #[test]
    fn monotone_plan_matches_linear_program(seed in 0u64..10_000) {
        let mut rng = rng(seed);
        let m = rand::Rng::random_range(&mut rng, 1..=5);
        let k = rand::Rng::random_range(&mut rng, 1..=5);
        let units = rand::Rng::random_range(&mut rng, 5..=100);
        let a = spectrum(&random_frequencies(&mut rng, m, 1e-3), &dyadic_powers(&mut rng, m, units));
        let b = spectrum(&random_frequencies(&mut rng, k, 1e-3), &dyadic_powers(&mut rng, k, units));
        let (cost, _) = omt_distance(&a, &b).unwrap();
        prop_assert!((cost - lp_transport(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn chs_conserves_power(s in arb_spectrum(5)) {
        let res = chs(&s, None).unwrap();
        let total: f64 = res.harmonic_powers.iter().sum();
        prop_assert!((total - s.total_power()).abs() <= 1e-12 * s.total_power());
        let (cost, _) = omt_distance(&s, &res.spectrum().unwrap()).unwrap();
        prop_assert!((cost - res.cost).abs() <= 1e-9 * res.cost.max(1e-12));
    }

    #[test]
    fn chs_is_scale_equivariant(s in arb_spectrum(5), c in 0.01..100.0f64) {
        let a = chs(&s, None).unwrap();
        let b = chs(&s.scaled(c).unwrap(), None).unwrap();
        prop_assert!((a.omega0 - b.omega0).abs() <= 1e-13 * a.omega0);
        prop_assert_eq!(&a.atom_harmonics, &b.atom_harmonics);
        // a harmonic input has a cost at rounding level, so the tolerance has a floor
        let floor = 1e-14 * c * s.total_mass() * PI * PI;
        prop_assert!((b.cost - c * a.cost).abs() <= 1e-12 * c * a.cost + floor);
    }

    #[test]
    fn q_cost_is_continuous(s in arb_spectrum(5), start in 0.05..0.5f64) {
        let order = maximal_harmonic_order(&s.frequencies()).unwrap();
        let step = 1e-7;
        let mass = s.total_mass();
        let mut prev = q_cost(start, &s, order);
        for i in 1..200 {
            let q = q_cost(start + i as f64 * step, &s, order);
            // |∂q/∂ω₀| ≤ 2 Σ m ℓ |ℓω₀ − ω| ≤ 2 m L² π
            prop_assert!((q - prev).abs() <= 2.0 * mass * (order * order) as f64 * PI * step * 1.01);
            prev = q;
        }
    }

    #[test]
    fn small_perturbations_keep_order(
        k in 1usize..=5,
        base_frac in 0.01..0.99f64,
        cap_frac in 0.0..1.0f64,
        seed in 0u64..1000,
    ) {
        let mut rng = rng(seed);
        let base = 0.02 + base_frac * (PI / (k as f64 + 1.0) - 0.02);
        let cap = cap_frac * base / (2 * k + 3) as f64;
        let freqs: Vec<f64> = (0..k)
            .map(|i| (i + 1) as f64 * base + rand::Rng::random_range(&mut rng, -cap..=cap))
            .collect();
        let order = maximal_harmonic_order(&freqs).unwrap();
        prop_assert!(order == k || order == k + 1);
        let amps: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(&mut rng, 0.1..1.0)).collect();
        let res = chs(&LineSpectrum::from_sinusoids(&amps, &freqs).unwrap(), None).unwrap();
        let inf = freqs.iter().enumerate().map(|(i, w)| (w - (i + 1) as f64 * base).abs()).fold(0.0, f64::max);
        let slack = inf * 1e-9;
        let local = res.local_minima_in(base - inf - slack, base + inf + slack);
        prop_assert_eq!(local.len(), 1);
    }
}

#[test]
fn q_cost_is_min_over_harmonic_spectra() {
    let mut rng = rng(3);
    for _ in 0..3 {
        let freqs = loop {
            let f = random_frequencies(&mut rng, 4, 0.5);
            if f[0] > 0.5 {
                break f;
            }
        };
        let spec = spectrum(&freqs, &[0.3, 1.0, 0.2, 0.7]);
        let order = maximal_harmonic_order(&freqs).unwrap();
        for i in 0..20 {
            let omega0 = 0.05 + i as f64 * (PI / order as f64 - 0.06) / 19.0;
            let brute = brute_harmonic_min(&spec, omega0, order);
            assert!((q_cost(omega0, &spec, order) - brute).abs() < 1e-10);
        }
    }
}

#[test]
fn harmonic_input_is_its_own_chs() {
    let amps = bell_amplitudes();
    let w0 = 0.31;
    let freqs: Vec<f64> = (1..=5).map(|k| k as f64 * w0).collect();
    let res = chs(&LineSpectrum::from_sinusoids(&amps, &freqs).unwrap(), None).unwrap();
    assert_eq!(res.order, 5);
    assert!((res.omega0 - w0).abs() < 1e-12);
    assert!(res.cost < 1e-20);
    assert!((weighted_harmonic_fit(&amps, &freqs) - w0).abs() < 1e-12);
}

#[test]
fn string_model_chs_values() {
    let amps = bell_amplitudes();
    for (beta, expected) in [
        (5e-4, 0.3150804631452987),
        (1e-3, 0.3159982336342639),
        (2e-3, 0.3178236694174294),
    ] {
        let w0 = PI / 10.0;
        let freqs: Vec<f64> = (1..=5)
            .map(|k| k as f64 * w0 * (1.0 + (k * k) as f64 * beta).sqrt())
            .collect();
        let res = chs(&LineSpectrum::from_sinusoids(&amps, &freqs).unwrap(), None).unwrap();
        // inside the small-perturbation regime the CHS is the r²-weighted fit
        assert!((res.omega0 - expected).abs() < 1e-13, "{beta}: {}", res.omega0);
        assert!((weighted_harmonic_fit(&amps, &freqs) - expected).abs() < 1e-13);
    }
}
