use std::f64::consts::PI;

use ndsg::model::{dispersion_function, local_dsg_kink, ModelParams};
use ndsg::ode::{self, Tolerances};
use ndsg::traveling_wave::*;
use ndsg::{Execution, NdsgError};

fn params(lambda: f64, a: f64) -> ModelParams {
    ModelParams::new(lambda, a).unwrap()
}

fn spectrum(lambda: f64, a: f64) -> VelocitySpectrum {
    find_velocity_spectrum(&params(lambda, a), (0.05, 0.95), 10, &ShootControls::default(), &ScanOptions::default()).unwrap()
}

fn geometric() -> ScanOptions {
    ScanOptions { spacing: Spacing::Geometric, ..Default::default() }
}

fn assert_verified(s: &VelocitySpectrum) {
    for w in s.entries.windows(2) {
        assert!(w[0].value > w[1].value, "not strictly decreasing: {:?}", s.values());
    }
    for e in &s.entries {
        let (ra, rb) = e.mismatch_bracket;
        assert!((ra < 0.0) != (rb < 0.0), "no sign change across {:?}", e.bracket);
        assert!(e.bracket.0 <= e.value && e.value <= e.bracket.1);
        assert!(e.mismatch.abs() < 1e-6);
    }
}

#[test]
fn first_two_velocities_at_lambda_0_3() {
    let s = spectrum(0.3, 0.125);
    assert_verified(&s);
    assert!((s.branch(1).unwrap().value - 0.5831).abs() < 1e-3);
    assert!((s.branch(2).unwrap().value - 0.3213).abs() < 1e-3);
}

#[test]
fn mismatch_between_the_first_two_velocities_has_definite_sign() {
    let p = params(0.3, 0.125);
    let c = ShootControls::default();
    let s = spectrum(0.3, 0.125);
    let (v1, v2) = (s.entries[0].value, s.entries[1].value);
    // Dense sampling of the open interval: no zero, one sign.
    let rs: Vec<f64> = (1..200).map(|i| shoot_mismatch(&p, v2 + (v1 - v2) * i as f64 / 200.0, &c).unwrap()).collect();
    let mid = shoot_mismatch(&p, 0.5 * (v1 + v2), &c).unwrap();
    assert!(mid.abs() > 1e-6);
    assert!(rs.iter().all(|r| r.signum() == mid.signum()));
}

#[test]
fn seeding_is_converged_at_spectrum_points() {
    let s = spectrum(0.3, 0.125);
    for e in s.entries.iter().take(4) {
        assert!(e.seeding_defect.unwrap() < 1e-6, "n={} defect {:?}", e.n, e.seeding_defect);
    }
}

#[test]
fn velocities_at_lambda_0_2_regression() {
    // Baselines recorded from this solver (rtol 1e-12, 2000-point scan).
    let s = find_velocity_spectrum(&params(0.2, 0.125), (0.05, 0.99), 3, &ShootControls::default(), &ScanOptions::default()).unwrap();
    assert_verified(&s);
    let expect = [0.706_357_78, 0.448_578_08, 0.311_565_40];
    for (e, x) in s.entries.iter().zip(expect) {
        assert!((e.value - x).abs() < 1e-7, "n={}: {} vs {x}", e.n, e.value);
    }
}

#[test]
fn negative_second_harmonic_has_no_kinks() {
    let s = spectrum(0.3, -0.1);
    assert!(s.is_empty(), "{:?}", s.values());
    // Any sign flips that do occur sit below the mismatch noise floor.
    for u in &s.unresolved {
        assert!(u.r_bracket.0.abs().max(u.r_bracket.1.abs()) < s.noise_floor);
    }
    assert!(matches!(s.branch(1), Err(NdsgError::InsufficientAccuracy { branch: 1, .. })));
}

#[test]
fn lambda_spectrum_at_v_0_1() {
    let s = find_lambda_spectrum(0.125, 0.1, (0.25, 1.2), 6, &ShootControls::default(), &geometric()).unwrap();
    assert_verified(&s);
    let table = [0.9116, 0.6809, 0.5319, 0.4311, 0.3584, 0.3041];
    assert_eq!(s.entries.len(), 6);
    for (e, x) in s.entries.iter().zip(table) {
        assert!((e.value - x).abs() < 2e-3, "n={}: {} vs {x}", e.n, e.value);
    }
}

#[test]
fn lambda_spectrum_at_v_0_5() {
    let s = find_lambda_spectrum(0.125, 0.5, (0.06, 0.6), 4, &ShootControls::default(), &geometric()).unwrap();
    assert_verified(&s);
    let table = [0.3751, 0.1698, 0.1043, 0.0745];
    for (e, x) in s.entries.iter().zip(table) {
        assert!((e.value - x).abs() < 2e-3, "n={}: {} vs {x}", e.n, e.value);
    }
}

#[test]
fn fourth_order_spectrum_a_1() {
    let s = fourth_order_spectrum(1.0, (0.04, 0.5), 5, &ShootControls::default(), &geometric()).unwrap();
    assert_verified(&s);
    let table = [0.3149, 0.1350, 0.0823, 0.0588, 0.0457];
    assert_eq!(s.entries.len(), 5);
    for (e, x) in s.entries.iter().zip(table) {
        assert!((e.value - x).abs() < 2e-3, "n={}: {} vs {x}", e.n, e.value);
    }
}

#[test]
fn fourth_order_spectrum_a_10() {
    let s = fourth_order_spectrum(10.0, (0.015, 0.2), 8, &ShootControls::default(), &geometric()).unwrap();
    assert_verified(&s);
    let table = [0.1320, 0.0664, 0.0486, 0.0364, 0.0283, 0.0231, 0.0195, 0.0169];
    assert_eq!(s.entries.len(), 8);
    for (e, x) in s.entries.iter().zip(table) {
        assert!((e.value - x).abs() < 2e-3, "n={}: {} vs {x}", e.n, e.value);
    }
}

#[test]
fn lambda_n_times_index_trends_to_the_asymptotic_constant() {
    let s = find_lambda_spectrum(0.125, 0.1, (0.25, 1.2), 6, &ShootControls::default(), &geometric()).unwrap();
    let c = (1.0 - 0.01) * 2f64.acosh() / (0.1 * 1.5f64.sqrt() * PI);
    let ratio: Vec<f64> = s.entries.iter().map(|e| e.value * (2 * e.n - 1) as f64 / c).collect();
    for w in ratio.windows(2) {
        assert!((w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    }
}

#[test]
fn scans_are_identical_sequential_and_parallel() {
    let p = params(0.3, 0.125);
    let c = ShootControls::default();
    let seq = find_velocity_spectrum(&p, (0.2, 0.95), 4, &c, &ScanOptions { exec: Execution::Sequential, ..Default::default() }).unwrap();
    let par = find_velocity_spectrum(&p, (0.2, 0.95), 4, &c, &ScanOptions { exec: Execution::Parallel, ..Default::default() }).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn linearization_quartic_residual_near_rest() {
    // The real exponent solves v^2 mu^2 = mu^2 / (1 - lambda^2 mu^2) - (1 + 4A),
    // the linearization of v^2 phi'' = q' - F(phi) with q = phi' / (1 - lambda^2 mu^2).
    for v in [0.05, 0.1, 0.3] {
        let p = params(0.3, 0.125);
        let lin = linearize_at_origin(&p, v).unwrap();
        let m2 = lin.mu0 * lin.mu0;
        let res = v * v * m2 - m2 / (1.0 - 0.09 * m2) + 1.5;
        assert!(res.abs() < 1e-10 * m2.max(1.0), "v={v}: {res}");
        // The imaginary pair is the dispersion root.
        assert!(dispersion_function(&p, v, lin.k0).abs() < 1e-10 * (lin.k0 * lin.k0).max(1.0));
        let e = lin.exponents();
        assert_eq!(e[0].0, -e[1].0);
        assert_eq!(e[2].1, -e[3].1);
    }
}

#[test]
fn reversor_maps_trajectories_to_trajectories() {
    // Integrate y(x0) -> y(x1), reflect, integrate the reflection for x1 - x0,
    // and compare with the reflection of y(x0).
    let sys = TravelingWaveSystem::new(params(0.3, 0.125), 0.45).unwrap();
    let f = |_x: f64, y: &[f64; 4]| sys.rhs(y);
    let tol = Tolerances::default();
    let y0 = [2.0, 0.7, 0.3, -0.2];
    let y1 = ode::sample_at(f, 0.0, y0, &[1.5], &tol).unwrap()[0];
    let back = ode::sample_at(f, 0.0, TravelingWaveSystem::reverse(&y1), &[1.5], &tol).unwrap()[0];
    let expect = TravelingWaveSystem::reverse(&y0);
    for k in 0..4 {
        assert!((back[k] - expect[k]).abs() < 1e-9, "component {k}: {} vs {}", back[k], expect[k]);
    }

    let fo = FourthOrderSystem::new(1.0, 0.2).unwrap();
    let g = |_x: f64, y: &[f64; 4]| fo.rhs(y);
    let z1 = ode::sample_at(g, 0.0, y0, &[0.4], &tol).unwrap()[0];
    let zback = ode::sample_at(g, 0.0, FourthOrderSystem::reverse(&z1), &[0.4], &tol).unwrap()[0];
    let zexp = FourthOrderSystem::reverse(&y0);
    for k in 0..4 {
        assert!((zback[k] - zexp[k]).abs() < 1e-8 * zexp[k].abs().max(1.0), "component {k}");
    }
}

#[test]
fn shooting_reaches_the_symmetric_section() {
    let c = ShootControls::default();
    let sys = TravelingWaveSystem::new(params(0.3, 0.125), 0.5831559356474586).unwrap();
    let shot = sys.shoot(&c).unwrap();
    assert!((shot.state[0] - PI).abs() < 1e-12);
    assert!(shot.mismatch.abs() < 1e-6);
    let cap = ShootControls { xi_cap: Some(0.5), ..c };
    assert!(matches!(sys.shoot(&cap), Err(NdsgError::NoCrossing { .. })));
}

mod kinks {
    use super::*;

    fn kink(v: f64) -> KinkProfile {
        assemble_kink(&params(0.3, 0.125), v, &KinkOptions::default()).unwrap()
    }

    #[test]
    fn profile_invariants() {
        let s = spectrum(0.3, 0.125);
        for e in s.entries.iter().take(2) {
            let k = kink(e.value);
            let mid = k.len() / 2;
            assert_eq!(k.xi[mid], 0.0);
            assert!((k.phi[mid] - PI).abs() < 1e-12);
            assert!(k.phi[0].abs() < 1e-9 && (k.phi[k.len() - 1] - 2.0 * PI).abs() < 1e-9);
            // Monotone through the core.
            let core: Vec<f64> = k.xi.iter().zip(&k.phi).filter(|(x, _)| x.abs() < 3.0).map(|(_, p)| *p).collect();
            assert!(core.windows(2).all(|w| w[1] > w[0]));
            // Reflection symmetry.
            for i in 0..k.len() {
                let j = k.len() - 1 - i;
                assert!((k.phi[i] + k.phi[j] - 2.0 * PI).abs() < 1e-12);
                assert!((k.dq[i] + k.dq[j]).abs() < 1e-12);
            }
            assert!(k.residual < 1e-4, "n={} residual {}", e.n, k.residual);
            let again = k.recompute_energy().unwrap();
            assert!((again.total - k.energy.total).abs() <= 1e-6 * k.energy.total.abs());
            let parts = k.energy.potential + k.energy.kinetic + k.energy.nonlocal;
            assert!((parts - k.energy.total).abs() < 1e-12 * k.energy.total);
        }
    }

    #[test]
    fn first_kink_energy() {
        let k = kink(spectrum(0.3, 0.125).entries[0].value);
        assert!((k.energy.total - 10.9490).abs() < 1e-2, "W1 = {}", k.energy.total);
    }

    #[test]
    fn second_kink_energy() {
        let k = kink(spectrum(0.3, 0.125).entries[1].value);
        assert!((k.energy.total - 7.9399).abs() < 1e-2, "W2 = {}", k.energy.total);
    }

    #[test]
    fn sampling_reproduces_nodes_and_extends_by_limits() {
        let k = kink(0.5831559356474586);
        for i in (5..k.len() - 5).step_by(97) {
            let (p, d) = k.sample(k.xi[i]);
            assert!((p - k.phi[i]).abs() < 1e-12 && (d - k.dphi[i]).abs() < 1e-12);
        }
        assert_eq!(k.sample(-1e3), (0.0, 0.0));
        assert_eq!(k.sample(1e3), (2.0 * PI, 0.0));
    }

    #[test]
    fn non_kink_velocity_is_rejected() {
        let r = assemble_kink(&params(0.3, 0.125), 0.45, &KinkOptions::default());
        assert!(matches!(r, Err(NdsgError::InsufficientAccuracy { .. })));
    }

    fn core_deviation(lambda: f64, n: usize) -> f64 {
        let p = params(lambda, 0.125);
        let s = find_velocity_spectrum(&p, (0.05, 0.99), n, &ShootControls::default(), &ScanOptions::default()).unwrap();
        let v = s.branch(n).unwrap().value;
        let k = assemble_kink(&p, v, &KinkOptions::default()).unwrap();
        k.xi.iter()
            .zip(&k.phi)
            .filter(|(x, _)| x.abs() < 2.0)
            .map(|(x, phi)| (phi - local_dsg_kink(*x, v, 0.125).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn third_kink_core_matches_local_kink_at_lambda_0_2() {
        let d = core_deviation(0.2, 3);
        assert!(d < 0.05, "max core deviation {d}");
    }

    #[test]
    fn first_kink_core_matches_local_kink_at_lambda_0_2() {
        let d = core_deviation(0.2, 1);
        assert!(d < 0.05, "max core deviation {d}");
    }
}

mod small_lambda {
    use super::*;

    fn delta_spectrum() -> VelocitySpectrum {
        fourth_order_spectrum(0.125, (0.03, 1.0), 3, &ShootControls::default(), &geometric()).unwrap()
    }

    fn full_spectrum(lambda: f64) -> VelocitySpectrum {
        find_velocity_spectrum(&params(lambda, 0.125), (0.5, 0.995), 3, &ShootControls::default(), &ScanOptions::default()).unwrap()
    }

    #[test]
    fn fourth_order_predicts_leading_branches() {
        let d = delta_spectrum();
        for (lambda, branches) in [(0.05, 1), (0.02, 2)] {
            let s = full_spectrum(lambda);
            for n in 1..=branches {
                let predicted = velocity_from_delta(lambda, d.branch(n).unwrap().value).unwrap();
                let v = s.branch(n).unwrap().value;
                assert!((v - predicted).abs() < 1e-2, "lambda={lambda} n={n}: {v} vs {predicted}");
            }
        }
    }

    #[test]
    fn agreement_improves_as_lambda_shrinks() {
        let d1 = delta_spectrum().entries[0].value;
        let gap = |lambda: f64| (full_spectrum(lambda).entries[0].value - velocity_from_delta(lambda, d1).unwrap()).abs();
        assert!(gap(0.02) < gap(0.05));
    }

    #[test]
    fn leading_kink_approaches_local_kink_at_lambda_1e_3() {
        let lambda = 1e-3;
        let p = params(lambda, 0.125);
        let s = find_velocity_spectrum(&p, (0.99, 0.9999), 1, &ShootControls::default(), &ScanOptions { points: 400, ..Default::default() })
            .unwrap();
        let v = s.branch(1).unwrap().value;
        let k = assemble_kink(&p, v, &KinkOptions { h: 5e-4, ..Default::default() }).unwrap();
        let dev = k.xi.iter().zip(&k.phi).map(|(x, phi)| (phi - local_dsg_kink(*x, v, 0.125).unwrap()).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-2, "max-norm deviation {dev} at v1 = {v}");
    }

    #[test]
    fn branches_ordered_continuous_and_tend_to_light_speed() {
        let lambdas: Vec<f64> = (0..16).map(|i| 0.02 * (0.5f64 / 0.02).powf(i as f64 / 15.0)).collect();
        let sweep = sweep_velocity_branches(0.125, &lambdas, 3, (0.05, 0.999), &ShootControls::default(), &ScanOptions::default()).unwrap();
        assert!(sweep.strictly_ordered());
        for branch in &sweep.branches {
            let v: Vec<f64> = branch.iter().map(|x| x.expect("branch resolved at every lambda")).collect();
            // Decreasing in lambda, with no jumps larger than the local trend allows.
            assert!(v.windows(2).all(|w| w[1] < w[0]));
            let steps: Vec<f64> = v.windows(2).map(|w| w[0] - w[1]).collect();
            assert!(steps.windows(2).all(|s| s[1] < 3.0 * s[0] + 1e-3));
            assert!(v[0] > 0.85, "v_n(0.02) = {}", v[0]);
        }
    }
}
