use super::*;
use crate::pauli::LocalGenerator;
use crate::qfi::{analytic_haar_avg, loss_qfi_closed_form, root_fidelity, weingarten_haar_avg};
use crate::quantum::{
    dagger, haar_unitary, identity, max_abs_diff, partial_trace, spin_operator, symmetric_isometry, Axis,
};

fn sz_desc(n: usize) -> GeneratorDescriptor {
    LocalGenerator::collective_z(n).unwrap().into()
}

#[test]
fn config_validation() {
    let mut c = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 10, 1);
    assert!(c.validate().is_ok());
    c.n_e = 4;
    assert!(c.validate().is_err());
    c.n_e = 1;
    c.noise_p = 1.5;
    assert!(c.validate().is_err());
    c.noise_p = 0.0;
    c.samples = 0;
    assert!(c.validate().is_err());
    let big = ProtocolConfig::new(13, EnsembleKind::FullUnitary, 1, 1);
    assert!(matches!(big.validate(), Err(Error::CapExceeded { .. })));
}

#[test]
fn haar_ramsey_is_reproducible() {
    let c = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 1, 99);
    let a = haar_ramsey_mc(&c, &sz_desc(4)).unwrap();
    let b = haar_ramsey_mc(&c, &sz_desc(4)).unwrap();
    assert_eq!(a.qfi_stats.mean.to_bits(), b.qfi_stats.mean.to_bits());
    let c = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 64, 99);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = haar_ramsey_mc(&c, &sz_desc(4)).unwrap();
    let b = pool.install(|| haar_ramsey_mc(&c, &sz_desc(4)).unwrap());
    assert_eq!(a, b);
}

#[test]
fn haar_ramsey_small_run_tracks_exact_average() {
    let c = ProtocolConfig::new(3, EnsembleKind::FullUnitary, 600, 5);
    let r = haar_ramsey_mc(&c, &sz_desc(3)).unwrap();
    let exact = weingarten_haar_avg(&c.spec().unwrap(), &sz_desc(3)).unwrap();
    assert!(r.qfi_stats.z_score(exact) < 4.0, "{:?} vs {exact}", r.qfi_stats);
}

#[test]
fn symmetric_runs_match_embedded_runs() {
    // Running natively in the sector equals embedding the same draw.
    let n = 4;
    let spec = EnsembleSpec::new(EnsembleKind::SymmetricUnitary, n).unwrap();
    let u = haar_sample(&spec, &RngStream::new(1, 0)).unwrap();
    let native = qfi_pure(&first_column(&u), &spin_operator(Axis::Z, n).unwrap()).unwrap();
    let b = symmetric_isometry(n).unwrap();
    let psi = StateVector::normalized(b.dot(&u.column(0))).unwrap();
    let embedded = qfi_pure(&psi, &LocalGenerator::collective_z(n).unwrap().to_dense().unwrap()).unwrap();
    assert!((native - embedded).abs() < 1e-10);
}

#[test]
fn ghz_orbit_reaches_heisenberg_limit() {
    for n in 2..=6 {
        let f = ghz_orbit_qfi(n, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((f - (n * n) as f64).abs() < 1e-9);
    }
    assert!(ghz_orbit_qfi(3, 0.0).unwrap().abs() < 1e-12);
}

#[test]
fn pauli_exp_matches_dense_exponential() {
    let p: crate::pauli::PauliString = "XYZ".parse().unwrap();
    let psi = StateVector::normalized(ndarray::Array1::from_shape_fn(8, |i| C64::new(i as f64, 1.0))).unwrap();
    let fast = apply_pauli_exp(&p, 0.37, &psi).unwrap();
    let slow = psi
        .evolve(&crate::quantum::mat_exp_hermitian(&p.to_dense().unwrap(), 0.37).unwrap())
        .unwrap();
    assert!((fast.inner(&slow).unwrap().norm() - 1.0).abs() < 1e-12);
    assert!(fast
        .amplitudes()
        .iter()
        .zip(slow.amplitudes())
        .all(|(a, b)| (a - b).norm() < 1e-12));
}

#[test]
fn twist_examples() {
    for n in [4, 10, 50] {
        assert!((twist_untwist(n, 1.0, 0.0).unwrap() - n as f64).abs() < 1e-9);
        assert!((twist_untwist(n, 0.0, 0.7).unwrap() - n as f64).abs() < 1e-9);
    }
    let scan = twist_scan(100, 1.0, TWIST_GRID_POINTS).unwrap();
    assert_eq!(scan.times.len(), TWIST_GRID_POINTS);
    assert!(scan.best_qfi >= 1000.0, "{}", scan.best_qfi);
    assert!((scan.times[63] - 0.4).abs() < 1e-12);
}

fn sum_x(n: usize) -> PauliSum {
    let terms = (0..n).map(|i| (C64::new(1.0, 0.0), PauliString::single(n, i, Letter::X).unwrap()));
    PauliSum::from_terms(n, terms).unwrap()
}

fn x_all(n: usize) -> PauliSum {
    PauliSum::from_terms(n, [(C64::new(1.0, 0.0), all_x(n).unwrap())]).unwrap()
}

#[test]
fn time_average_limits() {
    for n in [2, 4] {
        let g = LocalGenerator::collective_z(n).unwrap();
        let gd = g.to_dense().unwrap();
        let zero = StateVector::zeros(n).unwrap();
        let nf = n as f64;
        let ghz = time_avg_limit(&x_all(n), &gd, &zero).unwrap();
        assert!((ghz.exact - nf * nf / 2.0).abs() < 1e-9);
        // The static part alone overestimates by dropping the oscillating <G(t)>.
        assert!((ghz.centralizer_only - nf * nf).abs() < 1e-9);
        let free = time_avg_limit(&sum_x(n), &gd, &zero).unwrap();
        assert!((free.exact - nf / 2.0).abs() < 1e-9);
        // 4 <(S^2 - S_x^2)/2> in |0...0>.
        assert!((free.centralizer_only - nf * (nf + 1.0) / 2.0).abs() < 1e-9);

        let avg = time_avg_qfi(&x_all(n), &g, &zero, 200.0, 0.1).unwrap();
        assert!((avg - ghz.exact).abs() < 5.0 / 200.0 * nf * nf);
    }
}

#[test]
fn time_average_error_shrinks_with_t() {
    let n = 3;
    let g = LocalGenerator::collective_z(n).unwrap();
    let zero = StateVector::zeros(n).unwrap();
    let h = sum_x(n);
    let limit = time_avg_limit(&h, &g.to_dense().unwrap(), &zero).unwrap().exact;
    let errs: Vec<f64> = [50.0, 100.0, 200.0]
        .iter()
        .map(|&t| (time_avg_qfi(&h, &g, &zero, t, 0.05).unwrap() - limit).abs())
        .collect();
    for (t, e) in [50.0, 100.0, 200.0].iter().zip(&errs) {
        assert!(*e <= 2.0 / t, "T={t}: {e}");
    }
}

#[test]
fn coarse_time_step_is_reported() {
    let n = 3;
    let g = LocalGenerator::collective_z(n).unwrap();
    let r = time_avg_qfi(&sum_x(n), &g, &StateVector::zeros(n).unwrap(), 20.0, 1.3);
    assert!(matches!(r, Err(Error::StepTooCoarse { .. })));
}

#[test]
fn commuting_hamiltonian_keeps_qfi_zero() {
    let n = 3;
    let h = PauliSum::from_terms(
        n,
        [
            (C64::new(0.7, 0.0), "ZZI".parse().unwrap()),
            (C64::new(-0.2, 0.0), "IIZ".parse().unwrap()),
        ],
    )
    .unwrap();
    let g = LocalGenerator::collective_z(n).unwrap();
    let avg = time_avg_qfi(&h, &g, &StateVector::zeros(n).unwrap(), 10.0, 0.1).unwrap();
    assert!(avg.abs() < 1e-12);
    let gd = g.to_dense().unwrap();
    assert!(max_abs_diff(&centralizer_projection_oracle(&h, &gd).unwrap(), &gd) < 1e-12);
}

#[test]
fn centralizer_examples() {
    // n = 1: P(S_z) = 0 and P(S_z^2) = I/4.
    let h = sum_x(1);
    let g = LocalGenerator::collective_z(1).unwrap().to_dense().unwrap();
    assert!(max_abs_diff(&centralizer_projection_oracle(&h, &g).unwrap(), &Matrix::zeros((2, 2))) < 1e-12);
    let p2 = centralizer_projection_oracle(&h, &g.dot(&g)).unwrap();
    assert!(max_abs_diff(&p2, &identity(2).mapv(|v| v * 0.25)) < 1e-12);

    // General n: P(S_z) = 0 and P(S_z^2) = (S^2 - S_x^2)/2.
    for n in 2..=4 {
        let h = sum_x(n);
        let sx = LocalGenerator::uniform(n, Letter::X, 0.5).unwrap().to_dense().unwrap();
        let sy = LocalGenerator::uniform(n, Letter::Y, 0.5).unwrap().to_dense().unwrap();
        let sz = LocalGenerator::collective_z(n).unwrap().to_dense().unwrap();
        let d = 1 << n;
        assert!(max_abs_diff(&centralizer_projection_oracle(&h, &sz).unwrap(), &Matrix::zeros((d, d))) < 1e-12);
        let p2 = centralizer_projection_oracle(&h, &sz.dot(&sz)).unwrap();
        let expect = (sy.dot(&sy) + sz.dot(&sz)).mapv(|v| v * 0.5);
        assert!(max_abs_diff(&p2, &expect) < 1e-10);
        // (n/4) I only at n = 1.
        assert!(max_abs_diff(&p2, &identity(d).mapv(|v| v * n as f64 / 4.0)) > 0.1);
        let _ = sx;
    }
}

#[test]
fn centralizer_of_nondegenerate_hamiltonian_is_diagonal_part() {
    let h: PauliSum = "0.9 XI\n0.31 IZ\n0.47 ZX\n0.13 YY".parse().unwrap();
    let hd = h.to_dense().unwrap();
    let eig = crate::quantum::HermitianEigen::new(&hd).unwrap();
    let mut vals = eig.values.to_vec();
    vals.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    assert_eq!(vals.len(), 4);
    let g = LocalGenerator::collective_z(2).unwrap().to_dense().unwrap();
    let in_basis = dagger(&eig.vectors).dot(&g).dot(&eig.vectors);
    let diag = Matrix::from_diag(&in_basis.diag().to_owned());
    let expect = eig.vectors.dot(&diag).dot(&dagger(&eig.vectors));
    assert!(max_abs_diff(&centralizer_projection_oracle(&h, &g).unwrap(), &expect) < 1e-10);
}

#[test]
fn projected_outcomes_are_complete_and_match_projector_oracle() {
    let n = 5;
    let g = LocalGenerator::collective_z(n).unwrap().to_dense().unwrap();
    let mut rng = RngStream::new(17, 0).rng();
    for n_e in 1..=2 {
        let u = haar_unitary(1 << n, &mut rng).unwrap();
        let s = projected_outcomes(&u, n_e, &g, DEFAULT_P_MIN).unwrap();
        let total: f64 = s.outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for o in &s.outcomes {
            let bits: Vec<bool> = o.outcome.chars().map(|c| c == '1').collect();
            let (p, f) = projected_generator_qfi(&u, n_e, &bits, &g).unwrap();
            assert!((p - o.probability).abs() < 1e-10);
            assert!((f - o.qfi).abs() < 1e-8);
        }
    }
}

#[test]
fn projected_control_is_haar_ramsey() {
    let mut c = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 20, 3);
    c.n_e = 0;
    let a = projected_ensemble_protocol(&c).unwrap();
    let b = haar_ramsey_mc(&c, &sz_desc(4)).unwrap();
    assert_eq!(a.sample_values, b.sample_values);
}

#[test]
fn projected_protocol_beats_haar_ramsey() {
    let mut c = ProtocolConfig::new(6, EnsembleKind::FullUnitary, 40, 8);
    c.n_e = 1;
    let r = projected_ensemble_protocol(&c).unwrap();
    assert_eq!(r.per_outcome_distribution.as_ref().unwrap().len(), 80);
    // Haar-Ramsey gives about 6 here.
    assert!(r.qfi_stats.mean > 9.0, "{:?}", r.qfi_stats);
    assert!(c.ensemble == EnsembleKind::FullUnitary);
    c.ensemble = EnsembleKind::SymmetricUnitary;
    assert!(projected_ensemble_protocol(&c).is_err());
}

#[test]
fn noise_ratio_is_exact_per_instance() {
    for kind in [EnsembleKind::FullUnitary, EnsembleKind::SymmetricUnitary] {
        let mut c = ProtocolConfig::new(4, kind, 8, 2);
        c.noise_p = 0.3;
        let r = noisy_protocol(&c, &NoiseBase::HaarRamsey(sz_desc(4))).unwrap();
        let expect = expected_noise_ratio(&c).unwrap();
        for ratio in r.ratios().unwrap() {
            assert!((ratio - expect).abs() < 1e-9, "{kind:?}: {ratio} vs {expect}");
        }
        c.noise_p = 0.0;
        let clean = noisy_protocol(&c, &NoiseBase::HaarRamsey(sz_desc(4))).unwrap();
        for (a, b) in clean.sample_values.iter().zip(clean.reference_values.as_ref().unwrap()) {
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
    }
    let mut c = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 4, 2);
    c.noise_p = 0.2;
    let r = noisy_protocol(&c, &NoiseBase::Projected).unwrap();
    let expect = expected_noise_ratio(&c).unwrap();
    for ratio in r.ratios().unwrap() {
        assert!((ratio - expect).abs() < 1e-9);
    }
}

#[test]
fn loss_examples() {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let r = loss_experiment(8, 0, h, h, LossStage::Before).unwrap();
    assert!((r.numeric - 16.0).abs() < 1e-8 && (r.closed_form - 16.0).abs() < 1e-12);
    for k in 0..=8 {
        let b = loss_experiment(8, k, h, h, LossStage::Before).unwrap();
        let a = loss_experiment(8, k, h, h, LossStage::After).unwrap();
        assert!((a.numeric - b.numeric).abs() < 1e-8, "k={k}");
        assert!(
            (b.numeric - b.closed_form).abs() < 1e-8,
            "k={k}: {} vs {}",
            b.numeric,
            b.closed_form
        );
    }
    assert!(loss_experiment(8, 5, h, h, LossStage::Before).unwrap().numeric.abs() < 1e-10);
    let alpha = C64::new(0.3f64.sqrt(), 0.0);
    let beta = C64::new(0.0, 0.7f64.sqrt());
    let r = loss_experiment(6, 2, alpha, beta, LossStage::After).unwrap();
    assert!((r.numeric - loss_qfi_closed_form(6, 2, 0.3, 0.7).unwrap()).abs() < 1e-8);
    assert!(loss_experiment(7, 1, h, h, LossStage::Before).is_err());
    assert!(loss_experiment(8, 1, h, C64::new(1.0, 0.0), LossStage::Before).is_err());
}

#[test]
fn bures_loss_formula_matches_finite_difference_oracle() {
    let (n, k) = (4, 1);
    let mut c = ProtocolConfig::new(n, EnsembleKind::SymmetricUnitary, 3, 21);
    c.loss_k = k;
    let r = haar_ramsey_loss(&c, LossPoint::BeforeMeasurement).unwrap();
    let spec = c.spec().unwrap();
    let b = symmetric_isometry(n).unwrap();
    let sz = spin_operator(Axis::Z, n).unwrap();
    for (i, value) in r.sample_values.iter().enumerate() {
        let u = haar_sample(&spec, &c.stream(i)).unwrap();
        let family = |theta: f64| {
            let phase = crate::quantum::mat_exp_hermitian(&sz, theta)?;
            let sector = dagger(&u).dot(&phase).dot(&u.column(0));
            let psi = StateVector::normalized(b.dot(&sector))?;
            partial_trace(&psi, &[n - 1])
        };
        // The family is pure at theta = 0 and mixed elsewhere, so a central
        // difference straddles a rank change; use the one-sided distance.
        let h = 1e-3;
        let fd = 8.0 * (1.0 - root_fidelity(&family(0.0).unwrap(), &family(h).unwrap()).unwrap()) / (h * h);
        assert!(
            (fd - value).abs() < 1e-3 * value.max(1.0),
            "fidelity {fd} vs formula {value}"
        );
    }
}

#[test]
fn commuting_sanity_examples() {
    let s = commuting_sanity(4, 10, 1).unwrap();
    assert!(s.mean <= 1e-9);
    let contrast = commuting_sanity_with(4, 10, 1, &[all_x(4).unwrap()]).unwrap();
    assert!(contrast.mean > 1.0, "{contrast:?}");
}

#[test]
fn analytic_values_for_configs() {
    let c = ProtocolConfig::new(6, EnsembleKind::FullUnitary, 1, 0);
    assert_eq!(analytic_haar_avg(&c.spec().unwrap(), &sz_desc(6)).unwrap(), 6.0);
}
