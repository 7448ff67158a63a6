mod common;

use common::{c, dense_string, dense_sum, expm, max_diff, parse, to_vec};
use ecprep::models::xy_chain;
use ecprep::qcore::{
    apply_pauli_term_exp, exact_diagonalize, expectation, haar_random_state, inner_product,
    lanczos_lowest, LanczosOptions, PauliSum,
};
use ecprep::{Error, Pauli, PauliString, PauliTerm, StateVector, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn term(coefficient: f64, s: &str) -> PauliTerm {
    PauliTerm::new(coefficient, parse(s))
}

fn sum(n: usize, terms: &[(f64, &str)]) -> PauliSum {
    PauliSum::new(n, terms.iter().map(|&(k, s)| term(k, s)).collect()).unwrap()
}

#[test]
fn z_exponential_on_zero_is_a_phase() {
    let theta = 0.37;
    let out = apply_pauli_term_exp(&StateVector::zero(1), &term(1.0, "Z"), c(0.0, -theta)).unwrap();
    let want = [C64::from_polar(1.0, -theta), c(0.0, 0.0)];
    assert!(max_diff(out.amplitudes(), &want) < 1e-15);
}

#[test]
fn quarter_turn_of_x_flips_with_minus_i() {
    let out = apply_pauli_term_exp(
        &StateVector::zero(1),
        &term(1.0, "X"),
        c(0.0, -std::f64::consts::FRAC_PI_2),
    )
    .unwrap();
    assert!(max_diff(out.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)]) < 1e-15);
}

#[test]
fn exponential_matches_dense_expm() {
    let psi = haar_random_state(5, 11).unwrap();
    let t = term(1.0, "IIXXI");
    let out = apply_pauli_term_exp(&psi, &t, c(0.0, -0.05)).unwrap();
    let u = expm(&(dense_string(&t.string) * c(0.0, -0.05)));
    let want = u * to_vec(&psi);
    assert!(max_diff(out.amplitudes(), want.as_slice()) < 1e-12);
}

#[test]
fn exponential_matches_dense_for_every_axis_and_complex_angle() {
    let psi = haar_random_state(4, 3).unwrap();
    for s in ["XYZI", "YIIY", "ZZII", "IYXZ", "IIIY"] {
        for angle in [c(0.0, -0.3), c(-0.2, 0.0), c(0.1, 0.4)] {
            let t = term(0.7, s);
            let out = apply_pauli_term_exp(&psi, &t, angle).unwrap();
            let u = expm(&(dense_string(&t.string) * angle * c(0.7, 0.0)));
            let want = u * to_vec(&psi);
            assert!(max_diff(out.amplitudes(), want.as_slice()) < 1e-12, "{s} {angle}");
        }
    }
}

#[test]
fn term_and_state_dimensions_must_agree() {
    let err = apply_pauli_term_exp(&StateVector::zero(2), &term(1.0, "XXX"), c(0.0, -1.0)).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch { .. }));
}

#[test]
fn dense_matrix_matches_kronecker_oracle() {
    let h = sum(3, &[(0.5, "XYZ"), (-1.2, "YYI"), (0.3, "IZX"), (2.0, "III")]);
    let a = h.to_dense();
    let b = dense_sum(&h);
    assert!((a - b).iter().all(|z| z.norm() < 1e-15));
}

#[test]
fn single_z_spectrum() {
    let spec = exact_diagonalize(&sum(1, &[(1.0, "Z")])).unwrap();
    assert_eq!(spec.eigenvalues.len(), 2);
    assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
    assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
}

#[test]
fn two_z_spectrum() {
    let spec = exact_diagonalize(&sum(2, &[(1.0, "ZI"), (1.0, "IZ")])).unwrap();
    let want = [-2.0, 0.0, 0.0, 2.0];
    for (e, w) in spec.eigenvalues.iter().zip(want) {
        assert!((e - w).abs() < 1e-14);
    }
}

#[test]
fn eigenvectors_are_orthonormal_eigenpairs() {
    let h = xy_chain(4, 1.0, 0.3).unwrap().instantiate(&[0.8]).unwrap();
    let spec = exact_diagonalize(&h).unwrap();
    for (i, (e, v)) in spec.eigenvalues.iter().zip(&spec.eigenvectors).enumerate() {
        let hv = h.apply(v).unwrap();
        let mut r = hv.clone();
        r.axpy(c(-e, 0.0), v).unwrap();
        assert!(r.norm() < 1e-10);
        for w in &spec.eigenvectors[..i] {
            assert!(w.inner(v).unwrap().norm() < 1e-10);
        }
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn too_large_dense_problem_is_a_capacity_error() {
    let n = 13;
    let terms = (0..n).map(|i| PauliTerm::new(1.0, PauliString::single(n, i, Pauli::X))).collect();
    let h = PauliSum::new(n, terms).unwrap();
    assert!(matches!(exact_diagonalize(&h), Err(Error::Capacity { .. })));
    assert!(matches!(PauliSum::new(18, Vec::new()), Err(Error::Capacity { .. })));
}

/// Ground energy from power iteration on `shift - H`, where the shift bounds
/// the spectrum from above.
fn power_iteration_ground(m: &DMatrix<C64>, shift: f64) -> f64 {
    let n = m.nrows();
    let a = DMatrix::<C64>::identity(n, n) * c(shift, 0.0) - m;
    let mut v = nalgebra::DVector::from_fn(n, |i, _| c(1.0 + 0.01 * i as f64, 0.003 * i as f64));
    v /= c(v.norm(), 0.0);
    let mut last = f64::INFINITY;
    for it in 0..2_000_000 {
        let w = &a * &v;
        let nrm = w.norm();
        v = w / c(nrm, 0.0);
        if it % 1000 == 999 {
            let e = (v.adjoint() * m * &v)[(0, 0)].re;
            if (e - last).abs() < 1e-14 {
                return e;
            }
            last = e;
        }
    }
    last
}

#[test]
fn xy_ground_energy_matches_power_iteration() {
    let h = xy_chain(5, 1.0, 0.2).unwrap().instantiate(&[1.5]).unwrap();
    let spec = exact_diagonalize(&h).unwrap();
    let m = dense_sum(&h);
    let shift = h.terms().iter().map(|t| t.coefficient.abs()).sum::<f64>() + 1.0;
    let e0 = power_iteration_ground(&m, shift);
    assert!((spec.ground_energy() - e0).abs() < 1e-9, "{} vs {e0}", spec.ground_energy());
}

#[test]
fn lanczos_agrees_with_dense_diagonalization() {
    let h = xy_chain(9, 1.0, 0.2).unwrap().instantiate(&[0.9]).unwrap();
    let dense = exact_diagonalize(&h).unwrap();
    let lz = lanczos_lowest(&h, 3, LanczosOptions::default()).unwrap();
    for k in 0..3 {
        assert!((dense.eigenvalues[k] - lz.eigenvalues[k]).abs() < 1e-8);
    }
    assert!(lz.eigenvectors[0].inner(&dense.eigenvectors[0]).unwrap().norm() > 1.0 - 1e-8);
}

#[test]
fn all_zero_state_under_z_field_gives_n() {
    let n = 6;
    let terms = (0..n).map(|i| PauliTerm::new(1.0, PauliString::single(n, i, Pauli::Z))).collect();
    let h = PauliSum::new(n, terms).unwrap();
    assert!((expectation(&StateVector::zero(n), &h).unwrap() - n as f64).abs() < 1e-14);
}

#[test]
fn ground_vector_expectation_is_ground_energy() {
    let h = xy_chain(5, 1.0, 0.2).unwrap().instantiate(&[2.1]).unwrap();
    let spec = exact_diagonalize(&h).unwrap();
    assert!((expectation(spec.ground_state(), &h).unwrap() - spec.ground_energy()).abs() < 1e-10);
}

#[test]
fn expectation_matches_dense_quadratic_form() {
    let h = xy_chain(5, 1.0, 0.2).unwrap().instantiate(&[0.0]).unwrap();
    let psi = haar_random_state(5, 99).unwrap();
    let v = to_vec(&psi);
    let want = (v.adjoint() * dense_sum(&h) * &v)[(0, 0)].re;
    assert!((expectation(&psi, &h).unwrap() - want).abs() < 1e-12);
}

#[test]
fn haar_states_are_normalized_and_reproducible() {
    for seed in 0..20 {
        let a = haar_random_state(6, seed).unwrap();
        let b = haar_random_state(6, seed).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
    assert_ne!(
        haar_random_state(3, 1).unwrap().amplitudes(),
        haar_random_state(3, 2).unwrap().amplitudes()
    );
}

#[test]
fn haar_probabilities_average_to_uniform() {
    let n = 3;
    let d = 8.0;
    let draws = 10_000;
    let mut mean = vec![0.0; 8];
    for seed in 0..draws {
        let p = haar_random_state(n, seed).unwrap().probabilities();
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / draws as f64;
        }
    }
    // |a|^2 of a Haar state is Beta(1, d - 1): variance (d - 1) / (d^2 (d + 1)).
    let se = ((d - 1.0) / (d * d * (d + 1.0)) / draws as f64).sqrt();
    for m in mean {
        assert!((m - 1.0 / d).abs() < 3.0 * se, "{m}");
    }
}

#[test]
fn inner_product_is_conjugate_linear_in_first_slot() {
    let a = haar_random_state(3, 1).unwrap();
    let b = haar_random_state(3, 2).unwrap();
    let ab = inner_product(&a, &b).unwrap();
    let ba = inner_product(&b, &a).unwrap();
    assert!((ab - ba.conj()).norm() < 1e-15);
    let mut ia = a.clone();
    ia.scale(c(0.0, 1.0));
    assert!((inner_product(&ia, &b).unwrap() - ab * c(0.0, -1.0)).norm() < 1e-15);
    assert!(matches!(
        inner_product(&a, &StateVector::zero(2)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn magnetization_conservation_is_detected() {
    assert!(xy_chain(5, 1.0, 0.0).unwrap().instantiate(&[1.0]).unwrap().conserves_magnetization());
    assert!(!xy_chain(5, 1.0, 0.2).unwrap().instantiate(&[1.0]).unwrap().conserves_magnetization());
    // XX - YY flips two spins the same way and does not conserve.
    assert!(!sum(2, &[(1.0, "XX"), (-1.0, "YY")]).conserves_magnetization());
}

fn arb_string(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

fn arb_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((-2.0..2.0f64, arb_string(n)), 1..6).prop_map(move |v| {
        PauliSum::new(n, v.into_iter().map(|(k, s)| term(k, &s)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_sums_are_hermitian(h in arb_sum(3), s1 in 0u64..1000, s2 in 0u64..1000) {
        let a = haar_random_state(3, s1).unwrap();
        let b = haar_random_state(3, s2).unwrap();
        let lhs = a.inner(&h.apply(&b).unwrap()).unwrap();
        let rhs = h.apply(&a).unwrap().inner(&b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn application_is_linear(h in arb_sum(3), s1 in 0u64..1000, s2 in 0u64..1000, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let a = haar_random_state(3, s1).unwrap();
        let b = haar_random_state(3, s2).unwrap();
        let mut ab = a.clone();
        ab.scale(c(x, y));
        ab.axpy(c(y, 0.5), &b).unwrap();
        let lhs = h.apply(&ab).unwrap();
        let mut rhs = h.apply(&a).unwrap();
        rhs.scale(c(x, y));
        rhs.axpy(c(y, 0.5), &h.apply(&b).unwrap()).unwrap();
        prop_assert!(max_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
    }

    #[test]
    fn real_exponentials_are_unitary_and_invertible(s in arb_string(4), theta in -3.0..3.0f64, seed in 0u64..1000) {
        let psi = haar_random_state(4, seed).unwrap();
        let p = parse(&s);
        let mut amps = psi.amplitudes().to_vec();
        p.apply_exp_in_place(&mut amps, c(0.0, -theta));
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((n - 1.0).abs() < 1e-12);
        p.apply_exp_in_place(&mut amps, c(0.0, theta));
        prop_assert!(max_diff(&amps, psi.amplitudes()) < 1e-12);
    }

    #[test]
    fn conserving_sums_stay_in_their_sector(index in 0usize..32, bz in -3.0..3.0f64) {
        let h = xy_chain(5, 1.0, 0.0).unwrap().instantiate(&[bz]).unwrap();
        let out = h.apply(&StateVector::basis(5, index)).unwrap();
        for (b, a) in out.amplitudes().iter().enumerate() {
            if b.count_ones() != index.count_ones() {
                prop_assert!(a.norm() == 0.0);
            }
        }
    }
}

#[test]
fn pauli_strings_round_trip_through_text() {
    let p: PauliString = "XIYZ".parse().unwrap();
    assert_eq!(p.to_string(), "XIYZ");
    assert_eq!(p.support(), vec![0, 2, 3]);
    assert!("XQ".parse::<PauliString>().is_err());
}
