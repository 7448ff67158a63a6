mod common;

use common::{c, dense_string, dense_sum, expm, max_diff, to_vec};
use ecprep::metrics::fidelity;
use ecprep::models::{make_sweep, xy_chain};
use ecprep::qcore::{exact_diagonalize, ground_state, haar_random_state};
use ecprep::stateprep::{
    hva_apply, ite_step, run_asp, run_asp_from, run_ite, run_vqe, step_count, track_eigenstate_overlaps,
    AspConfig, Hva, InitialState, IteConfig, ProductState, Splitting, VqeConfig,
};
use ecprep::{Error, ParamHamiltonian, Pauli, PauliString, PauliTerm, StateVector, C64};
use nalgebra::{DMatrix, DVector};

fn dense_factor(p: &PauliString, angle: C64) -> DMatrix<C64> {
    expm(&(dense_string(p) * angle))
}

#[test]
fn ite_on_single_z_flows_to_down_state() {
    let h = ParamHamiltonian::new(
        "z",
        1,
        &[("h", 1.0)],
        vec![("z", "h", vec![PauliTerm::new(1.0, PauliString::single(1, 0, Pauli::Z))])],
        &["h"],
    )
    .unwrap()
    .instantiate(&[1.0])
    .unwrap();
    let out = run_ite(&h, &IteConfig::new(0.5, 10.0, InitialState::Uniform)).unwrap();
    assert_eq!(out.energies.len(), 21);
    assert!(fidelity(&out.state, &StateVector::basis(1, 1)).unwrap() >= 1.0 - 1e-4);
}

#[test]
fn ite_steps_match_dense_products() {
    let h = xy_chain(4, 1.0, 0.2).unwrap().instantiate(&[1.1]).unwrap();
    let psi = haar_random_state(4, 5).unwrap();
    let dtau = 0.2;
    let factors: Vec<DMatrix<C64>> = h
        .terms()
        .iter()
        .map(|t| dense_factor(&t.string, c(-0.5 * dtau * t.coefficient, 0.0)))
        .collect();
    let dim = 16;

    let mut fwd = DMatrix::<C64>::identity(dim, dim);
    for t in h.terms() {
        fwd = dense_factor(&t.string, c(-dtau * t.coefficient, 0.0)) * fwd;
    }
    let mut s = psi.clone();
    ite_step(&mut s, &h, dtau, Splitting::Forward);
    assert!(max_diff(s.amplitudes(), (&fwd * to_vec(&psi)).as_slice()) < 1e-10);

    // Half factors forward then in reverse: E_1 ... E_m E_m ... E_1.
    let mut sym = DMatrix::<C64>::identity(dim, dim);
    for f in factors.iter().chain(factors.iter().rev()) {
        sym = f * sym;
    }
    let mut s = psi.clone();
    ite_step(&mut s, &h, dtau, Splitting::Symmetric);
    assert!(max_diff(s.amplitudes(), (&sym * to_vec(&psi)).as_slice()) < 1e-10);
}

#[test]
fn ite_energy_trace_is_nearly_monotone() {
    let f = xy_chain(5, 1.0, 0.2).unwrap();
    for b in make_sweep(0.0, 3.0, 7).unwrap().points() {
        let h = f.instantiate(b).unwrap();
        let e = run_ite(&h, &IteConfig::new(0.2, 6.0, InitialState::Uniform)).unwrap().energies;
        for w in e.windows(2) {
            assert!(w[1] <= w[0] + 5e-3, "B_Z={b:?}: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn ite_reports_orthogonal_start() {
    let h = ParamHamiltonian::new(
        "z",
        1,
        &[("h", 1.0)],
        vec![("z", "h", vec![PauliTerm::new(1.0, PauliString::single(1, 0, Pauli::Z))])],
        &["h"],
    )
    .unwrap()
    .instantiate(&[1.0])
    .unwrap();
    // exp(-400 Z) scales the 1e-300 amplitude of |0> below the smallest double.
    let tiny = StateVector::from_amplitudes(1, vec![c(1e-300, 0.0), c(0.0, 0.0)]).unwrap();
    let err = run_ite(&h, &IteConfig::new(400.0, 400.0, InitialState::Given(tiny)));
    assert!(err.is_err());
}

#[test]
fn ite_overlap_tracking() {
    let h = xy_chain(4, 1.0, 0.2).unwrap().instantiate(&[1.3]).unwrap();
    let spec = exact_diagonalize(&h).unwrap();
    let dim = spec.len();
    let mut amps = vec![c(0.0, 0.0); dim];
    for e in &spec.eigenvectors {
        for (a, x) in amps.iter_mut().zip(e.amplitudes()) {
            *a += x / (dim as f64).sqrt();
        }
    }
    let start = StateVector::from_amplitudes(4, amps).unwrap();
    let mut cfg = IteConfig::new(0.2, 4.0, InitialState::Given(start.clone()));
    cfg.record_states = true;
    let out = run_ite(&h, &cfg).unwrap();
    let table = track_eigenstate_overlaps(&out.states, &spec).unwrap();
    assert_eq!(table.len(), 21);
    for row in &table {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
    for (k, x) in table[0].iter().enumerate() {
        assert!((x - fidelity(&spec.eigenvectors[k], &start).unwrap()).abs() < 1e-14);
    }
    for w in table.windows(2) {
        assert!(w[1][0] >= w[0][0] - 1e-6);
    }
}

/// Dense propagator for one ASP step at `theta` with the given split.
fn dense_asp_step(family: &ParamHamiltonian, theta: &[f64], dt: f64, splitting: Splitting) -> DMatrix<C64> {
    let h = family.instantiate(theta).unwrap();
    let dim = h.dim();
    let mut u = DMatrix::<C64>::identity(dim, dim);
    match splitting {
        Splitting::Forward => {
            for t in h.terms() {
                u = dense_factor(&t.string, c(0.0, -dt * t.coefficient)) * u;
            }
        }
        Splitting::Symmetric => {
            let f: Vec<_> = h
                .terms()
                .iter()
                .map(|t| dense_factor(&t.string, c(0.0, -0.5 * dt * t.coefficient)))
                .collect();
            for m in f.iter().chain(f.iter().rev()) {
                u = m * u;
            }
        }
    }
    u
}

#[test]
fn asp_steps_match_dense_products() {
    let f = xy_chain(3, 1.0, 0.2).unwrap();
    let psi = haar_random_state(3, 8).unwrap();
    for splitting in [Splitting::Forward, Splitting::Symmetric] {
        let mut cfg = AspConfig::new(0.1, 0.4, vec![3.0], vec![1.0]);
        cfg.splitting = splitting;
        cfg.snapshots = true;
        let out = run_asp_from(&f, &cfg, &psi).unwrap();
        let mut v = to_vec(&psi);
        for (j, (theta, snap)) in out.snapshots.iter().enumerate() {
            let want = 3.0 - 2.0 * (j + 1) as f64 / 4.0;
            assert!((theta[0] - want).abs() < 1e-15);
            v = dense_asp_step(&f, theta, 0.1, splitting) * v;
            assert!(max_diff(snap.amplitudes(), v.as_slice()) < 1e-10);
            assert!((snap.norm() - 1.0).abs() < 1e-10);
        }
        assert_eq!(out.snapshots.last().unwrap().1, out.state);
    }
}

fn exact_step(family: &ParamHamiltonian, theta: &[f64], dt: f64) -> DMatrix<C64> {
    expm(&(dense_sum(&family.instantiate(theta).unwrap()) * c(0.0, -dt)))
}

#[test]
fn trotter_step_error_orders() {
    let f = xy_chain(3, 1.0, 0.2).unwrap();
    let psi = to_vec(&haar_random_state(3, 2).unwrap());
    let err = |dt: f64, s: Splitting| {
        let a: DVector<C64> = dense_asp_step(&f, &[1.2], dt, s) * &psi;
        let b: DVector<C64> = exact_step(&f, &[1.2], dt) * &psi;
        (a - b).norm()
    };
    for (s, order) in [(Splitting::Forward, 4.0), (Splitting::Symmetric, 8.0)] {
        let r = err(0.02, s) / err(0.01, s);
        assert!((r / order - 1.0).abs() < 0.1, "{s:?}: ratio {r}");
    }
}

#[test]
fn asp_ramp_converges_quadratically_to_time_ordered_evolution() {
    let f = xy_chain(3, 1.0, 0.2).unwrap();
    let (_, gs) = ground_state(&f.instantiate(&[3.0]).unwrap()).unwrap();
    let t_max = 1.0;
    // Same ramp with every step's propagator exponentiated exactly.
    let reference = |n: usize| {
        let mut v = to_vec(&gs);
        let cfg = AspConfig::new(t_max / n as f64, t_max, vec![3.0], vec![0.0]);
        for j in 1..=n {
            v = exact_step(&f, &cfg.point(j, n), t_max / n as f64) * v;
        }
        v
    };
    let err = |n: usize| {
        let cfg = AspConfig::new(t_max / n as f64, t_max, vec![3.0], vec![0.0]);
        let s = run_asp_from(&f, &cfg, &gs).unwrap().state;
        (to_vec(&s) - reference(n)).norm()
    };
    let r = err(20) / err(40);
    assert!(r > 3.5 && r < 4.5, "ratio {r}");
}

#[test]
fn asp_follows_the_ground_state_on_a_slow_ramp() {
    let f = xy_chain(5, 1.0, 0.2).unwrap();
    let exact = ground_state(&f.instantiate(&[0.0]).unwrap()).unwrap().1;
    let slow = run_asp(&f, &AspConfig::new(0.05, 37.5, vec![3.0], vec![0.0])).unwrap();
    let fast = run_asp(&f, &AspConfig::new(0.05, 3.75, vec![3.0], vec![0.0])).unwrap();
    assert!(fidelity(&slow.state, &exact).unwrap() >= 0.99);
    assert!(fidelity(&fast.state, &exact).unwrap() < 0.5);
}

#[test]
fn truncation_improves_mean_fidelity() {
    let f = xy_chain(5, 1.0, 0.2).unwrap();
    let targets = make_sweep(0.0, 3.0, 20).unwrap();
    let exact: Vec<_> = targets
        .points()
        .iter()
        .map(|p| ground_state(&f.instantiate(p).unwrap()).unwrap().1)
        .collect();
    let mean = |states: Vec<StateVector>| {
        states.iter().zip(&exact).map(|(s, e)| fidelity(s, e).unwrap()).sum::<f64>() / 20.0
    };
    let mut last = 0.0;
    for tau in [0.8, 1.6, 3.2, 6.0] {
        let m = mean(
            targets
                .points()
                .iter()
                .map(|p| {
                    run_ite(&f.instantiate(p).unwrap(), &IteConfig::new(0.2, tau, InitialState::Uniform))
                        .unwrap()
                        .state
                })
                .collect(),
        );
        assert!(m >= last, "tau_max={tau}: {m} < {last}");
        last = m;
    }
    let mut last = 0.0;
    for t in [3.75, 7.5, 37.5] {
        let m = mean(
            targets
                .points()
                .iter()
                .map(|p| run_asp(&f, &AspConfig::new(0.05, t, vec![3.0], p.clone())).unwrap().state)
                .collect(),
        );
        assert!(m >= last, "T_max={t}: {m} < {last}");
        last = m;
    }
}

#[test]
fn hva_identity_and_x_layer() {
    let f = xy_chain(3, 1.0, 0.2).unwrap();
    let cfg = VqeConfig::new(2, 10, 0);
    let ansatz = Hva::new(&f, 2, ProductState::Zeros).unwrap();
    assert_eq!(ansatz.gates_per_layer(), 3 + 3 + 2 + 2);
    let zero = hva_apply(&vec![0.0; ansatz.param_count()], &cfg, &f).unwrap();
    assert_eq!(zero, StateVector::zero(3));

    let mut params = vec![0.0; 10];
    params[..3].fill(std::f64::consts::FRAC_PI_2);
    let one = Hva::new(&f, 1, ProductState::Zeros).unwrap().apply(&params).unwrap();
    // Each site picks up exp(-i pi/2 X)|0> = -i|1>.
    let mut want = vec![c(0.0, 0.0); 8];
    want[7] = c(0.0, -1.0).powu(3);
    assert!(max_diff(one.amplitudes(), &want) < 1e-15);
    assert!(matches!(
        hva_apply(&[0.0; 3], &cfg, &f),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn hva_matches_dense_group_products() {
    let f = xy_chain(3, 1.0, 0.2).unwrap();
    let ansatz = Hva::new(&f, 2, ProductState::Neel).unwrap();
    let params: Vec<f64> = (0..ansatz.param_count()).map(|i| 0.37 * i as f64 - 1.1).collect();
    let out = ansatz.apply(&params).unwrap();
    let gates: Vec<PauliString> = f
        .groups()
        .iter()
        .flat_map(|g| g.terms.iter().map(|t| t.string.clone()))
        .collect();
    let mut v = to_vec(&ProductState::Neel.build(3));
    assert_eq!(v[2].re, 1.0);
    for layer in params.chunks(gates.len()) {
        for (g, &a) in gates.iter().zip(layer) {
            v = dense_factor(g, c(0.0, -a)) * v;
        }
    }
    assert!(max_diff(out.amplitudes(), v.as_slice()) < 1e-12);
}

#[test]
fn vqe_single_qubit_converges() {
    let f = ParamHamiltonian::new(
        "x_rotation",
        1,
        &[("h_x", 0.0), ("h_z", 1.0)],
        vec![
            ("x", "h_x", vec![PauliTerm::new(1.0, PauliString::single(1, 0, Pauli::X))]),
            ("z", "h_z", vec![PauliTerm::new(1.0, PauliString::single(1, 0, Pauli::Z))]),
        ],
        &["h_z"],
    )
    .unwrap();
    let h = f.instantiate(&[1.0]).unwrap();
    let out = run_vqe(&h, &f, &VqeConfig::new(1, 50, 3)).unwrap();
    assert!(out.converged);
    assert!(out.iterations <= 50);
    assert!((out.energies.last().unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn vqe_trace_is_monotone_and_variational() {
    let f = xy_chain(5, 1.0, 0.2).unwrap();
    for b in [0.0, 1.5, 3.0] {
        let h = f.instantiate(&[b]).unwrap();
        let e0 = ground_state(&h).unwrap().0;
        let out = run_vqe(&h, &f, &VqeConfig::new(2, 12, 7)).unwrap();
        assert!(out.iterations <= 12);
        assert_eq!(out.energies.len(), out.iterations + 1);
        for w in out.energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(*out.energies.last().unwrap() >= e0 - 1e-10);
        assert!((h.expectation(&out.state).unwrap() - out.energies.last().unwrap()).abs() < 1e-10);
        let again = run_vqe(&h, &f, &VqeConfig::new(2, 12, 7)).unwrap();
        assert_eq!(again.params, out.params);
    }
}

#[test]
fn step_counts_must_divide() {
    assert_eq!(step_count(37.5, 0.05).unwrap(), 750);
    assert_eq!(step_count(1.6, 0.2).unwrap(), 8);
    assert!(step_count(1.0, 0.3).is_err());
    assert!(step_count(1.0, 0.0).is_err());
}
