use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::models::ParamHamiltonian;
use crate::qcore::{rng, PauliString, PauliSum, StateVector};

/// Classical product state the ansatz acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductState {
    /// `|0...0>`
    Zeros,
    /// `|1...1>`
    Ones,
    /// `|0101...>` starting with site 0 in `|0>`.
    Neel,
}

impl ProductState {
    pub fn build(self, nsites: usize) -> StateVector {
        let index = match self {
            ProductState::Zeros => 0,
            ProductState::Ones => (1 << nsites) - 1,
            ProductState::Neel => (0..nsites).filter(|i| i % 2 == 1).map(|i| 1 << i).sum(),
        };
        StateVector::basis(nsites, index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeConfig {
    pub layers: usize,
    /// Truncation: maximum number of accepted optimizer steps.
    pub max_iters: usize,
    pub optimizer_seed: u64,
    pub initial: ProductState,
    /// Initial angles are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Stop once the gradient norm drops below this.
    pub grad_tol: f64,
}

impl VqeConfig {
    pub fn new(layers: usize, max_iters: usize, optimizer_seed: u64) -> Self {
        Self {
            layers,
            max_iters,
            optimizer_seed,
            initial: ProductState::Zeros,
            init_scale: 0.1,
            grad_tol: 1e-6,
        }
    }
}

/// Hamiltonian variational ansatz built from a family's operator groups.
///
/// One layer applies, for each group in family order, `exp(-i a_k P_k)` for
/// every Pauli string `P_k` of the group with its own angle `a_k`. For the XY
/// chain that is `U_YY U_XX U_Z U_X` acting right to left.
#[derive(Clone, Debug)]
pub struct Hva {
    nsites: usize,
    layers: usize,
    gates: Vec<PauliString>,
    initial: ProductState,
}

impl Hva {
    pub fn new(family: &ParamHamiltonian, layers: usize, initial: ProductState) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidInput("HVA needs at least one layer".into()));
        }
        let gates = family
            .groups()
            .iter()
            .flat_map(|g| g.terms.iter().map(|t| t.string.clone()))
            .collect();
        Ok(Self {
            nsites: family.nsites(),
            layers,
            gates,
            initial,
        })
    }

    pub fn gates_per_layer(&self) -> usize {
        self.gates.len()
    }

    pub fn param_count(&self) -> usize {
        self.layers * self.gates.len()
    }

    pub fn apply(&self, params: &[f64]) -> Result<StateVector> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                found: params.len(),
            });
        }
        let mut state = self.initial.build(self.nsites);
        for layer in params.chunks(self.gates.len()) {
            for (g, &a) in self.gates.iter().zip(layer) {
                g.apply_exp_in_place(state.amplitudes_mut(), C64::new(0.0, -a));
            }
        }
        Ok(state)
    }
}

/// Convenience wrapper around [`Hva::apply`].
pub fn hva_apply(params: &[f64], cfg: &VqeConfig, family: &ParamHamiltonian) -> Result<StateVector> {
    Hva::new(family, cfg.layers, cfg.initial)?.apply(params)
}

#[derive(Clone, Debug)]
pub struct VqeOutcome {
    pub state: StateVector,
    pub params: Vec<f64>,
    /// Energy at the initial parameters and after every accepted step.
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `<psi(a)|H|psi(a)>` over the HVA angles with BFGS.
///
/// Gradients use the parameter-shift rule, exact for gates
/// `exp(-i a P)` with `P^2 = I`. An iteration is one accepted BFGS step
/// (strong Wolfe line search). Stops at `max_iters` or when the gradient norm
/// falls below `grad_tol`.
pub fn run_vqe(h: &PauliSum, family: &ParamHamiltonian, cfg: &VqeConfig) -> Result<VqeOutcome> {
    if cfg.max_iters == 0 {
        return Err(Error::InvalidInput("max_iters must be at least 1".into()));
    }
    let ansatz = Hva::new(family, cfg.layers, cfg.initial)?;
    let np = ansatz.param_count();
    let energy = |p: &[f64]| -> Result<f64> { h.expectation(&ansatz.apply(p)?) };
    let gradient = |p: &[f64]| -> Result<DVector<f64>> {
        let mut g = DVector::zeros(np);
        let mut q = p.to_vec();
        for k in 0..np {
            q[k] = p[k] + FRAC_PI_4;
            let plus = energy(&q)?;
            q[k] = p[k] - FRAC_PI_4;
            let minus = energy(&q)?;
            q[k] = p[k];
            g[k] = plus - minus;
        }
        Ok(g)
    };

    let mut r = rng::stream(cfg.optimizer_seed, &[rng::tag::VQE_INIT]);
    let mut x = DVector::from_fn(np, |_, _| r.random_range(-cfg.init_scale..=cfg.init_scale));
    let mut f = energy(x.as_slice())?;
    let mut g = gradient(x.as_slice())?;
    let mut hinv = DMatrix::<f64>::identity(np, np);
    let mut energies = vec![f];
    let mut iterations = 0;
    let mut converged = false;
    // Previous energy, seeded so the first trial step has length ~ 1 / |g|.
    let mut f_prev = f + 0.5 * g.norm();

    while iterations < cfg.max_iters {
        if g.norm() < cfg.grad_tol {
            converged = true;
            break;
        }
        let mut p = -(&hinv * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            hinv.fill_with_identity();
            p = -g.clone();
            slope = g.dot(&p);
        }
        let alpha0 = (2.02 * (f - f_prev) / slope).clamp(1e-8, 1.0);
        let phi = |a: f64| -> Result<(f64, f64, DVector<f64>, DVector<f64>)> {
            let xt = &x + &p * a;
            let ft = energy(xt.as_slice())?;
            let gt = gradient(xt.as_slice())?;
            let dt = gt.dot(&p);
            Ok((ft, dt, xt, gt))
        };
        let Some((x_new, f_new, g_new)) = wolfe_search(&phi, f, slope, alpha0)? else {
            // No acceptable step along the search direction: a stationary
            // point to working precision.
            converged = true;
            break;
        };
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 {
            if iterations == 0 {
                hinv *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        f_prev = f;
        x = x_new;
        f = f_new;
        g = g_new;
        energies.push(f);
        iterations += 1;
    }
    if !converged && g.norm() < cfg.grad_tol {
        converged = true;
    }
    let state = ansatz.apply(x.as_slice())?;
    Ok(VqeOutcome {
        state,
        params: x.as_slice().to_vec(),
        energies,
        iterations,
        converged,
    })
}

type Trial = (f64, f64, DVector<f64>, DVector<f64>);

/// Strong Wolfe line search (bracketing then bisection-safeguarded cubic
/// zoom). `phi(a)` returns value, directional derivative, point and
/// gradient at step `a`. Returns `None` when no acceptable step exists.
fn wolfe_search(
    phi: &dyn Fn(f64) -> Result<Trial>,
    f0: f64,
    d0: f64,
    alpha0: f64,
) -> Result<Option<(DVector<f64>, f64, DVector<f64>)>> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    const MAX_EVALS: usize = 40;
    let accept = |t: Trial| Some((t.2, t.0, t.3));
    let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, d0);
    let mut a = alpha0;
    let mut evals = 0;
    let (mut lo, mut hi);
    loop {
        let t = phi(a)?;
        evals += 1;
        if t.0 > f0 + C1 * a * d0 || (evals > 1 && t.0 >= f_prev) {
            lo = (a_prev, f_prev, d_prev);
            hi = (a, t.0, t.1);
            break;
        }
        if t.1.abs() <= -C2 * d0 {
            return Ok(accept(t));
        }
        if t.1 >= 0.0 {
            lo = (a, t.0, t.1);
            hi = (a_prev, f_prev, d_prev);
            break;
        }
        if evals >= MAX_EVALS {
            return Ok(accept(t));
        }
        (a_prev, f_prev, d_prev) = (a, t.0, t.1);
        a *= 2.0;
    }
    while evals < MAX_EVALS {
        let (a_lo, f_lo, d_lo) = lo;
        let (a_hi, f_hi, d_hi) = hi;
        let width = (a_hi - a_lo).abs();
        if width < 1e-14 * a_lo.abs().max(1.0) {
            break;
        }
        let a = match cubic_min(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi) {
            Some(c) if (c - a_lo.min(a_hi)) > 0.1 * width && (a_lo.max(a_hi) - c) > 0.1 * width => c,
            _ => 0.5 * (a_lo + a_hi),
        };
        let t = phi(a)?;
        evals += 1;
        if t.0 > f0 + C1 * a * d0 || t.0 >= f_lo {
            hi = (a, t.0, t.1);
        } else {
            if t.1.abs() <= -C2 * d0 {
                return Ok(accept(t));
            }
            if t.1 * (a_hi - a_lo) >= 0.0 {
                hi = lo;
            }
            lo = (a, t.0, t.1);
        }
    }
    // Fall back to the best sufficient-decrease point found, if any.
    if lo.0 > 0.0 && lo.1 < f0 {
        let t = phi(lo.0)?;
        return Ok(accept(t));
    }
    Ok(None)
}

/// Minimizer of the cubic interpolating values and slopes at `a` and `b`.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let c = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    c.is_finite().then_some(c)
}
