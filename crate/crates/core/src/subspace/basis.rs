use crate::error::{check_dim, Error, Result};
use crate::models::{ParamHamiltonian, SweepGrid};
use crate::par::map_indexed;
use crate::qcore::{ground_state, PauliSum, StateVector};
use crate::stateprep::{run_asp_from, run_ite, run_vqe, AspConfig, IteConfig, VqeConfig};

/// How each training state is prepared.
#[derive(Clone, Debug, PartialEq)]
pub enum PrepMethod {
    /// Truncated imaginary-time evolution at the training point.
    Ite(IteConfig),
    /// Linear ramp from the exact ground state at `start` to the training
    /// point in `t_max / dt` steps.
    Asp { dt: f64, t_max: f64, start: Vec<f64> },
    /// Truncated HVA-VQE at the training point.
    Vqe(VqeConfig),
    /// Exact ground state (reference only).
    Exact,
}

impl PrepMethod {
    pub fn describe(&self) -> String {
        match self {
            PrepMethod::Ite(c) => format!("ite(dtau={}, tau_max={})", c.dtau, c.tau_max),
            PrepMethod::Asp { dt, t_max, start } => {
                format!("asp(dt={dt}, t_max={t_max}, start={start:?})")
            }
            PrepMethod::Vqe(c) => format!("vqe(layers={}, max_iters={})", c.layers, c.max_iters),
            PrepMethod::Exact => "exact".to_string(),
        }
    }
}

/// Prepares one state at `theta`. `asp_initial` is the ground state at the
/// ramp start and must be supplied for [`PrepMethod::Asp`].
pub fn prepare_state(
    family: &ParamHamiltonian,
    theta: &[f64],
    method: &PrepMethod,
    asp_initial: Option<&StateVector>,
) -> Result<StateVector> {
    family.check_point(theta)?;
    match method {
        PrepMethod::Ite(cfg) => Ok(run_ite(&family.instantiate(theta)?, cfg)?.state),
        PrepMethod::Asp { dt, t_max, start } => {
            let cfg = AspConfig::new(*dt, *t_max, start.clone(), theta.to_vec());
            let owned;
            let init = match asp_initial {
                Some(s) => s,
                None => {
                    owned = ground_state(&family.instantiate(start)?)?.1;
                    &owned
                }
            };
            Ok(run_asp_from(family, &cfg, init)?.state)
        }
        PrepMethod::Vqe(cfg) => Ok(run_vqe(&family.instantiate(theta)?, family, cfg)?.state),
        PrepMethod::Exact => Ok(ground_state(&family.instantiate(theta)?)?.1),
    }
}

/// `k_p` unit-norm states with the parameter points they were prepared at.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub vectors: Vec<StateVector>,
    pub training_points: Vec<Vec<f64>>,
    pub provenance: String,
}

impl SubspaceBasis {
    pub fn new(vectors: Vec<StateVector>, training_points: Vec<Vec<f64>>, provenance: String) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidInput("basis needs at least one vector".into()));
        }
        check_dim(vectors.len(), training_points.len())?;
        let dim = vectors[0].dim();
        for v in &vectors {
            check_dim(dim, v.dim())?;
            let n = v.norm();
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidInput(format!("basis vector has norm {n}")));
            }
        }
        Ok(Self {
            vectors,
            training_points,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }
}

/// One prepared state per training point.
pub fn build_basis(family: &ParamHamiltonian, training: &SweepGrid, method: &PrepMethod) -> Result<SubspaceBasis> {
    let asp_initial = match method {
        PrepMethod::Asp { start, .. } => Some(ground_state(&family.instantiate(start)?)?.1),
        _ => None,
    };
    let points = training.points();
    let vectors = map_indexed(points.len(), |i| {
        prepare_state(family, &points[i], method, asp_initial.as_ref()).map_err(|e| Error::Preparation {
            index: i,
            point: points[i].clone(),
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    SubspaceBasis::new(
        vectors,
        points.to_vec(),
        format!("{} on {}", method.describe(), family.name()),
    )
}

/// Krylov basis `{psi0, H psi0, ..., H^{k-1} psi0}` with each vector
/// normalized and no orthogonalization.
pub fn krylov_basis(h: &PauliSum, psi0: &StateVector, k: usize) -> Result<SubspaceBasis> {
    if k == 0 {
        return Err(Error::InvalidInput("Krylov basis needs k >= 1".into()));
    }
    let mut v = psi0.clone().normalized()?;
    let mut vectors = Vec::with_capacity(k);
    for _ in 0..k {
        vectors.push(v.clone());
        v = h.apply(&v)?.normalized()?;
    }
    SubspaceBasis::new(vectors, vec![Vec::new(); k], "krylov".to_string())
}
