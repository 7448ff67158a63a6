use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::noisy_asp_trajectory;
use crate::error::{Error, Result};
use crate::models::ParamHamiltonian;
use crate::par::map_indexed;
use crate::qcore::{rng, StateVector};
use crate::stateprep::AspConfig;
use crate::subspace::{project_operators, SubspaceBasis, SubspaceProjection};

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    /// Standard deviation of the gate-noise probability distribution.
    pub sigma: f64,
    pub n_trajectories: usize,
    pub seed: u64,
    pub bootstrap_resamples: usize,
}

impl NoiseConfig {
    pub fn new(sigma: f64, n_trajectories: usize, seed: u64) -> Self {
        Self {
            sigma,
            n_trajectories,
            seed,
            bootstrap_resamples: 1000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if self.n_trajectories == 0 {
            return Err(Error::InvalidInput("need at least one trajectory".into()));
        }
        Ok(())
    }
}

/// Noisy ASP basis of trajectory `trajectory`: training point `i` draws from
/// stream `(seed, trajectory, i)`.
pub fn noisy_basis(
    family: &ParamHamiltonian,
    training: &[Vec<f64>],
    dt: f64,
    t_max: f64,
    start: &[f64],
    initial: &StateVector,
    noise: &NoiseConfig,
    trajectory: usize,
) -> Result<SubspaceBasis> {
    let vectors = training
        .iter()
        .enumerate()
        .map(|(i, theta)| {
            let cfg = AspConfig::new(dt, t_max, start.to_vec(), theta.clone());
            let mut r = rng::stream(
                noise.seed,
                &[rng::tag::NOISE, trajectory as u64, i as u64],
            );
            noisy_asp_trajectory(family, &cfg, initial, noise.sigma, &mut r)
        })
        .collect::<Result<Vec<_>>>()?;
    SubspaceBasis::new(
        vectors,
        training.to_vec(),
        format!("noisy asp(dt={dt}, t_max={t_max}, sigma={}) trajectory {trajectory}", noise.sigma),
    )
}

/// Trajectory-averaged projection with bootstrap standard errors.
#[derive(Clone, Debug)]
pub struct EnsembleProjection {
    pub mean: SubspaceProjection,
    /// Per-element standard error of `mean.overlap`.
    pub stderr_overlap: DMatrix<f64>,
    /// Per-element standard error of each `mean.group_mats[g]`.
    pub stderr_groups: Vec<DMatrix<f64>>,
    /// Per-trajectory projections, in trajectory order.
    pub samples: Vec<SubspaceProjection>,
}

impl EnsembleProjection {
    pub fn max_stderr(&self) -> f64 {
        std::iter::once(&self.stderr_overlap)
            .chain(&self.stderr_groups)
            .flat_map(|m| m.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// Builds one noisy basis per trajectory, projects each, and averages the
/// matrices element-wise. Bootstrap resampling of trajectories gives the
/// standard error of every averaged element.
pub fn ensemble_projected_matrices(
    family: &ParamHamiltonian,
    training: &[Vec<f64>],
    dt: f64,
    t_max: f64,
    start: &[f64],
    initial: &StateVector,
    noise: &NoiseConfig,
) -> Result<EnsembleProjection> {
    noise.validate()?;
    let samples = map_indexed(noise.n_trajectories, |t| {
        let basis = noisy_basis(family, training, dt, t_max, start, initial, noise, t)?;
        project_operators(&basis, family)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mean = pairwise_mean(&samples);
    let (stderr_overlap, stderr_groups) = if samples.len() >= 2 && noise.bootstrap_resamples > 0 {
        let mut r = rng::stream(noise.seed, &[rng::tag::BOOTSTRAP]);
        bootstrap_stderr(&samples, noise.bootstrap_resamples, &mut r)
    } else {
        let k = mean.k();
        (DMatrix::zeros(k, k), vec![DMatrix::zeros(k, k); mean.group_mats.len()])
    };
    Ok(EnsembleProjection {
        mean,
        stderr_overlap,
        stderr_groups,
        samples,
    })
}

fn flatten(p: &SubspaceProjection) -> Vec<C64> {
    std::iter::once(&p.overlap)
        .chain(&p.group_mats)
        .flat_map(|m| m.iter().copied())
        .collect()
}

fn unflatten<T: nalgebra::Scalar + Copy>(flat: &[T], k: usize, groups: usize) -> (DMatrix<T>, Vec<DMatrix<T>>) {
    let kk = k * k;
    let mat = |i: usize| DMatrix::from_column_slice(k, k, &flat[i * kk..(i + 1) * kk]);
    (mat(0), (1..=groups).map(mat).collect())
}

fn pairwise_sum(rows: &[Vec<C64>]) -> Vec<C64> {
    match rows.len() {
        0 => Vec::new(),
        1 => rows[0].clone(),
        n => {
            let (a, b) = rows.split_at(n / 2);
            let mut s = pairwise_sum(a);
            for (x, y) in s.iter_mut().zip(pairwise_sum(b)) {
                *x += y;
            }
            s
        }
    }
}

/// Element-wise mean using pairwise summation (fixed order, so the result
/// does not depend on how trajectories were scheduled).
pub fn pairwise_mean(samples: &[SubspaceProjection]) -> SubspaceProjection {
    let rows: Vec<Vec<C64>> = samples.iter().map(flatten).collect();
    let n = samples.len() as f64;
    let sum: Vec<C64> = pairwise_sum(&rows).into_iter().map(|z| z / n).collect();
    let k = samples[0].k();
    let (overlap, group_mats) = unflatten(&sum, k, samples[0].group_mats.len());
    let mut mean = SubspaceProjection {
        overlap,
        group_mats,
        labels: samples[0].labels.clone(),
    };
    mean.hermitize();
    mean
}

/// Bootstrap standard error of the element-wise mean: resample trajectories
/// with replacement `resamples` times and take the spread of the resampled
/// means (`sqrt(var(re) + var(im))`). Deviations are accumulated relative to
/// the plain mean to avoid cancellation when the spread is tiny.
pub fn bootstrap_stderr<R: Rng + ?Sized>(
    samples: &[SubspaceProjection],
    resamples: usize,
    rng: &mut R,
) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
    let rows: Vec<Vec<C64>> = samples.iter().map(flatten).collect();
    let n = rows.len();
    let len = rows[0].len();
    let center: Vec<C64> = pairwise_sum(&rows).into_iter().map(|z| z / n as f64).collect();
    let mut sum = vec![C64::new(0.0, 0.0); len];
    let mut sum_sq = vec![0.0; len];
    let mut counts = vec![0u32; n];
    let mut acc = vec![C64::new(0.0, 0.0); len];
    for _ in 0..resamples {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            counts[rng.random_range(0..n)] += 1;
        }
        acc.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        for (row, &c) in rows.iter().zip(&counts) {
            if c > 0 {
                let w = c as f64;
                for ((a, x), m) in acc.iter_mut().zip(row).zip(&center) {
                    *a += (x - m) * w;
                }
            }
        }
        for ((s, q), a) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(&acc) {
            let d = a / n as f64;
            *s += d;
            *q += d.norm_sqr();
        }
    }
    let b = resamples as f64;
    let err: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, q)| {
            let mean = s / b;
            (q / b - mean.norm_sqr()).max(0.0).sqrt()
        })
        .collect();
    unflatten(&err, samples[0].k(), samples[0].group_mats.len())
}
