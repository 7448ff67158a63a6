use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};

/// Complex amplitude vector of length `2^nsites`.
///
/// Operations that promise a normalized result ([`StateVector::normalize`],
/// unitary evolution, [`haar_random_state`]) keep the Euclidean norm at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    nsites: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub(crate) fn from_raw(nsites: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << nsites);
        Self { nsites, amps }
    }

    /// Wraps raw amplitudes; the length must be `2^nsites`. No normalization.
    pub fn from_amplitudes(nsites: usize, amps: Vec<C64>) -> Result<Self> {
        if nsites > super::MAX_SITES {
            return Err(Error::Capacity {
                what: format!("{nsites} sites"),
                limit: super::MAX_SITES,
            });
        }
        check_dim(1 << nsites, amps.len())?;
        Ok(Self { nsites, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(nsites: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << nsites];
        amps[index] = C64::new(1.0, 0.0);
        Self { nsites, amps }
    }

    /// `|0...0>`.
    pub fn zero(nsites: usize) -> Self {
        Self::basis(nsites, 0)
    }

    /// Equal superposition of all computational basis states.
    pub fn uniform(nsites: usize) -> Self {
        let dim = 1usize << nsites;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            nsites,
            amps: vec![a; dim],
        }
    }

    pub fn nsites(&self) -> usize {
        self.nsites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; fails on a zero (or non-finite) norm.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n.is_finite() && n > 1e-300) {
            return Err(Error::Numeric(format!("cannot normalize state with norm {n:e}")));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(n)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.amps, &other.amps))
    }

    pub fn scale(&mut self, s: C64) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C64, other: &StateVector) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += s * b;
        }
        Ok(())
    }

    /// Probability `|<b|psi>|^2` of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Free-function form of [`StateVector::inner`].
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

/// Draws a Haar-random state from an explicit generator: i.i.d. complex
/// Gaussian amplitudes, normalized.
pub fn haar_random_state_with<R: Rng + ?Sized>(nsites: usize, rng: &mut R) -> StateVector {
    let dim = 1usize << nsites;
    let amps = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    let mut s = StateVector::from_raw(nsites, amps);
    s.normalize().expect("gaussian vector has nonzero norm");
    s
}

/// Haar-random state, deterministic in `seed`.
pub fn haar_random_state(nsites: usize, seed: u64) -> Result<StateVector> {
    if nsites == 0 || nsites > super::MAX_SITES {
        return Err(Error::InvalidInput(format!(
            "nsites must be in 1..={}, got {nsites}",
            super::MAX_SITES
        )));
    }
    let mut rng = super::rng::stream(seed, &[super::rng::tag::HAAR]);
    Ok(haar_random_state_with(nsites, &mut rng))
}
