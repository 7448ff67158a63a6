use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::SubspaceBasis;
use crate::error::{check_dim, Result};
use crate::models::ParamHamiltonian;
use crate::par::map_indexed;

/// Overlap matrix `S_ij = <phi_i|phi_j>` and one projected matrix
/// `(M_g)_ij = <phi_i|G_g|phi_j>` per unit-weight operator group.
///
/// `H(theta)` projects to `sum_g w_g(theta) M_g`, so the projection is
/// computed once per basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceProjection {
    pub overlap: DMatrix<C64>,
    pub group_mats: Vec<DMatrix<C64>>,
    pub labels: Vec<String>,
}

impl SubspaceProjection {
    pub fn k(&self) -> usize {
        self.overlap.nrows()
    }

    /// `sum_g w_g M_g`.
    pub fn assemble(&self, weights: &[f64]) -> Result<DMatrix<C64>> {
        check_dim(self.group_mats.len(), weights.len())?;
        let k = self.k();
        let mut h = DMatrix::<C64>::zeros(k, k);
        for (m, &w) in self.group_mats.iter().zip(weights) {
            if w != 0.0 {
                h += m * C64::new(w, 0.0);
            }
        }
        Ok(h)
    }

    /// Replaces every matrix with `(A + A^dagger) / 2`.
    pub fn hermitize(&mut self) {
        let sym = |m: &DMatrix<C64>| (m + m.adjoint()) * C64::new(0.5, 0.0);
        self.overlap = sym(&self.overlap);
        for m in &mut self.group_mats {
            *m = sym(m);
        }
    }

    /// Leading `k x k` block, i.e. the projection of the first `k` basis vectors.
    pub fn leading(&self, k: usize) -> Self {
        let cut = |m: &DMatrix<C64>| m.view((0, 0), (k, k)).into_owned();
        Self {
            overlap: cut(&self.overlap),
            group_mats: self.group_mats.iter().map(cut).collect(),
            labels: self.labels.clone(),
        }
    }
}

pub fn project_operators(basis: &SubspaceBasis, family: &ParamHamiltonian) -> Result<SubspaceProjection> {
    check_dim(1 << family.nsites(), basis.dim())?;
    let k = basis.len();
    let v = &basis.vectors;
    let mut overlap = DMatrix::<C64>::identity(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let s = v[i].inner(&v[j])?;
            overlap[(i, j)] = s;
            overlap[(j, i)] = s.conj();
        }
        overlap[(i, i)] = C64::new(v[i].norm_sqr(), 0.0);
    }
    let ops = family.group_operators();
    let group_mats = map_indexed(ops.len(), |g| -> Result<DMatrix<C64>> {
        let applied = v.iter().map(|x| ops[g].apply(x)).collect::<Result<Vec<_>>>()?;
        let mut m = DMatrix::<C64>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let e = v[i].inner(&applied[j])?;
                if i == j {
                    m[(i, i)] = C64::new(e.re, 0.0);
                } else {
                    m[(i, j)] = e;
                    m[(j, i)] = e.conj();
                }
            }
        }
        Ok(m)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SubspaceProjection {
        overlap,
        group_mats,
        labels: family.group_labels().iter().map(|s| s.to_string()).collect(),
    })
}
