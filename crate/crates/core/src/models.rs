//! Parameterized spin Hamiltonian families and sweep grids.
//!
//! A family is a list of operator groups with unit (or `±1`) coefficients and
//! one scalar weight per group. Each weight is a named model parameter times
//! a fixed scale, so `H(theta) = sum_g w_g(theta) G_g` is linear in the
//! group operators. That makes projected group matrices reusable across
//! parameter points and across families that only reweight the same groups.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::qcore::{Pauli, PauliString, PauliSum, PauliTerm, MAX_SITES};

/// A labelled sum of Pauli terms sharing one scalar weight.
#[derive(Clone, Debug, PartialEq)]
pub struct TermGroup {
    pub label: String,
    pub terms: Vec<PauliTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct GroupWeight {
    param: usize,
    scale: f64,
}

/// Hamiltonian family `H(theta)` over a vector of sweep parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamHamiltonian {
    name: String,
    nsites: usize,
    groups: Vec<TermGroup>,
    weights: Vec<GroupWeight>,
    params: Vec<(String, f64)>,
    axes: Vec<usize>,
    bounds: Option<Vec<(f64, f64)>>,
}

impl ParamHamiltonian {
    /// General family: `params` are named parameters with default values,
    /// each group `(label, param, terms)` is weighted by its parameter, and
    /// `axes` names the parameters swept by `theta`.
    pub fn new(
        name: &str,
        nsites: usize,
        params: &[(&str, f64)],
        groups: Vec<(&str, &str, Vec<PauliTerm>)>,
        axes: &[&str],
    ) -> Result<Self> {
        if nsites == 0 || nsites > MAX_SITES {
            return Err(Error::Capacity {
                what: format!("{nsites}-site family"),
                limit: MAX_SITES,
            });
        }
        let index = |n: &str| {
            params
                .iter()
                .position(|(p, _)| *p == n)
                .ok_or_else(|| Error::InvalidInput(format!("unknown parameter {n}")))
        };
        let mut labels = BTreeSet::new();
        let mut b = Builder::new(name, nsites, params);
        for (label, param, terms) in groups {
            if !labels.insert(label) {
                return Err(Error::InvalidInput(format!("duplicate group label {label}")));
            }
            index(param)?;
            PauliSum::new(nsites, terms.clone())?;
            b = b.group(label, param, terms);
        }
        for a in axes {
            index(a)?;
        }
        Ok(b.finish(axes))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nsites(&self) -> usize {
        self.nsites
    }

    pub fn groups(&self) -> &[TermGroup] {
        &self.groups
    }

    pub fn group_labels(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.label.as_str()).collect()
    }

    pub fn term_count(&self) -> usize {
        self.groups.iter().map(|g| g.terms.len()).sum()
    }

    /// Names of the parameters supplied by a parameter vector, in order.
    pub fn axis_names(&self) -> Vec<&str> {
        self.axes.iter().map(|&i| self.params[i].0.as_str()).collect()
    }

    /// All model parameters with their fixed values.
    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    fn param_index(&self, name: &str) -> Result<usize> {
        self.params
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::InvalidInput(format!("model {} has no parameter {name}", self.name)))
    }

    /// Same operator groups with one fixed parameter changed.
    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        let i = self.param_index(name)?;
        self.params[i].1 = value;
        Ok(self)
    }

    /// Same family swept over a different set of parameters.
    pub fn with_axes(mut self, names: &[&str]) -> Result<Self> {
        self.axes = names
            .iter()
            .map(|n| self.param_index(n))
            .collect::<Result<_>>()?;
        self.bounds = None;
        Ok(self)
    }

    /// Declares the admissible range of each axis.
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                found: bounds.len(),
            });
        }
        self.bounds = Some(bounds);
        Ok(self)
    }

    /// Checks the dimensionality of `theta` and, when bounds are declared,
    /// that it lies inside them.
    pub fn check_point(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                found: theta.len(),
            });
        }
        if let Some(b) = &self.bounds {
            for ((&v, &(lo, hi)), name) in theta.iter().zip(b).zip(self.axis_names()) {
                let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
                if v < lo - slack || v > hi + slack {
                    return Err(Error::InvalidInput(format!(
                        "{name} = {v} lies outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite parameter vector {theta:?}")));
        }
        Ok(())
    }

    /// Full parameter vector with the sweep axes replaced by `theta`.
    pub fn param_values(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_point(theta)?;
        let mut vals: Vec<f64> = self.params.iter().map(|p| p.1).collect();
        for (&i, &v) in self.axes.iter().zip(theta) {
            vals[i] = v;
        }
        Ok(vals)
    }

    /// One scalar weight per group.
    pub fn weights(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let vals = self.param_values(theta)?;
        Ok(self
            .weights
            .iter()
            .map(|w| w.scale * vals[w.param])
            .collect())
    }

    /// `H(theta)` with terms in group order; groups of zero weight are omitted.
    pub fn instantiate(&self, theta: &[f64]) -> Result<PauliSum> {
        let w = self.weights(theta)?;
        let terms = self
            .groups
            .iter()
            .zip(&w)
            .filter(|(_, &w)| w != 0.0)
            .flat_map(|(g, &w)| {
                g.terms
                    .iter()
                    .map(move |t| PauliTerm::new(w * t.coefficient, t.string.clone()))
            })
            .collect();
        PauliSum::new(self.nsites, terms)
    }

    /// Unit-weight operator of every group.
    pub fn group_operators(&self) -> Vec<PauliSum> {
        self.groups
            .iter()
            .map(|g| PauliSum::new(self.nsites, g.terms.clone()).expect("validated at construction"))
            .collect()
    }
}

struct Builder {
    name: String,
    nsites: usize,
    params: Vec<(String, f64)>,
    groups: Vec<TermGroup>,
    weights: Vec<GroupWeight>,
}

impl Builder {
    fn new(name: &str, nsites: usize, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            nsites,
            params: params.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            groups: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn group(mut self, label: &str, param: &str, terms: Vec<PauliTerm>) -> Self {
        let param = self
            .params
            .iter()
            .position(|(n, _)| n == param)
            .expect("builder parameter");
        self.groups.push(TermGroup {
            label: label.to_string(),
            terms,
        });
        self.weights.push(GroupWeight { param, scale: 1.0 });
        self
    }

    fn finish(self, axes: &[&str]) -> ParamHamiltonian {
        let axes = axes
            .iter()
            .map(|a| self.params.iter().position(|(n, _)| n == a).expect("axis"))
            .collect();
        ParamHamiltonian {
            name: self.name,
            nsites: self.nsites,
            groups: self.groups,
            weights: self.weights,
            params: self.params,
            axes,
            bounds: None,
        }
    }
}

fn single_terms(n: usize, p: Pauli, sign: impl Fn(usize) -> f64) -> Vec<PauliTerm> {
    (0..n)
        .map(|i| PauliTerm::new(sign(i), PauliString::single(n, i, p)))
        .collect()
}

fn bond_terms(n: usize, bonds: &[(usize, usize)], p: Pauli) -> Vec<PauliTerm> {
    bonds
        .iter()
        .map(|&(i, j)| PauliTerm::new(1.0, PauliString::pair(n, i, j, p)))
        .collect()
}

fn open_chain_bonds(n: usize) -> Vec<(usize, usize)> {
    (0..n - 1).map(|i| (i, i + 1)).collect()
}

fn check_chain(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("chain needs at least 2 sites, got {n}")));
    }
    if n > MAX_SITES {
        return Err(Error::Capacity {
            what: format!("{n}-site chain"),
            limit: MAX_SITES,
        });
    }
    Ok(())
}

/// Open XY chain with a uniform `Z` field and a staggered `X` field:
///
/// `H = J sum_i (X_i X_{i+1} + Y_i Y_{i+1}) + sum_i (B_Z Z_i + (-1)^i B_X X_i)`
///
/// with `i` counted from 1, so site 0 carries `-B_X`. Groups in Trotter
/// order: `x_field`, `z_field`, `xx`, `yy`. Swept over `B_Z`.
pub fn xy_chain(n: usize, j: f64, b_x: f64) -> Result<ParamHamiltonian> {
    check_chain(n)?;
    let bonds = open_chain_bonds(n);
    Ok(Builder::new("xy_chain", n, &[("J", j), ("B_X", b_x), ("B_Z", 0.0)])
        .group(
            "x_field",
            "B_X",
            single_terms(n, Pauli::X, |i| if i % 2 == 0 { -1.0 } else { 1.0 }),
        )
        .group("z_field", "B_Z", single_terms(n, Pauli::Z, |_| 1.0))
        .group("xx", "J", bond_terms(n, &bonds, Pauli::X))
        .group("yy", "J", bond_terms(n, &bonds, Pauli::Y))
        .finish(&["B_Z"]))
}

/// Open XXZ chain in a uniform `Z` field:
///
/// `H = J sum_i (X_i X_{i+1} + Y_i Y_{i+1}) + J_Z sum_i Z_i Z_{i+1} + B_Z sum_i Z_i`
///
/// Groups in Trotter order: `z_field`, `xx`, `yy`, `zz`. Swept over `J_Z`.
pub fn xxz_chain(n: usize, j: f64, b_z: f64) -> Result<ParamHamiltonian> {
    check_chain(n)?;
    let bonds = open_chain_bonds(n);
    Ok(Builder::new("xxz_chain", n, &[("J", j), ("J_Z", 0.0), ("B_Z", b_z)])
        .group("z_field", "B_Z", single_terms(n, Pauli::Z, |_| 1.0))
        .group("xx", "J", bond_terms(n, &bonds, Pauli::X))
        .group("yy", "J", bond_terms(n, &bonds, Pauli::Y))
        .group("zz", "J_Z", bond_terms(n, &bonds, Pauli::Z))
        .finish(&["J_Z"]))
}

/// Nearest-neighbour bonds of an `nx x ny` kagome cluster with periodic
/// boundaries, as sorted `(i, j)` pairs with `i < j`.
///
/// Site `3 * (cx + nx * cy) + s` is sublattice `s` of cell `(cx, cy)`, with
/// A at the cell origin, B at `a1/2` and C at `a2/2`. Each cell owns its up
/// triangle (A-B, A-C, B-C) and the three bonds of the neighbouring down
/// triangles: B(R)-A(R+a1), C(R)-A(R+a2) and B(R)-C(R+a1-a2). Clusters one
/// cell wide fold bonds onto themselves; duplicates and self-bonds are
/// dropped.
pub fn kagome_bonds(nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let site = |cx: isize, cy: isize, s: usize| {
        let x = cx.rem_euclid(nx as isize) as usize;
        let y = cy.rem_euclid(ny as isize) as usize;
        3 * (x + nx * y) + s
    };
    let mut set = BTreeSet::new();
    for cy in 0..ny as isize {
        for cx in 0..nx as isize {
            let (a, b, c) = (site(cx, cy, 0), site(cx, cy, 1), site(cx, cy, 2));
            let pairs = [
                (a, b),
                (a, c),
                (b, c),
                (b, site(cx + 1, cy, 0)),
                (c, site(cx, cy + 1, 0)),
                (b, site(cx + 1, cy - 1, 2)),
            ];
            for (i, j) in pairs {
                if i != j {
                    set.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Kagome XXZ model on `3 * nx * ny` sites with periodic boundaries:
///
/// `H = J sum_<ij> (X_i X_j + Y_i Y_j) + J_Z sum_<ij> Z_i Z_j + B_Z sum_i Z_i`
///
/// Groups: `z_field`, `xx`, `yy`, `zz`. Swept over `(J, J_Z)`.
pub fn kagome_xxz(nx: usize, ny: usize, b_z: f64) -> Result<ParamHamiltonian> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidInput("kagome cluster needs at least one cell per direction".into()));
    }
    let n = 3 * nx * ny;
    if n > MAX_SITES {
        return Err(Error::Capacity {
            what: format!("{n}-site kagome cluster"),
            limit: MAX_SITES,
        });
    }
    let bonds = kagome_bonds(nx, ny);
    Ok(Builder::new("kagome_xxz", n, &[("J", 1.0), ("J_Z", 0.0), ("B_Z", b_z)])
        .group("z_field", "B_Z", single_terms(n, Pauli::Z, |_| 1.0))
        .group("xx", "J", bond_terms(n, &bonds, Pauli::X))
        .group("yy", "J", bond_terms(n, &bonds, Pauli::Y))
        .group("zz", "J_Z", bond_terms(n, &bonds, Pauli::Z))
        .finish(&["J", "J_Z"]))
}

/// One named sweep axis sampled at `count` equally spaced points including
/// both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("sweep count must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInput(format!("bad sweep range ({lo}, {hi})")));
        }
        Ok(Self {
            name: name.into(),
            lo,
            hi,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }
}

/// `count` equally spaced values over the closed interval `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Ordered list of parameter vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    axes: Vec<String>,
    points: Vec<Vec<f64>>,
}

impl SweepGrid {
    /// Cartesian product of the axes; the first axis varies slowest.
    pub fn product(axes: &[SweepAxis]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("sweep needs at least one axis".into()));
        }
        let mut points: Vec<Vec<f64>> = vec![Vec::new()];
        for ax in axes {
            let vals = ax.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        Ok(Self {
            axes: axes.iter().map(|a| a.name.clone()).collect(),
            points,
        })
    }

    pub fn from_points(axes: Vec<String>, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("sweep has no points".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != axes.len()) {
            return Err(Error::DimensionMismatch {
                expected: axes.len(),
                found: p.len(),
            });
        }
        Ok(Self { axes, points })
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Single-axis sweep of `count` points over `[lo, hi]`.
pub fn make_sweep(lo: f64, hi: f64, count: usize) -> Result<SweepGrid> {
    SweepGrid::product(&[SweepAxis::new("x", lo, hi, count)?])
}
