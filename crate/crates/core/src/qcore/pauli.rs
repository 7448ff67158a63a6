use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{check_dim, Error, Result};
use crate::qcore::StateVector;

/// Single-site Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-site Paulis on `N` sites.
///
/// Site 0 is the least-significant bit of the basis index. The string acts on
/// a basis state as `P|b> = i^{n_Y} (-1)^{|b & z|} |b ^ x>` where `x` marks the
/// X/Y sites and `z` marks the Y/Z sites.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Self {
        let mut x_mask = 0;
        let mut z_mask = 0;
        let mut y_count = 0;
        for (site, p) in axes.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << site,
                Pauli::Z => z_mask |= 1 << site,
                Pauli::Y => {
                    x_mask |= 1 << site;
                    z_mask |= 1 << site;
                    y_count += 1;
                }
            }
        }
        Self {
            axes,
            x_mask,
            z_mask,
            y_count,
        }
    }

    pub fn identity(nsites: usize) -> Self {
        Self::new(vec![Pauli::I; nsites])
    }

    /// `p` on `site`, identity elsewhere.
    pub fn single(nsites: usize, site: usize, p: Pauli) -> Self {
        let mut axes = vec![Pauli::I; nsites];
        axes[site] = p;
        Self::new(axes)
    }

    /// `p` on sites `i` and `j`, identity elsewhere.
    pub fn pair(nsites: usize, i: usize, j: usize, p: Pauli) -> Self {
        let mut axes = vec![Pauli::I; nsites];
        axes[i] = p;
        axes[j] = p;
        Self::new(axes)
    }

    pub fn nsites(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    /// Sites carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    /// Global phase `i^{n_Y}`.
    #[inline]
    pub fn phase(&self) -> C64 {
        match self.y_count % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Matrix element factor such that `P|b> = factor(b) |b ^ x_mask>`.
    #[inline]
    pub fn factor(&self, b: usize) -> C64 {
        let ph = self.phase();
        if (b & self.z_mask).count_ones() % 2 == 1 {
            -ph
        } else {
            ph
        }
    }

    /// Whether every matrix element is real (even number of Y factors).
    pub fn is_real(&self) -> bool {
        self.y_count.is_multiple_of(2)
    }

    /// `dst += scale * P src`.
    pub fn apply_add(&self, src: &[C64], dst: &mut [C64], scale: C64) {
        let x = self.x_mask;
        let z = self.z_mask;
        let ph = self.phase() * scale;
        for (b, &a) in src.iter().enumerate() {
            let f = if (b & z).count_ones() & 1 == 1 { -ph } else { ph };
            dst[b ^ x] += f * a;
        }
    }

    /// In-place `amps <- exp(angle * P) amps`, using `exp(aP) = cosh(a) I + sinh(a) P`.
    pub fn apply_exp_in_place(&self, amps: &mut [C64], angle: C64) {
        exp_masks(amps, self.x_mask, self.z_mask, self.phase(), angle);
    }
}

/// `exp(angle * P)` for the Pauli string with masks `x`, `z` and phase `ph`
/// (so that `P|b> = ph (-1)^{|b & z|} |b ^ x>`).
pub(crate) fn exp_masks(amps: &mut [C64], x: usize, z: usize, ph: C64, angle: C64) {
    let c = angle.cosh();
    let s = angle.sinh();
    let sign = |b: usize| if (b & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
    if x == 0 {
        let plus = c + s * ph;
        let minus = c - s * ph;
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= if sign(b) > 0.0 { plus } else { minus };
        }
        return;
    }
    let high = 1usize << (usize::BITS - 1 - x.leading_zeros());
    let sph = s * ph;
    for b in 0..amps.len() {
        if b & high != 0 {
            continue;
        }
        let b2 = b ^ x;
        let a1 = amps[b];
        let a2 = amps[b2];
        amps[b] = c * a1 + sph * sign(b2) * a2;
        amps[b2] = c * a2 + sph * sign(b) * a1;
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.axes {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// Parses strings like `"XXIZ"`; the first character is site 0.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidInput(format!("bad Pauli label {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(axes))
    }
}

/// Real coefficient times a Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self {
            coefficient,
            string,
        }
    }

    pub fn nsites(&self) -> usize {
        self.string.nsites()
    }
}

/// Applies `exp(angle * P)` for the term's Pauli string `P`, with the term's
/// coefficient folded into the angle (`angle * coefficient`).
///
/// A purely imaginary angle gives a unitary factor; a real angle gives an
/// imaginary-time factor whose output is left unnormalized.
pub fn apply_pauli_term_exp(state: &StateVector, term: &PauliTerm, angle: C64) -> Result<StateVector> {
    check_dim(state.nsites(), term.nsites())?;
    if !angle.re.is_finite() || !angle.im.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite angle {angle}")));
    }
    let mut out = state.clone();
    term.string
        .apply_exp_in_place(out.amplitudes_mut(), angle * term.coefficient);
    Ok(out)
}

/// A Hamiltonian written as a real-weighted sum of Pauli strings on `nsites`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    nsites: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(nsites: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if nsites == 0 || nsites > super::MAX_SITES {
            return Err(Error::Capacity {
                what: format!("{nsites} sites"),
                limit: super::MAX_SITES,
            });
        }
        for t in &terms {
            check_dim(nsites, t.nsites())?;
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite coefficient on {}",
                    t.string
                )));
            }
        }
        Ok(Self { nsites, terms })
    }

    pub fn nsites(&self) -> usize {
        self.nsites
    }

    pub fn dim(&self) -> usize {
        1 << self.nsites
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.is_real())
    }

    /// `H|psi>`, without normalization.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_dim(self.nsites, state.nsites())?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        Ok(StateVector::from_raw(self.nsites, out))
    }

    /// `dst = H src`.
    pub fn apply_into(&self, src: &[C64], dst: &mut [C64]) {
        dst.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        for t in &self.terms {
            t.string
                .apply_add(src, dst, C64::new(t.coefficient, 0.0));
        }
    }

    /// `<psi|H|psi>`; the imaginary part is discarded after a residue check.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let h = self.apply(state)?;
        let v = state.inner(&h)?;
        let scale = 1.0 + v.re.abs();
        if v.im.abs() > 1e-8 * scale {
            return Err(Error::Numeric(format!(
                "expectation has imaginary residue {:.3e}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Explicit `2^N x 2^N` matrix.
    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let dim = self.dim();
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for t in &self.terms {
            let x = t.string.x_mask();
            for b in 0..dim {
                m[(b ^ x, b)] += t.string.factor(b) * t.coefficient;
            }
        }
        m
    }

    /// True when the operator conserves the number of set bits (total `Z`
    /// magnetization), checked element by element on the summed operator.
    pub fn conserves_magnetization(&self) -> bool {
        use std::collections::BTreeMap;
        let mut by_mask: BTreeMap<usize, Vec<&PauliTerm>> = BTreeMap::new();
        for t in &self.terms {
            let x = t.string.x_mask();
            if x != 0 {
                by_mask.entry(x).or_default().push(t);
            }
        }
        for (x, group) in by_mask {
            for b in 0..self.dim() {
                if (b ^ x).count_ones() == b.count_ones() {
                    continue;
                }
                let total: C64 = group
                    .iter()
                    .map(|t| t.string.factor(b) * t.coefficient)
                    .sum();
                if total.norm() > 1e-13 {
                    return false;
                }
            }
        }
        true
    }
}

/// Free-function form of [`PauliSum::expectation`].
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    h.expectation(state)
}
