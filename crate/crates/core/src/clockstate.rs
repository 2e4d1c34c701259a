//! Small dense quantum-state toolbox: labeled tensor products, partial traces,
//! entropies, two-qubit concurrence and the correlation witness.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Amplitude tolerance for normalization and Hermiticity checks.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOLERANCE` are accepted as nonnegative.
pub const PSD_TOLERANCE: f64 = 1e-10;
const CLAMP: f64 = 1e-12;

/// A named tensor factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim }
    }
}

fn total_dim(labels: &[Subsystem]) -> usize {
    labels.iter().map(|s| s.dim).product()
}

fn check_labels(labels: &[Subsystem], dim: usize) -> Result<()> {
    if labels.is_empty() || labels.iter().any(|s| s.dim == 0) {
        return domain("subsystems must be nonempty with positive dimension");
    }
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].iter().any(|b| b.name == a.name) {
            return domain(format!("duplicate subsystem label {}", a.name));
        }
    }
    let expected = total_dim(labels);
    if expected != dim {
        return Err(Error::DimensionMismatch { expected, found: dim });
    }
    Ok(())
}

/// Normalized pure state over labeled subsystems; the first label is the most
/// significant tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    labels: Vec<Subsystem>,
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn new(amplitudes: DVector<C64>, labels: Vec<Subsystem>) -> Result<Self> {
        check_labels(&labels, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("state amplitudes must have finite nonzero norm");
        }
        Ok(Self { amplitudes: amplitudes / C64::from(norm), labels })
    }

    /// Single-subsystem state.
    pub fn from_amplitudes(name: &str, amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes), vec![Subsystem::new(name, amplitudes.len())])
    }

    /// Computational basis state `|index>` of a single subsystem.
    pub fn basis(name: &str, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return domain(format!("basis index {index} out of range for dimension {dim}"));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v, vec![Subsystem::new(name, dim)])
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { matrix: m, labels: self.labels.clone() }
    }
}

/// Kronecker product of `parts`, labels concatenated in order.
pub fn tensor_state(parts: &[StateVector]) -> Result<StateVector> {
    let Some((first, rest)) = parts.split_first() else {
        return domain("tensor product of no states");
    };
    let mut amps = first.amplitudes.clone();
    let mut labels = first.labels.clone();
    for p in rest {
        amps = amps.kronecker(&p.amplitudes);
        labels.extend(p.labels.iter().cloned());
    }
    StateVector::new(amps, labels)
}

/// Hermitian, unit-trace, positive semidefinite matrix over labeled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    labels: Vec<Subsystem>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<C64>, labels: Vec<Subsystem>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        check_labels(&labels, matrix.nrows())?;
        if (&matrix - matrix.adjoint()).camax() > STATE_TOLERANCE {
            return domain("density matrix is not Hermitian");
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return domain(format!("density matrix trace is {tr}, expected 1"));
        }
        let rho = Self { matrix, labels };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOLERANCE {
            return domain(format!("density matrix has negative eigenvalue {min}"));
        }
        Ok(rho)
    }

    /// `sum_k p_k |psi_k><psi_k|` for states with identical labels.
    pub fn mixture(weights: &[f64], states: &[StateVector]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch { expected: states.len(), found: weights.len() });
        }
        let labels = states[0].labels.clone();
        let dim = states[0].dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (p, s) in weights.iter().zip(states) {
            if s.labels != labels {
                return domain("mixture components carry different labels");
            }
            m += s.to_density().matrix * C64::from(*p);
        }
        Self::new(m, labels)
    }

    /// `I/d` over the given subsystems.
    pub fn maximally_mixed(labels: Vec<Subsystem>) -> Result<Self> {
        let d = total_dim(&labels);
        Self::new(DMatrix::identity(d, d) / C64::from(d as f64), labels)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending real eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        Ok((&self.matrix * op).trace())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::new(self.matrix.kronecker(&other.matrix), labels)
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(s: &StateVector) -> Self {
        s.to_density()
    }
}

/// Anything with a density matrix: pure or mixed states.
pub trait QuantumState {
    fn density(&self) -> DensityMatrix;
}

impl QuantumState for StateVector {
    fn density(&self) -> DensityMatrix {
        self.to_density()
    }
}

impl QuantumState for DensityMatrix {
    fn density(&self) -> DensityMatrix {
        self.clone()
    }
}

/// Partial trace over every subsystem not named in `keep`; kept subsystems
/// retain their original order.
pub fn reduced_density<S: QuantumState + ?Sized>(state: &S, keep: &[&str]) -> Result<DensityMatrix> {
    let rho = state.density();
    for k in keep {
        if !rho.labels.iter().any(|s| s.name == *k) {
            return Err(Error::UnknownLabel((*k).to_string()));
        }
    }
    let dims: Vec<usize> = rho.labels.iter().map(|s| s.dim).collect();
    let kept: Vec<bool> = rho.labels.iter().map(|s| keep.contains(&s.name.as_str())).collect();
    let labels: Vec<Subsystem> = rho.labels.iter().zip(&kept).filter(|(_, k)| **k).map(|(s, _)| s.clone()).collect();
    let dk = total_dim(&labels).max(1);
    // (kept index, traced index) of every full index
    let split: Vec<(usize, usize)> = (0..rho.dim())
        .map(|mut idx| {
            let (mut ki, mut kscale, mut ti, mut tscale) = (0, 1, 0, 1);
            for (d, k) in dims.iter().zip(&kept).rev() {
                let digit = idx % d;
                idx /= d;
                if *k {
                    ki += digit * kscale;
                    kscale *= d;
                } else {
                    ti += digit * tscale;
                    tscale *= d;
                }
            }
            (ki, ti)
        })
        .collect();
    let mut out = DMatrix::zeros(dk, dk);
    for (a, &(ka, ta)) in split.iter().enumerate() {
        for (b, &(kb, tb)) in split.iter().enumerate() {
            if ta == tb {
                out[(ka, kb)] += rho.matrix[(a, b)];
            }
        }
    }
    if labels.is_empty() {
        return domain("nothing kept in partial trace");
    }
    Ok(DensityMatrix { matrix: out, labels })
}

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyBase {
    /// log2, so a maximally entangled qubit pair carries one unit.
    #[default]
    Bits,
    /// Natural logarithm.
    Nats,
}

impl EntropyBase {
    fn log(self, x: f64) -> f64 {
        match self {
            EntropyBase::Bits => x.log2(),
            EntropyBase::Nats => x.ln(),
        }
    }
}

fn entropy_term(p: f64, base: EntropyBase) -> f64 {
    if p <= CLAMP {
        0.0
    } else {
        -p * base.log(p)
    }
}

/// `h(x) = -x log x - (1-x) log(1-x)`.
pub fn binary_entropy(x: f64, base: EntropyBase) -> f64 {
    let x = x.clamp(0.0, 1.0);
    entropy_term(x, base) + entropy_term(1.0 - x, base)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: EntropyBase) -> f64 {
    rho.eigenvalues().into_iter().map(|p| entropy_term(p, base)).sum()
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 || rho.labels.len() != 2 || rho.labels.iter().any(|s| s.dim != 2) {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
///
/// The square roots of the eigenvalues of `rho Y rho* Y` are the singular values
/// of `V^T Y V`, where `rho = V V^dagger`; the latter avoids taking square
/// roots of tiny, noisy eigenvalues.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let eig = rho.matrix.clone().symmetric_eigen();
    let mut v = eig.eigenvectors.clone();
    for (j, p) in eig.eigenvalues.iter().enumerate() {
        let s = C64::from(p.max(0.0).sqrt());
        let col = v.column(j) * s;
        v.set_column(j, &col);
    }
    let yy = sigma_y().kronecker(&sigma_y());
    let t = v.transpose() * yy * v;
    let mut sv: Vec<f64> = t.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).max(0.0))
}

/// `h((1 + sqrt(1 - C^2)) / 2)` from the concurrence `C`.
pub fn formation_from_concurrence(c: f64, base: EntropyBase) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()), base)
}

pub fn entanglement_of_formation(rho: &DensityMatrix, base: EntropyBase) -> Result<f64> {
    Ok(formation_from_concurrence(concurrence(rho)?, base))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sigma_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `X^S ⊗ X^P + Z^S ⊗ Z^P` in the `{|0>,|1>} ⊗ {|L'>,|R'>}` basis.
///
/// `X^S`, `Z^S` are the Pauli x and z of the first qubit. `Z^P` distinguishes
/// the arms `|L>`, `|R>` before the output beam splitter; expressed in the
/// output basis via `|L> -> (|L'>+|R'>)/√2`, `|R> -> (|L'>-|R'>)/√2` it is
/// Pauli x, while `X^P`, read in the output ports, is Pauli z.
pub fn witness_operator() -> DMatrix<C64> {
    sigma_x().kronecker(&sigma_z()) + sigma_z().kronecker(&sigma_x())
}

/// `|Tr(rho (X^S ⊗ X^P + Z^S ⊗ Z^P))|`; values above 1 certify entanglement.
pub fn witness_value(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    Ok(rho.expectation(&witness_operator())?.re.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        let v = DVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        StateVector::new(v, vec![Subsystem::new("A", 2), Subsystem::new("B", 2)]).unwrap()
    }

    #[test]
    fn product_of_zeros() {
        let z = StateVector::basis("A", 2, 0).unwrap();
        let w = StateVector::basis("B", 2, 0).unwrap();
        let p = tensor_state(&[z.clone(), w]).unwrap();
        assert_eq!(p.amplitudes().as_slice(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((p.norm() - 1.0).abs() < 1e-12);
        let back = reduced_density(&p, &["A"]).unwrap();
        assert!((back.matrix() - z.to_density().matrix()).camax() < 1e-15);
    }

    #[test]
    fn bell_marginals_and_measures() {
        let b = bell();
        let a = reduced_density(&b, &["A"]).unwrap();
        let ev = a.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12);
        assert!((von_neumann_entropy(&a, EntropyBase::Bits) - 1.0).abs() < 1e-12);
        assert!((von_neumann_entropy(&a, EntropyBase::Nats) - 2f64.ln()).abs() < 1e-12);
        let rho = b.to_density();
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);
        assert!((entanglement_of_formation(&rho, EntropyBase::Bits).unwrap() - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&rho, EntropyBase::Bits).abs() < 1e-12);
    }

    #[test]
    fn entropy_values() {
        assert!((binary_entropy(0.75, EntropyBase::Bits) - 0.811_278).abs() < 1e-6);
        assert!((formation_from_concurrence(0.6, EntropyBase::Bits) - 0.468_996).abs() < 1e-6);
        assert!((binary_entropy(0.9, EntropyBase::Bits) - 0.468_996).abs() < 1e-6);
        assert_eq!(formation_from_concurrence(0.0, EntropyBase::Bits), 0.0);
        assert!((formation_from_concurrence(1.0, EntropyBase::Bits) - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0, EntropyBase::Bits), 0.0);
    }

    #[test]
    fn witness_bounds() {
        let mixed = DensityMatrix::maximally_mixed(vec![Subsystem::new("S", 2), Subsystem::new("P", 2)]).unwrap();
        assert!(witness_value(&mixed).unwrap().abs() < 1e-15);
        assert!(witness_value(&bell().to_density()).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn validation_errors() {
        let b = bell();
        assert!(matches!(reduced_density(&b, &["Z"]), Err(Error::UnknownLabel(_))));
        let q = StateVector::basis("A", 3, 0).unwrap();
        assert!(matches!(concurrence(&q.to_density()), Err(Error::DimensionMismatch { .. })));
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(DensityMatrix::new(bad, vec![Subsystem::new("A", 2)]).is_err());
        assert!(StateVector::new(DVector::zeros(2), vec![Subsystem::new("A", 2)]).is_err());
        assert!(StateVector::new(DVector::zeros(2), vec![Subsystem::new("A", 3)]).is_err());
    }
}
