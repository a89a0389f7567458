//! Basis layout of the one- and two-particle state spaces and the dense
//! operator algebra over them.
//!
//! A one-particle space is spanned by the vacuum followed by a
//! (flavor, momentum) pair for every momentum in the layout, in insertion
//! order: `[vacuum, (K0, q1), (K0bar, q1), (K0, q2), ...]`. Two-particle
//! spaces are tensor squares with the left factor as the slow index.

use std::fmt;

use ndarray::{linalg::kron, Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;

/// Tolerance for the Hermiticity, trace and positivity checks of density
/// operators (the eigenvalue floor is the negative of this).
pub const DENSITY_TOL: f64 = 1e-12;

/// Meson flavor; strangeness +1 for `K0`, -1 for `K0Bar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    K0,
    K0Bar,
}

impl Flavor {
    pub const BOTH: [Flavor; 2] = [Flavor::K0, Flavor::K0Bar];

    fn offset(self) -> usize {
        match self {
            Flavor::K0 => 0,
            Flavor::K0Bar => 1,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::K0 => write!(f, "K0"),
            Flavor::K0Bar => write!(f, "K0bar"),
        }
    }
}

/// A labelled momentum eigenvalue. Identity is by label: two momenta with
/// equal components but different labels occupy distinct basis slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Momentum {
    label: String,
    mass: f64,
    three_momentum: [f64; 3],
}

impl Momentum {
    pub fn new(label: impl Into<String>, mass: f64, three_momentum: [f64; 3]) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::NonPositiveMass(mass));
        }
        if three_momentum.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("three_momentum"));
        }
        Ok(Self {
            label: label.into(),
            mass,
            three_momentum,
        })
    }

    pub fn at_rest(label: impl Into<String>, mass: f64) -> Result<Self> {
        Self::new(label, mass, [0.0, 0.0, 0.0])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum_sq(&self) -> f64 {
        self.three_momentum.iter().map(|c| c * c).sum()
    }

    /// Lorentz factor sqrt(1 + |k|^2 / m^2) >= 1.
    pub fn gamma(&self) -> f64 {
        (1.0 + self.momentum_sq() / (self.mass * self.mass)).sqrt()
    }
}

/// Ordered basis of a one-particle space: the vacuum plus a flavor doublet
/// per momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceLayout {
    momenta: Vec<Momentum>,
}

impl SpaceLayout {
    pub const VACUUM: usize = 0;

    pub fn new(momenta: Vec<Momentum>) -> Result<Self> {
        if momenta.is_empty() {
            return Err(Error::EmptyMomentumSet);
        }
        for (i, m) in momenta.iter().enumerate() {
            if momenta[..i].iter().any(|other| other.label == m.label) {
                return Err(Error::DuplicateMomentum(m.label.clone()));
            }
        }
        Ok(Self { momenta })
    }

    /// Single-momentum convenience constructor.
    pub fn single(momentum: Momentum) -> Self {
        Self {
            momenta: vec![momentum],
        }
    }

    pub fn dim(&self) -> usize {
        1 + 2 * self.momenta.len()
    }

    pub fn momenta(&self) -> &[Momentum] {
        &self.momenta
    }

    pub fn momentum(&self, label: &str) -> Result<&Momentum> {
        self.momenta
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMomentum(label.to_string()))
    }

    /// Basis index of |flavor, label>.
    pub fn index_of(&self, flavor: Flavor, label: &str) -> Result<usize> {
        let slot = self
            .momenta
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMomentum(label.to_string()))?;
        Ok(1 + 2 * slot + flavor.offset())
    }
}

/// Tensor product of two one-particle layouts. The composite index is
/// `left_index * right_dim + right_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLayout {
    left: SpaceLayout,
    right: SpaceLayout,
}

impl PairLayout {
    pub fn new(left: SpaceLayout, right: SpaceLayout) -> Self {
        Self { left, right }
    }

    /// Identical-particle layout: both factors are the same space.
    pub fn identical(layout: SpaceLayout) -> Self {
        Self {
            left: layout.clone(),
            right: layout,
        }
    }

    pub fn left(&self) -> &SpaceLayout {
        &self.left
    }

    pub fn right(&self) -> &SpaceLayout {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    pub fn is_identical(&self) -> bool {
        self.left == self.right
    }

    pub fn index(&self, left: usize, right: usize) -> usize {
        left * self.right.dim() + right
    }
}

/// Layout tag carried by every operator.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorLayout {
    Single(SpaceLayout),
    Pair(PairLayout),
}

impl OperatorLayout {
    pub fn dim(&self) -> usize {
        match self {
            OperatorLayout::Single(l) => l.dim(),
            OperatorLayout::Pair(l) => l.dim(),
        }
    }

    pub fn as_single(&self) -> Result<&SpaceLayout> {
        match self {
            OperatorLayout::Single(l) => Ok(l),
            OperatorLayout::Pair(_) => Err(Error::NotOneParticle),
        }
    }

    pub fn as_pair(&self) -> Result<&PairLayout> {
        match self {
            OperatorLayout::Pair(l) => Ok(l),
            OperatorLayout::Single(_) => Err(Error::NotTwoParticle),
        }
    }
}

impl From<SpaceLayout> for OperatorLayout {
    fn from(l: SpaceLayout) -> Self {
        OperatorLayout::Single(l)
    }
}

impl From<PairLayout> for OperatorLayout {
    fn from(l: PairLayout) -> Self {
        OperatorLayout::Pair(l)
    }
}

/// Dense complex matrix over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: OperatorLayout,
    matrix: Array2<Complex64>,
}

impl Operator {
    pub fn from_matrix(layout: impl Into<OperatorLayout>, matrix: Array2<Complex64>) -> Self {
        let layout = layout.into();
        assert_eq!(
            matrix.nrows(),
            layout.dim(),
            "matrix dimension must match layout"
        );
        assert_eq!(matrix.ncols(), layout.dim(), "operator matrices are square");
        Self { layout, matrix }
    }

    pub fn zeros(layout: impl Into<OperatorLayout>) -> Self {
        let layout = layout.into();
        let d = layout.dim();
        Self {
            layout,
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(layout: impl Into<OperatorLayout>) -> Self {
        let layout = layout.into();
        let d = layout.dim();
        Self {
            layout,
            matrix: Array2::eye(d),
        }
    }

    /// |i><j| on the given layout.
    pub fn basis_ketbra(layout: impl Into<OperatorLayout>, i: usize, j: usize) -> Self {
        let mut op = Self::zeros(layout);
        op.matrix[[i, j]] = Complex64::new(1.0, 0.0);
        op
    }

    pub fn layout(&self) -> &OperatorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let matrix = self.matrix.t().mapv(|z| z.conj());
        Self {
            layout: self.layout.clone(),
            matrix,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.mapv(|z| z * factor),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum()
    }

    /// Largest entry modulus (the max norm used for all deviation checks).
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Max-norm distance from the adjoint.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

/// Kronecker product of two one-particle operators; the left operand is the
/// slow index of the composite space.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let left = a.layout.as_single()?.clone();
    let right = b.layout.as_single()?.clone();
    let matrix = kron(a.matrix(), b.matrix());
    Ok(Operator {
        layout: OperatorLayout::Pair(PairLayout::new(left, right)),
        matrix,
    })
}

/// The swap P(|s,k> (x) |s',k'>) = |s',k'> (x) |s,k> on an
/// identical-particle composite space. P is Hermitian, unitary, and its own
/// inverse.
pub fn permutation_operator(layout: &PairLayout) -> Result<Operator> {
    if !layout.is_identical() {
        return Err(Error::NonIdenticalFactors);
    }
    let d = layout.left().dim();
    let mut matrix = Array2::<Complex64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            matrix[[layout.index(j, i), layout.index(i, j)]] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(Operator {
        layout: OperatorLayout::Pair(layout.clone()),
        matrix,
    })
}

/// True iff P op P agrees with op within `tol` in the max norm.
pub fn is_symmetric(op: &Operator, tol: f64) -> Result<bool> {
    let pair = op.layout.as_pair()?;
    let p = permutation_operator(pair)?;
    let conjugated = p.matmul(op)?.matmul(&p)?;
    Ok(conjugated.sub(op)?.max_abs() <= tol)
}

/// trace(rho op). Real up to roundoff whenever `op` is Hermitian.
pub fn expectation(rho: &DensityOperator, op: &Operator) -> Result<Complex64> {
    if rho.operator().layout != op.layout {
        return Err(Error::LayoutMismatch);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let n = op.dim();
    for i in 0..n {
        for j in 0..n {
            sum += rho.operator().matrix[[i, j]] * op.matrix[[j, i]];
        }
    }
    Ok(sum)
}

/// A Hermitian, positive-semidefinite, unit-trace operator. The vacuum
/// sector absorbs decay probability, so the trace stays 1 under evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity (eigenvalue floor `-DENSITY_TOL`)
    /// and unit trace.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_deviation();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let trace = op.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} is not 1")));
        }
        let min = hermitian_eigen(op.matrix())
            .values
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { op })
    }

    /// |psi><psi| from a normalized state vector.
    pub fn from_pure(layout: impl Into<OperatorLayout>, psi: &Array1<Complex64>) -> Result<Self> {
        let layout = layout.into();
        if psi.len() != layout.dim() {
            return Err(Error::LayoutMismatch);
        }
        let d = layout.dim();
        let mut matrix = Array2::<Complex64>::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                matrix[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Self::new(Operator { layout, matrix })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        self.op.matrix()
    }

    pub fn layout(&self) -> &OperatorLayout {
        &self.op.layout
    }

    pub fn trace(&self) -> Complex64 {
        self.op.trace()
    }

    /// Smallest eigenvalue; slightly negative values within `-DENSITY_TOL`
    /// are accumulated rounding, not a physics violation.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(self.op.matrix())
            .values
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}
