//! Observables and initial states for both particle statistics.
//!
//! Strangeness has eigenvalues +1/-1 on its flavor doublet and 0 elsewhere.
//! The dichotomic detector observables answer "is there a kaon (anti-kaon)
//! with momentum k": +1 if so, -1 otherwise (vacuum included), i.e.
//! 2|f,k><f,k| - 1. For identical particles the observables must commute
//! with the permutation, which fixes the symmetrized forms below.

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{tensor, DensityOperator, Flavor, Operator, PairLayout, SpaceLayout};

/// Which detector a dichotomic observable answers for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorSign {
    /// Registers a K0 ("D+").
    Plus,
    /// Registers a K0bar ("D-").
    Minus,
}

impl DetectorSign {
    fn flavor(self) -> Flavor {
        match self {
            DetectorSign::Plus => Flavor::K0,
            DetectorSign::Minus => Flavor::K0Bar,
        }
    }
}

/// Strangeness S^k = |K0,k><K0,k| - |K0bar,k><K0bar,k|.
///
/// Spectrum: +1 and -1 once each on the k doublet, 0 on the rest of the
/// space (vacuum included).
pub fn strangeness(layout: &SpaceLayout, momentum: &str) -> Result<Operator> {
    let i_k0 = layout.index_of(Flavor::K0, momentum)?;
    let i_kb = layout.index_of(Flavor::K0Bar, momentum)?;
    let mut m = Operator::zeros(layout.clone()).matrix().clone();
    m[[i_k0, i_k0]] = Complex64::new(1.0, 0.0);
    m[[i_kb, i_kb]] = Complex64::new(-1.0, 0.0);
    Ok(Operator::from_matrix(layout.clone(), m))
}

/// Dichotomic detector observable D+/-^k = 2 |f,k><f,k| - 1 with f the
/// flavor matching the sign: +1 when the matching kaon with momentum k is
/// registered, -1 otherwise. On a single-momentum layout this is exactly
/// |K0,k><K0,k| - |K0bar,k><K0bar,k| - |0,0><0,0| (for D+); any additional
/// momentum blocks read "no such kaon" and get -1.
pub fn dichotomic(layout: &SpaceLayout, momentum: &str, sign: DetectorSign) -> Result<Operator> {
    let idx = layout.index_of(sign.flavor(), momentum)?;
    let projector = Operator::basis_ketbra(layout.clone(), idx, idx);
    projector
        .scale(Complex64::new(2.0, 0.0))
        .sub(&Operator::identity(layout.clone()))
}

/// Flavor projector |f,k><f,k| on a one-particle layout, the building block
/// of the symmetrized detector observables.
pub fn flavor_projector(layout: &SpaceLayout, flavor: Flavor, momentum: &str) -> Result<Operator> {
    let idx = layout.index_of(flavor, momentum)?;
    Ok(Operator::basis_ketbra(layout.clone(), idx, idx))
}

/// Symmetrized strangeness S^k (x) 1 + 1 (x) S^k for identical particles.
pub fn symmetrized_strangeness(layout: &PairLayout, momentum: &str) -> Result<Operator> {
    if !layout.is_identical() {
        return Err(Error::NonIdenticalFactors);
    }
    let s = strangeness(layout.left(), momentum)?;
    let id = Operator::identity(layout.left().clone());
    tensor(&s, &id)?.add(&tensor(&id, &s)?)
}

/// Symmetrized detector observable for identical particles:
///
/// `2 (P (x) 1 + 1 (x) P) - 1 (x) 1 - P (x) P`
///
/// with P the flavor projector matching the sign. Eigenvalues: +2 when both
/// particles match, +1 when exactly one does, -1 when none does. The naive
/// symmetrization of the one-particle observable has spectrum {+2, 0, -2}
/// and cannot ask the one-particle question.
pub fn symmetrized_dichotomic(
    layout: &PairLayout,
    momentum: &str,
    sign: DetectorSign,
) -> Result<Operator> {
    if !layout.is_identical() {
        return Err(Error::NonIdenticalFactors);
    }
    let proj = flavor_projector(layout.left(), sign.flavor(), momentum)?;
    let id = Operator::identity(layout.left().clone());
    let two = Complex64::new(2.0, 0.0);
    tensor(&proj, &id)?
        .add(&tensor(&id, &proj)?)?
        .scale(two)
        .sub(&tensor(&id, &id)?)?
        .sub(&tensor(&proj, &proj)?)
}

/// Statistics of the two-particle state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticsMode {
    Distinguishable,
    Identical,
}

impl fmt::Display for StatisticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticsMode::Distinguishable => write!(f, "distinguishable"),
            StatisticsMode::Identical => write!(f, "identical"),
        }
    }
}

impl FromStr for StatisticsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinguishable" => Ok(StatisticsMode::Distinguishable),
            "identical" => Ok(StatisticsMode::Identical),
            other => Err(Error::ModeMismatch(format!(
                "unknown mode `{other}` (expected `distinguishable` or `identical`)"
            ))),
        }
    }
}

/// The singlet two-meson state.
///
/// Distinguishable factors {p} (x) {q}:
/// `(|K0,p>|K0bar,q> - |K0bar,p>|K0,q|)/sqrt(2)`.
///
/// Identical factors with the merged momentum set {p, q}:
/// `(|K0,p>|K0bar,q> + |K0bar,q>|K0,p> - |K0bar,p>|K0,q> - |K0,q>|K0bar,p>)/2`,
/// which lies in the permutation-symmetric subspace (P psi = +psi) while
/// being antisymmetric under flavor exchange at fixed momenta.
pub fn singlet_state(
    layout: &PairLayout,
    mode: StatisticsMode,
    momentum_a: &str,
    momentum_b: &str,
) -> Result<DensityOperator> {
    let dim = layout.dim();
    // integer amplitudes normalized through the squared norm keep the
    // density matrix entries exact (+-1/2 and +-1/4)
    let mut psi = Array1::<Complex64>::zeros(dim);
    let one = Complex64::new(1.0, 0.0);
    match mode {
        StatisticsMode::Distinguishable => {
            let left = layout.left();
            let right = layout.right();
            let k0_a = left.index_of(Flavor::K0, momentum_a)?;
            let kb_a = left.index_of(Flavor::K0Bar, momentum_a)?;
            let k0_b = right.index_of(Flavor::K0, momentum_b)?;
            let kb_b = right.index_of(Flavor::K0Bar, momentum_b)?;
            psi[layout.index(k0_a, kb_b)] = one;
            psi[layout.index(kb_a, k0_b)] = -one;
        }
        StatisticsMode::Identical => {
            if !layout.is_identical() {
                return Err(Error::ModeMismatch(
                    "identical mode needs identical factor layouts".into(),
                ));
            }
            let space = layout.left();
            let k0_a = space.index_of(Flavor::K0, momentum_a)?;
            let kb_a = space.index_of(Flavor::K0Bar, momentum_a)?;
            let k0_b = space.index_of(Flavor::K0, momentum_b)?;
            let kb_b = space.index_of(Flavor::K0Bar, momentum_b)?;
            psi[layout.index(k0_a, kb_b)] = one;
            psi[layout.index(kb_b, k0_a)] = one;
            psi[layout.index(kb_a, k0_b)] = -one;
            psi[layout.index(k0_b, kb_a)] = -one;
        }
    }
    let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let mut matrix = ndarray::Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            matrix[[i, j]] = psi[i] * psi[j].conj() / norm_sqr;
        }
    }
    DensityOperator::new(Operator::from_matrix(layout.clone(), matrix))
}

/// Observable selector as used by the command line: "S", "D+" or "D-" with
/// an "@label" momentum suffix, e.g. "S@p" or "D-@q".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableKind {
    pub kind: ObservableClass,
    pub momentum: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableClass {
    Strangeness,
    DetectKaon,
    DetectAntikaon,
}

impl ObservableKind {
    /// One-particle operator on a distinguishable-side layout.
    pub fn build_single(&self, layout: &SpaceLayout) -> Result<Operator> {
        match self.kind {
            ObservableClass::Strangeness => strangeness(layout, &self.momentum),
            ObservableClass::DetectKaon => dichotomic(layout, &self.momentum, DetectorSign::Plus),
            ObservableClass::DetectAntikaon => {
                dichotomic(layout, &self.momentum, DetectorSign::Minus)
            }
        }
    }

    /// Symmetrized two-particle operator on an identical layout.
    pub fn build_symmetrized(&self, layout: &PairLayout) -> Result<Operator> {
        match self.kind {
            ObservableClass::Strangeness => symmetrized_strangeness(layout, &self.momentum),
            ObservableClass::DetectKaon => {
                symmetrized_dichotomic(layout, &self.momentum, DetectorSign::Plus)
            }
            ObservableClass::DetectAntikaon => {
                symmetrized_dichotomic(layout, &self.momentum, DetectorSign::Minus)
            }
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            ObservableClass::Strangeness => "S",
            ObservableClass::DetectKaon => "D+",
            ObservableClass::DetectAntikaon => "D-",
        };
        write!(f, "{name}@{}", self.momentum)
    }
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, momentum) = s.split_once('@').ok_or_else(|| {
            Error::ModeMismatch(format!("observable `{s}` must carry an @momentum suffix"))
        })?;
        let kind = match name {
            "S" => ObservableClass::Strangeness,
            "D+" => ObservableClass::DetectKaon,
            "D-" => ObservableClass::DetectAntikaon,
            other => {
                return Err(Error::ModeMismatch(format!(
                    "unknown observable `{other}` (expected S, D+ or D-)"
                )))
            }
        };
        if momentum.is_empty() {
            return Err(Error::ModeMismatch(format!(
                "observable `{s}` has an empty momentum"
            )));
        }
        Ok(Self {
            kind,
            momentum: momentum.to_string(),
        })
    }
}
