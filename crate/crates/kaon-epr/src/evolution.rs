//! Channel application, projective measurement with collapse, sequential
//! joint probabilities and correlation functions.
//!
//! Every correlation quantity here is computed along two first-class
//! routes: the sequential measurement pipeline (evolve, collapse, evolve
//! the remainder, measure again) and the factorized Heisenberg form that
//! dual-evolves the observables back to the initial state. Their agreement
//! is itself part of the model's content and is cross-checked in the test
//! suites rather than one route being derived from the other.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    expectation, is_symmetric, tensor, DensityOperator, Operator, OperatorLayout,
};
use crate::kraus::{build_kraus, proper_time, two_particle_kraus};
use crate::linalg::hermitian_eigen;
use crate::observables::StatisticsMode;
use crate::params::PhysicalParams;

/// Collapsed states with probability at or below this threshold carry no
/// post-measurement state (guards the 0/0 in the state-reduction formula).
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Eigenvalues closer than this are treated as one measurement outcome.
pub const EIGENVALUE_GROUP_TOL: f64 = 1e-9;

/// Hermiticity tolerance for observables passed to measurement routines.
pub const OBSERVABLE_TOL: f64 = 1e-12;

/// Commutator tolerance for the local-observable check in identical mode.
const COMMUTATOR_TOL: f64 = 1e-10;

/// One projective measurement outcome.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub eigenvalue: f64,
    pub probability: f64,
    /// Normalized post-measurement state; absent when the probability is at
    /// or below [`PROBABILITY_FLOOR`].
    pub post_state: Option<DensityOperator>,
}

/// One correlation-function evaluation, optionally paired with a
/// closed-form value for comparison.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationResult {
    pub t_a: f64,
    pub t_b: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    pub value: f64,
    pub analytic: Option<f64>,
    pub deviation: Option<f64>,
}

impl CorrelationResult {
    pub fn with_analytic(mut self, analytic: f64) -> Self {
        self.analytic = Some(analytic);
        self.deviation = Some((self.value - analytic).abs());
        self
    }
}

/// Kraus family matching an operator layout: the one-particle family on a
/// single layout, the full product family on a pair layout.
fn kraus_family(params: &PhysicalParams, layout: &OperatorLayout, t: f64) -> Result<Vec<Operator>> {
    match layout {
        OperatorLayout::Single(space) => Ok(build_kraus(params, space, t)?.operators().to_vec()),
        OperatorLayout::Pair(pair) => {
            let left = build_kraus(params, pair.left(), t)?;
            let right = build_kraus(params, pair.right(), t)?;
            two_particle_kraus(&left, &right)
        }
    }
}

/// sum_i E_i M E_i^dagger without any density-operator bookkeeping.
fn apply_family(family: &[Operator], matrix: &Array2<Complex64>) -> Array2<Complex64> {
    let n = matrix.nrows();
    let mut out = Array2::<Complex64>::zeros((n, n));
    for e in family {
        let adj = e.adjoint();
        out = out + e.matrix().dot(matrix).dot(adj.matrix());
    }
    out
}

/// Evolve a state by laboratory time `t` under the Kraus channel matching
/// its layout (one-particle or two-particle product family).
pub fn evolve(rho: &DensityOperator, params: &PhysicalParams, t: f64) -> Result<DensityOperator> {
    let family = kraus_family(params, rho.layout(), t)?;
    let matrix = apply_family(&family, rho.matrix());
    DensityOperator::new(Operator::from_matrix(rho.layout().clone(), matrix))
}

/// Heisenberg-picture image sum_i E_i^dagger A E_i of an observable under a
/// Kraus family. Preserves Hermiticity; maps the identity to the identity
/// for a normalized family.
pub fn heisenberg_observable(observable: &Operator, family: &[Operator]) -> Result<Operator> {
    let mut out = Operator::zeros(observable.layout().clone());
    for e in family {
        if e.layout() != observable.layout() {
            return Err(Error::LayoutMismatch);
        }
        out = out.add(&e.adjoint().matmul(observable)?.matmul(e)?)?;
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian observable: (eigenvalue,
/// projector) pairs in ascending eigenvalue order, grouping eigenvalues
/// within [`EIGENVALUE_GROUP_TOL`] into one outcome.
pub fn spectral_projectors(observable: &Operator) -> Result<Vec<(f64, Operator)>> {
    let herm = observable.hermiticity_deviation();
    if herm > OBSERVABLE_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let eig = hermitian_eigen(observable.matrix());
    let n = observable.dim();
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &value) in eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some((head, members)) if (value - *head).abs() <= EIGENVALUE_GROUP_TOL => {
                members.push(k)
            }
            _ => groups.push((value, vec![k])),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (_, members) in &groups {
        let mean = members.iter().map(|&k| eig.values[k]).sum::<f64>() / members.len() as f64;
        let mut proj = Array2::<Complex64>::zeros((n, n));
        for &k in members {
            for i in 0..n {
                for j in 0..n {
                    proj[[i, j]] += eig.vectors[[i, k]] * eig.vectors[[j, k]].conj();
                }
            }
        }
        out.push((
            mean,
            Operator::from_matrix(observable.layout().clone(), proj),
        ));
    }
    Ok(out)
}

/// Projective measurement of a Hermitian observable: one outcome per
/// distinct eigenvalue with probability trace(P rho P) and, above the
/// probability floor, the normalized reduced state P rho P / p.
///
/// On an identical-particle layout the observable must commute with the
/// permutation; unsymmetrized observables are rejected.
pub fn measure(rho: &DensityOperator, observable: &Operator) -> Result<Vec<MeasurementOutcome>> {
    if rho.layout() != observable.layout() {
        return Err(Error::LayoutMismatch);
    }
    require_symmetric_in_identical_mode(observable)?;
    let mut outcomes = Vec::new();
    for (eigenvalue, projector) in spectral_projectors(observable)? {
        let reduced = projector.matmul(rho.operator())?.matmul(&projector)?;
        let probability = reduced.trace().re.max(0.0);
        let post_state = if probability > PROBABILITY_FLOOR {
            Some(DensityOperator::new(
                reduced.scale(Complex64::new(1.0 / probability, 0.0)),
            )?)
        } else {
            None
        };
        outcomes.push(MeasurementOutcome {
            eigenvalue,
            probability,
            post_state,
        });
    }
    Ok(outcomes)
}

fn require_symmetric_in_identical_mode(observable: &Operator) -> Result<()> {
    if let OperatorLayout::Pair(pair) = observable.layout() {
        if pair.is_identical() {
            let p = crate::hilbert::permutation_operator(pair)?;
            let deviation = p.matmul(observable)?.matmul(&p)?.sub(observable)?.max_abs();
            if deviation > OBSERVABLE_TOL {
                return Err(Error::NotSymmetric(deviation));
            }
        }
    }
    Ok(())
}

/// Joint probability of Alice finding her one-particle projector outcome at
/// `t_a` and Bob his at `t_b >= t_a`, via the sequential pipeline: evolve
/// the pair state to `t_a`, collapse on the first slot, evolve the
/// remainder by `t_b - t_a`, then apply Bob's projector.
pub fn joint_probability(
    rho0: &DensityOperator,
    proj_a: &Operator,
    proj_b: &Operator,
    params: &PhysicalParams,
    t_a: f64,
    t_b: f64,
) -> Result<f64> {
    if t_b < t_a {
        return Err(Error::TimeOrdering { t_a, t_b });
    }
    if t_a < 0.0 {
        return Err(Error::NegativeTime(t_a));
    }
    let pair = rho0.layout().as_pair()?;
    if proj_a.layout().as_single()? != pair.left() || proj_b.layout().as_single()? != pair.right() {
        return Err(Error::LayoutMismatch);
    }
    let id_left = Operator::identity(pair.left().clone());
    let id_right = Operator::identity(pair.right().clone());
    let alice = tensor(proj_a, &id_right)?;
    let bob = tensor(&id_left, proj_b)?;

    let rho_ta = evolve(rho0, params, t_a)?;
    let collapsed = alice.matmul(rho_ta.operator())?.matmul(&alice)?;
    let p_a = collapsed.trace().re.max(0.0);
    if p_a <= PROBABILITY_FLOOR {
        return Ok(0.0);
    }
    let rho_a = DensityOperator::new(collapsed.scale(Complex64::new(1.0 / p_a, 0.0)))?;
    let rho_ab = evolve(&rho_a, params, t_b - t_a)?;
    let p_b_given_a = bob
        .matmul(rho_ab.operator())?
        .matmul(&bob)?
        .trace()
        .re
        .max(0.0);
    Ok(p_a * p_b_given_a)
}

/// The same joint probability in the factorized Heisenberg form: both
/// one-particle projectors are dual-evolved to their own full laboratory
/// times and traced against the initial state,
/// `Tr{rho(0) [A(tau_a) (x) B(tau_b)]}`.
pub fn joint_probability_factorized(
    rho0: &DensityOperator,
    proj_a: &Operator,
    proj_b: &Operator,
    params: &PhysicalParams,
    t_a: f64,
    t_b: f64,
) -> Result<f64> {
    let pair = rho0.layout().as_pair()?;
    if proj_a.layout().as_single()? != pair.left() || proj_b.layout().as_single()? != pair.right() {
        return Err(Error::LayoutMismatch);
    }
    let family_a = build_kraus(params, pair.left(), t_a)?;
    let family_b = build_kraus(params, pair.right(), t_b)?;
    let evolved_a = heisenberg_observable(proj_a, family_a.operators())?;
    let evolved_b = heisenberg_observable(proj_b, family_b.operators())?;
    Ok(expectation(rho0, &tensor(&evolved_a, &evolved_b)?)?.re)
}

/// Correlation function of two local observables, in the Heisenberg form.
///
/// Distinguishable mode takes one-particle observables on the two factor
/// spaces and computes `Tr{rho(0) [A(tau_a) (x) B(tau_b)]}`. Identical mode
/// takes permutation-symmetric two-particle observables, dual-evolves each
/// under the full product family at its own laboratory time and computes
/// `Tr[rho(0) A(tau_a) B(tau_b)]`; the observables must commute so the
/// product is order-independent.
///
/// `momentum_a`/`momentum_b` name the momentum block each observable is
/// local to and only set the proper times reported in the result.
#[allow(clippy::too_many_arguments)]
pub fn correlation(
    rho0: &DensityOperator,
    obs_a: &Operator,
    momentum_a: &str,
    obs_b: &Operator,
    momentum_b: &str,
    params: &PhysicalParams,
    t_a: f64,
    t_b: f64,
    mode: StatisticsMode,
) -> Result<CorrelationResult> {
    let pair = rho0.layout().as_pair()?;
    let value = match mode {
        StatisticsMode::Distinguishable => {
            let family_a = build_kraus(params, pair.left(), t_a)?;
            let family_b = build_kraus(params, pair.right(), t_b)?;
            let evolved_a = heisenberg_observable(obs_a, family_a.operators())?;
            let evolved_b = heisenberg_observable(obs_b, family_b.operators())?;
            expectation(rho0, &tensor(&evolved_a, &evolved_b)?)?.re
        }
        StatisticsMode::Identical => {
            if !pair.is_identical() {
                return Err(Error::ModeMismatch(
                    "identical mode needs identical factor layouts".into(),
                ));
            }
            check_symmetric(obs_a)?;
            check_symmetric(obs_b)?;
            let commutator = obs_a.matmul(obs_b)?.sub(&obs_b.matmul(obs_a)?)?.max_abs();
            if commutator > COMMUTATOR_TOL {
                return Err(Error::NonCommuting(commutator));
            }
            let family_a = kraus_family(params, rho0.layout(), t_a)?;
            let family_b = kraus_family(params, rho0.layout(), t_b)?;
            let evolved_a = heisenberg_observable(obs_a, &family_a)?;
            let evolved_b = heisenberg_observable(obs_b, &family_b)?;
            let product = evolved_a.matmul(&evolved_b)?;
            let mut sum = Complex64::new(0.0, 0.0);
            let n = product.dim();
            for i in 0..n {
                for j in 0..n {
                    sum += rho0.matrix()[[i, j]] * product.matrix()[[j, i]];
                }
            }
            sum.re
        }
    };
    let momentum_side_a = pair.left().momentum(momentum_a)?;
    let momentum_side_b = match mode {
        StatisticsMode::Distinguishable => pair.right().momentum(momentum_b)?,
        StatisticsMode::Identical => pair.left().momentum(momentum_b)?,
    };
    Ok(CorrelationResult {
        t_a,
        t_b,
        tau_a: proper_time(t_a, momentum_side_a)?,
        tau_b: proper_time(t_b, momentum_side_b)?,
        value,
        analytic: None,
        deviation: None,
    })
}

fn check_symmetric(observable: &Operator) -> Result<()> {
    let deviation_ok = is_symmetric(observable, OBSERVABLE_TOL)?;
    if !deviation_ok {
        let pair = observable.layout().as_pair()?;
        let p = crate::hilbert::permutation_operator(pair)?;
        let deviation = p.matmul(observable)?.matmul(&p)?.sub(observable)?.max_abs();
        return Err(Error::NotSymmetric(deviation));
    }
    Ok(())
}

/// Correlation function recovered from measurement statistics, the
/// sum over outcome products a*b weighted by sequential joint
/// probabilities. Requires `t_b >= t_a` (first measurement first).
pub fn correlation_from_probabilities(
    rho0: &DensityOperator,
    obs_a: &Operator,
    obs_b: &Operator,
    params: &PhysicalParams,
    t_a: f64,
    t_b: f64,
    mode: StatisticsMode,
) -> Result<f64> {
    if t_b < t_a {
        return Err(Error::TimeOrdering { t_a, t_b });
    }
    let pair = rho0.layout().as_pair()?;
    match mode {
        StatisticsMode::Distinguishable => {
            let spectrum_a = spectral_projectors(obs_a)?;
            let spectrum_b = spectral_projectors(obs_b)?;
            let mut total = 0.0;
            for (a, proj_a) in &spectrum_a {
                if *a == 0.0 {
                    continue;
                }
                for (b, proj_b) in &spectrum_b {
                    if *b == 0.0 {
                        continue;
                    }
                    total += a * b * joint_probability(rho0, proj_a, proj_b, params, t_a, t_b)?;
                }
            }
            Ok(total)
        }
        StatisticsMode::Identical => {
            if !pair.is_identical() {
                return Err(Error::ModeMismatch(
                    "identical mode needs identical factor layouts".into(),
                ));
            }
            check_symmetric(obs_a)?;
            check_symmetric(obs_b)?;
            let rho_ta = evolve(rho0, params, t_a)?;
            let spectrum_a = spectral_projectors(obs_a)?;
            let spectrum_b = spectral_projectors(obs_b)?;
            let mut total = 0.0;
            for (a, proj_a) in &spectrum_a {
                if *a == 0.0 {
                    continue;
                }
                let collapsed = proj_a.matmul(rho_ta.operator())?.matmul(proj_a)?;
                let p_a = collapsed.trace().re.max(0.0);
                if p_a <= PROBABILITY_FLOOR {
                    continue;
                }
                let rho_a = DensityOperator::new(collapsed.scale(Complex64::new(1.0 / p_a, 0.0)))?;
                let rho_ab = evolve(&rho_a, params, t_b - t_a)?;
                for (b, proj_b) in &spectrum_b {
                    if *b == 0.0 {
                        continue;
                    }
                    let p_b = proj_b
                        .matmul(rho_ab.operator())?
                        .matmul(proj_b)?
                        .trace()
                        .re
                        .max(0.0);
                    total += a * b * p_a * p_b;
                }
            }
            Ok(total)
        }
    }
}
