//! Closed-form correlation functions and joint probabilities of the
//! singlet pair, used as oracles for the matrix evolution.
//!
//! Each function transcribes its expression term by term with one named
//! intermediate per printed line, with no algebraic simplification, so a
//! discrepancy localizes to a single term in the tests.

use crate::error::{Error, Result};
use crate::hilbert::Flavor;
use crate::params::PhysicalParams;

/// Proper times of the two measurements.
#[derive(Debug, Clone, Copy)]
pub struct ProperTimePair {
    pub tau_a: f64,
    pub tau_b: f64,
}

impl ProperTimePair {
    pub fn new(tau_a: f64, tau_b: f64) -> Result<Self> {
        if tau_a < 0.0 {
            return Err(Error::NegativeTime(tau_a));
        }
        if tau_b < 0.0 {
            return Err(Error::NegativeTime(tau_b));
        }
        Ok(Self { tau_a, tau_b })
    }

    pub fn delta_tau(&self) -> f64 {
        self.tau_b - self.tau_a
    }
}

/// Strangeness correlation of the singlet,
///
/// `-[e^{-(G+l)(ta+tb)} cos(dm dt) - (dl^2/2)(e^{-G_S ta - G_L tb} + e^{-G_L ta - G_S tb})] / (1 - dl^2)`.
pub fn c_strangeness(params: &PhysicalParams, times: &ProperTimePair) -> f64 {
    let (tau_a, tau_b) = (times.tau_a, times.tau_b);
    let dl = params.delta_l();
    let width = params.gamma_bar() + params.lambda();

    let oscillation =
        (-width * (tau_a + tau_b)).exp() * (params.delta_m() * times.delta_tau()).cos();
    let cp_pair = 0.5
        * dl
        * dl
        * ((-params.gamma_s() * tau_a - params.gamma_l() * tau_b).exp()
            + (-params.gamma_l() * tau_a - params.gamma_s() * tau_b).exp());
    -(oscillation - cp_pair) / (1.0 - dl * dl)
}

/// Correlation of the two kaon detectors (D+, D+).
pub fn c_dplus_dplus(params: &PhysicalParams, times: &ProperTimePair) -> f64 {
    let (tau_a, tau_b) = (times.tau_a, times.tau_b);
    let dl = params.delta_l();
    let gs = params.gamma_s();
    let gl = params.gamma_l();
    let width = params.gamma_bar() + params.lambda();
    let dm = params.delta_m();

    let oscillation = (-width * (tau_a + tau_b)).exp() * (dm * times.delta_tau()).cos();
    let cross_pair = 0.5 * ((-gs * tau_a - gl * tau_b).exp() + (-gl * tau_a - gs * tau_b).exp());
    let singles =
        (-gs * tau_a).exp() + (-gs * tau_b).exp() + (-gl * tau_a).exp() + (-gl * tau_b).exp();
    let single_oscillations =
        (-width * tau_a).exp() * (dm * tau_a).cos() + (-width * tau_b).exp() * (dm * tau_b).cos();

    1.0 - (1.0 + dl) / (1.0 - dl) * (oscillation - cross_pair) - singles / (2.0 * (1.0 - dl))
        + dl / (1.0 - dl) * single_oscillations
}

/// Correlation of a kaon detector against an anti-kaon detector (D+, D-).
pub fn c_dplus_dminus(params: &PhysicalParams, times: &ProperTimePair) -> f64 {
    let (tau_a, tau_b) = (times.tau_a, times.tau_b);
    let dl = params.delta_l();
    let gs = params.gamma_s();
    let gl = params.gamma_l();
    let width = params.gamma_bar() + params.lambda();
    let dm = params.delta_m();

    let oscillation = (-width * (tau_a + tau_b)).exp() * (dm * times.delta_tau()).cos();
    let alice_singles = (-tau_a * gs).exp() + (-tau_a * gl).exp()
        - 2.0 * dl * (-tau_a * width).exp() * (dm * tau_a).cos();
    let bob_singles = (-tau_b * gs).exp()
        + (-tau_b * gl).exp()
        + 2.0 * dl * (-tau_b * width).exp() * (dm * tau_b).cos();
    let cross_pair = 0.5 * ((-tau_a * gs - tau_b * gl).exp() + (-tau_a * gl - tau_b * gs).exp());

    1.0 + oscillation - alice_singles / (2.0 * (1.0 - dl)) - bob_singles / (2.0 * (1.0 + dl))
        + cross_pair
}

/// Joint probability that the first detector registers `flavor_a` at
/// `tau_a` and the second registers `flavor_b` at `tau_b`:
///
/// `(prefactor/8) [e^{-G_S ta - G_L tb} + e^{-G_S tb - G_L ta} -/+ 2 e^{-(G+l)(ta+tb)} cos(dm dt)]`
///
/// with prefactor (1+dl)/(1-dl) for (K0, K0), its inverse for
/// (K0bar, K0bar), 1 and the + sign for the mixed pairs (which share one
/// expression).
pub fn joint_prob_analytic(
    params: &PhysicalParams,
    times: &ProperTimePair,
    flavors: (Flavor, Flavor),
) -> f64 {
    let (tau_a, tau_b) = (times.tau_a, times.tau_b);
    let dl = params.delta_l();
    let gs = params.gamma_s();
    let gl = params.gamma_l();
    let width = params.gamma_bar() + params.lambda();

    let cross_pair = (-gs * tau_a - gl * tau_b).exp() + (-gs * tau_b - gl * tau_a).exp();
    let oscillation =
        2.0 * (-width * (tau_a + tau_b)).exp() * (params.delta_m() * times.delta_tau()).cos();

    match flavors {
        (Flavor::K0, Flavor::K0) => 0.125 * (1.0 + dl) / (1.0 - dl) * (cross_pair - oscillation),
        (Flavor::K0Bar, Flavor::K0Bar) => {
            0.125 * (1.0 - dl) / (1.0 + dl) * (cross_pair - oscillation)
        }
        (Flavor::K0, Flavor::K0Bar) | (Flavor::K0Bar, Flavor::K0) => {
            0.125 * (cross_pair + oscillation)
        }
    }
}
