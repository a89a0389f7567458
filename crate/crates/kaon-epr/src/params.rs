//! Physical parameter set of the meson-vacuum evolution model.
//!
//! All widths, masses, times and the decoherence rate are dimensionless
//! numbers in one shared natural-unit system chosen by the caller; the
//! library never converts units. The shipped presets use the inverse
//! lifetime of the short-lived eigenstate as the time unit and quote the
//! eigenstate masses relative to the short-lived one (only the mass
//! difference enters the dynamics, the common offset contributes a global
//! phase that cancels).

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Radicand values above this floor count as nonnegative in the
/// complete-positivity bound check.
pub const BOUND_TOL: f64 = 1e-12;

/// Points in the log-spaced grid used by [`PhysicalParams::validate`].
const BOUND_SCAN_POINTS: usize = 100_000;

/// Decades spanned below `tau_max` by the bound-scan grid.
const BOUND_SCAN_DECADES: f64 = 8.0;

/// The six physical inputs: decay widths and masses of the short- and
/// long-lived eigenstates, the complex CP-violation parameter and the
/// decoherence rate.
///
/// Immutable after construction; the constructor enforces
/// `gamma_s > 0`, `gamma_l > 0`, `lambda >= 0` and `|epsilon| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    gamma_s: f64,
    gamma_l: f64,
    m_s: f64,
    m_l: f64,
    epsilon: Complex64,
    lambda: f64,
}

impl PhysicalParams {
    pub fn new(
        gamma_s: f64,
        gamma_l: f64,
        m_s: f64,
        m_l: f64,
        epsilon: Complex64,
        lambda: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("gamma_s", gamma_s),
            ("gamma_l", gamma_l),
            ("m_s", m_s),
            ("m_l", m_l),
            ("epsilon_re", epsilon.re),
            ("epsilon_im", epsilon.im),
            ("lambda", lambda),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if gamma_s <= 0.0 {
            return Err(Error::NonPositiveWidth(gamma_s));
        }
        if gamma_l <= 0.0 {
            return Err(Error::NonPositiveWidth(gamma_l));
        }
        if lambda < 0.0 {
            return Err(Error::NegativeLambda(lambda));
        }
        if epsilon.norm() >= 1.0 {
            // the Kraus coefficients divide by 1 +/- epsilon
            return Err(Error::EpsilonTooLarge(epsilon.norm()));
        }
        Ok(Self {
            gamma_s,
            gamma_l,
            m_s,
            m_l,
            epsilon,
            lambda,
        })
    }

    /// Parse the flat JSON parameter file
    /// `{"gamma_s": .., "gamma_l": .., "m_s": .., "m_l": .., "epsilon_re": ..,
    ///   "epsilon_im": .., "lambda": ..}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ParamsFile = serde_json::from_str(text)?;
        Self::new(
            raw.gamma_s,
            raw.gamma_l,
            raw.m_s,
            raw.m_l,
            Complex64::new(raw.epsilon_re, raw.epsilon_im),
            raw.lambda,
        )
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    pub fn m_s(&self) -> f64 {
        self.m_s
    }

    pub fn m_l(&self) -> f64 {
        self.m_l
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Mean width, (gamma_s + gamma_l)/2.
    pub fn gamma_bar(&self) -> f64 {
        0.5 * (self.gamma_s + self.gamma_l)
    }

    /// Mass splitting m_l - m_s driving flavor oscillation.
    pub fn delta_m(&self) -> f64 {
        self.m_l - self.m_s
    }

    /// CP asymmetry 2 Re(epsilon) / (1 + |epsilon|^2).
    pub fn delta_l(&self) -> f64 {
        2.0 * self.epsilon.re / (1.0 + self.epsilon.norm_sqr())
    }

    /// Radicand of the vacuum-decay Kraus coefficient at proper time `tau`:
    ///
    /// `1 - exp(-tau G_S) - dl^2 |1 - exp(-tau(G + lambda - i dm))|^2 / (1 - exp(-tau G_L))`
    ///
    /// Complete positivity of the evolution requires this to stay
    /// nonnegative. Evaluated in a cancellation-free form; the `tau -> 0`
    /// limit is 0 and is returned exactly at `tau = 0`.
    pub fn cp_bound_radicand(&self, tau: f64) -> f64 {
        let depletion_l = -(-tau * self.gamma_l).exp_m1();
        if tau <= 0.0 || depletion_l <= 0.0 {
            return 0.0;
        }
        let dl = self.delta_l();
        let a = tau * (self.gamma_bar() + self.lambda);
        let b = tau * self.delta_m();
        // |1 - e^{-a} e^{ib}|^2 = (1 - e^{-a})^2 + 4 e^{-a} sin^2(b/2)
        let half_sin = (0.5 * b).sin();
        let osc_sq = (-a).exp_m1().powi(2) + 4.0 * (-a).exp() * half_sin * half_sin;
        -(-tau * self.gamma_s).exp_m1() - dl * dl * osc_sq / depletion_l
    }

    /// Scan the complete-positivity radicand over a dense log-spaced grid of
    /// proper times in `(0, tau_max]` and report the minimum. Fails with
    /// [`Error::BoundViolation`] when the minimum drops below `-BOUND_TOL`,
    /// carrying the minimizing time.
    pub fn validate(&self, tau_max: f64) -> Result<BoundReport> {
        if !tau_max.is_finite() || tau_max <= 0.0 {
            return Err(Error::NonFinite("tau_max"));
        }
        let n = BOUND_SCAN_POINTS;
        let mut min_radicand = f64::INFINITY;
        let mut tau_at_min = tau_max;
        for i in 0..n {
            let frac = i as f64 / (n - 1) as f64;
            let tau = tau_max * 10f64.powf(-BOUND_SCAN_DECADES * (1.0 - frac));
            let r = self.cp_bound_radicand(tau);
            if r < min_radicand {
                min_radicand = r;
                tau_at_min = tau;
            }
        }
        if min_radicand < -BOUND_TOL {
            return Err(Error::BoundViolation {
                tau: tau_at_min,
                radicand: min_radicand,
            });
        }
        Ok(BoundReport {
            tau_max,
            min_radicand,
            tau_at_min,
        })
    }
}

/// Outcome of a passing complete-positivity bound scan.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub tau_max: f64,
    pub min_radicand: f64,
    pub tau_at_min: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    gamma_s: f64,
    gamma_l: f64,
    m_s: f64,
    m_l: f64,
    epsilon_re: f64,
    epsilon_im: f64,
    lambda: f64,
}

/// Real epsilon producing a given CP asymmetry: the inverse of
/// [`PhysicalParams::delta_l`] restricted to real epsilon in (-1, 1).
pub fn real_epsilon_for_delta_l(delta_l: f64) -> f64 {
    if delta_l == 0.0 {
        0.0
    } else {
        (1.0 - (1.0 - delta_l * delta_l).sqrt()) / delta_l
    }
}

/// A named parameter set together with the kinematic rest mass used to
/// convert momentum magnitudes into Lorentz factors.
///
/// Preset numbers are external data taken from standard particle-data
/// tables, rounded for readability; they are a convenience, not ground
/// truth of the model.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub params: PhysicalParams,
    /// Rest mass of the particle in the same natural units (used for
    /// kinematics only, distinct from the eigenstate mass splitting).
    pub rest_mass: f64,
}

impl Preset {
    /// Neutral-kaon-like system. Units: the K_S lifetime is the time unit,
    /// so gamma_s = 1; gamma_l = tau_S/tau_L; the mass splitting is
    /// dm * tau_S; epsilon has |epsilon| ~ 2.23e-3 at 43.5 degrees; the
    /// rest mass is m_K * tau_S / hbar.
    pub fn kaon_like() -> Self {
        Self {
            name: "kaon-like",
            params: PhysicalParams::new(
                1.0,
                1.7502e-3,
                0.0,
                0.4736,
                Complex64::new(1.6162e-3, 1.5336e-3),
                0.0,
            )
            .expect("preset values are valid"),
            rest_mass: 6.769e13,
        }
    }

    /// Neutral-B-meson-like system in units of the B0 lifetime: nearly
    /// equal widths, x_d = dm * tau_B ~ 0.77, small real epsilon, rest
    /// mass m_B * tau_B / hbar.
    pub fn b_meson_like() -> Self {
        Self {
            name: "b-meson-like",
            params: PhysicalParams::new(
                1.0005,
                0.9995,
                0.0,
                0.7694,
                Complex64::new(1.0e-3, 0.0),
                0.0,
            )
            .expect("preset values are valid"),
            rest_mass: 1.2184e13,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "kaon-like" => Some(Self::kaon_like()),
            "b-meson-like" => Some(Self::b_meson_like()),
            _ => None,
        }
    }
}
