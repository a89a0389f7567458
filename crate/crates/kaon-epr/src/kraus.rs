//! Kraus operators of the meson-vacuum channel in the laboratory frame.
//!
//! The one-particle family consists of the vacuum projector E0 plus five
//! operators per momentum, each evaluated at that momentum's proper time
//! tau = t / gamma. E1 keeps the particle in its flavor doublet (survival
//! with oscillation), E2 and E3 transfer it to the vacuum (decay), and E4,
//! E5 are the decoherence branch that vanishes at lambda = 0. Boosts act
//! trivially on scalar particles, so a block's matrix elements in the lab
//! frame equal the rest-frame ones at the rescaled time; no operator
//! connects distinct momenta.
//!
//! Two-particle channels for non-interacting pairs are all tensor products
//! of the one-particle families.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{tensor, Flavor, Momentum, Operator, SpaceLayout};
use crate::params::{PhysicalParams, BOUND_TOL};

/// One-particle Kraus family at a fixed laboratory time: the vacuum
/// projector followed by E1..E5 for each momentum of the layout, in layout
/// order.
#[derive(Debug, Clone)]
pub struct KrausSet {
    layout: SpaceLayout,
    lab_time: f64,
    operators: Vec<Operator>,
}

impl KrausSet {
    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn lab_time(&self) -> f64 {
        self.lab_time
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }
}

/// Proper time tau = t / sqrt(1 + |k|^2/m^2) elapsed in the rest frame of a
/// particle with laboratory momentum `k` after laboratory time `t`.
pub fn proper_time(t: f64, momentum: &Momentum) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(t / momentum.gamma())
}

/// Build the one-particle Kraus family on `layout` at laboratory time `t`.
///
/// Fails when `t` is negative or when the decay coefficient radicand drops
/// below the complete-positivity floor at any of the involved proper times.
pub fn build_kraus(params: &PhysicalParams, layout: &SpaceLayout, t: f64) -> Result<KrausSet> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let mut operators = Vec::with_capacity(1 + 5 * layout.momenta().len());

    let vacuum = Operator::basis_ketbra(layout.clone(), SpaceLayout::VACUUM, SpaceLayout::VACUUM);
    operators.push(vacuum);

    for momentum in layout.momenta() {
        let tau = proper_time(t, momentum)?;
        operators.extend(block_operators(params, layout, momentum, tau)?);
    }

    Ok(KrausSet {
        layout: layout.clone(),
        lab_time: t,
        operators,
    })
}

/// E1..E5 for one momentum block at proper time `tau`.
fn block_operators(
    params: &PhysicalParams,
    layout: &SpaceLayout,
    momentum: &Momentum,
    tau: f64,
) -> Result<[Operator; 5]> {
    let dim = layout.dim();
    let i_k0 = layout.index_of(Flavor::K0, momentum.label())?;
    let i_kb = layout.index_of(Flavor::K0Bar, momentum.label())?;
    let vac = SpaceLayout::VACUUM;

    let eps = params.epsilon();
    let one = Complex64::new(1.0, 0.0);
    let ratio_plus = (one + eps) / (one - eps);
    let ratio_minus = (one - eps) / (one + eps);
    let eps_norm = 1.0 + eps.norm_sqr();

    let gamma_s = params.gamma_s();
    let gamma_l = params.gamma_l();
    let gamma_bar = params.gamma_bar();
    let delta_m = params.delta_m();
    let delta_l = params.delta_l();
    let lambda = params.lambda();

    // E1: survival amplitudes of the short and long eigenstates. The mean
    // mass only enters as a common phase (it cancels in E rho E^dagger), so
    // it is factored out and the relative phase carries delta_m alone.
    let mean_mass_phase = Complex64::from_polar(1.0, -0.5 * (params.m_s() + params.m_l()) * tau);
    let amp_short =
        Complex64::from_polar((-0.5 * tau * (lambda + gamma_s)).exp(), 0.5 * delta_m * tau);
    let amp_long = Complex64::from_polar(
        (-0.5 * tau * (lambda + gamma_l)).exp(),
        -0.5 * delta_m * tau,
    );
    let f_plus = 0.5 * mean_mass_phase * (amp_short + amp_long);
    let f_minus = 0.5 * mean_mass_phase * (amp_short - amp_long);

    let mut e1 = Array2::<Complex64>::zeros((dim, dim));
    e1[[i_k0, i_k0]] = f_plus;
    e1[[i_kb, i_kb]] = f_plus;
    e1[[i_k0, i_kb]] = f_minus * ratio_plus;
    e1[[i_kb, i_k0]] = f_minus * ratio_minus;

    // E2: decay to vacuum, CP-even combination. The radicand is the
    // complete-positivity bound quantity; values inside [-BOUND_TOL, 0)
    // are clamped to zero as accumulated rounding.
    let radicand = params.cp_bound_radicand(tau);
    if radicand < -BOUND_TOL {
        return Err(Error::BoundViolation { tau, radicand });
    }
    let c2 = (0.5 * eps_norm).sqrt() * radicand.max(0.0).sqrt();
    let mut e2 = Array2::<Complex64>::zeros((dim, dim));
    e2[[vac, i_k0]] = c2 / (one + eps);
    e2[[vac, i_kb]] = c2 / (one - eps);

    // E3: decay to vacuum, CP-odd combination. The 1 - exp(-tau Gamma_L)
    // denominator makes tau = 0 a removable 0/0; both entries vanish like
    // sqrt(tau) there, so the exact limit is the zero operator.
    let mut e3 = Array2::<Complex64>::zeros((dim, dim));
    let depletion_l = -(-tau * gamma_l).exp_m1();
    if tau > 0.0 && depletion_l > 0.0 {
        let c3 = Complex64::new((eps_norm / (2.0 * depletion_l)).sqrt(), 0.0);
        // 1 - exp(-tau (lambda - i dm + Gamma)), cancellation-free
        let a = tau * (lambda + gamma_bar);
        let b = tau * delta_m;
        let half_sin = (0.5 * b).sin();
        let osc = Complex64::new(
            -(-a).exp_m1() + 2.0 * (-a).exp() * half_sin * half_sin,
            -(-a).exp() * b.sin(),
        );
        e3[[vac, i_k0]] = c3 * (depletion_l + delta_l * osc) / (one + eps);
        e3[[vac, i_kb]] = -c3 * (depletion_l - delta_l * osc) / (one - eps);
    }

    // E4, E5: decoherence branch, proportional to sqrt(1 - exp(-tau lambda)).
    let deco = (-(-tau * lambda).exp_m1()).max(0.0).sqrt();
    let c4 = 0.5 * (-0.5 * tau * gamma_s).exp() * deco;
    let c5 = 0.5 * (-0.5 * tau * gamma_l).exp() * deco;

    let mut e4 = Array2::<Complex64>::zeros((dim, dim));
    e4[[i_k0, i_k0]] = c4.into();
    e4[[i_kb, i_kb]] = c4.into();
    e4[[i_k0, i_kb]] = c4 * ratio_plus;
    e4[[i_kb, i_k0]] = c4 * ratio_minus;

    let mut e5 = Array2::<Complex64>::zeros((dim, dim));
    e5[[i_k0, i_k0]] = c5.into();
    e5[[i_kb, i_kb]] = c5.into();
    e5[[i_k0, i_kb]] = -c5 * ratio_plus;
    e5[[i_kb, i_k0]] = -c5 * ratio_minus;

    Ok([
        Operator::from_matrix(layout.clone(), e1),
        Operator::from_matrix(layout.clone(), e2),
        Operator::from_matrix(layout.clone(), e3),
        Operator::from_matrix(layout.clone(), e4),
        Operator::from_matrix(layout.clone(), e5),
    ])
}

/// All tensor products of two one-particle families, in a fixed order: the
/// first factor's operator index is the outer (slow) loop.
pub fn two_particle_kraus(set_a: &KrausSet, set_b: &KrausSet) -> Result<Vec<Operator>> {
    let mut family = Vec::with_capacity(set_a.operators.len() * set_b.operators.len());
    for a in &set_a.operators {
        for b in &set_b.operators {
            family.push(tensor(a, b)?);
        }
    }
    Ok(family)
}

/// Max-norm deviation of sum E^dagger E from the identity for a
/// one-particle family.
pub fn verify_normalization(set: &KrausSet) -> f64 {
    family_normalization_deviation(&set.operators).expect("KrausSet layouts are consistent")
}

/// Max-norm deviation of sum E^dagger E from the identity for any Kraus
/// family over a common layout (e.g. a two-particle product family).
pub fn family_normalization_deviation(operators: &[Operator]) -> Result<f64> {
    let first = operators.first().ok_or(Error::LayoutMismatch)?;
    let mut sum = Operator::zeros(first.layout().clone());
    for op in operators {
        sum = sum.add(&op.adjoint().matmul(op)?)?;
    }
    sum.sub(&Operator::identity(first.layout().clone()))
        .map(|d| d.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::DensityOperator;
    use crate::params::real_epsilon_for_delta_l;
    use ndarray::Array1;

    fn params(delta_l: f64, lambda: f64) -> PhysicalParams {
        PhysicalParams::new(
            1.0,
            0.002,
            0.0,
            0.47,
            Complex64::new(real_epsilon_for_delta_l(delta_l), 0.0),
            lambda,
        )
        .unwrap()
    }

    fn rest_layout() -> SpaceLayout {
        SpaceLayout::single(Momentum::at_rest("p", 1.0).unwrap())
    }

    #[test]
    fn proper_time_examples() {
        let at_rest = Momentum::at_rest("k", 7.0).unwrap();
        assert_eq!(proper_time(5.0, &at_rest).unwrap(), 5.0);

        let boosted = Momentum::new("k", 1.0, [3.0f64.sqrt(), 0.0, 0.0]).unwrap();
        assert!((proper_time(2.0, &boosted).unwrap() - 1.0).abs() < 1e-15);

        // evaluated independently: 1/sqrt(1 + 0.64/0.247009)
        let kaonish = Momentum::new("k", 0.497, [0.8, 0.0, 0.0]).unwrap();
        assert!((proper_time(1.0, &kaonish).unwrap() - 0.527_706_417_275_396_9).abs() < 1e-15);

        assert!(matches!(
            proper_time(-0.1, &at_rest),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn zero_time_channel_is_identity_on_the_particle_sector() {
        let layout = rest_layout();
        let set = build_kraus(&params(0.05, 0.3), &layout, 0.0).unwrap();
        let ops = set.operators();
        assert_eq!(ops.len(), 6);
        // E1 = identity on the flavor block
        let mut block_id = Array2::<Complex64>::zeros((3, 3));
        block_id[[1, 1]] = Complex64::new(1.0, 0.0);
        block_id[[2, 2]] = Complex64::new(1.0, 0.0);
        assert_eq!(ops[1].matrix(), &block_id);
        for e in &ops[2..] {
            assert_eq!(e.max_abs(), 0.0);
        }
        assert_eq!(verify_normalization(&set), 0.0);
    }

    #[test]
    fn normalization_holds_at_machine_precision() {
        let layout = SpaceLayout::new(vec![
            Momentum::at_rest("p", 10.0).unwrap(),
            Momentum::new("q", 10.0, [0.0, 8.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let p = PhysicalParams::new(
            1.0,
            0.0017502,
            6.769e13,
            6.769e13 + 0.4736,
            Complex64::new(1.6162e-3, 1.5336e-3),
            0.05,
        )
        .unwrap();
        for t in [0.0, 1e-9, 1e-4, 0.5, 3.0, 20.0, 300.0] {
            let set = build_kraus(&p, &layout, t).unwrap();
            assert!(verify_normalization(&set) < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn flavor_block_of_sum_cancels_without_cp_violation() {
        // With epsilon = lambda = 0 only E1..E3 contribute and the
        // off-diagonal cancels:
        // (1/2)(e^{-tau G_S} - e^{-tau G_L}) + (1/2)(1 - e^{-tau G_S})
        //   - (1/2)(1 - e^{-tau G_L}) = 0.
        let p = params(0.0, 0.0);
        let layout = rest_layout();
        let tau = 1.3;
        let set = build_kraus(&p, &layout, tau).unwrap();
        let ops = set.operators();
        let mut sum = Operator::zeros(layout.clone());
        for e in &ops[1..4] {
            sum = sum.add(&e.adjoint().matmul(e).unwrap()).unwrap();
        }
        assert_eq!(ops[4].max_abs(), 0.0);
        assert_eq!(ops[5].max_abs(), 0.0);
        assert!((sum.matrix()[[1, 1]].re - 1.0).abs() < 1e-15);
        assert!((sum.matrix()[[2, 2]].re - 1.0).abs() < 1e-15);
        assert!(sum.matrix()[[1, 2]].norm() < 1e-15);
    }

    #[test]
    fn survival_probability_matches_oscillation_formula() {
        let p = params(0.0, 0.0);
        let layout = rest_layout();
        let tau = 1.7;
        let mut psi = Array1::<Complex64>::zeros(3);
        psi[1] = Complex64::new(1.0, 0.0);
        let rho = DensityOperator::from_pure(layout.clone(), &psi).unwrap();
        let set = build_kraus(&p, &layout, tau).unwrap();
        let mut evolved = Array2::<Complex64>::zeros((3, 3));
        for e in set.operators() {
            evolved = evolved
                + e.matrix()
                    .dot(rho.matrix())
                    .dot(&e.adjoint().matrix().view());
        }
        let survival = evolved[[1, 1]].re;
        let expected = 0.25
            * ((-p.gamma_s() * tau).exp()
                + (-p.gamma_l() * tau).exp()
                + 2.0 * (-p.gamma_bar() * tau).exp() * (p.delta_m() * tau).cos());
        assert!(
            (survival - expected).abs() < 1e-14,
            "{survival} vs {expected}"
        );
        assert!((survival - 0.443_613_818_973_547_1).abs() < 1e-14);
    }

    #[test]
    fn operators_are_block_local() {
        // E1, E4, E5 stay inside one (flavor x momentum) block; E2, E3 map
        // that block to the vacuum; nothing connects distinct momenta.
        let layout = SpaceLayout::new(vec![
            Momentum::at_rest("p", 10.0).unwrap(),
            Momentum::new("q", 10.0, [0.0, 8.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let set = build_kraus(&params(0.05, 0.2), &layout, 0.8).unwrap();
        let ops = set.operators();
        for (slot, block) in [(0usize, &ops[1..6]), (1usize, &ops[6..11])] {
            let own = [1 + 2 * slot, 2 + 2 * slot];
            for (i, e) in block.iter().enumerate() {
                for r in 0..5 {
                    for c in 0..5 {
                        if e.matrix()[[r, c]].norm() == 0.0 {
                            continue;
                        }
                        if i == 1 || i == 2 {
                            // E2/E3: (flavor, k) -> vacuum
                            assert_eq!(r, 0, "op {i} row {r}");
                            assert!(own.contains(&c));
                        } else {
                            assert!(own.contains(&r), "op {i} row {r}");
                            assert!(own.contains(&c), "op {i} col {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn superselection_no_particle_vacuum_coherences_created() {
        let layout = rest_layout();
        let p = params(0.03, 0.1);
        // sector-diagonal state: mixture of vacuum and a flavor state
        let mut m = Array2::<Complex64>::zeros((3, 3));
        m[[0, 0]] = Complex64::new(0.3, 0.0);
        m[[1, 1]] = Complex64::new(0.4, 0.0);
        m[[2, 2]] = Complex64::new(0.3, 0.0);
        m[[1, 2]] = Complex64::new(0.1, 0.2);
        m[[2, 1]] = Complex64::new(0.1, -0.2);
        let set = build_kraus(&p, &layout, 1.1).unwrap();
        let mut evolved = Array2::<Complex64>::zeros((3, 3));
        for e in set.operators() {
            evolved = evolved + e.matrix().dot(&m).dot(&e.adjoint().matrix().view());
        }
        for j in 1..3 {
            assert!(evolved[[0, j]].norm() < 1e-16);
            assert!(evolved[[j, 0]].norm() < 1e-16);
        }
    }

    #[test]
    fn decay_coefficients_vanish_like_sqrt_tau_near_zero() {
        let p = params(0.05, 0.2);
        let layout = rest_layout();
        // continuity down to tiny times: E2, E3 entries scale ~ sqrt(tau)
        let mut previous = f64::INFINITY;
        for exp in [-2, -4, -6, -8, -10, -12] {
            let t = 10f64.powi(exp);
            let set = build_kraus(&p, &layout, t).unwrap();
            let size = set.operators()[2]
                .max_abs()
                .max(set.operators()[3].max_abs());
            assert!(size < previous);
            assert!(size > 0.0);
            // sqrt scaling: size(t)/sqrt(t) stays bounded near 2
            let ratio = size / t.sqrt();
            assert!(ratio < 2.0 && ratio > 0.1, "t = {t}, ratio = {ratio}");
            previous = size;
        }
        // continuity across the scale where a naive evaluation degrades
        let t0 = 1e-6 / p.gamma_l();
        let near = build_kraus(&p, &layout, t0 * (1.0 + 1e-9)).unwrap();
        let at = build_kraus(&p, &layout, t0).unwrap();
        for (a, b) in near.operators().iter().zip(at.operators()) {
            assert!(a.sub(b).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn bound_violation_is_reported_at_build_time() {
        let p = params(0.1, 0.0); // fails the radicand condition near tau = 1.67
        let layout = rest_layout();
        match build_kraus(&p, &layout, 1.67) {
            Err(Error::BoundViolation { tau, radicand }) => {
                assert!((tau - 1.67).abs() < 1e-12);
                assert!(radicand < -0.9);
            }
            other => panic!("expected bound violation, got {other:?}"),
        }
        assert!(build_kraus(&p, &layout, -1.0).is_err());
    }

    #[test]
    fn corrupted_family_fails_normalization() {
        let layout = rest_layout();
        let set = build_kraus(&params(0.05, 0.01), &layout, 1.0).unwrap();
        let mut ops = set.operators().to_vec();
        ops[2] = ops[2].scale(Complex64::new(2.0, 0.0));
        let deviation = family_normalization_deviation(&ops).unwrap();
        assert!(deviation > 0.01, "deviation {deviation}");
    }

    #[test]
    fn two_particle_family_counts_and_normalization() {
        let p = params(0.05, 0.1);
        let lay_a = SpaceLayout::single(Momentum::at_rest("p", 10.0).unwrap());
        let lay_b = SpaceLayout::single(Momentum::new("q", 10.0, [0.0, 8.0, 0.0]).unwrap());
        let set_a = build_kraus(&p, &lay_a, 0.7).unwrap();
        let set_b = build_kraus(&p, &lay_b, 0.7).unwrap();
        let family = two_particle_kraus(&set_a, &set_b).unwrap();
        assert_eq!(family.len(), 36);
        assert!(family_normalization_deviation(&family).unwrap() < 1e-13);

        // identical case: 11 x 11 operators on the 25-dimensional space
        let merged = SpaceLayout::new(vec![
            Momentum::at_rest("p", 10.0).unwrap(),
            Momentum::new("q", 10.0, [0.0, 8.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let set = build_kraus(&p, &merged, 0.7).unwrap();
        let family = two_particle_kraus(&set, &set).unwrap();
        assert_eq!(family.len(), 121);
        assert!(family_normalization_deviation(&family).unwrap() < 1e-12);

        // both factors at t = 0: the two-particle channel is the identity
        // on single-momentum factors
        let id_a = build_kraus(&p, &lay_a, 0.0).unwrap();
        let id_b = build_kraus(&p, &lay_b, 0.0).unwrap();
        let family0 = two_particle_kraus(&id_a, &id_b).unwrap();
        let nonzero: Vec<_> = family0.iter().filter(|e| e.max_abs() > 0.0).collect();
        // E0 (x) E0, E0 (x) E1, E1 (x) E0, E1 (x) E1 survive and tile the identity
        assert_eq!(nonzero.len(), 4);
        assert!(family_normalization_deviation(&family0).unwrap() == 0.0);
    }
}
