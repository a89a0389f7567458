//! Command-line front end: parameter loading, grid sweeps, CSV emission and
//! the validation suite runner.
//!
//! Sweeps are embarrassingly parallel; grid points are evaluated with rayon
//! and written in row-major order (t_a outer), so repeated runs of the same
//! configuration produce byte-identical files.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{
    c_dplus_dminus, c_dplus_dplus, c_strangeness, joint_prob_analytic, ProperTimePair,
};
use crate::error::Error;
use crate::evolution::{correlation, joint_probability, joint_probability_factorized};
use crate::hilbert::{
    expectation, permutation_operator, DensityOperator, Flavor, Momentum, Operator, PairLayout,
    SpaceLayout,
};
use crate::kraus::{
    build_kraus, family_normalization_deviation, two_particle_kraus, verify_normalization,
};
use crate::observables::{singlet_state, ObservableClass, ObservableKind, StatisticsMode};
use crate::params::{PhysicalParams, BOUND_TOL};

/// Errors surfaced to the command line, with the exit code convention:
/// 2 for configuration problems, 3 for a complete-positivity bound
/// violation, 1 is reserved for failed validation checks.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::BoundViolation { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// An inclusive `lo:hi:n` grid of laboratory times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl TimeRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for TimeRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "range `{s}` must look like lo:hi:n"
            )));
        };
        let lo: f64 = lo
            .parse()
            .map_err(|_| CliError::Config(format!("bad range start `{lo}`")))?;
        let hi: f64 = hi
            .parse()
            .map_err(|_| CliError::Config(format!("bad range end `{hi}`")))?;
        let steps: usize = steps
            .parse()
            .map_err(|_| CliError::Config(format!("bad step count `{steps}`")))?;
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi < lo {
            return Err(CliError::Config(format!(
                "range `{s}` must satisfy 0 <= lo <= hi"
            )));
        }
        if steps < 1 {
            return Err(CliError::Config("step count must be at least 1".into()));
        }
        Ok(TimeRange { lo, hi, steps })
    }
}

/// The observable pair driven over the grid. Only the three pairs with a
/// closed-form partner are accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    pub first: ObservableKind,
    pub second: ObservableKind,
}

impl ObservablePair {
    fn analytic(&self, params: &PhysicalParams, times: &ProperTimePair) -> f64 {
        match (self.first.kind, self.second.kind) {
            (ObservableClass::Strangeness, ObservableClass::Strangeness) => {
                c_strangeness(params, times)
            }
            (ObservableClass::DetectKaon, ObservableClass::DetectKaon) => {
                c_dplus_dplus(params, times)
            }
            (ObservableClass::DetectKaon, ObservableClass::DetectAntikaon) => {
                c_dplus_dminus(params, times)
            }
            _ => unreachable!("pair validated at parse time"),
        }
    }
}

impl fmt::Display for ObservablePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.first, self.second)
    }
}

impl FromStr for ObservablePair {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut parts = s.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CliError::Config(format!(
                "observables `{s}` must be two space-separated entries like \"S@p S@q\""
            )));
        };
        let first: ObservableKind = a.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let second: ObservableKind = b.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        if first.momentum != "p" || second.momentum != "q" {
            return Err(CliError::Config(
                "the first observable must act at @p and the second at @q".into(),
            ));
        }
        let supported = matches!(
            (first.kind, second.kind),
            (ObservableClass::Strangeness, ObservableClass::Strangeness)
                | (ObservableClass::DetectKaon, ObservableClass::DetectKaon)
                | (ObservableClass::DetectKaon, ObservableClass::DetectAntikaon)
        );
        if !supported {
            return Err(CliError::Config(format!(
                "unsupported observable pair `{s}`; use \"S@p S@q\", \"D+@p D+@q\" or \"D+@p D-@q\""
            )));
        }
        Ok(ObservablePair { first, second })
    }
}

/// Everything one sweep needs.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub params: PhysicalParams,
    /// Kinematic rest mass converting |p| into a Lorentz factor.
    pub rest_mass: f64,
    pub observables: ObservablePair,
    pub mode: StatisticsMode,
    pub ta_range: TimeRange,
    pub tb_range: TimeRange,
    pub p_mom: f64,
    pub q_mom: f64,
}

struct Stage {
    rho0: DensityOperator,
    obs_a: Operator,
    obs_b: Operator,
}

impl SweepConfig {
    fn momenta(&self) -> Result<(Momentum, Momentum), CliError> {
        let p = Momentum::new("p", self.rest_mass, [self.p_mom, 0.0, 0.0])
            .map_err(|e| CliError::Config(e.to_string()))?;
        let q = Momentum::new("q", self.rest_mass, [self.q_mom, 0.0, 0.0])
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok((p, q))
    }

    fn stage(&self) -> Result<Stage, CliError> {
        let (p, q) = self.momenta()?;
        match self.mode {
            StatisticsMode::Distinguishable => {
                let left = SpaceLayout::single(p);
                let right = SpaceLayout::single(q);
                let layout = PairLayout::new(left.clone(), right.clone());
                let rho0 = singlet_state(&layout, self.mode, "p", "q")?;
                let obs_a = self.observables.first.build_single(&left)?;
                let obs_b = self.observables.second.build_single(&right)?;
                Ok(Stage { rho0, obs_a, obs_b })
            }
            StatisticsMode::Identical => {
                let space = SpaceLayout::new(vec![p, q]).map_err(CliError::Core)?;
                let layout = PairLayout::identical(space);
                let rho0 = singlet_state(&layout, self.mode, "p", "q")?;
                let obs_a = self.observables.first.build_symmetrized(&layout)?;
                let obs_b = self.observables.second.build_symmetrized(&layout)?;
                Ok(Stage { rho0, obs_a, obs_b })
            }
        }
    }

    /// Reject configurations whose time grid hits the positivity bound, so
    /// the failure is a single diagnostic instead of a mid-sweep error.
    fn check_bound(&self) -> Result<(), CliError> {
        let tau_max = (self.ta_range.hi.max(self.tb_range.hi)).max(1e-6);
        self.params.validate(tau_max).map_err(CliError::from)?;
        Ok(())
    }
}

/// Correlation sweep: one CSV row per grid point, row-major with t_a outer.
pub fn cmd_correlate(config: &SweepConfig, out: &mut dyn Write) -> Result<(), CliError> {
    config.check_bound()?;
    let stage = config.stage()?;
    let ta_points = config.ta_range.points();
    let tb_points = config.tb_range.points();

    let grid: Vec<(f64, f64)> = ta_points
        .iter()
        .flat_map(|&ta| tb_points.iter().map(move |&tb| (ta, tb)))
        .collect();

    let rows: Vec<Result<String, CliError>> = grid
        .par_iter()
        .map(|&(t_a, t_b)| {
            let result = correlation(
                &stage.rho0,
                &stage.obs_a,
                "p",
                &stage.obs_b,
                "q",
                &config.params,
                t_a,
                t_b,
                config.mode,
            )?;
            let times = ProperTimePair::new(result.tau_a, result.tau_b)?;
            let analytic = config.observables.analytic(&config.params, &times);
            let result = result.with_analytic(analytic);
            Ok(format!(
                "{},{},{},{},{},{},{},{},{}",
                result.t_a,
                result.t_b,
                result.tau_a,
                result.tau_b,
                config.mode,
                config.observables,
                result.value,
                analytic,
                result.deviation.unwrap_or(0.0),
            ))
        })
        .collect();

    writeln!(
        out,
        "t_a,t_b,tau_a,tau_b,mode,observable,value,analytic,abs_diff"
    )?;
    for row in rows {
        writeln!(out, "{}", row?)?;
    }
    Ok(())
}

const FLAVOR_PAIRS: [(Flavor, Flavor, &str); 4] = [
    (Flavor::K0, Flavor::K0, "K0-K0"),
    (Flavor::K0, Flavor::K0Bar, "K0-K0bar"),
    (Flavor::K0Bar, Flavor::K0, "K0bar-K0"),
    (Flavor::K0Bar, Flavor::K0Bar, "K0bar-K0bar"),
];

/// Flavor joint-probability sweep over the distinguishable singlet: four
/// rows (one per ordered flavor pair) per grid point, comparing the
/// sequential pipeline against the closed forms.
pub fn cmd_probabilities(config: &SweepConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if config.mode != StatisticsMode::Distinguishable {
        return Err(CliError::Config(
            "probabilities are defined for the distinguishable singlet; use --mode distinguishable"
                .into(),
        ));
    }
    config.check_bound()?;
    let (p, q) = config.momenta()?;
    let gamma_p = p.gamma();
    let gamma_q = q.gamma();
    let left = SpaceLayout::single(p);
    let right = SpaceLayout::single(q);
    let layout = PairLayout::new(left.clone(), right.clone());
    let rho0 = singlet_state(&layout, StatisticsMode::Distinguishable, "p", "q")?;
    // mirrored system for grid points where Bob measures first
    let mirrored_layout = PairLayout::new(right.clone(), left.clone());
    let rho0_mirrored = singlet_state(&mirrored_layout, StatisticsMode::Distinguishable, "q", "p")?;

    let projector =
        |layout: &SpaceLayout, flavor: Flavor, label: &str| -> Result<Operator, CliError> {
            let idx = layout.index_of(flavor, label).map_err(CliError::Core)?;
            Ok(Operator::basis_ketbra(layout.clone(), idx, idx))
        };

    let ta_points = config.ta_range.points();
    let tb_points = config.tb_range.points();
    let grid: Vec<(f64, f64)> = ta_points
        .iter()
        .flat_map(|&ta| tb_points.iter().map(move |&tb| (ta, tb)))
        .collect();

    let rows: Vec<Result<Vec<String>, CliError>> = grid
        .par_iter()
        .map(|&(t_a, t_b)| {
            let mut chunk = Vec::with_capacity(FLAVOR_PAIRS.len());
            for (flavor_a, flavor_b, label) in FLAVOR_PAIRS {
                let pipeline = if t_b >= t_a {
                    let proj_a = projector(&left, flavor_a, "p")?;
                    let proj_b = projector(&right, flavor_b, "q")?;
                    joint_probability(&rho0, &proj_a, &proj_b, &config.params, t_a, t_b)?
                } else {
                    // Bob first: same physical quantity on the mirrored pair
                    let proj_b = projector(&right, flavor_b, "q")?;
                    let proj_a = projector(&left, flavor_a, "p")?;
                    joint_probability(&rho0_mirrored, &proj_b, &proj_a, &config.params, t_b, t_a)?
                };
                let times = ProperTimePair::new(t_a / gamma_p, t_b / gamma_q)?;
                let analytic = joint_prob_analytic(&config.params, &times, (flavor_a, flavor_b));
                chunk.push(format!(
                    "{},{},{},{},{},{}",
                    t_a,
                    t_b,
                    label,
                    pipeline,
                    analytic,
                    (pipeline - analytic).abs(),
                ));
            }
            Ok(chunk)
        })
        .collect();

    writeln!(out, "t_a,t_b,pair,pipeline,analytic,abs_diff")?;
    for chunk in rows {
        for row in chunk? {
            writeln!(out, "{row}")?;
        }
    }
    Ok(())
}

/// One validation check: a name, the worst deviation observed and the
/// tolerance it is held to.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    fn push(&mut self, name: &str, deviation: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            deviation,
            tolerance,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{:<52} max deviation {:>12.3e}  tolerance {:>8.1e}  {}",
                check.name,
                check.deviation,
                check.tolerance,
                if check.passed() { "ok" } else { "FAILED" }
            )?;
        }
        Ok(())
    }
}

/// Run the full invariant suite for a parameter set: the positivity bound,
/// Kraus normalization, semigroup composition, state health, permutation
/// symmetry, the pipeline/factorized cross-check and the closed-form
/// comparisons.
pub fn cmd_validate(
    params: &PhysicalParams,
    rest_mass: f64,
    p_mom: f64,
    q_mom: f64,
) -> Result<ValidationReport, CliError> {
    let mut report = ValidationReport::default();
    let tau_max = 20.0 / params.gamma_l();

    // positivity bound scan
    match params.validate(tau_max) {
        Ok(scan) => report.push(
            "complete-positivity bound (decay radicand)",
            (-scan.min_radicand).max(0.0),
            BOUND_TOL,
        ),
        Err(Error::BoundViolation { tau, radicand }) => {
            report.push(
                &format!("complete-positivity bound (radicand at tau = {tau:.6e})"),
                -radicand,
                BOUND_TOL,
            );
            // the remaining suites would all fail at build_kraus; report
            // the single root cause instead
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    }

    let p = Momentum::new("p", rest_mass, [p_mom, 0.0, 0.0]).map_err(CliError::Core)?;
    let q = Momentum::new("q", rest_mass, [q_mom, 0.0, 0.0]).map_err(CliError::Core)?;
    let single_p = SpaceLayout::single(p.clone());
    let single_q = SpaceLayout::single(q.clone());
    let merged = SpaceLayout::new(vec![p, q]).map_err(CliError::Core)?;
    let times: Vec<f64> = (0..25).map(|i| tau_max * i as f64 / 24.0).collect();

    // one-particle normalization on single and merged layouts
    let mut worst = 0.0f64;
    for layout in [&single_p, &merged] {
        for &t in &times {
            worst = worst.max(verify_normalization(&build_kraus(params, layout, t)?));
        }
    }
    report.push("one-particle Kraus normalization", worst, 1e-12);

    // two-particle product family normalization
    let mut worst = 0.0f64;
    for &t in &[0.0, 0.3 * tau_max, tau_max] {
        let set_a = build_kraus(params, &single_p, t)?;
        let set_b = build_kraus(params, &single_q, t)?;
        worst = worst.max(family_normalization_deviation(&two_particle_kraus(
            &set_a, &set_b,
        )?)?);
        let set = build_kraus(params, &merged, t)?;
        worst = worst.max(family_normalization_deviation(&two_particle_kraus(
            &set, &set,
        )?)?);
    }
    report.push("two-particle Kraus normalization", worst, 1e-12);

    // deterministic family of probe states
    let dist_layout = PairLayout::new(single_p.clone(), single_q.clone());
    let rho_dist = singlet_state(&dist_layout, StatisticsMode::Distinguishable, "p", "q")?;
    let ident_layout = PairLayout::identical(merged.clone());
    let rho_ident = singlet_state(&ident_layout, StatisticsMode::Identical, "p", "q")?;

    // semigroup composition on the distinguishable singlet
    let mut worst = 0.0f64;
    for &(t1, t2) in &[(0.1, 0.2), (0.5, 1.5), (2.0, 0.7), (0.0, 1.0)] {
        let direct = crate::evolution::evolve(&rho_dist, params, t1 + t2)?;
        let stepped = crate::evolution::evolve(
            &crate::evolution::evolve(&rho_dist, params, t1)?,
            params,
            t2,
        )?;
        worst = worst.max(direct.operator().sub(stepped.operator())?.max_abs());
    }
    report.push("semigroup composition", worst, 1e-10);

    // evolved-state health on both statistics
    let mut worst = 0.0f64;
    for &t in &[0.0, 0.4, 1.7, 6.0] {
        for rho in [&rho_dist, &rho_ident] {
            let evolved = crate::evolution::evolve(rho, params, t)?;
            worst = worst
                .max(evolved.operator().hermiticity_deviation())
                .max((-evolved.min_eigenvalue()).max(0.0))
                .max((evolved.trace().re - 1.0).abs())
                .max(evolved.trace().im.abs());
        }
    }
    report.push(
        "evolved states Hermitian, positive, unit trace",
        worst,
        1e-12,
    );

    // permutation symmetry of evolved identical states
    let perm = permutation_operator(&ident_layout).map_err(CliError::Core)?;
    let mut worst = 0.0f64;
    for &t in &[0.0, 0.4, 1.7, 6.0] {
        let evolved = crate::evolution::evolve(&rho_ident, params, t)?;
        let conjugated = perm.matmul(evolved.operator())?.matmul(&perm)?;
        worst = worst.max(conjugated.sub(evolved.operator())?.max_abs());
    }
    report.push(
        "permutation symmetry of evolved identical states",
        worst,
        1e-12,
    );

    // sequential pipeline vs factorized joint probabilities
    let mut worst = 0.0f64;
    for (flavor_a, flavor_b, _) in FLAVOR_PAIRS {
        let ia = single_p.index_of(flavor_a, "p").map_err(CliError::Core)?;
        let ib = single_q.index_of(flavor_b, "q").map_err(CliError::Core)?;
        let proj_a = Operator::basis_ketbra(single_p.clone(), ia, ia);
        let proj_b = Operator::basis_ketbra(single_q.clone(), ib, ib);
        for &(t_a, t_b) in &[(0.0, 0.0), (0.4, 0.4), (0.3, 1.9), (1.0, 4.0)] {
            let pipeline = joint_probability(&rho_dist, &proj_a, &proj_b, params, t_a, t_b)?;
            let factorized =
                joint_probability_factorized(&rho_dist, &proj_a, &proj_b, params, t_a, t_b)?;
            worst = worst.max((pipeline - factorized).abs());
        }
    }
    report.push(
        "sequential pipeline vs factorized joint probability",
        worst,
        1e-12,
    );

    // matrix evolution vs closed forms, all three observable pairs
    let gamma_p = single_p.momentum("p").map_err(CliError::Core)?.gamma();
    let gamma_q = single_q.momentum("q").map_err(CliError::Core)?.gamma();
    let mut worst = 0.0f64;
    for pair_text in ["S@p S@q", "D+@p D+@q", "D+@p D-@q"] {
        let pair: ObservablePair = pair_text.parse()?;
        let obs_a = pair.first.build_single(&single_p)?;
        let obs_b = pair.second.build_single(&single_q)?;
        for &(t_a, t_b) in &[(0.0, 0.0), (0.5, 0.5), (0.4, 2.0), (3.0, 1.0)] {
            let result = correlation(
                &rho_dist,
                &obs_a,
                "p",
                &obs_b,
                "q",
                params,
                t_a,
                t_b,
                StatisticsMode::Distinguishable,
            )?;
            let times = ProperTimePair::new(t_a / gamma_p, t_b / gamma_q)?;
            worst = worst.max((result.value - pair.analytic(params, &times)).abs());
        }
    }
    report.push("matrix evolution vs closed-form correlations", worst, 1e-9);

    // identical vs distinguishable statistics
    let mut worst = 0.0f64;
    for pair_text in ["S@p S@q", "D+@p D+@q", "D+@p D-@q"] {
        let pair: ObservablePair = pair_text.parse()?;
        let dist_a = pair.first.build_single(&single_p)?;
        let dist_b = pair.second.build_single(&single_q)?;
        let ident_a = pair.first.build_symmetrized(&ident_layout)?;
        let ident_b = pair.second.build_symmetrized(&ident_layout)?;
        for &(t_a, t_b) in &[(0.0, 0.0), (0.6, 1.2), (2.0, 0.5)] {
            let dist = correlation(
                &rho_dist,
                &dist_a,
                "p",
                &dist_b,
                "q",
                params,
                t_a,
                t_b,
                StatisticsMode::Distinguishable,
            )?;
            let ident = correlation(
                &rho_ident,
                &ident_a,
                "p",
                &ident_b,
                "q",
                params,
                t_a,
                t_b,
                StatisticsMode::Identical,
            )?;
            worst = worst.max((dist.value - ident.value).abs());
        }
    }
    report.push("identical vs distinguishable correlations", worst, 1e-10);

    // probability interpretation sanity: expectation of the identity
    let id = Operator::identity(dist_layout.clone());
    let unit = (expectation(&rho_dist, &id)?.re - 1.0).abs();
    report.push("singlet normalization", unit, 1e-12);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn time_ranges_parse_and_enumerate() {
        let range: TimeRange = "0:10:5".parse().unwrap();
        assert_eq!(range.points(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        let single: TimeRange = "3.5:3.5:1".parse().unwrap();
        assert_eq!(single.points(), vec![3.5]);
        assert!("1:0:5".parse::<TimeRange>().is_err());
        assert!("-1:2:3".parse::<TimeRange>().is_err());
        assert!("0:1:0".parse::<TimeRange>().is_err());
        assert!("0:1".parse::<TimeRange>().is_err());
        assert!("a:1:2".parse::<TimeRange>().is_err());
    }

    #[test]
    fn observable_pairs_parse_with_momentum_roles() {
        for good in ["S@p S@q", "D+@p D+@q", "D+@p D-@q"] {
            let pair: ObservablePair = good.parse().unwrap();
            assert_eq!(pair.to_string(), good);
        }
        assert!("S@q S@p".parse::<ObservablePair>().is_err());
        assert!("S@p D+@q".parse::<ObservablePair>().is_err());
        assert!("D-@p D-@q".parse::<ObservablePair>().is_err());
        assert!("S@p".parse::<ObservablePair>().is_err());
        assert!("S@p S@q S@p".parse::<ObservablePair>().is_err());
    }

    #[test]
    fn correlate_writes_deterministic_csv() {
        let preset = Preset::kaon_like();
        let config = SweepConfig {
            params: preset.params,
            rest_mass: preset.rest_mass,
            observables: "S@p S@q".parse().unwrap(),
            mode: StatisticsMode::Distinguishable,
            ta_range: "0:2:3".parse().unwrap(),
            tb_range: "0:2:3".parse().unwrap(),
            p_mom: 0.0,
            q_mom: 0.0,
        };
        let mut first = Vec::new();
        cmd_correlate(&config, &mut first).unwrap();
        let mut second = Vec::new();
        cmd_correlate(&config, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_a,t_b,tau_a,tau_b,mode,observable,value,analytic,abs_diff"
        );
        assert_eq!(lines.count(), 9);
    }

    #[test]
    fn single_point_sweep_reproduces_the_singlet_anticorrelation() {
        let params = PhysicalParams::new(
            1.0,
            0.002,
            0.0,
            0.47,
            num_complex::Complex64::new(0.0, 0.0),
            0.0,
        )
        .unwrap();
        let config = SweepConfig {
            params,
            rest_mass: 0.5,
            observables: "S@p S@q".parse().unwrap(),
            mode: StatisticsMode::Distinguishable,
            ta_range: "0:0:1".parse().unwrap(),
            tb_range: "0:0:1".parse().unwrap(),
            p_mom: 0.0,
            q_mom: 0.0,
        };
        let mut out = Vec::new();
        cmd_correlate(&config, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, "0,0,0,0,distinguishable,S@p S@q,-1,-1,0");
    }

    #[test]
    fn probabilities_reject_identical_mode() {
        let preset = Preset::kaon_like();
        let config = SweepConfig {
            params: preset.params,
            rest_mass: preset.rest_mass,
            observables: "S@p S@q".parse().unwrap(),
            mode: StatisticsMode::Identical,
            ta_range: "0:1:2".parse().unwrap(),
            tb_range: "0:1:2".parse().unwrap(),
            p_mom: 0.0,
            q_mom: 0.0,
        };
        let mut out = Vec::new();
        let err = cmd_probabilities(&config, &mut out).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bound_violation_maps_to_exit_code_3() {
        let params = PhysicalParams::new(
            1.0,
            0.002,
            0.0,
            0.47,
            num_complex::Complex64::new(crate::params::real_epsilon_for_delta_l(0.1), 0.0),
            0.0,
        )
        .unwrap();
        let config = SweepConfig {
            params,
            rest_mass: 0.5,
            observables: "S@p S@q".parse().unwrap(),
            mode: StatisticsMode::Distinguishable,
            ta_range: "0:5:3".parse().unwrap(),
            tb_range: "0:5:3".parse().unwrap(),
            p_mom: 0.0,
            q_mom: 0.0,
        };
        let mut out = Vec::new();
        let err = cmd_correlate(&config, &mut out).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let text = err.to_string();
        assert!(
            text.contains("tau"),
            "diagnostic should name the minimizing tau: {text}"
        );
    }

    #[test]
    fn validate_passes_for_presets() {
        for preset in [Preset::kaon_like(), Preset::b_meson_like()] {
            let report = cmd_validate(&preset.params, preset.rest_mass, 0.0, 0.0).unwrap();
            assert!(report.all_passed(), "{}:\n{report}", preset.name);
        }
    }

    #[test]
    fn validate_reports_bound_violation_as_failure() {
        let params = PhysicalParams::new(
            1.0,
            0.002,
            0.0,
            0.47,
            num_complex::Complex64::new(crate::params::real_epsilon_for_delta_l(0.1), 0.0),
            0.0,
        )
        .unwrap();
        let report = cmd_validate(&params, 0.5, 0.0, 0.0).unwrap();
        assert!(!report.all_passed());
        assert!(report.checks[0].name.contains("tau ="));
    }
}
