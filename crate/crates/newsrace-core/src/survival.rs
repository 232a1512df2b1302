//! Numerical form of the analytical survival criteria.
//!
//! * `rho = inf_{s >= 0} psi(s)` against `1/nu` decides weak survival.
//! * The Malthusian rates `lambda` (roots of `E[exp(-lambda L)] = 1/nu`)
//!   decide strong survival on the graph; the plain mean comparison decides
//!   it on the tree.
//! * The stable-age quantities (`nu_bar`, `E[Lbar_correct]`, the lifetime
//!   profile `H`, and the non-blocking probability `p*`) describe the race
//!   along the growing front of the fake-news process.

use alloc::vec::Vec;

use libm::{exp, log};

use crate::numeric::{binomial_stderr, bisect_decreasing, golden_min, integrate_unit_checked};
use crate::rng::Stream;
use crate::traversal::{JointTraversalModel, Marginal};

/// Quadrature tolerance for the lifetime profile.
const H_QUAD_TOL: f64 = 1e-11;

/// Location of the infimum of `psi` over `s >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoStatus {
    /// Interior critical point: `rho = psi(h)`.
    InteriorMin { h: f64, rho: f64 },
    /// `E[L_correct] > E[L_fake]`: mean dominance applies and `rho` is not
    /// needed.
    DriftPositive,
    /// `psi(s) = +inf` for every `s > 0`.
    DivergentAll,
    /// `psi` is finite on part of `(0, s_max)` but still decreasing at the
    /// abscissa: no interior critical point, the classification is open.
    BoundaryNotCovered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoResult {
    pub status: RhoStatus,
    /// Abscissa of convergence of `psi` on `s > 0` (from the correct-news
    /// marginal family).
    pub s_max: f64,
    /// Set when a convention is worth flagging (currently the equal-means
    /// corner where the infimum sits exactly at `s = 0`).
    pub note: Option<&'static str>,
}

impl RhoResult {
    pub fn h(&self) -> Option<f64> {
        match self.status {
            RhoStatus::InteriorMin { h, .. } => Some(h),
            _ => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self.status {
            RhoStatus::InteriorMin { rho, .. } => Some(rho),
            _ => None,
        }
    }
}

const EQUAL_MEANS_NOTE: &str =
    "equal means: infimum of psi attained at s = 0 with value exactly 1";

/// Locates `rho = inf_{s >= 0} psi(s)` for a feasible model.
///
/// Decision order: positive drift short-circuits; a vanishing abscissa means
/// `psi` diverges on all of `s > 0`; equal means put the critical point at
/// `s = 0` with `rho = 1`; otherwise the convex `psi` is minimized by golden
/// section on `(0, s_max)`. A minimizer pressed against a finite abscissa
/// with `psi` still decreasing is reported as not covered.
pub fn solve_rho(model: &JointTraversalModel, tol: f64) -> RhoResult {
    let mean_fake = model.fake().mean();
    let mean_correct = model.correct().mean();
    let s_max = model.correct().exp_abscissa();

    if mean_correct > mean_fake {
        return RhoResult {
            status: RhoStatus::DriftPositive,
            s_max,
            note: None,
        };
    }
    if s_max == 0.0 {
        return RhoResult {
            status: RhoStatus::DivergentAll,
            s_max,
            note: None,
        };
    }
    if mean_correct == mean_fake {
        return RhoResult {
            status: RhoStatus::InteriorMin { h: 0.0, rho: 1.0 },
            s_max,
            note: Some(EQUAL_MEANS_NOTE),
        };
    }

    let psi = |s: f64| model.psi(s);
    let hi = if s_max.is_finite() {
        let hi = s_max * (1.0 - 1e-9);
        // Still decreasing entering the abscissa: no interior critical point.
        if psi(hi) < psi(hi * (1.0 - 1e-6)) {
            return RhoResult {
                status: RhoStatus::BoundaryNotCovered,
                s_max,
                note: None,
            };
        }
        hi
    } else {
        // Feasibility guarantees psi eventually increases; double to bracket.
        let mut hi = 1.0;
        loop {
            if psi(hi) >= psi(hi * 0.5) {
                break hi;
            }
            hi *= 2.0;
            if hi > 1e12 {
                return RhoResult {
                    status: RhoStatus::BoundaryNotCovered,
                    s_max,
                    note: None,
                };
            }
        }
    };

    let h = golden_min(psi, 0.0, hi, tol);
    let rho = psi(h);
    RhoResult {
        status: RhoStatus::InteriorMin { h, rho },
        s_max,
        note: None,
    }
}

/// The Malthusian equation has no positive root.
#[derive(Debug, Clone, PartialEq)]
pub struct NoRoot {
    pub mass_at_zero: f64,
    pub inv_nu: f64,
}

impl core::fmt::Display for NoRoot {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "E[exp(-s L)] = {} has no positive root (mass at zero {})",
            self.inv_nu, self.mass_at_zero
        )
    }
}

impl core::error::Error for NoRoot {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalthusReport {
    pub lambda: f64,
    /// `|E[exp(-lambda L)] - 1/nu|` at the returned root.
    pub residual: f64,
}

/// Solves `E[exp(-lambda L)] = 1/nu` for the unique positive root.
///
/// The left side decreases strictly from 1 to the mass at zero, so a root
/// exists iff `nu > 1` is finite and `P(L = 0) < 1/nu`; bisection then
/// converges to floating point resolution and `residual <= tol` is recorded.
pub fn solve_malthusian(m: &Marginal, nu: f64, tol: f64) -> Result<MalthusReport, NoRoot> {
    let mass = m.mass_at_zero();
    if !nu.is_finite() || nu <= 1.0 || mass >= 1.0 / nu {
        return Err(NoRoot {
            mass_at_zero: mass,
            inv_nu: if nu.is_finite() { 1.0 / nu } else { 0.0 },
        });
    }
    let target = 1.0 / nu;
    let g = |lambda: f64| m.mgf(-lambda) - target;
    let lambda = bisect_decreasing(g, 0.0, 1.0).ok_or(NoRoot {
        mass_at_zero: mass,
        inv_nu: target,
    })?;
    let residual = (m.mgf(-lambda) - target).abs();
    debug_assert!(residual <= tol.max(1e-9), "bisection residual {residual}");
    let _ = tol;
    Ok(MalthusReport { lambda, residual })
}

/// Which clause of the weak-survival classification fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakCase {
    /// `E[L_correct] > E[L_fake]`.
    MeanDominance,
    /// Interior `rho` compared against `1/nu`.
    RhoThreshold,
    /// `psi` divergent on all of `s > 0` (heavy-tailed correct news).
    HeavyTail,
    /// `nu = inf`: any positive `rho` clears the threshold.
    InfiniteNu,
}

impl WeakCase {
    pub fn label(&self) -> &'static str {
        match self {
            WeakCase::MeanDominance => "i",
            WeakCase::RhoThreshold => "ii",
            WeakCase::HeavyTail => "iii",
            WeakCase::InfiniteNu => "infinite-nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakOutcome {
    Survives(WeakCase),
    /// Only the `rho <= 1/nu` branch can rule out weak survival.
    Dies,
    /// The pathological uncovered scenario.
    NotCovered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakVerdict {
    pub outcome: WeakOutcome,
    pub mean_fake: f64,
    pub mean_correct: f64,
    pub rho: Option<f64>,
    pub h: Option<f64>,
    pub inv_nu: f64,
    pub note: Option<&'static str>,
}

/// Weak-survival classification for a feasible model on a structure with
/// mean forward branching `nu > 1` (`nu` may be `+inf`).
pub fn classify_weak(model: &JointTraversalModel, nu: f64, tol: f64) -> WeakVerdict {
    assert!(nu > 1.0, "weak classification requires nu > 1");
    let mean_fake = model.fake().mean();
    let mean_correct = model.correct().mean();
    let inv_nu = if nu.is_finite() { 1.0 / nu } else { 0.0 };

    if mean_correct > mean_fake {
        return WeakVerdict {
            outcome: WeakOutcome::Survives(WeakCase::MeanDominance),
            mean_fake,
            mean_correct,
            rho: None,
            h: None,
            inv_nu,
            note: None,
        };
    }

    let rho_res = solve_rho(model, tol);
    let (outcome, rho, h) = match rho_res.status {
        RhoStatus::DriftPositive => unreachable!("drift handled above"),
        RhoStatus::DivergentAll => (WeakOutcome::Survives(WeakCase::HeavyTail), None, None),
        RhoStatus::BoundaryNotCovered => (WeakOutcome::NotCovered, None, None),
        RhoStatus::InteriorMin { h, rho } => {
            let outcome = if !nu.is_finite() {
                WeakOutcome::Survives(WeakCase::InfiniteNu)
            } else if rho > inv_nu {
                WeakOutcome::Survives(WeakCase::RhoThreshold)
            } else {
                WeakOutcome::Dies
            };
            (outcome, Some(rho), Some(h))
        }
    };
    WeakVerdict {
        outcome,
        mean_fake,
        mean_correct,
        rho,
        h,
        inv_nu,
        note: rho_res.note,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongOutcome {
    Survives,
    Dies,
    /// Malthusian parameters within tolerance of each other: the equal-rate
    /// case is open, the classifier refuses to pick a side.
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongVerdict {
    pub outcome: StrongOutcome,
    /// Malthusian rates, set by the graph criterion.
    pub lambda_fake: Option<f64>,
    pub lambda_correct: Option<f64>,
    pub mean_fake: f64,
    pub mean_correct: f64,
}

/// Strong survival on the configuration model: compare Malthusian rates.
///
/// `tol` is an absolute tolerance in rate units; `lambda_correct` more than
/// `tol` below `lambda_fake` means the fake news wins a positive fraction.
pub fn classify_strong_graph(
    model: &JointTraversalModel,
    nu: f64,
    tol: f64,
) -> Result<StrongVerdict, NoRoot> {
    let lambda_fake = solve_malthusian(model.fake(), nu, 1e-9)?.lambda;
    let lambda_correct = solve_malthusian(model.correct(), nu, 1e-9)?.lambda;
    let outcome = if lambda_correct < lambda_fake - tol {
        StrongOutcome::Survives
    } else if lambda_correct > lambda_fake + tol {
        StrongOutcome::Dies
    } else {
        StrongOutcome::Boundary
    };
    Ok(StrongVerdict {
        outcome,
        lambda_fake: Some(lambda_fake),
        lambda_correct: Some(lambda_correct),
        mean_fake: model.fake().mean(),
        mean_correct: model.correct().mean(),
    })
}

/// Strong survival on the tree: strict mean dominance, equal means die.
pub fn classify_strong_tree(model: &JointTraversalModel) -> StrongVerdict {
    let mean_fake = model.fake().mean();
    let mean_correct = model.correct().mean();
    StrongVerdict {
        outcome: if mean_correct > mean_fake {
            StrongOutcome::Survives
        } else {
            StrongOutcome::Dies
        },
        lambda_fake: None,
        lambda_correct: None,
        mean_fake,
        mean_correct,
    }
}

/// Lifetime profile `H(x) = int_0^inf exp(-lambda z) P(L in (z, z + x)) dz`
/// by quadrature on the substituted unit interval; `x` may be `+inf`.
///
/// The substitution is `v = 1 - exp(-lambda z)`; the integral is split at
/// the images of the CDF breakpoints of `fake` (shifted by `x`), so every
/// segment has a smooth integrand.
pub fn lifetime_profile_quadrature(fake: &Marginal, lambda: f64, x: f64) -> f64 {
    let integrand = |z: f64| {
        let upper = if x.is_infinite() { 1.0 } else { fake.cdf(z + x) };
        upper - fake.cdf(z)
    };

    let mut cuts: Vec<f64> = Vec::new();
    for b in fake.cdf_breakpoints() {
        for z in [b, b - x] {
            if z.is_finite() && z > 0.0 {
                let v = -libm::expm1(-lambda * z);
                if v > 0.0 && v < 1.0 {
                    cuts.push(v);
                }
            }
        }
    }
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    let mut lo = 0.0;
    let mut segments = cuts;
    segments.push(1.0);
    for hi in segments {
        let width = hi - lo;
        if width > 0.0 {
            let ends_at_one = hi == 1.0;
            total += width
                * integrate_unit_checked(
                    |t, ct| {
                        // 1 - v accurately: the final segment reaches 1 where
                        // only the complement form survives rounding.
                        let cv = if ends_at_one {
                            width * ct
                        } else {
                            1.0 - (lo + t * width)
                        };
                        integrand(-log(cv) / lambda)
                    },
                    H_QUAD_TOL,
                );
        }
        lo = hi;
    }
    total / lambda
}

/// Lifetime profile with closed forms where they exist.
///
/// The atomic family needs one: its integrand is a step function, which
/// defeats the quadrature's convergence.
pub fn lifetime_profile(fake: &Marginal, lambda: f64, x: f64) -> f64 {
    match *fake {
        Marginal::Exponential { rate } => {
            let num = if x.is_infinite() { 1.0 } else { -libm::expm1(-rate * x) };
            num / (lambda + rate)
        }
        Marginal::Deterministic { value } => {
            // P(L in (z, z+x]) = 1 exactly on max(0, value - x) <= z < value.
            let lo = if x.is_infinite() { 0.0 } else { (value - x).max(0.0) };
            (exp(-lambda * lo) - exp(-lambda * value)) / lambda
        }
        _ => lifetime_profile_quadrature(fake, lambda, x),
    }
}

/// Stable-age summary: tilted means, lifetime profile and the Monte Carlo
/// non-blocking probability of the tilted walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StableAgeReport {
    pub lambda_fake: f64,
    /// Mean of the fake-news stable-age law.
    pub nu_bar_fake: f64,
    /// Mean of the correct-news law under the stable-age tilt.
    pub e_lbar_correct: f64,
    /// `(x, H(x))` on the requested grid.
    pub h_values: Vec<(f64, f64)>,
    pub h_infinity: f64,
    /// Estimate of `P(tilted walk never goes negative)` up to `horizon`.
    pub p_star_hat: f64,
    pub p_star_stderr: f64,
    pub horizon: usize,
    pub replications: u64,
    /// Heuristic diffusion bound on the one-sided truncation bias of
    /// `p_star_hat` (the estimate can only sit above the limit).
    pub truncation_bias_bound: f64,
    /// `(T, p*_T)`: adds back the walks first blocked after fake time `T`.
    pub p_star_t: Vec<(f64, f64)>,
    /// Tilted-sampling acceptance rate; its expectation is exactly `1/nu`.
    pub acceptance_rate: f64,
    pub acceptance_stderr: f64,
    pub proposals: u64,
}

/// Computes the stable-age quantities for a model with finite `nu > 1`.
///
/// The tilted pair law is sampled by rejection: propose from the model,
/// accept with probability `exp(-lambda_fake * l_fake)`. The acceptance rate
/// is `1/nu` exactly, which doubles as a built-in sanity check.
#[allow(clippy::too_many_arguments)]
pub fn stable_age_report(
    model: &JointTraversalModel,
    nu: f64,
    h_grid: &[f64],
    t_grid: &[f64],
    reps: u64,
    horizon: usize,
    stream: &mut Stream,
) -> Result<StableAgeReport, NoRoot> {
    assert!(nu.is_finite() && nu > 1.0, "stable age requires finite nu > 1");
    assert!(reps >= 1 && horizon >= 1);
    let lambda_fake = solve_malthusian(model.fake(), nu, 1e-12)?.lambda;

    let nu_bar_fake = nu * model.fake().mgf_prime(-lambda_fake);
    let e_lbar_correct = nu * model.cross_moment(-lambda_fake);

    let h_values: Vec<(f64, f64)> = h_grid
        .iter()
        .map(|&x| (x, lifetime_profile(model.fake(), lambda_fake, x)))
        .collect();
    let h_infinity = lifetime_profile(model.fake(), lambda_fake, f64::INFINITY);

    let mut proposals = 0u64;
    let mut accepted = 0u64;
    let mut survived = 0u64;
    let mut blocked_fake_times: Vec<f64> = Vec::new();
    let mut final_levels: Vec<f64> = Vec::new();
    let mut inc_sum = 0.0;
    let mut inc_sum_sq = 0.0;

    for _ in 0..reps {
        let mut level = 0.0;
        let mut fake_time = 0.0;
        let mut blocked = false;
        for _ in 0..horizon {
            let (l_fake, l_correct) = loop {
                proposals += 1;
                let pair = model.sample_pair(stream);
                if stream.uniform() < exp(-lambda_fake * pair.0) {
                    break pair;
                }
            };
            accepted += 1;
            let inc = l_correct - l_fake;
            inc_sum += inc;
            inc_sum_sq += inc * inc;
            level += inc;
            fake_time += l_fake;
            if level < 0.0 {
                blocked = true;
                break;
            }
        }
        if blocked {
            blocked_fake_times.push(fake_time);
        } else {
            survived += 1;
            final_levels.push(level);
        }
    }

    let p_star_hat = survived as f64 / reps as f64;
    let p_star_stderr = binomial_stderr(p_star_hat, reps);

    // Diffusion heuristic for the mass that would still be lost past the
    // horizon: ruin probability from level W under drift m, variance v is
    // roughly exp(-2 m W / v).
    let mean_inc = inc_sum / accepted as f64;
    let var_inc = (inc_sum_sq / accepted as f64 - mean_inc * mean_inc).max(1e-300);
    let truncation_bias_bound = if mean_inc > 0.0 {
        final_levels
            .iter()
            .map(|&w| exp(-2.0 * mean_inc * w / var_inc))
            .sum::<f64>()
            / reps as f64
    } else {
        1.0
    };

    let p_star_t: Vec<(f64, f64)> = t_grid
        .iter()
        .map(|&t| {
            let late = blocked_fake_times.iter().filter(|&&ft| ft > t).count();
            (t, p_star_hat + late as f64 / reps as f64)
        })
        .collect();

    let acceptance_rate = accepted as f64 / proposals as f64;
    Ok(StableAgeReport {
        lambda_fake,
        nu_bar_fake,
        e_lbar_correct,
        h_values,
        h_infinity,
        p_star_hat,
        p_star_stderr,
        horizon,
        replications: reps,
        truncation_bias_bound,
        p_star_t,
        acceptance_rate,
        acceptance_stderr: binomial_stderr(acceptance_rate, proposals),
        proposals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traversal::Coupling;

    fn exp_m(rate: f64) -> Marginal {
        Marginal::exponential(rate).unwrap()
    }
    fn det(v: f64) -> Marginal {
        Marginal::deterministic(v).unwrap()
    }
    fn indep(f: Marginal, r: Marginal) -> JointTraversalModel {
        JointTraversalModel::new(f, r, Coupling::Independent).unwrap()
    }

    #[test]
    fn rho_closed_form_for_exponentials() {
        // Independent Exp(1) fake / Exp(3) correct: h = 1, rho = 0.75.
        let m = indep(exp_m(1.0), exp_m(3.0));
        let res = solve_rho(&m, 1e-10);
        let h = res.h().unwrap();
        let rho = res.rho().unwrap();
        assert!((h - 1.0).abs() < 1e-7, "h = {h}");
        assert!((rho - 0.75).abs() < 1e-10, "rho = {rho}");
        assert_eq!(res.s_max, 3.0);
    }

    #[test]
    fn rho_equal_deterministic_means() {
        // psi is identically 1; the (degenerate, infeasible-as-a-race) model
        // still classifies through the equal-means corner.
        let m = JointTraversalModel::new_unchecked(det(2.0), det(2.0), Coupling::Independent);
        let res = solve_rho(&m, 1e-10);
        assert_eq!(res.status, RhoStatus::InteriorMin { h: 0.0, rho: 1.0 });
        assert!(res.note.is_some());
    }

    #[test]
    fn rho_divergent_for_pareto_correct() {
        let m = indep(det(3.0), Marginal::pareto(1.5, 1.0).unwrap());
        let res = solve_rho(&m, 1e-10);
        assert_eq!(res.status, RhoStatus::DivergentAll);
        assert_eq!(res.s_max, 0.0);
    }

    #[test]
    fn rho_drift_positive() {
        let m = indep(exp_m(1.0), exp_m(0.5));
        assert_eq!(solve_rho(&m, 1e-10).status, RhoStatus::DriftPositive);
    }

    #[test]
    fn rho_interior_min_with_infinite_abscissa() {
        // Deterministic correct news: psi(s) = e^{s c} E[e^{-s L_fake}] grows
        // eventually, so the bracket expansion must find an interior minimum.
        let m = indep(exp_m(0.5), det(1.0));
        // means: fake 2 > correct 1, negative drift.
        let res = solve_rho(&m, 1e-10);
        let h = res.h().unwrap();
        let rho = res.rho().unwrap();
        // psi(s) = e^{s} * 0.5/(0.5+s); psi'(h) = 0 at h = 0.5: check against
        // a direct grid minimum.
        assert!((h - 0.5).abs() < 1e-6, "h = {h}");
        let want = libm::exp(0.5) * 0.5 / 1.0;
        assert!((rho - want).abs() < 1e-10);
    }

    #[test]
    fn rho_boundary_not_covered() {
        // Comonotone Pareto fake / exponential correct: psi is finite below
        // the abscissa but keeps decreasing into it.
        let m = JointTraversalModel::new(
            Marginal::pareto(2.0, 0.1).unwrap(),
            exp_m(6.0),
            Coupling::Comonotone,
        )
        .unwrap();
        assert!(m.correct().mean() < m.fake().mean());
        let res = solve_rho(&m, 1e-9);
        assert_eq!(res.status, RhoStatus::BoundaryNotCovered);
    }

    #[test]
    fn malthusian_closed_forms() {
        // Exponential: lambda = rate (nu - 1).
        let r = solve_malthusian(&exp_m(1.0), 2.0, 1e-12).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-12, "lambda = {}", r.lambda);
        // Deterministic: lambda = ln(nu) / c.
        let r = solve_malthusian(&det(1.0), 2.0, 1e-12).unwrap();
        assert!((r.lambda - core::f64::consts::LN_2).abs() < 1e-12);
        // Uniform(0,1), nu = 2: root of (1 - e^{-l})/l = 1/2.
        let r = solve_malthusian(&Marginal::uniform(0.0, 1.0).unwrap(), 2.0, 1e-12).unwrap();
        assert!((r.lambda - 1.59362).abs() < 1e-5, "lambda = {}", r.lambda);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn malthusian_no_root_cases() {
        assert!(solve_malthusian(&det(0.0), 2.0, 1e-12).is_err());
        assert!(solve_malthusian(&exp_m(1.0), 1.0, 1e-12).is_err());
        assert!(solve_malthusian(&exp_m(1.0), f64::INFINITY, 1e-12).is_err());
    }

    #[test]
    fn malthusian_monotone_in_nu() {
        let mut prev = 0.0;
        for nu in [1.2, 1.5, 2.0, 3.0, 5.0, 10.0] {
            let l = solve_malthusian(&exp_m(1.0), nu, 1e-12).unwrap().lambda;
            assert!(l > prev, "lambda not increasing at nu = {nu}");
            assert!((l - (nu - 1.0)).abs() < 1e-11);
            prev = l;
        }
    }

    #[test]
    fn weak_classification_worked_cases() {
        // Survives (i): means 1 vs 2.
        let v = classify_weak(&indep(exp_m(1.0), exp_m(0.5)), 2.0, 1e-10);
        assert_eq!(v.outcome, WeakOutcome::Survives(WeakCase::MeanDominance));

        // Dies (ii): rho = 40/121 <= 1/2.
        let v = classify_weak(&indep(exp_m(1.0), exp_m(10.0)), 2.0, 1e-10);
        assert_eq!(v.outcome, WeakOutcome::Dies);
        assert!((v.rho.unwrap() - 40.0 / 121.0).abs() < 1e-9);

        // Survives (ii): identical exponentials give rho = 1 > 1/2.
        let v = classify_weak(&indep(exp_m(1.0), exp_m(1.0)), 2.0, 1e-10);
        assert_eq!(v.outcome, WeakOutcome::Survives(WeakCase::RhoThreshold));
        assert_eq!(v.rho, Some(1.0));
        assert!(v.note.is_some(), "equal-means convention must be flagged");

        // Survives (iii): heavy-tailed correct news with equal means.
        let v = classify_weak(
            &indep(det(3.0), Marginal::pareto(1.5, 1.0).unwrap()),
            2.0,
            1e-10,
        );
        assert_eq!(v.outcome, WeakOutcome::Survives(WeakCase::HeavyTail));

        // Infinite nu: the rho threshold is vacuous.
        let v = classify_weak(&indep(exp_m(1.0), exp_m(10.0)), f64::INFINITY, 1e-10);
        assert_eq!(v.outcome, WeakOutcome::Survives(WeakCase::InfiniteNu));
    }

    #[test]
    fn strong_graph_worked_cases() {
        let v = classify_strong_graph(&indep(exp_m(1.0), exp_m(2.0)), 2.0, 1e-9).unwrap();
        assert_eq!(v.outcome, StrongOutcome::Dies);
        assert!((v.lambda_fake.unwrap() - 1.0).abs() < 1e-10);
        assert!((v.lambda_correct.unwrap() - 2.0).abs() < 1e-10);

        let v = classify_strong_graph(&indep(exp_m(1.0), exp_m(0.5)), 2.0, 1e-9).unwrap();
        assert_eq!(v.outcome, StrongOutcome::Survives);

        let v = classify_strong_graph(&indep(exp_m(1.0), exp_m(1.0)), 2.0, 1e-9).unwrap();
        assert_eq!(v.outcome, StrongOutcome::Boundary);
    }

    #[test]
    fn strong_tree_is_mean_comparison() {
        assert_eq!(
            classify_strong_tree(&indep(det(1.0), det(2.0))).outcome,
            StrongOutcome::Survives
        );
        assert_eq!(
            classify_strong_tree(&JointTraversalModel::new_unchecked(
                det(2.0),
                det(1.0),
                Coupling::Independent
            ))
            .outcome,
            StrongOutcome::Dies
        );
        // Equal means: strict inequality required, dies.
        assert_eq!(
            classify_strong_tree(&indep(exp_m(1.0), exp_m(1.0))).outcome,
            StrongOutcome::Dies
        );
    }

    #[test]
    fn stable_age_closed_form_example() {
        // Exp(1) fake / Exp(0.6) correct, nu = 2: lambda_fake = 1,
        // nu_bar = 1/(rate nu) = 0.5, E[Lbar_correct] = 1/0.6.
        let m = indep(exp_m(1.0), exp_m(0.6));
        let mut s = Stream::from_seed(404);
        let rep = stable_age_report(&m, 2.0, &[core::f64::consts::LN_2], &[5.0], 20_000, 200, &mut s)
            .unwrap();
        assert!((rep.lambda_fake - 1.0).abs() < 1e-11);
        assert!((rep.nu_bar_fake - 0.5).abs() < 1e-11);
        assert!((rep.e_lbar_correct - 1.0 / 0.6).abs() < 1e-11);
        assert!(rep.nu_bar_fake < rep.e_lbar_correct);
        // H(ln 2) = (1 - e^{-ln 2})/2 = 0.25 and H(inf) = 0.5.
        assert!((rep.h_values[0].1 - 0.25).abs() < 1e-12);
        assert!((rep.h_infinity - 0.5).abs() < 1e-12);
        // H(inf) identity against (1 - 1/nu)/lambda.
        assert!((rep.h_infinity - 0.5 / rep.lambda_fake).abs() < 1e-9);
        // Acceptance rate concentrates on 1/nu = 1/2.
        assert!(
            (rep.acceptance_rate - 0.5).abs() < 3.0 * rep.acceptance_stderr,
            "acceptance {}",
            rep.acceptance_rate
        );
        // p*_T dominates p*.
        for &(_, pt) in &rep.p_star_t {
            assert!(pt >= rep.p_star_hat);
        }
        assert!(rep.truncation_bias_bound < 0.5);
    }

    #[test]
    fn stable_age_deterministic_walk_never_blocked() {
        let m = indep(det(1.0), det(2.0));
        let mut s = Stream::from_seed(1);
        let rep = stable_age_report(&m, 2.0, &[], &[], 200, 50, &mut s).unwrap();
        assert_eq!(rep.p_star_hat, 1.0);
    }

    #[test]
    fn lifetime_profile_quadrature_matches_closed_form() {
        let fake = exp_m(1.3);
        let lambda = 0.9;
        for x in [0.1, 0.5, 2.0, f64::INFINITY] {
            let q = lifetime_profile_quadrature(&fake, lambda, x);
            let c = lifetime_profile(&fake, lambda, x);
            assert!((q - c).abs() < 1e-8, "x = {x}: {q} vs {c}");
        }
    }

    #[test]
    fn classifiers_invariant_under_time_rescaling() {
        // Scaling both marginals by c scales the Malthusian rates by 1/c and
        // leaves every verdict unchanged (tolerances scale along).
        let c = 7.3;
        let base_f = exp_m(1.0);
        let base_r = exp_m(2.0);
        let scaled_f = exp_m(1.0 / c);
        let scaled_r = exp_m(2.0 / c);

        let v1 = classify_weak(&indep(base_f, base_r), 2.0, 1e-10);
        let v2 = classify_weak(&indep(scaled_f, scaled_r), 2.0, 1e-10 / c);
        assert_eq!(v1.outcome, v2.outcome);

        let s1 = classify_strong_graph(&indep(base_f, base_r), 2.0, 1e-9).unwrap();
        let s2 = classify_strong_graph(&indep(scaled_f, scaled_r), 2.0, 1e-9 / c).unwrap();
        assert_eq!(s1.outcome, s2.outcome);
        let lf1 = s1.lambda_fake.unwrap();
        let lf2 = s2.lambda_fake.unwrap();
        assert!((lf1 / c - lf2).abs() < 1e-9, "{lf1} vs {lf2}");
    }
}
