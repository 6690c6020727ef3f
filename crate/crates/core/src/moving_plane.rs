//! Verification of the qualitative structure of solved fields: ordering
//! against reflections across sweeping hyperplanes, directional
//! monotonicity, axial and radial symmetry, positivity of the regular part,
//! the small-domain comparison, and the strict-or-identical dichotomy.
//!
//! Strict continuum inequalities are tested as quantified margins on a
//! collar-trimmed node set: the collar excludes the boundary layer where
//! the singular profile degrades finite-difference accuracy, and the margin
//! floor `max(1e-8, K h^2)` absorbs discretization error. Hypothesis
//! failures are reported as "not applicable" rather than as check failures.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::DeltaEstimate;
use crate::cap::{cap_section, eval_target, reflect_targets, CapSection, ReflectTarget};
use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::geometry::{lambda1_of_nu, Direction, DomainSpec};
use crate::grid::Grid;
use crate::nonlinearity::{HpStatus, NonlinearitySpec};
use crate::scalar::{real, Real};

/// Sweep parameters: directions, the lambda grid resolution, the trim
/// collar in multiples of h, and the margin-floor constant K.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig<T: Real> {
    pub directions: Vec<Direction<T>>,
    pub lambda_count: usize,
    pub boundary_collar: usize,
    pub margin_k: T,
    /// Tolerance of the exact-permutation axial symmetry check.
    pub symmetry_tol: T,
}

impl<T: Real> SweepConfig<T> {
    /// Default sweep over the coordinate symmetry axes of the domain.
    pub fn for_spec(spec: &DomainSpec<T>) -> Self {
        let directions = if spec.dim() == 1 {
            vec![Direction::axis(0)]
        } else {
            vec![Direction::axis(0), Direction::axis(1)]
        };
        SweepConfig {
            directions,
            lambda_count: 16,
            boundary_collar: 4,
            margin_k: real(10.0),
            symmetry_tol: real(1e-6),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_count < 3 {
            return Err(CoreError::InvalidInput("lambda_count must be >= 3".into()));
        }
        if self.boundary_collar < 1 {
            return Err(CoreError::InvalidInput("boundary collar must be >= 1".into()));
        }
        Ok(())
    }

    /// Margin floor `max(1e-8, K h^2)`.
    pub fn floor(&self, h: T) -> T {
        real::<T>(1e-8).max(self.margin_k * h * h)
    }

    /// Uniform lambda grid in the open interval `(a(nu), lambda1(nu))`.
    pub fn lambda_grid(&self, spec: &DomainSpec<T>, nu: Direction<T>) -> Vec<T> {
        let a = spec.a_of_nu(nu);
        let l1 = lambda1_of_nu(spec, nu);
        let count = self.lambda_count;
        (1..=count)
            .map(|j| a + (l1 - a) * real::<T>(j as f64 / (count + 1) as f64))
            .collect()
    }
}

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    DegenerateFlat,
    NotApplicable,
}

/// Strict-or-identical classification of an ordered reflection pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DichotomyOutcome {
    Strict,
    Identical,
    Violation,
}

/// Values of a field at the reflected points of a cap.
pub fn reflected_values<T: Real>(field: &ScalarField<T>, cap: &CapSection<T>) -> Result<Vec<T>> {
    if field.len() != cap.grid().node_count() {
        return Err(CoreError::GridMismatch);
    }
    cap.targets
        .iter()
        .map(|t| eval_target(field.values(), t))
        .collect()
}

/// Margin record of one reflection-ordering check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionMargin<T> {
    pub min_margin: T,
    pub worst_node: usize,
    pub checked: usize,
    pub verdict: Verdict,
}

/// Min over the collar-trimmed cap of `field(reflected) - field`, compared
/// against the margin floor.
pub fn verify_reflection_order<T: Real>(
    field: &ScalarField<T>,
    nu: Direction<T>,
    lambda: T,
    cfg: &SweepConfig<T>,
) -> Result<ReflectionMargin<T>> {
    let grid = field.grid();
    let cap = cap_section(grid, nu, lambda)?;
    let refl = reflected_values(field, &cap)?;
    let cutoff = grid.h() * real::<T>(cfg.boundary_collar as f64);
    let floor = cfg.floor(grid.h());

    let mut min_margin = T::infinity();
    let mut worst = usize::MAX;
    let mut checked = 0;
    for (pos, &k) in cap.node_indices.iter().enumerate() {
        if grid.boundary_distance(k) < cutoff {
            continue;
        }
        checked += 1;
        let margin = refl[pos] - field.get(k);
        if margin < min_margin {
            min_margin = margin;
            worst = k;
        }
    }
    if checked == 0 {
        return Err(CoreError::EmptyTrimmedCap);
    }
    let verdict = if min_margin >= -floor { Verdict::Pass } else { Verdict::Fail };
    Ok(ReflectionMargin { min_margin, worst_node: worst, checked, verdict })
}

/// Minimum directional derivative over the trimmed half-domain
/// `{x·nu < lambda1(nu)}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityRecord<T> {
    pub min_derivative: T,
    pub worst_node: usize,
    pub checked: usize,
    pub verdict: Verdict,
}

/// Centered differences along `nu` (interpolated off-axis); flat fields are
/// classified as degenerate instead of failing the strict sign check.
pub fn verify_monotonicity<T: Real>(
    field: &ScalarField<T>,
    nu: Direction<T>,
    cfg: &SweepConfig<T>,
) -> Result<MonotonicityRecord<T>> {
    let grid = field.grid();
    let h = grid.h();
    let lambda1 = lambda1_of_nu(grid.spec(), nu);
    let cutoff = h * real::<T>(cfg.boundary_collar as f64);
    let floor = cfg.floor(h);
    let two_h = real::<T>(2.0) * h;

    let mut min_derivative = T::infinity();
    let mut worst = usize::MAX;
    let mut checked = 0;

    let axis = nu.as_axis();
    for k in 0..field.len() {
        let p = grid.coords(k);
        if nu.dot(p) >= lambda1 || grid.boundary_distance(k) < cutoff {
            continue;
        }
        let derivative = match axis {
            Some((a, sign)) => {
                let (fwd, bwd) = (grid.neighbor(k, a, 1), grid.neighbor(k, a, -1));
                match (fwd, bwd) {
                    (Some(f), Some(b)) => sign * (field.get(f) - field.get(b)) / two_h,
                    _ => continue,
                }
            }
            None => {
                let [nx, ny] = nu.components();
                let plus = target_value(field, [p[0] + h * nx, p[1] + h * ny]);
                let minus = target_value(field, [p[0] - h * nx, p[1] - h * ny]);
                match (plus, minus) {
                    (Some(a), Some(b)) => (a - b) / two_h,
                    _ => continue,
                }
            }
        };
        checked += 1;
        if derivative < min_derivative {
            min_derivative = derivative;
            worst = k;
        }
    }
    if checked == 0 {
        return Err(CoreError::EmptyTrimmedCap);
    }
    let flat = field.max_value() - field.min_value() <= floor;
    let verdict = if flat {
        Verdict::DegenerateFlat
    } else if min_derivative > T::zero() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(MonotonicityRecord { min_derivative, worst_node: worst, checked, verdict })
}

fn target_value<T: Real>(field: &ScalarField<T>, p: [T; 2]) -> Option<T> {
    match crate::cap::interpolation_target(field.grid(), p) {
        ReflectTarget::Outside => None,
        other => eval_target(field.values(), &other).ok(),
    }
}

/// Sup deviation from the exact reflection permutation about the domain's
/// center hyperplane orthogonal to `nu`.
pub fn verify_axial_symmetry<T: Real>(field: &ScalarField<T>, nu: Direction<T>) -> Result<T> {
    let grid = field.grid();
    let (axis, _) = nu.as_axis().ok_or(CoreError::AxisNotClosed)?;
    let perm = grid.reflection_perm(axis)?;
    let mut sup = T::zero();
    for k in 0..field.len() {
        sup = sup.max((field.get(k) - field.get(perm[k] as usize)).abs());
    }
    Ok(sup)
}

/// Radial structure report for disk domains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialReport<T> {
    /// Number of width-h radial bins.
    pub bin_count: usize,
    /// Max value spread across nodes sharing the same exact lattice radius
    /// (within the trimmed radial range): the symmetry deviation.
    pub max_spread: T,
    /// Max slope `(mean_{k+1} - mean_k)/h` of adjacent width-h bin means in
    /// the trimmed range; radial strict decrease means this stays negative.
    pub max_slope: T,
    pub verdict: Verdict,
}

/// Groups nodes by exact radius for the symmetry spread and by width-h bins
/// for the monotone profile.
pub fn verify_radial<T: Real>(field: &ScalarField<T>, cfg: &SweepConfig<T>) -> Result<RadialReport<T>> {
    let grid = field.grid();
    let radius = match grid.spec() {
        DomainSpec::Disk { radius, .. } => *radius,
        _ => return Err(CoreError::NotADisk),
    };
    let h = grid.h();
    let r_lo = h * real::<T>(cfg.boundary_collar as f64);
    let r_hi = radius - r_lo;
    let floor = cfg.floor(h);

    // exact-radius classes keyed by i^2 + j^2 (exact integers)
    let mut classes: BTreeMap<i64, (T, T)> = BTreeMap::new();
    // width-h bins
    let mut bins: BTreeMap<i64, (T, usize)> = BTreeMap::new();
    let center = grid.spec().center();
    for k in 0..field.len() {
        let ij = grid.lattice(k);
        let p = grid.coords(k);
        let r = (p[0] - center[0]).hypot(p[1] - center[1]);
        let v = field.get(k);
        if r >= r_lo && r <= r_hi {
            let key = ij[0] * ij[0] + ij[1] * ij[1];
            classes
                .entry(key)
                .and_modify(|(lo, hi)| {
                    *lo = lo.min(v);
                    *hi = hi.max(v);
                })
                .or_insert((v, v));
        }
        let bin = crate::scalar::as_f64(r / h).floor() as i64;
        bins.entry(bin)
            .and_modify(|(sum, count)| {
                *sum += v;
                *count += 1;
            })
            .or_insert((v, 1));
    }

    let max_spread = classes
        .values()
        .fold(T::zero(), |m, (lo, hi)| m.max(*hi - *lo));

    let collar_bin = cfg.boundary_collar as i64;
    let last_bin = crate::scalar::as_f64(r_hi / h).floor() as i64;
    let mut max_slope = T::neg_infinity();
    let mut prev: Option<(i64, T)> = None;
    for (&bin, &(sum, count)) in &bins {
        if bin < collar_bin || bin > last_bin {
            continue;
        }
        let mean = sum / real::<T>(count as f64);
        if let Some((pbin, pmean)) = prev {
            if bin == pbin + 1 {
                max_slope = max_slope.max((mean - pmean) / h);
            }
        }
        prev = Some((bin, mean));
    }

    let flat = field.max_value() - field.min_value() <= floor;
    let verdict = if flat {
        Verdict::DegenerateFlat
    } else if max_spread <= cfg.margin_k * h && max_slope < floor {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(RadialReport { bin_count: bins.len(), max_spread, max_slope, verdict })
}

/// Min of the regular part over the trimmed interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityRecord<T> {
    pub min_value: T,
    pub worst_node: usize,
    pub checked: usize,
    pub verdict: Verdict,
}

pub fn verify_positivity<T: Real>(
    field: &ScalarField<T>,
    cfg: &SweepConfig<T>,
) -> Result<PositivityRecord<T>> {
    let grid = field.grid();
    let cutoff = grid.h() * real::<T>(cfg.boundary_collar as f64);
    let floor = cfg.floor(grid.h());
    let mut min_value = T::infinity();
    let mut worst = usize::MAX;
    let mut checked = 0;
    for k in 0..field.len() {
        if grid.boundary_distance(k) < cutoff {
            continue;
        }
        checked += 1;
        let v = field.get(k);
        if v < min_value {
            min_value = v;
            worst = k;
        }
    }
    if checked == 0 {
        return Err(CoreError::EmptyTrimmedCap);
    }
    let verdict = if field.sup_norm() <= floor {
        Verdict::DegenerateFlat
    } else if min_value >= floor {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PositivityRecord { min_value, worst_node: worst, checked, verdict })
}

/// Record of a small-domain comparison check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakComparisonRecord<T> {
    pub subset_measure: T,
    pub boundary_margin: T,
    pub interior_margin: T,
    pub worst_node: usize,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// On a node subset of measure below the threshold with ordered discrete
/// boundary, checks that the ordering holds on the whole subset. Unmet
/// hypotheses (subset not in the cap, measure above the threshold, boundary
/// unordered) yield "not applicable".
pub fn verify_weak_comparison_small<T: Real>(
    w: &ScalarField<T>,
    nu: Direction<T>,
    lambda: T,
    subset: &[usize],
    delta: &DeltaEstimate<T>,
    cfg: &SweepConfig<T>,
) -> Result<WeakComparisonRecord<T>> {
    let grid = w.grid();
    let floor = cfg.floor(grid.h());
    let measure = grid.measure_per_node() * real::<T>(subset.len() as f64);

    let not_applicable = |measure, note: &str| WeakComparisonRecord {
        subset_measure: measure,
        boundary_margin: T::nan(),
        interior_margin: T::nan(),
        worst_node: usize::MAX,
        verdict: Verdict::NotApplicable,
        note: Some(note.into()),
    };

    if subset.is_empty() {
        return Ok(not_applicable(measure, "empty subset"));
    }
    if subset.iter().any(|&k| nu.dot(grid.coords(k)) >= lambda) {
        return Ok(not_applicable(measure, "subset not contained in the cap"));
    }
    if measure > delta.delta {
        return Ok(not_applicable(measure, "subset measure exceeds the threshold"));
    }

    let targets = reflect_targets(grid, subset, nu, lambda);
    let mut in_subset = vec![false; grid.node_count()];
    for &k in subset {
        in_subset[k] = true;
    }

    let mut boundary_margin = T::infinity();
    let mut interior_margin = T::infinity();
    let mut worst = usize::MAX;
    for (j, &k) in subset.iter().enumerate() {
        let w_lam = eval_target(w.values(), &targets[j])?;
        let margin = w_lam - w.get(k);
        let mut is_boundary = false;
        for axis in 0..grid.dim() {
            for side in [-1_i64, 1] {
                match grid.neighbor(k, axis, side) {
                    Some(m) if in_subset[m] => {}
                    _ => is_boundary = true,
                }
            }
        }
        if is_boundary {
            boundary_margin = boundary_margin.min(margin);
        }
        if margin < interior_margin {
            interior_margin = margin;
            worst = k;
        }
    }

    if boundary_margin < -floor {
        let mut rec = not_applicable(measure, "boundary ordering hypothesis unmet");
        rec.boundary_margin = boundary_margin;
        return Ok(rec);
    }
    let verdict = if interior_margin >= -floor { Verdict::Pass } else { Verdict::Fail };
    Ok(WeakComparisonRecord {
        subset_measure: measure,
        boundary_margin,
        interior_margin,
        worst_node: worst,
        verdict,
        note: None,
    })
}

/// Classifies an ordered reflection pair on the trimmed cap as strictly
/// ordered, identical, or in the unresolved in-between state at this
/// resolution.
pub fn strong_dichotomy_probe<T: Real>(
    w: &ScalarField<T>,
    nu: Direction<T>,
    lambda: T,
    cfg: &SweepConfig<T>,
) -> Result<DichotomyOutcome> {
    let grid = w.grid();
    let cap = cap_section(grid, nu, lambda)?;
    let refl = reflected_values(w, &cap)?;
    let cutoff = grid.h() * real::<T>(cfg.boundary_collar as f64);
    let floor = cfg.floor(grid.h());

    let mut sup_diff = T::zero();
    let mut min_diff = T::infinity();
    let mut checked = 0;
    for (pos, &k) in cap.node_indices.iter().enumerate() {
        if grid.boundary_distance(k) < cutoff {
            continue;
        }
        checked += 1;
        let diff = refl[pos] - w.get(k);
        sup_diff = sup_diff.max(diff.abs());
        min_diff = min_diff.min(diff);
    }
    if checked == 0 {
        return Err(CoreError::EmptyTrimmedCap);
    }
    Ok(if sup_diff <= floor {
        DichotomyOutcome::Identical
    } else if min_diff > floor {
        DichotomyOutcome::Strict
    } else {
        DichotomyOutcome::Violation
    })
}

/// Reflection margins for the three fields at one `(nu, lambda)` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflectionEntry<T> {
    pub nu: [T; 2],
    pub lambda: T,
    pub margin_u0: T,
    pub margin_w: T,
    pub margin_u: T,
    pub dichotomy: DichotomyOutcome,
    pub verdict: Verdict,
}

/// Monotonicity result for one field along one direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityEntry<T> {
    pub nu: [T; 2],
    pub field: String,
    pub min_derivative: T,
    pub verdict: Verdict,
}

/// Axial symmetry deviation for one field along one axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxialEntry<T> {
    pub nu: [T; 2],
    pub field: String,
    pub deviation: T,
    pub verdict: Verdict,
}

/// Radial report for one field (disk domains).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialEntry<T> {
    pub field: String,
    #[serde(flatten)]
    pub report: RadialReport<T>,
}

/// Complete sweep over directions and lambda levels for the solved triple
/// `(u0, w, u)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport<T: Real> {
    pub schema: String,
    pub h: T,
    pub margin_floor: T,
    pub hp_status: HpStatus,
    pub banners: Vec<String>,
    pub reflection: Vec<ReflectionEntry<T>>,
    pub monotonicity: Vec<MonotonicityEntry<T>>,
    pub axial: Vec<AxialEntry<T>>,
    pub radial: Vec<RadialEntry<T>>,
    pub positivity: PositivityRecord<T>,
    pub overall_pass: bool,
}

impl<T: Real> SweepReport<T> {
    /// A report passes when every verdict that is not degenerate or
    /// inapplicable is a pass.
    pub fn all_pass(&self) -> bool {
        let ok = |v: &Verdict| !matches!(v, Verdict::Fail);
        self.reflection.iter().all(|e| ok(&e.verdict))
            && self.monotonicity.iter().all(|e| ok(&e.verdict))
            && self.axial.iter().all(|e| ok(&e.verdict))
            && self.radial.iter().all(|e| ok(&e.report.verdict))
            && ok(&self.positivity.verdict)
    }
}

/// Runs every check of the sweep: reflection ordering and the dichotomy
/// probe on each `(nu, lambda)` pair, monotonicity, axial symmetry and (on
/// disks) radial structure per field, and positivity of `w`.
pub fn run_sweep<T: Real>(
    u0: &ScalarField<T>,
    w: &ScalarField<T>,
    u: &ScalarField<T>,
    spec: &NonlinearitySpec<T>,
    cfg: &SweepConfig<T>,
) -> Result<SweepReport<T>> {
    cfg.validate()?;
    if !u0.same_grid(w) || !u0.same_grid(u) {
        return Err(CoreError::GridMismatch);
    }
    let grid = u0.grid();
    let h = grid.h();
    let floor = cfg.floor(h);
    let mut banners = Vec::new();
    match &spec.hp_status {
        HpStatus::Satisfied => {}
        HpStatus::Unchecked => banners.push("hypothesis on f not checked".to_string()),
        HpStatus::Violated(reason) => banners.push(format!(
            "hypothesis on f violated ({reason}): flat or inapplicable checks are informational"
        )),
    }

    let fields: [(&str, &ScalarField<T>); 3] = [("u0", u0), ("w", w), ("u", u)];

    let mut reflection = Vec::new();
    let mut monotonicity = Vec::new();
    let mut axial = Vec::new();
    let mut radial = Vec::new();

    for &nu in &cfg.directions {
        for lambda in cfg.lambda_grid(grid.spec(), nu) {
            let mut margins = [T::nan(); 3];
            let mut verdict = Verdict::Pass;
            let mut any = false;
            for (slot, (_, field)) in fields.iter().enumerate() {
                match verify_reflection_order(field, nu, lambda, cfg) {
                    Ok(rec) => {
                        margins[slot] = rec.min_margin;
                        if rec.verdict == Verdict::Fail {
                            verdict = Verdict::Fail;
                        }
                        any = true;
                    }
                    Err(CoreError::EmptyTrimmedCap) => {}
                    Err(e) => return Err(e),
                }
            }
            if !any {
                // lambda too close to a(nu) for this spacing: report and move on
                continue;
            }
            let dichotomy = strong_dichotomy_probe(w, nu, lambda, cfg)?;
            reflection.push(ReflectionEntry {
                nu: nu.components(),
                lambda,
                margin_u0: margins[0],
                margin_w: margins[1],
                margin_u: margins[2],
                dichotomy,
                verdict,
            });
        }

        for (name, field) in &fields {
            let rec = verify_monotonicity(field, nu, cfg)?;
            monotonicity.push(MonotonicityEntry {
                nu: nu.components(),
                field: (*name).to_string(),
                min_derivative: rec.min_derivative,
                verdict: rec.verdict,
            });
        }

        if grid.spec().is_symmetry_axis(nu) && nu.as_axis().is_some() {
            for (name, field) in &fields {
                let deviation = verify_axial_symmetry(field, nu)?;
                let verdict = if deviation <= cfg.symmetry_tol {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                axial.push(AxialEntry {
                    nu: nu.components(),
                    field: (*name).to_string(),
                    deviation,
                    verdict,
                });
            }
        }
    }

    if matches!(grid.spec(), DomainSpec::Disk { .. }) {
        for (name, field) in &fields {
            let report = verify_radial(field, cfg)?;
            radial.push(RadialEntry { field: (*name).to_string(), report });
        }
    }

    let positivity = verify_positivity(w, cfg)?;
    if positivity.verdict == Verdict::DegenerateFlat {
        banners.push("regular part is flat (consistent with f lacking strict positivity)".into());
    }

    let mut report = SweepReport {
        schema: "v1".to_string(),
        h,
        margin_floor: floor,
        hp_status: spec.hp_status.clone(),
        banners,
        reflection,
        monotonicity,
        axial,
        radial,
        positivity,
        overall_pass: false,
    };
    report.overall_pass = report.all_pass();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn shared(spec: DomainSpec<f64>, h: f64) -> Arc<Grid<f64>> {
        Arc::new(build_grid(&spec, h).unwrap())
    }

    fn cfg1d() -> SweepConfig<f64> {
        SweepConfig::for_spec(&DomainSpec::interval(-1.0_f64, 1.0))
    }

    #[test]
    fn reflected_constant_stays_constant() {
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 0.125);
        let c = ScalarField::constant(&g, 3.25);
        let cap = cap_section(&g, Direction::axis(0), -0.3).unwrap();
        // interior-stencil targets reproduce the constant exactly; targets
        // touching the zero extension are the trimmed-out boundary ones
        let refl = reflected_values(&c, &cap).unwrap();
        for (pos, &k) in cap.node_indices.iter().enumerate() {
            if g.boundary_distance(k) >= 4.0 * g.h() {
                assert!((refl[pos] - 3.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_permutation_on_grid_closed_reflection() {
        let g = shared(DomainSpec::rectangle(-1.0_f64, 1.0, -1.0, 1.0), 0.25);
        let f = ScalarField::from_fn(&g, |p| p[0] + 2.0 * p[1] * p[1]);
        let cap = cap_section(&g, Direction::axis(0), 0.0).unwrap();
        let refl = reflected_values(&f, &cap).unwrap();
        for (pos, &k) in cap.node_indices.iter().enumerate() {
            let p = g.coords(k);
            assert!((refl[pos] - (-p[0] + 2.0 * p[1] * p[1])).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_perturbation_flagged() {
        // the odd field is ordered the "right" way for nu = +e1 but violates
        // the ordering for the mirrored sweep direction; the harness must
        // flag the violating side
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let f = ScalarField::from_fn(&g, |p| p[0] * (1.0 - p[0] * p[0]));
        let cfg = cfg1d();
        let fwd = verify_reflection_order(&f, Direction::axis(0), -0.25, &cfg).unwrap();
        assert_eq!(fwd.verdict, Verdict::Pass);
        let rec =
            verify_reflection_order(&f, Direction::axis(0).opposite(), -0.25, &cfg).unwrap();
        assert_eq!(rec.verdict, Verdict::Fail);
        assert!(rec.min_margin < 0.0);
    }

    #[test]
    fn zero_field_margin_is_zero() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let f = ScalarField::zeros(&g);
        let rec = verify_reflection_order(&f, Direction::axis(0), -0.25, &cfg1d()).unwrap();
        assert_eq!(rec.min_margin, 0.0);
        assert_eq!(rec.verdict, Verdict::Pass);
    }

    #[test]
    fn margins_invariant_under_constant_shift() {
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 2.0_f64.powi(-4));
        let cfg = SweepConfig::for_spec(g.spec());
        let f = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0));
        let shifted = ScalarField::from_fn(&g, |p| {
            (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0) + 7.5
        });
        let a = verify_reflection_order(&f, Direction::axis(0), -0.3, &cfg).unwrap();
        let b = verify_reflection_order(&shifted, Direction::axis(0), -0.3, &cfg).unwrap();
        assert!((a.min_margin - b.min_margin).abs() <= 1e-14 * (1.0 + a.min_margin.abs()));
    }

    #[test]
    fn constant_field_is_degenerate_flat() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let f = ScalarField::constant(&g, 5.0);
        let rec = verify_monotonicity(&f, Direction::axis(0), &cfg1d()).unwrap();
        assert_eq!(rec.verdict, Verdict::DegenerateFlat);
        assert_eq!(rec.min_derivative, 0.0);
    }

    #[test]
    fn axial_symmetry_of_odd_field() {
        let g = shared(DomainSpec::rectangle(-1.0_f64, 1.0, -1.0, 1.0), 0.25);
        let f = ScalarField::from_fn(&g, |p| p[0]);
        let dev = verify_axial_symmetry(&f, Direction::axis(0)).unwrap();
        let max_x = (0..g.node_count())
            .map(|k| g.coords(k)[0].abs())
            .fold(0.0_f64, f64::max);
        assert!((dev - 2.0 * max_x).abs() < 1e-14);
    }

    #[test]
    fn radial_report_on_analytic_fields() {
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 2.0_f64.powi(-4));
        let cfg = SweepConfig::for_spec(g.spec());
        // exactly radial: zero spread, strictly decreasing means
        let f = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0] - p[1] * p[1]) / 4.0);
        let rep = verify_radial(&f, &cfg).unwrap();
        assert!(rep.max_spread <= g.h() * 0.5);
        assert!(rep.max_slope < 0.0);
        assert_eq!(rep.verdict, Verdict::Pass);

        // non-radial field fails
        let odd = ScalarField::from_fn(&g, |p| p[0]);
        let rep_odd = verify_radial(&odd, &cfg).unwrap();
        assert_eq!(rep_odd.verdict, Verdict::Fail);

        let g_rect = shared(DomainSpec::rectangle(-1.0_f64, 1.0, -1.0, 1.0), 0.25);
        let f_rect = ScalarField::zeros(&g_rect);
        assert!(matches!(
            verify_radial(&f_rect, &cfg),
            Err(CoreError::NotADisk)
        ));
    }

    #[test]
    fn positivity_degenerate_on_zero() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let rec = verify_positivity(&ScalarField::zeros(&g), &cfg1d()).unwrap();
        assert_eq!(rec.verdict, Verdict::DegenerateFlat);
    }

    #[test]
    fn weak_comparison_vacuous_and_unmet() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let cfg = cfg1d();
        let delta = DeltaEstimate {
            lipschitz_c: 0.0,
            rule: crate::analysis::PoincareBoundRule::FaberKrahnClosedForm,
            delta: f64::INFINITY,
        };
        let nu = Direction::axis(0);
        let lambda = -0.25;
        // already-ordered field: even profile is larger towards the center
        let f = ScalarField::from_fn(&g, |p| 1.0 - p[0] * p[0]);
        let subset: Vec<usize> = (0..g.node_count())
            .filter(|&k| g.coords(k)[0] < lambda - 0.1)
            .collect();
        let rec = verify_weak_comparison_small(&f, nu, lambda, &subset, &delta, &cfg).unwrap();
        assert_eq!(rec.verdict, Verdict::Pass);

        // violated boundary ordering is "not applicable"
        let bad = ScalarField::from_fn(&g, |p| -p[0]);
        let rec_bad =
            verify_weak_comparison_small(&bad, nu, lambda, &subset, &delta, &cfg).unwrap();
        assert_eq!(rec_bad.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn dichotomy_classification() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let cfg = cfg1d();
        let nu = Direction::axis(0);
        let lambda = -0.25;

        // w = 0: identical
        let zero = ScalarField::zeros(&g);
        assert_eq!(
            strong_dichotomy_probe(&zero, nu, lambda, &cfg).unwrap(),
            DichotomyOutcome::Identical
        );

        // even profile: strictly ordered on the cap
        let f = ScalarField::from_fn(&g, |p| 1.0 - p[0] * p[0]);
        assert_eq!(
            strong_dichotomy_probe(&f, nu, lambda, &cfg).unwrap(),
            DichotomyOutcome::Strict
        );

        // hand-built interior touching point: elsewhere-strict, one tie
        let cap = cap_section(&g, nu, lambda).unwrap();
        let mut values = vec![0.0_f64; g.node_count()];
        for (pos, &k) in cap.node_indices.iter().enumerate() {
            if g.boundary_distance(k) < 4.0 * g.h() {
                continue;
            }
            if let ReflectTarget::Node(m) = cap.targets[pos] {
                values[m as usize] = 1.0; // reflected side larger by default
            }
        }
        // zero out one reflected value to create the touching point
        let touch = cap
            .node_indices
            .iter()
            .enumerate()
            .find(|(_, &k)| g.boundary_distance(k) >= 4.0 * g.h())
            .map(|(pos, _)| pos)
            .unwrap();
        if let ReflectTarget::Node(m) = cap.targets[touch] {
            values[m as usize] = 0.0;
        }
        let w = ScalarField::from_values(&g, values).unwrap();
        assert_eq!(
            strong_dichotomy_probe(&w, nu, lambda, &cfg).unwrap(),
            DichotomyOutcome::Violation
        );
    }

    #[test]
    fn flat_field_never_strict() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let cfg = cfg1d();
        let tiny = ScalarField::from_fn(&g, |p| 1e-10 * p[0]);
        let outcome = strong_dichotomy_probe(&tiny, Direction::axis(0), -0.25, &cfg).unwrap();
        assert_ne!(outcome, DichotomyOutcome::Strict);
    }
}
