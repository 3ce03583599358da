/// Outcome of comparing an analytic gradient against central differences.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub worst_index: usize,
    pub checked: usize,
    /// Coordinates whose best agreement came from a step other than the first.
    pub refined: usize,
}

/// Denominator floor: below this magnitude both gradients count as zero-ish and
/// the error is effectively absolute.
const REL_FLOOR: f64 = 1e-6;

/// Central-difference check of `analytic` against `f` around `x`.
///
/// Relative error per coordinate is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check<F>(mut f: F, x: &[f64], analytic: &[f64], step: f64) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    gradient_check_steps(&mut f, x, analytic, &[step], 0..x.len())
}

/// Same as [`gradient_check`] but only over the listed coordinates.
pub fn gradient_check_subset<F>(
    f: F,
    x: &[f64],
    analytic: &[f64],
    step: f64,
    coords: impl IntoIterator<Item = usize>,
) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    gradient_check_steps(f, x, analytic, &[step], coords)
}

/// Like [`gradient_check`] over `coords`, but tries several steps and one-sided
/// differences, keeping the best agreement per coordinate.
///
/// For piecewise-smooth objectives (ReLU networks, L1 losses) a central stencil
/// that straddles a kink gives a meaningless quotient, while the one-sided
/// quotient on either side, or a smaller stencil, measures the derivative of a
/// smooth piece. A wrong analytic gradient disagrees with all of them, so it
/// still shows up. `refined` counts coordinates whose best estimate was not the
/// central difference at the first step.
pub fn gradient_check_steps<F>(
    mut f: F,
    x: &[f64],
    analytic: &[f64],
    steps: &[f64],
    coords: impl IntoIterator<Item = usize>,
) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x.len(), analytic.len(), "gradient length");
    assert!(!steps.is_empty(), "at least one step");
    let mut probe = x.to_vec();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        worst_index: 0,
        checked: 0,
        refined: 0,
    };
    let one_sided = steps.len() > 1;
    let center = if one_sided { f(x) } else { 0.0 };
    for i in coords {
        let orig = probe[i];
        let a = analytic[i];
        let error = |numeric: f64| {
            let abs = (numeric - a).abs();
            (abs / numeric.abs().max(a.abs()).max(REL_FLOOR), abs)
        };
        let mut best = (f64::INFINITY, f64::INFINITY);
        let mut best_is_first = false;
        for (s, &step) in steps.iter().enumerate() {
            probe[i] = orig + step;
            let up = f(&probe);
            probe[i] = orig - step;
            let down = f(&probe);
            probe[i] = orig;
            let mut candidates = vec![error((up - down) / (2.0 * step))];
            if one_sided {
                candidates.push(error((up - center) / step));
                candidates.push(error((center - down) / step));
            }
            for (c, e) in candidates.into_iter().enumerate() {
                if e.0 < best.0 {
                    best = e;
                    best_is_first = s == 0 && c == 0;
                }
            }
        }
        if !best_is_first {
            report.refined += 1;
        }
        if best.0 > report.max_rel_error {
            report.max_rel_error = best.0;
            report.worst_index = i;
        }
        report.max_abs_error = report.max_abs_error.max(best.1);
        report.checked += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let x = [0.3, -1.7, 2.5, 1e-3];
        let f = |v: &[f64]| 0.5 * v.iter().map(|a| a * a).sum::<f64>();
        let report = gradient_check(f, &x, &x, 1e-4);
        assert!(report.max_rel_error < 1e-7, "{report:?}");
        assert_eq!(report.checked, 4);
    }

    #[test]
    fn wrong_gradient_is_flagged() {
        let x = [1.0, 2.0];
        let f = |v: &[f64]| v[0] * v[1];
        let report = gradient_check(f, &x, &[2.0, 0.0], 1e-6);
        assert!(report.max_rel_error > 0.5);
        assert_eq!(report.worst_index, 1);
    }

    #[test]
    fn smaller_step_avoids_a_nearby_kink() {
        let x = [0.3e-5];
        let f = |v: &[f64]| v[0].abs();
        assert!(gradient_check(f, &x, &[1.0], 1e-5).max_rel_error > 0.1);
        let report = gradient_check_steps(f, &x, &[1.0], &[1e-5, 1e-7], 0..1);
        assert!(report.max_rel_error < 1e-8, "{report:?}");
        assert_eq!(report.refined, 1);
    }

    #[test]
    fn one_sided_difference_sees_the_adjacent_piece() {
        let x = [1e-9];
        let f = |v: &[f64]| v[0].max(0.0) * 3.0;
        let report = gradient_check_steps(f, &x, &[3.0], &[1e-5, 1e-6], 0..1);
        assert!(report.max_rel_error < 1e-6, "{report:?}");
    }

    #[test]
    fn wrong_gradient_fails_at_every_step() {
        let x = [1.0, 2.0];
        let f = |v: &[f64]| v[0] * v[1];
        let report = gradient_check_steps(f, &x, &[2.0, 0.2], &[1e-5, 1e-6, 1e-7], 0..2);
        assert!(report.max_rel_error > 0.5);
    }
}
