//! Bifurcation diagrams: first components of the three branches over a
//! range of `mu`, as CSV and as a standalone SVG.

use std::fmt::Write as _;

use crate::classify::Classification;
use crate::scalar::Scalar;

pub const CSV_HEADER: &str = "mu,s_L,s_L_admissible,s_R,s_R_admissible,s_LR,s_RL,lr_admissible";

/// One sample of the diagram. A first component is `None` when its object is
/// not admissible at this `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub s_left: Option<f64>,
    pub s_right: Option<f64>,
    /// `(s^LR, s^RL)`.
    pub cycle: Option<(f64, f64)>,
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn mu_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

/// Evaluates the branches on a grid. At `mu = 0` every object collapses onto
/// the origin; the fixed points are reported there, and the cycle only if it
/// exists on some side.
pub fn sweep<T: Scalar>(c: &Classification<T>, lo: f64, hi: f64, steps: usize) -> Vec<SweepRow> {
    let slope = |v: &T| v.to_f64();
    let sl = slope(&c.fixed_left.first_components[0]);
    let sr = slope(&c.fixed_right.first_components[0]);
    let (slr, srl) = (slope(&c.cycle.first_components[0]), slope(&c.cycle.first_components[1]));
    mu_grid(lo, hi, steps)
        .into_iter()
        .map(|mu| {
            let admissible = |b: &crate::model::BranchReport<T>| match crate::model::MuSide::of(mu) {
                Some(side) => b.is_admissible_on(side),
                None => b.object != crate::model::Object::LrCycle || b.admissible_for.side().is_some(),
            };
            SweepRow {
                mu,
                s_left: admissible(&c.fixed_left).then_some(sl * mu),
                s_right: admissible(&c.fixed_right).then_some(sr * mu),
                cycle: admissible(&c.cycle).then_some((slr * mu, srl * mu)),
            }
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    // Adding zero turns -0 into 0.
    v.map(|x| format!("{}", x + 0.0)).unwrap_or_default()
}

/// CSV with a header row and LF line endings.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (slr, srl) = r.cycle.map_or((None, None), |(a, b)| (Some(a), Some(b)));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.mu + 0.0,
            cell(r.s_left),
            r.s_left.is_some(),
            cell(r.s_right),
            r.s_right.is_some(),
            cell(slr),
            cell(srl),
            r.cycle.is_some()
        );
    }
    out
}

type Series = Box<dyn Fn(&SweepRow) -> Option<f64>>;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

/// Solid polylines for admissible fixed-point branches, dashed for the two
/// cycle branches.
pub fn to_svg(rows: &[SweepRow]) -> String {
    let mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let (mut x_lo, mut x_hi) = bounds(mus.iter().copied());
    let values = rows.iter().flat_map(|r| {
        [r.s_left, r.s_right, r.cycle.map(|c| c.0), r.cycle.map(|c| c.1)].into_iter().flatten()
    });
    let (mut y_lo, mut y_hi) = bounds(values.chain([0.0]));
    pad(&mut x_lo, &mut x_hi);
    pad(&mut y_lo, &mut y_hi);
    let px = |mu: f64| MARGIN + (mu - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let py = |s: f64| HEIGHT - MARGIN - (s - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    out.push_str("<style>.axis{stroke:#444;stroke-width:1}.branch{fill:none;stroke-width:2}.fixed-left{stroke:#1f77b4}.fixed-right{stroke:#d62728}.lr-cycle{stroke:#2ca02c;stroke-dasharray:6,4}text{font-family:sans-serif;font-size:13px}</style>\n");
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        MARGIN,
        py(0.0),
        WIDTH - MARGIN,
        py(0.0)
    );
    if x_lo <= 0.0 && 0.0 <= x_hi {
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            px(0.0),
            MARGIN,
            px(0.0),
            HEIGHT - MARGIN
        );
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">μ</text>"#, WIDTH - MARGIN + 8.0, py(0.0) + 4.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">s</text>"#, px(0.0f64.clamp(x_lo, x_hi)) + 6.0, MARGIN - 8.0);

    let series: [(&str, Series); 4] = [
        ("fixed-left", Box::new(|r| r.s_left)),
        ("fixed-right", Box::new(|r| r.s_right)),
        ("lr-cycle", Box::new(|r| r.cycle.map(|c| c.0))),
        ("lr-cycle", Box::new(|r| r.cycle.map(|c| c.1))),
    ];
    for (class, value) in &series {
        for run in runs(rows, value.as_ref()) {
            let points: Vec<String> = run.iter().map(|(mu, s)| format!("{:.2},{:.2}", px(*mu), py(*s))).collect();
            let _ = writeln!(out, r#"<polyline class="branch {class}" points="{}"/>"#, points.join(" "));
        }
    }
    let legend = [("fixed-left", "x^L"), ("fixed-right", "x^R"), ("lr-cycle", "LR-cycle")];
    for (i, (class, label)) in legend.iter().enumerate() {
        let y = 20.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line class="branch {class}" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            WIDTH - 150.0,
            WIDTH - 120.0,
            WIDTH - 112.0,
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn pad(lo: &mut f64, hi: &mut f64) {
    if !lo.is_finite() || !hi.is_finite() {
        (*lo, *hi) = (-1.0, 1.0);
    } else if *hi - *lo < 1e-12 {
        *lo -= 1.0;
        *hi += 1.0;
    } else {
        let m = 0.05 * (*hi - *lo);
        *lo -= m;
        *hi += m;
    }
}

/// Maximal stretches of consecutive rows where `value` is defined.
fn runs(rows: &[SweepRow], value: &dyn Fn(&SweepRow) -> Option<f64>) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current = Vec::new();
    for r in rows {
        match value(r) {
            Some(s) => current.push((r.mu, s)),
            None if !current.is_empty() => out.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out.into_iter().filter(|run| run.len() >= 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::model::PwlMap;

    #[test]
    fn grid_endpoints() {
        assert_eq!(mu_grid(-1.0, 1.0, 2), vec![-1.0, 1.0]);
        assert_eq!(mu_grid(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(mu_grid(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn panel_c_cycle_only_for_positive_mu() {
        let c = classify(&PwlMap::one_dimensional(0.4, -1.5, 1.0)).unwrap();
        let rows = sweep(&c, -1.0, 1.0, 41);
        for r in &rows {
            if r.mu > 0.0 {
                let (a, b) = r.cycle.unwrap();
                assert!((a + 0.3125 * r.mu).abs() < 1e-12 && (b - 0.875 * r.mu).abs() < 1e-12);
            } else if r.mu < 0.0 {
                assert!(r.cycle.is_none());
            }
        }
        let svg = to_svg(&rows);
        assert_eq!(svg.matches("polyline class=\"branch lr-cycle\"").count(), 2);
    }

    #[test]
    fn csv_layout() {
        let c = classify(&PwlMap::one_dimensional(0.4, -0.4, 1.0)).unwrap();
        let csv = to_csv(&sweep(&c, -1.0, 1.0, 2));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("-1,-1.6666666666666667,true,,false,"));
        assert!(!csv.contains('\r'));
    }
}
