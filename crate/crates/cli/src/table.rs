//! Plain-text tables. Values are rounded to 2 decimals for display only;
//! CSV outputs keep full precision.

use placeval::dea::yearly_range;
use placeval::{OutcomePanel, TreatmentEffectSeries};

fn cell(v: f64) -> String {
    if v == f64::INFINITY {
        "INF".into()
    } else if v == f64::NEG_INFINITY {
        "-INF".into()
    } else {
        format!("{v:.2}")
    }
}

fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

/// Years down, units across, with a per-year range column and a per-unit
/// mean row.
pub fn efficiency_table(panel: &OutcomePanel) -> String {
    let mut header = vec!["Year".to_string()];
    header.extend(panel.units().iter().cloned());
    header.push("Range".into());
    let ranges = yearly_range(panel);
    let mut rows: Vec<Vec<String>> = panel
        .years()
        .iter()
        .zip(panel.rows())
        .map(|(y, row)| {
            let mut r = vec![y.to_string()];
            r.extend(row.iter().map(|&v| cell(v)));
            r.push(cell(ranges[y]));
            r
        })
        .collect();
    let mut mean = vec!["Mean".to_string()];
    mean.extend(
        panel
            .units()
            .iter()
            .map(|u| cell(panel.column_mean(u).unwrap_or(f64::NAN))),
    );
    mean.push(String::new());
    rows.push(mean);
    render(&header, &rows)
}

pub fn effects_table(s: &TreatmentEffectSeries) -> String {
    let header: Vec<String> = ["Year", "Actual", "Counterfactual", "Effect"]
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows: Vec<Vec<String>> = (0..s.years.len())
        .map(|i| {
            vec![
                s.years[i].to_string(),
                cell(s.actual[i]),
                cell(s.counterfactual[i]),
                cell(s.effect[i]),
            ]
        })
        .collect();
    rows.push(vec![
        "Mean".into(),
        String::new(),
        String::new(),
        cell(s.mean_effect),
    ]);
    render(&header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn efficiency_layout() {
        let p = OutcomePanel::new(
            vec!["A".into(), "B".into()],
            vec![2000, 2001],
            vec![vec![1.0, 0.5], vec![f64::INFINITY, 0.25]],
            "e",
        )
        .unwrap();
        let t = efficiency_table(&p);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "Year     A     B  Range");
        assert_eq!(lines[1], "2000  1.00  0.50   0.50");
        assert_eq!(lines[2], "2001   INF  0.25    INF");
        assert_eq!(lines[3], "Mean   INF  0.38");
    }

    #[test]
    fn effects_layout() {
        let s = placeval::treatment_effects(&[0.6415, 0.5], &[0.4003, 0.6], &[2011, 2012]).unwrap();
        let t = effects_table(&s);
        assert!(t.starts_with("Year  Actual  Counterfactual  Effect\n"));
        assert!(t.contains("2011    0.64            0.40    0.24"));
        assert!(t.lines().last().unwrap().starts_with("Mean"));
    }
}
