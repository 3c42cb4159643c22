//! Outcome panels, DEA input/output datasets and evaluation settings.
//!
//! Both CSV layouts are strict: cells may not be blank, years must be
//! consecutive and every unit must appear in every year.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::AicVariant;

/// A rectangular year x unit matrix of one outcome variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomePanel {
    unit_names: Vec<String>,
    years: Vec<i32>,
    /// Row-major, `values[year_idx][unit_idx]`.
    values: Vec<Vec<f64>>,
    outcome_label: String,
}

fn check_years(years: &[i32]) -> Result<()> {
    if years.is_empty() {
        return Err(Error::Validation("no years".into()));
    }
    for w in years.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::Validation(format!(
                "years must be consecutive and increasing, found {} followed by {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn check_units(units: &[String]) -> Result<()> {
    if units.is_empty() {
        return Err(Error::Validation("no units".into()));
    }
    let mut seen = HashSet::new();
    for u in units {
        if !seen.insert(u.as_str()) {
            return Err(Error::Validation(format!("duplicate unit {u:?}")));
        }
    }
    Ok(())
}

impl OutcomePanel {
    /// Builds a panel, checking shape, year continuity and unit uniqueness.
    /// Cells may be `+inf` (flagged infeasible DEA cells) but never NaN.
    pub fn new(
        unit_names: Vec<String>,
        years: Vec<i32>,
        values: Vec<Vec<f64>>,
        outcome_label: impl Into<String>,
    ) -> Result<Self> {
        check_units(&unit_names)?;
        check_years(&years)?;
        if values.len() != years.len() {
            return Err(Error::Validation(format!(
                "{} value rows for {} years",
                values.len(),
                years.len()
            )));
        }
        for (row, &year) in values.iter().zip(&years) {
            if row.len() != unit_names.len() {
                return Err(Error::Validation(format!(
                    "year {year} has {} values for {} units",
                    row.len(),
                    unit_names.len()
                )));
            }
            if let Some(u) = row.iter().position(|v| v.is_nan()) {
                return Err(Error::MissingCell {
                    year,
                    unit: unit_names[u].clone(),
                });
            }
        }
        Ok(Self {
            unit_names,
            years,
            values,
            outcome_label: outcome_label.into(),
        })
    }

    pub fn units(&self) -> &[String] {
        &self.unit_names
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn outcome_label(&self) -> &str {
        &self.outcome_label
    }

    pub fn n_units(&self) -> usize {
        self.unit_names.len()
    }

    pub fn n_years(&self) -> usize {
        self.years.len()
    }

    pub fn unit_index(&self, unit: &str) -> Option<usize> {
        self.unit_names.iter().position(|u| u == unit)
    }

    pub fn year_index(&self, year: i32) -> Option<usize> {
        let first = *self.years.first()?;
        let idx = usize::try_from(year.checked_sub(first)?).ok()?;
        (idx < self.years.len()).then_some(idx)
    }

    pub fn value(&self, year: i32, unit: &str) -> Option<f64> {
        Some(self.values[self.year_index(year)?][self.unit_index(unit)?])
    }

    /// All units' values for one year.
    pub fn row(&self, year_idx: usize) -> &[f64] {
        &self.values[year_idx]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// The time series of one unit.
    pub fn column(&self, unit_idx: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[unit_idx]).collect()
    }

    /// The time series of one unit restricted to `years`.
    pub fn series(&self, unit: &str, years: &[i32]) -> Result<Vec<f64>> {
        let u = self
            .unit_index(unit)
            .ok_or_else(|| Error::Argument(format!("unknown unit {unit:?}")))?;
        years
            .iter()
            .map(|&y| {
                self.year_index(y)
                    .map(|t| self.values[t][u])
                    .ok_or_else(|| Error::Argument(format!("year {y} not in panel")))
            })
            .collect()
    }

    /// Arithmetic mean of one unit's series over all years.
    pub fn column_mean(&self, unit: &str) -> Option<f64> {
        let u = self.unit_index(unit)?;
        let sum: f64 = self.values.iter().map(|r| r[u]).sum();
        Some(sum / self.years.len() as f64)
    }

    /// Writes the panel in the wide CSV layout with shortest round-trip
    /// float formatting; infinite cells are written as `INF`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = Vec::with_capacity(self.unit_names.len() + 1);
        header.push("year".to_string());
        header.extend(self.unit_names.iter().cloned());
        w.write_record(&header)?;
        for (year, row) in self.years.iter().zip(&self.values) {
            let mut rec = Vec::with_capacity(row.len() + 1);
            rec.push(year.to_string());
            rec.extend(row.iter().map(|&v| format_value(v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Canonical cell formatting shared by every CSV the toolkit writes.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "INF".to_string()
    } else if v == f64::NEG_INFINITY {
        "-INF".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_panel(panel: &OutcomePanel, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    panel.write_csv(std::io::BufWriter::new(file))
}

/// Reads a wide outcome panel: header `year,<unit>...`, one row per year.
pub fn load_outcome_panel(path: impl AsRef<Path>, outcome_label: &str) -> Result<OutcomePanel> {
    let file = std::fs::File::open(path)?;
    read_outcome_panel(file, outcome_label)
}

pub fn read_outcome_panel<R: Read>(reader: R, outcome_label: &str) -> Result<OutcomePanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0).map(str::trim) != Some("year") {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: "first header must be `year`".into(),
        });
    }
    let units: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    check_units(&units)?;

    let mut years = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let year: i32 = rec
            .get(0)
            .map(str::trim)
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::Parse {
                row,
                col: 1,
                message: format!("invalid year {:?}", rec.get(0).unwrap_or("")),
            })?;
        if rec.len() > units.len() + 1 {
            return Err(Error::Parse {
                row,
                col: units.len() + 2,
                message: format!("{} fields, header has {}", rec.len(), units.len() + 1),
            });
        }
        let mut vals = Vec::with_capacity(units.len());
        for (u, unit) in units.iter().enumerate() {
            let cell = rec.get(u + 1).map(str::trim).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::MissingCell {
                    year,
                    unit: unit.clone(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: u + 2,
                message: format!("non-numeric value {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    col: u + 2,
                    message: format!("non-finite value {cell:?}"),
                });
            }
            vals.push(v);
        }
        years.push(year);
        values.push(vals);
    }
    OutcomePanel::new(units, years, values, outcome_label)
}

/// Per-year cross sections of strictly positive inputs and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DeaDataset {
    unit_names: Vec<String>,
    years: Vec<i32>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    /// `inputs[year_idx][unit_idx][i]`
    inputs: Vec<Vec<Vec<f64>>>,
    /// `outputs[year_idx][unit_idx][k]`
    outputs: Vec<Vec<Vec<f64>>>,
}

impl DeaDataset {
    pub fn new(
        unit_names: Vec<String>,
        years: Vec<i32>,
        input_labels: Vec<String>,
        output_labels: Vec<String>,
        inputs: Vec<Vec<Vec<f64>>>,
        outputs: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        check_units(&unit_names)?;
        check_years(&years)?;
        if unit_names.len() < 2 {
            return Err(Error::Validation(
                "DEA needs at least 2 units per year".into(),
            ));
        }
        if input_labels.is_empty() || output_labels.is_empty() {
            return Err(Error::Validation(
                "DEA needs at least one input and one output".into(),
            ));
        }
        for (block, labels, kind) in [
            (&inputs, &input_labels, "input"),
            (&outputs, &output_labels, "output"),
        ] {
            if block.len() != years.len() {
                return Err(Error::Validation(format!(
                    "{kind} block has wrong year count"
                )));
            }
            for (t, per_unit) in block.iter().enumerate() {
                if per_unit.len() != unit_names.len() {
                    return Err(Error::Validation(format!(
                        "{kind} block has wrong unit count in year {}",
                        years[t]
                    )));
                }
                for (j, v) in per_unit.iter().enumerate() {
                    if v.len() != labels.len() {
                        return Err(Error::Validation(format!(
                            "{kind} vector of {:?} in {} has length {}, expected {}",
                            unit_names[j],
                            years[t],
                            v.len(),
                            labels.len()
                        )));
                    }
                    for (c, &x) in v.iter().enumerate() {
                        if !(x > 0.0 && x.is_finite()) {
                            return Err(Error::Domain {
                                year: years[t],
                                unit: unit_names[j].clone(),
                                column: labels[c].clone(),
                                value: x,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self {
            unit_names,
            years,
            input_labels,
            output_labels,
            inputs,
            outputs,
        })
    }

    pub fn units(&self) -> &[String] {
        &self.unit_names
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn n_units(&self) -> usize {
        self.unit_names.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_labels.len()
    }

    pub fn unit_index(&self, unit: &str) -> Option<usize> {
        self.unit_names.iter().position(|u| u == unit)
    }

    pub fn year_index(&self, year: i32) -> Option<usize> {
        self.years.iter().position(|&y| y == year)
    }

    pub fn inputs(&self, year_idx: usize, unit_idx: usize) -> &[f64] {
        &self.inputs[year_idx][unit_idx]
    }

    pub fn outputs(&self, year_idx: usize, unit_idx: usize) -> &[f64] {
        &self.outputs[year_idx][unit_idx]
    }

    /// Returns a copy with input column `i` multiplied by `factor` in every
    /// unit and year.
    pub fn scale_input(&self, i: usize, factor: f64) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.iter_mut().flatten().for_each(|v| v[i] *= factor);
        Self::new(
            self.unit_names.clone(),
            self.years.clone(),
            self.input_labels.clone(),
            self.output_labels.clone(),
            inputs,
            self.outputs.clone(),
        )
    }

    pub fn scale_output(&self, k: usize, factor: f64) -> Result<Self> {
        let mut outputs = self.outputs.clone();
        outputs.iter_mut().flatten().for_each(|v| v[k] *= factor);
        Self::new(
            self.unit_names.clone(),
            self.years.clone(),
            self.input_labels.clone(),
            self.output_labels.clone(),
            self.inputs.clone(),
            outputs,
        )
    }

    /// Writes the long CSV layout `year,unit,in:<name>...,out:<name>...`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["year".to_string(), "unit".to_string()];
        header.extend(self.input_labels.iter().map(|l| format!("in:{l}")));
        header.extend(self.output_labels.iter().map(|l| format!("out:{l}")));
        w.write_record(&header)?;
        for (t, year) in self.years.iter().enumerate() {
            for (j, unit) in self.unit_names.iter().enumerate() {
                let mut rec = vec![year.to_string(), unit.clone()];
                rec.extend(self.inputs[t][j].iter().map(|&v| format_value(v)));
                rec.extend(self.outputs[t][j].iter().map(|&v| format_value(v)));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One unit's (inputs, outputs) in one year.
type Cell = (Vec<f64>, Vec<f64>);

enum Role {
    Input(usize),
    Output(usize),
}

pub fn load_dea_dataset(path: impl AsRef<Path>) -> Result<DeaDataset> {
    let file = std::fs::File::open(path)?;
    read_dea_dataset(file)
}

pub fn read_dea_dataset<R: Read>(reader: R) -> Result<DeaDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let name = |c: usize| header.get(c).map(str::trim).unwrap_or("");
    if name(0) != "year" || name(1) != "unit" {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: "headers must start with `year,unit`".into(),
        });
    }
    let mut input_labels = Vec::new();
    let mut output_labels = Vec::new();
    let mut roles = Vec::new();
    for c in 2..header.len() {
        let h = name(c);
        if let Some(l) = h.strip_prefix("in:") {
            roles.push(Role::Input(input_labels.len()));
            input_labels.push(l.to_string());
        } else if let Some(l) = h.strip_prefix("out:") {
            roles.push(Role::Output(output_labels.len()));
            output_labels.push(l.to_string());
        } else {
            return Err(Error::Parse {
                row: 1,
                col: c + 1,
                message: format!("column {h:?} lacks an `in:` or `out:` prefix"),
            });
        }
    }
    if input_labels.is_empty() || output_labels.is_empty() {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: "need at least one `in:` and one `out:` column".into(),
        });
    }

    let mut unit_names: Vec<String> = Vec::new();
    let mut unit_pos: HashMap<String, usize> = HashMap::new();
    let mut cells: BTreeMap<i32, HashMap<usize, Cell>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row,
                col: rec.len().min(header.len()) + 1,
                message: format!("{} fields, header has {}", rec.len(), header.len()),
            });
        }
        let year: i32 = rec[0].trim().parse().map_err(|_| Error::Parse {
            row,
            col: 1,
            message: format!("invalid year {:?}", &rec[0]),
        })?;
        let unit = rec[1].trim().to_string();
        if unit.is_empty() {
            return Err(Error::Parse {
                row,
                col: 2,
                message: "empty unit name".into(),
            });
        }
        let mut ins = vec![0.0; input_labels.len()];
        let mut outs = vec![0.0; output_labels.len()];
        for (c, role) in roles.iter().enumerate() {
            let cell = rec[c + 2].trim();
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: c + 3,
                message: format!("non-numeric value {cell:?}"),
            })?;
            let (slot, label) = match *role {
                Role::Input(k) => (&mut ins[k], &input_labels[k]),
                Role::Output(k) => (&mut outs[k], &output_labels[k]),
            };
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain {
                    year,
                    unit,
                    column: label.clone(),
                    value: v,
                });
            }
            *slot = v;
        }
        let u = *unit_pos.entry(unit.clone()).or_insert_with(|| {
            unit_names.push(unit.clone());
            unit_names.len() - 1
        });
        if cells
            .entry(year)
            .or_default()
            .insert(u, (ins, outs))
            .is_some()
        {
            return Err(Error::Validation(format!(
                "duplicate row for year {year}, unit {unit:?}"
            )));
        }
    }

    let years: Vec<i32> = cells.keys().copied().collect();
    let mut inputs = Vec::with_capacity(years.len());
    let mut outputs = Vec::with_capacity(years.len());
    for (year, mut by_unit) in cells {
        let mut yi = Vec::with_capacity(unit_names.len());
        let mut yo = Vec::with_capacity(unit_names.len());
        for (u, unit) in unit_names.iter().enumerate() {
            let (i, o) = by_unit.remove(&u).ok_or_else(|| Error::MissingCell {
                year,
                unit: unit.clone(),
            })?;
            yi.push(i);
            yo.push(o);
        }
        inputs.push(yi);
        outputs.push(yo);
    }
    DeaDataset::new(
        unit_names,
        years,
        input_labels,
        output_labels,
        inputs,
        outputs,
    )
}

/// Settings for one counterfactual evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub treated_unit: String,
    /// Last pre-treatment year.
    pub intervention_year: i32,
    #[serde(default)]
    pub outcome_label: String,
    #[serde(default)]
    pub excluded_units: Vec<String>,
    #[serde(default)]
    pub max_subset_size: Option<usize>,
    #[serde(default)]
    pub aic_variant: AicVariant,
}

impl EvaluationConfig {
    pub fn new(treated_unit: impl Into<String>, intervention_year: i32) -> Self {
        Self {
            treated_unit: treated_unit.into(),
            intervention_year,
            outcome_label: String::new(),
            excluded_units: Vec::new(),
            max_subset_size: None,
            aic_variant: AicVariant::default(),
        }
    }

    /// Checks the config against a panel: the treated unit exists and is not
    /// excluded, and the intervention year leaves at least 3 pre years and
    /// 1 post year.
    pub fn validate(&self, panel: &OutcomePanel) -> Result<()> {
        if panel.unit_index(&self.treated_unit).is_none() {
            return Err(Error::Validation(format!(
                "treated unit {:?} not in panel",
                self.treated_unit
            )));
        }
        for u in &self.excluded_units {
            if u == &self.treated_unit {
                return Err(Error::Validation(format!(
                    "treated unit {u:?} is listed as excluded"
                )));
            }
            if panel.unit_index(u).is_none() {
                return Err(Error::Validation(format!(
                    "excluded unit {u:?} not in panel"
                )));
            }
        }
        let pre = self.pre_years(panel).len();
        let post = panel.n_years() - pre;
        if panel.year_index(self.intervention_year).is_none() || pre < 3 || post < 1 {
            return Err(Error::Validation(format!(
                "intervention year {} must leave >= 3 pre years and >= 1 post year in {}..={}",
                self.intervention_year,
                panel.years()[0],
                panel.years()[panel.n_years() - 1]
            )));
        }
        if self.max_subset_size == Some(0) {
            return Err(Error::Validation("max_subset_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn pre_years(&self, panel: &OutcomePanel) -> Vec<i32> {
        panel
            .years()
            .iter()
            .copied()
            .filter(|&y| y <= self.intervention_year)
            .collect()
    }

    pub fn post_years(&self, panel: &OutcomePanel) -> Vec<i32> {
        panel
            .years()
            .iter()
            .copied()
            .filter(|&y| y > self.intervention_year)
            .collect()
    }

    /// Candidate control units in panel order: everything except the treated
    /// unit and the excluded units.
    pub fn candidates(&self, panel: &OutcomePanel) -> Vec<String> {
        panel
            .units()
            .iter()
            .filter(|u| **u != self.treated_unit && !self.excluded_units.contains(u))
            .cloned()
            .collect()
    }
}

const TABLE1_CSV: &str = include_str!("../../../data/table1_efficiency.csv");

/// The published super-efficiency scores of 20 cities, 1995-2015, stored
/// exactly as printed (2 decimals).
pub fn bundled_table1() -> OutcomePanel {
    read_outcome_panel(TABLE1_CSV.as_bytes(), "super_efficiency").expect("bundled fixture is valid")
}

/// The printed per-city mean row accompanying the bundled fixture.
pub fn table1_printed_mean() -> Vec<(&'static str, f64)> {
    vec![
        ("Zhoushan", 0.61),
        ("Wuxi", 1.30),
        ("Changzhou", 0.91),
        ("Suzhou", 1.09),
        ("Nantong", 0.91),
        ("Lianyungang", 0.62),
        ("Yancheng", 0.92),
        ("Yangzhou", 0.89),
        ("Zhenjiang", 1.03),
        ("Wenzhou", 0.95),
        ("Huzhou", 0.88),
        ("Jinhua", 1.22),
        ("Quzhou", 0.68),
        ("Bengbu", 0.68),
        ("Huainan", 0.61),
        ("Huaibei", 0.61),
        ("Tongling", 0.63),
        ("Anqing", 0.70),
        ("Huangshan", 0.56),
        ("Chuzhou", 0.89),
    ]
}

/// The printed per-year range column (max - min over the 20 cities).
pub fn table1_printed_range() -> Vec<(i32, f64)> {
    let r = [
        1.23, 1.75, 1.57, 1.72, 1.24, 1.48, 0.99, 1.13, 0.83, 0.73, 0.69, 0.83, 0.89, 0.78, 0.81,
        0.83, 0.70, 0.70, 0.84, 0.65, 0.89,
    ];
    (1995..).zip(r).collect()
}
