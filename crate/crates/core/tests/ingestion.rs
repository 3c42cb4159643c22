use std::io::Write;

use proptest::prelude::*;

use placeval::dea::yearly_range;
use placeval::panel::{read_outcome_panel, table1_printed_range};
use placeval::{bundled_table1, load_dea_dataset, load_outcome_panel, write_panel, OutcomePanel};

#[test]
fn synthetic_dea_file_round_trip() {
    let data = placeval::synthetic::dea_dataset(20, 1995, 21, 4, 1, 1).unwrap();
    let mut file = tempfile::NamedTempFile::new().unwrap();
    data.write_csv(&mut file).unwrap();
    file.flush().unwrap();
    let back = load_dea_dataset(file.path()).unwrap();
    assert_eq!(back.n_units(), 20);
    assert_eq!(back.years().len(), 21);
    assert_eq!((back.n_inputs(), back.n_outputs()), (4, 1));
    assert_eq!(back, data);
}

#[test]
fn table1_file_on_disk_matches_bundle() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/table1_efficiency.csv"
    );
    let p = load_outcome_panel(path, "super_efficiency").unwrap();
    assert_eq!(p, bundled_table1());
    assert_eq!(p.value(1995, "Zhoushan"), Some(0.70));
}

#[test]
fn table1_ranges_within_rounding() {
    let ranges = yearly_range(&bundled_table1());
    for (year, printed) in table1_printed_range() {
        assert!((ranges[&year] - printed).abs() <= 0.015, "{year}");
    }
    assert!((ranges[&2004] - 0.73).abs() <= 0.015);
    assert!((ranges[&2014] - 0.65).abs() <= 0.015);
}

#[test]
fn write_then_load_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    write_panel(&bundled_table1(), &path).unwrap();
    let p = load_outcome_panel(&path, "super_efficiency").unwrap();
    assert_eq!(p, bundled_table1());
}

fn panel_strategy() -> impl Strategy<Value = OutcomePanel> {
    (1usize..6, 1usize..8).prop_flat_map(|(units, years)| {
        prop::collection::vec(prop::collection::vec(-1e6f64..1e6, units), years).prop_map(
            move |values| {
                OutcomePanel::new(
                    (0..units).map(|u| format!("u{u}")).collect(),
                    (1990..1990 + years as i32).collect(),
                    values,
                    "x",
                )
                .unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn csv_round_trip(panel in panel_strategy()) {
        let s = panel.to_csv_string();
        let back = read_outcome_panel(s.as_bytes(), "x").unwrap();
        prop_assert_eq!(&back, &panel);
        prop_assert_eq!(back.to_csv_string(), s);
    }
}
