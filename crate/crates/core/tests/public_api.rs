use qorder_core::limits::{c_s_surface, commutativity_gap, GapOptions};
use qorder_core::qset::QOrdering;
use qorder_core::{LimitReport, OrderedQ, StripPoint, SumSurface};

fn first_zero() -> StripPoint {
    StripPoint::on_critical_line(14.134725141734694).unwrap()
}

fn ordering() -> OrderedQ {
    QOrdering::seeded_shuffle(7, 20, 200).enumerate().unwrap()
}

#[test]
fn limit_report_json_round_trips_with_documented_fields() {
    let report = commutativity_gap(first_zero(), &ordering(), 16, 1000, GapOptions::default()).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "point",
        "orderingId",
        "A_cos",
        "A_sin",
        "A_convergence",
        "B_cos",
        "B_sin",
        "B_errorEstimate",
        "B_consistent",
        "oracleB_cos",
        "oracleB_sin",
        "gap_cos",
        "gap_sin",
        "hMax",
        "budget",
        "tolerances",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let back: LimitReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn strip_point_rejects_invalid_json() {
    assert!(serde_json::from_str::<StripPoint>(r#"{"x": -1.0, "y": 0.0}"#).is_err());
    let p: StripPoint = serde_json::from_str(r#"{"x": 0.5, "y": 3.0}"#).unwrap();
    assert!(p.in_critical_strip());
}

#[test]
fn surface_csv_round_trips_at_binary64() {
    let n_axis: Vec<u64> = (10..=500).step_by(49).collect();
    let h_axis: Vec<usize> = vec![0, 3, 11, 20];
    let surface: SumSurface = c_s_surface(first_zero(), &ordering(), &n_axis, &h_axis).unwrap();
    let mut buf = Vec::new();
    surface.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,h,C,S"));
    let mut count = 0;
    for (row, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let (i, j) = (row / h_axis.len(), row % h_axis.len());
        assert_eq!(cols[0].parse::<u64>().unwrap(), n_axis[i]);
        assert_eq!(cols[1].parse::<usize>().unwrap(), h_axis[j]);
        assert_eq!(cols[2].parse::<f64>().unwrap().to_bits(), surface.c_at(i, j).to_bits());
        assert_eq!(cols[3].parse::<f64>().unwrap().to_bits(), surface.s_at(i, j).to_bits());
        count += 1;
    }
    assert_eq!(count, n_axis.len() * h_axis.len());
}

#[test]
fn ordering_id_is_carried_into_outputs() {
    let ord = ordering();
    let surface = c_s_surface(first_zero(), &ord, &[5], &[1]).unwrap();
    assert_eq!(surface.ordering_id, ord.id());
    assert!(ord.id().contains('7'));
}
