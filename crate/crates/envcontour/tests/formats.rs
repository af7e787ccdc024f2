use envcontour::formats::{self, EstimateRow};
use envcontour::AppError;
use envcontour_core::calibration::reference_model;
use envcontour_core::geometry::{halfspace_intersection, SupportGrid};

fn text(f: impl FnOnce(&mut Vec<u8>) -> envcontour::AppResult<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn grid_round_trip() {
    let grid = SupportGrid::from_fn(7, |u| 2.0 + 0.3 * u.angle().cos()).unwrap();
    let csv = text(|w| formats::write_grid(w, &grid));
    assert!(csv.starts_with("angle_rad,threshold\n0,"));
    assert_eq!(formats::read_grid(csv.as_bytes()).unwrap(), grid);
}

#[test]
fn grid_angles_must_be_uniform() {
    let csv = "angle_rad,threshold\n0,1\n2,1\n4,1\n";
    let err = formats::read_grid(csv.as_bytes()).unwrap_err();
    assert!(matches!(err, AppError::Input(ref m) if m.contains("line 3")), "{err}");
}

#[test]
fn polygon_round_trip() {
    let grid = SupportGrid::constant(8, 1.5).unwrap();
    let poly = halfspace_intersection(&grid).unwrap();
    let csv = text(|w| formats::write_polygon(w, &poly));
    assert!(csv.starts_with("x,y\n"));
    assert_eq!(formats::read_polygon(csv.as_bytes()).unwrap(), poly);
}

#[test]
fn clockwise_polygon_is_rejected() {
    let csv = "x,y\n0,0\n0,1\n1,1\n1,0\n";
    assert!(matches!(formats::read_polygon(csv.as_bytes()), Err(AppError::Input(_))));
}

#[test]
fn estimate_round_trip() {
    let rows = vec![
        EstimateRow { angle_rad: 0.0, c_value: 1.25, std_err: 0.01, n_paths: 1000, censored_frac: 0.0 },
        EstimateRow { angle_rad: 3.0, c_value: -0.5, std_err: 0.02, n_paths: 1000, censored_frac: 0.125 },
    ];
    let csv = text(|w| formats::write_estimates(w, &rows));
    assert_eq!(csv.lines().next(), Some("angle_rad,c_value,std_err,n_paths,censored_frac"));
    assert_eq!(formats::read_estimates(csv.as_bytes()).unwrap(), rows);
}

#[test]
fn series_skips_bad_rows_with_a_count() {
    let csv = "t_hours,hs_m,tz_s\n0,1.5,6\n1,oops,6\n2,1.7,6.2\n3,-1,6\n2,1.9,6\n4,2.0\n";
    let ingest = formats::read_series(csv.as_bytes()).unwrap();
    assert_eq!(ingest.series.t(), &[0.0, 2.0]);
    assert_eq!(ingest.malformed.len(), 2);
    assert!(ingest.malformed[0].contains("line 3, column hs_m"), "{:?}", ingest.malformed);
    assert!(ingest.malformed[1].contains("line 7: expected 3 columns"), "{:?}", ingest.malformed);
    // The negative height and the repeated timestamp.
    assert_eq!(ingest.dropped, 2);
    assert_eq!(ingest.warning_count(), 4);
}

#[test]
fn series_header_is_checked() {
    let err = formats::read_series("time,hs,tz\n0,1,1\n".as_bytes()).unwrap_err();
    assert!(err.to_string().contains("expected header 't_hours,hs_m,tz_s'"), "{err}");
    let err = formats::read_series("".as_bytes()).unwrap_err();
    assert!(err.to_string().contains("insufficient data"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn model_round_trip_and_unknown_fields() {
    let model = reference_model();
    let json = text(|w| formats::write_json(w, &model));
    assert_eq!(formats::read_model(json.as_bytes()).unwrap(), model);
    let typo = json.replacen("\"c2\"", "\"c_2\"", 1);
    assert!(formats::read_model(typo.as_bytes()).is_err());
}

#[test]
fn shipped_schema_matches_serialized_model() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/sea_state_model.schema.json")).unwrap();
    let model = serde_json::to_value(reference_model()).unwrap();
    let mut fields: Vec<&String> = model.as_object().unwrap().keys().collect();
    let mut documented: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
    fields.sort();
    documented.sort();
    assert_eq!(fields, documented);
    for req in schema["required"].as_array().unwrap() {
        assert!(model.get(req.as_str().unwrap()).is_some());
    }
    let fourier: Vec<&String> = schema["$defs"]["fourier"]["properties"].as_object().unwrap().keys().collect();
    let mut got: Vec<&String> = model["log_l"].as_object().unwrap().keys().collect();
    got.sort();
    let mut want = fourier.clone();
    want.sort();
    assert_eq!(got, want);
}
