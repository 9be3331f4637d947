use serde_json::Value;
use sos_cert_web::{bounds_json, certify_json, variety_json};

const TWO_POINTS: &str = "vars: x, y\nf: x + y + 3\ng: y\nh: x^2 - 1\nh: y^2 - x - 2\n";

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn variety_lists_the_points() {
    let v = parse(&variety_json(TWO_POINTS));
    assert_eq!(v["ok"], true, "{}", v);
    assert_eq!(v["dim"], 4);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    assert_eq!(points.iter().filter(|p| p["real"] == true).count(), 4);
    assert_eq!(points.iter().filter(|p| p["in_s"] == true).count(), 2);
}

#[test]
fn certify_returns_a_verified_certificate() {
    for engine in ["constructive", "sdp"] {
        let v = parse(&certify_json(TWO_POINTS, "strict", engine));
        assert_eq!(v["ok"], true, "{}", v);
        assert_eq!(v["verified"], true);
        assert!(v["certificate"].as_str().unwrap().starts_with("sos-cert certificate"));
    }
}

#[test]
fn errors_come_back_as_json() {
    let v = parse(&certify_json("vars: x\nf: x\nh: x^2\n", "nonneg", "constructive"));
    assert_eq!(v["ok"], false);
    assert!(!v["error"].as_str().unwrap().is_empty());
    let v = parse(&variety_json("vars: x\nf: (x\nh: x\n"));
    assert_eq!(v["ok"], false);
}

#[test]
fn bounds_match_the_command_line() {
    let v = parse(&bounds_json(TWO_POINTS, 1.0));
    assert_eq!(v["degree_bound"], 5);
    assert_eq!(v["hierarchy_order"], 3);
}
