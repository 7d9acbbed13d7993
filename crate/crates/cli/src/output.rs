//! JSON envelopes and CSV tables.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use qrwr_core::sweep::{ScenarioLine, SweepResult};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits kept for every floating-point number in JSON output.
pub const JSON_SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope<T: Serialize> {
    pub command: String,
    pub config_hash: String,
    pub engine_version: &'static str,
    pub payload: T,
}

/// Rounds a float to [`JSON_SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", JSON_SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = round_value(serde_json::to_value(value).expect("payload serializes"));
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// CSV number: shortest round-trip text of the rounded value, in exponent
/// form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let x = round_significant(x);
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One row per grid node, x-major. The first two header fields are the
/// swept parameters' names.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!(
        "{},{},value,feasible\n",
        result.x.parameter, result.y.parameter
    );
    for (x, y, node) in result.rows() {
        let value = node.value.map(num).unwrap_or_default();
        writeln!(out, "{},{},{},{}", num(x), num(y), value, node.feasible())
            .expect("write to string");
    }
    out
}

pub const SCENARIO_HEADER: &str = "range_km,weather,eta_atm,eta_x,eta_r,eta_t,ratio,r_m";

pub fn scenario_csv(lines: &[ScenarioLine]) -> String {
    let mut out = format!("{SCENARIO_HEADER}\n");
    for line in lines {
        for p in &line.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                num(p.range_km),
                line.weather,
                num(p.eta_atm),
                num(p.eta_x),
                num(p.eta_r),
                num(p.eta_t),
                num(p.ratio),
                num(p.rm.rm)
            )
            .expect("write to string");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(
            round_significant(0.078_649_603_525_143_2),
            0.078_649_603_525_1
        );
        assert_eq!(round_significant(1.0 / 3.0), 0.333_333_333_333);
        assert_eq!(
            round_significant(-2.546_479_089_470_325e-10),
            -2.546_479_089_47e-10
        );
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(round_significant(1e300), 1e300);
    }

    #[test]
    fn csv_numbers() {
        assert_eq!(num(25.0), "25");
        assert_eq!(num(0.0455), "0.0455");
        assert_eq!(num(2.546_479_089_470_325e-10), "2.54647908947e-10");
        assert_eq!(num(1e20), "1e20");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn nested_values_rounded() {
        let v = serde_json::json!({"a": [1.0 / 3.0, 2], "b": {"c": 2.0 / 3.0}, "n": 7u64});
        let s = to_json(&v);
        assert!(s.contains("0.333333333333"));
        assert!(s.contains("0.666666666667"));
        assert!(s.contains("\"n\": 7"));
    }
}
