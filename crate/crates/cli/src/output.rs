//! Fixed-precision CSV and JSON rendering of rate records.

use std::io::Write;

use serde_json::{json, Map, Value};

use phaserate::sweep::RateRecord;

pub const CSV_HEADER: &str = "energy,m,eta,n_th,scheme,rate_nats,rate_over_capacity,params,truncation_n,tail_mass,converged";

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".into()
    }
}

fn round12(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt_num(x).parse::<f64>().unwrap_or(x))
    } else {
        Value::Null
    }
}

fn scale(r: &RateRecord, bits: bool) -> f64 {
    if bits {
        r.rate_nats / std::f64::consts::LN_2
    } else {
        r.rate_nats
    }
}

pub fn unit(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

fn params_field(r: &RateRecord) -> String {
    r.params.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect::<Vec<_>>().join(";")
}

pub fn csv_row(r: &RateRecord, bits: bool) -> String {
    [
        fmt_num(r.energy),
        r.m.to_string(),
        fmt_num(r.eta),
        fmt_num(r.n_th),
        r.scheme.clone(),
        fmt_num(scale(r, bits)),
        fmt_num(r.rate_over_capacity),
        params_field(r),
        r.truncation_n.to_string(),
        fmt_num(r.tail_mass),
        r.converged.to_string(),
    ]
    .join(",")
}

pub fn json_record(r: &RateRecord, bits: bool) -> Value {
    let mut params = Map::new();
    for (k, v) in &r.params {
        params.insert(k.clone(), round12(*v));
    }
    let mut obj = json!({
        "energy": round12(r.energy),
        "m": r.m,
        "eta": round12(r.eta),
        "n_th": round12(r.n_th),
        "scheme": r.scheme,
        "rate_nats": round12(scale(r, bits)),
        "rate_over_capacity": round12(r.rate_over_capacity),
        "params": params,
        "truncation_n": r.truncation_n,
        "tail_mass": round12(r.tail_mass),
        "converged": r.converged,
        "unit": unit(bits),
    });
    if let Some(e) = &r.error {
        obj["error"] = json!(e);
    }
    obj
}

pub fn write_csv(w: &mut impl Write, records: &[RateRecord], bits: bool) -> std::io::Result<()> {
    writeln!(w, "# rate unit: {}", unit(bits))?;
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_row(r, bits))?;
    }
    Ok(())
}

pub fn write_jsonl(w: &mut impl Write, records: &[RateRecord], bits: bool) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{}", json_record(r, bits))?;
    }
    Ok(())
}
