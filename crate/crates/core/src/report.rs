//! JSON reports with sorted keys and 17-significant-digit floats.

use serde_json::{Map, Number, Value};

use crate::bound::BoundConstants;
use crate::perturb::PerturbBound;
use crate::poly::ComplexValue;
use crate::realize::{FeasibilityReport, SearchResult, Verdict, Verification};
use crate::spectrum::{HypothesisReport, SpectrumList};

/// A float as a JSON number with 17 significant digits; non-finite values
/// become the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        let v = if v == 0.0 { 0.0 } else { v };
        let text = format!("{v:.16e}");
        Value::Number(text.parse::<Number>().expect("formatted float is valid JSON"))
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn int(v: u64) -> Value {
    Value::Number(v.into())
}

pub fn opt_int(v: Option<usize>) -> Value {
    v.map_or(Value::Null, |v| int(v as u64))
}

/// Builds an object from `(key, value)` pairs; keys come out sorted.
pub fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

pub fn complex(z: ComplexValue) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn spectrum(s: &SpectrumList) -> Value {
    Value::Array(s.entries().iter().map(|z| complex(*z)).collect())
}

pub fn hypotheses(r: &HypothesisReport) -> Value {
    obj([
        ("perron_ok", Value::Bool(r.perron_ok)),
        ("perron_gap", num(r.perron_gap)),
        ("s1", num(r.s1)),
        ("s1_ok", Value::Bool(r.s1_ok)),
        ("cutoff_k", int(r.cutoff_k as u64)),
        (
            "min_power_sum",
            r.min_power_sum.map_or(Value::Null, |(k, v)| {
                obj([("index", int(k as u64)), ("value", num(v))])
            }),
        ),
        ("first_failure", opt_int(r.first_failure)),
        ("power_sums_ok", Value::Bool(r.power_sums_ok)),
        ("indeterminate", Value::Bool(r.indeterminate)),
        ("precision_bits_used", int(r.precision_bits_used as u64)),
        ("passed", Value::Bool(r.passed())),
        (
            "jll_violations",
            Value::Array(
                r.jll_violations
                    .iter()
                    .map(|v| {
                        obj([
                            ("k", int(v.k as u64)),
                            ("m", int(v.m as u64)),
                            ("slack", num(v.slack)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

pub fn constants(c: &BoundConstants) -> Value {
    obj([
        ("n", int(c.n as u64)),
        ("gamma", num(c.gamma)),
        ("lambda1", num(c.lambda1)),
        ("lambda0", num(c.lambda0)),
        ("R", num(c.big_r)),
        ("ell", num(c.ell)),
        ("r", num(c.r)),
        ("m", num(c.m)),
        ("N0", int(c.n0)),
        ("M", num(c.big_m)),
        ("delta", num(c.delta)),
        ("N_bound", c.n_bound.map_or(Value::Null, int)),
        ("log10_N_bound", num(c.log10_n_bound)),
        ("saturated", Value::Bool(c.saturated)),
    ])
}

pub fn feasibility(r: &FeasibilityReport, with_sequences: bool) -> Value {
    let mut v = obj([
        ("N", int(r.big_n as u64)),
        ("n", int(r.n as u64)),
        ("verdict", Value::String(r.verdict().as_str().into())),
        ("feasible", Value::Bool(r.feasible)),
        ("indeterminate", Value::Bool(r.indeterminate)),
        ("first_negative_index", opt_int(r.first_negative_index)),
        ("min_margin", num(r.min_margin)),
        ("precision_bits_used", int(r.precision_bits_used as u64)),
        ("q_coeffs", nums(&r.q_coeffs)),
    ]);
    if with_sequences {
        let m = v.as_object_mut().expect("object");
        m.insert("x_seq".into(), nums(&r.x_seq));
        m.insert("y_seq".into(), nums(&r.y_seq));
    }
    v
}

pub fn verification(v: &Verification) -> Value {
    let worst = v
        .trace_residuals
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    obj([
        ("k_verify", int(v.k_verify as u64)),
        ("trace_residuals", nums(&v.trace_residuals)),
        ("trace_tolerances", nums(&v.trace_tolerances)),
        ("max_trace_residual", num(worst)),
        ("charpoly_residual", v.charpoly_residual.map_or(Value::Null, num)),
        ("det_residual", v.det_residual.map_or(Value::Null, num)),
    ])
}

/// One character per dimension: `F` feasible, `.` infeasible, `?` undecided.
pub fn profile_string(s: &SearchResult) -> String {
    s.profile
        .iter()
        .map(|(_, v)| match v {
            Verdict::Feasible => 'F',
            Verdict::Infeasible => '.',
            Verdict::Indeterminate => '?',
        })
        .collect()
}

pub fn search(s: &SearchResult) -> Value {
    obj([
        ("first_feasible", opt_int(s.first_feasible)),
        (
            "scan_from",
            s.profile.first().map_or(Value::Null, |(n, _)| int(*n as u64)),
        ),
        (
            "scan_to",
            s.profile.last().map_or(Value::Null, |(n, _)| int(*n as u64)),
        ),
        ("profile", Value::String(profile_string(s))),
    ])
}

pub fn perturb(b: &PerturbBound) -> Value {
    obj([
        ("gamma_pair", num(b.gamma_pair)),
        ("bound_bek", num(b.bound_bek)),
        ("bound_ostrowski", num(b.bound_ostrowski)),
        ("coefficient_gap", nums(&b.coefficient_gap)),
    ])
}

/// Pretty JSON followed by a newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
