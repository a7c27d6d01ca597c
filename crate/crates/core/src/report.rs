//! Text rendering shared by the CLI and the acceptance suite.
//!
//! Numbers are printed like C's `%.{d}g`: `d` significant digits, trailing
//! zeros dropped, scientific notation outside `1e-4 ≤ |x| < 10^d`.
//! Raw values use 17 digits (enough to round-trip an `f64`), summaries 6.

use crate::montecarlo::ExperimentSummary;

pub const RAW_DIGITS: usize = 17;
pub const SUMMARY_DIGITS: usize = 6;

pub const SUMMARY_HEADER: [&str; 12] = [
    "lambda", "c", "T", "n", "delta", "estimator", "reps", "bias", "rmse", "min", "max", "saturated",
];

/// `%.{digits}g` formatting.
pub fn format_g(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One summary CSV row in [`SUMMARY_HEADER`] order.
pub fn summary_record(s: &ExperimentSummary, digits: usize) -> Vec<String> {
    let g = |x: f64| format_g(x, digits);
    vec![
        g(s.lambda),
        g(s.c),
        g(s.horizon),
        s.n.to_string(),
        g(s.delta),
        s.estimator.as_str().to_string(),
        s.reps.to_string(),
        g(s.bias),
        g(s.rmse),
        g(s.min),
        g(s.max),
        s.saturated_count.to_string(),
    ]
}

/// Header plus one line per summary, `\n`-terminated.
pub fn summary_csv(summaries: &[ExperimentSummary], digits: usize) -> String {
    let mut out = SUMMARY_HEADER.join(",");
    out.push('\n');
    for s in summaries {
        out.push_str(&summary_record(s, digits).join(","));
        out.push('\n');
    }
    out
}
