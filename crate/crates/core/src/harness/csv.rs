use std::cmp::Ordering;
use std::fmt::Write as _;

use super::search::ResultRow;
use super::simulations::ErrorField;

pub const RESULTS_HEADER: &str = "target,delta,method,s_star,m,sr,lambda,sigma,rmse,fit_seconds";
pub const FIELD_HEADER: &str = "x,y,z,exact,noisy,prediction,abs_error";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn row_order(a: &ResultRow, b: &ResultRow) -> Ordering {
    a.target
        .cmp(&b.target)
        .then(a.delta.total_cmp(&b.delta))
        .then(a.method.cmp(&b.method))
        .then(a.s_star.cmp(&b.s_star))
        .then(a.m.cmp(&b.m))
        .then(a.seed.cmp(&b.seed))
}

/// Sorts rows by target, δ, method, s*, m and seed.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(row_order);
}

/// Results table with 17 significant digits. `with_seed` appends a `seed`
/// column for replicate tables.
pub fn format_results_csv(rows: &[ResultRow], with_seed: bool) -> String {
    let mut out = String::from(RESULTS_HEADER);
    if with_seed {
        out.push_str(",seed");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.target,
            real(r.delta),
            r.method,
            r.s_star.map(|s| s.to_string()).unwrap_or_default(),
            r.m,
            real(r.sr),
            real(r.lambda),
            r.sigma.map(real).unwrap_or_default(),
            real(r.rmse),
            real(r.fit_seconds),
        );
        if with_seed {
            let _ = write!(out, ",{}", r.seed.map(|s| s.to_string()).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

pub const SUMMARY_HEADER: &str = "target,delta,s_star,m,rmse_mean,rmse_std";

/// Mean and standard deviation of the random-sketch replicates.
pub fn format_summary_csv(rows: &[&ResultRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.target,
            real(r.delta),
            r.s_star.map(|s| s.to_string()).unwrap_or_default(),
            r.m,
            real(r.rmse),
            real(r.rmse_std.unwrap_or(0.0)),
        );
    }
    out
}

pub fn format_field_csv(field: &ErrorField) -> String {
    let mut out = String::with_capacity(field.points.len() * 170);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for (i, p) in field.points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            real(p.x),
            real(p.y),
            real(p.z),
            real(field.exact[i]),
            real(field.noisy[i]),
            real(field.prediction[i]),
            real(field.abs_error[i]),
        );
    }
    out
}
