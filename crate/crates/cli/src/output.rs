//! Number rendering and the CSV layouts written by the binary.

use std::fmt::Write as _;

use hcn_gauss::analytics::Envelope;

/// Column order of every curve CSV.
pub const CURVE_COLUMNS: [&str; 7] = ["x", "psi", "lower_unclamped", "upper_unclamped", "lower", "upper", "empirical"];

/// 17 significant digits in scientific notation (round-trips any `f64`).
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

fn comment_line(out: &mut String, fingerprint: &str, extra: &[(&str, String)]) {
    let _ = write!(out, "# fingerprint={fingerprint}");
    for (k, v) in extra {
        let _ = write!(out, " {k}={v}");
    }
    out.push('\n');
}

/// Curve CSV: fingerprint comment, header, then one row per envelope point.
/// `empirical[i]` fills the last column where present.
pub fn curve_csv(fingerprint: &str, rows: &[Envelope], empirical: Option<&[f64]>) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    comment_line(&mut out, fingerprint, &[]);
    out.push_str(&CURVE_COLUMNS.join(","));
    out.push('\n');
    for (i, e) in rows.iter().enumerate() {
        let emp = empirical.and_then(|v| v.get(i)).map(|&v| fmt17(v)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt17(e.x),
            fmt17(e.psi),
            fmt17(e.lower_unclamped),
            fmt17(e.upper_unclamped),
            fmt17(e.lower),
            fmt17(e.upper),
            emp
        );
    }
    out
}

/// Sample CSV: fingerprint comment with the simulation settings, a `value` header,
/// then one realization per line in replication order.
pub fn samples_csv(set: &hcn_gauss::SampleSet) -> String {
    let mut out = String::with_capacity(set.len() * 25 + 200);
    let c = &set.config;
    comment_line(
        &mut out,
        &set.fingerprint,
        &[
            ("seed", c.seed.to_string()),
            ("replications", c.replications.to_string()),
            ("radius", fmt17(c.radius)),
            ("construction", construction_name(c.construction).to_string()),
        ],
    );
    out.push_str("value\n");
    for v in &set.values {
        out.push_str(&fmt17(*v));
        out.push('\n');
    }
    out
}

pub fn construction_name(c: hcn_gauss::Construction) -> &'static str {
    match c {
        hcn_gauss::Construction::PoissonField => "poisson",
        hcn_gauss::Construction::FixedCountIID => "fixed",
    }
}

/// Generic table: fingerprint comment, header, rows of numbers.
pub fn table_csv(fingerprint: &str, header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    comment_line(&mut out, fingerprint, &[]);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Reads the fingerprint from the first line of a CSV written by this module.
pub fn csv_fingerprint(text: &str) -> Option<&str> {
    let first = text.lines().next()?.strip_prefix("# fingerprint=")?;
    Some(first.split_whitespace().next().unwrap_or(first))
}
