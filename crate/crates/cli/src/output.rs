//! Text tables, observable streams and binary snapshots.

use apcl::ap::TorusField;
use apcl::solver::ObservationRecord;

use crate::config::Column;

/// Comma-separated table preceded by a provenance line and a header row of
/// `name[unit]` cells.
pub fn table(subcommand: &str, header: &[(&str, &str)], rows: &[Vec<String>]) -> String {
    let mut s = format!("# apcl {subcommand}\n");
    let cells: Vec<String> = header.iter().map(|(n, u)| format!("{n}[{u}]")).collect();
    s.push_str(&cells.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "inf".into())
}

fn unit(c: Column) -> &'static str {
    match c.name() {
        "l1" => "L1",
        "l2" => "L2",
        "mean" => "value",
        "hs" => "Hs",
        "fourier1" | "fourier2" => "modulus",
        _ => "residual",
    }
}

/// One record per line: time followed by the configured columns.
pub fn observable_stream(subcommand: &str, columns: &[Column], records: &[ObservationRecord]) -> String {
    let mut s = format!("# apcl {subcommand}\nt[time]");
    for c in columns {
        s.push_str(&format!(" {}[{}]", c.name(), unit(*c)));
    }
    s.push('\n');
    for r in records {
        s.push_str(&num(r.t));
        for c in columns {
            let v = match c {
                Column::Observable(o) => o.of(r),
                Column::EntropyMin => r.entropy_min,
            };
            s.push(' ');
            s.push_str(&num(v));
        }
        s.push('\n');
    }
    s
}

/// Text header terminated by `end\n`, then the values as little-endian f64.
pub fn snapshot(field: &TorusField, step: usize, time: f64) -> Vec<u8> {
    let shape: Vec<String> = field.shape().iter().map(usize::to_string).collect();
    let header = format!(
        "apcl-snapshot\nshape {}\nstep {step}\ntime {}\nlayout row-major f64-le\nend\n",
        shape.join(" "),
        num(time)
    );
    let mut out = header.into_bytes();
    out.reserve(8 * field.len());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`snapshot`]: `(shape, time, values)`.
pub fn read_snapshot(bytes: &[u8]) -> Option<(Vec<usize>, f64, Vec<f64>)> {
    let marker = b"\nend\n";
    let pos = bytes.windows(marker.len()).position(|w| w == marker)?;
    let header = std::str::from_utf8(&bytes[..pos]).ok()?;
    let mut shape = None;
    let mut time = None;
    for line in header.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("shape") => shape = it.map(|s| s.parse().ok()).collect::<Option<Vec<usize>>>(),
            Some("time") => time = it.next()?.parse().ok(),
            _ => {}
        }
    }
    let body = &bytes[pos + marker.len()..];
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let shape = shape?;
    (shape.iter().product::<usize>() == values.len()).then_some((shape, time?, values))
}
