//! The tidy CSV schema shared with the plotting scripts.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const HEADER: &str = "experiment,dataset,n,sweep,sweep_value,trial,metric,value";

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: u8,
    pub dataset: String,
    pub n: usize,
    pub sweep: String,
    pub sweep_value: f64,
    pub trial: usize,
    pub metric: String,
    pub value: f64,
}

/// Six significant digits in the style of C's `%g`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        if !r.value.is_finite() {
            return Err(Error::Precondition(format!("non-finite value for metric {}", r.metric)));
        }
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.experiment,
            r.dataset,
            r.n,
            r.sweep,
            format_g6(r.sweep_value),
            r.trial,
            r.metric,
            format_g6(r.value)
        )?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    let mut lines = input.lines();
    let bad = |line: usize, message: String| Error::Parse {
        path: "<csv>".into(),
        line,
        message,
    };
    if lines.next().transpose()?.as_deref() != Some(HEADER) {
        return Err(bad(1, "missing or unexpected header".into()));
    }
    for (i, line) in lines.enumerate() {
        let line = line?;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(bad(i + 2, format!("expected 8 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(i + 2, e.to_string()));
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(i + 2, e.to_string()));
        rows.push(ResultRow {
            experiment: int(f[0])? as u8,
            dataset: f[1].into(),
            n: int(f[2])?,
            sweep: f[3].into(),
            sweep_value: num(f[4])?,
            trial: int(f[5])?,
            metric: f[6].into(),
            value: num(f[7])?,
        });
    }
    Ok(rows)
}
