//! Plain-text edge-list format.
//!
//! ```text
//! # n=<int> default_sign=<+|-> default_weight=<float>
//! u,v,s,w
//! ```
//!
//! Data lines have `u < v`, `s` in `{+,-}` and a nonnegative decimal weight.
//! Pairs that are not listed take the header defaults.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{pair_count, pair_index, pairs, CCInstance, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeDefaults {
    pub sign: Sign,
    pub weight: f64,
}

impl EdgeDefaults {
    /// Most frequent `(sign, weight)` combination; ties go to the earliest pair.
    pub fn modal(inst: &CCInstance) -> Self {
        let mut counts: HashMap<(Sign, u64), (usize, usize)> = HashMap::new();
        for (idx, (&s, &w)) in inst.signs().iter().zip(inst.weights()).enumerate() {
            let e = counts.entry((s, w.to_bits())).or_insert((0, idx));
            e.0 += 1;
        }
        let (&(sign, bits), _) = counts
            .iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .expect("instance has at least one pair");
        Self {
            sign,
            weight: f64::from_bits(bits),
        }
    }
}

pub fn save_edge_list(inst: &CCInstance, path: &Path, omit_defaults: bool) -> Result<()> {
    save_edge_list_with_defaults(inst, path, EdgeDefaults::modal(inst), omit_defaults)
}

pub fn save_edge_list_with_defaults(
    inst: &CCInstance,
    path: &Path,
    defaults: EdgeDefaults,
    omit_defaults: bool,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# n={} default_sign={} default_weight={}",
        inst.n(),
        defaults.sign.symbol(),
        defaults.weight
    )?;
    for (u, v) in pairs(inst.n()) {
        let (s, w) = (inst.sign(u, v), inst.weight(u, v));
        if omit_defaults && s == defaults.sign && w.to_bits() == defaults.weight.to_bits() {
            continue;
        }
        writeln!(out, "{u},{v},{},{w}", s.symbol())?;
    }
    out.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> Option<(usize, EdgeDefaults)> {
    let rest = line.strip_prefix('#')?;
    let mut n = None;
    let mut sign = None;
    let mut weight = None;
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=')?;
        match key {
            "n" => n = value.parse().ok(),
            "default_sign" => sign = Sign::from_symbol(value),
            "default_weight" => weight = parse_weight(value),
            _ => return None,
        }
    }
    Some((n?, EdgeDefaults { sign: sign?, weight: weight? }))
}

fn parse_weight(s: &str) -> Option<f64> {
    let w: f64 = s.parse().ok()?;
    (w.is_finite() && w >= 0.0).then_some(w)
}

pub fn load_edge_list(path: &Path) -> Result<CCInstance> {
    let reader = BufReader::new(File::open(path)?);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, "empty file, expected header".into())),
    };
    let (n, defaults) = parse_header(header.trim_end())
        .ok_or_else(|| parse_err(1, format!("malformed header `{header}`")))?;
    if n < 2 {
        return Err(parse_err(1, format!("n must be at least 2, got {n}")));
    }

    let pc = pair_count(n);
    let mut signs = vec![defaults.sign; pc];
    let mut weights = vec![defaults.weight; pc];
    let mut seen = vec![false; pc];

    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(lineno, format!("expected `u,v,s,w`, got `{line}`")));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad vertex `{}`", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad vertex `{}`", fields[1])))?;
        for vertex in [u, v] {
            if vertex >= n {
                return Err(Error::VertexRange {
                    path: path.to_path_buf(),
                    line: lineno,
                    vertex,
                    n,
                });
            }
        }
        if u >= v {
            return Err(parse_err(lineno, format!("expected u < v, got {u},{v}")));
        }
        let sign = Sign::from_symbol(fields[2])
            .ok_or_else(|| parse_err(lineno, format!("bad sign `{}`", fields[2])))?;
        let weight = parse_weight(fields[3])
            .ok_or_else(|| parse_err(lineno, format!("bad weight `{}`", fields[3])))?;
        let idx = pair_index(n, u, v);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::DuplicatePair {
                path: path.to_path_buf(),
                line: lineno,
                u,
                v,
            });
        }
        signs[idx] = sign;
        weights[idx] = weight;
    }
    CCInstance::new(n, signs, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, InstanceSpec};

    fn write(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
        let p = dir.path().join("g.txt");
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn defaults_fill_missing_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "# n=3 default_sign=- default_weight=1.0\n0,1,+,2.0\n");
        let inst = load_edge_list(&p).unwrap();
        assert_eq!(inst.sign(0, 1), Sign::Positive);
        assert_eq!(inst.weight(0, 1), 2.0);
        for (u, v) in [(0, 2), (1, 2)] {
            assert_eq!(inst.sign(u, v), Sign::Negative);
            assert_eq!(inst.weight(u, v), 1.0);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.txt");
        let inst = generate(&InstanceSpec::MetricViolation { n: 15, eta: 0.3 }, 5)
            .unwrap()
            .instance;
        for omit in [false, true] {
            save_edge_list(&inst, &p, omit).unwrap();
            assert_eq!(load_edge_list(&p).unwrap(), inst);
        }
        save_edge_list(&inst, &p, false).unwrap();
        let lines = std::fs::read_to_string(&p).unwrap().lines().count();
        assert_eq!(lines, 1 + 105);
    }

    #[test]
    fn omitting_defaults_of_uniform_instance_writes_only_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.txt");
        let inst = CCInstance::uniform(7, Sign::Positive, 1.0).unwrap();
        save_edge_list(&inst, &p, true).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "# n=7 default_sign=+ default_weight=1\n");
        assert_eq!(load_edge_list(&p).unwrap(), inst);
    }

    #[test]
    fn malformed_inputs_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let hdr = "# n=4 default_sign=+ default_weight=1\n";
        let p = write(&dir, &format!("{hdr}0,1,+,1\n0,2,x,1\n"));
        assert!(matches!(load_edge_list(&p), Err(Error::Parse { line: 3, .. })));
        let p = write(&dir, &format!("{hdr}0,1,+,1\n0,1,-,3\n"));
        assert!(matches!(
            load_edge_list(&p),
            Err(Error::DuplicatePair { line: 3, u: 0, v: 1, .. })
        ));
        let p = write(&dir, &format!("{hdr}0,4,+,1\n"));
        assert!(matches!(
            load_edge_list(&p),
            Err(Error::VertexRange { line: 2, vertex: 4, .. })
        ));
        let p = write(&dir, &format!("{hdr}0,1,+,-2\n"));
        assert!(matches!(load_edge_list(&p), Err(Error::Parse { line: 2, .. })));
        let p = write(&dir, "n=4\n");
        assert!(matches!(load_edge_list(&p), Err(Error::Parse { line: 1, .. })));
    }
}
