//! Batch certification over parameter grids.

use clap::Subcommand;
use rayon::prelude::*;
use serde_json::{json, Value};

use formalitykit_core::formality::{self, FormalityCertificate};

use crate::output::Report;
use crate::{CliError, CliResult};

#[derive(Subcommand, Debug)]
pub enum SweepCommand {
    /// Single P^n[k]-like objects.
    Single {
        #[arg(long, default_value = "")]
        n: String,
        #[arg(long, default_value = "")]
        k: String,
    },
    /// P^n[k] configurations; `--h cy` uses h = nk/2.
    Pn {
        #[arg(long, default_value = "")]
        n: String,
        #[arg(long, default_value = "")]
        k: String,
        #[arg(long, default_value = "cy")]
        h: String,
    },
    /// Spherelike configurations; `--hmin floor` is ⌊k/2⌋, `--hmax k` is k.
    Spherical {
        #[arg(long, default_value = "")]
        k: String,
        #[arg(long, default_value = "floor")]
        hmin: String,
        #[arg(long, default_value = "k")]
        hmax: String,
    },
}

/// Parses `1..4`, `2,4`, `1..3,7` (inclusive ranges); the empty string is
/// the empty grid.
pub fn parse_grid(s: &str) -> CliResult<Vec<i64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::input(format!("cannot read grid component `{part}`"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if b < a || b - a > 10_000 {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

/// A parameter that is either a grid or a named rule.
fn choice(s: &str, rule: &str) -> CliResult<Option<Vec<i64>>> {
    if s == rule {
        Ok(None)
    } else {
        parse_grid(s).map(Some)
    }
}

fn row(cert: &FormalityCertificate, extra: Value) -> Value {
    let mut v = extra;
    v["verdict"] = json!(cert.verdict);
    v["failed_hypotheses"] = json!(cert.failed_hypotheses.join("; "));
    v
}

pub fn run(cmd: &SweepCommand) -> CliResult<Report> {
    let (name, input, rows): (&str, Value, Vec<Value>) = match cmd {
        SweepCommand::Single { n, k } => {
            let points: Vec<(i64, i64)> = product(&parse_grid(n)?, &parse_grid(k)?);
            let rows = points
                .par_iter()
                .map(|&(n, k)| Ok(row(&formality::certify_single(n, k)?, json!({ "n": n, "k": k }))))
                .collect::<CliResult<Vec<_>>>()?;
            ("sweep single", json!({ "n": n, "k": k }), rows)
        }
        SweepCommand::Pn { n, k, h } => {
            let hs = choice(h, "cy")?;
            let mut points = Vec::new();
            for (n, k) in product(&parse_grid(n)?, &parse_grid(k)?) {
                match &hs {
                    None => points.push((n, k, None)),
                    Some(list) => points.extend(list.iter().map(|&h| (n, k, Some(h)))),
                }
            }
            let rows = points
                .par_iter()
                .map(|&(n, k, h)| {
                    let base = json!({ "n": n, "k": k });
                    let h = match h {
                        Some(h) => h,
                        None => match formality::cy_normalize(n, k) {
                            Ok(c) => {
                                let cert = formality::certify_config_pn(n, k, c.h)?;
                                let mut r = row(&cert, base);
                                r["h"] = json!(c.h);
                                r["gcd_ok"] = json!(c.gcd_ok);
                                return Ok(r);
                            }
                            Err(_) => {
                                let mut r = base;
                                r["h"] = Value::Null;
                                r["gcd_ok"] = Value::Null;
                                r["verdict"] = json!("CriterionInapplicable");
                                r["failed_hypotheses"] = json!(format!("nk even (got nk = {})", n * k));
                                return Ok(r);
                            }
                        },
                    };
                    let mut r = row(&formality::certify_config_pn(n, k, h)?, base);
                    r["h"] = json!(h);
                    Ok(r)
                })
                .collect::<CliResult<Vec<_>>>()?;
            ("sweep pn", json!({ "n": n, "k": k, "h": h }), rows)
        }
        SweepCommand::Spherical { k, hmin, hmax } => {
            let (lo, hi) = (choice(hmin, "floor")?, choice(hmax, "k")?);
            let mut points = Vec::new();
            for k in parse_grid(k)? {
                let los = lo.clone().unwrap_or_else(|| vec![k.div_euclid(2)]);
                let his = hi.clone().unwrap_or_else(|| vec![k]);
                for (a, b) in product(&los, &his) {
                    points.push((k, a, b));
                }
            }
            let rows = points
                .par_iter()
                .map(|&(k, a, b)| {
                    let cert = formality::certify_config_spherical(k, a, b)?;
                    Ok(row(&cert, json!({ "k": k, "hmin": a, "hmax": b })))
                })
                .collect::<CliResult<Vec<_>>>()?;
            ("sweep spherical", json!({ "k": k, "hmin": hmin, "hmax": hmax }), rows)
        }
    };
    Ok(Report::new(name, input, json!({ "rows": rows, "count": rows.len() })))
}

fn product(a: &[i64], b: &[i64]) -> Vec<(i64, i64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_grid("2,4").unwrap(), vec![2, 4]);
        assert_eq!(parse_grid("1..2, 7").unwrap(), vec![1, 2, 7]);
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("3..1").is_err());
        assert!(parse_grid("x").is_err());
    }
}
