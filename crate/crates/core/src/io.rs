//! Line-oriented game configuration and CSV output.
//!
//! ```text
//! # downtown / suburb
//! fleet_a = 1000
//! fleet_b = 2000
//! region beta_m=35000 beta_c=10 epsilon=100
//! region requests=350 profit=100 price=0.5 demand=20 epsilon=100
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiments::SweepRecord;
use crate::game::{GameSpec, RegionParams};

/// How one region line described its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionEntry {
    Aggregate { beta_m: f64, beta_c: f64, epsilon: f64 },
    Raw { requests: f64, profit: f64, price: f64, demand: f64, epsilon: f64 },
}

impl RegionEntry {
    pub fn to_params(&self) -> Result<RegionParams> {
        match *self {
            RegionEntry::Aggregate { beta_m, beta_c, epsilon } => RegionParams::new(beta_m, beta_c, epsilon),
            RegionEntry::Raw { requests, profit, price, demand, epsilon } => {
                RegionParams::from_raw(requests, profit, price, demand, epsilon)
            }
        }
    }
}

/// A parsed configuration, before conversion to a [`GameSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub fleet_a: f64,
    pub fleet_b: f64,
    /// Region entries with the line each came from.
    pub regions: Vec<(usize, RegionEntry)>,
}

const AGGREGATE_KEYS: [&str; 3] = ["beta_m", "beta_c", "epsilon"];
const RAW_KEYS: [&str; 5] = ["requests", "profit", "price", "demand", "epsilon"];

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_real(line: usize, key: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("value of `{key}` is not a number: `{}`", text.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("value of `{key}` is not finite")));
    }
    Ok(v)
}

fn parse_region(line: usize, rest: &str) -> Result<RegionEntry> {
    let mut fields: Vec<(&str, f64)> = Vec::new();
    for token in rest.split_whitespace() {
        let (key, value) =
            token.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, got `{token}`")))?;
        if !AGGREGATE_KEYS.contains(&key) && !RAW_KEYS.contains(&key) {
            return Err(parse_err(line, format!("unknown region key `{key}`")));
        }
        if fields.iter().any(|(k, _)| *k == key) {
            return Err(parse_err(line, format!("duplicate region key `{key}`")));
        }
        fields.push((key, parse_real(line, key, value)?));
    }
    let get = |key: &str| fields.iter().find(|(k, _)| *k == key).map(|&(_, v)| v);
    let is_raw = fields.iter().any(|(k, _)| RAW_KEYS.contains(k) && *k != "epsilon");
    let is_agg = fields.iter().any(|(k, _)| AGGREGATE_KEYS.contains(k) && *k != "epsilon");
    if is_raw && is_agg {
        return Err(parse_err(line, "region mixes aggregate and raw keys"));
    }
    let keys: &[&str] = if is_raw { &RAW_KEYS } else { &AGGREGATE_KEYS };
    if let Some(missing) = keys.iter().find(|k| get(k).is_none()) {
        return Err(parse_err(line, format!("region is missing `{missing}`")));
    }
    let v = |k: &str| get(k).unwrap_or_default();
    let entry = if is_raw {
        RegionEntry::Raw {
            requests: v("requests"),
            profit: v("profit"),
            price: v("price"),
            demand: v("demand"),
            epsilon: v("epsilon"),
        }
    } else {
        RegionEntry::Aggregate { beta_m: v("beta_m"), beta_c: v("beta_c"), epsilon: v("epsilon") }
    };
    entry.to_params().map_err(|e| parse_err(line, e.to_string()))?;
    Ok(entry)
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<ConfigDocument> {
        let mut fleet_a: Option<(usize, f64)> = None;
        let mut fleet_b: Option<(usize, f64)> = None;
        let mut regions = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) =
                content.strip_prefix("region").filter(|r| r.is_empty() || r.starts_with(char::is_whitespace))
            {
                regions.push((line, parse_region(line, rest)?));
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let slot = match key {
                "fleet_a" => &mut fleet_a,
                "fleet_b" => &mut fleet_b,
                _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
            };
            if slot.is_some() {
                return Err(parse_err(line, format!("duplicate key `{key}`")));
            }
            let v = parse_real(line, key, value)?;
            if v <= 0.0 {
                return Err(parse_err(line, format!("`{key}` must be positive, got {v}")));
            }
            *slot = Some((line, v));
        }

        let end = last_line + 1;
        let fleet_a = fleet_a.ok_or_else(|| parse_err(end, "missing `fleet_a`"))?.1;
        let fleet_b = fleet_b.ok_or_else(|| parse_err(end, "missing `fleet_b`"))?.1;
        if regions.is_empty() {
            return Err(parse_err(end, "no region lines"));
        }
        Ok(ConfigDocument { fleet_a, fleet_b, regions })
    }

    pub fn to_spec(&self) -> Result<GameSpec> {
        let regions = self
            .regions
            .iter()
            .map(|(line, entry)| entry.to_params().map_err(|e| parse_err(*line, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        GameSpec::new(regions, self.fleet_a, self.fleet_b)
    }
}

pub fn parse_config(text: &str) -> Result<GameSpec> {
    ConfigDocument::parse(text)?.to_spec()
}

/// Writes `spec` in aggregate form; [`parse_config`] reads it back exactly.
pub fn write_config(spec: &GameSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fleet_a = {}", fmt_real(spec.fleet_a()));
    let _ = writeln!(out, "fleet_b = {}", fmt_real(spec.fleet_b()));
    for r in spec.regions() {
        let _ = writeln!(
            out,
            "region beta_m={} beta_c={} epsilon={}",
            fmt_real(r.beta_m()),
            fmt_real(r.beta_c()),
            fmt_real(r.epsilon())
        );
    }
    out
}

/// Seventeen significant digits, positional for moderate exponents.
/// NaN prints as an empty string.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = match exp {
        0..=15 => {
            let (int, frac) = digits.split_at(exp as usize + 1);
            format!("{int}.{frac}")
        }
        16 => format!("{digits}.0"),
        -5..=-1 => format!("0.{}{digits}", "0".repeat((-exp - 1) as usize)),
        _ => format!("{mantissa}e{exp}"),
    };
    format!("{sign}{body}")
}

pub fn csv_header(m: usize) -> String {
    let mut cols = vec!["param".to_string()];
    cols.extend((1..=m).map(|j| format!("x_a_{j}")));
    cols.extend((1..=m).map(|j| format!("x_b_{j}")));
    cols.extend(["u_a", "u_b", "location", "t_lambda"].map(String::from));
    cols.join(",")
}

pub fn csv_row(r: &SweepRecord) -> String {
    let mut fields = vec![fmt_real(r.parameter)];
    fields.extend(r.strategy.a().iter().map(|&v| fmt_real(v)));
    fields.extend(r.strategy.b().iter().map(|&v| fmt_real(v)));
    fields.push(fmt_real(r.u_a));
    fields.push(fmt_real(r.u_b));
    fields.push(r.location.tag().to_string());
    fields.push(r.t_lambda.map(fmt_real).unwrap_or_default());
    fields.join(",")
}

/// Header plus one row per record, newline-terminated.
pub fn emit_csv(records: &[SweepRecord]) -> Result<String> {
    let m = records.first().map_or(0, |r| r.strategy.a().len());
    if let Some(bad) = records.iter().find(|r| r.strategy.a().len() != m || r.strategy.b().len() != m) {
        return Err(Error::Validation(format!(
            "record at parameter {} has {} regions, expected {m}",
            bad.parameter,
            bad.strategy.a().len()
        )));
    }
    let mut out = csv_header(m);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    Ok(out)
}
