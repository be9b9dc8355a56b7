//! Whitespace-separated parameter rows with `#` comments.

use sbint::assembly::ThreeCentreParams;
use sbint::sintegrand::IntegralParams;
use sbint::specfun::HalfOddOrder;

use crate::CliError;

pub const INTEGRAL_FIELDS: [&str; 9] = ["s", "nu", "n_gamma", "n_x", "lambda", "R1", "zeta1", "R2", "zeta2"];

pub const THREE_CENTRE_FIELDS: [&str; 14] = [
    "n1", "l1", "m1", "zeta1", "n2", "l2", "m2", "zeta2", "R1x", "R1y", "R1z", "R2x", "R2y", "R2z",
];

/// One data line: its 1-based line number and raw fields.
#[derive(Debug, Clone)]
pub struct Line<'a> {
    pub number: usize,
    pub fields: Vec<&'a str>,
}

pub fn data_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let fields: Vec<&str> = l.split_whitespace().collect();
            (!fields.is_empty()).then_some(Line { number: i + 1, fields })
        })
        .collect()
}

fn bad(line: usize, field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}, field {field}: {msg}"))
}

fn real(line: usize, field: &str, raw: &str) -> Result<f64, CliError> {
    let x: f64 = raw.parse().map_err(|_| bad(line, field, format!("'{raw}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(line, field, format!("'{raw}' is not finite")));
    }
    Ok(x)
}

fn int(line: usize, field: &str, raw: &str) -> Result<i32, CliError> {
    raw.parse().map_err(|_| bad(line, field, format!("'{raw}' is not an integer")))
}

/// A half-odd order written as "9/2" or "4.5".
pub fn half_odd(line: usize, raw: &str) -> Result<HalfOddOrder, CliError> {
    let twice = if let Some((num, den)) = raw.split_once('/') {
        let num = int(line, "nu", num.trim())?;
        if den.trim() != "2" {
            return Err(bad(line, "nu", format!("'{raw}' must have denominator 2")));
        }
        num
    } else {
        let x = real(line, "nu", raw)?;
        let t = 2.0 * x;
        if t.fract() != 0.0 || t.abs() > i32::MAX as f64 {
            return Err(bad(line, "nu", format!("'{raw}' is not a half-odd integer")));
        }
        t as i32
    };
    HalfOddOrder::new(twice).map_err(|e| bad(line, "nu", e))
}

fn check_arity(line: &Line, names: &[&str]) -> Result<(), CliError> {
    if line.fields.len() != names.len() {
        return Err(CliError::Input(format!(
            "line {}: expected {} fields ({}), found {}",
            line.number,
            names.len(),
            names.join(" "),
            line.fields.len()
        )));
    }
    Ok(())
}

pub fn integral_row(line: &Line) -> Result<IntegralParams, CliError> {
    check_arity(line, &INTEGRAL_FIELDS)?;
    let n = line.number;
    let f = &line.fields;
    let r = |i: usize| real(n, INTEGRAL_FIELDS[i], f[i]);
    let u = |i: usize| {
        let k = int(n, INTEGRAL_FIELDS[i], f[i])?;
        u32::try_from(k).map_err(|_| bad(n, INTEGRAL_FIELDS[i], format!("'{}' must be non-negative", f[i])))
    };
    IntegralParams::new(
        r(0)?,
        half_odd(n, f[1])?,
        int(n, "n_gamma", f[2])?,
        u(3)?,
        u(4)?,
        r(5)?,
        r(6)?,
        r(7)?,
        r(8)?,
    )
    .map_err(|e| CliError::Input(format!("line {n}: {e}")))
}

pub fn three_centre_row(line: &Line) -> Result<ThreeCentreParams, CliError> {
    check_arity(line, &THREE_CENTRE_FIELDS)?;
    let n = line.number;
    let f = &line.fields;
    let i = |k: usize| int(n, THREE_CENTRE_FIELDS[k], f[k]);
    let r = |k: usize| real(n, THREE_CENTRE_FIELDS[k], f[k]);
    ThreeCentreParams::new(
        (i(0)?, i(1)?, i(2)?, r(3)?),
        (i(4)?, i(5)?, i(6)?, r(7)?),
        [r(8)?, r(9)?, r(10)?],
        [r(11)?, r(12)?, r(13)?],
    )
    .map_err(|e| CliError::Input(format!("line {n}: {e}")))
}

pub fn parse_all<T>(text: &str, row: impl Fn(&Line) -> Result<T, CliError>) -> Result<Vec<(Line<'_>, T)>, CliError> {
    let lines = data_lines(text);
    if lines.is_empty() {
        return Err(CliError::Input("params file has no data rows".into()));
    }
    lines
        .into_iter()
        .map(|l| {
            let v = row(&l)?;
            Ok((l, v))
        })
        .collect()
}
