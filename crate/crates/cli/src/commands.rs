use rayon::prelude::*;
use sbint::assembly::{three_centre, SQuadConfig, ThreeCentreParams};
use sbint::dequad::{de_sum_fixed_i_s, de_sum_i_s, integrate_i_s, m_schedule, DEConfig, QuadratureResult};
use sbint::oracle::{oracle_i_s, OracleConfig};
use sbint::sintegrand::IntegralParams;

use crate::output::{Cell, Table};
use crate::params::{integral_row, parse_all, three_centre_row, Line};
use crate::CliError;

/// Everything a command needs besides the params text.
#[derive(Debug, Clone)]
pub struct Settings {
    pub transforms: Vec<(&'static str, DEConfig)>,
    pub tol: f64,
    pub m_range: Option<(f64, f64)>,
    pub steps: Option<usize>,
    pub m: Option<f64>,
}

/// A finished table plus any tolerance failures found while filling it.
pub struct Outcome {
    pub table: Table,
    pub failures: Vec<String>,
}

fn numeric(e: sbint::error::Error) -> String {
    e.to_string()
}

fn oracle(p: &IntegralParams) -> Result<f64, String> {
    oracle_i_s(p, &OracleConfig::default()).map_err(numeric)
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn single_row<'a>(text: &'a str, command: &str) -> Result<(Line<'a>, IntegralParams), CliError> {
    let mut rows = parse_all(text, integral_row)?;
    if rows.len() != 1 {
        return Err(CliError::Input(format!(
            "{command} takes exactly one params row, found {}; use --command table for several",
            rows.len()
        )));
    }
    Ok(rows.remove(0))
}

pub fn integral(text: &str, st: &Settings) -> Result<Outcome, CliError> {
    let (_, p) = single_row(text, "integral")?;
    let mut table = Table::new(vec![
        "transform",
        "value",
        "n_points",
        "n_minus",
        "n_plus",
        "n_M",
        "M",
        "est_rel_error",
        "oracle",
        "rel_error_vs_oracle",
    ]);
    let mut failures = Vec::new();
    let o = oracle(&p).map_err(CliError::Numeric)?;
    for (name, cfg) in &st.transforms {
        let r = integrate_i_s(&p, cfg).map_err(|e| CliError::Numeric(format!("{name}: {e}")))?;
        let err = rel(r.value, o);
        if err > st.tol {
            failures.push(format!("{name}: relative error {err:e} vs oracle exceeds {:e}", st.tol));
        }
        table.push(vec![
            (*name).into(),
            r.value.into(),
            r.n_points.into(),
            r.n_minus.into(),
            r.n_plus.into(),
            r.n_m.into(),
            r.m.into(),
            r.est_rel_error.into(),
            o.into(),
            err.into(),
        ]);
    }
    Ok(Outcome { table, failures })
}

fn input_cells(line: &Line) -> Vec<Cell> {
    line.fields.iter().map(|f| Cell::Text(f.to_string())).collect()
}

pub fn table(text: &str, st: &Settings) -> Result<Outcome, CliError> {
    let rows = parse_all(text, integral_row)?;
    let mut table = Table::new(vec![
        "s", "nu", "n_gamma", "n_x", "lambda", "R1", "zeta1", "R2", "zeta2", "I_phi1", "n_phi1", "max_phi1", "nM_phi1",
        "eps_phi1", "I_phi2", "n_phi2", "max_phi2", "nM_phi2", "eps_phi2", "I_oracle", "rel_phi1", "rel_phi2",
    ]);
    let pick = |name: &str| st.transforms.iter().find(|(n, _)| *n == name).map(|(_, c)| *c);
    let (c1, c2) = (pick("phi1"), pick("phi2"));
    type RowOut = (Vec<Cell>, Vec<String>);
    let computed: Vec<RowOut> = rows
        .par_iter()
        .map(|(line, p)| {
            let mut fails = Vec::new();
            let o = oracle(p).map_err(|e| fails.push(format!("line {}: oracle: {e}", line.number))).ok();
            let mut cells = input_cells(line);
            let mut rels = Vec::new();
            for (name, cfg) in [("phi1", c1), ("phi2", c2)] {
                let r: Option<QuadratureResult> = cfg.and_then(|c| {
                    integrate_i_s(p, &c).map_err(|e| fails.push(format!("line {}: {name}: {e}", line.number))).ok()
                });
                cells.extend([
                    r.map(|r| r.value).into(),
                    r.map(|r| r.n_points).into(),
                    r.map(|r| r.n_plus).into(),
                    r.map(|r| r.n_m).into(),
                    r.map(|r| r.est_rel_error).into(),
                ]);
                let e = r.zip(o).map(|(r, o)| rel(r.value, o));
                if let Some(e) = e.filter(|e| *e > st.tol) {
                    fails.push(format!("line {}: {name} relative error {e:e} exceeds {:e}", line.number, st.tol));
                }
                rels.push(Cell::from(e));
            }
            cells.push(o.into());
            cells.extend(rels);
            (cells, fails)
        })
        .collect();
    let mut failures = Vec::new();
    for (cells, f) in computed {
        table.push(cells);
        failures.extend(f);
    }
    Ok(Outcome { table, failures })
}

pub fn error_scan(text: &str, st: &Settings) -> Result<Outcome, CliError> {
    let (_, p) = single_row(text, "error-scan")?;
    let o = oracle(&p).map_err(CliError::Numeric)?;
    let steps = st.steps.unwrap_or(40);
    let mut table = Table::new(vec!["transform", "M", "n_points", "value", "abs_error"]);
    for (name, cfg) in &st.transforms {
        let (lo, hi) = st.m_range.unwrap_or((1.0, 2.0 * m_schedule(cfg, 2)));
        let ms: Vec<f64> = (0..steps)
            .map(|k| if steps == 1 { lo } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 })
            .collect();
        let rows: Vec<Result<QuadratureResult, String>> =
            ms.par_iter().map(|&m| de_sum_i_s(&p, m, cfg).map_err(|e| format!("{name} at M = {m}: {e}"))).collect();
        for (m, r) in ms.iter().zip(rows) {
            let r = r.map_err(CliError::Numeric)?;
            table.push(vec![(*name).into(), (*m).into(), r.n_points.into(), r.value.into(), (r.value - o).abs().into()]);
        }
    }
    Ok(Outcome { table, failures: Vec::new() })
}

/// Shrinks the truncation window found at M proportionally towards n = 0.
pub fn point_scan(text: &str, st: &Settings) -> Result<Outcome, CliError> {
    let (_, p) = single_row(text, "point-scan")?;
    let o = oracle(&p).map_err(CliError::Numeric)?;
    let steps = st.steps.unwrap_or(20).max(1);
    let mut table = Table::new(vec!["transform", "M", "n_minus", "n_plus", "n_points", "value", "abs_error"]);
    for (name, cfg) in &st.transforms {
        let m = st.m.unwrap_or_else(|| m_schedule(cfg, 2));
        let full = de_sum_i_s(&p, m, cfg).map_err(|e| CliError::Numeric(format!("{name}: {e}")))?;
        let windows: Vec<(i64, i64)> = (1..=steps)
            .map(|k| {
                let f = k as f64 / steps as f64;
                ((f * full.n_minus as f64).round() as i64, (f * full.n_plus as f64).round() as i64)
            })
            .collect();
        let rows: Vec<Result<QuadratureResult, String>> = windows
            .par_iter()
            .map(|&(a, b)| de_sum_fixed_i_s(&p, m, cfg, a, b).map_err(|e| format!("{name} on [{a}, {b}]: {e}")))
            .collect();
        for ((a, b), r) in windows.iter().zip(rows) {
            let r = r.map_err(CliError::Numeric)?;
            table.push(vec![
                (*name).into(),
                m.into(),
                (*a).into(),
                (*b).into(),
                r.n_points.into(),
                r.value.into(),
                (r.value - o).abs().into(),
            ]);
        }
    }
    Ok(Outcome { table, failures: Vec::new() })
}

pub fn three_centre_cmd(text: &str, st: &Settings) -> Result<Outcome, CliError> {
    let rows = parse_all(text, three_centre_row)?;
    let mut table = Table::new(vec![
        "line", "transform", "re", "im", "s_order", "rel_change", "n_summands", "warning",
    ]);
    let jobs: Vec<(&Line, &ThreeCentreParams, &'static str, DEConfig)> = rows
        .iter()
        .flat_map(|(l, p)| st.transforms.iter().map(move |(n, c)| (l, p, *n, *c)))
        .collect();
    let results: Vec<_> = jobs.par_iter().map(|(_, p, _, c)| three_centre(p, &SQuadConfig::default(), c)).collect();
    let mut failures = Vec::new();
    for ((line, _, name, _), r) in jobs.iter().zip(results) {
        match r {
            Ok(r) => {
                if let Some(w) = &r.warning {
                    failures.push(format!("line {}: {name}: {w}", line.number));
                }
                table.push(vec![
                    line.number.into(),
                    (*name).into(),
                    r.value.re.into(),
                    r.value.im.into(),
                    r.order.into(),
                    r.rel_change.into(),
                    r.n_summands.into(),
                    r.warning.clone().into(),
                ]);
            }
            Err(e) => {
                failures.push(format!("line {}: {name}: {e}", line.number));
                let mut cells = vec![line.number.into(), (*name).into()];
                cells.extend(std::iter::repeat(Cell::Empty).take(5));
                cells.push(e.to_string().into());
                table.push(cells);
            }
        }
    }
    Ok(Outcome { table, failures })
}
