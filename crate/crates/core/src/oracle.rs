//! Reference integrator: adaptive Gauss–Kronrod (7/15) panels over
//! half-periods, with the epsilon algorithm on the partial sums.

use std::f64::consts::PI;

use crate::error::Error;
use crate::sintegrand::{eval_original_integrand, s_transform, IntegralParams, TermEvaluator};
use crate::specfun::spherical_bessel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub rel_tol: f64,
    /// Subinterval budget of one adaptive integration.
    pub max_panels: usize,
    /// Half-period panels summed before extrapolated values are trusted.
    pub tail_periods: usize,
    /// Hard cap on the number of half-period panels.
    pub max_half_periods: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { rel_tol: 1e-14, max_panels: 2000, tail_periods: 8, max_half_periods: 200_000 }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * hl;
    resabs *= hl.abs();
    resasc *= hl.abs();
    let mut error = ((resk - resg) * hl).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Piece { a, b, value, error }
}

/// ∫_a^b f by global adaptive bisection of the piece with the largest
/// Kronrod–Gauss error estimate.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &OracleConfig) -> Result<f64, Error> {
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    let mut pieces = vec![gk15(f, a, b)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::AccuracyNotReached { estimate: total, error: err });
        }
        if err <= cfg.rel_tol * total.abs() || err == 0.0 {
            return Ok(total);
        }
        // Everything left is at the roundoff floor.
        if pieces.iter().all(|p| p.b - p.a <= 1e3 * f64::EPSILON * p.a.abs().max(p.b.abs())) {
            return Ok(total);
        }
        if pieces.len() >= cfg.max_panels {
            return Err(Error::AccuracyNotReached { estimate: total, error: err });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let left = gk15(f, p.a, mid);
        let right = gk15(f, mid, p.b);
        // A split that does not reduce the error is at the roundoff floor.
        if left.error + right.error >= p.error && p.error <= 100.0 * f64::EPSILON * (left.value.abs() + right.value.abs()) {
            pieces.push(Piece { a: p.a, b: p.b, value: left.value + right.value, error: 0.0 });
        } else {
            pieces.push(left);
            pieces.push(right);
        }
    }
}

/// Wynn's epsilon algorithm over a sequence of partial sums; returns the
/// last element of the highest even column.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    // `cur` holds column k of the table, `prev` column k − 1.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                return if col % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            best = *cur.last().expect("non-empty column");
        }
    }
    best
}

/// ∫₀^hi on geometrically shrinking pieces, so that mass concentrated
/// near the origin is seen even when hi is many decay lengths away.
fn first_panel<F: Fn(f64) -> f64>(f: &F, hi: f64, cfg: &OracleConfig) -> Result<f64, Error> {
    const PIECES: i32 = 40;
    let mut total = adaptive_integrate(f, 0.0, hi * 2f64.powi(-PIECES), cfg)?;
    for k in (0..PIECES).rev() {
        total += adaptive_integrate(f, hi * 2f64.powi(-k - 1), hi * 2f64.powi(-k), cfg)?;
    }
    Ok(total)
}

/// Σ of panel integrals ∫_{x_k}^{x_{k+1}} with x_k from `edges`, stopped
/// when the panels become negligible or the extrapolated sum settles.
fn panel_series<F, E>(f: &F, mut edges: E, cfg: &OracleConfig) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
    E: FnMut() -> f64,
{
    const WINDOW: usize = 24;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut sums: Vec<f64> = Vec::new();
    let mut lo = 0.0;
    let mut quiet = 0;
    let mut settled = 0;
    let mut last_extra = f64::NAN;
    for k in 0..cfg.max_half_periods {
        let hi = edges();
        let panel = if k == 0 { first_panel(f, hi, cfg)? } else { adaptive_integrate(f, lo, hi, cfg)? };
        lo = hi;
        // Neumaier summation.
        let t = sum + panel;
        if sum.abs() >= panel.abs() {
            comp += (sum - t) + panel;
        } else {
            comp += (panel - t) + sum;
        }
        sum = t;
        let total = sum + comp;
        if panel.abs() <= 1e-3 * cfg.rel_tol * total.abs() || (panel == 0.0 && total == 0.0 && k > 4) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        sums.push(total);
        if sums.len() > WINDOW {
            sums.remove(0);
        }
        if k + 1 >= cfg.tail_periods {
            let extra = wynn_epsilon(&sums);
            if (extra - last_extra).abs() <= cfg.rel_tol * extra.abs() {
                settled += 1;
                if settled >= 3 {
                    return Ok(extra);
                }
            } else {
                settled = 0;
            }
            last_extra = extra;
        }
    }
    Err(Error::TailNotConverged { panels: cfg.max_half_periods, estimate: sum + comp })
}

/// I(s) from the sine form v^{−(λ+1)} ∫₀^∞ f(x) sin(vx) dx, panels
/// [kπ/v, (k+1)π/v].
pub fn oracle_i_s(p: &IntegralParams, cfg: &OracleConfig) -> Result<f64, Error> {
    let v = p.oscillation_frequency()?;
    let ev = TermEvaluator::new(&s_transform(p), p);
    let f = |x: f64| ev.eval(x).unwrap_or(f64::NAN) * (v * x).sin();
    let mut k = 0u64;
    let edges = || {
        k += 1;
        k as f64 * PI / v
    };
    Ok(panel_series(&f, edges, cfg)? / v.powi(p.lam as i32 + 1))
}

/// Successive positive zeros of j_λ.
pub struct BesselZeros {
    lam: u32,
    z: f64,
}

impl BesselZeros {
    pub fn new(lam: u32) -> Self {
        // The first zero of j_λ lies above λ + 1/2.
        BesselZeros { lam, z: lam as f64 + 0.5 }
    }
}

impl Iterator for BesselZeros {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        // Zeros are more than π apart, so a π/4 scan brackets each one.
        let step = PI / 4.0;
        let mut a = self.z;
        let mut fa = spherical_bessel(self.lam, a);
        loop {
            let b = a + step;
            let fb = spherical_bessel(self.lam, b);
            if fa == 0.0 {
                self.z = a + 1e-9;
                return Some(a);
            }
            if fa.signum() != fb.signum() {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = spherical_bessel(self.lam, mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                self.z = root + 1e-6;
                return Some(root);
            }
            a = b;
            fa = fb;
        }
    }
}

/// I(s) from the original spherical Bessel form, panels between
/// consecutive zeros of j_λ(vx).
pub fn oracle_original(p: &IntegralParams, cfg: &OracleConfig) -> Result<f64, Error> {
    let v = p.oscillation_frequency()?;
    let f = |x: f64| eval_original_integrand(p, x);
    let mut zeros = BesselZeros::new(p.lam);
    let edges = || zeros.next().expect("infinite sequence") / v;
    panel_series(&f, edges, cfg)
}
