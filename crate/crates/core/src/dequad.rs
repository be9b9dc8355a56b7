//! Ooura–Mori double-exponential quadrature for ∫₀^∞ g(x) sin(vx) dx.
//!
//! The sum is carried out in the dimensionless variable y = vx with
//! y = Mφ(t), mesh h = π/M and nodes t_n = nh, so every positive node
//! sits next to a zero nπ of sin y:
//!
//! ∫₀^∞ g(x) sin(vx) dx ≈ (π/v) Σ_n g(Mφ(nh)/v) sin(Mφ(nh)) φ′(nh).

use std::f64::consts::PI;

use crate::error::Error;
use crate::sintegrand::{s_transform, IntegralParams, TermEvaluator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    /// φ₁(t) = t / (1 − exp(−K sinh t))
    Phi1 { k: f64 },
    /// φ₂(t) = t / (1 − exp(−2t − α(1 − e^{−t}) − β(e^t − 1)))
    Phi2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DEConfig {
    pub transform: Transform,
    pub eps0: f64,
    pub a: f64,
    pub max_attempts: u32,
    pub trunc_consecutive: u32,
}

impl DEConfig {
    pub fn phi1() -> Self {
        DEConfig { transform: Transform::Phi1 { k: 6.0 }, eps0: 1e-15, a: 2.0, max_attempts: 4, trunc_consecutive: 2 }
    }

    pub fn phi2() -> Self {
        DEConfig { transform: Transform::Phi2, eps0: 1e-15, a: 5.0, max_attempts: 4, trunc_consecutive: 2 }
    }

    pub fn with_eps0(mut self, eps0: f64) -> Self {
        self.eps0 = eps0;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi2Constants {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub m: f64,
    pub h: f64,
    pub n_minus: i64,
    pub n_plus: i64,
    pub n_points: usize,
    pub n_m: u32,
    /// Relative change between the last two M values.
    pub rel_change: f64,
    /// Predicted relative error of `value`.
    pub est_rel_error: f64,
    /// Σ|terms| / |Σ terms| of the final sum; rounding error in `value`
    /// is about this times the machine epsilon.
    pub condition: f64,
}

// Below this |t| the closed forms are replaced by their Taylor series.
const TAYLOR_CUTOFF: f64 = 1e-4;
// Beyond |u| = 700 exp(±u) is treated as 0 or ∞.
const EXP_LIMIT: f64 = 700.0;

/// Coefficients u_1..u_5 of u(t) = Σ u_k t^k for the two transforms.
fn u_series(tr: &TransformAt) -> [f64; 6] {
    match *tr {
        TransformAt::Phi1 { k } => [0.0, k, 0.0, k / 6.0, 0.0, k / 120.0],
        TransformAt::Phi2 { alpha: a, beta: b } => {
            [0.0, 2.0 + a + b, (b - a) / 2.0, (a + b) / 6.0, (b - a) / 24.0, (a + b) / 120.0]
        }
    }
}

/// Taylor coefficients q_0..q_4 of φ(t) = t / (1 − e^{−u(t)}).
fn phi_series(tr: &TransformAt) -> [f64; 5] {
    let u = u_series(tr);
    // E = e^{−u}: n E_n = −Σ_k k u_k E_{n−k}
    let mut e = [0.0; 6];
    e[0] = 1.0;
    for n in 1..6 {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += k as f64 * u[k] * e[n - k];
        }
        e[n] = -acc / n as f64;
    }
    // 1 − E = t Σ w_j t^j
    let w: Vec<f64> = (1..6).map(|n| -e[n]).collect();
    let mut q = [0.0; 5];
    q[0] = 1.0 / w[0];
    for n in 1..5 {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += w[k] * q[n - k];
        }
        q[n] = -acc / w[0];
    }
    q
}

#[derive(Clone, Copy, Debug)]
enum TransformAt {
    Phi1 { k: f64 },
    Phi2 { alpha: f64, beta: f64 },
}

impl TransformAt {
    fn new(tr: Transform, m: f64) -> Self {
        match tr {
            Transform::Phi1 { k } => TransformAt::Phi1 { k },
            Transform::Phi2 => {
                let c = phi2_constants(m);
                TransformAt::Phi2 { alpha: c.alpha, beta: c.beta }
            }
        }
    }

    fn u(&self, t: f64) -> (f64, f64) {
        match *self {
            TransformAt::Phi1 { k } => (k * t.sinh(), k * t.cosh()),
            TransformAt::Phi2 { alpha, beta } => {
                let em = (-t).exp_m1();
                let ep = t.exp_m1();
                (2.0 * t - alpha * em + beta * ep, 2.0 + alpha * (-t).exp() + beta * t.exp())
            }
        }
    }
}

/// φ(t), φ(t) − t for t > 0 (zero otherwise), and φ′(t).
#[derive(Clone, Copy, Debug)]
struct Node {
    phi: f64,
    delta: f64,
    dphi: f64,
}

fn node(tr: &TransformAt, q: &[f64; 5], t: f64) -> Node {
    if t.abs() < TAYLOR_CUTOFF {
        let phi = q[0] + t * (q[1] + t * (q[2] + t * (q[3] + t * q[4])));
        let dphi = q[1] + t * (2.0 * q[2] + t * (3.0 * q[3] + t * 4.0 * q[4]));
        let delta = if t > 0.0 { phi - t } else { 0.0 };
        return Node { phi, delta, dphi };
    }
    let (u, du) = tr.u(t);
    if u > EXP_LIMIT {
        let eu = (-u).exp();
        return Node { phi: t, delta: t * eu, dphi: 1.0 };
    }
    if u < -EXP_LIMIT {
        return Node { phi: 0.0, delta: 0.0, dphi: 0.0 };
    }
    if u < 0.0 {
        // In terms of e^u, since e^{−u} squared would overflow.
        let e = u.exp();
        let om = -u.exp_m1();
        let phi = -t * e / om;
        let dphi = e * (-t * du - om) / (om * om);
        return Node { phi, delta: 0.0, dphi };
    }
    // d = 1 − e^{−u}
    let d = -(-u).exp_m1();
    let phi = t / d;
    let dphi = 1.0 / d - t * du * (-u).exp() / (d * d);
    let delta = if t > 0.0 { t / u.exp_m1() } else { 0.0 };
    Node { phi, delta, dphi }
}

pub fn phi1(t: f64, k: f64) -> f64 {
    let tr = TransformAt::Phi1 { k };
    node(&tr, &phi_series(&tr), t).phi
}

pub fn phi1_prime(t: f64, k: f64) -> f64 {
    let tr = TransformAt::Phi1 { k };
    node(&tr, &phi_series(&tr), t).dphi
}

/// β = 1/4, α = β / √(1 + M ln(1+M) / 4π).
pub fn phi2_constants(m: f64) -> Phi2Constants {
    let beta = 0.25;
    let alpha = beta / (1.0 + m * m.ln_1p() / (4.0 * PI)).sqrt();
    Phi2Constants { alpha, beta }
}

pub fn phi2(t: f64, c: Phi2Constants) -> f64 {
    let tr = TransformAt::Phi2 { alpha: c.alpha, beta: c.beta };
    node(&tr, &phi_series(&tr), t).phi
}

pub fn phi2_prime(t: f64, c: Phi2Constants) -> f64 {
    let tr = TransformAt::Phi2 { alpha: c.alpha, beta: c.beta };
    node(&tr, &phi_series(&tr), t).dphi
}

/// M₁ = −(π/A) ln √ε₀.
pub fn initial_m(eps0: f64, a: f64) -> f64 {
    -(PI / a) * eps0.sqrt().ln()
}

/// Predicted relative error exp(−A/h) with h = π/M.
pub fn error_model(m: f64, a: f64) -> f64 {
    (-a * m / PI).exp()
}

// Hard cap on |n| when scanning for the truncation points.
const MAX_INDEX: i64 = 200_000;

struct Summer<'a, G> {
    g: &'a G,
    v: f64,
    m: f64,
    h: f64,
    tr: TransformAt,
    q: [f64; 5],
}

impl<G: Fn(f64) -> Result<f64, Error>> Summer<'_, G> {
    /// False once φ or φ′ has underflowed, so no later term in this
    /// direction can contribute.
    fn live(&self, n: i64) -> bool {
        let nd = node(&self.tr, &self.q, n as f64 * self.h);
        nd.dphi != 0.0 && nd.phi != 0.0
    }

    /// g(y/v) sin(y) φ′(t) at y = Mφ(t), t = nh.
    fn term(&self, n: i64) -> Result<f64, Error> {
        Ok(self.term_and_envelope(n)?.0)
    }

    /// The term together with its envelope |g(y/v) φ′(t)| min(1, y).
    fn term_and_envelope(&self, n: i64) -> Result<(f64, f64), Error> {
        let t = n as f64 * self.h;
        let nd = node(&self.tr, &self.q, t);
        if nd.dphi == 0.0 || nd.phi == 0.0 {
            return Ok((0.0, 0.0));
        }
        let y = self.m * nd.phi;
        // sin(nπ + Mδ) = (−1)^n sin(Mδ) keeps full precision near the zeros.
        let sine = if n > 0 {
            let s = (self.m * nd.delta).sin();
            if n % 2 == 0 {
                s
            } else {
                -s
            }
        } else {
            y.sin()
        };
        let gw = (self.g)(y / self.v)? * nd.dphi;
        let val = gw * sine;
        if val.is_finite() {
            Ok((val, gw.abs() * y.min(1.0)))
        } else {
            Err(Error::NonFiniteTerm { n })
        }
    }
}

/// One trapezoidal sum at fixed M with the truncation points found by
/// scanning outwards from n = 0: a term is negligible when it is below
/// ε₀ times the running integral estimate π·S in the y variable, and the
/// scan stops after `trunc_consecutive` negligible terms in a row.
///
/// `value` is ∫₀^∞ g(x) sin(vx) dx.
pub fn de_sum<G>(g: &G, v: f64, m: f64, cfg: &DEConfig) -> Result<QuadratureResult, Error>
where
    G: Fn(f64) -> Result<f64, Error>,
{
    if !(v > 0.0) {
        return Err(Error::DegenerateFrequency);
    }
    if !(m > 0.0) {
        return Err(Error::InvalidParams(format!("M must be positive, got {m}")));
    }
    let tr = TransformAt::new(cfg.transform, m);
    let sm = Summer { g, v, m, h: PI / m, tr, q: phi_series(&tr) };
    let need = cfg.trunc_consecutive.max(1);
    let mut sum = 0.0;

    // At small v the first nodes sit far out where g has not yet risen
    // above underflow, so a term only counts as negligible once the
    // envelope has stopped growing, and an empty sum never stops
    // the downward scan before the nodes collapse onto the origin.
    let mut abs_sum = 0.0;
    let mut scan = |start: i64, step: i64, sum: &mut f64| -> Result<i64, Error> {
        let mut n = start;
        let mut quiet = 0;
        let mut prev_env = f64::INFINITY;
        loop {
            if n.abs() > MAX_INDEX {
                return Err(Error::NoTruncation { limit: MAX_INDEX });
            }
            let (t, env) = sm.term_and_envelope(n)?;
            *sum += t;
            abs_sum += t.abs();
            let floor = (cfg.eps0 * PI * sum.abs()).max(f64::MIN_POSITIVE);
            let rising = env > prev_env || (*sum == 0.0 && step < 0 && sm.live(n));
            prev_env = env;
            if t.abs() < floor && !rising {
                quiet += 1;
                if quiet >= need {
                    return Ok(n);
                }
            } else {
                quiet = 0;
            }
            n += step;
        }
    };
    let n_plus = scan(0, 1, &mut sum)?;
    let n_minus = scan(-1, -1, &mut sum)?;
    Ok(QuadratureResult {
        condition: condition(abs_sum, sum),
        value: PI * sum / v,
        m,
        h: PI / m,
        n_minus,
        n_plus,
        n_points: (n_plus - n_minus + 1) as usize,
        n_m: 1,
        rel_change: f64::NAN,
        est_rel_error: error_model(m, cfg.a),
    })
}

fn condition(abs_sum: f64, sum: f64) -> f64 {
    if abs_sum == 0.0 {
        1.0
    } else {
        abs_sum / sum.abs()
    }
}

/// The trapezoidal sum over the fixed index range n_minus..=n_plus.
pub fn de_sum_fixed<G>(g: &G, v: f64, m: f64, cfg: &DEConfig, n_minus: i64, n_plus: i64) -> Result<QuadratureResult, Error>
where
    G: Fn(f64) -> Result<f64, Error>,
{
    if !(v > 0.0) {
        return Err(Error::DegenerateFrequency);
    }
    let tr = TransformAt::new(cfg.transform, m);
    let sm = Summer { g, v, m, h: PI / m, tr, q: phi_series(&tr) };
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for n in (0..=n_plus).chain((n_minus..0).rev()) {
        let t = sm.term(n)?;
        sum += t;
        abs_sum += t.abs();
    }
    Ok(QuadratureResult {
        condition: condition(abs_sum, sum),
        value: PI * sum / v,
        m,
        h: PI / m,
        n_minus,
        n_plus,
        n_points: (n_plus - n_minus + 1).max(0) as usize,
        n_m: 1,
        rel_change: f64::NAN,
        est_rel_error: error_model(m, cfg.a),
    })
}

/// The M value used at attempt i (1-based): M_i = 2^{i−1} M₁.
pub fn m_schedule(cfg: &DEConfig, attempt: u32) -> f64 {
    initial_m(cfg.eps0, cfg.a) * 2f64.powi(attempt as i32 - 1)
}

/// Doubling refinement. The first sum at M₁ is only a reference. At each
/// later attempt the relative change d against the previous M stands for
/// the error of that previous result; since the error behaves like
/// exp(−AM/π), the error of the new result is predicted as
/// d^{M_i/M_{i−1}} = d², and the schedule stops once that is ≤ ε₀.
pub fn integrate<G>(g: &G, v: f64, cfg: &DEConfig) -> Result<QuadratureResult, Error>
where
    G: Fn(f64) -> Result<f64, Error>,
{
    let attempts = cfg.max_attempts.max(1);
    let mut prev = de_sum(g, v, m_schedule(cfg, 1), cfg)?;
    if attempts == 1 {
        return Ok(prev);
    }
    for i in 2..=attempts {
        let mut cur = de_sum(g, v, m_schedule(cfg, i), cfg)?;
        let diff = (cur.value - prev.value).abs();
        let d = if cur.value != 0.0 {
            diff / cur.value.abs()
        } else {
            diff
        };
        cur.n_m = i;
        cur.rel_change = d;
        cur.est_rel_error = d * d;
        if cur.est_rel_error <= cfg.eps0 || i == attempts {
            return Ok(cur);
        }
        prev = cur;
    }
    unreachable!("loop returns on the final attempt")
}

/// I(s) = v^{−(λ+1)} ∫₀^∞ f(x) sin(vx) dx with f from the term rewrite.
pub fn integrate_i_s(p: &IntegralParams, cfg: &DEConfig) -> Result<QuadratureResult, Error> {
    let v = p.oscillation_frequency()?;
    let ev = TermEvaluator::new(&s_transform(p), p);
    let g = |x: f64| ev.eval(x);
    let mut r = integrate(&g, v, cfg)?;
    r.value /= v.powi(p.lam as i32 + 1);
    Ok(r)
}

/// I(s) from a single trapezoidal sum at the given M.
pub fn de_sum_i_s(p: &IntegralParams, m: f64, cfg: &DEConfig) -> Result<QuadratureResult, Error> {
    let v = p.oscillation_frequency()?;
    let ev = TermEvaluator::new(&s_transform(p), p);
    let g = |x: f64| ev.eval(x);
    let mut r = de_sum(&g, v, m, cfg)?;
    r.value /= v.powi(p.lam as i32 + 1);
    Ok(r)
}

/// I(s) from a trapezoidal sum over a fixed index window.
pub fn de_sum_fixed_i_s(p: &IntegralParams, m: f64, cfg: &DEConfig, n_minus: i64, n_plus: i64) -> Result<QuadratureResult, Error> {
    let v = p.oscillation_frequency()?;
    let ev = TermEvaluator::new(&s_transform(p), p);
    let g = |x: f64| ev.eval(x);
    let mut r = de_sum_fixed(&g, v, m, cfg, n_minus, n_plus)?;
    r.value /= v.powi(p.lam as i32 + 1);
    Ok(r)
}
