//! The three-centre nuclear attraction integral over B functions as a
//! finite angular sum of s-integrals of I(s).

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dequad::{integrate_i_s, DEConfig};
use crate::error::Error;
use crate::oracle::{oracle_original, OracleConfig};
use crate::sintegrand::IntegralParams;
use crate::specfun::{
    binomial, double_factorial_f64, factorial_f64, gauss_legendre, gaunt, l_min, spherical_harmonic, GauntKey,
    HalfOddOrder,
};
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeCentreParams {
    pub n1: i32,
    pub l1: i32,
    pub m1: i32,
    pub zeta1: f64,
    pub n2: i32,
    pub l2: i32,
    pub m2: i32,
    pub zeta2: f64,
    /// A → C, the attracting nucleus.
    pub r1: [f64; 3],
    /// A → B, the centre of the second orbital.
    pub r2: [f64; 3],
}

impl ThreeCentreParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        (n1, l1, m1, zeta1): (i32, i32, i32, f64),
        (n2, l2, m2, zeta2): (i32, i32, i32, f64),
        r1: [f64; 3],
        r2: [f64; 3],
    ) -> Result<Self, Error> {
        for (n, l, m, z) in [(n1, l1, m1, zeta1), (n2, l2, m2, zeta2)] {
            if n < 1 {
                return Err(Error::InvalidParams(format!("n must be ≥ 1, got {n}")));
            }
            if l < 0 || m.abs() > l {
                return Err(Error::BadAngular { l, m });
            }
            if !(z > 0.0) || !z.is_finite() {
                return Err(Error::InvalidParams(format!("zeta must be positive, got {z}")));
            }
        }
        if r1.iter().chain(r2.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("position vectors must be finite".into()));
        }
        if norm(r2) == 0.0 {
            return Err(Error::InvalidParams("R2 must be non-zero".into()));
        }
        Ok(ThreeCentreParams { n1, l1, m1, zeta1, n2, l2, m2, zeta2, r1, r2 })
    }

    /// The same integral with every magnetic quantum number negated.
    pub fn conjugate_m(&self) -> Self {
        ThreeCentreParams { m1: -self.m1, m2: -self.m2, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SQuadConfig {
    pub order: usize,
    /// Keep doubling the order until two successive results agree.
    pub refine: bool,
    /// Tolerated relative change between successive orders.
    pub rel_tol: f64,
    /// Largest order tried when refining.
    pub max_order: usize,
}

impl Default for SQuadConfig {
    fn default() -> Self {
        SQuadConfig { order: 48, refine: true, rel_tol: 1e-10, max_order: 768 }
    }
}

/// (l′₁, m′₁, l′₂, m′₂, l, λ, j) of one summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SummandIndices {
    pub l1p: i32,
    pub m1p: i32,
    pub l2p: i32,
    pub m2p: i32,
    pub l: i32,
    pub lam: i32,
    pub j: i32,
}

/// One term of the angular sum with everything except the s-integral
/// folded into `coeff`.
#[derive(Clone, Copy, Debug)]
pub struct Summand {
    pub idx: SummandIndices,
    pub coeff: Complex64,
    pub nu: HalfOddOrder,
    pub n_gamma: i32,
    pub n_x: u32,
    pub mu: i32,
    pub s_power: i32,
    pub t_power: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeCentreResult {
    pub value: Complex64,
    /// Value at half the final order when refinement ran.
    pub coarse: Option<Complex64>,
    pub rel_change: Option<f64>,
    pub warning: Option<String>,
    pub n_summands: usize,
    /// Order of the rule that produced `value`.
    pub order: usize,
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Polar and azimuthal angles, θ ∈ [0, π], φ ∈ [0, 2π).
pub fn spherical_angles(v: [f64; 3]) -> Result<(f64, f64), Error> {
    let r = norm(v);
    if r == 0.0 {
        return Err(Error::Domain("direction of the zero vector".into()));
    }
    let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
    let mut phi = v[1].atan2(v[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi = 0.0;
    }
    Ok((theta, phi))
}

fn i_pow(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn gaunt_checked(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32, m3: i32) -> Option<f64> {
    let key = GauntKey::new(l1, m1, l2, m2, l3, m3).ok()?;
    let g = gaunt(key);
    (g != 0.0).then_some(g)
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), Error> {
    if cond {
        Ok(())
    } else {
        Err(Error::IndexRange(what()))
    }
}

pub fn prefactor(p: &ThreeCentreParams) -> f64 {
    let (n1, l1, n2, l2) = (p.n1, p.l1, p.n2, p.l2);
    8.0 * (4.0 * PI).powi(2)
        * sign(l1 + l2)
        * double_factorial_f64(2 * l1 + 1)
        * double_factorial_f64(2 * l2 + 1)
        * factorial_f64((n1 + l1 + n2 + l2 + 1) as u32)
        * p.zeta1.powi(2 * n1 + l1 - 1)
        * p.zeta2.powi(2 * n2 + l2 - 1)
        / (factorial_f64((n1 + l1) as u32) * factorial_f64((n2 + l2) as u32))
}

/// All non-vanishing summands in canonical order, with the range and
/// parity rules checked for each one.
pub fn enumerate_summands(p: &ThreeCentreParams) -> Result<Vec<Summand>, Error> {
    let (n1, l1, m1, n2, l2, m2) = (p.n1, p.l1, p.m1, p.n2, p.l2, p.m2);
    let (th2, ph2) = spherical_angles(p.r2)?;
    let r2 = norm(p.r2);
    let big_n = n1 + n2 + l1 + l2;
    let mut out = Vec::new();
    for l1p in 0..=l1 {
        for m1p in -l1p..=l1p {
            let Some(g1) = gaunt_checked(l1, m1, l1p, m1p, l1 - l1p, m1 - m1p) else {
                continue;
            };
            let c1 = i_pow(l1 + l1p) * g1
                / (double_factorial_f64(2 * l1p + 1) * double_factorial_f64(2 * (l1 - l1p) + 1));
            for l2p in 0..=l2 {
                for m2p in -l2p..=l2p {
                    let Some(g2) = gaunt_checked(l2, m2, l2p, m2p, l2 - l2p, m2 - m2p) else {
                        continue;
                    };
                    let c2 = i_pow(l2 + l2p) * sign(l2p) * g2
                        / (double_factorial_f64(2 * l2p + 1) * double_factorial_f64(2 * (l2 - l2p) + 1));
                    let n_x = l1 - l1p + l2 - l2p;
                    let lo = l_min(l1p, l2p, m1p, m2p);
                    let mut l = lo;
                    while l <= l1p + l2p {
                        check((l1p + l2p - l) % 2 == 0 && l >= 0, || {
                            format!("l = {l} has the wrong parity for l′₁ + l′₂ = {}", l1p + l2p)
                        })?;
                        check(l >= (m2p - m1p).abs() && l >= (l1p - l2p).abs(), || {
                            format!("l = {l} below |m′₂ − m′₁| or |l′₁ − l′₂|")
                        })?;
                        let dl = (l1p + l2p - l) / 2;
                        let Some(g3) = gaunt_checked(l2p, m2p, l1p, m1p, l, m2p - m1p) else {
                            l += 2;
                            continue;
                        };
                        let c3 = g3 * r2.powi(l) * spherical_harmonic(l as u32, m2p - m1p, th2, ph2);
                        let (la, ma, lb, mb) = (l2 - l2p, m2 - m2p, l1 - l1p, m1 - m1p);
                        let mu = ma - mb;
                        let mut lam = l_min(lb, la, mb, ma);
                        while lam <= n_x {
                            check((n_x + lam) % 2 == 0, || format!("λ = {lam} has the wrong parity for n_x = {n_x}"))?;
                            check(lam >= mu.abs() && lam >= (la - lb).abs(), || {
                                format!("λ = {lam} below |μ| = {} or |Δ| = {}", mu.abs(), (la - lb).abs())
                            })?;
                            let Some(g4) = gaunt_checked(la, ma, lb, mb, lam, mu) else {
                                lam += 2;
                                continue;
                            };
                            let c4 = i_pow(-lam) * g4;
                            for j in 0..=dl {
                                let bin = binomial(dl as u32, j as u32).to_f64().expect("small binomial");
                                let c5 = bin * sign(j)
                                    / (2f64.powi(big_n - j + 1) * factorial_f64((big_n - j + 1) as u32));
                                let twice_nu = 2 * (big_n - l - j) + 1;
                                check(twice_nu >= 1 - 2 * lam, || format!("ν = {twice_nu}/2 below 1/2 − λ"))?;
                                out.push(Summand {
                                    idx: SummandIndices { l1p, m1p, l2p, m2p, l, lam, j },
                                    coeff: c1 * c2 * c3 * c4 * c5,
                                    nu: HalfOddOrder::new(twice_nu)?,
                                    n_gamma: 2 * (n1 + l1 + n2 + l2) - (l1p + l2p) - l + 1,
                                    n_x: n_x as u32,
                                    mu,
                                    s_power: n2 + l2 + l1 - l1p,
                                    t_power: n1 + l1 + l2 - l2p,
                                });
                            }
                            lam += 2;
                        }
                        l += 2;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn frequency_vector(p: &ThreeCentreParams, s: f64) -> [f64; 3] {
    [
        (1.0 - s) * p.r2[0] - p.r1[0],
        (1.0 - s) * p.r2[1] - p.r1[1],
        (1.0 - s) * p.r2[2] - p.r1[2],
    ]
}

fn degenerate(p: &ThreeCentreParams, v: f64) -> bool {
    v <= 1e-12 * (norm(p.r1) + norm(p.r2))
}

/// Largest rounding error tolerated in a DE value of I(s) before the
/// spherical Bessel form is integrated instead.
const MAX_ROUNDING: f64 = 1e-13;

fn radial(p: &ThreeCentreParams, nu: HalfOddOrder, n_gamma: i32, n_x: u32, lam: u32, s: f64, de: &DEConfig) -> Result<f64, Error> {
    let v = norm(frequency_vector(p, s));
    if degenerate(p, v) {
        return Ok(0.0);
    }
    let ip = IntegralParams::with_frequency(s, nu, n_gamma, n_x, lam, norm(p.r1), p.zeta1, norm(p.r2), p.zeta2, v)?;
    let r = integrate_i_s(&ip, de)?;
    // For λ ≥ 1 and small v the sine sum cancels down to O(v^{λ+1}); the
    // spherical Bessel form has no such cancellation.
    if r.condition * f64::EPSILON > MAX_ROUNDING {
        return oracle_original(&ip, &OracleConfig::default());
    }
    Ok(r.value)
}

/// I(s) for one summand, with v = ‖(1−s)R⃗₂ − R⃗₁‖.
pub fn inner_radial_integral(p: &ThreeCentreParams, idx: &SummandIndices, s: f64, de: &DEConfig) -> Result<f64, Error> {
    let twice_nu = 2 * (p.n1 + p.n2 + p.l1 + p.l2 - idx.l - idx.j) + 1;
    let n_gamma = 2 * (p.n1 + p.l1 + p.n2 + p.l2) - (idx.l1p + idx.l2p) - idx.l + 1;
    let n_x = (p.l1 - idx.l1p + p.l2 - idx.l2p) as u32;
    radial(p, HalfOddOrder::new(twice_nu)?, n_gamma, n_x, idx.lam as u32, s, de)
}

/// s^a (1−s)^b Y_λ^μ(θ_v, φ_v) I(s) for one summand.
pub fn s_integrand(p: &ThreeCentreParams, idx: &SummandIndices, s: f64, de: &DEConfig) -> Result<Complex64, Error> {
    let vv = frequency_vector(p, s);
    if degenerate(p, norm(vv)) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (th, ph) = spherical_angles(vv)?;
    let mu = (p.m2 - idx.m2p) - (p.m1 - idx.m1p);
    let y = spherical_harmonic(idx.lam as u32, mu, th, ph);
    let w = s.powi(p.n2 + p.l2 + p.l1 - idx.l1p) * (1.0 - s).powi(p.n1 + p.l1 + p.l2 - idx.l2p);
    Ok(y * w * inner_radial_integral(p, idx, s, de)?)
}

type RadialKey = (i32, i32, u32, u32);

fn sum_at_order(p: &ThreeCentreParams, summands: &[Summand], order: usize, de: &DEConfig) -> Result<Complex64, Error> {
    let (x, w) = gauss_legendre(order);
    let nodes: Vec<(f64, f64)> = x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let keys: BTreeSet<RadialKey> =
        summands.iter().map(|t| (t.nu.twice_value(), t.n_gamma, t.n_x, t.idx.lam as u32)).collect();
    let jobs: Vec<(RadialKey, usize)> = keys.iter().flat_map(|&k| (0..nodes.len()).map(move |i| (k, i))).collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&((tw, ng, nx, lam), i)| radial(p, HalfOddOrder::new(tw)?, ng, nx, lam, nodes[i].0, de))
        .collect::<Result<_, _>>()?;
    let table: HashMap<(RadialKey, usize), f64> = jobs.into_iter().zip(values).collect();

    let harmonics: Vec<Option<(f64, f64)>> = nodes
        .iter()
        .map(|&(s, _)| {
            let vv = frequency_vector(p, s);
            (!degenerate(p, norm(vv))).then(|| spherical_angles(vv).expect("non-zero vector"))
        })
        .collect();

    let mut total = Complex64::new(0.0, 0.0);
    for t in summands {
        let key = (t.nu.twice_value(), t.n_gamma, t.n_x, t.idx.lam as u32);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &(s, wt)) in nodes.iter().enumerate() {
            let Some((th, ph)) = harmonics[i] else { continue };
            let y = spherical_harmonic(t.idx.lam as u32, t.mu, th, ph);
            let pw = s.powi(t.s_power) * (1.0 - s).powi(t.t_power);
            acc += y * (wt * pw * table[&(key, i)]);
        }
        total += t.coeff * acc;
    }
    Ok(total * prefactor(p))
}

/// The full three-centre integral.
pub fn three_centre(p: &ThreeCentreParams, sq: &SQuadConfig, de: &DEConfig) -> Result<ThreeCentreResult, Error> {
    if sq.order < 2 {
        return Err(Error::InvalidParams("s-quadrature order must be at least 2".into()));
    }
    let summands = enumerate_summands(p)?;
    let mut order = sq.order;
    let mut base = sum_at_order(p, &summands, order, de)?;
    if !sq.refine {
        return Ok(ThreeCentreResult {
            value: base,
            coarse: None,
            rel_change: None,
            warning: None,
            n_summands: summands.len(),
            order,
        });
    }
    loop {
        let fine = sum_at_order(p, &summands, 2 * order, de)?;
        let change = (fine - base).norm() / fine.norm().max(f64::MIN_POSITIVE);
        order *= 2;
        if change <= sq.rel_tol || 2 * order > sq.max_order {
            let warning = (change > sq.rel_tol).then(|| {
                format!("s-quadrature orders {} and {order} differ by {change:.2e} relative", order / 2)
            });
            return Ok(ThreeCentreResult {
                value: fine,
                coarse: Some(base),
                rel_change: Some(change),
                warning,
                n_summands: summands.len(),
                order,
            });
        }
        base = fine;
    }
}
