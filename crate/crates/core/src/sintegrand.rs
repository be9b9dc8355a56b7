//! The integrand of I(s), its sine-transformed form f(x), and the exact
//! term rewrite that produces f(x).

use std::collections::BTreeMap;

use crate::error::Error;
use crate::specfun::{reduced_bessel, reduced_bessel_ladder, spherical_bessel, HalfOddOrder};

/// The nine scalars of I(s) together with the oscillation frequency v.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralParams {
    pub s: f64,
    pub nu: HalfOddOrder,
    pub n_gamma: i32,
    pub n_x: u32,
    pub lam: u32,
    pub r1: f64,
    pub zeta1: f64,
    pub r2: f64,
    pub zeta2: f64,
    v: f64,
}

impl IntegralParams {
    /// Collinear geometry: v = |(1−s)R₂ − R₁|.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s: f64,
        nu: HalfOddOrder,
        n_gamma: i32,
        n_x: u32,
        lam: u32,
        r1: f64,
        zeta1: f64,
        r2: f64,
        zeta2: f64,
    ) -> Result<Self, Error> {
        let v = ((1.0 - s) * r2 - r1).abs();
        Self::with_frequency(s, nu, n_gamma, n_x, lam, r1, zeta1, r2, zeta2, v)
    }

    /// General geometry, with v = ‖(1−s)R⃗₂ − R⃗₁‖ supplied by the caller.
    #[allow(clippy::too_many_arguments)]
    pub fn with_frequency(
        s: f64,
        nu: HalfOddOrder,
        n_gamma: i32,
        n_x: u32,
        lam: u32,
        r1: f64,
        zeta1: f64,
        r2: f64,
        zeta2: f64,
        v: f64,
    ) -> Result<Self, Error> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(s > 0.0 && s < 1.0) {
            return bad("s must be in (0,1)");
        }
        if !(zeta1 > 0.0) || !zeta1.is_finite() {
            return bad("zeta1 must be positive");
        }
        if !(zeta2 > 0.0) || !zeta2.is_finite() {
            return bad("zeta2 must be positive");
        }
        if !(r2 > 0.0) || !r2.is_finite() {
            return bad("R2 must be positive");
        }
        if !(r1 >= 0.0) || !r1.is_finite() {
            return bad("R1 must be non-negative");
        }
        if !(v >= 0.0) || !v.is_finite() {
            return bad("v must be finite and non-negative");
        }
        Ok(IntegralParams { s, nu, n_gamma, n_x, lam, r1, zeta1, r2, zeta2, v })
    }

    pub fn oscillation_frequency(&self) -> Result<f64, Error> {
        if self.v > 0.0 {
            Ok(self.v)
        } else {
            Err(Error::DegenerateFrequency)
        }
    }
}

/// γ(s, x) = √((1−s)ζ₁² + sζ₂² + s(1−s)x²).
pub fn gamma_of(p: &IntegralParams, x: f64) -> f64 {
    let s = p.s;
    ((1.0 - s) * p.zeta1 * p.zeta1 + s * p.zeta2 * p.zeta2 + s * (1.0 - s) * x * x).sqrt()
}

pub fn oscillation_frequency(p: &IntegralParams) -> Result<f64, Error> {
    p.oscillation_frequency()
}

/// c · x^a · k̂_μ(R₂γ) / γ^b
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialTerm {
    pub coeff: f64,
    pub x_power: i32,
    pub k_order: HalfOddOrder,
    pub gamma_power: i32,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RadialTermSum {
    pub terms: Vec<RadialTerm>,
}

impl RadialTermSum {
    /// Merges like terms on (a, 2μ, b) and drops zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = RadialTerm>) -> Self {
        let mut merged: BTreeMap<(i32, i32, i32), f64> = BTreeMap::new();
        for t in terms {
            *merged.entry((t.x_power, t.k_order.twice_value(), t.gamma_power)).or_insert(0.0) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((a, twice_mu, b), coeff)| RadialTerm {
                coeff,
                x_power: a,
                k_order: HalfOddOrder::new(twice_mu).expect("odd by construction"),
                gamma_power: b,
            })
            .collect();
        RadialTermSum { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Self {
        RadialTermSum::from_terms(self.terms.iter().map(|t| RadialTerm { coeff: t.coeff * k, ..*t }))
    }

    pub fn min_x_power(&self) -> Option<i32> {
        self.terms.iter().map(|t| t.x_power).min()
    }
}

/// x^{n_x+λ−1} k̂_ν(R₂γ) / γ^{n_γ}
pub fn initial_term(p: &IntegralParams) -> RadialTermSum {
    RadialTermSum::from_terms([RadialTerm {
        coeff: 1.0,
        x_power: p.n_x as i32 + p.lam as i32 - 1,
        k_order: p.nu,
        gamma_power: p.n_gamma,
    }])
}

/// One application of d/(x dx), using dγ/dx = s(1−s)x/γ and
/// d/dz k̂_μ(z) = −z k̂_{μ−1}(z).
pub fn apply_hemiderivative(ts: &RadialTermSum, p: &IntegralParams) -> RadialTermSum {
    let q = p.s * (1.0 - p.s);
    let r2sq = p.r2 * p.r2;
    let mut out = Vec::with_capacity(3 * ts.len());
    for t in &ts.terms {
        let c = t.coeff;
        let (a, b) = (t.x_power, t.gamma_power);
        out.push(RadialTerm { coeff: a as f64 * c, x_power: a - 2, ..*t });
        out.push(RadialTerm { coeff: -c * q * r2sq, k_order: t.k_order.lowered(1), ..*t });
        out.push(RadialTerm { coeff: -(b as f64) * c * q, gamma_power: b + 2, ..*t });
    }
    let next = RadialTermSum::from_terms(out);
    debug_assert!(next.terms.iter().all(|t| t.coeff.is_finite()));
    next
}

/// f(x) = (d/(x dx))^λ [x^{n_x+λ−1} k̂_ν(R₂γ)/γ^{n_γ}].
pub fn s_transform(p: &IntegralParams) -> RadialTermSum {
    let mut ts = initial_term(p);
    for _ in 0..p.lam {
        ts = apply_hemiderivative(&ts, p);
    }
    ts
}

/// Evaluator for a term sum that shares k̂-ladder work across terms.
#[derive(Clone, Debug)]
pub struct TermEvaluator {
    terms: Vec<RadialTerm>,
    ladder_len: usize,
    r2: f64,
    params: IntegralParams,
}

impl TermEvaluator {
    pub fn new(ts: &RadialTermSum, p: &IntegralParams) -> Self {
        let ladder_len = ts
            .terms
            .iter()
            .map(|t| {
                let tw = t.k_order.twice_value();
                ((tw.abs() - 1) / 2) as usize
            })
            .max()
            .unwrap_or(0);
        TermEvaluator { terms: ts.terms.clone(), ladder_len, r2: p.r2, params: *p }
    }

    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("f(x) requires x > 0, got {x}")));
        }
        let g = gamma_of(&self.params, x);
        let z = self.r2 * g;
        let mut ladder = Vec::with_capacity(self.ladder_len + 1);
        reduced_bessel_ladder(self.ladder_len, z, &mut ladder);
        let mut acc = 0.0;
        for t in &self.terms {
            let tw = t.k_order.twice_value();
            let k = if tw > 0 {
                ladder[((tw - 1) / 2) as usize]
            } else {
                ladder[((-tw - 1) / 2) as usize] * z.powi(tw)
            };
            if k == 0.0 {
                continue;
            }
            acc += t.coeff * x.powi(t.x_power) * k / g.powi(t.gamma_power);
        }
        Ok(acc)
    }
}

/// Σ c·x^a·k̂_μ(R₂γ)/γ^b at x > 0.
pub fn eval_f(ts: &RadialTermSum, p: &IntegralParams, x: f64) -> Result<f64, Error> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("f(x) requires x > 0, got {x}")));
    }
    let g = gamma_of(p, x);
    let z = p.r2 * g;
    let mut acc = 0.0;
    for t in &ts.terms {
        acc += t.coeff * x.powi(t.x_power) * reduced_bessel(t.k_order, z)? / g.powi(t.gamma_power);
    }
    Ok(acc)
}

/// x^{n_x} k̂_ν(R₂γ)/γ^{n_γ} j_λ(vx); uses v = 0 when the frequency is degenerate.
pub fn eval_original_integrand(p: &IntegralParams, x: f64) -> f64 {
    let g = gamma_of(p, x);
    let k = reduced_bessel(p.nu, p.r2 * g).expect("R₂γ > 0");
    let xn = if p.n_x == 0 { 1.0 } else { x.powi(p.n_x as i32) };
    xn * k / g.powi(p.n_gamma) * spherical_bessel(p.lam, p.v * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, twice_nu: i32, ng: i32, nx: u32, lam: u32, r1: f64, z1: f64, r2: f64, z2: f64) -> IntegralParams {
        IntegralParams::new(s, HalfOddOrder::new(twice_nu).unwrap(), ng, nx, lam, r1, z1, r2, z2).unwrap()
    }

    #[test]
    fn gamma_values() {
        let p = params(0.5, 1, 0, 0, 0, 1.0, 1.0, 3.0, 1.0);
        assert!((gamma_of(&p, 0.0) - 1.0).abs() < 1e-16);
        let p = params(0.01, 1, 0, 0, 0, 1.0, 2.0, 3.0, 1.0);
        assert!((gamma_of(&p, 0.0) - 3.97f64.sqrt()).abs() < 1e-15);
        assert!(gamma_of(&p, 2.0) > gamma_of(&p, 1.0));
    }

    #[test]
    fn frequency() {
        let p = params(0.01, 9, 7, 2, 2, 9.0, 2.0, 3.5, 1.0);
        assert!((p.oscillation_frequency().unwrap() - 5.535).abs() < 1e-14);
        let p = params(0.99, 5, 1, 0, 0, 24.0, 1.5, 2.0, 1.0);
        assert!((p.oscillation_frequency().unwrap() - 23.98).abs() < 1e-13);
        let p = params(0.5, 1, 1, 0, 0, 1.0, 1.0, 2.0, 1.0);
        assert_eq!(p.oscillation_frequency(), Err(Error::DegenerateFrequency));
    }

    #[test]
    fn validation_messages() {
        let e = IntegralParams::new(1.5, HalfOddOrder::from_n(0), 0, 0, 0, 1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("s must be in (0,1)"));
    }

    #[test]
    fn initial_terms() {
        let p = params(0.01, 5, 5, 0, 0, 6.31, 1.0, 2.0, 1.0);
        let t = initial_term(&p);
        assert_eq!(t.terms.len(), 1);
        assert_eq!((t.terms[0].x_power, t.terms[0].k_order.twice_value(), t.terms[0].gamma_power), (-1, 5, 5));
        let p = params(0.01, 13, 9, 3, 2, 4.0, 2.5, 5.5, 1.0);
        let t = initial_term(&p);
        assert_eq!((t.terms[0].x_power, t.terms[0].k_order.twice_value(), t.terms[0].gamma_power), (4, 13, 9));
        assert_eq!(s_transform(&params(0.3, 5, 5, 0, 0, 6.0, 1.0, 2.0, 1.0)), t_single(-1, 5, 5));
    }

    fn t_single(a: i32, twice: i32, b: i32) -> RadialTermSum {
        RadialTermSum::from_terms([RadialTerm {
            coeff: 1.0,
            x_power: a,
            k_order: HalfOddOrder::new(twice).unwrap(),
            gamma_power: b,
        }])
    }

    #[test]
    fn hand_rewrite() {
        let p = params(0.5, 3, 1, 0, 0, 0.0, 1.0, 2.0, 1.0);
        let out = apply_hemiderivative(&t_single(0, 3, 0), &p);
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms[0].coeff, -1.0);
        assert_eq!(out.terms[0].k_order.twice_value(), 1);

        let out = apply_hemiderivative(&t_single(2, 3, 1), &p);
        let find = |a, tw, b| {
            out.terms
                .iter()
                .find(|t| t.x_power == a && t.k_order.twice_value() == tw && t.gamma_power == b)
                .map(|t| t.coeff)
        };
        assert_eq!(out.terms.len(), 3);
        assert_eq!(find(0, 3, 1), Some(2.0));
        assert_eq!(find(2, 1, 1), Some(-1.0));
        assert_eq!(find(2, 3, 3), Some(-0.25));
    }

    #[test]
    fn single_term_value() {
        let p = params(0.3, 1, 0, 0, 0, 0.0, 1.0, 2.0, 1.0);
        let v = eval_f(&t_single(1, 1, 0), &p, 1.0).unwrap();
        // γ ≡ √(1 + s(1−s)) at x = 1
        let g = (1.0 + 0.21f64).sqrt();
        assert!((v - (-2.0 * g).exp()).abs() < 1e-15);
        assert!(eval_f(&t_single(1, 1, 0), &p, 0.0).is_err());
    }

    #[test]
    fn evaluator_matches_direct_sum() {
        let p = params(0.01, 33, 33, 7, 7, 65.0, 2.0, 2.0, 1.0);
        let ts = s_transform(&p);
        let ev = TermEvaluator::new(&ts, &p);
        for &x in &[0.01, 0.5, 3.0, 20.0, 50.0] {
            let a = ev.eval(x).unwrap();
            let b = eval_f(&ts, &p, x).unwrap();
            assert!(a.is_finite());
            assert!(((a - b) / b).abs() < 1e-11, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn original_integrand_at_zero() {
        let p = params(0.01, 9, 7, 2, 2, 9.0, 2.0, 3.5, 1.0);
        assert_eq!(eval_original_integrand(&p, 0.0), 0.0);
    }
}
