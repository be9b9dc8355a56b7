//! Special functions: exact factorials, reduced and spherical Bessel
//! functions, associated Legendre functions, spherical harmonics and
//! Gaunt coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Order ν = n + 1/2 of a reduced Bessel function, stored as 2ν.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfOddOrder(i32);

impl HalfOddOrder {
    pub fn new(twice_value: i32) -> Result<Self, Error> {
        if twice_value % 2 == 0 {
            return Err(Error::EvenOrder(twice_value));
        }
        Ok(HalfOddOrder(twice_value))
    }

    /// ν = n + 1/2.
    pub fn from_n(n: i32) -> Self {
        HalfOddOrder(2 * n + 1)
    }

    pub fn twice_value(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// ν − k.
    pub fn lowered(self, k: i32) -> Self {
        HalfOddOrder(self.0 - 2 * k)
    }
}

impl fmt::Display for HalfOddOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl FromStr for HalfOddOrder {
    type Err = Error;

    /// Accepts "9/2", "-1/2" or a decimal such as "4.5".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::BadOrder(s.to_string());
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            let den: i32 = den.trim().parse().map_err(|_| bad())?;
            if den != 2 {
                return Err(bad());
            }
            HalfOddOrder::new(num)
        } else {
            let x: f64 = s.parse().map_err(|_| bad())?;
            let twice = 2.0 * x;
            if (twice - twice.round()).abs() > 1e-12 {
                return Err(bad());
            }
            HalfOddOrder::new(twice.round() as i32)
        }
    }
}

/// Indices of a Gaunt coefficient ⟨l1 m1|l2 m2|l3 m3⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GauntKey {
    pub l1: i32,
    pub m1: i32,
    pub l2: i32,
    pub m2: i32,
    pub l3: i32,
    pub m3: i32,
}

impl GauntKey {
    pub fn new(l1: i32, m1: i32, l2: i32, m2: i32, l3: i32, m3: i32) -> Result<Self, Error> {
        for (l, m) in [(l1, m1), (l2, m2), (l3, m3)] {
            if l < 0 || m.abs() > l {
                return Err(Error::BadAngular { l, m });
            }
        }
        Ok(GauntKey { l1, m1, l2, m2, l3, m3 })
    }
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// n!! with (−1)!! = 0!! = 1.
pub fn double_factorial(n: i32) -> Result<BigUint, Error> {
    if n < -1 {
        return Err(Error::Domain(format!("double factorial of {n}")));
    }
    let mut acc = BigUint::one();
    let mut k = n;
    while k > 1 {
        acc *= k as u32;
        k -= 2;
    }
    Ok(acc)
}

pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn double_factorial_f64(n: i32) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

// e^{-z} underflows to zero beyond this.
const EXP_UNDERFLOW: f64 = 745.2;

/// k̂_{n+1/2}(z) for n ≥ 0 from the finite sum, written as
/// e^{−z} Σ_j c_j 2^{−j} z^{n−j} so that no term is ever divided by a
/// small z.
fn reduced_bessel_nonneg(n: u32, z: f64) -> f64 {
    if z > EXP_UNDERFLOW + (n as f64) * z.ln() {
        return 0.0;
    }
    // c_j = (n+j)!/(j!(n−j)!); z^{n−j} carries c_j 2^{−j}.
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut c = 1.0;
    for j in 0..=n {
        coeffs.push(c / 2f64.powi(j as i32));
        let jf = j as f64;
        let nf = n as f64;
        c *= (nf + jf + 1.0) * (nf - jf) / (jf + 1.0);
    }
    let mut poly = 0.0;
    for j in 0..=n as usize {
        poly = poly * z + coeffs[j];
    }
    let direct = poly * (-z).exp();
    if direct.is_finite() && (direct != 0.0 || z > EXP_UNDERFLOW) {
        direct
    } else {
        (poly.ln() - z).exp()
    }
}

/// Reduced Bessel function k̂_ν(z), negative orders via
/// k̂_ν(z) = z^{2ν} k̂_{−ν}(z).
pub fn reduced_bessel(order: HalfOddOrder, z: f64) -> Result<f64, Error> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("reduced Bessel argument {z}")));
    }
    let twice = order.twice_value();
    if twice > 0 {
        Ok(reduced_bessel_nonneg(((twice - 1) / 2) as u32, z))
    } else {
        let pos = reduced_bessel_nonneg(((-twice - 1) / 2) as u32, z);
        Ok(pos * z.powi(twice))
    }
}

/// k̂_{n+1/2}(z) for n = 0..=max_n by the upward recurrence
/// k̂_{n+3/2} = (2n+1) k̂_{n+1/2} + z² k̂_{n−1/2}, which has only
/// positive terms.
pub fn reduced_bessel_ladder(max_n: usize, z: f64, out: &mut Vec<f64>) {
    out.clear();
    let e = if z > EXP_UNDERFLOW { 0.0 } else { (-z).exp() };
    out.push(e);
    if max_n == 0 {
        return;
    }
    out.push((1.0 + z) * e);
    let z2 = z * z;
    for n in 1..max_n {
        let next = (2 * n + 1) as f64 * out[n] + z2 * out[n - 1];
        out.push(next);
    }
}

/// Spherical Bessel function j_λ(x).
pub fn spherical_bessel(lam: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if lam == 0 { 1.0 } else { 0.0 };
    }
    if x < 0.0 {
        let v = spherical_bessel(lam, -x);
        return if lam % 2 == 0 { v } else { -v };
    }
    let l = lam as usize;
    if x >= lam as f64 {
        let j0 = x.sin() / x;
        if lam == 0 {
            return j0;
        }
        let mut prev = j0;
        let mut cur = x.sin() / (x * x) - x.cos() / x;
        for k in 1..l {
            let next = (2 * k + 1) as f64 / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    if x < 1e-3 {
        // Leading series terms; relative truncation error below x^6/(16·(2λ+3)³).
        let x2 = x * x;
        let a = (2 * l + 3) as f64;
        let b = (2 * l + 5) as f64;
        let c = (2 * l + 7) as f64;
        let lead = x.powi(lam as i32) / double_factorial_f64(2 * lam as i32 + 1);
        return lead * (1.0 - x2 / (2.0 * a) * (1.0 - x2 / (4.0 * b) * (1.0 - x2 / (6.0 * c))));
    }
    // Miller: downward from well above λ, normalised against j0 or j1.
    let start = l + 20 + (40.0 * (l as f64 + 1.0)).sqrt() as usize;
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut target = 0.0;
    let mut j1_est = 0.0;
    for k in (1..=start).rev() {
        let below = (2 * k + 1) as f64 / x * cur - above;
        above = cur;
        cur = below;
        // `cur` now holds j_{k−1}, `above` j_k.
        if k - 1 == l {
            target = cur;
        }
        if k == 1 {
            j1_est = above;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            target *= 1e-250;
            j1_est *= 1e-250;
        }
    }
    let j0_est = cur;
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if j0.abs() >= j1.abs() {
        target * (j0 / j0_est)
    } else {
        target * (j1 / j1_est)
    }
}

/// P_l^m(x) without the (−1)^m factor.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> Result<f64, Error> {
    if m > l {
        return Err(Error::BadAngular { l: l as i32, m: m as i32 });
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("Legendre argument {x}")));
    }
    let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= (2 * i + 1) as f64 * somx2;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return Ok(pm1);
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = pll;
    }
    Ok(pll)
}

/// Y_l^m(θ, φ) = i^{m+|m|} N P_l^{|m|}(cos θ) e^{imφ}.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    assert!(am <= l, "|m| > l in spherical harmonic");
    let mut ratio = 1.0;
    for k in (l - am + 1)..=(l + am) {
        ratio /= k as f64;
    }
    let norm = ((2 * l + 1) as f64 * ratio / (4.0 * PI)).sqrt();
    let p = assoc_legendre(l, am, theta.cos().clamp(-1.0, 1.0)).expect("valid Legendre arguments");
    let phase = if m > 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let (s, c) = (m as f64 * phi).sin_cos();
    Complex64::new(c, s) * (phase * norm * p)
}

fn fact_big(n: i32) -> BigInt {
    BigInt::from(factorial(n as u32))
}

/// Wigner 3j symbol as (S, R) with value S·√R, S and R exact.
fn wigner3j_parts(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Option<(BigRational, BigRational)> {
    if m1 + m2 + m3 != 0 || j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return None;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return None;
    }
    let delta = BigRational::new(
        fact_big(j1 + j2 - j3) * fact_big(j1 - j2 + j3) * fact_big(-j1 + j2 + j3),
        fact_big(j1 + j2 + j3 + 1),
    );
    let r = delta
        * BigRational::from_integer(
            fact_big(j1 + m1)
                * fact_big(j1 - m1)
                * fact_big(j2 + m2)
                * fact_big(j2 - m2)
                * fact_big(j3 + m3)
                * fact_big(j3 - m3),
        );
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact_big(k)
            * fact_big(j3 - j2 + k + m1)
            * fact_big(j3 - j1 + k - m2)
            * fact_big(j1 + j2 - j3 - k)
            * fact_big(j1 - k - m1)
            * fact_big(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        sum = -sum;
    }
    Some((sum, r))
}

/// Gaunt coefficient ∫ (Y_{l1}^{m1})* Y_{l2}^{m2} Y_{l3}^{m3} dΩ.
pub fn gaunt(key: GauntKey) -> f64 {
    let GauntKey { l1, m1, l2, m2, l3, m3 } = key;
    if m1 != m2 + m3 || (l1 + l2 + l3) % 2 == 1 || l1 < (l2 - l3).abs() || l1 > l2 + l3 {
        return 0.0;
    }
    let Some((s0, r0)) = wigner3j_parts(l1, l2, l3, 0, 0, 0) else {
        return 0.0;
    };
    let Some((sm, rm)) = wigner3j_parts(l1, l2, l3, -m1, m2, m3) else {
        return 0.0;
    };
    let mut s = s0 * sm;
    if m1.rem_euclid(2) == 1 {
        s = -s;
    }
    if s.is_zero() {
        return 0.0;
    }
    let dims = BigInt::from((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1));
    let q = r0 * rm * BigRational::from_integer(dims);
    let sign = if s.is_negative() { -1.0 } else { 1.0 };
    // Combine S²·Q exactly so only one rounding happens before the root.
    let sq = (s.clone() * s) * q;
    sign * (sq.to_f64().expect("finite rational") / (4.0 * PI)).sqrt()
}

/// Lower summation limit of the Gaunt linearisation of (Y_{l1}^{m1})* Y_{l2}^{m2}.
pub fn l_min(l1: i32, l2: i32, m1: i32, m2: i32) -> i32 {
    let base = (l1 - l2).abs().max((m2 - m1).abs());
    if (l1 + l2 + base) % 2 == 0 {
        base
    } else {
        base + 1
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
