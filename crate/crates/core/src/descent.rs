//! Descent via the 2-isogenies `phi: E_d -> E'_d` and `phi_hat: E'_d -> E_d`,
//! where `E_d: y^2 = x^3 + d x` and `E'_d: y^2 = x^3 - 4 d x`.
//!
//! For a curve `y^2 = x^3 + b x` the Selmer group of the isogeny landing on it
//! is the set of squarefree `d1 | b` whose torsor
//!
//! ```text
//! w^2 = d1 u^4 + (b / d1) v^4
//! ```
//!
//! is soluble over the reals, over `Q_2` and over `Q_p` for every odd `p | b`.
//! Elsewhere the torsor has good reduction and is always soluble. The parity
//! of `dim Sel^phi(E_d) + dim Sel^phi_hat(E'_d)` is the conjectural rank parity
//! of `E_d`.
//!
//! `p`-adic solubility is decided exactly: each chart of the torsor reduces to
//! asking whether a quartic `g` takes a square value on `Z_p` (or `p Z_p`), and
//! balls `x0 + p^n Z_p` are refined until `g` is provably constant modulo
//! squares on the ball or a root of `g` is certified by Hensel's lemma.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, power_free_representative, Rational};
use crate::characters::kronecker;
use crate::classes::Place;
use crate::engine::classify_quartic;
use crate::error::{Error, Result};

/// Largest odd prime at which the ball search is attempted.
pub const MAX_SEARCH_PRIME: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSide {
    /// `E_d: y^2 = x^3 + d x`
    E,
    /// `E'_d: y^2 = x^3 - 4 d x`
    EPrime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    pub d: BigInt,
    pub side: CurveSide,
}

impl CurveModel {
    pub fn new(d: BigInt, side: CurveSide) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::invalid("curve coefficient must be nonzero"));
        }
        Ok(CurveModel { d, side })
    }

    /// The coefficient `b` in `y^2 = x^3 + b x`.
    pub fn x_coefficient(&self) -> BigInt {
        match self.side {
            CurveSide::E => self.d.clone(),
            CurveSide::EPrime => -BigInt::from(4) * &self.d,
        }
    }
}

/// A homogeneous space `w^2 = d1 u^4 + d2 v^4` with `d1 d2 = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsorClass {
    pub d1: BigInt,
    pub d2: BigInt,
}

/// All squarefree `d1 | b` of either sign, with their companions `b / d1`.
pub fn torsor_classes(curve: &CurveModel) -> Result<Vec<TorsorClass>> {
    let b = curve.x_coefficient();
    let primes: Vec<BigUint> = factorize(&b)?.factors.into_iter().map(|(p, _)| p).collect();
    let mut out = Vec::with_capacity(2 << primes.len());
    for mask in 0u64..(1 << primes.len()) {
        let mag = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(BigUint::one(), |acc, (_, p)| acc * p);
        for sign in [1, -1] {
            let d1 = BigInt::from(mag.clone()) * sign;
            let d2 = &b / &d1;
            out.push(TorsorClass { d1, d2 });
        }
    }
    Ok(out)
}

fn valuation(x: &BigInt, p: &BigInt) -> u64 {
    debug_assert!(!x.is_zero());
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Whether a nonzero integer is a square in `Q_p`.
fn is_qp_square(x: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    let v = valuation(x, &pb);
    if v % 2 == 1 {
        return false;
    }
    let unit = x / pb.pow(v as u32);
    if p == 2 {
        unit.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        kronecker(&unit, &BigUint::from(p)).expect("odd prime modulus") == 1
    }
}

/// Coefficients of `g(x0 + s t)` in `t`, ascending.
fn taylor_shift(g: &[BigInt; 5], x0: &BigInt, scale: &BigInt) -> [BigInt; 5] {
    // Repeated synthetic division by (x - x0) gives the Taylor coefficients at x0.
    let mut c = g.clone();
    for i in 0..4 {
        for j in (i..4).rev() {
            let t = &c[j + 1] * x0;
            c[j] += t;
        }
    }
    let mut s = BigInt::one();
    for k in c.iter_mut() {
        *k *= &s;
        s *= scale;
    }
    c
}

/// Whether `g(x)` is a square (or zero) in `Q_p` for some `x` in `x0 + p^n0 Z_p`.
fn quartic_takes_square(g: &[BigInt; 5], p: u64, n0: u32, max_depth: u32) -> Result<Option<bool>> {
    let pb = BigInt::from(p);
    let need: u64 = if p == 2 { 3 } else { 1 };
    let mut stack: Vec<(BigInt, u32)> = vec![(BigInt::zero(), n0)];
    while let Some((x0, n)) = stack.pop() {
        let scale = pb.pow(n);
        let c = taylor_shift(g, &x0, &scale);
        if c[0].is_zero() || is_qp_square(&c[0], p) {
            return Ok(Some(true));
        }
        let lead = valuation(&c[0], &pb);
        // Hensel: |g(x0)| < |g'(x0)|^2 certifies a root of g in Z_p.
        let g1 = &c[1] / &scale;
        if !g1.is_zero() && lead > 2 * valuation(&g1, &pb) {
            return Ok(Some(true));
        }
        let perturbation = c[1..].iter().filter(|k| !k.is_zero()).map(|k| valuation(k, &pb)).min();
        match perturbation {
            None => continue,
            Some(r) if r >= lead + need => continue,
            _ => {}
        }
        if n >= max_depth {
            return Ok(None);
        }
        let step = pb.pow(n);
        for j in 0..p {
            stack.push((&x0 + &step * j, n + 1));
        }
    }
    Ok(Some(false))
}

/// Local solubility of `w^2 = d1 u^4 + d2 v^4` at one place.
pub fn locally_soluble(d1: &BigInt, d2: &BigInt, place: Place) -> Result<bool> {
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::invalid("torsor coefficients must be nonzero"));
    }
    let p = match place {
        Place::Real => return Ok(d1.is_positive() || d2.is_positive()),
        Place::Finite(p) => p,
    };
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p > MAX_SEARCH_PRIME {
        return Err(Error::invalid(format!(
            "local solubility search is limited to primes up to {MAX_SEARCH_PRIME}"
        )));
    }
    let pb = BigInt::from(p);
    let bound = valuation(&(BigInt::from(16) * d1 * d1 * d2 * d2), &pb) as u32 + 3;
    let max_depth = 4 * bound + 16;
    let zero = BigInt::zero;
    // v a unit: x = u / v ranges over Z_p. v in p Z_p: y = v / u ranges over p Z_p.
    let chart_v_unit = [d2.clone(), zero(), zero(), zero(), d1.clone()];
    let chart_u_unit = [d1.clone(), zero(), zero(), zero(), d2.clone()];
    for (g, n0) in [(chart_v_unit, 0), (chart_u_unit, 1)] {
        match quartic_takes_square(&g, p, n0, max_depth)? {
            Some(true) => return Ok(true),
            Some(false) => {}
            None => {
                return Err(Error::PrecisionExhausted {
                    d1: d1.to_string(),
                    d2: d2.to_string(),
                    place: place.to_string(),
                })
            }
        }
    }
    Ok(false)
}

/// Surviving torsors of the isogeny whose codomain is `curve`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelmerGroup {
    pub curve: CurveModel,
    pub surviving: Vec<TorsorClass>,
    pub rank: u32,
}

pub fn selmer_group(curve: &CurveModel) -> Result<SelmerGroup> {
    let b = curve.x_coefficient();
    let mut places = vec![Place::Real, Place::Finite(2)];
    for (p, _) in factorize(&b)?.factors {
        let p = p
            .to_u64()
            .ok_or_else(|| Error::invalid(format!("prime {p} too large for local search")))?;
        if p != 2 {
            places.push(Place::Finite(p));
        }
    }
    let mut surviving = Vec::new();
    'torsor: for t in torsor_classes(curve)? {
        for &place in &places {
            if !locally_soluble(&t.d1, &t.d2, place)? {
                continue 'torsor;
            }
        }
        surviving.push(t);
    }
    let count = surviving.len();
    if !count.is_power_of_two() {
        return Err(Error::Descent(format!(
            "{count} surviving torsors for b = {b} is not a power of two"
        )));
    }
    Ok(SelmerGroup {
        curve: curve.clone(),
        surviving,
        rank: count.trailing_zeros(),
    })
}

/// `F_2`-dimension of the Selmer group of the isogeny landing on `curve`.
pub fn selmer_rank(curve: &CurveModel) -> Result<u32> {
    Ok(selmer_group(curve)?.rank)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentReport {
    #[serde(with = "crate::record::bigint_string")]
    pub d: BigInt,
    pub phi_selmer_rank: u32,
    pub phihat_selmer_rank: u32,
    pub lambda_parity: u8,
    #[serde(with = "crate::record::bigint_vec")]
    pub phi_torsors: Vec<BigInt>,
    #[serde(with = "crate::record::bigint_vec")]
    pub phihat_torsors: Vec<BigInt>,
}

/// Both Selmer groups for the fourth-power-free representative of `d`.
pub fn descent_report(d: &BigInt) -> Result<DescentReport> {
    let d = power_free_representative(&Rational::from_integer(d.clone()), 4)?;
    // Sel^phi(E_d) is read off E'_d, Sel^phi_hat(E'_d) off E_d.
    let phi = selmer_group(&CurveModel::new(d.clone(), CurveSide::EPrime)?)?;
    let phihat = selmer_group(&CurveModel::new(d.clone(), CurveSide::E)?)?;
    let d1s = |g: &SelmerGroup| g.surviving.iter().map(|t| t.d1.clone()).collect();
    Ok(DescentReport {
        d,
        phi_selmer_rank: phi.rank,
        phihat_selmer_rank: phihat.rank,
        lambda_parity: ((phi.rank + phihat.rank) % 2) as u8,
        phi_torsors: d1s(&phi),
        phihat_torsors: d1s(&phihat),
    })
}

/// Parity of the `lambda`-Selmer rank of `E_d x E'_d`.
pub fn lambda_parity(d: &BigInt) -> Result<u8> {
    Ok(descent_report(d)?.lambda_parity)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckEntry {
    #[serde(with = "crate::record::bigint_string")]
    pub d: BigInt,
    pub formula: u8,
    pub oracle: u8,
    pub phi_selmer_rank: u32,
    pub phihat_selmer_rank: u32,
    pub agree: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub entries: Vec<CrossCheckEntry>,
}

impl CrossCheckReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &CrossCheckEntry> {
        self.entries.iter().filter(|e| !e.agree)
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements().next().is_none()
    }
}

pub fn is_fourth_power_free(d: &BigInt) -> Result<bool> {
    if d.is_zero() {
        return Ok(false);
    }
    Ok(&power_free_representative(&Rational::from_integer(d.clone()), 4)? == d)
}

/// Formula against oracle for one fourth-power-free `d`.
pub fn cross_check_one(d: &BigInt) -> Result<CrossCheckEntry> {
    let formula = classify_quartic(&Rational::from_integer(d.clone()))?.total;
    let report = descent_report(d)?;
    Ok(CrossCheckEntry {
        d: d.clone(),
        formula,
        oracle: report.lambda_parity,
        phi_selmer_rank: report.phi_selmer_rank,
        phihat_selmer_rank: report.phihat_selmer_rank,
        agree: formula == report.lambda_parity,
    })
}

/// Cross-checks every fourth-power-free `d` in `lo..=hi`.
pub fn cross_check(lo: i64, hi: i64) -> Result<CrossCheckReport> {
    let mut entries = Vec::new();
    for d in lo..=hi {
        let d = BigInt::from(d);
        if is_fourth_power_free(&d)? {
            entries.push(cross_check_one(&d)?);
        }
    }
    Ok(CrossCheckReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn d1s(curve: &CurveModel) -> Vec<i64> {
        let mut v: Vec<i64> = torsor_classes(curve)
            .unwrap()
            .iter()
            .map(|t| t.d1.to_i64().unwrap())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn torsor_class_examples() {
        let e = |d| CurveModel::new(b(d), CurveSide::E).unwrap();
        assert_eq!(d1s(&e(1)), vec![-1, 1]);
        assert_eq!(d1s(&e(5)), vec![-5, -1, 1, 5]);
        assert_eq!(d1s(&e(6)), vec![-6, -3, -2, -1, 1, 2, 3, 6]);
        let ep = CurveModel::new(b(1), CurveSide::EPrime).unwrap();
        assert_eq!(d1s(&ep), vec![-2, -1, 1, 2]);
        for t in torsor_classes(&e(18)).unwrap() {
            assert_eq!(&t.d1 * &t.d2, b(18));
        }
    }

    #[test]
    fn solubility_examples() {
        for place in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5)] {
            for d2 in [-7, -1, 2, 15] {
                assert!(locally_soluble(&b(1), &b(d2), place).unwrap());
            }
        }
        assert!(!locally_soluble(&b(-1), &b(-1), Place::Real).unwrap());
        assert!(locally_soluble(&b(-1), &b(-1), Place::Finite(5)).unwrap());
        // w^2 = 3u^4 + 3v^4 has no 3-adic point: 3 | w forces 3 | u^4 + v^4, impossible for units.
        assert!(!locally_soluble(&b(3), &b(3), Place::Finite(3)).unwrap());
        assert!(locally_soluble(&b(0), &b(1), Place::Real).is_err());
        assert!(locally_soluble(&b(1), &b(1), Place::Finite(9)).is_err());
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // g = 3x^4 + 5, expanded at x0 = 2 with scale 7.
        let g = [b(5), b(0), b(0), b(0), b(3)];
        let c = taylor_shift(&g, &b(2), &b(7));
        for t in -3..4i64 {
            let x = 2 + 7 * t;
            let direct = 3 * x.pow(4) + 5;
            let via: i64 = c.iter().enumerate().map(|(k, ck)| ck.to_i64().unwrap() * t.pow(k as u32)).sum();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn base_curves_are_even() {
        for d in [1, 4, -1, -4] {
            let r = descent_report(&b(d)).unwrap();
            assert_eq!(r.lambda_parity, 0, "d = {d}: {r:?}");
        }
        let one = descent_report(&b(1)).unwrap();
        assert_eq!((one.phi_selmer_rank, one.phihat_selmer_rank), (2, 0));
    }

    #[test]
    fn lambda_parity_examples() {
        assert_eq!(lambda_parity(&b(1)).unwrap(), 0);
        assert_eq!(lambda_parity(&b(5)).unwrap(), 1);
        assert_eq!(lambda_parity(&b(9)).unwrap(), 1);
        assert_eq!(lambda_parity(&b(16 * 81)).unwrap(), 0);
    }

    #[test]
    fn surviving_torsors_form_a_group() {
        let square_class = |x: &BigInt| power_free_representative(&Rational::from_integer(x.clone()), 2).unwrap();
        for d in (-60..=60).filter(|&d| d != 0) {
            for side in [CurveSide::E, CurveSide::EPrime] {
                let g = selmer_group(&CurveModel::new(b(d), side).unwrap()).unwrap();
                let classes: Vec<BigInt> = g.surviving.iter().map(|t| square_class(&t.d1)).collect();
                assert!(classes.contains(&b(1)));
                for x in &classes {
                    for y in &classes {
                        assert!(classes.contains(&square_class(&(x * y))), "d = {d} {side:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cross_check_small_ranges() {
        let r = cross_check(1, 1).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert!(r.all_agree());
        assert!(cross_check(5, 4).unwrap().entries.is_empty());
        // 16 and 0 are skipped.
        assert_eq!(cross_check(0, 16).unwrap().entries.len(), 15);
    }
}
