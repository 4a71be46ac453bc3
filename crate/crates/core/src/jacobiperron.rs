//! Jacobi-Perron expansion of a pair of reals with certified digit extraction.
//!
//! The classical map sends a state `(x, y)` in `(0,1)^2` to
//! `({y/x}, {1/x})` with digit pair `(b, a) = (floor(y/x), floor(1/x))`;
//! convergent triples `(q_i, p_i, r_i)` follow the third-order recurrence
//! `c_i = a_i * c_{i-1} + b_i * c_{i-2} + c_{i-3}`. States are enclosed in
//! fixed-point intervals; every floor is certified by evaluating it at both
//! interval ends, and on any straddle the whole expansion restarts from the
//! value sources at doubled precision, so the emitted digits never depend on
//! the working precision.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{CheckedSub, One, Signed, ToPrimitive, Zero};
use std::io::{self, Write};

/// Working precision at which every expansion starts.
pub const PRECISION_START: u32 = 192;
/// Hard ceiling for precision escalation.
pub const PRECISION_CAP: u32 = 4096;

/// How a [`PreciseReal`] is (re)derived when more precision is requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealSource {
    /// Fractional part of `k^(power/3)` for a non-cube `k`.
    CubeRootFrac { k: u64, power: u8 },
    /// `num / den` in `(0, 1)`.
    Rational { num: u64, den: u64 },
    /// Decimal literal such as `"0.4979"`.
    Literal(String),
}

/// Arbitrary-precision fixed-point real in `[0, 1)`.
///
/// The mantissa `m` at precision `P` encloses the value in `[m, m+1] / 2^P`.
/// Precision escalation re-derives the mantissa from the source; it never
/// upsamples a coarser value.
#[derive(Clone, Debug)]
pub struct PreciseReal {
    mantissa: BigUint,
    precision_bits: u32,
    source: RealSource,
}

impl PreciseReal {
    /// Fractional part of `k^(power/3)` via the integer cube root of
    /// `k^power * 2^(3P)`.
    pub fn cube_root_frac(k: u64, power: u8, precision_bits: u32) -> Result<PreciseReal> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "cube root base must be >= 2, got {k}"
            )));
        }
        if power != 1 && power != 2 {
            return Err(Error::InvalidParameter(format!(
                "cube root power must be 1 or 2, got {power}"
            )));
        }
        if precision_bits < 64 {
            return Err(Error::InvalidParameter(format!(
                "precision must be >= 64 bits, got {precision_bits}"
            )));
        }
        let root = k.cbrt();
        if root * root * root == k {
            return Err(Error::PerfectCube(k));
        }
        let source = RealSource::CubeRootFrac { k, power };
        Ok(PreciseReal {
            mantissa: cube_root_mantissa(k, power, precision_bits),
            precision_bits,
            source,
        })
    }

    /// Exact rational `num / den` with `0 < num < den`.
    pub fn from_rational(num: u64, den: u64, precision_bits: u32) -> Result<PreciseReal> {
        if num == 0 || num >= den {
            return Err(Error::InvalidParameter(format!(
                "rational must lie in (0, 1), got {num}/{den}"
            )));
        }
        if precision_bits < 64 {
            return Err(Error::InvalidParameter(format!(
                "precision must be >= 64 bits, got {precision_bits}"
            )));
        }
        Ok(PreciseReal {
            mantissa: (BigUint::from(num) << precision_bits) / BigUint::from(den),
            precision_bits,
            source: RealSource::Rational { num, den },
        })
    }

    /// Decimal literal of the form `0.d...d`.
    pub fn from_decimal_str(s: &str, precision_bits: u32) -> Result<PreciseReal> {
        let digits = s
            .strip_prefix("0.")
            .filter(|d| !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("literal must look like 0.1234, got {s:?}"))
            })?;
        if precision_bits < 64 {
            return Err(Error::InvalidParameter(format!(
                "precision must be >= 64 bits, got {precision_bits}"
            )));
        }
        let num: BigUint = digits.parse().expect("digits verified ascii");
        let den = BigUint::from(10u32).pow(digits.len() as u32);
        Ok(PreciseReal {
            mantissa: (num << precision_bits) / den,
            precision_bits,
            source: RealSource::Literal(s.to_string()),
        })
    }

    /// Re-derive the value from its source at a new precision.
    pub fn at_precision(&self, precision_bits: u32) -> Result<PreciseReal> {
        match &self.source {
            RealSource::CubeRootFrac { k, power } => {
                PreciseReal::cube_root_frac(*k, *power, precision_bits)
            }
            RealSource::Rational { num, den } => {
                PreciseReal::from_rational(*num, *den, precision_bits)
            }
            RealSource::Literal(s) => PreciseReal::from_decimal_str(s, precision_bits),
        }
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn source(&self) -> &RealSource {
        &self.source
    }

    pub fn to_f64(&self) -> f64 {
        frac_to_f64(&self.mantissa, self.precision_bits)
    }
}

/// `floor(frac(k^(power/3)) * 2^P)`, exactly.
fn cube_root_mantissa(k: u64, power: u8, precision_bits: u32) -> BigUint {
    let m = BigUint::from(k).pow(power as u32) << (3 * precision_bits as usize);
    let c = m.cbrt();
    debug_assert!(c.pow(3) <= m && (&c + 1u32).pow(3) > m);
    c % (BigUint::one() << precision_bits)
}

/// `m / 2^p` as a double.
pub(crate) fn frac_to_f64(m: &BigUint, p: u32) -> f64 {
    if p <= 63 {
        m.to_f64().unwrap_or(0.0) / (1u64 << p) as f64
    } else {
        (m >> (p - 63)).to_f64().unwrap_or(0.0) / (1u64 << 63) as f64
    }
}

/// `num / den` as a double, robust against operands far beyond the f64 range.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = num.bits().max(den.bits()).saturating_sub(512);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// One convergent triple `(q_i, p_i, r_i)`: `p_i/q_i` approximates the first
/// coordinate, `r_i/q_i` the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub q: BigUint,
    pub p: BigUint,
    pub r: BigUint,
}

impl Convergent {
    /// `q` as `i64`, when the triple is small enough for exact lattice work.
    pub fn q_i64(&self) -> Option<i64> {
        self.q.to_i64()
    }

    pub fn triple_i64(&self) -> Option<(i64, i64, i64)> {
        Some((self.q.to_i64()?, self.p.to_i64()?, self.r.to_i64()?))
    }
}

enum Uncertified {
    /// The divisor interval reaches zero; either precision is too low or the
    /// true state hit zero (rationally dependent inputs).
    DivisorTouchesZero,
    /// A floor differs between the interval ends.
    FloorStraddles,
}

/// Run the expansion, escalating precision `192 -> 384 -> ... -> 4096` until
/// every digit of every iteration is certified.
pub fn jacobi_perron(
    alpha: &PreciseReal,
    beta: &PreciseReal,
    iterations: usize,
) -> Result<Vec<Convergent>> {
    let mut precision = PRECISION_START
        .max(alpha.precision_bits)
        .max(beta.precision_bits);
    let cap = PRECISION_CAP.max(precision);
    loop {
        match expand_at(alpha, beta, iterations, precision)? {
            Ok(convergents) => return Ok(convergents),
            Err(failure) => {
                if precision >= cap {
                    return Err(match failure {
                        Uncertified::DivisorTouchesZero => Error::DependentInputs,
                        Uncertified::FloorStraddles => Error::PrecisionCap { bits: cap },
                    });
                }
                precision = (precision * 2).min(cap);
            }
        }
    }
}

fn expand_at(
    alpha: &PreciseReal,
    beta: &PreciseReal,
    iterations: usize,
    precision: u32,
) -> Result<std::result::Result<Vec<Convergent>, Uncertified>> {
    let scale: BigUint = BigUint::one() << precision;
    let a0 = alpha.at_precision(precision)?;
    let b0 = beta.at_precision(precision)?;

    let mut xlo = a0.mantissa.clone();
    let mut xhi = &a0.mantissa + 1u32;
    let mut ylo = b0.mantissa.clone();
    let mut yhi = &b0.mantissa + 1u32;

    // Histories (c_{i-1}, c_{i-2}, c_{i-3}) seeded with the identity columns.
    let mut qh = [BigUint::one(), BigUint::zero(), BigUint::zero()];
    let mut ph = [BigUint::zero(), BigUint::zero(), BigUint::one()];
    let mut rh = [BigUint::zero(), BigUint::one(), BigUint::zero()];

    let mut out = Vec::with_capacity(iterations);
    for index in 1..=iterations {
        if xlo.is_zero() {
            return Ok(Err(Uncertified::DivisorTouchesZero));
        }
        let b_digit = {
            let blo = &ylo / &xhi;
            let bhi = &yhi / &xlo;
            if blo != bhi {
                return Ok(Err(Uncertified::FloorStraddles));
            }
            blo
        };
        let a_digit = {
            let alo = &scale / &xhi;
            let ahi = &scale / &xlo;
            if alo != ahi {
                return Ok(Err(Uncertified::FloorStraddles));
            }
            alo
        };
        debug_assert!(!a_digit.is_zero(), "1/x >= 1 for x in (0,1)");

        // x' = y/x - b,  y' = 1/x - a, both enclosed with outward rounding
        // and clamped to the mathematically guaranteed range [0, 1].
        let b_scaled = &b_digit * &scale;
        let new_xlo = (&ylo * &scale / &xhi)
            .checked_sub(&b_scaled)
            .unwrap_or_default();
        let new_xhi = ceil_div(&(&yhi * &scale), &xlo)
            .checked_sub(&b_scaled)
            .unwrap_or_default()
            .min(scale.clone());
        let a_scaled = &a_digit * &scale;
        let sq = &scale * &scale;
        let new_ylo = (&sq / &xhi).checked_sub(&a_scaled).unwrap_or_default();
        let new_yhi = ceil_div(&sq, &xlo)
            .checked_sub(&a_scaled)
            .unwrap_or_default()
            .min(scale.clone());

        let q = &a_digit * &qh[0] + &b_digit * &qh[1] + &qh[2];
        let p = &a_digit * &ph[0] + &b_digit * &ph[1] + &ph[2];
        let r = &a_digit * &rh[0] + &b_digit * &rh[1] + &rh[2];
        qh = [q.clone(), qh[0].clone(), qh[1].clone()];
        ph = [p.clone(), ph[0].clone(), ph[1].clone()];
        rh = [r.clone(), rh[0].clone(), rh[1].clone()];
        out.push(Convergent { index, q, p, r });

        xlo = new_xlo;
        xhi = new_xhi.max(xlo.clone());
        ylo = new_ylo;
        yhi = new_yhi.max(ylo.clone());
    }
    Ok(Ok(out))
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - 1u32) / b
}

/// Exact determinant check of the convergent matrices: every step matrix of
/// the expansion is unimodular, so `det [c_i, c_{i-2}, c_{i-1}] == 1` for all
/// `i` (with the identity columns filling in below index 1).
pub fn verify_unimodular(convergents: &[Convergent]) -> bool {
    let col = |i: isize| -> (BigInt, BigInt, BigInt) {
        match i {
            -2 => (BigInt::zero(), BigInt::one(), BigInt::zero()),
            -1 => (BigInt::zero(), BigInt::zero(), BigInt::one()),
            0 => (BigInt::one(), BigInt::zero(), BigInt::zero()),
            i => {
                let c = &convergents[(i - 1) as usize];
                debug_assert_eq!(c.index as isize, i);
                (
                    BigInt::from(c.q.clone()),
                    BigInt::from(c.p.clone()),
                    BigInt::from(c.r.clone()),
                )
            }
        }
    };
    (1..=convergents.len() as isize).all(|i| {
        let (q0, p0, r0) = col(i);
        let (q1, p1, r1) = col(i - 2);
        let (q2, p2, r2) = col(i - 1);
        let det = &q0 * (&p1 * &r2 - &r1 * &p2) - &q1 * (&p0 * &r2 - &r0 * &p2)
            + &q2 * (&p0 * &r1 - &r0 * &p1);
        det == BigInt::one()
    })
}

/// Approximation quality of one convergent.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceReport {
    pub index: usize,
    /// `|alpha - p/q|`
    pub err_alpha: f64,
    /// `|beta - r/q|`
    pub err_beta: f64,
    /// Empirical strong-convergence exponent: the largest `d` with both
    /// errors below `1/q^(1+d)`, i.e. `min(-log err / log q) - 1`.
    pub delta_hat: f64,
    /// Whether `delta_hat > 0` at this index.
    pub strong: bool,
}

/// Per-index error magnitudes and the empirical exponent `delta_hat`.
pub fn convergence_report(
    alpha: &PreciseReal,
    beta: &PreciseReal,
    convergents: &[Convergent],
) -> Vec<ConvergenceReport> {
    convergents
        .iter()
        .map(|c| {
            let err_alpha = approx_error(alpha, &c.p, &c.q);
            let err_beta = approx_error(beta, &c.r, &c.q);
            let qf = ratio_to_f64(&c.q, &BigUint::one());
            let delta_hat = if qf > 1.0 {
                let worst = err_alpha.max(err_beta);
                if worst > 0.0 {
                    -worst.ln() / qf.ln() - 1.0
                } else {
                    f64::INFINITY
                }
            } else {
                f64::NAN
            };
            ConvergenceReport {
                index: c.index,
                err_alpha,
                err_beta,
                delta_hat,
                strong: delta_hat > 0.0,
            }
        })
        .collect()
}

/// `|value - num/den|` with the numerator difference taken exactly.
fn approx_error(value: &PreciseReal, num: &BigUint, den: &BigUint) -> f64 {
    let scaled_value = BigInt::from(value.mantissa.clone()) * BigInt::from(den.clone());
    let scaled_num = BigInt::from(num.clone()) << value.precision_bits;
    let diff = (&scaled_value - &scaled_num).abs().to_biguint().unwrap();
    let denominator = den.clone() << value.precision_bits;
    ratio_to_f64(&diff, &denominator)
}

/// CSV export: `i,q,p,r,err_alpha,err_beta,delta_hat`.
pub fn write_convergents_csv<W: Write>(
    w: &mut W,
    alpha: &PreciseReal,
    beta: &PreciseReal,
    convergents: &[Convergent],
) -> io::Result<()> {
    writeln!(w, "# lattice-tsp convergents v1")?;
    writeln!(w, "i,q,p,r,err_alpha,err_beta,delta_hat")?;
    for (c, rep) in convergents.iter().zip(convergence_report(alpha, beta, convergents)) {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{:.4}",
            c.index, c.q, c.p, c.r, rep.err_alpha, rep.err_beta, rep.delta_hat
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube91() -> (PreciseReal, PreciseReal) {
        (
            PreciseReal::cube_root_frac(91, 1, 192).unwrap(),
            PreciseReal::cube_root_frac(91, 2, 192).unwrap(),
        )
    }

    #[test]
    fn cube_root_fractional_parts() {
        let a = PreciseReal::cube_root_frac(91, 1, 128).unwrap();
        assert!((a.to_f64() - (91f64.powf(1.0 / 3.0) - 4.0)).abs() < 1e-12);
        assert!((a.to_f64() - 0.4979).abs() < 1e-4);
        let b = PreciseReal::cube_root_frac(91, 2, 128).unwrap();
        assert!((b.to_f64() - 0.2314).abs() < 1e-4);
    }

    #[test]
    fn perfect_cube_rejected() {
        assert_eq!(
            PreciseReal::cube_root_frac(8, 1, 64).unwrap_err(),
            Error::PerfectCube(8)
        );
        assert!(PreciseReal::cube_root_frac(27, 2, 64).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PreciseReal::cube_root_frac(91, 3, 128).is_err());
        assert!(PreciseReal::cube_root_frac(91, 1, 32).is_err());
        assert!(PreciseReal::from_rational(3, 3, 128).is_err());
        assert!(PreciseReal::from_decimal_str("1.5", 128).is_err());
        assert!(PreciseReal::from_decimal_str("0.12x", 128).is_err());
        let l = PreciseReal::from_decimal_str("0.25", 128).unwrap();
        assert!((l.to_f64() - 0.25).abs() < 1e-30);
    }

    #[test]
    fn known_convergent_triples() {
        let (a, b) = cube91();
        let conv = jacobi_perron(&a, &b, 5).unwrap();
        let t = |i: usize| conv[i - 1].triple_i64().unwrap();
        assert_eq!(t(3), (241, 120, 56));
        assert_eq!(t(4), (484, 241, 112));
        assert_eq!(t(5), (972, 484, 225));
    }

    #[test]
    fn convergents_are_unimodular_and_monotone() {
        let (a, b) = cube91();
        let conv = jacobi_perron(&a, &b, 16).unwrap();
        assert!(verify_unimodular(&conv));
        for w in conv.windows(2) {
            assert!(w[0].q < w[1].q, "q must increase strictly");
        }
        for c in &conv {
            assert!(c.p < c.q && c.r < c.q);
        }
    }

    #[test]
    fn digits_do_not_depend_on_precision() {
        let (a, b) = cube91();
        let lo = expand_at(&a, &b, 16, 192).unwrap().ok().unwrap();
        let hi = expand_at(&a, &b, 16, 1536).unwrap().ok().unwrap();
        assert_eq!(lo, hi);
    }

    #[test]
    fn weak_convergence_on_the_cube_pair() {
        let (a, b) = cube91();
        let conv = jacobi_perron(&a, &b, 16).unwrap();
        let reports = convergence_report(&a, &b, &conv);
        // max error decreasing along the tail of the sequence
        for w in reports.windows(2).skip(2) {
            let m0 = w[0].err_alpha.max(w[0].err_beta);
            let m1 = w[1].err_alpha.max(w[1].err_beta);
            assert!(m1 < m0, "errors should shrink from index {}", w[0].index);
        }
        for r in &reports {
            assert!(r.err_alpha > 0.0 && r.err_beta > 0.0);
        }
        // weak-convergence spot check at i = 4
        let r4 = &reports[3];
        assert!(r4.err_alpha < 1.0 / 484.0 && r4.err_beta < 1.0 / 484.0);
        // empirical exponent approaches 1/2 late in the sequence
        let tail = &reports[13..16];
        for r in tail {
            assert!(
                (r.delta_hat - 0.5).abs() < 0.15,
                "delta_hat at i={} was {}",
                r.index,
                r.delta_hat
            );
        }
    }

    #[test]
    fn rational_pair_degenerates() {
        let a = PreciseReal::from_rational(1, 3, 192).unwrap();
        let b = PreciseReal::from_rational(1, 7, 192).unwrap();
        let err = jacobi_perron(&a, &b, 10).unwrap_err();
        assert!(
            matches!(err, Error::DependentInputs | Error::PrecisionCap { .. }),
            "unexpected error {err:?}"
        );
    }

    #[test]
    fn csv_export_shape() {
        let (a, b) = cube91();
        let conv = jacobi_perron(&a, &b, 4).unwrap();
        let mut buf = Vec::new();
        write_convergents_csv(&mut buf, &a, &b, &conv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 4);
        assert!(text.lines().nth(1).unwrap() == "i,q,p,r,err_alpha,err_beta,delta_hat");
        assert!(text.contains("\n4,484,241,112,"));
    }
}
