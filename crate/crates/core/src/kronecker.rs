//! Kronecker point sets `K_{alpha,beta}(N)` and the tour-length sandwich that
//! links them to the modular lattice of a Jacobi-Perron convergent.

use crate::error::{Error, Result};
use crate::exactint::shortest_vector_oracle;
use crate::jacobiperron::{frac_to_f64, jacobi_perron, Convergent, PreciseReal};
use crate::modlattice::{lattice_lambda_sq, ModularLattice};
use crate::tsp::SQRT2;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use std::io::{self, Write};

/// The point set `{(n*alpha mod 1, n*beta mod 1) : 0 <= n < N}`.
///
/// Multiples `n*alpha` are accumulated in full fixed-point precision and only
/// the reduced fractional parts are rounded to doubles, so no error builds up
/// along the index range.
#[derive(Clone, Debug)]
pub struct KroneckerSet {
    alpha: PreciseReal,
    beta: PreciseReal,
    points: Vec<[f64; 2]>,
}

impl KroneckerSet {
    pub fn alpha(&self) -> &PreciseReal {
        &self.alpha
    }

    pub fn beta(&self) -> &PreciseReal {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }
}

pub fn kronecker_points(alpha: &PreciseReal, beta: &PreciseReal, n: usize) -> KroneckerSet {
    let pa = alpha.precision_bits();
    let pb = beta.precision_bits();
    let scale_a: BigUint = BigUint::one() << pa;
    let scale_b: BigUint = BigUint::one() << pb;
    let mut acc_a = BigUint::zero();
    let mut acc_b = BigUint::zero();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push([frac_to_f64(&acc_a, pa), frac_to_f64(&acc_b, pb)]);
        acc_a += alpha.mantissa();
        if acc_a >= scale_a {
            acc_a -= &scale_a;
        }
        acc_b += beta.mantissa();
        if acc_b >= scale_b {
            acc_b -= &scale_b;
        }
    }
    KroneckerSet {
        alpha: alpha.clone(),
        beta: beta.clone(),
        points,
    }
}

/// Sandwich for the optimal tour length of `K_{alpha,beta}(q)` in units of
/// `sqrt(q)`, driven by the shortest distance of the convergent's lattice:
///
/// `(lambda/sqrt(N)) * (1 - 5/N^delta) <= L/sqrt(N)
///    <= (lambda/sqrt(N)) * (1 + 3/N^delta) + 2*sqrt(2)/sqrt(N)`.
#[derive(Clone, Copy, Debug)]
pub struct KroneckerBounds {
    pub lower: f64,
    pub upper: f64,
    /// Shortest distance of `L_{q,p,r}` in raw coordinates.
    pub lambda: f64,
    pub lambda_sq: i128,
    pub delta: f64,
    pub n: i64,
    /// `lambda / sqrt(N)`.
    pub f: f64,
    /// `N^delta <= 5`: the lower bound is non-positive and carries no
    /// information.
    pub vacuous: bool,
}

pub fn kronecker_tour_bounds(conv: &Convergent, delta: f64) -> Result<KroneckerBounds> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1/2], got {delta}"
        )));
    }
    let (q, p, r) = conv.triple_i64().ok_or_else(|| {
        Error::InvalidParameter("convergent exceeds the exact coordinate range".into())
    })?;
    let lambda_sq = lattice_lambda_sq(q, p, r)?;
    let nf = q as f64;
    let f = (lambda_sq as f64 / nf).sqrt();
    let n_delta = nf.powf(delta);
    Ok(KroneckerBounds {
        lower: f * (1.0 - 5.0 / n_delta),
        upper: f * (1.0 + 3.0 / n_delta) + 2.0 * SQRT2 / nf.sqrt(),
        lambda: (lambda_sq as f64).sqrt(),
        lambda_sq,
        delta,
        n: q,
        f,
        vacuous: n_delta <= 5.0,
    })
}

/// Result of sampling the displacement identity.
#[derive(Clone, Copy, Debug)]
pub struct DriftReport {
    pub samples: usize,
    pub max_deviation: f64,
}

/// Verify, on sampled index pairs, that the displacement between Kronecker
/// points equals the lattice displacement scaled by `1/q` plus the index
/// difference times the per-step drift `d = (alpha - p/q, beta - r/q)`,
/// modulo 1. The identity is exact in exact arithmetic; the reported
/// deviation measures double-precision rounding only.
pub fn drift_identity_check<R: Rng>(
    kset: &KroneckerSet,
    lattice: &ModularLattice,
    samples: usize,
    rng: &mut R,
) -> Result<DriftReport> {
    let n = kset.len();
    if n != lattice.n() as usize || n == 0 {
        return Err(Error::LatticeMismatch);
    }
    let nf = lattice.n() as f64;
    let d = [
        kset.alpha.to_f64() - lattice.a() as f64 / nf,
        kset.beta.to_f64() - lattice.b() as f64 / nf,
    ];
    let lat = lattice.points();
    let kr = kset.points();
    let mut max_deviation = 0.0f64;
    for _ in 0..samples {
        let n0 = rng.gen_range(0..n);
        let n1 = rng.gen_range(0..n);
        let steps = n1 as f64 - n0 as f64;
        let lattice_delta = [
            (lat[n1].x - lat[n0].x) as f64 / nf,
            (lat[n1].y - lat[n0].y) as f64 / nf,
        ];
        for c in 0..2 {
            let lhs = kr[n1][c] - kr[n0][c];
            let rhs = lattice_delta[c] + steps * d[c];
            let dev = (lhs - rhs) - (lhs - rhs).round();
            max_deviation = max_deviation.max(dev.abs());
        }
    }
    Ok(DriftReport {
        samples,
        max_deviation,
    })
}

/// One row of the constants sequence `f(q_i, p_i, r_i)`.
#[derive(Clone, Debug)]
pub struct ConstantsRow {
    pub index: usize,
    pub q: i64,
    pub p: i64,
    pub r: i64,
    pub lambda_sq: i128,
    pub f: f64,
    /// `None` when the `O(N)` oracle was skipped (`q > 10^7`), otherwise
    /// whether it agreed exactly with the reduction value.
    pub oracle_consistent: Option<bool>,
}

/// Cap above which the brute-force oracle cross-check is skipped.
pub const ORACLE_CROSS_CHECK_LIMIT: i64 = 10_000_000;

/// The oscillating sequence of normalized constants along the convergents of
/// `(alpha, beta)`. No convergence is asserted.
pub fn sequence_of_constants(
    alpha: &PreciseReal,
    beta: &PreciseReal,
    i_max: usize,
) -> Result<Vec<ConstantsRow>> {
    let convergents = jacobi_perron(alpha, beta, i_max)?;
    constants_for(&convergents)
}

/// Same as [`sequence_of_constants`] for already-computed convergents.
pub fn constants_for(convergents: &[Convergent]) -> Result<Vec<ConstantsRow>> {
    convergents
        .iter()
        .map(|c| {
            let (q, p, r) = c.triple_i64().ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "convergent q_{} exceeds the exact coordinate range",
                    c.index
                ))
            })?;
            let lambda_sq = lattice_lambda_sq(q, p, r)?;
            let oracle_consistent = if q <= ORACLE_CROSS_CHECK_LIMIT {
                Some(shortest_vector_oracle(q, p, r)?.norm_sq() == lambda_sq)
            } else {
                None
            };
            Ok(ConstantsRow {
                index: c.index,
                q,
                p,
                r,
                lambda_sq,
                f: (lambda_sq as f64 / q as f64).sqrt(),
                oracle_consistent,
            })
        })
        .collect()
}

/// CSV export: `i,q,lambda_sq,f,lower,upper,delta_used`.
pub fn write_constants_csv<W: Write>(
    w: &mut W,
    rows: &[ConstantsRow],
    delta: f64,
) -> io::Result<()> {
    writeln!(w, "# lattice-tsp kronecker constants v1")?;
    writeln!(w, "i,q,lambda_sq,f,lower,upper,delta_used")?;
    for row in rows {
        let nf = row.q as f64;
        let n_delta = nf.powf(delta);
        let lower = row.f * (1.0 - 5.0 / n_delta);
        let upper = row.f * (1.0 + 3.0 / n_delta) + 2.0 * SQRT2 / nf.sqrt();
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6},{delta}",
            row.index, row.q, row.lambda_sq, row.f, lower, upper
        )?;
    }
    Ok(())
}
