//! Exact integer arithmetic for rank-2 lattices in the plane.
//!
//! Coordinates are `i64`; every product is widened to `i128`, which keeps all
//! operations exact for coordinates up to `2^62` in absolute value. Norm
//! comparisons always go through the integer squared norm — floating-point
//! norms are presentation only.

use crate::error::{Error, Result};
use num_integer::Integer;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact two-dimensional integer vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IntVec2 {
    pub x: i64,
    pub y: i64,
}

impl IntVec2 {
    pub const ZERO: IntVec2 = IntVec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        IntVec2 { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(self) -> i128 {
        let (x, y) = (self.x as i128, self.y as i128);
        x * x + y * y
    }

    /// Euclidean norm as a double; only for presentation and tour lengths.
    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn dot(self, other: IntVec2) -> i128 {
        self.x as i128 * other.x as i128 + self.y as i128 * other.y as i128
    }

    /// Signed area spanned with `other`; zero exactly for parallel vectors.
    pub fn cross(self, other: IntVec2) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }

    /// Flip the sign so that `x > 0`, or `x == 0 && y >= 0`.
    pub fn sign_normalized(self) -> IntVec2 {
        if self.x < 0 || (self.x == 0 && self.y < 0) {
            -self
        } else {
            self
        }
    }

    /// Deterministic comparison key used to break ties between vectors of
    /// equal length: `(norm_sq, x, y)` after sign normalization.
    pub fn canonical_key(self) -> (i128, i64, i64) {
        let v = self.sign_normalized();
        (v.norm_sq(), v.x, v.y)
    }
}

impl fmt::Display for IntVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for IntVec2 {
    type Output = IntVec2;
    fn add(self, rhs: IntVec2) -> IntVec2 {
        IntVec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for IntVec2 {
    type Output = IntVec2;
    fn sub(self, rhs: IntVec2) -> IntVec2 {
        IntVec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for IntVec2 {
    type Output = IntVec2;
    fn neg(self) -> IntVec2 {
        IntVec2::new(-self.x, -self.y)
    }
}

impl Mul<i64> for IntVec2 {
    type Output = IntVec2;
    fn mul(self, k: i64) -> IntVec2 {
        IntVec2::new(self.x * k, self.y * k)
    }
}

/// Three generators of a planar lattice, usually `(a,b)`, `(N,0)`, `(0,N)`.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorSet {
    pub g1: IntVec2,
    pub g2: IntVec2,
    pub g3: IntVec2,
}

impl GeneratorSet {
    /// The generator set of the ambient lattice of `L_{N,a,b}`.
    pub fn modular(n: i64, a: i64, b: i64) -> GeneratorSet {
        GeneratorSet {
            g1: IntVec2::new(a, b),
            g2: IntVec2::new(n, 0),
            g3: IntVec2::new(0, n),
        }
    }

    pub fn generators(&self) -> [IntVec2; 3] {
        [self.g1, self.g2, self.g3]
    }
}

/// Reduce three generators to a two-vector basis of the same lattice.
///
/// Euclidean row reduction on the x-coordinates. Every row that becomes
/// vertical is folded into a single `(0, V)` row, and the y-coordinates of the
/// remaining rows are reduced mod `V` as soon as it is known; for modular
/// generator sets this keeps all intermediates below `N^2`.
///
/// The output is in triangular form `(A, Y)`, `(0, V)` with `A > 0`, `V > 0`
/// and `0 <= Y < V`, so `A * V` is the index of the lattice in `Z^2`.
pub fn basis_from_generators(gens: &GeneratorSet) -> Result<(IntVec2, IntVec2)> {
    let mut rows: Vec<(i128, i128)> = gens
        .generators()
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| (g.x as i128, g.y as i128))
        .collect();
    let mut vertical: i128 = 0;

    loop {
        rows.retain(|&(x, y)| {
            if x == 0 {
                vertical = vertical.gcd(&y.abs());
                false
            } else {
                true
            }
        });
        if vertical > 0 {
            for r in rows.iter_mut() {
                r.1 = r.1.rem_euclid(vertical);
            }
        }
        if rows.len() <= 1 {
            break;
        }
        // Reduce every row by the one with the smallest nonzero |x|.
        rows.sort_by_key(|r| r.0.abs());
        if rows[0].0 < 0 {
            rows[0] = (-rows[0].0, -rows[0].1);
        }
        let (px, py) = rows[0];
        for r in rows.iter_mut().skip(1) {
            let q = r.0.div_euclid(px);
            r.0 -= q * px;
            r.1 -= q * py;
        }
    }

    let (x, mut y) = match rows.first() {
        Some(&(x, y)) => (x.abs(), if x < 0 { -y } else { y }),
        None => return Err(Error::DegenerateGenerators),
    };
    if vertical == 0 {
        return Err(Error::DegenerateGenerators);
    }
    y = y.rem_euclid(vertical);
    if x > i64::MAX as i128 || vertical > i64::MAX as i128 {
        return Err(Error::CoordinateOverflow);
    }
    Ok((
        IntVec2::new(x as i64, y as i64),
        IntVec2::new(0, vertical as i64),
    ))
}

/// Solve `m * b1 + n * b2 == v` over the integers.
pub fn decompose(b1: IntVec2, b2: IntVec2, v: IntVec2) -> Option<(i128, i128)> {
    let det = b1.cross(b2);
    if det == 0 {
        return None;
    }
    let m_num = v.cross(b2);
    let n_num = b1.cross(v);
    if m_num % det != 0 || n_num % det != 0 {
        return None;
    }
    Some((m_num / det, n_num / det))
}

/// Whether `v` is an integer combination of `b1`, `b2`.
pub fn contains(b1: IntVec2, b2: IntVec2, v: IntVec2) -> bool {
    decompose(b1, b2, v).is_some()
}

/// A Gauss-reduced (Minkowski-reduced) basis of a planar lattice.
///
/// `x1` is a shortest nonzero lattice vector, `x2` a shortest vector not
/// parallel to `x1`, and `2 * |<x1, x2>| <= |x1|^2` holds exactly.
#[derive(Clone, Copy, Debug)]
pub struct ReducedBasis {
    x1: IntVec2,
    x2: IntVec2,
}

impl ReducedBasis {
    pub fn x1(&self) -> IntVec2 {
        self.x1
    }

    pub fn x2(&self) -> IntVec2 {
        self.x2
    }

    pub fn det(&self) -> i128 {
        self.x1.cross(self.x2)
    }

    /// Exact squared length of the shortest nonzero lattice vector.
    pub fn lambda_sq(&self) -> i128 {
        self.x1.norm_sq()
    }

    /// The canonical shortest vector: lexicographically smallest
    /// `(norm_sq, x, y)` key over all shortest vectors, sign-normalized.
    ///
    /// In a reduced basis every shortest vector is one of
    /// `+-x1, +-x2, +-(x1 + x2), +-(x1 - x2)`.
    pub fn shortest_vector(&self) -> IntVec2 {
        let min_norm = self.x1.norm_sq();
        [self.x1, self.x2, self.x1 + self.x2, self.x1 - self.x2]
            .into_iter()
            .filter(|v| v.norm_sq() == min_norm)
            .map(IntVec2::sign_normalized)
            .min_by_key(|v| (v.x, v.y))
            .expect("x1 always qualifies")
    }
}

/// Gauss-Lagrange reduction of a rank-2 basis.
///
/// Each step replaces the longer vector by its shortest residue modulo the
/// shorter one, so the squared norm strictly decreases until the basis is
/// reduced; the number of steps is logarithmic in the input size.
pub fn gauss_reduce(b1: IntVec2, b2: IntVec2) -> Result<ReducedBasis> {
    if b1.cross(b2) == 0 {
        return Err(Error::ZeroDeterminant);
    }
    let (mut u, mut v) = (b1, b2);
    if u.norm_sq() > v.norm_sq() {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let q = div_round_nearest(u.dot(v), u.norm_sq());
        let w = sub_scaled(v, u, q);
        if w.norm_sq() >= u.norm_sq() {
            v = w;
            break;
        }
        v = u;
        u = w;
    }
    let (mut x1, mut x2) = (u.sign_normalized(), v.sign_normalized());
    if x1.norm_sq() == x2.norm_sq() && (x2.x, x2.y) < (x1.x, x1.y) {
        std::mem::swap(&mut x1, &mut x2);
    }
    Ok(ReducedBasis { x1, x2 })
}

/// `v - q * u` with the product taken in `i128`. The result of a reduction
/// step is never longer than `v`, so it fits back into `i64` coordinates.
fn sub_scaled(v: IntVec2, u: IntVec2, q: i128) -> IntVec2 {
    let x = v.x as i128 - q * u.x as i128;
    let y = v.y as i128 - q * u.y as i128;
    debug_assert!(x.abs() <= i64::MAX as i128 && y.abs() <= i64::MAX as i128);
    IntVec2::new(x as i64, y as i64)
}

/// Nearest integer to `a / b` for `b > 0` (ties round up).
fn div_round_nearest(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    (2 * a + b).div_euclid(2 * b)
}

/// Brute-force shortest vector of the ambient lattice of `L_{N,a,b}`.
///
/// Walks `n = 1..N`, maps each point `(n*a mod N, n*b mod N)` to its centered
/// representative in `[-N/2, N/2]^2` (a lattice vector of minimal length in
/// its residue class), and keeps the canonical minimum; `(N,0)` and `(0,N)`
/// are included for degenerate corner cases. `O(N)` time, independent of the
/// reduction path.
pub fn shortest_vector_oracle(n: i64, a: i64, b: i64) -> Result<IntVec2> {
    if n < 1 || a < 0 || b < 0 || a >= n || b >= n {
        return Err(Error::InvalidParameter(format!(
            "shortest_vector_oracle needs 0 <= a, b < N, got N={n}, a={a}, b={b}"
        )));
    }
    let g = gcd3(n, a, b);
    if g != 1 {
        return Err(Error::DegenerateLattice { n, a, b });
    }

    let mut best = IntVec2::new(n, 0);
    let mut best_key = best.canonical_key();
    let mut consider = |v: IntVec2| {
        let key = v.canonical_key();
        if key < best_key {
            best_key = key;
            best = v.sign_normalized();
        }
    };
    consider(IntVec2::new(0, n));

    let (mut px, mut py) = (0i64, 0i64);
    for _ in 1..n {
        px += a;
        if px >= n {
            px -= n;
        }
        py += b;
        if py >= n {
            py -= n;
        }
        let cx = if 2 * px > n { px - n } else { px };
        let cy = if 2 * py > n { py - n } else { py };
        consider(IntVec2::new(cx, cy));
        // A coordinate of exactly N/2 has two centered representatives of
        // equal magnitude; consider both so ties break identically to the
        // reduction path.
        if 2 * cx == n {
            consider(IntVec2::new(cx - n, cy));
        }
        if 2 * cy == n {
            consider(IntVec2::new(cx, cy - n));
            if 2 * cx == n {
                consider(IntVec2::new(cx - n, cy - n));
            }
        }
    }
    Ok(best)
}

pub(crate) fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}
