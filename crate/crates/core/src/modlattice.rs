//! Modular lattices `L_{N,a,b}`, their point sets, shortest distances,
//! parallel-line decompositions and the explicit families with long shortest
//! vectors.

use crate::error::{Error, Result};
use crate::exactint::{
    basis_from_generators, gauss_reduce, gcd3, shortest_vector_oracle, GeneratorSet, IntVec2,
    ReducedBasis,
};
use num_integer::Integer;
use std::collections::HashMap;

/// The modular lattice `L_{N,a,b} = {(n*a mod N, n*b mod N) : 0 <= n < N}`.
///
/// Construction enforces `0 < a, b < N` and `gcd(N, a, b) = 1`, which makes
/// the `N` points pairwise distinct and bounds the shortest distance by
/// `sqrt(2) <= lambda <= 1.5 * sqrt(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularLattice {
    n: i64,
    a: i64,
    b: i64,
}

impl ModularLattice {
    pub fn new(n: i64, a: i64, b: i64) -> Result<Self> {
        if n < 2 || a <= 0 || b <= 0 || a >= n || b >= n {
            return Err(Error::InvalidParameter(format!(
                "modular lattice needs 0 < a, b < N and N >= 2, got N={n}, a={a}, b={b}"
            )));
        }
        if gcd3(n, a, b) != 1 {
            return Err(Error::DegenerateLattice { n, a, b });
        }
        Ok(ModularLattice { n, a, b })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// The points in index order `n = 0..N-1`.
    pub fn points(&self) -> Vec<IntVec2> {
        let mut pts = Vec::with_capacity(self.n as usize);
        let (mut px, mut py) = (0i64, 0i64);
        for _ in 0..self.n {
            pts.push(IntVec2::new(px, py));
            px += self.a;
            if px >= self.n {
                px -= self.n;
            }
            py += self.b;
            if py >= self.n {
                py -= self.n;
            }
        }
        pts
    }

    /// `gcd(N,a,b) = 1` guarantees distinctness; this is the runtime check
    /// backing that claim.
    pub fn has_distinct_points(&self) -> bool {
        let mut seen = vec![false; (self.n * self.n) as usize];
        for p in self.points() {
            let idx = (p.x * self.n + p.y) as usize;
            if seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
        true
    }

    pub fn generator_set(&self) -> GeneratorSet {
        GeneratorSet::modular(self.n, self.a, self.b)
    }

    /// Gauss-reduced basis of the ambient lattice.
    pub fn reduced_basis(&self) -> ReducedBasis {
        let (b1, b2) = basis_from_generators(&self.generator_set())
            .expect("modular generator sets always have rank 2");
        gauss_reduce(b1, b2).expect("modular lattices always have nonzero index")
    }

    /// Canonical shortest vector of the ambient lattice.
    pub fn shortest_vector(&self) -> IntVec2 {
        self.reduced_basis().shortest_vector()
    }

    /// Exact squared shortest distance between points.
    pub fn lambda_sq(&self) -> i128 {
        self.reduced_basis().lambda_sq()
    }

    /// Shortest distance as a double.
    pub fn lambda(&self) -> f64 {
        (self.lambda_sq() as f64).sqrt()
    }

    /// Squared shortest distance recomputed by the `O(N)` brute-force oracle.
    pub fn lambda_sq_oracle(&self) -> i128 {
        shortest_vector_oracle(self.n, self.a, self.b)
            .expect("constructor enforced gcd(N,a,b)=1")
            .norm_sq()
    }

    /// The normalized constant `f(N,a,b) = lambda / sqrt(N)`.
    pub fn f_constant(&self) -> f64 {
        (self.lambda_sq() as f64 / self.n as f64).sqrt()
    }

    /// `f^2` as the exact rational `lambda_sq / N`.
    pub fn f_sq_rational(&self) -> (i128, i64) {
        (self.lambda_sq(), self.n)
    }

    /// Whether some point of the set is itself a shortest vector of the
    /// ambient lattice (the set always realizes the shortest *distance*, but
    /// not necessarily a shortest vector based at the origin).
    pub fn contains_shortest_vector(&self) -> bool {
        let lambda_sq = self.lambda_sq();
        self.points()
            .into_iter()
            .skip(1)
            .any(|p| p.norm_sq() == lambda_sq)
    }

    /// Partition the point set into maximal runs along the shortest vector.
    ///
    /// Within a run, consecutive points differ by exactly the direction
    /// vector as drawn in `[0, N-1]^2`; runs break where the step wraps
    /// around the modulus. `k = lines.len()` is the line count entering the
    /// tour bounds (`k <= 2 * lambda`), while `torus_cycles` counts the
    /// orbits of the index shift, i.e. the closed geodesics on the torus.
    pub fn line_decomposition(&self) -> LineDecomposition {
        let pts = self.points();
        let n = self.n;
        let v = self.shortest_vector();

        let index_of: HashMap<(i64, i64), usize> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| ((p.x, p.y), i))
            .collect();
        let vm = (v.x.rem_euclid(n), v.y.rem_euclid(n));
        let m = *index_of
            .get(&vm)
            .expect("a shortest vector reduces to a lattice point") as i64;

        let linked = |i: usize| -> bool {
            let j = ((i as i64 + m) % n) as usize;
            pts[j] - pts[i] == v
        };
        let has_pred = |i: usize| -> bool {
            let j = ((i as i64 + n - m) % n) as usize;
            pts[i] - pts[j] == v
        };

        let mut lines = Vec::new();
        for start in 0..pts.len() {
            if has_pred(start) {
                continue;
            }
            let mut line = vec![start];
            let mut cur = start;
            while linked(cur) {
                cur = ((cur as i64 + m) % n) as usize;
                line.push(cur);
            }
            lines.push(line);
        }
        // Order lines by their offset perpendicular to the direction vector.
        lines.sort_by_key(|line| v.cross(pts[line[0]]));

        LineDecomposition {
            direction: v,
            lines,
            torus_cycles: n.gcd(&m).max(1) as usize,
        }
    }
}

/// Decomposition of a modular lattice into parallel lines along a shortest
/// vector. `lines` holds point indices into [`ModularLattice::points`].
#[derive(Clone, Debug)]
pub struct LineDecomposition {
    pub direction: IntVec2,
    pub lines: Vec<Vec<usize>>,
    pub torus_cycles: usize,
}

impl LineDecomposition {
    /// Number of parallel lines.
    pub fn k(&self) -> usize {
        self.lines.len()
    }

    pub fn point_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }
}

/// The lattice triangle of `L_{N,1,b}`: `A = (0,0)`, `B = (1,b)`,
/// `C = (x+1, b-y)` where `N = b*x + y` with `0 < y < b`.
#[derive(Clone, Copy, Debug)]
pub struct Triangle {
    pub a: IntVec2,
    pub b: IntVec2,
    pub c: IntVec2,
    pub x: i64,
    pub y: i64,
}

impl Triangle {
    pub fn ab(&self) -> IntVec2 {
        self.b - self.a
    }

    pub fn ac(&self) -> IntVec2 {
        self.c - self.a
    }

    pub fn bc(&self) -> IntVec2 {
        self.c - self.b
    }

    /// Whether `AB` is a shortest edge (exact comparison of squared norms).
    pub fn ab_is_shortest(&self) -> bool {
        let ab = self.ab().norm_sq();
        ab <= self.ac().norm_sq() && ab <= self.bc().norm_sq()
    }
}

/// The triangle spanned inside `L_{N,1,b}` by the origin and the two lattice
/// points closing the first line of the decomposition.
pub fn triangle(n: i64, b: i64) -> Result<Triangle> {
    if b <= 1 || b >= n {
        return Err(Error::InvalidParameter(format!(
            "triangle needs 1 < b < N, got N={n}, b={b}"
        )));
    }
    if n.gcd(&b) != 1 {
        return Err(Error::InvalidParameter(format!(
            "triangle needs gcd(N, b) = 1, got gcd({n}, {b}) = {}",
            n.gcd(&b)
        )));
    }
    let x = n / b;
    let y = n % b;
    debug_assert!(y > 0 && y < b);
    Ok(Triangle {
        a: IntVec2::ZERO,
        b: IntVec2::new(1, b),
        c: IntVec2::new(x + 1, b - y),
        x,
        y,
    })
}

/// The family `L_{N,1,floor(sqrt(N))-1}`.
///
/// For every `N >= 9` the vector `(1, b)` is a shortest vector, so the
/// squared shortest distance is exactly `b^2 + 1` and
/// `f(N,1,b) = sqrt(b^2 + 1) / sqrt(N)` approaches 1 from below.
pub fn construct_floor_family(n: i64) -> Result<ModularLattice> {
    if n < 9 {
        return Err(Error::InvalidParameter(format!(
            "floor family needs N >= 9 so that b >= 2, got N={n}"
        )));
    }
    let b = n.isqrt() - 1;
    ModularLattice::new(n, 1, b)
}

/// The lattice `L_{N,1,ceil(sqrt(N))}` together with the edge diagnostics
/// that decide whether its constant exceeds 1.
#[derive(Clone, Copy, Debug)]
pub struct CeilFamily {
    pub lattice: ModularLattice,
    pub b: i64,
    pub x: i64,
    pub y: i64,
    /// `2b < y^2`: the direct edge comparison that makes `(1, b)` a shortest
    /// vector, hence `lambda^2 = b^2 + 1 > N`.
    pub edge_condition: bool,
    /// Guaranteed-supercritical regime: `N > 87` and `frac(sqrt(N)) ∈ (3/4, 1)`.
    /// Implies `edge_condition`, hence `f > 1`.
    pub supercritical: bool,
}

/// The family `L_{N,1,ceil(sqrt(N))}` (errors on perfect squares, where the
/// fractional part of `sqrt(N)` vanishes and `b` would divide into `N`).
pub fn construct_ceil_family(n: i64) -> Result<CeilFamily> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "ceil family needs N >= 3, got N={n}"
        )));
    }
    let s = n.isqrt();
    if s * s == n {
        return Err(Error::FractionalPartZero(n));
    }
    let b = s + 1;
    let x = n / b;
    let y = n % b;
    // frac(sqrt(N)) > 3/4  <=>  16*(N - s^2) > 24*s + 9, exactly in integers.
    let supercritical = n > 87 && 16 * (n as i128 - (s as i128) * (s as i128)) > 24 * s as i128 + 9;
    let edge_condition = 2 * b < y * y;
    Ok(CeilFamily {
        lattice: ModularLattice::new(n, 1, b)?,
        b,
        x,
        y,
        edge_condition,
        supercritical,
    })
}

/// Margin polynomial of the ceil family at offset `z = 1 - frac(sqrt(N))`:
///
/// `(N - (sqrt(N)+z)(sqrt(N)+z-1))^2 - 2(sqrt(N)+z)`
///
/// is `y^2 - 2b` expressed through `z`; it is positive exactly when the edge
/// condition `2b < y^2` holds. Quartic in `z` with
/// `margin(N,0) > 0, margin(N,1/2) < 0, margin(N,1) > 0` for all `N > 7`.
pub fn ceil_margin(n: i64, z: f64) -> f64 {
    let s = (n as f64).sqrt();
    let t = s + z;
    let leftover = n as f64 - t * (t - 1.0);
    leftover * leftover - 2.0 * t
}

/// The root of [`ceil_margin`] in `(0, 1/2)`, located by bisection.
///
/// The bracket `margin(N,0) > 0 > margin(N,1/2)` exists for every `N > 7`;
/// bisection runs to floating-point resolution, well below the documented
/// `1e-12` tolerance. The root tends to `1/2` as `N` grows.
pub fn ceil_margin_root(n: i64) -> Result<f64> {
    if n <= 7 {
        return Err(Error::RootSignPattern(n));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let (glo, ghi) = (ceil_margin(n, lo), ceil_margin(n, hi));
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::RootSignPattern(n));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = ceil_margin(n, mid);
        if g == 0.0 {
            return Ok(mid);
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Squared shortest distance for a convergent triple `(N, a, b)` with
/// `gcd(N,a,b) = 1`, allowing `a = 0` or `b = 0` (early convergents of a
/// continued-fraction expansion produce those).
pub fn lattice_lambda_sq(n: i64, a: i64, b: i64) -> Result<i128> {
    if n < 1 || a < 0 || b < 0 || a >= n || b >= n {
        return Err(Error::InvalidParameter(format!(
            "lattice triple needs 0 <= a, b < N, got N={n}, a={a}, b={b}"
        )));
    }
    if gcd3(n, a, b) != 1 {
        return Err(Error::DegenerateLattice { n, a, b });
    }
    let (b1, b2) = basis_from_generators(&GeneratorSet::modular(n, a, b))?;
    Ok(gauss_reduce(b1, b2)?.lambda_sq())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_in_index_order() {
        let l = ModularLattice::new(5, 1, 2).unwrap();
        let pts = l.points();
        let expected = [(0, 0), (1, 2), (2, 4), (3, 1), (4, 3)];
        assert_eq!(
            pts,
            expected.map(|(x, y)| IntVec2::new(x, y)).to_vec(),
            "points of L_{{5,1,2}}"
        );
    }

    #[test]
    fn point_sets_are_distinct() {
        for (n, a, b) in [(23, 1, 5), (484, 241, 112), (53, 1, 7)] {
            let l = ModularLattice::new(n, a, b).unwrap();
            assert!(l.has_distinct_points());
            assert_eq!(l.points().len(), n as usize);
        }
    }

    #[test]
    fn lambda_of_known_lattices() {
        assert_eq!(ModularLattice::new(23, 1, 3).unwrap().lambda_sq(), 10);
        assert_eq!(ModularLattice::new(479, 1, 20).unwrap().lambda_sq(), 401);
        assert_eq!(ModularLattice::new(209, 1, 56).unwrap().lambda_sq(), 241);
    }

    #[test]
    fn f_constant_examples() {
        let f = ModularLattice::new(209, 1, 56).unwrap().f_constant();
        assert!((f - 1.07383).abs() < 1e-3);
        let f = ModularLattice::new(100, 1, 1).unwrap().f_constant();
        assert!((f - (2.0f64 / 100.0).sqrt()).abs() < 1e-12);
        let f = ModularLattice::new(484, 241, 112).unwrap().f_constant();
        assert!((f - 185f64.sqrt() / 22.0).abs() < 1e-12);
        assert!((f - 0.6182).abs() < 1e-3);
    }

    #[test]
    fn shortest_vector_membership() {
        assert!(ModularLattice::new(23, 1, 3).unwrap().contains_shortest_vector());
        assert!(!ModularLattice::new(23, 1, 5).unwrap().contains_shortest_vector());
    }

    #[test]
    fn triangle_examples() {
        let t = triangle(479, 20).unwrap();
        assert_eq!((t.x, t.y), (23, 19));
        assert_eq!(t.b, IntVec2::new(1, 20));
        assert_eq!(t.c, IntVec2::new(24, 1));
        assert_eq!(t.bc(), IntVec2::new(23, -19));
        assert!(t.ab_is_shortest());

        let t = triangle(53, 7).unwrap();
        assert_eq!((t.x, t.y), (7, 4));
        assert_eq!(t.c, IntVec2::new(8, 3));

        let t = triangle(23, 5).unwrap();
        assert_eq!((t.x, t.y), (4, 3));
        assert_eq!(t.b, IntVec2::new(1, 5));
        assert_eq!(t.c, IntVec2::new(5, 2));
    }

    #[test]
    fn triangle_rejects_bad_input() {
        assert!(triangle(20, 5).is_err()); // gcd != 1
        assert!(triangle(20, 1).is_err()); // b too small
        assert!(triangle(5, 7).is_err()); // b >= N
    }

    #[test]
    fn floor_family_examples() {
        let l = construct_floor_family(479).unwrap();
        assert_eq!(l.b(), 20);
        assert_eq!(l.lambda_sq(), 401);
        let l = construct_floor_family(100).unwrap();
        assert_eq!(l.b(), 9);
        assert_eq!(l.lambda_sq(), 82);
        let l = construct_floor_family(9).unwrap();
        assert_eq!(l.b(), 2);
        assert_eq!(l.lambda_sq(), 5);
        assert!(construct_floor_family(8).is_err());
    }

    #[test]
    fn ceil_family_examples() {
        let c = construct_ceil_family(99).unwrap();
        assert_eq!((c.b, c.x, c.y), (10, 9, 9));
        assert!(c.edge_condition && c.supercritical);
        assert_eq!(c.lattice.lambda_sq(), 101);

        let c = construct_ceil_family(226).unwrap();
        assert!(!c.supercritical);
        assert!(!c.edge_condition); // 2b = 32 > 4 = y^2

        let c = construct_ceil_family(88).unwrap();
        assert!(!c.supercritical);

        assert_eq!(
            construct_ceil_family(100).unwrap_err(),
            Error::FractionalPartZero(100)
        );
    }

    #[test]
    fn margin_sign_pattern() {
        assert!(ceil_margin(479, 0.0) > 0.0);
        assert!(ceil_margin(479, 0.5) < 0.0);
        assert!(ceil_margin(479, 1.0) > 0.0);
    }

    #[test]
    fn margin_root_behaviour() {
        let r479 = ceil_margin_root(479).unwrap();
        assert!(r479 > 0.0 && r479 < 0.5);
        assert!(ceil_margin(479, r479).abs() < 1e-9);
        let r8 = ceil_margin_root(8).unwrap();
        assert!(r8 > 0.0 && r8 < 0.5);
        let r10k = ceil_margin_root(10_000).unwrap();
        let r1m = ceil_margin_root(1_000_000).unwrap();
        assert!(r10k > r479, "root should move toward 1/2");
        assert!(r1m > r10k && r1m < 0.5);
        assert!(ceil_margin_root(7).is_err());
    }

    #[test]
    fn decomposition_of_l_479_1_20() {
        let l = ModularLattice::new(479, 1, 20).unwrap();
        let d = l.line_decomposition();
        assert_eq!(d.k(), 20);
        assert_eq!(d.point_count(), 479);
        let mut with_23 = 0;
        for line in &d.lines {
            assert!(line.len() == 23 || line.len() == 24);
            if line.len() == 23 {
                with_23 += 1;
            }
        }
        assert_eq!(with_23, 1);
    }

    #[test]
    fn decomposition_small_and_figure_lattices() {
        let l = ModularLattice::new(5, 1, 2).unwrap();
        let d = l.line_decomposition();
        assert!(d.k() as f64 <= 2.0 * l.lambda());
        assert_eq!(d.point_count(), 5);

        let l = ModularLattice::new(484, 241, 112).unwrap();
        let d = l.line_decomposition();
        assert_eq!(d.point_count(), 484);
        // every point exactly once
        let mut seen = vec![false; 484];
        for line in &d.lines {
            for &i in line {
                assert!(!seen[i], "point {i} appears twice");
                seen[i] = true;
            }
        }
        assert!(d.k() as f64 <= 2.0 * l.lambda());
        // consecutive points on a line differ by the direction vector
        let pts = l.points();
        for line in &d.lines {
            for w in line.windows(2) {
                assert_eq!(pts[w[1]] - pts[w[0]], d.direction);
            }
        }
    }

    #[test]
    fn relaxed_triple_allows_zero_coordinate() {
        assert_eq!(lattice_lambda_sq(2, 1, 0).unwrap(), 1);
        assert_eq!(lattice_lambda_sq(484, 241, 112).unwrap(), 185);
        assert!(lattice_lambda_sq(10, 2, 4).is_err());
    }
}
