//! Closed-tour constructions and two-sided tour-length bounds for modular
//! lattices, plus exact small-instance TSP solvers used as oracles.
//!
//! Distances inside tours are doubles; every comparison that must be exact
//! (`lambda^2` against `N`, edge comparisons) stays in integer arithmetic in
//! the other modules.

use crate::error::{Error, Result};
use crate::exactint::IntVec2;
use crate::modlattice::{triangle, ModularLattice};
use itertools::Itertools;
use std::io::{self, Write};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coefficient of Karloff's general upper bound `1.39159 * sqrt(N) + 11` for
/// a tour through `N` points of the unit square.
pub const KARLOFF_COEFF: f64 = 1.39159;
pub const KARLOFF_OFFSET: f64 = 11.0;

/// A closed tour: a visiting order plus its cyclic length (the edge from the
/// last point back to the first is always included).
#[derive(Clone, Debug)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

/// Cyclic length of `order` over `points`.
pub fn tour_length(points: &[IntVec2], order: &[usize]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|i| (points[order[(i + 1) % n]] - points[order[i]]).norm())
        .sum()
}

/// Scale of a [`TourBounds`] bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Lengths divided by `N * sqrt(N)`: the per-point constant after mapping
    /// `[0, N-1]^2` onto the unit square.
    UnitSquare,
    /// Raw lengths in lattice coordinates.
    Raw,
}

/// Two-sided bracket for the optimal closed tour length of a point set.
#[derive(Clone, Copy, Debug)]
pub struct TourBounds {
    pub lower: f64,
    pub upper: f64,
    /// Shortest distance in raw lattice coordinates.
    pub lambda: f64,
    /// Number of parallel lines behind the construction.
    pub k: usize,
    /// Normalized constant `lambda / sqrt(N)`.
    pub f: f64,
    pub scale: Scale,
}

/// The bracket driven by the shortest distance alone, in unit-square scale:
///
/// `lambda/sqrt(N) <= L/(N*sqrt(N)) <= lambda/sqrt(N) + 2*sqrt(2)/sqrt(N)`.
pub fn tour_bounds(l: &ModularLattice) -> TourBounds {
    let n = l.n() as f64;
    let lambda = l.lambda();
    let f = lambda / n.sqrt();
    TourBounds {
        lower: f,
        upper: f + 2.0 * SQRT2 / n.sqrt(),
        lambda,
        k: l.line_decomposition().k(),
        f,
        scale: Scale::UnitSquare,
    }
}

/// The refined bracket for `L_{N,1,b}` through its lattice triangle.
///
/// Requires `(1,b)` to be a shortest edge of the triangle (then it is a
/// shortest lattice vector); the connector terms tighten both sides:
///
/// `sqrt(1+b^2)/sqrt(N) + b*(min(|AC|,|BC|) - |AB|)/(N*sqrt(N)) <= L/(N*sqrt(N))`
/// `L/(N*sqrt(N)) <= sqrt(1+b^2)/sqrt(N) + b*(max(|AC|,|BC|) - |AB|)/(N*sqrt(N)) + sqrt(2)/sqrt(N)`.
pub fn triangle_bounds(n: i64, b: i64) -> Result<TourBounds> {
    let t = triangle(n, b)?;
    if !t.ab_is_shortest() {
        return Err(Error::ShortestEdgeHypothesis { n, b });
    }
    let ab = t.ab().norm();
    let ac = t.ac().norm();
    let bc = t.bc().norm();
    let nf = n as f64;
    let s = nf.sqrt();
    let base = ab / s;
    let lower = base + b as f64 * (ac.min(bc) - ab) / (nf * s);
    let upper = base + b as f64 * (ac.max(bc) - ab) / (nf * s) + SQRT2 / s;
    Ok(TourBounds {
        lower,
        upper,
        lambda: ab,
        k: b as usize,
        f: base,
        scale: Scale::UnitSquare,
    })
}

/// Serpentine (boustrophedon) tour: traverse the parallel lines of the
/// decomposition in order of their perpendicular offset and close the cycle.
/// The traversal direction of each line is chosen by a small dynamic program
/// that minimizes the total connector-plus-closing length for the fixed line
/// order; on full-width lines this degenerates to plain alternation, and on
/// lattices whose chords shift sideways it avoids the long jumps a rigid
/// alternation would take.
///
/// The returned length always sits inside the
/// `[N*lambda, N*lambda + 2*sqrt(2)*N]` bracket: when the shortest vector
/// runs nearly diagonally, the chords sweep corner to corner and even the
/// optimal end-to-end chain can exceed the bracket by a fraction of a
/// percent, in which case a 2-opt pass pulls the tour back inside.
pub fn serpentine_tour(l: &ModularLattice) -> Tour {
    let d = l.line_decomposition();
    let points = l.points();
    let k = d.lines.len();

    // Endpoint of line `i` when traversed forward (`o = 0`) or reversed.
    let entry = |i: usize, o: usize| -> IntVec2 {
        let line = &d.lines[i];
        points[if o == 0 { line[0] } else { line[line.len() - 1] }]
    };
    let exit = |i: usize, o: usize| -> IntVec2 {
        let line = &d.lines[i];
        points[if o == 0 { line[line.len() - 1] } else { line[0] }]
    };

    let mut best: Option<(f64, Vec<usize>)> = None;
    for first_o in 0..2 {
        // cost[o] = shortest connector chain ending with line i in orientation o
        let mut cost = [f64::INFINITY; 2];
        cost[first_o] = 0.0;
        let mut parent = vec![[0usize; 2]; k];
        for (i, par) in parent.iter_mut().enumerate().skip(1) {
            let mut next = [f64::INFINITY; 2];
            for (o, next_cost) in next.iter_mut().enumerate() {
                for (prev_o, &prev_cost) in cost.iter().enumerate() {
                    let c = prev_cost + (entry(i, o) - exit(i - 1, prev_o)).norm();
                    if c < *next_cost {
                        *next_cost = c;
                        par[o] = prev_o;
                    }
                }
            }
            cost = next;
        }
        for (last_o, &chain_cost) in cost.iter().enumerate() {
            let total = chain_cost + (entry(0, first_o) - exit(k - 1, last_o)).norm();
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                let mut orientation = vec![0usize; k];
                orientation[k - 1] = last_o;
                for i in (1..k).rev() {
                    orientation[i - 1] = parent[i][orientation[i]];
                }
                debug_assert_eq!(orientation[0], first_o);
                best = Some((total, orientation));
            }
        }
    }

    let orientation = best.expect("at least one line").1;
    let mut order: Vec<usize> = Vec::with_capacity(points.len());
    for (line, &o) in d.lines.iter().zip(&orientation) {
        if o == 0 {
            order.extend(line.iter().copied());
        } else {
            order.extend(line.iter().rev().copied());
        }
    }
    let length = tour_length(&points, &order);
    let tour = Tour { order, length };

    let n = points.len() as f64;
    let bracket_upper = n * l.lambda() + 2.0 * SQRT2 * n;
    if tour.length > bracket_upper {
        return two_opt_improve(&tour, &points);
    }
    tour
}

/// Provably optimal closed tour by dynamic programming over vertex subsets
/// (`O(2^n * n^2)`); limited to 18 points.
pub fn exact_tour(points: &[IntVec2]) -> Result<Tour> {
    let n = points.len();
    if n > 18 {
        return Err(Error::ExactOracleLimit(n));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "exact tour needs at least 3 points, got {n}"
        )));
    }
    let dist: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (points[i] - points[j]).norm())
        .collect();
    let d = |i: usize, j: usize| dist[i * n + j];

    // Vertex 0 is fixed as the start to quotient out rotations.
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full * n];
    let mut parent = vec![u8::MAX; full * n];
    for j in 1..n {
        dp[((1 << j) | 1) * n + j] = d(0, j);
    }
    for mask in 0..full {
        if mask & 1 == 0 {
            continue;
        }
        for j in 1..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * n + j];
            if !cur.is_finite() {
                continue;
            }
            for v in 1..n {
                if mask & (1 << v) != 0 {
                    continue;
                }
                let next = mask | (1 << v);
                let cand = cur + d(j, v);
                if cand < dp[next * n + v] {
                    dp[next * n + v] = cand;
                    parent[next * n + v] = j as u8;
                }
            }
        }
    }

    let all = full - 1;
    let (mut last, mut best) = (usize::MAX, f64::INFINITY);
    for j in 1..n {
        let cand = dp[all * n + j] + d(j, 0);
        if cand < best {
            best = cand;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = all;
    let mut cur = last;
    while cur != 0 {
        order.push(cur);
        let p = parent[mask * n + cur];
        mask &= !(1 << cur);
        cur = if p == u8::MAX { 0 } else { p as usize };
    }
    order.push(0);
    order.reverse();
    debug_assert_eq!(order.len(), n);
    Ok(Tour {
        length: best,
        order,
    })
}

/// Independent exact oracle: minimum over all permutations with the first
/// point fixed. Limited to 10 points.
pub fn brute_force_tour(points: &[IntVec2]) -> Result<Tour> {
    let n = points.len();
    if n > 10 {
        return Err(Error::ExactOracleLimit(n));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "exact tour needs at least 3 points, got {n}"
        )));
    }
    let mut best: Option<Tour> = None;
    for perm in (1..n).permutations(n - 1) {
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend(perm);
        let length = tour_length(points, &order);
        if best.as_ref().is_none_or(|b| length < b.length) {
            best = Some(Tour { order, length });
        }
    }
    Ok(best.expect("n >= 3 always yields a permutation"))
}

/// 2-opt local search; the length never increases and the number of applied
/// improvements is capped at `10 * n^2`.
pub fn two_opt_improve(tour: &Tour, points: &[IntVec2]) -> Tour {
    let n = tour.order.len();
    let mut order = tour.order.clone();
    if n < 4 {
        return Tour {
            order,
            length: tour_length(points, &tour.order),
        };
    }
    let cap = 10 * n * n;
    let mut applied = 0;
    while applied < cap {
        let mut best_delta = -1e-12;
        let mut best_pair = None;
        for i in 0..n - 1 {
            let a = points[order[i]];
            let b = points[order[i + 1]];
            for j in i + 1..n {
                let c = points[order[j]];
                let e = points[order[(j + 1) % n]];
                let delta =
                    (c - a).norm() + (e - b).norm() - (b - a).norm() - (e - c).norm();
                if delta < best_delta {
                    best_delta = delta;
                    best_pair = Some((i, j));
                }
            }
        }
        match best_pair {
            Some((i, j)) => {
                order[i + 1..=j].reverse();
                applied += 1;
            }
            None => break,
        }
    }
    let length = tour_length(points, &order);
    Tour { order, length }
}

/// Comparison of the lattice-specific tour bound against Karloff's general
/// bound, both as absolute lengths in the unit square.
#[derive(Clone, Copy, Debug)]
pub struct KarloffComparison {
    /// `lambda + 2*sqrt(2)`: the shortest-distance bound times `sqrt(N)`.
    pub lambda_bound: f64,
    /// `1.39159 * sqrt(N) + 11`.
    pub karloff_bound: f64,
    pub improves: bool,
}

pub fn karloff_comparison(l: &ModularLattice) -> KarloffComparison {
    let lambda_bound = l.lambda() + 2.0 * SQRT2;
    let karloff_bound = KARLOFF_COEFF * (l.n() as f64).sqrt() + KARLOFF_OFFSET;
    KarloffComparison {
        lambda_bound,
        karloff_bound,
        improves: lambda_bound < karloff_bound,
    }
}

/// Write a tour as CSV: one row per step, the closing edge implied.
pub fn write_tour_csv<W: Write>(
    w: &mut W,
    points: &[IntVec2],
    tour: &Tour,
    label: &str,
) -> io::Result<()> {
    writeln!(
        w,
        "# lattice-tsp tour v1 kind={label} points={} closed=true length={:.6}",
        points.len(),
        tour.length
    )?;
    writeln!(w, "step,point_index,x,y")?;
    for (step, &idx) in tour.order.iter().enumerate() {
        writeln!(w, "{step},{idx},{},{}", points[idx].x, points[idx].y)?;
    }
    Ok(())
}

/// Write a tour as a standalone SVG: the point cloud plus the closed
/// polyline. Minimal static markup, no styling dependencies.
pub fn write_tour_svg<W: Write>(w: &mut W, points: &[IntVec2], tour: &Tour) -> io::Result<()> {
    let max_x = points.iter().map(|p| p.x).max().unwrap_or(1) as f64;
    let max_y = points.iter().map(|p| p.y).max().unwrap_or(1) as f64;
    let pad = 0.03 * max_x.max(max_y).max(1.0);
    let side = 720.0;
    let scale = side / (max_x.max(max_y) + 2.0 * pad);
    let tx = |x: i64| (x as f64 + pad) * scale;
    let ty = |y: i64| (max_y - y as f64 + pad) * scale;

    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
    )?;
    write!(
        w,
        r##"<polyline fill="none" stroke="#1a6091" stroke-width="1" points=""##
    )?;
    for &idx in tour.order.iter().chain(tour.order.first()) {
        let p = points[idx];
        write!(w, "{:.2},{:.2} ", tx(p.x), ty(p.y))?;
    }
    writeln!(w, r#""/>"#)?;
    let r = (0.3 * scale).clamp(0.7, 4.0);
    for p in points {
        writeln!(
            w,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#d44a2a"/>"##,
            tx(p.x),
            ty(p.y)
        )?;
    }
    writeln!(w, "</svg>")
}
