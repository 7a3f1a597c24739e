//! Independent brute-force ground truth.
//!
//! Two oracles: a discretized configuration graph over an exact grid on
//! the metric graph (components by union-find, first Betti number of the
//! grid complex with its unit squares filled), and an exhaustive face
//! enumerator for small parametric systems built on its own cofactor
//! solver. Neither shares the Galois-connection code path it is used to
//! check.

use crate::gf2::rank_sparse;
use crate::graph::{point_distance, GraphPoint, MetricGraph};
use crate::polytope::{FaceEntry, FacePoset, LabelSet, ParametricPolytope, Restraints};
use crate::rational::{denominator_lcm, rat_int, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("mesh must divide every edge length exactly")]
    MeshDoesNotDivide,
    #[error("mesh must be positive")]
    BadMesh,
    #[error("discretization too large: {0} tuples")]
    GridTooLarge(usize),
    #[error("brute-force face enumeration limited to dim <= 3 and at most 14 constraints")]
    SizeLimit,
}

/// A mesh that divides every edge length, every restraint component, and
/// every extra value: half the reciprocal of their denominator lcm.
pub fn suggest_mesh(g: &MetricGraph, r: &Restraints, extra: &[Rational]) -> Rational {
    let mut vals: Vec<&Rational> = g.edges().iter().map(|e| &e.length).collect();
    vals.extend(r.values());
    vals.extend(extra.iter());
    let lcm = denominator_lcm(vals);
    Rational::new(BigInt::one(), 2 * lcm)
}

/// Invariants of the discretized restricted configuration space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteInvariants {
    pub components: usize,
    /// First mod-2 Betti number of the grid complex (squares filled).
    pub betti1: usize,
    pub vertices: usize,
}

/// Grid points of the graph at multiples of `mesh` along each edge.
struct Grid {
    /// Every grid point, nodes first.
    points: Vec<GraphPoint>,
    /// Adjacency: one mesh step along an edge, through nodes.
    neighbors: Vec<Vec<u32>>,
}

fn build_grid(g: &MetricGraph, mesh: &Rational) -> Result<Grid, OracleError> {
    use num_traits::Signed;
    if !mesh.is_positive() {
        return Err(OracleError::BadMesh);
    }
    let mut points: Vec<GraphPoint> = (0..g.node_count()).map(GraphPoint::Node).collect();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); g.node_count()];
    for (ei, e) in g.edges().iter().enumerate() {
        let steps_q = &e.length / mesh;
        if !steps_q.denom().is_one() {
            return Err(OracleError::MeshDoesNotDivide);
        }
        let steps: u64 = (steps_q.numer())
            .try_into()
            .map_err(|_| OracleError::GridTooLarge(usize::MAX))?;
        let mut prev = e.a as u32;
        for k in 1..=steps {
            let cur = if k == steps {
                e.b as u32
            } else {
                points.push(GraphPoint::OnEdge {
                    edge: ei,
                    offset: mesh * rat_int(k as i64),
                });
                neighbors.push(Vec::new());
                (points.len() - 1) as u32
            };
            neighbors[prev as usize].push(cur);
            neighbors[cur as usize].push(prev);
            prev = cur;
        }
    }
    Ok(Grid { points, neighbors })
}

/// Component count and grid-complex Betti number of the discretized
/// space: tuples of grid points meeting every pairwise restraint, with
/// single-coordinate mesh steps as edges.
pub fn discrete_invariants(
    g: &MetricGraph,
    n: usize,
    r: &Restraints,
    mesh: &Rational,
) -> Result<DiscreteInvariants, OracleError> {
    discrete_run(g, n, r, mesh, true)
}

/// Component count only; skips the quadratic-cost square enumeration so
/// large grids stay cheap.
pub fn discrete_components(
    g: &MetricGraph,
    n: usize,
    r: &Restraints,
    mesh: &Rational,
) -> Result<usize, OracleError> {
    Ok(discrete_run(g, n, r, mesh, false)?.components)
}

fn discrete_run(
    g: &MetricGraph,
    n: usize,
    r: &Restraints,
    mesh: &Rational,
    with_betti: bool,
) -> Result<DiscreteInvariants, OracleError> {
    for v in r.values() {
        let q = v / mesh;
        if !q.denom().is_one() {
            return Err(OracleError::MeshDoesNotDivide);
        }
    }
    let grid = build_grid(g, mesh)?;
    let dist = g.distances();
    let p = grid.points.len();
    let total = p
        .checked_pow(n as u32)
        .ok_or(OracleError::GridTooLarge(usize::MAX))?;
    if total > 40_000_000 {
        return Err(OracleError::GridTooLarge(total));
    }

    // pairwise feasibility of grid points per restraint component value:
    // precompute distinct thresholds
    let pair_ok = |a: u32, b: u32, thr: &Rational| -> bool {
        point_distance(g, &dist, &grid.points[a as usize], &grid.points[b as usize]) >= *thr
    };

    // enumerate feasible tuples
    let tuples: Vec<Vec<u32>> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut t = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                t.push((c % p) as u32);
                c /= p;
            }
            for i in 0..n {
                for j in i + 1..n {
                    let thr = r.get(Restraints::pair_index(n, i, j));
                    if !pair_ok(t[i], t[j], thr) {
                        return None;
                    }
                }
            }
            Some(t)
        })
        .collect();

    let index: HashMap<&[u32], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();

    // edges: single-coordinate steps to a larger point id
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (ti, t) in tuples.iter().enumerate() {
        for c in 0..n {
            for &nb in &grid.neighbors[t[c] as usize] {
                if nb <= t[c] {
                    continue;
                }
                let mut t2 = t.clone();
                t2[c] = nb;
                if let Some(&tj) = index.get(t2.as_slice()) {
                    edges.push((ti, tj));
                }
            }
        }
    }

    // components by union-find
    let mut parent: Vec<usize> = (0..tuples.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut roots: Vec<usize> = (0..tuples.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();

    let betti1 = if with_betti {
        // squares: two distinct coordinates stepping to larger ids, all
        // four corners feasible
        let edge_index: HashMap<(usize, usize), u32> = edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let ekey = |a: usize, b: usize| -> Option<u32> {
            let k = if a < b { (a, b) } else { (b, a) };
            edge_index.get(&k).copied()
        };
        let mut squares: Vec<Vec<u32>> = Vec::new();
        for (ti, t) in tuples.iter().enumerate() {
            for c1 in 0..n {
                for &nb1 in &grid.neighbors[t[c1] as usize] {
                    if nb1 <= t[c1] {
                        continue;
                    }
                    for c2 in c1 + 1..n {
                        for &nb2 in &grid.neighbors[t[c2] as usize] {
                            if nb2 <= t[c2] {
                                continue;
                            }
                            let mut t1 = t.clone();
                            t1[c1] = nb1;
                            let mut t2 = t.clone();
                            t2[c2] = nb2;
                            let mut t12 = t1.clone();
                            t12[c2] = nb2;
                            let (Some(&a), Some(&b), Some(&c)) = (
                                index.get(t1.as_slice()),
                                index.get(t2.as_slice()),
                                index.get(t12.as_slice()),
                            ) else {
                                continue;
                            };
                            let sides = [ekey(ti, a), ekey(ti, b), ekey(a, c), ekey(b, c)];
                            if sides.iter().all(|s| s.is_some()) {
                                squares.push(sides.iter().map(|s| s.unwrap()).collect());
                            }
                        }
                    }
                }
            }
        }
        let rank_d2 = rank_sparse(squares);
        // b1 = (edges - vertices + components) - rank d2
        edges.len() - tuples.len() + components - rank_d2
    } else {
        0
    };

    Ok(DiscreteInvariants {
        components,
        betti1,
        vertices: tuples.len(),
    })
}

// ---------------------------------------------------------------------
// exhaustive face enumeration with an independent cofactor solver
// ---------------------------------------------------------------------

fn det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => {
            let mut acc = Rational::zero();
            for c in 0..3 {
                let minor = &m[1][(c + 1) % 3] * &m[2][(c + 2) % 3]
                    - &m[1][(c + 2) % 3] * &m[2][(c + 1) % 3];
                acc += &m[0][c] * minor;
            }
            acc
        }
        _ => unreachable!("oracle solver handles dimension <= 3"),
    }
}

fn cramer_solve(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        let mut mc = m.to_vec();
        for row in 0..n {
            mc[row][col] = b[row].clone();
        }
        out.push(det(&mc) / &d);
    }
    Some(out)
}

fn minor_rank(rows: &[Vec<Rational>], dim: usize) -> usize {
    // largest k with a nonzero k x k minor
    for k in (1..=dim.min(rows.len())).rev() {
        for rsel in crate::linalg::combinations(rows.len(), k) {
            for csel in crate::linalg::combinations(dim, k) {
                let sub: Vec<Vec<Rational>> = rsel
                    .iter()
                    .map(|&ri| csel.iter().map(|&ci| rows[ri][ci].clone()).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// Exhaustively enumerates the faces of `p` at `r`: a subset of the
/// constraints spans a face exactly when some feasible vertex is tight on
/// all of it; the face is then indexed by the common tight set of all
/// such vertices. The empty polytope yields the empty poset.
pub fn bruteforce_face_poset(
    p: &ParametricPolytope,
    r: &Restraints,
) -> Result<FacePoset, OracleError> {
    let dim = p.dim();
    let m = p.num_labels();
    if dim > 3 || m > 14 {
        return Err(OracleError::SizeLimit);
    }
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| p.row(i).iter().map(|&v| rat_int(v)).collect())
        .collect();
    let rhs = p.rhs_at(r);

    // vertex enumeration by Cramer solves over all dim-subsets
    let mut tights: Vec<LabelSet> = Vec::new();
    for combo in crate::linalg::combinations(m, dim) {
        let mat: Vec<Vec<Rational>> = combo.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<Rational> = combo.iter().map(|&i| rhs[i].clone()).collect();
        let Some(x) = cramer_solve(&mat, &b) else {
            continue;
        };
        let feasible = (0..m).all(|i| {
            let lhs: Rational = rows[i]
                .iter()
                .zip(&x)
                .map(|(a, v)| a * v)
                .fold(Rational::zero(), |acc, t| acc + t);
            lhs <= rhs[i]
        });
        if !feasible {
            continue;
        }
        let mut tight = LabelSet::EMPTY;
        for i in 0..m {
            let lhs: Rational = rows[i]
                .iter()
                .zip(&x)
                .map(|(a, v)| a * v)
                .fold(Rational::zero(), |acc, t| acc + t);
            if lhs == rhs[i] {
                tight.insert(i);
            }
        }
        if !tights.contains(&tight) {
            tights.push(tight);
        }
    }
    if tights.is_empty() {
        return Ok(FacePoset::from_entries(Vec::new()));
    }

    // subsets spanning faces, indexed by common tight sets
    let mut entries: Vec<FaceEntry> = Vec::new();
    let mut seen: Vec<LabelSet> = Vec::new();
    for code in 0u32..(1 << m) {
        let subset =
            LabelSet::from_indices(&(0..m).filter(|&i| (code >> i) & 1 == 1).collect::<Vec<_>>());
        let mut common: Option<LabelSet> = None;
        for t in &tights {
            if subset.is_subset_of(t) {
                common = Some(match common {
                    None => *t,
                    Some(c) => c.intersect(t),
                });
            }
        }
        let Some(face) = common else { continue };
        if seen.contains(&face) {
            continue;
        }
        seen.push(face);
        let face_rows: Vec<Vec<Rational>> = face.iter().map(|i| rows[i].clone()).collect();
        entries.push(FaceEntry {
            dim: dim - minor_rank(&face_rows, dim),
            index_set: face,
        });
    }
    Ok(FacePoset::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{distinct_edge_system, same_edge_system};
    use crate::rational::rat;

    fn scalar1(t: Rational) -> Restraints {
        Restraints::new(vec![t]).unwrap()
    }

    #[test]
    fn grid_single_edge_full_square() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let inv = discrete_invariants(&g, 2, &Restraints::zero(1), &rat(1, 4)).unwrap();
        assert_eq!(inv.components, 1);
        assert_eq!(inv.betti1, 0);
        assert_eq!(inv.vertices, 25);
    }

    #[test]
    fn grid_three_star_circle() {
        let g = MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap();
        for mesh in [rat(1, 8), rat(1, 16)] {
            let inv = discrete_invariants(&g, 2, &scalar1(rat(1, 2)), &mesh).unwrap();
            assert_eq!((inv.components, inv.betti1), (1, 1), "mesh {mesh}");
        }
    }

    #[test]
    fn grid_corolla3_components() {
        let g = MetricGraph::corolla(3).unwrap();
        let r = scalar1(rat_int(2));
        let mesh = suggest_mesh(&g, &r, &[]);
        assert_eq!(mesh, rat(1, 16));
        let comps = discrete_components(&g, 2, &r, &mesh).unwrap();
        assert_eq!(comps, 6);
    }

    #[test]
    fn grid_rejects_bad_mesh() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        assert!(matches!(
            discrete_invariants(&g, 2, &Restraints::zero(1), &rat(2, 5)),
            Err(OracleError::MeshDoesNotDivide)
        ));
        assert!(matches!(
            discrete_invariants(&g, 2, &scalar1(rat(1, 3)), &rat(1, 2)),
            Err(OracleError::MeshDoesNotDivide)
        ));
    }

    #[test]
    fn bruteforce_matches_known_shapes() {
        // quadrilateral in the order cell's middle interval
        let p = same_edge_system(rat_int(2), rat_int(1));
        let poset = bruteforce_face_poset(&p, &scalar1(rat(5, 4))).unwrap();
        assert_eq!(poset.f_vector(), vec![4, 4, 1]);

        // triangle strictly below the endpoint distance
        let poset = bruteforce_face_poset(&p, &scalar1(rat(1, 2))).unwrap();
        assert_eq!(poset.f_vector(), vec![3, 3, 1]);

        // empty polytope
        let poset = bruteforce_face_poset(&p, &scalar1(rat_int(4))).unwrap();
        assert!(poset.is_empty());

        // plain box
        let b = distinct_edge_system(
            rat_int(1),
            rat_int(1),
            rat_int(5),
            rat_int(5),
            rat_int(5),
            rat_int(5),
        );
        let poset = bruteforce_face_poset(&b, &scalar1(rat_int(1))).unwrap();
        assert_eq!(poset.f_vector(), vec![4, 4, 1]);
    }

    #[test]
    fn bruteforce_pentagon_in_a_distinct_edge_cell() {
        // triangle graph, long edge x short edge, small restraint: the
        // origin corner is cut off
        let p = distinct_edge_system(
            rat_int(2),
            rat(1, 2),
            rat_int(0),
            rat(1, 2),
            rat_int(1),
            rat(1, 2),
        );
        let poset = bruteforce_face_poset(&p, &scalar1(rat(1, 4))).unwrap();
        assert_eq!(poset.f_vector(), vec![5, 5, 1]);
    }

    #[test]
    fn bruteforce_agrees_with_the_galois_poset() {
        let systems = [
            same_edge_system(rat_int(2), rat_int(1)),
            same_edge_system(rat_int(1), rat_int(1)),
            distinct_edge_system(
                rat_int(2),
                rat(1, 2),
                rat_int(0),
                rat(1, 2),
                rat_int(1),
                rat(1, 2),
            ),
        ];
        let params = [
            rat_int(0),
            rat(1, 4),
            rat(1, 2),
            rat_int(1),
            rat(5, 4),
            rat(3, 2),
            rat_int(2),
        ];
        for p in &systems {
            for t in &params {
                let r = scalar1(t.clone());
                let typ = p.polytope_type(&r).unwrap();
                let brute = bruteforce_face_poset(p, &r).unwrap();
                if typ.is_empty() {
                    assert!(brute.is_empty());
                } else {
                    let fast = p.face_poset(&typ).unwrap();
                    assert!(fast.eq_labeled(&brute), "differ at t = {t}");
                }
            }
        }
    }

    #[test]
    fn size_limits_are_enforced() {
        let p = ParametricPolytope::new(
            4,
            (0..8).map(|i| format!("x{i}")).collect(),
            vec![
                vec![1, 0, 0, 0],
                vec![-1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, -1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, -1, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, -1],
            ],
            (0..8)
                .map(|_| crate::polytope::AffineRhs::constant(rat_int(1)))
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            bruteforce_face_poset(&p, &Restraints::zero(0)),
            Err(OracleError::SizeLimit)
        ));
    }
}
