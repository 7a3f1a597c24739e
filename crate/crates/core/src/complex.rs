//! The global regular cell complex of a restricted configuration space at
//! a fixed restraint vector.
//!
//! Cells are the canonicalized faces of the nonempty maximal-cell
//! polytopes, deduplicated by canonical key; incidences are the
//! codimension-1 covering pairs of each face poset. Homology is computed
//! mod 2, where the boundary of a cell is the sum of its codimension-1
//! faces.

use crate::cells::{canonicalize_face, cell_system, maximal_cells, CellKey, CellSystem};
use crate::gf2::rank_sparse;
use crate::graph::{DistanceMatrix, MetricGraph};
use crate::polytope::{PolytopeType, Restraints};
use std::collections::BTreeMap;

/// One cell of the assembled complex.
#[derive(Clone, Debug)]
pub struct ComplexCell {
    pub key: CellKey,
    pub dim: usize,
    /// Indices of the codimension-1 faces in the complex's cell list.
    pub faces: Vec<usize>,
}

/// The regular cell complex of the configuration space at one parameter.
#[derive(Clone, Debug)]
pub struct ConfigComplex {
    n: usize,
    cells: Vec<ComplexCell>,
}

/// Builds the complex at restraint vector `r`.
pub fn build_complex(g: &MetricGraph, n: usize, r: &Restraints) -> ConfigComplex {
    let dist = g.distances();
    let systems: Vec<CellSystem> = maximal_cells(g, n)
        .iter()
        .map(|c| cell_system(c, g, &dist))
        .collect();
    let types: Vec<PolytopeType> = systems
        .iter()
        .map(|s| {
            s.polytope
                .polytope_type(r)
                .expect("cell systems are bounded")
        })
        .collect();
    build_complex_from_types(g, &dist, n, &systems, &types)
}

/// Assembly from precomputed maximal-cell types (the sweep reuses its
/// fingerprint evaluations through this path).
pub(crate) fn build_complex_from_types(
    g: &MetricGraph,
    dist: &DistanceMatrix,
    n: usize,
    systems: &[CellSystem],
    types: &[PolytopeType],
) -> ConfigComplex {
    // canonical key -> (dim, set of boundary keys)
    let mut cells: BTreeMap<CellKey, (usize, Vec<CellKey>)> = BTreeMap::new();
    for (sys, t) in systems.iter().zip(types) {
        if t.is_empty() {
            continue;
        }
        let poset = sys
            .polytope
            .face_poset(t)
            .expect("nonempty type has a face poset");
        let keys: Vec<(CellKey, usize)> = poset
            .faces()
            .iter()
            .map(|f| {
                let cf = canonicalize_face(sys, &f.index_set, g, dist)
                    .expect("tight sets of actual faces are coherent");
                (cf.key(), f.dim)
            })
            .collect();
        for (key, dim) in &keys {
            let entry = cells
                .entry(key.clone())
                .or_insert_with(|| (*dim, Vec::new()));
            debug_assert_eq!(entry.0, *dim, "canonical key with inconsistent dimension");
        }
        for (fi, gi) in poset.covers() {
            let (fkey, _) = &keys[fi];
            let (gkey, _) = &keys[gi];
            let entry = cells.get_mut(gkey).expect("coface recorded");
            if !entry.1.contains(fkey) {
                entry.1.push(fkey.clone());
            }
        }
    }

    // freeze deterministic order: by (dim, key)
    let mut ordered: Vec<(CellKey, usize)> =
        cells.iter().map(|(k, (d, _))| (k.clone(), *d)).collect();
    ordered.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    let index_of: BTreeMap<&CellKey, usize> = ordered
        .iter()
        .enumerate()
        .map(|(i, (k, _))| (k, i))
        .collect();
    let cells_out: Vec<ComplexCell> = ordered
        .iter()
        .map(|(k, d)| {
            let mut faces: Vec<usize> = cells[k].1.iter().map(|fk| index_of[fk]).collect();
            faces.sort_unstable();
            debug_assert!(faces.windows(2).all(|w| w[0] != w[1]));
            ComplexCell {
                key: k.clone(),
                dim: *d,
                faces,
            }
        })
        .collect();
    ConfigComplex {
        n,
        cells: cells_out,
    }
}

impl ConfigComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[ComplexCell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of cells per dimension `0..=n`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; self.n + 1];
        for c in &self.cells {
            f[c.dim] += 1;
        }
        f
    }

    /// Connected components of the cell incidence graph.
    pub fn components(&self) -> usize {
        let m = self.cells.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (i, c) in self.cells.iter().enumerate() {
            for &f in &c.faces {
                let (a, b) = (find(&mut parent, i), find(&mut parent, f));
                parent[a] = b;
            }
        }
        let mut roots: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Alternating sum of the f-vector.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Mod-2 Betti numbers, one per dimension `0..=n`; empty for the
    /// empty complex.
    pub fn betti_mod2(&self) -> Vec<usize> {
        if self.cells.is_empty() {
            return Vec::new();
        }
        // index cells per dimension
        let mut per_dim: Vec<Vec<usize>> = vec![Vec::new(); self.n + 2];
        for (i, c) in self.cells.iter().enumerate() {
            per_dim[c.dim].push(i);
        }
        // position of a cell inside its dimension block
        let mut pos = vec![0usize; self.cells.len()];
        for block in &per_dim {
            for (p, &i) in block.iter().enumerate() {
                pos[i] = p;
            }
        }
        // rank of each boundary map d_k: C_k -> C_{k-1}
        let mut rank_d = vec![0usize; self.n + 2];
        for k in 1..=self.n {
            let cols: Vec<Vec<u32>> = per_dim[k]
                .iter()
                .map(|&i| self.cells[i].faces.iter().map(|&f| pos[f] as u32).collect())
                .collect();
            rank_d[k] = rank_sparse(cols);
        }
        (0..=self.n)
            .map(|k| per_dim[k].len() - rank_d[k] - rank_d[k + 1])
            .collect()
    }

    /// Canonical keys of the 0-cells whose underlying cell is a node
    /// configuration (all coordinates pinned to graph nodes).
    pub fn node_configuration_cells(&self) -> Vec<String> {
        self.cells
            .iter()
            .filter(|c| c.dim == 0 && c.key.cell.split(',').all(|tok| tok.starts_with('n')))
            .map(|c| c.key.cell.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn scalar(n: usize, t: crate::rational::Rational) -> Restraints {
        Restraints::scalar(n, t).unwrap()
    }

    #[test]
    fn single_edge_at_zero_is_the_subdivided_square() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat_int(0)));
        assert_eq!(x.f_vector(), vec![4, 5, 2]);
        assert_eq!(x.euler_characteristic(), 1);
        assert_eq!(x.components(), 1);
        assert_eq!(x.betti_mod2(), vec![1, 0, 0]);
    }

    #[test]
    fn single_edge_past_the_midpoint_is_two_triangles() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat(3, 4)));
        assert_eq!(x.f_vector(), vec![6, 6, 2]);
        assert_eq!(x.euler_characteristic(), 2);
        assert_eq!(x.components(), 2);
        assert_eq!(x.betti_mod2(), vec![2, 0, 0]);
    }

    #[test]
    fn three_star_small_restraint_is_a_circle() {
        let g = MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat(1, 2)));
        assert_eq!(x.components(), 1);
        assert_eq!(x.betti_mod2(), vec![1, 1, 0]);
        assert_eq!(x.euler_characteristic(), 0);
    }

    #[test]
    fn corolla_emptiness_threshold() {
        let g = MetricGraph::corolla(2).unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat_int(3)));
        assert!(x.is_empty());
        assert_eq!(x.f_vector(), vec![0, 0, 0]);
        assert_eq!(x.components(), 0);
        assert_eq!(x.betti_mod2(), Vec::<usize>::new());
        assert_eq!(x.euler_characteristic(), 0);
    }

    #[test]
    fn corolla4_component_count_past_the_leaf_threshold() {
        let g = MetricGraph::corolla(4).unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat(12, 5)));
        // ordered pairs of distinct edges with length sum >= 12/5
        assert_eq!(x.components(), 6);
    }

    #[test]
    fn corolla3_betti_at_two() {
        let g = MetricGraph::corolla(3).unwrap();
        let x = build_complex(&g, 2, &scalar(2, rat_int(2)));
        assert_eq!(x.betti_mod2(), vec![6, 0, 0]);
        assert_eq!(x.components(), 6);
    }

    #[test]
    fn regularity_no_duplicate_boundary_faces() {
        let g = MetricGraph::parse("a b 2\na c 1/2\nc b 1/2\n").unwrap();
        for t in [rat_int(0), rat(1, 4), rat(3, 4), rat(9, 8), rat(11, 8)] {
            let x = build_complex(&g, 2, &scalar(2, t));
            for c in x.cells() {
                let mut faces = c.faces.clone();
                faces.sort_unstable();
                faces.dedup();
                assert_eq!(faces.len(), c.faces.len());
                // faces are cells of the complex with dimension one less
                for &f in &c.faces {
                    assert_eq!(x.cells()[f].dim + 1, c.dim);
                }
            }
            let euler: i64 = x
                .betti_mod2()
                .iter()
                .enumerate()
                .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
                .sum();
            assert_eq!(euler, x.euler_characteristic());
        }
    }

    #[test]
    fn node_configuration_cells_shrink_monotonically() {
        let g = MetricGraph::corolla(3).unwrap();
        let big = build_complex(&g, 2, &scalar(2, rat_int(2)));
        let small = build_complex(&g, 2, &scalar(2, rat(1, 2)));
        let big_nodes = big.node_configuration_cells();
        let small_nodes = small.node_configuration_cells();
        for k in &big_nodes {
            assert!(
                small_nodes.contains(k),
                "{k} vanished at the smaller restraint"
            );
        }
        assert!(big_nodes.len() < small_nodes.len());
    }

    #[test]
    fn components_below_first_critical_match_zero_for_branched_graphs() {
        for g in [
            MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap(),
            MetricGraph::corolla(3).unwrap(),
        ] {
            let at_zero = build_complex(&g, 2, &scalar(2, rat_int(0)));
            let tiny = build_complex(&g, 2, &scalar(2, rat(1, 64)));
            assert_eq!(at_zero.components(), tiny.components());
        }
    }
}

#[cfg(test)]
mod gluing_tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn loop_graph_at_zero_is_a_torus() {
        // a loop subdivides into a 2-cycle; the square of a circle is a
        // torus, whose mod-2 homology the glued complex must reproduce
        let g = MetricGraph::parse("v v 2\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        let x = build_complex(&g, 2, &Restraints::scalar(2, rat_int(0)).unwrap());
        assert_eq!(x.components(), 1);
        assert_eq!(x.euler_characteristic(), 0);
        assert_eq!(x.betti_mod2(), vec![1, 2, 1]);
    }

    #[test]
    fn loop_graph_small_restraint_is_an_annulus() {
        // two points on a circle that may not touch deformation-retract
        // onto a single circle
        let g = MetricGraph::parse("v v 2\n").unwrap();
        let x = build_complex(&g, 2, &Restraints::scalar(2, rat(1, 4)).unwrap());
        assert_eq!(x.components(), 1);
        assert_eq!(x.betti_mod2(), vec![1, 1, 0]);
    }

    #[test]
    fn parallel_edges_shortcut_the_route_constants() {
        // on the long edge of a parallel pair the endpoint distance is the
        // short edge, so the order cell empties at (1 + 3)/2 = 2
        let g = MetricGraph::parse("a b 1\na b 3\n").unwrap();
        let x = build_complex(&g, 2, &Restraints::scalar(2, rat(9, 4)).unwrap());
        // past that threshold only the mixed cells survive
        assert!(x
            .cells()
            .iter()
            .all(|c| !c.key.cell.starts_with("e1.1")));
        let y = build_complex(&g, 2, &Restraints::scalar(2, rat(7, 4)).unwrap());
        assert!(y.cells().iter().any(|c| c.key.cell.starts_with("e1.1")));
    }

    #[test]
    fn three_points_on_an_edge_are_six_ordered_chambers() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let x = build_complex(&g, 3, &Restraints::scalar(3, rat(1, 4)).unwrap());
        assert_eq!(x.components(), 6);
        assert_eq!(x.betti_mod2(), vec![6, 0, 0, 0]);
        let inv = crate::oracle::discrete_invariants(
            &g,
            3,
            &Restraints::scalar(3, rat(1, 4)).unwrap(),
            &rat(1, 8),
        )
        .unwrap();
        assert_eq!(inv.components, 6);
        assert_eq!(inv.betti1, 0);
    }
}
