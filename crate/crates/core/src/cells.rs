//! Cells of the n-fold configuration complex of a metric graph and their
//! parametric inequality systems.
//!
//! A cell assigns each coordinate to a node or an edge; coordinates sharing
//! an edge carry an ordered partition into groups (coordinates in one group
//! coincide, groups are strictly ordered along the edge). Maximal cells are
//! the all-edge, all-singleton ones. Each cell owns a canonical constraint
//! system over its free variables, one variable per group; systems of faces
//! are generated from the face's own descriptor and then matched against
//! substituted parent rows, which keeps face systems independent of the
//! parent they were reached through.

use crate::graph::{DistanceMatrix, MetricGraph};
use crate::polytope::{AffineRhs, LabelSet, ParametricPolytope, Restraints};
use crate::rational::{rat_int, Rational};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CellError {
    #[error("zero-dimensional cell has no inequality system")]
    ZeroDimensionalCell,
    #[error("cell is not a face of the given cell")]
    NotAFace,
    #[error("incoherent tight set: {0}")]
    IncoherentFace(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Where one coordinate lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spot {
    Node(usize),
    Edge(usize),
}

/// A cell of the product complex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellDescriptor {
    spots: Vec<Spot>,
    /// Per edge used by two or more coordinates: the ordered partition of
    /// those coordinates into coincidence groups, sorted by edge id.
    chains: Vec<(usize, Vec<Vec<usize>>)>,
}

/// One free variable of a cell: a maximal group of coincident coordinates
/// on one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub edge: usize,
    /// Coordinates in the group, ascending; `coords[0]` is the
    /// representative that names the box labels.
    pub coords: Vec<usize>,
}

impl CellDescriptor {
    pub fn new(spots: Vec<Spot>, mut chains: Vec<(usize, Vec<Vec<usize>>)>) -> Self {
        chains.sort_by_key(|(e, _)| *e);
        for (_, groups) in &mut chains {
            for g in groups.iter_mut() {
                g.sort_unstable();
            }
        }
        let c = CellDescriptor { spots, chains };
        debug_assert!(c.check_well_formed());
        c
    }

    fn check_well_formed(&self) -> bool {
        for (e, groups) in &self.chains {
            let mut seen: Vec<usize> = Vec::new();
            for g in groups {
                if g.is_empty() {
                    return false;
                }
                for &i in g {
                    if self.spots.get(i) != Some(&Spot::Edge(*e)) {
                        return false;
                    }
                    seen.push(i);
                }
            }
            let count = self.spots.iter().filter(|s| **s == Spot::Edge(*e)).count();
            if seen.len() != count || count < 2 {
                return false;
            }
        }
        true
    }

    pub fn n(&self) -> usize {
        self.spots.len()
    }

    pub fn spots(&self) -> &[Spot] {
        &self.spots
    }

    pub fn chain_of(&self, edge: usize) -> Option<&Vec<Vec<usize>>> {
        self.chains.iter().find(|(e, _)| *e == edge).map(|(_, g)| g)
    }

    /// Free variables in representative-coordinate order.
    pub fn variables(&self) -> Vec<VarInfo> {
        let mut vars: Vec<VarInfo> = Vec::new();
        let mut in_chain = vec![false; self.spots.len()];
        for (e, groups) in &self.chains {
            for g in groups {
                for &i in g {
                    in_chain[i] = true;
                }
                vars.push(VarInfo {
                    edge: *e,
                    coords: g.clone(),
                });
            }
        }
        for (i, s) in self.spots.iter().enumerate() {
            if let Spot::Edge(e) = s {
                if !in_chain[i] {
                    vars.push(VarInfo {
                        edge: *e,
                        coords: vec![i],
                    });
                }
            }
        }
        vars.sort_by_key(|v| v.coords[0]);
        vars
    }

    pub fn dim(&self) -> usize {
        self.variables().len()
    }

    pub fn is_maximal(&self) -> bool {
        self.spots.iter().all(|s| matches!(s, Spot::Edge(_)))
            && self
                .chains
                .iter()
                .all(|(_, groups)| groups.iter().all(|g| g.len() == 1))
    }

    /// Position of a coordinate's group in its edge chain (0-based), or 0
    /// for a sole occupant.
    fn chain_position(&self, coord: usize) -> usize {
        if let Spot::Edge(e) = self.spots[coord] {
            if let Some(groups) = self.chain_of(e) {
                return groups
                    .iter()
                    .position(|g| g.contains(&coord))
                    .expect("coordinate is in its chain");
            }
        }
        0
    }

    /// Canonical token list: `n<idx>` for nodes, `e<idx>` for sole edge
    /// occupants, `e<idx>.<pos>` (1-based group position) on shared edges.
    pub fn canonical_string(&self) -> String {
        let tokens: Vec<String> = self
            .spots
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Spot::Node(v) => format!("n{v}"),
                Spot::Edge(e) => {
                    if self.chain_of(*e).is_some() {
                        format!("e{e}.{}", self.chain_position(i) + 1)
                    } else {
                        format!("e{e}")
                    }
                }
            })
            .collect();
        tokens.join(",")
    }
}

/// All ordered partitions of `items` into nonempty groups, deterministic.
fn ordered_set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let k = items.len();
    // enumerate nonempty first blocks by ascending bitmask
    for mask in 1u32..(1 << k) {
        let mut first = Vec::new();
        let mut rest = Vec::new();
        for (i, &it) in items.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                first.push(it);
            } else {
                rest.push(it);
            }
        }
        for mut tail in ordered_set_partitions(&rest) {
            let mut part = vec![first.clone()];
            part.append(&mut tail);
            out.push(part);
        }
    }
    out
}

/// The maximal (n-dimensional) cells: one per assignment of coordinates to
/// edges together with a strict ordering of coordinates sharing an edge.
pub fn maximal_cells(g: &MetricGraph, n: usize) -> Vec<CellDescriptor> {
    assert!(n >= 1, "n must be at least 1");
    let e_count = g.edge_count();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        out.extend(cells_for_assignment(&assignment, true));
        // advance mixed-radix
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < e_count {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

fn cells_for_assignment(edges: &[usize], strict_only: bool) -> Vec<CellDescriptor> {
    let spots: Vec<Spot> = edges.iter().map(|&e| Spot::Edge(e)).collect();
    // group coordinates by edge
    let mut by_edge: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &e) in edges.iter().enumerate() {
        match by_edge.iter_mut().find(|(ee, _)| *ee == e) {
            Some((_, v)) => v.push(i),
            None => by_edge.push((e, vec![i])),
        }
    }
    by_edge.sort_by_key(|(e, _)| *e);
    let shared: Vec<(usize, Vec<usize>)> = by_edge
        .into_iter()
        .filter(|(_, coords)| coords.len() >= 2)
        .collect();
    let mut cells = vec![Vec::new()];
    for (e, coords) in &shared {
        let mut parts = ordered_set_partitions(coords);
        if strict_only {
            parts.retain(|p| p.iter().all(|g| g.len() == 1));
        }
        let mut next = Vec::new();
        for prefix in &cells {
            for p in &parts {
                let mut chains: Vec<(usize, Vec<Vec<usize>>)> = prefix.clone();
                chains.push((*e, p.clone()));
                next.push(chains);
            }
        }
        cells = next;
    }
    cells
        .into_iter()
        .map(|chains| CellDescriptor::new(spots.clone(), chains))
        .collect()
}

/// Every cell of every dimension, each exactly once.
pub fn all_cells(g: &MetricGraph, n: usize) -> Vec<CellDescriptor> {
    assert!(n >= 1, "n must be at least 1");
    let v_count = g.node_count();
    let e_count = g.edge_count();
    let options = v_count + e_count;
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        let spots: Vec<Spot> = assignment
            .iter()
            .map(|&k| {
                if k < v_count {
                    Spot::Node(k)
                } else {
                    Spot::Edge(k - v_count)
                }
            })
            .collect();
        // per shared edge: all ordered partitions
        let mut by_edge: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, s) in spots.iter().enumerate() {
            if let Spot::Edge(e) = s {
                match by_edge.iter_mut().find(|(ee, _)| ee == e) {
                    Some((_, v)) => v.push(i),
                    None => by_edge.push((*e, vec![i])),
                }
            }
        }
        by_edge.sort_by_key(|(e, _)| *e);
        let shared: Vec<(usize, Vec<usize>)> = by_edge
            .into_iter()
            .filter(|(_, coords)| coords.len() >= 2)
            .collect();
        let mut chain_sets = vec![Vec::new()];
        for (e, coords) in &shared {
            let parts = ordered_set_partitions(coords);
            let mut next = Vec::new();
            for prefix in &chain_sets {
                for p in &parts {
                    let mut chains: Vec<(usize, Vec<Vec<usize>>)> = prefix.clone();
                    chains.push((*e, p.clone()));
                    next.push(chains);
                }
            }
            chain_sets = next;
        }
        for chains in chain_sets {
            out.push(CellDescriptor::new(spots.clone(), chains));
        }
        // advance
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < options {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Constraint labels of a cell system.
///
/// `Box` rows bound one variable by its edge; `Dist` rows bound a pair on
/// distinct edges through the four endpoint routes; `Order` rows order and
/// separate a pair sharing an edge; `Fixed` rows constrain a free
/// coordinate against a partner pinned to a node; `Point` rows are
/// variable-free conditions between two pinned (or coincident)
/// coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintLabel {
    /// `C^i_1` (lower, `-x_i <= 0`) or `C^i_2` (upper, `x_i <= L`).
    Box { coord: usize, upper: bool },
    /// `D^ij_k`, k in 1..=4.
    Dist { i: usize, j: usize, kind: u8 },
    /// `E^ij_k`, k in 1..=3, `(i, j)` in chain order.
    Order { i: usize, j: usize, kind: u8 },
    /// `F^ij_k`, k in 1..=2: route via the free edge's `a` (k=1) or `b`.
    Fixed { i: usize, j: usize, kind: u8 },
    /// `K^ij`: both coordinates pinned or coincident.
    Point { i: usize, j: usize },
}

impl ConstraintLabel {
    /// Sort key: box rows first by coordinate and subscript, then pair
    /// rows by pair and subscript.
    fn sort_key(&self) -> (u8, usize, usize, u8) {
        match *self {
            ConstraintLabel::Box { coord, upper } => (0, coord, 0, upper as u8),
            ConstraintLabel::Dist { i, j, kind } => (1, i.min(j), i.max(j), kind),
            ConstraintLabel::Order { i, j, kind } => (1, i.min(j), i.max(j), kind),
            ConstraintLabel::Fixed { i, j, kind } => (1, i.min(j), i.max(j), kind),
            ConstraintLabel::Point { i, j } => (1, i.min(j), i.max(j), 0),
        }
    }

    /// Defines the cell itself (eligible for pinning/merging when tight).
    pub fn is_cell_defining(&self) -> bool {
        matches!(
            self,
            ConstraintLabel::Box { .. } | ConstraintLabel::Order { kind: 1, .. }
        )
    }
}

impl PartialOrd for ConstraintLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConstraintLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl std::fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // 1-based coordinates, matching the usual indexing of points
        match *self {
            ConstraintLabel::Box { coord, upper } => {
                write!(f, "C^{}_{}", coord + 1, if upper { 2 } else { 1 })
            }
            ConstraintLabel::Dist { i, j, kind } => write!(f, "D^{}{}_{kind}", i + 1, j + 1),
            ConstraintLabel::Order { i, j, kind } => write!(f, "E^{}{}_{kind}", i + 1, j + 1),
            ConstraintLabel::Fixed { i, j, kind } => write!(f, "F^{}{}_{kind}", i + 1, j + 1),
            ConstraintLabel::Point { i, j } => write!(f, "K^{}{}", i + 1, j + 1),
        }
    }
}

/// A cell together with its canonical constraint system.
#[derive(Clone, Debug)]
pub struct CellSystem {
    pub cell: CellDescriptor,
    pub labels: Vec<ConstraintLabel>,
    pub polytope: ParametricPolytope,
    vars: Vec<VarInfo>,
}

impl CellSystem {
    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn label_index(&self, l: &ConstraintLabel) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    /// Label names for a subset, in canonical order.
    pub fn label_names(&self, set: &LabelSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].to_string()).collect()
    }
}

/// A cell system under construction.
#[derive(Default)]
struct SystemBuilder {
    labels: Vec<ConstraintLabel>,
    rows: Vec<Vec<i64>>,
    rhs: Vec<AffineRhs>,
}

impl SystemBuilder {
    fn push(&mut self, l: ConstraintLabel, row: Vec<i64>, b: AffineRhs) {
        self.labels.push(l);
        self.rows.push(row);
        self.rhs.push(b);
    }
}

fn unit_row(dim: usize, v: usize, sign: i64) -> Vec<i64> {
    let mut row = vec![0i64; dim];
    row[v] = sign;
    row
}

fn pair_row(dim: usize, v: usize, sv: i64, w: usize, sw: i64) -> Vec<i64> {
    let mut row = vec![0i64; dim];
    row[v] += sv;
    row[w] += sw;
    row
}

/// Builds the canonical system for any cell, including 0-dimensional ones
/// (whose systems consist solely of variable-free `Point` rows and whose
/// unique basic subset is empty).
pub fn cell_system(cell: &CellDescriptor, g: &MetricGraph, dist: &DistanceMatrix) -> CellSystem {
    let vars = cell.variables();
    let dim = vars.len();
    let n = cell.n();
    let var_of = |coord: usize| -> usize {
        vars.iter()
            .position(|v| v.coords.contains(&coord))
            .expect("edge coordinate has a variable")
    };

    let mut b = SystemBuilder::default();

    // box rows, one pair per variable
    for (v, info) in vars.iter().enumerate() {
        let rep = info.coords[0];
        let len = g.edge(info.edge).length.clone();
        b.push(
            ConstraintLabel::Box {
                coord: rep,
                upper: false,
            },
            unit_row(dim, v, -1),
            AffineRhs::constant(Rational::zero()),
        );
        b.push(
            ConstraintLabel::Box {
                coord: rep,
                upper: true,
            },
            unit_row(dim, v, 1),
            AffineRhs::constant(len),
        );
    }

    // pair rows
    for i in 0..n {
        for j in i + 1..n {
            let ridx = Restraints::pair_index(n, i, j);
            match (cell.spots[i], cell.spots[j]) {
                (Spot::Node(u), Spot::Node(w)) => {
                    b.push(
                        ConstraintLabel::Point { i, j },
                        vec![0; dim],
                        AffineRhs::with_pair(dist.get(u, w).clone(), ridx, -1),
                    );
                }
                (Spot::Node(u), Spot::Edge(_)) => {
                    push_fixed_rows(&mut b, g, dist, dim, (i, j), var_of(j), &vars, u, ridx);
                }
                (Spot::Edge(_), Spot::Node(u)) => {
                    push_fixed_rows(&mut b, g, dist, dim, (i, j), var_of(i), &vars, u, ridx);
                }
                (Spot::Edge(e1), Spot::Edge(e2)) => {
                    let v = var_of(i);
                    let w = var_of(j);
                    if v == w {
                        // coincident coordinates: the pair restraint must vanish
                        b.push(
                            ConstraintLabel::Point { i, j },
                            vec![0; dim],
                            AffineRhs::with_pair(Rational::zero(), ridx, -1),
                        );
                    } else if e1 == e2 {
                        let e = g.edge(e1);
                        let around = dist.get(e.a, e.b) + &e.length;
                        // chain order decides which coordinate is smaller
                        let (first, second, fv, sv) =
                            if cell.chain_position(i) < cell.chain_position(j) {
                                (i, j, v, w)
                            } else {
                                (j, i, w, v)
                            };
                        b.push(
                            ConstraintLabel::Order {
                                i: first,
                                j: second,
                                kind: 1,
                            },
                            pair_row(dim, fv, 1, sv, -1),
                            AffineRhs::constant(Rational::zero()),
                        );
                        b.push(
                            ConstraintLabel::Order {
                                i: first,
                                j: second,
                                kind: 2,
                            },
                            pair_row(dim, fv, 1, sv, -1),
                            AffineRhs::with_pair(Rational::zero(), ridx, -1),
                        );
                        b.push(
                            ConstraintLabel::Order {
                                i: first,
                                j: second,
                                kind: 3,
                            },
                            pair_row(dim, fv, -1, sv, 1),
                            AffineRhs::with_pair(around, ridx, -1),
                        );
                    } else {
                        let (ea, eb) = (g.edge(e1), g.edge(e2));
                        b.push(
                            ConstraintLabel::Dist { i, j, kind: 1 },
                            pair_row(dim, v, -1, w, -1),
                            AffineRhs::with_pair(dist.get(ea.a, eb.a).clone(), ridx, -1),
                        );
                        b.push(
                            ConstraintLabel::Dist { i, j, kind: 2 },
                            pair_row(dim, v, -1, w, 1),
                            AffineRhs::with_pair(dist.get(ea.a, eb.b) + &eb.length, ridx, -1),
                        );
                        b.push(
                            ConstraintLabel::Dist { i, j, kind: 3 },
                            pair_row(dim, v, 1, w, -1),
                            AffineRhs::with_pair(dist.get(ea.b, eb.a) + &ea.length, ridx, -1),
                        );
                        b.push(
                            ConstraintLabel::Dist { i, j, kind: 4 },
                            pair_row(dim, v, 1, w, 1),
                            AffineRhs::with_pair(
                                dist.get(ea.b, eb.b) + &ea.length + &eb.length,
                                ridx,
                                -1,
                            ),
                        );
                    }
                }
            }
        }
    }

    let names: Vec<String> = b.labels.iter().map(|l| l.to_string()).collect();
    let polytope = ParametricPolytope::new(dim, names, b.rows, b.rhs)
        .expect("cell systems are structurally valid");
    CellSystem {
        cell: cell.clone(),
        labels: b.labels,
        polytope,
        vars,
    }
}

/// The two routes from a free coordinate to a partner pinned at `node`:
/// leaving through the free edge's `a` endpoint or its `b` endpoint.
#[allow(clippy::too_many_arguments)]
fn push_fixed_rows(
    b: &mut SystemBuilder,
    g: &MetricGraph,
    dist: &DistanceMatrix,
    dim: usize,
    pair: (usize, usize),
    var: usize,
    vars: &[VarInfo],
    node: usize,
    ridx: usize,
) {
    let (i, j) = pair;
    let e = g.edge(vars[var].edge);
    b.push(
        ConstraintLabel::Fixed { i, j, kind: 1 },
        unit_row(dim, var, -1),
        AffineRhs::with_pair(dist.get(e.a, node).clone(), ridx, -1),
    );
    b.push(
        ConstraintLabel::Fixed { i, j, kind: 2 },
        unit_row(dim, var, 1),
        AffineRhs::with_pair(dist.get(e.b, node) + &e.length, ridx, -1),
    );
}

/// Public constructor for a cell's inequality system.
///
/// Zero-dimensional cells carry no system; their membership at a given
/// restraint vector is a direct distance check (the complex and sweep
/// machinery evaluate them through their variable-free `Point` rows).
pub fn inequality_system(
    cell: &CellDescriptor,
    g: &MetricGraph,
    dist: &DistanceMatrix,
) -> Result<CellSystem, CellError> {
    if cell.dim() == 0 {
        return Err(CellError::ZeroDimensionalCell);
    }
    Ok(cell_system(cell, g, dist))
}

/// Image of one parent variable inside a face.
#[derive(Clone, Debug, PartialEq, Eq)]
enum VarImage {
    Pinned(Rational),
    Var(usize),
}

/// Computes where each variable of `c` lands in the face `d`, validating
/// that `d` really is a face of `c`.
fn face_substitution(
    c: &CellDescriptor,
    d: &CellDescriptor,
    g: &MetricGraph,
) -> Result<Vec<VarImage>, CellError> {
    if c.n() != d.n() {
        return Err(CellError::NotAFace);
    }
    let cvars = c.variables();
    let dvars = d.variables();
    let dvar_of =
        |coord: usize| -> Option<usize> { dvars.iter().position(|v| v.coords.contains(&coord)) };

    // per-coordinate compatibility
    for i in 0..c.n() {
        match (c.spots()[i], d.spots()[i]) {
            (Spot::Node(u), Spot::Node(w)) if u == w => {}
            (Spot::Edge(e), Spot::Node(w)) => {
                let edge = g.edge(e);
                if edge.a != w && edge.b != w {
                    return Err(CellError::NotAFace);
                }
            }
            (Spot::Edge(e), Spot::Edge(f)) if e == f => {}
            _ => return Err(CellError::NotAFace),
        }
    }

    let mut images: Vec<Option<VarImage>> = vec![None; cvars.len()];
    for (ci, cv) in cvars.iter().enumerate() {
        let edge = g.edge(cv.edge);
        // all coordinates of a parent group must land together
        let mut target: Option<VarImage> = None;
        for &coord in &cv.coords {
            let img = match d.spots()[coord] {
                Spot::Node(w) => {
                    if w == edge.a {
                        VarImage::Pinned(Rational::zero())
                    } else {
                        VarImage::Pinned(edge.length.clone())
                    }
                }
                Spot::Edge(_) => {
                    VarImage::Var(dvar_of(coord).expect("edge coordinate of d has a variable"))
                }
            };
            match &target {
                None => target = Some(img),
                Some(t) if *t == img => {}
                Some(_) => return Err(CellError::NotAFace),
            }
        }
        images[ci] = target;
    }
    let images: Vec<VarImage> = images.into_iter().map(|x| x.expect("assigned")).collect();

    // chain coherence per edge: pinned-at-a prefix, d's groups in order
    // (merges of consecutive parent groups), pinned-at-b suffix
    for (e, groups) in &c.chains {
        let mut stage = 0; // 0 = prefix at a, 1 = free, 2 = suffix at b
        let mut last_var: Option<usize> = None;
        let mut seen_vars: Vec<usize> = Vec::new();
        for group in groups {
            let ci = cvars
                .iter()
                .position(|v| v.edge == *e && v.coords == *group)
                .expect("group is a parent variable");
            match &images[ci] {
                VarImage::Pinned(val) if val.is_zero() => {
                    if stage > 0 {
                        return Err(CellError::NotAFace);
                    }
                }
                VarImage::Pinned(_) => {
                    stage = 2;
                }
                VarImage::Var(dv) => {
                    if stage == 2 {
                        return Err(CellError::NotAFace);
                    }
                    stage = 1;
                    if last_var != Some(*dv) {
                        // a new d-group must be the next one in d's chain
                        if seen_vars.contains(dv) {
                            return Err(CellError::NotAFace);
                        }
                        seen_vars.push(*dv);
                        last_var = Some(*dv);
                    }
                }
            }
        }
        // d's chain for e must appear exactly in the seen order
        if let Some(dgroups) = d.chain_of(*e) {
            let dorder: Vec<usize> = dgroups
                .iter()
                .map(|gp| {
                    dvars
                        .iter()
                        .position(|v| v.edge == *e && v.coords == *gp)
                        .expect("d chain group is a d variable")
                })
                .collect();
            if seen_vars != dorder {
                return Err(CellError::NotAFace);
            }
        } else {
            // at most one free d-variable on this edge
            if seen_vars.len() > 1 {
                return Err(CellError::NotAFace);
            }
        }
    }
    Ok(images)
}

/// Substitutes the images into row `idx` of `c`'s system, producing a row
/// over `d`'s variables and the adjusted right hand side.
fn substitute_row(
    c_sys: &CellSystem,
    idx: usize,
    images: &[VarImage],
    d_dim: usize,
) -> (Vec<i64>, AffineRhs) {
    let row = c_sys.polytope.row(idx);
    let mut out = vec![0i64; d_dim];
    let mut rhs = c_sys.polytope.rhs(idx).clone();
    for (v, &coeff) in row.iter().enumerate() {
        if coeff == 0 {
            continue;
        }
        match &images[v] {
            VarImage::Var(dv) => out[*dv] += coeff,
            VarImage::Pinned(val) => {
                rhs.constant -= rat_int(coeff) * val;
            }
        }
    }
    (out, rhs)
}

/// The injection from a face system's labels into a parent system's
/// labels: each canonical row of `d` matches a substituted row of `c`
/// exactly; ties prefer the identical label, then canonical order.
pub fn face_label_map(
    d_sys: &CellSystem,
    c_sys: &CellSystem,
    g: &MetricGraph,
) -> Result<Vec<usize>, CellError> {
    let images = face_substitution(&c_sys.cell, &d_sys.cell, g)?;
    let d_dim = d_sys.polytope.dim();
    let subs: Vec<(Vec<i64>, AffineRhs)> = (0..c_sys.labels.len())
        .map(|i| substitute_row(c_sys, i, &images, d_dim))
        .collect();

    let mut used = vec![false; c_sys.labels.len()];
    let mut map = Vec::with_capacity(d_sys.labels.len());
    for (di, dl) in d_sys.labels.iter().enumerate() {
        let target = (
            d_sys.polytope.row(di).to_vec(),
            d_sys.polytope.rhs(di).clone(),
        );
        let matches = |ci: usize| subs[ci].0 == target.0 && subs[ci].1 == target.1;
        // prefer the same label, then the first unused exact match
        let chosen = c_sys
            .labels
            .iter()
            .position(|cl| cl == dl)
            .filter(|&ci| !used[ci] && matches(ci))
            .or_else(|| (0..c_sys.labels.len()).find(|&ci| !used[ci] && matches(ci)));
        match chosen {
            Some(ci) => {
                used[ci] = true;
                map.push(ci);
            }
            None => {
                return Err(CellError::Internal(format!(
                    "face row {dl} has no matching parent row"
                )))
            }
        }
    }
    Ok(map)
}

/// A face of a cell system in canonical form: the minimal cell containing
/// it plus the surviving tight restraint rows of that cell's own system.
#[derive(Clone, Debug)]
pub struct CanonicalFace {
    pub system: CellSystem,
    pub rho: LabelSet,
}

/// Canonical key of a face: the cell token string plus sorted tight
/// labels. Two faces of different parents that coincide in the complex
/// canonicalize to equal keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub cell: String,
    pub rho: Vec<String>,
}

impl CellKey {
    pub fn render(&self) -> String {
        format!("{}|{}", self.cell, self.rho.join(","))
    }
}

impl CanonicalFace {
    pub fn key(&self) -> CellKey {
        let mut rho: Vec<String> = self
            .rho
            .iter()
            .map(|i| self.system.labels[i].to_string())
            .collect();
        rho.sort();
        CellKey {
            cell: self.system.cell.canonical_string(),
            rho,
        }
    }
}

/// Rewrites a coherent tight set `sigma` of `c`'s system as a face in
/// canonical form: tight cell-defining labels become pins and merges that
/// produce the minimal cell `d` containing the face, and the remaining
/// tight rows are mapped into `d`'s canonical system (rows eliminated as
/// redundant there are dropped; their dominator is also tight).
pub fn canonicalize_face(
    c_sys: &CellSystem,
    sigma: &LabelSet,
    g: &MetricGraph,
    dist: &DistanceMatrix,
) -> Result<CanonicalFace, CellError> {
    let c = &c_sys.cell;
    let cvars = c_sys.vars();
    let n = c.n();

    // split sigma into cell-defining part and restraint part
    let mut tau: Vec<ConstraintLabel> = Vec::new();
    let mut rest: Vec<usize> = Vec::new();
    for i in sigma.iter() {
        let l = c_sys.labels[i];
        if l.is_cell_defining() {
            tau.push(l);
        } else {
            rest.push(i);
        }
    }

    // union-find over parent variables, seeded by tight order rows
    let mut parent: Vec<usize> = (0..cvars.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let var_of = |coord: usize| -> usize {
        cvars
            .iter()
            .position(|v| v.coords.contains(&coord))
            .expect("coordinate has a variable")
    };
    for l in &tau {
        if let ConstraintLabel::Order { i, j, kind: 1 } = l {
            let (a, b) = (find(&mut parent, var_of(*i)), find(&mut parent, var_of(*j)));
            parent[a] = b;
        }
    }

    // pins from tight box rows, propagated to merged groups
    #[derive(Clone, PartialEq)]
    enum Pin {
        Free,
        AtA,
        AtB,
    }
    let mut pins: Vec<Pin> = vec![Pin::Free; cvars.len()];
    for l in &tau {
        if let ConstraintLabel::Box { coord, upper } = l {
            let root = find(&mut parent, var_of(*coord));
            let want = if *upper { Pin::AtB } else { Pin::AtA };
            if pins[root] != Pin::Free && pins[root] != want {
                return Err(CellError::IncoherentFace(
                    "variable pinned to both endpoints".into(),
                ));
            }
            pins[root] = want;
        }
    }

    // merged groups must be chain intervals, pins must respect chain order
    for (e, groups) in &c.chains {
        let roots: Vec<usize> = groups
            .iter()
            .map(|gp| {
                let v = cvars
                    .iter()
                    .position(|cv| cv.edge == *e && cv.coords == *gp)
                    .expect("chain group is a variable");
                find(&mut parent, v)
            })
            .collect();
        // same root must be consecutive
        for (k, r) in roots.iter().enumerate() {
            if roots[..k].contains(r) && roots[k - 1] != *r {
                return Err(CellError::IncoherentFace(
                    "merged groups are not consecutive in the chain".into(),
                ));
            }
        }
        // pins: a-prefix then free then b-suffix
        let mut stage = 0;
        for r in &roots {
            match pins[*r] {
                Pin::AtA => {
                    if stage > 0 {
                        return Err(CellError::IncoherentFace(
                            "pin to the lower endpoint after a free group".into(),
                        ));
                    }
                }
                Pin::Free => stage = stage.max(1),
                Pin::AtB => stage = 2,
            }
            if pins[*r] == Pin::Free && stage == 2 {
                return Err(CellError::IncoherentFace(
                    "free group after a pin to the upper endpoint".into(),
                ));
            }
        }
    }

    // assemble the face descriptor
    let mut spots: Vec<Spot> = c.spots().to_vec();
    for (vi, cv) in cvars.iter().enumerate() {
        let root = find(&mut parent, vi);
        let edge = g.edge(cv.edge);
        match pins[root] {
            Pin::AtA => {
                for &coord in &cv.coords {
                    spots[coord] = Spot::Node(edge.a);
                }
            }
            Pin::AtB => {
                for &coord in &cv.coords {
                    spots[coord] = Spot::Node(edge.b);
                }
            }
            Pin::Free => {}
        }
    }
    let mut chains: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    // rebuild chains over surviving edge coordinates
    let mut edges_used: Vec<usize> = spots
        .iter()
        .filter_map(|s| match s {
            Spot::Edge(e) => Some(*e),
            _ => None,
        })
        .collect();
    edges_used.sort_unstable();
    edges_used.dedup();
    for e in edges_used {
        let coords: Vec<usize> = (0..n).filter(|&i| spots[i] == Spot::Edge(e)).collect();
        if coords.len() < 2 {
            continue;
        }
        // order groups along the parent chain, merging by union-find root
        let order: Vec<usize> = match c.chain_of(e) {
            Some(groups) => groups
                .iter()
                .map(|gp| {
                    let v = cvars
                        .iter()
                        .position(|cv| cv.edge == e && cv.coords == *gp)
                        .expect("chain group is a variable");
                    find(&mut parent, v)
                })
                .collect(),
            None => vec![find(&mut parent, var_of(coords[0]))],
        };
        let mut dgroups: Vec<Vec<usize>> = Vec::new();
        let mut seen_root: Vec<usize> = Vec::new();
        for root in order {
            if pins[root] != Pin::Free {
                continue;
            }
            if !seen_root.contains(&root) {
                seen_root.push(root);
                // all free coords whose variable maps to this root
                let members: Vec<usize> = coords
                    .iter()
                    .copied()
                    .filter(|&cd| find(&mut parent, var_of(cd)) == root)
                    .collect();
                dgroups.push(members);
            }
        }
        chains.push((e, dgroups));
    }
    let d = CellDescriptor::new(spots, chains);
    let d_sys = cell_system(&d, g, dist);

    // map the remaining tight rows into d's canonical system
    let images = face_substitution(c, &d, g)?;
    let d_dim = d_sys.polytope.dim();
    let mut rho = LabelSet::EMPTY;
    for ci in rest {
        let (row, rhs) = substitute_row(c_sys, ci, &images, d_dim);
        let found = (0..d_sys.labels.len())
            .find(|&di| d_sys.polytope.row(di) == row.as_slice() && *d_sys.polytope.rhs(di) == rhs);
        match found {
            Some(di) => rho.insert(di),
            None => {
                // the substituted row must be dominated by a canonical row
                // with the same left hand side
                let dominated = (0..d_sys.labels.len()).any(|di| {
                    d_sys.polytope.row(di) == row.as_slice()
                        && d_sys.polytope.rhs(di).dominates(&rhs)
                });
                if !dominated {
                    return Err(CellError::Internal(format!(
                        "tight row {} neither matches nor is dominated in the face system",
                        c_sys.labels[ci]
                    )));
                }
            }
        }
    }
    Ok(CanonicalFace { system: d_sys, rho })
}


#[cfg(test)]
mod parallel_edge_tests {
    use super::*;
    use crate::rational::rat_int;

    #[test]
    fn distance_rows_use_node_distances_not_edge_lengths() {
        let g = MetricGraph::parse("a b 1\na b 3\n").unwrap();
        let dist = g.distances();
        // cell: first point on the short edge, second on the long one;
        // both edges share both endpoints
        let c = CellDescriptor::new(vec![Spot::Edge(0), Spot::Edge(1)], vec![]);
        let sys = cell_system(&c, &g, &dist);
        let rhs_const = |label: ConstraintLabel| {
            sys.polytope
                .rhs(sys.label_index(&label).unwrap())
                .constant
                .clone()
        };
        // same endpoints: the four route constants collapse to
        // delta(a,a) = 0, delta(a,b) + L's with delta(a,b) = 1
        assert_eq!(rhs_const(ConstraintLabel::Dist { i: 0, j: 1, kind: 1 }), rat_int(0));
        assert_eq!(rhs_const(ConstraintLabel::Dist { i: 0, j: 1, kind: 2 }), rat_int(4));
        assert_eq!(rhs_const(ConstraintLabel::Dist { i: 0, j: 1, kind: 3 }), rat_int(2));
        assert_eq!(rhs_const(ConstraintLabel::Dist { i: 0, j: 1, kind: 4 }), rat_int(4));
        // the long edge's own order cell sees the shortcut in its
        // around-route row: delta + L = 1 + 3
        let cc = CellDescriptor::new(
            vec![Spot::Edge(1), Spot::Edge(1)],
            vec![(1, vec![vec![0], vec![1]])],
        );
        let sys2 = cell_system(&cc, &g, &dist);
        assert_eq!(
            sys2.polytope
                .rhs(sys2
                    .label_index(&ConstraintLabel::Order { i: 0, j: 1, kind: 3 })
                    .unwrap())
                .constant,
            rat_int(4)
        );
    }
}
