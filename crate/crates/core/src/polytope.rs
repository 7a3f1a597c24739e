//! Parametric polytopes and their combinatorial types.
//!
//! A system `A x <= b(r)` has a fixed small-integer matrix `A` and right
//! hand sides that are affine in the restraint vector `r`. Vertices are
//! tracked combinatorially: a basic subset of rows pins a potential vertex,
//! the full set of rows tight there is its abstract vertex, and the set of
//! abstract vertices of actual vertices is the type of the polytope at `r`.
//! Two parameter values with equal types on every cell yield the same face
//! poset, which is what the sweep machinery compares.

use crate::linalg::{combinations, rank, solve_square};
use crate::rational::{rat_int, Rational};
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("bad system: {0}")]
    BadSystem(String),
    #[error("subset is not basic")]
    NotBasic,
    #[error("system is unbounded for some right hand side")]
    Unbounded,
    #[error("empty type has no face poset")]
    EmptyType,
    #[error("restraint components must be nonnegative")]
    NegativeRestraint,
}

/// A subset of the constraint index set, as a bitmask over row indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelSet(u128);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);
    pub const MAX_LABELS: usize = 128;

    pub fn from_indices(ix: &[usize]) -> Self {
        let mut s = LabelSet(0);
        for &i in ix {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < Self::MAX_LABELS);
        self.0 |= 1u128 << i;
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn intersect(&self, other: &Self) -> Self {
        LabelSet(self.0 & other.0)
    }

    pub fn union(&self, other: &Self) -> Self {
        LabelSet(self.0 | other.0)
    }

    pub fn minus(&self, other: &Self) -> Self {
        LabelSet(self.0 & !other.0)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..Self::MAX_LABELS).filter(|&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Restraint vector: one nonnegative rational per coordinate pair, in
/// lexicographic pair order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restraints {
    values: Vec<Rational>,
}

impl Restraints {
    pub fn new(values: Vec<Rational>) -> Result<Self, PolytopeError> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(PolytopeError::NegativeRestraint);
        }
        Ok(Restraints { values })
    }

    pub fn zero(pairs: usize) -> Self {
        Restraints {
            values: vec![Rational::zero(); pairs],
        }
    }

    /// All pairs set to the same scalar `t`.
    pub fn scalar(n: usize, t: Rational) -> Result<Self, PolytopeError> {
        Self::new(vec![t; Self::pair_count(n)])
    }

    pub fn pair_count(n: usize) -> usize {
        n * (n.saturating_sub(1)) / 2
    }

    /// Lexicographic index of the pair `{i, j}` among pairs from `0..n`.
    pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(j < n);
        // pairs (0,1),(0,2),...,(0,n-1),(1,2),...
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, idx: usize) -> &Rational {
        &self.values[idx]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// A right hand side that is affine in the restraint vector: a constant
/// plus integer multiples of restraint components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRhs {
    pub constant: Rational,
    /// `(restraint component index, coefficient)`, sorted by index.
    pub coeffs: Vec<(usize, i64)>,
}

impl AffineRhs {
    pub fn constant(c: Rational) -> Self {
        AffineRhs {
            constant: c,
            coeffs: Vec::new(),
        }
    }

    pub fn with_pair(c: Rational, pair_idx: usize, coeff: i64) -> Self {
        AffineRhs {
            constant: c,
            coeffs: vec![(pair_idx, coeff)],
        }
    }

    pub fn eval(&self, r: &Restraints) -> Rational {
        let mut acc = self.constant.clone();
        for (idx, c) in &self.coeffs {
            acc += r.get(*idx) * rat_int(*c);
        }
        acc
    }

    /// Substitutes `r = base + t * dir`, returning `(constant, slope)` in `t`.
    pub fn on_ray(&self, base: &Restraints, dir: &[Rational]) -> (Rational, Rational) {
        let mut konst = self.constant.clone();
        let mut slope = Rational::zero();
        for (idx, c) in &self.coeffs {
            let c = rat_int(*c);
            konst += base.get(*idx) * &c;
            slope += &dir[*idx] * &c;
        }
        (konst, slope)
    }

    /// True if `self(r) <= other(r)` for every `r` in the nonnegative
    /// orthant: constants compare and coefficients compare componentwise.
    pub fn dominates(&self, other: &AffineRhs) -> bool {
        if self.constant > other.constant {
            return false;
        }
        let coeff = |rhs: &AffineRhs, idx: usize| -> i64 {
            rhs.coeffs
                .iter()
                .find(|(i, _)| *i == idx)
                .map_or(0, |(_, c)| *c)
        };
        let mut idxs: Vec<usize> = self.coeffs.iter().map(|(i, _)| *i).collect();
        idxs.extend(other.coeffs.iter().map(|(i, _)| *i));
        idxs.sort_unstable();
        idxs.dedup();
        idxs.into_iter().all(|i| coeff(self, i) <= coeff(other, i))
    }
}

/// The combinatorial fingerprint of the polytope at one parameter value:
/// the set of abstract vertices. Empty encodes the empty polytope.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PolytopeType {
    vertices: BTreeSet<LabelSet>,
}

impl PolytopeType {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &LabelSet> {
        self.vertices.iter()
    }

    pub fn contains(&self, v: &LabelSet) -> bool {
        self.vertices.contains(v)
    }

    /// Canonical serialization: a sorted array of sorted label-name arrays.
    pub fn to_canonical_json(&self, labels: &[String]) -> serde_json::Value {
        let mut arr: Vec<Vec<String>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|i| labels[i].clone()).collect())
            .collect();
        arr.sort();
        serde_json::json!(arr)
    }

    /// Compact index-based rendering, stable for a fixed label order.
    pub fn index_fingerprint(&self) -> String {
        let mut out = String::from("[");
        for (k, v) in self.vertices.iter().enumerate() {
            if k > 0 {
                out.push(';');
            }
            let ix = v.indices();
            out.push_str(
                &ix.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        out.push(']');
        out
    }
}

/// Set equality of abstract-vertex sets; both types must come from the
/// same constraint index set for the comparison to be meaningful.
pub fn types_equal(a: &PolytopeType, b: &PolytopeType) -> bool {
    a == b
}

/// One face of the face poset: the set of constraints tight on it and its
/// dimension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceEntry {
    pub index_set: LabelSet,
    pub dim: usize,
}

/// The face poset of a polytope, graded by dimension and ordered by
/// reverse inclusion of tight-constraint sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePoset {
    /// Sorted by `(dim, index_set)`.
    faces: Vec<FaceEntry>,
}

impl FacePoset {
    pub fn from_entries(mut faces: Vec<FaceEntry>) -> Self {
        faces.sort();
        faces.dedup();
        FacePoset { faces }
    }

    pub fn faces(&self) -> &[FaceEntry] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Cells per dimension `0..=max_dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        let Some(maxd) = self.faces.iter().map(|f| f.dim).max() else {
            return Vec::new();
        };
        let mut f = vec![0usize; maxd + 1];
        for e in &self.faces {
            f[e.dim] += 1;
        }
        f
    }

    /// Graded-poset equality preserving index sets: same faces, same dims.
    /// The order relation is reverse inclusion of the sets, so equality of
    /// the labelled element lists is equality of the posets.
    pub fn eq_labeled(&self, other: &FacePoset) -> bool {
        self.faces == other.faces
    }

    /// Covering pairs `(face, coface)` with `dim(coface) = dim(face) + 1`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            for (j, g) in self.faces.iter().enumerate() {
                if g.dim == f.dim + 1 && g.index_set.is_subset_of(&f.index_set) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A parametric polytope `{x : A x <= b(r)}` with rows over labels.
#[derive(Debug)]
pub struct ParametricPolytope {
    dim: usize,
    labels: Vec<String>,
    rows: Vec<Vec<i64>>,
    rhs: Vec<AffineRhs>,
    basics: OnceLock<Vec<LabelSet>>,
    bounded: OnceLock<bool>,
}

impl Clone for ParametricPolytope {
    fn clone(&self) -> Self {
        ParametricPolytope {
            dim: self.dim,
            labels: self.labels.clone(),
            rows: self.rows.clone(),
            rhs: self.rhs.clone(),
            basics: OnceLock::new(),
            bounded: OnceLock::new(),
        }
    }
}

impl ParametricPolytope {
    /// Validates structure: label uniqueness, row shape, entries in
    /// `{-1, 0, 1}` with at most two nonzero entries per row.
    ///
    /// Boundedness is checked lazily by the operations that require it.
    pub fn new(
        dim: usize,
        labels: Vec<String>,
        rows: Vec<Vec<i64>>,
        rhs: Vec<AffineRhs>,
    ) -> Result<Self, PolytopeError> {
        if labels.len() != rows.len() || rows.len() != rhs.len() {
            return Err(PolytopeError::BadSystem(
                "labels, rows and rhs must have equal length".into(),
            ));
        }
        if labels.len() > LabelSet::MAX_LABELS {
            return Err(PolytopeError::BadSystem(format!(
                "at most {} constraints supported",
                LabelSet::MAX_LABELS
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(PolytopeError::BadSystem(format!("duplicate label {l}")));
            }
        }
        for row in &rows {
            if row.len() != dim {
                return Err(PolytopeError::BadSystem("row has wrong dimension".into()));
            }
            if row.iter().any(|&v| !(-1..=1).contains(&v)) {
                return Err(PolytopeError::BadSystem(
                    "row entries must be -1, 0 or 1".into(),
                ));
            }
            if row.iter().filter(|&&v| v != 0).count() > 2 {
                return Err(PolytopeError::BadSystem(
                    "rows have at most two nonzero entries".into(),
                ));
            }
        }
        Ok(ParametricPolytope {
            dim,
            labels,
            rows,
            rhs,
            basics: OnceLock::new(),
            bounded: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_names(&self, set: &LabelSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn rhs(&self, i: usize) -> &AffineRhs {
        &self.rhs[i]
    }

    /// Numeric right hand sides at a fixed restraint vector.
    pub fn rhs_at(&self, r: &Restraints) -> Vec<Rational> {
        self.rhs.iter().map(|b| b.eval(r)).collect()
    }

    /// Right hand sides along `r = base + t * dir` as `(constant, slope)`.
    pub fn rhs_on_ray(&self, base: &Restraints, dir: &[Rational]) -> Vec<(Rational, Rational)> {
        self.rhs.iter().map(|b| b.on_ray(base, dir)).collect()
    }

    /// True when `{x : A x <= b}` is bounded for every `b`; this depends
    /// only on the rows. A full box of single-variable rows is the fast
    /// path; otherwise the recession cone is checked exactly.
    pub fn is_bounded(&self) -> bool {
        *self.bounded.get_or_init(|| {
            if self.dim == 0 {
                return true;
            }
            if self.has_full_box() {
                return true;
            }
            !self.recession_cone_nontrivial()
        })
    }

    fn has_full_box(&self) -> bool {
        (0..self.dim).all(|i| {
            let mut lower = false;
            let mut upper = false;
            for row in &self.rows {
                if row.iter().enumerate().all(|(k, &v)| (k == i) != (v == 0)) {
                    match row[i] {
                        1 => upper = true,
                        -1 => lower = true,
                        _ => {}
                    }
                }
            }
            lower && upper
        })
    }

    /// Exact check whether `{x : A x <= 0}` contains a nonzero point:
    /// intersect the cone with the unit box and look for a nonzero vertex.
    fn recession_cone_nontrivial(&self) -> bool {
        let mut rows: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| rat_int(v)).collect())
            .collect();
        let mut rhs: Vec<Rational> = vec![Rational::zero(); rows.len()];
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                let mut row = vec![Rational::zero(); self.dim];
                row[i] = rat_int(sign);
                rows.push(row);
                rhs.push(rat_int(1));
            }
        }
        let m = rows.len();
        for combo in combinations(m, self.dim) {
            let mat: Vec<Vec<Rational>> = combo.iter().map(|&i| rows[i].clone()).collect();
            let b: Vec<Rational> = combo.iter().map(|&i| rhs[i].clone()).collect();
            let Some(x) = solve_square(&mat, &b) else {
                continue;
            };
            if x.iter().all(|v| v.is_zero()) {
                continue;
            }
            let feasible = rows.iter().zip(&rhs).all(|(row, b)| dot(row, &x) <= *b);
            if feasible {
                return true;
            }
        }
        false
    }

    /// All basic subsets: `dim`-element label sets whose rows are linearly
    /// independent, in lexicographic index order. For a 0-dimensional
    /// system the unique basic subset is empty.
    pub fn basic_subsets(&self) -> &[LabelSet] {
        self.basics.get_or_init(|| {
            let nonzero: Vec<usize> = (0..self.rows.len())
                .filter(|&i| self.rows[i].iter().any(|&v| v != 0))
                .collect();
            let mut out = Vec::new();
            if self.dim == 0 {
                out.push(LabelSet::EMPTY);
                return out;
            }
            for combo in combinations(nonzero.len(), self.dim) {
                let idx: Vec<usize> = combo.iter().map(|&k| nonzero[k]).collect();
                let rows: Vec<Vec<Rational>> = idx
                    .iter()
                    .map(|&i| self.rows[i].iter().map(|&v| rat_int(v)).collect())
                    .collect();
                if rank(&rows) == self.dim {
                    out.push(LabelSet::from_indices(&idx));
                }
            }
            out
        })
    }

    fn beta_matrix(&self, beta: &LabelSet) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let idx = beta.indices();
        let mat = idx
            .iter()
            .map(|&i| self.rows[i].iter().map(|&v| rat_int(v)).collect())
            .collect();
        (mat, idx)
    }

    /// The unique solution of the equalities indexed by a basic subset.
    pub fn potential_vertex(
        &self,
        beta: &LabelSet,
        r: &Restraints,
    ) -> Result<Vec<Rational>, PolytopeError> {
        if beta.len() != self.dim {
            return Err(PolytopeError::NotBasic);
        }
        let (mat, idx) = self.beta_matrix(beta);
        let rhs: Vec<Rational> = idx.iter().map(|&i| self.rhs[i].eval(r)).collect();
        solve_square(&mat, &rhs).ok_or(PolytopeError::NotBasic)
    }

    /// All labels tight at the potential vertex of `beta`.
    pub fn abstract_vertex(
        &self,
        beta: &LabelSet,
        r: &Restraints,
    ) -> Result<LabelSet, PolytopeError> {
        let x = self.potential_vertex(beta, r)?;
        let rhs = self.rhs_at(r);
        Ok(self.tight_set(&x, &rhs))
    }

    fn tight_set(&self, x: &[Rational], rhs: &[Rational]) -> LabelSet {
        let mut s = LabelSet::EMPTY;
        for (i, row) in self.rows.iter().enumerate() {
            if dot_int(row, x) == rhs[i] {
                s.insert(i);
            }
        }
        s
    }

    fn is_feasible(&self, x: &[Rational], rhs: &[Rational]) -> bool {
        self.rows
            .iter()
            .zip(rhs)
            .all(|(row, b)| dot_int(row, x) <= *b)
    }

    /// The type at `r`: abstract vertices over all basic subsets whose
    /// potential vertex satisfies every inequality. Empty iff the polytope
    /// is empty.
    pub fn polytope_type(&self, r: &Restraints) -> Result<PolytopeType, PolytopeError> {
        if !self.is_bounded() {
            return Err(PolytopeError::Unbounded);
        }
        let rhs = self.rhs_at(r);
        let mut vertices = BTreeSet::new();
        if self.dim == 0 {
            // the empty basic subset pins the empty point
            let x: Vec<Rational> = Vec::new();
            if self.is_feasible(&x, &rhs) {
                vertices.insert(self.tight_set(&x, &rhs));
            }
            return Ok(PolytopeType { vertices });
        }
        for beta in self.basic_subsets() {
            let (mat, idx) = self.beta_matrix(beta);
            let b: Vec<Rational> = idx.iter().map(|&i| rhs[i].clone()).collect();
            let Some(x) = solve_square(&mat, &b) else {
                continue;
            };
            if self.is_feasible(&x, &rhs) {
                vertices.insert(self.tight_set(&x, &rhs));
            }
        }
        Ok(PolytopeType { vertices })
    }

    /// The intersection semilattice of the type, graded by face dimension
    /// (`dim` minus the rank of the face's tight rows), ordered by reverse
    /// inclusion.
    pub fn face_poset(&self, t: &PolytopeType) -> Result<FacePoset, PolytopeError> {
        if t.is_empty() {
            return Err(PolytopeError::EmptyType);
        }
        let mut sets: BTreeSet<LabelSet> = t.vertices.clone();
        // close under pairwise intersection
        loop {
            let mut added = false;
            let cur: Vec<LabelSet> = sets.iter().cloned().collect();
            for i in 0..cur.len() {
                for j in i + 1..cur.len() {
                    let s = cur[i].intersect(&cur[j]);
                    if sets.insert(s) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let faces = sets
            .into_iter()
            .map(|s| FaceEntry {
                dim: self.dim - self.rank_of(&s),
                index_set: s,
            })
            .collect();
        Ok(FacePoset::from_entries(faces))
    }

    /// Rank of the rows indexed by `set`.
    pub fn rank_of(&self, set: &LabelSet) -> usize {
        let rows: Vec<Vec<Rational>> = set
            .iter()
            .map(|i| self.rows[i].iter().map(|&v| rat_int(v)).collect())
            .collect();
        rank(&rows)
    }
}

fn dot(row: &[Rational], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (a, v) in row.iter().zip(x) {
        if !a.is_zero() {
            acc += a * v;
        }
    }
    acc
}

fn dot_int(row: &[i64], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (&a, v) in row.iter().zip(x) {
        match a {
            0 => {}
            1 => acc += v,
            -1 => acc -= v,
            _ => acc += rat_int(a) * v,
        }
    }
    acc
}

#[cfg(test)]
pub(crate) use tests::{distinct_edge_system, same_edge_system};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    /// The order cell over one edge (`x <= y` on an edge of length `len`
    /// whose endpoints are `delta` apart in the graph): all seven rows.
    pub(crate) fn same_edge_system(len: Rational, delta: Rational) -> ParametricPolytope {
        let labels = vec![
            "C^1_1".into(),
            "C^1_2".into(),
            "C^2_1".into(),
            "C^2_2".into(),
            "E^12_1".into(),
            "E^12_2".into(),
            "E^12_3".into(),
        ];
        let rows = vec![
            vec![-1, 0],
            vec![1, 0],
            vec![0, -1],
            vec![0, 1],
            vec![1, -1],
            vec![1, -1],
            vec![-1, 1],
        ];
        let rhs = vec![
            AffineRhs::constant(rat_int(0)),
            AffineRhs::constant(len.clone()),
            AffineRhs::constant(rat_int(0)),
            AffineRhs::constant(len.clone()),
            AffineRhs::constant(rat_int(0)),
            AffineRhs::with_pair(rat_int(0), 0, -1),
            AffineRhs::with_pair(&delta + &len, 0, -1),
        ];
        ParametricPolytope::new(2, labels, rows, rhs).unwrap()
    }

    /// A cell over two distinct edges with generic endpoint distances.
    pub(crate) fn distinct_edge_system(
        l1: Rational,
        l2: Rational,
        daa: Rational,
        dab: Rational,
        dba: Rational,
        dbb: Rational,
    ) -> ParametricPolytope {
        let labels = vec![
            "C^1_1".into(),
            "C^1_2".into(),
            "C^2_1".into(),
            "C^2_2".into(),
            "D^12_1".into(),
            "D^12_2".into(),
            "D^12_3".into(),
            "D^12_4".into(),
        ];
        let rows = vec![
            vec![-1, 0],
            vec![1, 0],
            vec![0, -1],
            vec![0, 1],
            vec![-1, -1],
            vec![-1, 1],
            vec![1, -1],
            vec![1, 1],
        ];
        let rhs = vec![
            AffineRhs::constant(rat_int(0)),
            AffineRhs::constant(l1.clone()),
            AffineRhs::constant(rat_int(0)),
            AffineRhs::constant(l2.clone()),
            AffineRhs::with_pair(daa, 0, -1),
            AffineRhs::with_pair(&dab + &l2, 0, -1),
            AffineRhs::with_pair(&dba + &l1, 0, -1),
            AffineRhs::with_pair(&dbb + &l1 + &l2, 0, -1),
        ];
        ParametricPolytope::new(2, labels, rows, rhs).unwrap()
    }

    fn scalar1(t: Rational) -> Restraints {
        Restraints::new(vec![t]).unwrap()
    }

    fn label_set(p: &ParametricPolytope, names: &[&str]) -> LabelSet {
        let ix: Vec<usize> = names
            .iter()
            .map(|n| p.labels().iter().position(|l| l == n).unwrap())
            .collect();
        LabelSet::from_indices(&ix)
    }

    #[test]
    fn basic_subsets_triangle_without_box() {
        // bounded triangle whose rows are not a box
        let p = ParametricPolytope::new(
            2,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![-1, 0], vec![0, 1], vec![1, -1]],
            vec![
                AffineRhs::constant(rat_int(0)),
                AffineRhs::constant(rat_int(1)),
                AffineRhs::constant(rat_int(0)),
            ],
        )
        .unwrap();
        assert!(p.is_bounded());
        assert_eq!(p.basic_subsets().len(), 3);
    }

    #[test]
    fn basic_subsets_skip_duplicate_rows() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        let e1 = p.labels().iter().position(|l| l == "E^12_1").unwrap();
        let e2 = p.labels().iter().position(|l| l == "E^12_2").unwrap();
        assert!(!p.basic_subsets().is_empty());
        for beta in p.basic_subsets() {
            assert!(!(beta.contains(e1) && beta.contains(e2)));
        }
    }

    #[test]
    fn rank_deficient_rows_have_no_basic_subset() {
        let p = ParametricPolytope::new(
            2,
            vec!["a".into(), "b".into()],
            vec![vec![1, 0], vec![-1, 0]],
            vec![
                AffineRhs::constant(rat_int(1)),
                AffineRhs::constant(rat_int(0)),
            ],
        )
        .unwrap();
        assert!(p.basic_subsets().is_empty());
        // and such a system is correctly reported unbounded
        assert!(!p.is_bounded());
        assert!(matches!(
            p.polytope_type(&scalar1(rat_int(0))),
            Err(PolytopeError::Unbounded)
        ));
    }

    #[test]
    fn potential_vertices_of_order_cell() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        let r = scalar1(rat(1, 3));
        let q1 = p
            .potential_vertex(&label_set(&p, &["C^1_1", "E^12_2"]), &r)
            .unwrap();
        assert_eq!(q1, vec![rat_int(0), rat(1, 3)]);
        let pv = p
            .potential_vertex(&label_set(&p, &["C^1_1", "C^2_2"]), &r)
            .unwrap();
        assert_eq!(pv, vec![rat_int(0), rat_int(1)]);
    }

    #[test]
    fn potential_vertex_origin_of_distinct_cell() {
        let p = distinct_edge_system(
            rat_int(1),
            rat_int(1),
            rat_int(0),
            rat_int(1),
            rat_int(1),
            rat_int(2),
        );
        let x = p
            .potential_vertex(&label_set(&p, &["C^1_1", "C^2_1"]), &scalar1(rat(1, 2)))
            .unwrap();
        assert_eq!(x, vec![rat_int(0), rat_int(0)]);
    }

    #[test]
    fn abstract_vertex_collects_all_tight_rows() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        // at r = 0 the vertex (0,0) is pinned by C^1_1 and E^12_2 but is
        // also tight for C^2_1 and E^12_1
        let av = p
            .abstract_vertex(&label_set(&p, &["C^1_1", "E^12_2"]), &scalar1(rat_int(0)))
            .unwrap();
        assert_eq!(av, label_set(&p, &["C^1_1", "C^2_1", "E^12_1", "E^12_2"]));

        // at r = delta = len the top corner absorbs both moving rows
        let av = p
            .abstract_vertex(&label_set(&p, &["C^1_1", "C^2_2"]), &scalar1(rat_int(1)))
            .unwrap();
        for l in ["C^1_1", "C^2_2", "E^12_2", "E^12_3"] {
            assert!(av.contains(p.labels().iter().position(|x| x == l).unwrap()));
        }

        // at generic r strictly inside an interval nothing extra is tight
        let beta = label_set(&p, &["C^1_1", "E^12_2"]);
        let av = p.abstract_vertex(&beta, &scalar1(rat(1, 3))).unwrap();
        assert_eq!(av, beta);
    }

    #[test]
    fn type_of_order_cell_across_intervals() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        // beyond (delta + len)/2 the polytope is empty
        let t = p.polytope_type(&scalar1(rat(3, 2))).unwrap();
        assert!(t.is_empty());
        // small positive r: exactly three vertices
        let t = p.polytope_type(&scalar1(rat(1, 3))).unwrap();
        assert_eq!(t.vertex_count(), 3);
    }

    #[test]
    fn type_of_distinct_cell_at_zero() {
        let p = distinct_edge_system(
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(2),
            rat_int(2),
            rat_int(3),
        );
        let t = p.polytope_type(&scalar1(rat_int(0))).unwrap();
        assert_eq!(t.vertex_count(), 4);
        let expected: BTreeSet<LabelSet> = [
            label_set(&p, &["C^1_1", "C^2_1"]),
            label_set(&p, &["C^1_1", "C^2_2"]),
            label_set(&p, &["C^1_2", "C^2_1"]),
            label_set(&p, &["C^1_2", "C^2_2"]),
        ]
        .into_iter()
        .collect();
        let got: BTreeSet<LabelSet> = t.vertices().cloned().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn face_poset_of_triangle_and_quadrilateral() {
        let p = ParametricPolytope::new(
            2,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![-1, 0], vec![0, 1], vec![1, -1]],
            vec![
                AffineRhs::constant(rat_int(0)),
                AffineRhs::constant(rat_int(1)),
                AffineRhs::constant(rat_int(0)),
            ],
        )
        .unwrap();
        let t = p.polytope_type(&Restraints::zero(0)).unwrap();
        let poset = p.face_poset(&t).unwrap();
        assert_eq!(poset.f_vector(), vec![3, 3, 1]);

        // order cell with delta < len strictly between its two transition
        // values: four active rows, a quadrilateral
        let p = same_edge_system(rat_int(2), rat_int(1));
        let t = p.polytope_type(&scalar1(rat(5, 4))).unwrap();
        let poset = p.face_poset(&t).unwrap();
        assert_eq!(poset.f_vector(), vec![4, 4, 1]);
    }

    #[test]
    fn face_poset_of_a_point() {
        // single vertex whose tight set is everything: a point
        let p = ParametricPolytope::new(
            1,
            vec!["lo".into(), "hi".into()],
            vec![vec![-1], vec![1]],
            vec![
                AffineRhs::constant(rat_int(0)),
                AffineRhs::constant(rat_int(0)),
            ],
        )
        .unwrap();
        let t = p.polytope_type(&Restraints::zero(0)).unwrap();
        assert_eq!(t.vertex_count(), 1);
        let poset = p.face_poset(&t).unwrap();
        assert_eq!(poset.f_vector(), vec![1]);
        assert!(p.face_poset(&PolytopeType::default()).is_err());
    }

    #[test]
    fn types_equal_within_and_across_intervals() {
        let p = same_edge_system(rat_int(2), rat_int(1));
        let t1 = p.polytope_type(&scalar1(rat(9, 8))).unwrap();
        assert!(types_equal(&t1, &t1));
        let t2 = p.polytope_type(&scalar1(rat(11, 8))).unwrap();
        assert!(types_equal(&t1, &t2));
        // across the delta transition the type differs
        let t0 = p.polytope_type(&scalar1(rat(1, 2))).unwrap();
        assert!(!types_equal(&t0, &t1));
    }

    #[test]
    fn tightness_is_exact_at_potential_vertices() {
        let p = distinct_edge_system(
            rat_int(2),
            rat(1, 2),
            rat_int(0),
            rat(1, 2),
            rat_int(1),
            rat(1, 2),
        );
        let r = scalar1(rat(1, 4));
        let rhs = p.rhs_at(&r);
        for beta in p.basic_subsets() {
            let x = p.potential_vertex(beta, &r).unwrap();
            let av = p.abstract_vertex(beta, &r).unwrap();
            for i in av.iter() {
                assert_eq!(dot_int(p.row(i), &x), rhs[i]);
            }
            assert!(beta.is_subset_of(&av));
        }
    }

    #[test]
    fn equal_potential_vertices_share_abstract_vertex() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        let r = scalar1(rat_int(0));
        use std::collections::HashMap;
        let mut by_point: HashMap<String, LabelSet> = HashMap::new();
        for beta in p.basic_subsets() {
            let x = p.potential_vertex(beta, &r).unwrap();
            let key = x
                .iter()
                .map(crate::rational::format_rational)
                .collect::<Vec<_>>()
                .join(",");
            let av = p.abstract_vertex(beta, &r).unwrap();
            if let Some(prev) = by_point.get(&key) {
                assert_eq!(*prev, av);
            } else {
                by_point.insert(key, av);
            }
        }
    }

    #[test]
    fn canonical_json_is_sorted() {
        let p = same_edge_system(rat_int(1), rat_int(1));
        let t = p.polytope_type(&scalar1(rat(1, 3))).unwrap();
        let v = t.to_canonical_json(p.labels());
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"[["C^1_1","C^2_2"],["C^1_1","E^12_2"],["C^2_2","E^12_2"]]"#
        );
    }
}
