//! Exact one-parameter analysis along a ray in the restraint space.
//!
//! Candidate transition values are the positive roots of the affine
//! equations that make one more constraint tight at a potential vertex,
//! collected over every cell of every dimension. The per-cell types are
//! then fingerprinted at each candidate and at midpoints between them;
//! candidates that change no fingerprint are marked spurious and their
//! intervals merged. Both the open intervals and the critical parameters
//! themselves are parameter values with their own invariants.

use crate::cells::{all_cells, cell_system, CellSystem};
use crate::complex::build_complex_from_types;
use crate::graph::{DistanceMatrix, MetricGraph};
use crate::polytope::{PolytopeType, Restraints};
use crate::rational::{format_rational, rat_int, Rational};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("a ray needs at least one restraint pair (n >= 2)")]
    NoPairs,
    #[error("ray direction must be nonzero and componentwise nonnegative")]
    BadDirection,
}

/// A ray `base + t * direction` in the nonnegative restraint orthant.
#[derive(Clone, Debug)]
pub struct Ray {
    pub n: usize,
    pub base: Restraints,
    pub direction: Vec<Rational>,
}

impl Ray {
    pub fn new(n: usize, base: Restraints, direction: Vec<Rational>) -> Result<Self, SweepError> {
        let pairs = Restraints::pair_count(n);
        if pairs == 0 {
            return Err(SweepError::NoPairs);
        }
        if base.len() != pairs
            || direction.len() != pairs
            || direction.iter().any(|d| d.is_negative())
            || direction.iter().all(|d| d.is_zero())
        {
            return Err(SweepError::BadDirection);
        }
        Ok(Ray { n, base, direction })
    }

    /// The scalar family: base 0, all pair directions 1.
    pub fn scalar(n: usize) -> Result<Self, SweepError> {
        let pairs = Restraints::pair_count(n);
        if pairs == 0 {
            return Err(SweepError::NoPairs);
        }
        Ok(Ray {
            n,
            base: Restraints::zero(pairs),
            direction: vec![rat_int(1); pairs],
        })
    }

    pub fn at(&self, t: &Rational) -> Restraints {
        let values: Vec<Rational> = self
            .base
            .values()
            .iter()
            .zip(&self.direction)
            .map(|(b, d)| b + d * t)
            .collect();
        Restraints::new(values).expect("points on a nonnegative ray stay nonnegative")
    }
}

/// Where a candidate value came from: the equation making `label` tight at
/// the potential vertex of `beta` in `cell`.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub cell: String,
    pub beta: Vec<String>,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub t: Rational,
    pub provenance: Provenance,
    pub spurious: bool,
}

/// Invariants of the configuration space at one parameter value.
#[derive(Clone, Debug)]
pub struct SlotInvariants {
    /// Canonical per-cell type fingerprint (internal equality witness).
    pub fingerprint: String,
    /// Short stable digest of the fingerprint for reports.
    pub fingerprint_hash: String,
    pub empty: bool,
    pub components: usize,
    pub euler: i64,
    pub betti_mod2: Vec<usize>,
    pub f_vector: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IntervalReport {
    pub lo: Rational,
    /// `None` means unbounded above.
    pub hi: Option<Rational>,
    pub sample: Rational,
    pub inv: SlotInvariants,
}

#[derive(Clone, Debug)]
pub struct CriticalPointReport {
    pub t: Rational,
    pub inv: SlotInvariants,
}

/// The full sweep: ordered candidates with spuriousness flags, the merged
/// open intervals between genuine critical values, and the critical
/// parameters themselves.
#[derive(Clone, Debug)]
pub struct CriticalSweep {
    pub ray: Ray,
    pub candidates: Vec<Candidate>,
    pub intervals: Vec<IntervalReport>,
    pub critical_points: Vec<CriticalPointReport>,
}

impl CriticalSweep {
    pub fn nonspurious(&self) -> Vec<&Candidate> {
        self.candidates.iter().filter(|c| !c.spurious).collect()
    }

    pub fn smallest_nonspurious(&self) -> Option<&Rational> {
        self.candidates.iter().find(|c| !c.spurious).map(|c| &c.t)
    }
}

struct SweepContext {
    systems: Vec<CellSystem>,
    maximal: Vec<usize>,
}

fn sweep_context(g: &MetricGraph, dist: &DistanceMatrix, n: usize) -> SweepContext {
    let cells = all_cells(g, n);
    let systems: Vec<CellSystem> = cells.iter().map(|c| cell_system(c, g, dist)).collect();
    let maximal = (0..systems.len())
        .filter(|&i| systems[i].cell.is_maximal())
        .collect();
    SweepContext { systems, maximal }
}

/// All candidate critical values on the ray, sorted and deduplicated,
/// each with the first provenance that produced it.
pub fn critical_candidates(g: &MetricGraph, n: usize, ray: &Ray) -> Vec<(Rational, Provenance)> {
    let dist = g.distances();
    let ctx = sweep_context(g, &dist, n);
    candidates_from(&ctx, ray)
}

fn candidates_from(ctx: &SweepContext, ray: &Ray) -> Vec<(Rational, Provenance)> {
    let mut found: BTreeMap<Rational, Provenance> = BTreeMap::new();
    for sys in &ctx.systems {
        let p = &sys.polytope;
        let on_ray = p.rhs_on_ray(&ray.base, &ray.direction);
        for beta in p.basic_subsets() {
            let idx = beta.indices();
            let mat: Vec<Vec<Rational>> = idx
                .iter()
                .map(|&i| p.row(i).iter().map(|&v| rat_int(v)).collect())
                .collect();
            let consts: Vec<Rational> = idx.iter().map(|&i| on_ray[i].0.clone()).collect();
            let slopes: Vec<Rational> = idx.iter().map(|&i| on_ray[i].1.clone()).collect();
            let Some(u) = crate::linalg::solve_square(&mat, &consts) else {
                continue;
            };
            let v = crate::linalg::solve_square(&mat, &slopes)
                .expect("matrix already inverted for the constant part");
            for lam in 0..p.num_labels() {
                if beta.contains(lam) {
                    continue;
                }
                let row = p.row(lam);
                let mut a = -on_ray[lam].0.clone();
                let mut b = -on_ray[lam].1.clone();
                for (k, &coeff) in row.iter().enumerate() {
                    if coeff != 0 {
                        a += rat_int(coeff) * &u[k];
                        b += rat_int(coeff) * &v[k];
                    }
                }
                // a + b t = 0
                if b.is_zero() {
                    continue;
                }
                let t = -a / b;
                if t.is_positive() {
                    found.entry(t).or_insert_with(|| Provenance {
                        cell: sys.cell.canonical_string(),
                        beta: sys.label_names(beta),
                        label: sys.labels[lam].to_string(),
                    });
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Per-cell types at one restraint vector, with a canonical fingerprint.
fn fingerprint_at(ctx: &SweepContext, r: &Restraints) -> (Vec<PolytopeType>, String) {
    let types: Vec<PolytopeType> = ctx
        .systems
        .iter()
        .map(|s| {
            s.polytope
                .polytope_type(r)
                .expect("cell systems are bounded")
        })
        .collect();
    let mut fp = String::new();
    for t in &types {
        fp.push_str(&t.index_fingerprint());
        fp.push('|');
    }
    (types, fp)
}

fn short_hash(fp: &str) -> String {
    let digest = Sha256::digest(fp.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn invariants_at(
    g: &MetricGraph,
    dist: &DistanceMatrix,
    n: usize,
    ctx: &SweepContext,
    r: &Restraints,
    types: &[PolytopeType],
    fp: &str,
) -> SlotInvariants {
    let _ = r;
    let max_systems: Vec<CellSystem> = ctx
        .maximal
        .iter()
        .map(|&i| ctx.systems[i].clone())
        .collect();
    let max_types: Vec<PolytopeType> = ctx.maximal.iter().map(|&i| types[i].clone()).collect();
    let x = build_complex_from_types(g, dist, n, &max_systems, &max_types);
    SlotInvariants {
        fingerprint: fp.to_string(),
        fingerprint_hash: short_hash(fp),
        empty: x.is_empty(),
        components: x.components(),
        euler: x.euler_characteristic(),
        betti_mod2: x.betti_mod2(),
        f_vector: x.f_vector(),
    }
}

/// Runs the full sweep on the ray.
pub fn sweep_types(g: &MetricGraph, n: usize, ray: &Ray) -> CriticalSweep {
    let dist = g.distances();
    let ctx = sweep_context(g, &dist, n);
    let cands = candidates_from(&ctx, ray);
    let k = cands.len();

    // sample points: one inside each gap, plus each candidate itself
    let mut gap_samples: Vec<Rational> = Vec::with_capacity(k + 1);
    if k == 0 {
        gap_samples.push(rat_int(1));
    } else {
        gap_samples.push(&cands[0].0 / rat_int(2));
        for w in cands.windows(2) {
            gap_samples.push((&w[0].0 + &w[1].0) / rat_int(2));
        }
        gap_samples.push(&cands[k - 1].0 + rat_int(1));
    }

    let eval = |t: &Rational| -> (Vec<PolytopeType>, String) { fingerprint_at(&ctx, &ray.at(t)) };
    let gap_fps: Vec<(Vec<PolytopeType>, String)> = gap_samples.par_iter().map(&eval).collect();
    let cand_fps: Vec<(Vec<PolytopeType>, String)> =
        cands.par_iter().map(|(t, _)| eval(t)).collect();

    // spurious: no fingerprint change across or at the candidate
    let spurious: Vec<bool> = (0..k)
        .map(|i| gap_fps[i].1 == cand_fps[i].1 && gap_fps[i].1 == gap_fps[i + 1].1)
        .collect();

    let candidates: Vec<Candidate> = cands
        .iter()
        .zip(&spurious)
        .map(|((t, prov), &s)| Candidate {
            t: t.clone(),
            provenance: prov.clone(),
            spurious: s,
        })
        .collect();

    // merge gaps across spurious candidates
    let mut intervals: Vec<IntervalReport> = Vec::new();
    let mut critical_points: Vec<CriticalPointReport> = Vec::new();
    let mut lo = Rational::zero();
    let mut lo_gap = 0usize;
    for i in 0..=k {
        let is_end = i == k;
        if !is_end && spurious[i] {
            debug_assert_eq!(gap_fps[i].1, gap_fps[i + 1].1);
            continue;
        }
        let hi = if is_end {
            None
        } else {
            Some(cands[i].0.clone())
        };
        let sample = match &hi {
            Some(h) => (&lo + h) / rat_int(2),
            None => &lo + rat_int(1),
        };
        let (types, fp) = eval(&sample);
        debug_assert_eq!(fp, gap_fps[lo_gap].1);
        let inv = invariants_at(g, &dist, n, &ctx, &ray.at(&sample), &types, &fp);
        intervals.push(IntervalReport {
            lo: lo.clone(),
            hi: hi.clone(),
            sample,
            inv,
        });
        if let Some(h) = hi {
            let inv = invariants_at(
                g,
                &dist,
                n,
                &ctx,
                &ray.at(&h),
                &cand_fps[i].0,
                &cand_fps[i].1,
            );
            critical_points.push(CriticalPointReport { t: h.clone(), inv });
            lo = h;
            lo_gap = i + 1;
        }
    }

    CriticalSweep {
        ray: ray.clone(),
        candidates,
        intervals,
        critical_points,
    }
}

/// The canonical per-cell type fingerprint of the whole configuration at
/// one restraint vector; equality of fingerprints is the equivalence the
/// sweep partitions the ray by.
pub fn global_fingerprint(g: &MetricGraph, n: usize, r: &Restraints) -> String {
    let dist = g.distances();
    let ctx = sweep_context(g, &dist, n);
    fingerprint_at(&ctx, r).1
}

fn slot_invariants(s: &CriticalSweep) -> Vec<&SlotInvariants> {
    let mut out: Vec<&SlotInvariants> = s.intervals.iter().map(|i| &i.inv).collect();
    out.extend(s.critical_points.iter().map(|c| &c.inv));
    out
}

/// Number of distinct per-cell type fingerprints over the merged open
/// intervals and the critical parameters, optionally counting the empty
/// space as a class.
pub fn isotopy_class_count(s: &CriticalSweep, include_empty: bool) -> usize {
    let mut fps: Vec<&str> = slot_invariants(s)
        .into_iter()
        .filter(|inv| include_empty || !inv.empty)
        .map(|inv| inv.fingerprint.as_str())
        .collect();
    fps.sort_unstable();
    fps.dedup();
    fps.len()
}

/// Number of distinct `(components, betti)` signatures over the same
/// parameter slots; a lower bound for the number of homotopy types.
pub fn homotopy_invariant_classes(s: &CriticalSweep) -> usize {
    let mut sigs: Vec<(usize, Vec<usize>)> = slot_invariants(s)
        .into_iter()
        .map(|inv| (inv.components, inv.betti_mod2.clone()))
        .collect();
    sigs.sort();
    sigs.dedup();
    sigs.len()
}

/// Renders an interval bound for reports.
pub fn render_bound(hi: &Option<Rational>) -> String {
    match hi {
        Some(h) => format_rational(h),
        None => "inf".to_string(),
    }
}
