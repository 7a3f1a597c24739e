//! Serializable reports with exact rationals rendered as `p/q` strings.

use crate::complex::ConfigComplex;
use crate::rational::format_rational;
use crate::sweep::{CriticalSweep, SlotInvariants};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ComplexReport {
    pub f_vector: Vec<usize>,
    pub components: usize,
    pub euler: i64,
    pub betti_mod2: Vec<usize>,
    pub cells: Vec<String>,
}

impl ComplexReport {
    pub fn from_complex(x: &ConfigComplex) -> Self {
        ComplexReport {
            f_vector: x.f_vector(),
            components: x.components(),
            euler: x.euler_characteristic(),
            betti_mod2: x.betti_mod2(),
            cells: x.cells().iter().map(|c| c.key.render()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotReport {
    pub fingerprint_hash: String,
    pub empty: bool,
    pub components: usize,
    pub euler: i64,
    pub betti_mod2: Vec<usize>,
    pub f_vector: Vec<usize>,
}

impl SlotReport {
    fn from_inv(inv: &SlotInvariants) -> Self {
        SlotReport {
            fingerprint_hash: inv.fingerprint_hash.clone(),
            empty: inv.empty,
            components: inv.components,
            euler: inv.euler,
            betti_mod2: inv.betti_mod2.clone(),
            f_vector: inv.f_vector.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub t: String,
    pub provenance: crate::sweep::Provenance,
    pub spurious: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalJson {
    pub interval: [Option<String>; 2],
    pub sample: String,
    #[serde(flatten)]
    pub slot: SlotReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalJson {
    pub t: String,
    #[serde(flatten)]
    pub slot: SlotReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepCounts {
    pub candidates: usize,
    pub nonspurious: usize,
    pub isotopy_classes: usize,
    pub isotopy_classes_with_empty: usize,
    pub homotopy_signatures: usize,
    pub smallest_nonspurious: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub base: Vec<String>,
    pub direction: Vec<String>,
    pub candidates: Vec<CandidateReport>,
    pub intervals: Vec<IntervalJson>,
    pub critical_points: Vec<CriticalJson>,
    pub counts: SweepCounts,
}

impl SweepReport {
    pub fn from_sweep(s: &CriticalSweep) -> Self {
        SweepReport {
            n: s.ray.n,
            base: s.ray.base.values().iter().map(format_rational).collect(),
            direction: s.ray.direction.iter().map(format_rational).collect(),
            candidates: s
                .candidates
                .iter()
                .map(|c| CandidateReport {
                    t: format_rational(&c.t),
                    provenance: c.provenance.clone(),
                    spurious: c.spurious,
                })
                .collect(),
            intervals: s
                .intervals
                .iter()
                .map(|iv| IntervalJson {
                    interval: [
                        Some(format_rational(&iv.lo)),
                        iv.hi.as_ref().map(format_rational),
                    ],
                    sample: format_rational(&iv.sample),
                    slot: SlotReport::from_inv(&iv.inv),
                })
                .collect(),
            critical_points: s
                .critical_points
                .iter()
                .map(|c| CriticalJson {
                    t: format_rational(&c.t),
                    slot: SlotReport::from_inv(&c.inv),
                })
                .collect(),
            counts: SweepCounts {
                candidates: s.candidates.len(),
                nonspurious: s.nonspurious().len(),
                isotopy_classes: crate::sweep::isotopy_class_count(s, false),
                isotopy_classes_with_empty: crate::sweep::isotopy_class_count(s, true),
                homotopy_signatures: crate::sweep::homotopy_invariant_classes(s),
                smallest_nonspurious: s.smallest_nonspurious().map(format_rational),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub status: String,
    pub details: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub all_agree: bool,
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MetricGraph;
    use crate::polytope::Restraints;
    use crate::rational::rat_int;

    #[test]
    fn complex_report_round_trip_fields() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let x = crate::complex::build_complex(&g, 2, &Restraints::scalar(2, rat_int(0)).unwrap());
        let rep = ComplexReport::from_complex(&x);
        assert_eq!(rep.f_vector, vec![4, 5, 2]);
        assert_eq!(rep.cells.len(), 11);
        let json = to_json_string(&rep);
        assert!(json.contains("\"euler\": 1"));
    }

    #[test]
    fn sweep_report_is_deterministic() {
        let g = MetricGraph::parse("a b 1\n").unwrap();
        let ray = crate::sweep::Ray::scalar(2).unwrap();
        let s1 = crate::sweep::sweep_types(&g, 2, &ray);
        let s2 = crate::sweep::sweep_types(&g, 2, &ray);
        assert_eq!(
            to_json_string(&SweepReport::from_sweep(&s1)),
            to_json_string(&SweepReport::from_sweep(&s2))
        );
    }
}
