//! Sparse rank computation over the two-element field.
//!
//! Boundary matrices of regular complexes are very sparse (a k-cell has a
//! handful of codimension-1 faces), so columns are kept as sorted index
//! lists and reduced by the usual lowest-pivot elimination.

/// Rank of a matrix given by columns; each column is a set of row indices.
pub fn rank_sparse(columns: Vec<Vec<u32>>) -> usize {
    // pivot row -> reduced column owning it
    let mut owner: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    let mut rank = 0;
    for mut col in columns {
        col.sort_unstable();
        // repeated entries cancel mod 2
        col = cancel_pairs(col);
        while let Some(&low) = col.last() {
            match owner.get(&low) {
                None => {
                    owner.insert(low, col);
                    rank += 1;
                    break;
                }
                Some(other) => {
                    col = xor_sorted(&col, other);
                }
            }
        }
    }
    rank
}

fn cancel_pairs(col: Vec<u32>) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(col.len());
    for v in col {
        if out.last() == Some(&v) {
            out.pop();
        } else {
            out.push(v);
        }
    }
    out
}

/// Symmetric difference of two sorted index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
