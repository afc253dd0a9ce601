#![allow(dead_code)] // each test binary uses its own subset

//! Brute-force oracles shared by the integration suites. These stay
//! independent of the library's elimination code paths: rank is read
//! off the size of the row span, dependencies are counted straight from
//! the definition.

use mmwave_rlnc::gf::{FieldContext, FieldElement};
use std::collections::HashSet;

/// Rank by enumerating the whole row span: the span of n rows over
/// GF(q) has exactly q^rank distinct vectors.
pub fn rank_by_span_enumeration(field: &FieldContext, rows: &[Vec<FieldElement>]) -> usize {
    let q = field.size() as u64;
    let n = rows.len() as u32;
    let width = rows.first().map_or(0, |r| r.len());
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    for combo in 0..q.pow(n) {
        let mut c = combo;
        let mut acc = vec![FieldElement::ZERO; width];
        for row in rows {
            let coeff = FieldElement((c % q) as u16);
            c /= q;
            for (a, &r) in acc.iter_mut().zip(row) {
                *a = field.add(*a, field.mul(coeff, r));
            }
        }
        seen.insert(acc.iter().map(|x| x.value()).collect());
    }
    (seen.len() as f64).log(q as f64).round() as usize
}

/// Number of nonzero coefficient vectors c with sum c_i * row_i = 0.
pub fn count_dependencies(field: &FieldContext, rows: &[Vec<FieldElement>]) -> u64 {
    let q = field.size() as u64;
    let n = rows.len() as u32;
    let width = rows.first().map_or(0, |r| r.len());
    let mut count = 0;
    for combo in 1..q.pow(n) {
        let mut c = combo;
        let mut acc = vec![FieldElement::ZERO; width];
        for row in rows {
            let coeff = FieldElement((c % q) as u16);
            c /= q;
            for (a, &r) in acc.iter_mut().zip(row) {
                *a = field.add(*a, field.mul(coeff, r));
            }
        }
        if acc.iter().all(|x| x.is_zero()) {
            count += 1;
        }
    }
    count
}

/// All z-by-z matrices over GF(q), encoded by a single counter.
pub fn enumerate_matrices(q: u64, z: usize) -> impl Iterator<Item = Vec<Vec<FieldElement>>> {
    let cells = (z * z) as u32;
    (0..q.pow(cells)).map(move |code| {
        let mut c = code;
        let mut rows = vec![vec![FieldElement::ZERO; z]; z];
        for i in 0..(z * z) {
            rows[i / z][i % z] = FieldElement((c % q) as u16);
            c /= q;
        }
        rows
    })
}
