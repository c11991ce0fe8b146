//! Oracles shared by several test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

/// Second oracle: scan every degree up to 10 and every multiplicity vector with
/// `m_j in -1..=d`, keeping `d^2 - sum m^2 = -1` and `3d - sum m = 1`. Uses only the
/// running sums for pruning, not the Cauchy-Schwarz degree bound.
pub fn brute_force(r: usize) -> BTreeSet<Vec<i64>> {
    fn rec(d: i64, r: usize, cur: &mut Vec<i64>, sq: i64, sum: i64, out: &mut BTreeSet<Vec<i64>>) {
        if sq > d * d + 1 {
            return;
        }
        if cur.len() == r {
            if d * d - sq == -1 && 3 * d - sum == 1 {
                let mut v = vec![d];
                v.extend(cur.iter().map(|m| -m));
                out.insert(v);
            }
            return;
        }
        for m in -1..=d.max(1) {
            cur.push(m);
            rec(d, r, cur, sq + m * m, sum + m, out);
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    for d in 0..=10 {
        rec(d, r, &mut Vec::new(), 0, 0, &mut out);
    }
    out
}
