//! Exact rank of sparse integer matrices.
//!
//! Rows are reduced fraction-free in `i128` and kept primitive (content
//! divided out), so the echelon form is exact over the rationals. Overflow is
//! reported rather than wrapped.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Sparse row: strictly increasing column indices with nonzero entries.
pub type SparseRow = Vec<(usize, i128)>;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Sorts, merges duplicate columns and drops zeros.
pub fn normalize_row(mut row: Vec<(usize, i128)>) -> SparseRow {
    row.sort_unstable_by_key(|&(c, _)| c);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut SparseRow) {
    let g = row.iter().fold(0i128, |g, &(_, v)| gcd(g, v));
    let sign = match row.first() {
        Some(&(_, v)) if v < 0 => -1,
        _ => 1,
    };
    if g > 1 || sign < 0 {
        for (_, v) in row.iter_mut() {
            *v = *v / g * sign;
        }
    }
}

/// `a·x - b·y` on sparse rows.
fn combine(a: i128, x: &SparseRow, b: i128, y: &SparseRow) -> Result<SparseRow> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let mul = |s: i128, v: i128| s.checked_mul(v).ok_or(Error::ExactOverflow);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cy = y.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if cx < cy {
            out.push((cx, mul(a, x[i].1)?));
            i += 1;
        } else if cy < cx {
            out.push((cy, -mul(b, y[j].1)?));
            j += 1;
        } else {
            let v = mul(a, x[i].1)?
                .checked_sub(mul(b, y[j].1)?)
                .ok_or(Error::ExactOverflow)?;
            if v != 0 {
                out.push((cx, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    Ok(out)
}

/// Incrementally built row echelon form over the rationals.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    /// Reduces `row` against the current pivots and keeps it if it is
    /// independent. Returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> Result<bool> {
        let mut row = normalize_row(row);
        debug_assert!(row.iter().all(|&(c, _)| c < self.ncols));
        loop {
            let Some(&(lead, lv)) = row.first() else {
                return Ok(false);
            };
            match self.pivots.get(&lead) {
                None => {
                    self.pivots.insert(lead, row);
                    return Ok(true);
                }
                Some(p) => {
                    let pv = p[0].1;
                    let g = gcd(pv, lv);
                    row = combine(pv / g, &row, lv / g, p)?;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Whether `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: SparseRow) -> Result<bool> {
        let mut probe = self.clone();
        Ok(!probe.insert(row)?)
    }
}

/// Exact rank of the given rows.
pub fn rank<I: IntoIterator<Item = SparseRow>>(ncols: usize, rows: I) -> Result<usize> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r)?;
    }
    Ok(e.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_systems() {
        // x + y = 0, y + z = 0, x - z = 0 has rank 2
        let rows = vec![
            vec![(0, 1), (1, 1)],
            vec![(1, 1), (2, 1)],
            vec![(0, 1), (2, -1)],
        ];
        assert_eq!(rank(3, rows).unwrap(), 2);
        assert_eq!(rank(4, Vec::<SparseRow>::new()).unwrap(), 0);
        let rows = vec![vec![(0, 2), (1, 4)], vec![(0, 3), (1, 5)]];
        assert_eq!(rank(2, rows).unwrap(), 2);
    }

    #[test]
    fn duplicate_columns_merge() {
        assert_eq!(normalize_row(vec![(1, 2), (0, -4), (1, -2)]), vec![(0, 1)]);
    }

    #[test]
    fn span_membership() {
        let mut e = Echelon::new(3);
        e.insert(vec![(0, 1), (1, 1)]).unwrap();
        e.insert(vec![(1, 1), (2, 1)]).unwrap();
        assert!(e.contains(vec![(0, 1), (2, -1)]).unwrap());
        assert!(!e.contains(vec![(0, 1)]).unwrap());
    }
}
