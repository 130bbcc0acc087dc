//! Exact dimension counts for the curvature symmetry classes and for the
//! kernel of the map sending a covariant-derivative curvature tensor to its
//! cubic field of Szabó operators.
//!
//! The antisymmetries and pair symmetry in the first four slots generate a
//! group of eight signed slot permutations. Coefficients in one orbit are
//! equal up to sign (or all forced to zero when the orbit meets itself with
//! the opposite sign), so one integer unknown per surviving orbit
//! parametrizes those identities exactly. The Bianchi-type identities are
//! then imposed as integer rows on the orbit unknowns and ranked exactly.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exact::{normalize_row, Echelon, SparseRow};
use crate::linalg::null_space;
use crate::space::{PseudoSpace, Signature};
use crate::tensor::{slot_permutation, CoeffArray, SymmetryTables};

/// Orbit coordinates of rank-4 index tuples.
pub(crate) struct OrbitParam {
    /// `(unknown, sign)` for each flat 4-index, or `None` if forced to zero.
    pub coord: Vec<Option<(usize, i128)>>,
    pub unknowns: usize,
}

impl OrbitParam {
    pub fn new(dim: usize) -> Self {
        let gens: Vec<(Vec<usize>, i128)> = vec![
            (slot_permutation(dim, 4, &[1, 0, 2, 3]), -1),
            (slot_permutation(dim, 4, &[0, 1, 3, 2]), -1),
            (slot_permutation(dim, 4, &[2, 3, 0, 1]), 1),
        ];
        let n = dim.pow(4);
        let mut coord: Vec<Option<(usize, i128)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut unknowns = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut sign_of: HashMap<usize, i128> = HashMap::new();
            sign_of.insert(start, 1);
            let mut stack = vec![start];
            let mut zero = false;
            while let Some(i) = stack.pop() {
                let si = sign_of[&i];
                for (table, s) in &gens {
                    let j = table[i];
                    let sj = si * s;
                    match sign_of.get(&j) {
                        Some(&prev) if prev != sj => zero = true,
                        Some(_) => {}
                        None => {
                            sign_of.insert(j, sj);
                            stack.push(j);
                        }
                    }
                }
            }
            for (&i, &s) in &sign_of {
                seen[i] = true;
                coord[i] = if zero { None } else { Some((unknowns, s)) };
            }
            if !zero {
                unknowns += 1;
            }
        }
        OrbitParam { coord, unknowns }
    }
}

fn push_term(
    row: &mut Vec<(usize, i128)>,
    c: Option<(usize, i128)>,
    stride: usize,
    last: usize,
    coef: i128,
) {
    if let Some((u, s)) = c {
        row.push((u * stride + last, s * coef));
    }
}

fn insert_unique(
    e: &mut Echelon,
    seen: &mut HashSet<SparseRow>,
    row: Vec<(usize, i128)>,
) -> Result<()> {
    let row = normalize_row(row);
    if row.is_empty() || !seen.insert(row.clone()) {
        return Ok(());
    }
    e.insert(row)?;
    Ok(())
}

fn act_echelon(dim: usize) -> Result<(OrbitParam, Echelon)> {
    let orbits = OrbitParam::new(dim);
    let c1 = slot_permutation(dim, 4, &[1, 2, 0, 3]);
    let c2 = slot_permutation(dim, 4, &[2, 0, 1, 3]);
    let mut e = Echelon::new(orbits.unknowns);
    let mut seen = HashSet::new();
    for i in 0..dim.pow(4) {
        let mut row = Vec::new();
        for j in [i, c1[i], c2[i]] {
            push_term(&mut row, orbits.coord[j], 1, 0, 1);
        }
        insert_unique(&mut e, &mut seen, row)?;
    }
    Ok((orbits, e))
}

/// Echelon form of the covariant-derivative class constraints over
/// unknowns `orbit * dim + v`.
fn acdt_echelon(dim: usize) -> Result<(OrbitParam, Echelon)> {
    let orbits = OrbitParam::new(dim);
    let m = dim;
    let c1 = slot_permutation(m, 4, &[1, 2, 0, 3]);
    let c2 = slot_permutation(m, 4, &[2, 0, 1, 3]);
    let mut e = Echelon::new(orbits.unknowns * m);
    let mut seen = HashSet::new();
    for i in 0..m.pow(4) {
        for v in 0..m {
            let mut row = Vec::new();
            for j in [i, c1[i], c2[i]] {
                push_term(&mut row, orbits.coord[j], m, v, 1);
            }
            insert_unique(&mut e, &mut seen, row)?;
        }
    }
    // D(x,y,z,w;v) + D(x,y,w,v;z) + D(x,y,v,z;w) = 0
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                for w in 0..m {
                    for v in 0..m {
                        let mut row = Vec::new();
                        for (a, b, last) in [(z, w, v), (w, v, z), (v, z, w)] {
                            let i4 = ((x * m + y) * m + a) * m + b;
                            push_term(&mut row, orbits.coord[i4], m, last, 1);
                        }
                        insert_unique(&mut e, &mut seen, row)?;
                    }
                }
            }
        }
    }
    Ok((orbits, e))
}

/// Dimension of the space of algebraic curvature tensors, `1 <= m <= 6`.
pub fn act_dimension(m: usize) -> Result<usize> {
    if !(1..=6).contains(&m) {
        return Err(Error::UnsupportedDimension {
            m,
            reason: "exact assembly supports 1 <= m <= 6",
        });
    }
    let (_, e) = act_echelon(m)?;
    Ok(e.nullity())
}

/// Dimension of the space of algebraic covariant-derivative curvature
/// tensors, computed exactly, `1 <= m <= 6`.
pub fn acdt_dimension(m: usize) -> Result<usize> {
    if !(1..=6).contains(&m) {
        return Err(Error::UnsupportedDimension {
            m,
            reason: "exact assembly supports 1 <= m <= 6",
        });
    }
    let (_, e) = acdt_echelon(m)?;
    Ok(e.nullity())
}

/// Kernel dimension of `D ↦ (v ↦ S(v))` on the covariant-derivative class.
///
/// The coefficient of `x_a x_b x_c` in the `(z, y)` entry of the operator
/// `S(x)` is `g_zz` times the sum of `D(y,a',b',z;c')` over the distinct
/// orderings `(a',b',c')` of `(a,b,c)`. Those rows are stacked under the class
/// constraints; the nullity of the stack is the kernel dimension.
pub fn szabo_map_kernel_dim(space: &PseudoSpace) -> Result<usize> {
    let m = space.dim();
    if m > 5 {
        return Err(Error::UnsupportedDimension {
            m,
            reason: "exact assembly of the Szabó map supports m <= 5",
        });
    }
    let (orbits, mut e) = acdt_echelon(m)?;
    let mut seen = HashSet::new();
    for y in 0..m {
        for z in 0..m {
            let g = space.signature.sign(z) as i128;
            for a in 0..m {
                for b in a..m {
                    for c in b..m {
                        let mut perms: Vec<[usize; 3]> = vec![
                            [a, b, c],
                            [a, c, b],
                            [b, a, c],
                            [b, c, a],
                            [c, a, b],
                            [c, b, a],
                        ];
                        perms.sort_unstable();
                        perms.dedup();
                        let mut row = Vec::new();
                        for [p0, p1, p2] in perms {
                            let i4 = ((y * m + p0) * m + p1) * m + z;
                            push_term(&mut row, orbits.coord[i4], m, p2, g);
                        }
                        insert_unique(&mut e, &mut seen, row)?;
                    }
                }
            }
        }
    }
    Ok(e.nullity())
}

/// Dense constraint matrix of the full class on all `m^order` coefficients:
/// one row per index and identity, with `(I - P_k)`-type rows.
pub fn dense_constraint_matrix(dim: usize, order: usize) -> DMatrix<f64> {
    let tables = SymmetryTables::new(dim, order);
    let n = dim.pow(order as u32);
    let groups = if order == 5 { 5 } else { 4 };
    let mut c = DMatrix::zeros(groups * n, n);
    for i in 0..n {
        c[(i, i)] += 1.0;
        c[(i, tables.swap01[i])] += 1.0;
        c[(n + i, i)] += 1.0;
        c[(n + i, tables.swap23[i])] += 1.0;
        c[(2 * n + i, i)] += 1.0;
        c[(2 * n + i, tables.pair[i])] -= 1.0;
        c[(3 * n + i, i)] += 1.0;
        c[(3 * n + i, tables.bianchi[0][i])] += 1.0;
        c[(3 * n + i, tables.bianchi[1][i])] += 1.0;
        if let Some(s) = &tables.second_bianchi {
            c[(4 * n + i, i)] += 1.0;
            c[(4 * n + i, s[0][i])] += 1.0;
            c[(4 * n + i, s[1][i])] += 1.0;
        }
    }
    c
}

/// The orthogonal projector onto the class, assembled from an orthonormal
/// null-space basis of the dense constraint matrix. Practical for `m <= 3`.
#[derive(Clone, Debug)]
pub struct DenseProjector {
    pub dim: usize,
    pub order: usize,
    basis: DMatrix<f64>,
}

impl DenseProjector {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim.pow(order as u32) > 729 {
            return Err(Error::UnsupportedDimension {
                m: dim,
                reason: "dense projector is limited to at most 729 coefficients",
            });
        }
        let c = dense_constraint_matrix(dim, order);
        Ok(DenseProjector {
            dim,
            order,
            basis: null_space(&c, 1e-10),
        })
    }

    /// Dimension of the image.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn apply(&self, t: &CoeffArray) -> CoeffArray {
        let x = nalgebra::DVector::from_column_slice(t.data());
        let y = &self.basis * (self.basis.transpose() * x);
        CoeffArray::from_vec(self.dim, self.order, y.as_slice().to_vec()).expect("same shape")
    }
}

/// One row of the dimension table.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DimensionRow {
    pub m: usize,
    pub act_dim: usize,
    pub acdt_dim: usize,
    pub szabo_kernel_dims: Vec<(Signature, usize)>,
}

/// Exact dimension table for `1 <= m <= max_m <= 5`.
pub fn dimension_table(max_m: usize) -> Result<Vec<DimensionRow>> {
    if !(1..=5).contains(&max_m) {
        return Err(Error::UnsupportedDimension {
            m: max_m,
            reason: "dimension table supports 1 <= max_m <= 5",
        });
    }
    (1..=max_m)
        .map(|m| {
            let kernels = (0..=m)
                .map(|p| {
                    let sig = Signature { p, q: m - p };
                    szabo_map_kernel_dim(&PseudoSpace::from_signature(sig)).map(|k| (sig, k))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DimensionRow {
                m,
                act_dim: act_dimension(m)?,
                acdt_dim: acdt_dimension(m)?,
                szabo_kernel_dims: kernels,
            })
        })
        .collect()
}
