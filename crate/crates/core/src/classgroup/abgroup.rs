//! Finite abelian group structure from generators and relations: integer
//! Hermite/Smith reduction of the relation lattice, invariant factors, and
//! discrete logarithms for every enumerated element.

use serde::Serialize;

use crate::error::{Error, Result};

/// Invariant-factor shape d_1 | d_2 | ... (nontrivial factors only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbGroupShape {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
}

impl AbGroupShape {
    pub fn trivial() -> AbGroupShape {
        AbGroupShape {
            invariant_factors: Vec::new(),
            order: 1,
        }
    }

    pub fn new(factors: Vec<u64>) -> AbGroupShape {
        let invariant_factors: Vec<u64> = factors.into_iter().filter(|&d| d > 1).collect();
        let order = invariant_factors.iter().product();
        AbGroupShape {
            invariant_factors,
            order,
        }
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    /// Order of the element with the given coordinates.
    pub fn order_of(&self, coords: &[u64]) -> u64 {
        let mut ord = 1u64;
        for (&d, &x) in self.invariant_factors.iter().zip(coords) {
            if x == 0 {
                continue;
            }
            let g = gcd_u64(d, x);
            ord = lcm_u64(ord, d / g);
        }
        ord
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&d, (&x, &y))| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .zip(a.iter())
            .map(|(&d, &x)| (d - x) % d)
            .collect()
    }

    pub fn mul_scalar(&self, a: &[u64], n: u64) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .zip(a.iter())
            .map(|(&d, &x)| (x as u128 * n as u128 % d as u128) as u64)
            .collect()
    }

    pub fn is_identity(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Invariant factors of the subgroup of elements with order prime to p
    /// (the p-part stripped from each factor keeps the divisibility chain).
    pub fn prime_to_p_part(&self, p: u64) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .map(|&d| {
                let mut d = d;
                while d % p == 0 {
                    d /= p;
                }
                d
            })
            .filter(|&d| d > 1)
            .collect()
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

/// Smith normal form of a square integer matrix, tracking the right
/// transform: returns (diag, v, v_inv) with u * m * v = diag for some
/// unimodular u, and v * v_inv = identity.
fn smith_with_transform(mut m: Vec<Vec<i64>>) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = m.len();
    let mut v = identity(n);
    let mut v_inv = identity(n);

    // column op: C_j += t * C_i on m and v; inverse op R_i -= t * R_j on v_inv
    fn col_add(m: &mut [Vec<i64>], v: &mut [Vec<i64>], vi: &mut [Vec<i64>], i: usize, j: usize, t: i64) {
        for row in m.iter_mut() {
            row[j] += t * row[i];
        }
        for row in v.iter_mut() {
            row[j] += t * row[i];
        }
        for k in 0..vi.len() {
            vi[i][k] -= t * vi[j][k];
        }
    }
    fn col_swap(m: &mut [Vec<i64>], v: &mut [Vec<i64>], vi: &mut [Vec<i64>], i: usize, j: usize) {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vi.swap(i, j);
    }
    fn col_neg(m: &mut [Vec<i64>], v: &mut [Vec<i64>], vi: &mut [Vec<i64>], i: usize) {
        for row in m.iter_mut() {
            row[i] = -row[i];
        }
        for row in v.iter_mut() {
            row[i] = -row[i];
        }
        for k in 0..vi[i].len() {
            vi[i][k] = -vi[i][k];
        }
    }
    fn row_add(m: &mut [Vec<i64>], i: usize, j: usize, t: i64) {
        for k in 0..m[0].len() {
            m[j][k] += t * m[i][k];
        }
    }
    fn row_swap(m: &mut [Vec<i64>], i: usize, j: usize) {
        m.swap(i, j);
    }

    for pivot in 0..n {
        loop {
            // find the smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in pivot..n {
                for j in pivot..n {
                    if m[i][j] != 0
                        && best
                            .map(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = match best {
                Some(x) => x,
                None => break, // all-zero block
            };
            if bi != pivot {
                row_swap(&mut m, pivot, bi);
            }
            if bj != pivot {
                col_swap(&mut m, &mut v, &mut v_inv, pivot, bj);
            }
            let mut done = true;
            for i in pivot + 1..n {
                let t = m[i][pivot].div_euclid(m[pivot][pivot]);
                if t != 0 {
                    row_add(&mut m, pivot, i, -t);
                }
                if m[i][pivot] != 0 {
                    done = false;
                }
            }
            for j in pivot + 1..n {
                let t = m[pivot][j].div_euclid(m[pivot][pivot]);
                if t != 0 {
                    col_add(&mut m, &mut v, &mut v_inv, pivot, j, -t);
                }
                if m[pivot][j] != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility condition: pivot must divide the rest
                let p = m[pivot][pivot];
                let mut fixed = true;
                'outer: for i in pivot + 1..n {
                    for j in pivot + 1..n {
                        if m[i][j] % p != 0 {
                            // fold that row in and retry
                            row_add(&mut m, i, pivot, 1);
                            fixed = false;
                            break 'outer;
                        }
                    }
                }
                if fixed {
                    if m[pivot][pivot] < 0 {
                        col_neg(&mut m, &mut v, &mut v_inv, pivot);
                    }
                    break;
                }
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i]).collect();
    (diag, v, v_inv)
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// The structure G = Z^k / <relations> together with the coordinate change.
/// `coords_of` turns a generator-exponent word into canonical coordinates in
/// the invariant-factor decomposition, and `basis_words` give words whose
/// classes realize the invariant factors.
#[derive(Clone, Debug)]
pub struct RelationStructure {
    pub shape: AbGroupShape,
    /// Indices of the diagonal entries kept as invariant factors.
    kept: Vec<usize>,
    v: Vec<Vec<i64>>,
    v_inv: Vec<Vec<i64>>,
    diag: Vec<i64>,
}

impl RelationStructure {
    /// Builds the quotient structure from a complete relation set. The
    /// expected order certifies completeness.
    pub fn from_relations(k: usize, relations: &[Vec<i64>], expected_order: u64) -> Result<RelationStructure> {
        if k == 0 {
            if expected_order != 1 {
                return Err(Error::Internal("no generators for a nontrivial group".into()));
            }
            return Ok(RelationStructure {
                shape: AbGroupShape::trivial(),
                kept: Vec::new(),
                v: Vec::new(),
                v_inv: Vec::new(),
                diag: Vec::new(),
            });
        }
        // Hermite-reduce the relation rows into a k x k lattice basis.
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for r in relations {
            assert_eq!(r.len(), k);
            let mut row = r.clone();
            for b in &basis {
                let lead = b.iter().position(|&x| x != 0).unwrap();
                if row[lead] != 0 && b[lead] != 0 {
                    reduce_row(&mut row, b, lead);
                }
            }
            if row.iter().any(|&x| x != 0) {
                basis.push(row);
                hermite_sort(&mut basis);
                hermite_sweep(&mut basis);
            }
        }
        if basis.len() != k {
            return Err(Error::Internal(format!(
                "relation lattice has rank {} < {}; the group would be infinite",
                basis.len(),
                k
            )));
        }
        let (diag, v, v_inv) = smith_with_transform(basis);
        let det: i64 = diag.iter().product();
        if det.unsigned_abs() != expected_order {
            return Err(Error::Internal(format!(
                "relation lattice determinant {} does not match the group order {}",
                det.abs(),
                expected_order
            )));
        }
        let mut kept = Vec::new();
        let mut factors = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            if d.unsigned_abs() > 1 {
                kept.push(i);
                factors.push(d.unsigned_abs());
            }
        }
        Ok(RelationStructure {
            shape: AbGroupShape::new(factors),
            kept,
            v,
            v_inv,
            diag,
        })
    }

    /// Canonical coordinates of a generator word.
    pub fn coords_of(&self, word: &[i64]) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.kept.len());
        for &j in &self.kept {
            let mut s: i128 = 0;
            for (i, &w) in word.iter().enumerate() {
                s += w as i128 * self.v[i][j] as i128;
            }
            let d = self.diag[j].unsigned_abs() as i128;
            out.push(s.rem_euclid(d) as u64);
        }
        out
    }

    /// For each invariant factor, a generator word realizing it.
    pub fn basis_words(&self) -> Vec<Vec<i64>> {
        self.kept
            .iter()
            .map(|&j| self.v_inv[j].clone())
            .collect()
    }
}

fn reduce_row(row: &mut [i64], by: &[i64], lead: usize) {
    // full gcd reduction of row[lead] against by[lead] is handled by repeated
    // subtraction of the integer quotient
    let t = row[lead].div_euclid(by[lead]);
    if t != 0 {
        for (r, b) in row.iter_mut().zip(by) {
            *r -= t * b;
        }
    }
    // if a remainder is left the caller re-sorts and sweeps
}

fn hermite_sort(basis: &mut Vec<Vec<i64>>) {
    basis.sort_by_key(|r| r.iter().position(|&x| x != 0).unwrap_or(usize::MAX));
}

/// Repeated pairwise reduction until the basis is in echelon form with
/// distinct leading columns.
fn hermite_sweep(basis: &mut Vec<Vec<i64>>) {
    loop {
        hermite_sort(basis);
        let mut changed = false;
        let mut i = 0;
        while i + 1 < basis.len() {
            let lead_i = basis[i].iter().position(|&x| x != 0).unwrap();
            let lead_j = basis[i + 1].iter().position(|&x| x != 0).unwrap();
            if lead_i == lead_j {
                // gcd-reduce the pair at this column
                let (a, b) = basis.split_at_mut(i + 1);
                let (ri, rj) = (&mut a[i], &mut b[0]);
                while rj[lead_i] != 0 {
                    let t = ri[lead_i].div_euclid(rj[lead_i]);
                    for (x, y) in ri.iter_mut().zip(rj.iter()) {
                        *x -= t * y;
                    }
                    std::mem::swap(ri, rj);
                }
                changed = true;
            }
            i += 1;
        }
        basis.retain(|r| r.iter().any(|&x| x != 0));
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_from_one_generator() {
        let rs = RelationStructure::from_relations(1, &[vec![7]], 7).unwrap();
        assert_eq!(rs.shape.invariant_factors, vec![7]);
        assert_eq!(rs.coords_of(&[0]), vec![0]);
        assert_eq!(rs.coords_of(&[3]), vec![3]);
        assert_eq!(rs.shape.order_of(&rs.coords_of(&[1])), 7);
    }

    #[test]
    fn product_of_cyclics() {
        // Z^2 / <(2,0),(0,6)> = Z/2 x Z/6
        let rs = RelationStructure::from_relations(2, &[vec![2, 0], vec![0, 6]], 12).unwrap();
        assert_eq!(rs.shape.invariant_factors, vec![2, 6]);
        // basis words have the right orders
        for (w, d) in rs.basis_words().iter().zip(&rs.shape.invariant_factors) {
            assert_eq!(rs.shape.order_of(&rs.coords_of(w)), *d);
        }
    }

    #[test]
    fn redundant_and_mixing_relations() {
        // Z^2 / <(1,2),(0,14),(3,6)>: first relation makes g1 = -2 g2 so the
        // group is cyclic of order 14
        let rs =
            RelationStructure::from_relations(2, &[vec![1, 2], vec![0, 14], vec![3, 6]], 14)
                .unwrap();
        assert_eq!(rs.shape.invariant_factors, vec![14]);
        let g2 = rs.coords_of(&[0, 1]);
        assert_eq!(rs.shape.order_of(&g2), 14);
        let g1 = rs.coords_of(&[1, 0]);
        // g1 + 2 g2 = 0
        assert!(rs.shape.is_identity(&rs.shape.add(&g1, &rs.shape.mul_scalar(&g2, 2))));
    }

    #[test]
    fn wrong_expected_order_is_loud() {
        assert!(RelationStructure::from_relations(1, &[vec![7]], 8).is_err());
        assert!(RelationStructure::from_relations(2, &[vec![2, 0]], 2).is_err());
    }

    #[test]
    fn prime_to_p_stripping() {
        let shape = AbGroupShape::new(vec![2, 6, 18]);
        assert_eq!(shape.prime_to_p_part(3), vec![2, 2, 2]);
        assert_eq!(shape.prime_to_p_part(2), vec![3, 9]);
    }
}
