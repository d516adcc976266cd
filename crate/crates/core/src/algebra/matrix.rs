//! 2x2 Hermite and Smith normal forms over A = F_q[T], plus the small
//! fractional-matrix helpers the lattice module builds on.

use super::poly::PolyA;
use crate::error::{Error, Result};

/// A 2x2 matrix over A, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub rows: [[PolyA; 2]; 2],
}

impl Mat2 {
    pub fn new(rows: [[PolyA; 2]; 2]) -> Mat2 {
        Mat2 { rows }
    }

    pub fn det(&self) -> PolyA {
        self.rows[0][0]
            .mul(&self.rows[1][1])
            .sub(&self.rows[0][1].mul(&self.rows[1][0]))
    }

    /// Adjugate: adj(M) * M = det(M) * I.
    pub fn adj(&self) -> Mat2 {
        Mat2::new([
            [self.rows[1][1].clone(), self.rows[0][1].neg()],
            [self.rows[1][0].neg(), self.rows[0][0].clone()],
        ])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| {
            self.rows[i][0]
                .mul(&other.rows[0][j])
                .add(&self.rows[i][1].mul(&other.rows[1][j]))
        };
        Mat2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// Canonical triangular form of a rank-2 module: rows (a, 0) and (b, c) with
/// a, c monic and deg b < deg a.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hnf2 {
    pub a: PolyA,
    pub b: PolyA,
    pub c: PolyA,
}

/// Hermite normal form of the A-span of the given row vectors.
pub fn hnf2(gens: &[(PolyA, PolyA)]) -> Result<Hnf2> {
    let fq = match gens.first() {
        Some(g) => g.0.field().clone(),
        None => return Err(Error::RankDeficient),
    };
    // Eliminate the second column down to a single pivot row (b, c).
    let mut pivot: Option<(PolyA, PolyA)> = None;
    let mut xs: Vec<PolyA> = Vec::new();
    for (x, y) in gens {
        fq.ensure_same(x.field())?;
        fq.ensure_same(y.field())?;
        if y.is_zero() {
            xs.push(x.clone());
            continue;
        }
        match pivot.take() {
            None => pivot = Some((x.clone(), y.clone())),
            Some((px, py)) => {
                let (g, s, t) = py.xgcd(y);
                let nx = s.mul(&px).add(&t.mul(x));
                // the eliminated combination has zero second entry
                let ex = py.div_exact(&g)?.mul(x).sub(&y.div_exact(&g)?.mul(&px));
                xs.push(ex);
                pivot = Some((nx, g));
            }
        }
    }
    let (bx, c) = pivot.ok_or(Error::RankDeficient)?;
    let mut a = PolyA::zero(&fq);
    for x in &xs {
        a = a.gcd(x);
    }
    if a.is_zero() {
        return Err(Error::RankDeficient);
    }
    // normalize: c monic (the xgcd already returns monic g when nonzero, but
    // a single-generator pivot may not be), b reduced mod a
    let unit = fq.inv(c.lead());
    let c = c.scale(unit);
    let b = bx.scale(unit).rem(&a)?;
    Ok(Hnf2 { a, b, c })
}

/// Smith normal form of a nonsingular 2x2 matrix over A: monic (d1, d2) with
/// d1 | d2, d1 = gcd of the entries and d1*d2 = det up to a unit.
pub fn snf2(m: &Mat2) -> Result<(PolyA, PolyA)> {
    let det = m.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let mut d1 = PolyA::zero(m.det().field());
    for i in 0..2 {
        for j in 0..2 {
            d1 = d1.gcd(&m.rows[i][j]);
        }
    }
    let d2 = det.monic().div_exact(&d1)?;
    Ok((d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Fq;

    fn f3() -> Fq {
        Fq::prime(3).unwrap()
    }

    fn p(s: &str) -> PolyA {
        PolyA::parse(&f3(), s).unwrap()
    }

    fn h(gens: &[(&str, &str)]) -> Hnf2 {
        let gens: Vec<(PolyA, PolyA)> = gens.iter().map(|(x, y)| (p(x), p(y))).collect();
        hnf2(&gens).unwrap()
    }

    #[test]
    fn identity_basis() {
        let out = h(&[("1", "0"), ("0", "1")]);
        assert_eq!((out.a, out.b, out.c), (p("1"), p("0"), p("1")));
    }

    #[test]
    fn coprime_first_column() {
        let out = h(&[("T", "0"), ("T+1", "0"), ("0", "T")]);
        assert_eq!((out.a, out.b, out.c), (p("1"), p("0"), p("T")));
    }

    #[test]
    fn already_reduced() {
        let out = h(&[("T^2", "0"), ("T", "1")]);
        assert_eq!((out.a, out.b, out.c), (p("T^2"), p("T"), p("1")));
    }

    #[test]
    fn rank_deficient_detected() {
        let gens = vec![(p("T"), p("0")), (p("T^2"), p("0"))];
        assert_eq!(hnf2(&gens).unwrap_err(), Error::RankDeficient);
        let gens = vec![(p("0"), p("T")), (p("0"), p("1"))];
        assert_eq!(hnf2(&gens).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn idempotent() {
        let out = h(&[("T^3+1", "T"), ("T+2", "T^2"), ("2*T", "1")]);
        let again = hnf2(&[
            (out.a.clone(), p("0")),
            (out.b.clone(), out.c.clone()),
        ])
        .unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn snf_examples() {
        let m = Mat2::new([[p("1"), p("0")], [p("0"), p("T^3")]]);
        assert_eq!(snf2(&m).unwrap(), (p("1"), p("T^3")));
        let m = Mat2::new([[p("T"), p("0")], [p("0"), p("T")]]);
        assert_eq!(snf2(&m).unwrap(), (p("T"), p("T")));
        let m = Mat2::new([[p("T^2"), p("0")], [p("T"), p("1")]]);
        assert_eq!(snf2(&m).unwrap(), (p("1"), p("T^2")));
        let m = Mat2::new([[p("T"), p("T")], [p("T"), p("T")]]);
        assert_eq!(snf2(&m).unwrap_err(), Error::Singular);
    }
}
