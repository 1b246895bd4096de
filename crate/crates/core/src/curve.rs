//! Hyperelliptic curves y^2 = f(x) with deg f = 2g + 1, their Cartier-Manin
//! matrices and the derived invariants.
//!
//! With f^((p-1)/2) = sum kappa_i x^i, the Cartier-Manin matrix is the g x g
//! matrix whose (i, j) entry (1-indexed) is kappa_{p*i - j}; indices outside
//! the expansion read as zero. The a-number is g - rank(A) and the p-rank is
//! the rank of the g-fold Frobenius-twisted product A * A^(s) * ... * A^(s^(g-1)).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field};
use crate::linalg::{rank_in_place, Matrix};
use crate::poly::{half_exponent, Poly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("unsupported-degree: only odd-degree models are supported, got degree {0}")]
    UnsupportedDegree(usize),
    #[error("defining polynomial must have degree at least 3")]
    DegreeTooSmall,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    f: Poly,
    genus: usize,
    smooth: bool,
}

impl Curve {
    /// No normalization is applied to f; singular models are accepted and
    /// flagged through [`Curve::is_smooth`].
    pub fn new(f: Poly) -> Result<Curve, CurveError> {
        let deg = match f.degree() {
            Some(d) if d >= 3 => d,
            Some(d) if d % 2 == 0 && d > 0 => return Err(CurveError::UnsupportedDegree(d)),
            _ => return Err(CurveError::DegreeTooSmall),
        };
        if deg % 2 == 0 {
            return Err(CurveError::UnsupportedDegree(deg));
        }
        let smooth = f.is_squarefree()?;
        Ok(Curve {
            genus: (deg - 1) / 2,
            smooth,
            f,
        })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn cartier_matrix(&self) -> CartierMatrix {
        let kappa = self.f.half_power().expect("curve polynomial is nonzero");
        CartierMatrix::from_kappa(self.field(), kappa.coeffs(), self.genus)
    }

    pub fn a_number(&self) -> usize {
        self.genus - self.cartier_matrix().rank()
    }

    pub fn p_rank(&self) -> usize {
        self.cartier_matrix().p_rank()
    }

    pub fn invariants(&self) -> Invariants {
        let a = self.cartier_matrix();
        Invariants::from_matrix(&a, self.smooth)
    }
}

/// Computes the invariants bundle straight from a polynomial.
pub fn invariants(f: &Poly) -> Result<Invariants, CurveError> {
    Ok(Curve::new(f.clone())?.invariants())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierMatrix {
    field: Field,
    matrix: Matrix,
}

impl CartierMatrix {
    /// Reads entry (i, j) = kappa_{p*i - j} from the coefficients of
    /// f^((p-1)/2).
    pub fn from_kappa(field: &Field, kappa: &[Elem], genus: usize) -> CartierMatrix {
        let mut data = Vec::with_capacity(genus * genus);
        fill_cartier(field.characteristic() as usize, kappa, genus, &mut data);
        let rows = data.chunks(genus.max(1)).map(<[Elem]>::to_vec).collect();
        CartierMatrix {
            field: field.clone(),
            matrix: if genus == 0 {
                Matrix::zeros(0, 0)
            } else {
                Matrix::from_rows(rows)
            },
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn genus(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// 1-indexed entry, matching the usual a_{ij} labelling.
    pub fn entry(&self, i: usize, j: usize) -> Elem {
        self.matrix.get(i - 1, j - 1)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank(&self.field)
    }

    pub fn p_rank(&self) -> usize {
        p_rank_of(&self.field, &self.matrix)
    }
}

/// Rank of A * A^(s) * ... * A^(s^(g-1)) where s is the p-th power map
/// applied entrywise.
pub fn p_rank_of(field: &Field, a: &Matrix) -> usize {
    let g = a.rows();
    let mut product = a.clone();
    for i in 1..g {
        product = product.mul(field, &a.frobenius_twist(field, i as u64));
    }
    product.rank(field)
}

/// Writes the g x g Cartier-Manin entries row-major into `out`.
pub(crate) fn fill_cartier(p: usize, kappa: &[Elem], genus: usize, out: &mut Vec<Elem>) {
    out.clear();
    for i in 1..=genus {
        for j in 1..=genus {
            let v = (p * i)
                .checked_sub(j)
                .and_then(|idx| kappa.get(idx).copied())
                .unwrap_or(Elem::ZERO);
            out.push(v);
        }
    }
}

/// Rank of the Cartier-Manin matrix built into `buf`.
pub(crate) fn cartier_rank(
    field: &Field,
    kappa: &[Elem],
    genus: usize,
    buf: &mut Vec<Elem>,
) -> usize {
    fill_cartier(field.characteristic() as usize, kappa, genus, buf);
    rank_in_place(field, buf, genus, genus)
}

/// Genus, smoothness, rank of A, a-number and p-rank of one curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub genus: usize,
    pub smooth: bool,
    #[serde(rename = "rank_A")]
    pub rank_a: usize,
    pub a_number: usize,
    pub p_rank: usize,
}

impl Invariants {
    pub fn from_matrix(a: &CartierMatrix, smooth: bool) -> Invariants {
        let genus = a.genus();
        let rank_a = a.rank();
        Invariants {
            genus,
            smooth,
            rank_a,
            a_number: genus - rank_a,
            p_rank: a.p_rank(),
        }
    }
}

/// Exponent (p-1)/2 used for the kappa expansion.
pub fn kappa_exponent(field: &Field) -> u64 {
    half_exponent(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(p: u64, c: &[i64]) -> Curve {
        let field = Field::prime(p).unwrap();
        Curve::new(Poly::from_ints(&field, c)).unwrap()
    }

    fn entries(a: &CartierMatrix) -> Vec<Vec<u32>> {
        a.matrix()
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(Elem::index).collect())
            .collect()
    }

    #[test]
    fn construction() {
        let c = curve(3, &[0, 1, 0, 0, 0, 1]);
        assert_eq!(c.genus(), 2);
        assert!(c.is_smooth());
        let s = curve(3, &[0, 0, 0, 0, 0, 1]);
        assert!(!s.is_smooth());
        let f3 = Field::prime(3).unwrap();
        assert_eq!(
            Curve::new(Poly::from_ints(&f3, &[1, 0, 0, 0, 1])),
            Err(CurveError::UnsupportedDegree(4))
        );
        assert_eq!(
            Curve::new(Poly::from_ints(&f3, &[1, 1])),
            Err(CurveError::DegreeTooSmall)
        );
        assert_eq!(
            Curve::new(Poly::from_ints(&f3, &[1, 1, 1])),
            Err(CurveError::UnsupportedDegree(2))
        );
        assert_eq!(Curve::new(Poly::zero(&f3)), Err(CurveError::DegreeTooSmall));
    }

    #[test]
    fn matrices_of_worked_examples() {
        assert_eq!(
            entries(&curve(3, &[0, 1, 0, 0, 0, 1]).cartier_matrix()),
            vec![vec![0, 1], vec![1, 0]]
        );
        assert_eq!(
            entries(&curve(3, &[0, 0, 0, 0, 0, 1]).cartier_matrix()),
            vec![vec![0, 0], vec![1, 0]]
        );
        assert!(curve(5, &[0, 1, 0, 0, 0, 1])
            .cartier_matrix()
            .matrix()
            .is_zero());
    }

    #[test]
    fn invariants_of_worked_examples() {
        let ordinary = curve(3, &[0, 1, 0, 0, 0, 1]).invariants();
        assert_eq!(
            ordinary,
            Invariants {
                genus: 2,
                smooth: true,
                rank_a: 2,
                a_number: 0,
                p_rank: 2
            }
        );
        let superspecial = curve(5, &[0, 1, 0, 0, 0, 1]).invariants();
        assert_eq!(
            superspecial,
            Invariants {
                genus: 2,
                smooth: true,
                rank_a: 0,
                a_number: 2,
                p_rank: 0
            }
        );
        // A = [[0,0],[1,0]] is nilpotent, so A * A^(s) = 0.
        let cusp = curve(3, &[0, 0, 0, 0, 0, 1]).invariants();
        assert_eq!(
            cusp,
            Invariants {
                genus: 2,
                smooth: false,
                rank_a: 1,
                a_number: 1,
                p_rank: 0
            }
        );
    }

    #[test]
    fn p_rank_edge_cases() {
        let f = Field::new(7, 2, None).unwrap();
        assert_eq!(p_rank_of(&f, &Matrix::zeros(3, 3)), 0);
        let g = f.generator();
        let invertible = Matrix::from_rows(vec![
            vec![g, Elem::ONE, Elem::ZERO],
            vec![Elem::ZERO, g, Elem(5)],
            vec![Elem(9), Elem::ZERO, Elem::ONE],
        ]);
        assert_eq!(invertible.rank(&f), 3);
        assert_eq!(p_rank_of(&f, &invertible), 3);
    }

    #[test]
    fn out_of_range_kappa_reads_zero() {
        // g > p: the first row asks for negative kappa indices.
        let c = curve(3, &[0, 1, 2, 0, 1, 0, 1, 2, 0, 1]);
        let f = Poly::from_ints(c.field(), &[0, 1, 2, 0, 1, 0, 1, 2, 0, 1]);
        let a = c.cartier_matrix();
        let kappa = f.half_power().unwrap();
        assert_eq!(a.genus(), 4);
        assert_eq!(a.entry(1, 4), Elem::ZERO);
        assert_eq!(a.entry(2, 1), kappa.coeff(5));
        assert_eq!(a.entry(4, 4), kappa.coeff(8));
    }
}
