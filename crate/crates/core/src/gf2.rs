//! Linear systems over GF(2) with up to 64 unknowns.

use crate::error::{Error, Result};

/// Reduced row echelon form of `A x = b`, rows packed as bitmasks.
#[derive(Clone, Debug)]
pub struct Gf2System {
    unknowns: usize,
    /// `(pivot column, row, rhs)` for each independent equation.
    pivots: Vec<(usize, u64, bool)>,
    inconsistent: bool,
}

impl Gf2System {
    pub fn new(unknowns: usize, equations: impl IntoIterator<Item = (u64, bool)>) -> Self {
        assert!(unknowns <= 64);
        let mut pivots: Vec<(usize, u64, bool)> = Vec::new();
        let mut inconsistent = false;
        for (mut row, mut rhs) in equations {
            for &(col, prow, prhs) in &pivots {
                if row >> col & 1 == 1 {
                    row ^= prow;
                    rhs ^= prhs;
                }
            }
            if row == 0 {
                inconsistent |= rhs;
                continue;
            }
            let col = row.trailing_zeros() as usize;
            for p in pivots.iter_mut() {
                if p.1 >> col & 1 == 1 {
                    p.1 ^= row;
                    p.2 ^= rhs;
                }
            }
            pivots.push((col, row, rhs));
        }
        Gf2System { unknowns, pivots, inconsistent }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// One solution with every free variable zero.
    pub fn particular(&self) -> Result<u64> {
        if self.inconsistent {
            return Err(Error::Inconsistent);
        }
        Ok(self.pivots.iter().filter(|p| p.2).fold(0, |x, p| x | 1 << p.0))
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<u64> {
        let pivot_mask = self.pivots.iter().fold(0u64, |m, p| m | 1 << p.0);
        (0..self.unknowns)
            .filter(|&c| pivot_mask >> c & 1 == 0)
            .map(|free| self.pivots.iter().filter(|p| p.1 >> free & 1 == 1).fold(1u64 << free, |v, p| v | 1 << p.0))
            .collect()
    }

    /// Every solution, walking the coset in Gray-code order.
    pub fn solutions(&self) -> Result<Vec<u64>> {
        let mut x = self.particular()?;
        let basis = self.kernel_basis();
        let mut out = Vec::with_capacity(1 << basis.len());
        out.push(x);
        for i in 1u64..1 << basis.len() {
            x ^= basis[i.trailing_zeros() as usize];
            out.push(x);
        }
        Ok(out)
    }
}
