//! Exact integer linear algebra: Smith normal form and first homology of a
//! one-relator presentation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::words::exponent_vector;
use crate::Presentation;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().map(Into::into).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += q · row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * q;
            self[(dst, c)] += v;
        }
    }

    /// col[dst] += q · col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * q;
            self[(r, dst)] += v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.entries[r * self.cols + c]
    }
}

/// Invariant factors `d₁ | d₂ | … ` of `m`, nonnegative, zeros trailing,
/// `min(rows, cols)` entries in total.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let n = a.rows.min(a.cols);
    let mut factors = Vec::with_capacity(n);
    for t in 0..n {
        // least absolute nonzero entry of the trailing block as pivot
        let Some((pr, pc)) = least_entry(&a, t) else {
            break;
        };
        a.swap_rows(t, pr);
        a.swap_cols(t, pc);
        loop {
            let mut dirty = false;
            for r in t + 1..a.rows {
                if a[(r, t)].is_zero() {
                    continue;
                }
                let q = a[(r, t)].div_floor(&a[(t, t)]);
                a.add_row(r, t, &-q);
                if !a[(r, t)].is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..a.cols {
                if a[(t, c)].is_zero() {
                    continue;
                }
                let q = a[(t, c)].div_floor(&a[(t, t)]);
                a.add_col(c, t, &-q);
                if !a[(t, c)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pr, pc) = least_in_cross(&a, t);
                a.swap_rows(t, pr);
                a.swap_cols(t, pc);
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..a.rows)
                .flat_map(|r| (t + 1..a.cols).map(move |c| (r, c)))
                .find(|&(r, c)| !a[(r, c)].is_multiple_of(&a[(t, t)]));
            match bad {
                Some((r, _)) => a.add_row(t, r, &BigInt::one()),
                None => break,
            }
        }
        factors.push(a[(t, t)].abs());
    }
    factors.resize(n, BigInt::zero());
    factors
}

fn least_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    (t..a.rows)
        .flat_map(|r| (t..a.cols).map(move |c| (r, c)))
        .filter(|&p| !a[p].is_zero())
        .min_by(|&p, &q| a[p].abs().cmp(&a[q].abs()))
}

fn least_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let col = (t..a.rows).map(|r| (r, t));
    let row = (t + 1..a.cols).map(|c| (t, c));
    col.chain(row)
        .filter(|&p| !a[p].is_zero())
        .min_by(|&p, &q| a[p].abs().cmp(&a[q].abs()))
        .expect("pivot cross has a nonzero entry")
}

/// Rational rank and torsion coefficients of a first homology group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct H1Data {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

/// Homology data of the cokernel of `m` viewed as a map into `ℤ^{rows}`.
pub fn cokernel(m: &IntMatrix) -> H1Data {
    let factors = smith_normal_form(m);
    let rank = factors.iter().filter(|d| !d.is_zero()).count();
    H1Data {
        betti: m.rows - rank,
        torsion: factors.into_iter().filter(|d| d > &BigInt::one()).collect(),
    }
}

/// `H₁(F(S)/⟨⟨w⟩⟩; ℤ)` from the `|S| × 1` relation matrix.
pub fn h1_of_presentation(p: &Presentation) -> H1Data {
    let e = exponent_vector(&p.relator, &p.alphabet);
    let rows: Vec<Vec<i64>> = e.0.iter().map(|&x| vec![x]).collect();
    cokernel(&IntMatrix::from_rows(&rows))
}
