//! Integer lattices in Hermite normal form with incremental insertion.

use std::fmt;

use serde::Serialize;

/// Subgroup of `Z^dim` generated by the inserted vectors, stored as an
/// upper-echelon HNF basis: pivots strictly increase, pivot entries are
/// positive and entries above each pivot are reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerLattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

fn pivot(row: &[i64]) -> usize {
    row.iter().position(|&x| x != 0).expect("basis rows are nonzero")
}

impl IntegerLattice {
    pub fn trivial(dim: usize) -> Self {
        IntegerLattice { dim, basis: Vec::new() }
    }

    pub fn from_generators<'a>(dim: usize, gens: impl IntoIterator<Item = &'a [i64]>) -> Self {
        let mut lat = IntegerLattice::trivial(dim);
        for g in gens {
            lat.insert(g);
        }
        lat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Index of the lattice in `Z^dim` when of full rank (product of pivots).
    pub fn determinant(&self) -> Option<i64> {
        (self.rank() == self.dim).then(|| self.basis.iter().map(|r| r[pivot(r)]).product())
    }

    /// True iff the lattice is all of `Z^dim`.
    pub fn is_full(&self) -> bool {
        self.determinant() == Some(1)
    }

    /// Adds a generator. Returns true if the lattice grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.dim, "generator has wrong dimension");
        if self.contains(v) {
            return false;
        }
        let mut v = v.to_vec();
        let mut i = 0;
        while let Some(c) = v.iter().position(|&x| x != 0) {
            while i < self.basis.len() && pivot(&self.basis[i]) < c {
                i += 1;
            }
            if i == self.basis.len() || pivot(&self.basis[i]) > c {
                if v[c] < 0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
                self.basis.insert(i, v);
                break;
            }
            let b = &self.basis[i];
            let (g, s, t) = ext_gcd(b[c], v[c]);
            let (bq, vq) = (b[c] / g, v[c] / g);
            let new_b: Vec<i64> = b.iter().zip(&v).map(|(&x, &y)| s * x + t * y).collect();
            let new_v: Vec<i64> = b.iter().zip(&v).map(|(&x, &y)| vq * x - bq * y).collect();
            self.basis[i] = new_b;
            v = new_v;
        }
        self.reduce();
        true
    }

    fn reduce(&mut self) {
        for i in 0..self.basis.len() {
            let p = pivot(&self.basis[i]);
            if self.basis[i][p] < 0 {
                self.basis[i].iter_mut().for_each(|x| *x = -*x);
            }
            let pv = self.basis[i][p];
            for j in 0..i {
                let q = self.basis[j][p].div_euclid(pv);
                if q != 0 {
                    let row = self.basis[i].clone();
                    self.basis[j].iter_mut().zip(&row).for_each(|(x, &y)| *x -= q * y);
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut v = v.to_vec();
        for row in &self.basis {
            let p = pivot(row);
            if v[..p].iter().any(|&x| x != 0) {
                return false;
            }
            if v[p] % row[p] != 0 {
                return false;
            }
            let q = v[p] / row[p];
            v.iter_mut().zip(row).for_each(|(x, &y)| *x -= q * y);
        }
        v.iter().all(|&x| x == 0)
    }

    /// Lattice containment `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &IntegerLattice) -> bool {
        self.basis.iter().all(|r| other.contains(r))
    }
}

impl fmt::Display for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis.iter().map(|r| format!("{r:?}")).collect();
        write!(f, "<{}>", rows.join(", "))
    }
}
