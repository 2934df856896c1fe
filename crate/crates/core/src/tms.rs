//! Finite-state topological Markov shifts: admissibility, graph-theoretic
//! structure, periodic orbits and the integer lattices generated by cocycle
//! sums over periodic orbits.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::IntegerLattice;
use crate::words::{Symbol, Word};

/// Longest period accepted by [`Tms::periodic_orbits`].
pub const MAX_ORBIT_LENGTH: usize = 32;

/// Wire format of a transition matrix file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TmsFile {
    pub n_states: usize,
    pub rows: Vec<Vec<u8>>,
}

/// A 0/1 transition matrix with no dead states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tms {
    rows: Vec<Vec<bool>>,
}

impl Tms {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTms("no states".into()));
        }
        let mut out = Vec::with_capacity(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidTms(format!(
                    "row {i} has length {}, expected {n}",
                    r.len()
                )));
            }
            if let Some(&bad) = r.iter().find(|&&x| x > 1) {
                return Err(Error::InvalidTms(format!("entry {bad} in row {i} is not 0 or 1")));
            }
            out.push(r.iter().map(|&x| x == 1).collect::<Vec<_>>());
        }
        for s in 0..n {
            if !out[s].iter().any(|&b| b) {
                return Err(Error::InvalidTms(format!("state {s} has no successor")));
            }
            if !out.iter().any(|r| r[s]) {
                return Err(Error::InvalidTms(format!("state {s} has no predecessor")));
            }
        }
        Ok(Tms { rows: out })
    }

    pub fn from_file(file: &TmsFile) -> Result<Self> {
        if file.rows.len() != file.n_states {
            return Err(Error::InvalidTms(format!(
                "n_states = {} but {} rows given",
                file.n_states,
                file.rows.len()
            )));
        }
        Tms::new(file.rows.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TmsFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Tms::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Tms::from_json(&text)
    }

    pub fn to_file(&self) -> TmsFile {
        TmsFile {
            n_states: self.n_states(),
            rows: self.rows.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect(),
        }
    }

    /// The full shift on `n` symbols.
    pub fn full(n: usize) -> Self {
        Tms {
            rows: vec![vec![true; n]; n],
        }
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn allowed(&self, s: Symbol, t: Symbol) -> bool {
        self.rows[s as usize][t as usize]
    }

    pub fn successors(&self, s: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.rows[s as usize]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(t, _)| t as Symbol)
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> Result<bool> {
        Word::from(w).check_alphabet(self.n_states())?;
        Ok(w.windows(2).all(|p| self.allowed(p[0], p[1])))
    }

    /// BFS levels from state 0 along forward edges; `None` for unreachable.
    fn levels(&self) -> Vec<Option<usize>> {
        let n = self.n_states();
        let mut level = vec![None; n];
        level[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if self.rows[u][v] && level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.n_states();
        if self.levels().iter().any(Option::is_none) {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if self.rows[u][v] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// gcd of cycle lengths, for a transitive matrix.
    fn period(&self, level: &[Option<usize>]) -> usize {
        let n = self.n_states();
        let mut g = 0usize;
        for u in 0..n {
            for v in 0..n {
                if self.rows[u][v] {
                    let (lu, lv) = (level[u].unwrap() as i64, level[v].unwrap() as i64);
                    g = gcd(g, (lu + 1 - lv).unsigned_abs() as usize);
                }
            }
        }
        g
    }

    pub fn is_mixing(&self) -> bool {
        self.is_transitive() && self.period(&self.levels()) == 1
    }

    /// Connectivity of the graph joining states whose rows share a 1.
    pub fn is_almost_onto(&self) -> bool {
        let n = self.n_states();
        let overlap = |b: usize, c: usize| (0..n).any(|t| self.rows[b][t] && self.rows[c][t]);
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(b) = stack.pop() {
            for c in 0..n {
                if !seen[c] && overlap(b, c) {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Always true for a finite matrix; also reports the number of distinct rows.
    pub fn has_finite_images(&self) -> (bool, usize) {
        let distinct: BTreeSet<&Vec<bool>> = self.rows.iter().collect();
        (true, distinct.len())
    }

    pub fn periodic_decomposition(&self) -> Result<PeriodicDecomposition> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let level = self.levels();
        let period = self.period(&level);
        let mut classes = vec![Vec::new(); period];
        for (s, l) in level.iter().enumerate() {
            classes[l.unwrap() % period].push(s as Symbol);
        }
        Ok(PeriodicDecomposition { period, classes })
    }

    /// Words `w` of length `n` starting at `s` that close up into a period-`n`
    /// point, in lexicographic order.
    pub fn periodic_orbits(&self, n: usize, s: Symbol) -> Result<Vec<Word>> {
        if n == 0 || n > MAX_ORBIT_LENGTH {
            return Err(Error::OutOfRange(format!(
                "orbit length {n} not in 1..={MAX_ORBIT_LENGTH}"
            )));
        }
        Word::from([s]).check_alphabet(self.n_states())?;
        let mut out = Vec::new();
        let mut path = vec![s];
        self.extend_cycles(n, &mut path, &mut out);
        Ok(out)
    }

    fn extend_cycles(&self, n: usize, path: &mut Vec<Symbol>, out: &mut Vec<Word>) {
        let last = *path.last().unwrap();
        if path.len() == n {
            if self.allowed(last, path[0]) {
                out.push(Word::from(path.as_slice()));
            }
            return;
        }
        for t in self.successors(last).collect::<Vec<_>>() {
            path.push(t);
            self.extend_cycles(n, path, out);
            path.pop();
        }
    }

    /// Distinct values of the Birkhoff sum of `phi` over period-`n` points
    /// through `start` (all starts when `None`), for `n = 1..=max_len`.
    fn orbit_sums(&self, phi: &AlphaCocycle, start: Option<Symbol>, max_len: usize) -> Vec<BTreeSet<Vec<i64>>> {
        let n = self.n_states();
        let starts: Vec<usize> = match start {
            Some(s) => vec![s as usize],
            None => (0..n).collect(),
        };
        let mut by_len = vec![BTreeSet::new(); max_len + 1];
        for s in starts {
            // frontier[cur] = partial sums of walks s -> ... -> cur
            let mut frontier: Vec<BTreeSet<Vec<i64>>> = vec![BTreeSet::new(); n];
            frontier[s].insert(phi.values[s].clone());
            for len in 1..=max_len {
                for (cur, sums) in frontier.iter().enumerate() {
                    if self.rows[cur][s] {
                        by_len[len].extend(sums.iter().cloned());
                    }
                }
                if len == max_len {
                    break;
                }
                let mut next = vec![BTreeSet::new(); n];
                for (cur, sums) in frontier.iter().enumerate() {
                    for t in 0..n {
                        if self.rows[cur][t] {
                            for v in sums {
                                next[t].insert(add(v, &phi.values[t]));
                            }
                        }
                    }
                }
                frontier = next;
            }
        }
        by_len
    }

    fn lattice_from_sums(phi: &AlphaCocycle, sums: &[BTreeSet<Vec<i64>>]) -> IntegerLattice {
        let mut lat = IntegerLattice::trivial(phi.dim);
        for level in sums {
            if let Some(first) = level.iter().next() {
                for v in level.iter().skip(1) {
                    lat.insert(&sub(v, first));
                }
            }
        }
        lat
    }

    /// Lattice generated by `phi_n(x) - phi_n(y)` over periodic points `x, y`
    /// of equal period `n <= max_len`.
    pub fn cocycle_lattice(&self, phi: &AlphaCocycle, max_len: usize) -> Result<IntegerLattice> {
        self.check_cocycle(phi)?;
        if !self.is_mixing() {
            return Err(Error::NotMixing);
        }
        Ok(Self::lattice_from_sums(phi, &self.orbit_sums(phi, None, max_len)))
    }

    /// Same as [`Tms::cocycle_lattice`] but using only periodic points in `[s]`.
    pub fn cocycle_lattice_at(&self, phi: &AlphaCocycle, s: Symbol, max_len: usize) -> Result<IntegerLattice> {
        self.check_cocycle(phi)?;
        Word::from([s]).check_alphabet(self.n_states())?;
        if !self.is_mixing() {
            return Err(Error::NotMixing);
        }
        Ok(Self::lattice_from_sums(phi, &self.orbit_sums(phi, Some(s), max_len)))
    }

    /// `Full` iff the orbit lattice up to `max_len` is all of `Z^d`. A proper
    /// lattice is only a verdict relative to the bound.
    pub fn is_aperiodic(&self, phi: &AlphaCocycle, max_len: usize) -> Result<Aperiodicity> {
        let lat = self.cocycle_lattice(phi, max_len)?;
        Ok(if lat.is_full() {
            Aperiodicity::Full
        } else {
            Aperiodicity::ProperAt(max_len)
        })
    }

    fn check_cocycle(&self, phi: &AlphaCocycle) -> Result<()> {
        if phi.values.len() != self.n_states() {
            return Err(Error::InvalidArgument(format!(
                "cocycle has {} values for {} states",
                phi.values.len(),
                self.n_states()
            )));
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Partition of a transitive shift into cyclically permuted classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicDecomposition {
    pub period: usize,
    /// `classes[k]` holds the states reached from state 0 by paths of length
    /// `≡ k (mod period)`; edges go from class `k` to class `k + 1`.
    pub classes: Vec<Vec<Symbol>>,
}

/// Integer-valued function of the first symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaCocycle {
    dim: usize,
    values: Vec<Vec<i64>>,
}

impl AlphaCocycle {
    pub fn new(dim: usize, values: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("cocycle dimension must be positive".into()));
        }
        if let Some(v) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "cocycle value {v:?} does not have dimension {dim}"
            )));
        }
        Ok(AlphaCocycle { dim, values })
    }

    /// Letter-counting cocycle on `n_states` symbols with `reference` sent to
    /// zero and the other symbols to the standard basis of `Z^(n-1)`.
    pub fn counting(n_states: usize, reference: Symbol) -> Result<Self> {
        if n_states < 2 || reference as usize >= n_states {
            return Err(Error::InvalidArgument(format!(
                "counting cocycle needs at least 2 states and a valid reference, got {n_states} and {reference}"
            )));
        }
        let dim = n_states - 1;
        let values = (0..n_states as Symbol)
            .map(|s| {
                let mut v = vec![0; dim];
                if s != reference {
                    v[if s < reference { s } else { s - 1 } as usize] = 1;
                }
                v
            })
            .collect();
        Ok(AlphaCocycle { dim, values })
    }

    pub fn constant(n_states: usize, value: Vec<i64>) -> Result<Self> {
        AlphaCocycle::new(value.len(), vec![value; n_states])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, s: Symbol) -> &[i64] {
        &self.values[s as usize]
    }

    /// Birkhoff sum over a word.
    pub fn sum(&self, w: &[Symbol]) -> Vec<i64> {
        w.iter()
            .fold(vec![0; self.dim], |acc, &s| add(&acc, &self.values[s as usize]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aperiodicity {
    Full,
    /// The lattice found with orbits up to this length is proper.
    ProperAt(usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pes() -> Tms {
        Tms::new(vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap()
    }

    fn golden() -> Tms {
        Tms::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn flip() -> Tms {
        Tms::new(vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(Tms::new(vec![vec![1, 0], vec![1, 0]]).is_err()); // column 1 empty
        assert!(Tms::new(vec![vec![1, 2], vec![1, 0]]).is_err());
        assert!(Tms::new(vec![vec![1, 1]]).is_err());
        assert!(Tms::from_json(r#"{"n_states": 3, "rows": [[1,1],[1,0]]}"#).is_err());
        let t = Tms::from_json(r#"{"n_states": 2, "rows": [[1,1],[1,0]]}"#).unwrap();
        assert_eq!(t, golden());
    }

    #[test]
    fn admissibility() {
        assert!(!golden().is_admissible(&[1, 1]).unwrap());
        assert!(golden().is_admissible(&[1, 0, 1, 0]).unwrap());
        assert!(golden().is_admissible(&[]).unwrap());
        assert!(golden().is_admissible(&[2]).is_err());
    }

    #[test]
    fn structural_verdicts() {
        assert!(pes().is_mixing());
        assert!(!pes().is_almost_onto());
        assert_eq!(pes().has_finite_images(), (true, 2));
        assert!(flip().is_transitive());
        assert!(!flip().is_mixing());
        assert!(golden().is_mixing());
        assert!(golden().is_almost_onto());
        assert_eq!(golden().has_finite_images(), (true, 2));
        assert!(Tms::full(2).is_almost_onto());
        assert_eq!(Tms::full(2).has_finite_images(), (true, 1));
        let reducible = Tms::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!reducible.is_transitive());
        assert_eq!(reducible.periodic_decomposition(), Err(Error::NotTransitive));
    }

    #[test]
    fn periodic_decompositions() {
        let d = flip().periodic_decomposition().unwrap();
        assert_eq!(
            d,
            PeriodicDecomposition {
                period: 2,
                classes: vec![vec![0], vec![1]]
            }
        );
        assert_eq!(Tms::full(2).periodic_decomposition().unwrap().period, 1);
        let cycle3 = Tms::new(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let d = cycle3.periodic_decomposition().unwrap();
        assert_eq!(d.period, 3);
        assert_eq!(d.classes, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn periodic_orbit_examples() {
        assert_eq!(
            golden().periodic_orbits(2, 0).unwrap(),
            vec![Word::from([0, 0]), Word::from([0, 1])]
        );
        assert!(golden().periodic_orbits(1, 1).unwrap().is_empty());
        assert_eq!(
            Tms::full(2).periodic_orbits(2, 0).unwrap(),
            vec![Word::from([0, 0]), Word::from([0, 1])]
        );
        assert!(golden().periodic_orbits(0, 0).is_err());
    }

    #[test]
    fn lattice_examples() {
        let full2 = Tms::full(2);
        let phi = AlphaCocycle::counting(2, 0).unwrap();
        assert_eq!(full2.cocycle_lattice(&phi, 2).unwrap().basis(), &[vec![1]]);
        assert_eq!(full2.is_aperiodic(&phi, 2).unwrap(), Aperiodicity::Full);

        let phi3 = AlphaCocycle::counting(3, 0).unwrap();
        let lat = pes().cocycle_lattice(&phi3, 6).unwrap();
        let diag = IntegerLattice::from_generators(2, [&[1i64, 1][..]]);
        assert!(lat.is_sublattice_of(&diag));
        assert_eq!(pes().is_aperiodic(&phi3, 6).unwrap(), Aperiodicity::ProperAt(6));

        assert_eq!(golden().is_aperiodic(&phi, 2).unwrap(), Aperiodicity::Full);

        let constant = AlphaCocycle::constant(3, vec![2, -1]).unwrap();
        assert_eq!(pes().cocycle_lattice(&constant, 6).unwrap().rank(), 0);

        assert_eq!(flip().cocycle_lattice(&phi, 4), Err(Error::NotMixing));
    }
}
