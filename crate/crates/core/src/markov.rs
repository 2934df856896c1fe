//! Markov measures on finite topological Markov shifts whose Radon–Nikodym
//! derivative `dμ∘T/dμ` depends only on the first symbol, the truncated
//! random-walk family, and an exhaustive exchangeability verifier.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::tms::Tms;
use crate::words::{count_vector, CountVector, Symbol, Word};

/// Initial weights `π`, row-stochastic `P` supported on the transition
/// matrix, and `h(s) = π_s / Π(s)` where `Π(s) = Σ_t A_{s,t} π_t`.
#[derive(Clone, Debug)]
pub struct MarkovMeasure {
    tms: Tms,
    pi: Vec<ExactScalar>,
    p: Vec<Vec<ExactScalar>>,
    h: Vec<ExactScalar>,
}

fn check_weights(t: &Tms, pi: &[ExactScalar]) -> Result<()> {
    if pi.len() != t.n_states() {
        return Err(Error::InvalidArgument(format!(
            "{} weights given for {} states",
            pi.len(),
            t.n_states()
        )));
    }
    match pi.iter().position(|x| !x.is_positive()) {
        Some(s) => Err(Error::NonPositiveWeight(s)),
        None => Ok(()),
    }
}

fn neighbour_mass(t: &Tms, pi: &[ExactScalar], s: Symbol) -> ExactScalar {
    t.successors(s).map(|u| pi[u as usize].clone()).sum()
}

impl MarkovMeasure {
    /// The unique Markov measure with `μ([s]) = π_s` and first-symbol
    /// derivative: `P_{s,t} = A_{s,t} π_t / Π(s)`.
    pub fn from_initial(tms: Tms, pi: Vec<ExactScalar>) -> Result<Self> {
        check_weights(&tms, &pi)?;
        let n = tms.n_states();
        let mut p = vec![vec![ExactScalar::zero(); n]; n];
        let mut h = Vec::with_capacity(n);
        for s in 0..n {
            let mass = neighbour_mass(&tms, &pi, s as Symbol);
            for t in tms.successors(s as Symbol) {
                p[s][t as usize] = &pi[t as usize] / &mass;
            }
            h.push(&pi[s] / &mass);
        }
        Ok(MarkovMeasure { tms, pi, p, h })
    }

    /// A Markov measure from explicit initial weights and transition matrix.
    /// Exact rows must sum to exactly one.
    pub fn from_parts(tms: Tms, pi: Vec<ExactScalar>, p: Vec<Vec<ExactScalar>>) -> Result<Self> {
        check_weights(&tms, &pi)?;
        let n = tms.n_states();
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMeasure(format!("transition matrix must be {n}x{n}")));
        }
        for s in 0..n {
            for t in 0..n {
                let allowed = tms.allowed(s as Symbol, t as Symbol);
                if allowed != p[s][t].is_positive() || (!allowed && !p[s][t].is_zero()) {
                    return Err(Error::InvalidMeasure(format!(
                        "entry ({s},{t}) = {} does not match the transition structure",
                        p[s][t]
                    )));
                }
            }
            let row: ExactScalar = p[s].iter().cloned().sum();
            let defect = (&row - &ExactScalar::one()).abs();
            let ok = match defect.precision() {
                Some(bits) => defect < ExactScalar::ratio(1, 2).pow((bits / 2) as u32),
                None => defect.is_zero(),
            };
            if !ok {
                return Err(Error::InvalidMeasure(format!("row {s} sums to {row}, not 1")));
            }
        }
        let h = (0..n)
            .map(|s| &pi[s] / &neighbour_mass(&tms, &pi, s as Symbol))
            .collect();
        Ok(MarkovMeasure { tms, pi, p, h })
    }

    pub fn tms(&self) -> &Tms {
        &self.tms
    }

    pub fn initial(&self) -> &[ExactScalar] {
        &self.pi
    }

    pub fn transition(&self) -> &[Vec<ExactScalar>] {
        &self.p
    }

    pub fn h(&self) -> &[ExactScalar] {
        &self.h
    }

    /// `μ([w]) = π_{w_1} p_{w_1 w_2} ⋯ p_{w_{n-1} w_n}`.
    pub fn cylinder_measure(&self, w: &[Symbol]) -> Result<ExactScalar> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("cylinder word must be nonempty".into()));
        }
        if !self.tms.is_admissible(w)? {
            return Err(Error::Inadmissible(Word::from(w)));
        }
        Ok(w.windows(2).fold(self.pi[w[0] as usize].clone(), |acc, e| {
            acc * &self.p[e[0] as usize][e[1] as usize]
        }))
    }

    /// `1/h(s)`, the value of `dμ∘T/dμ` on `[s]`.
    pub fn derivative_symbol(&self, s: Symbol) -> ExactScalar {
        self.h[s as usize].recip()
    }

    /// Checks `μ([w]) = μ([w'])` for all admissible `w, w'` of equal length
    /// `<= n_max` with equal letter counts and equal final symbol.
    pub fn verify_exchangeability(&self, n_max: usize, tol: &ExactScalar) -> ExchangeReport {
        let n = self.tms.n_states();
        let mut level: Vec<(Vec<Symbol>, ExactScalar)> =
            (0..n).map(|s| (vec![s as Symbol], self.pi[s].clone())).collect();
        let mut report = ExchangeReport::empty();
        for len in 1..=n_max {
            if len > 1 {
                level = level
                    .iter()
                    .flat_map(|(w, v)| {
                        let last = *w.last().unwrap();
                        self.tms.successors(last).map(move |t| {
                            let mut w2 = w.clone();
                            w2.push(t);
                            (w2, v * &self.p[last as usize][t as usize])
                        })
                    })
                    .collect();
            }
            let mut groups: BTreeMap<(CountVector, Symbol), Vec<usize>> = BTreeMap::new();
            for (i, (w, _)) in level.iter().enumerate() {
                groups.entry((count_vector(w), *w.last().unwrap())).or_default().push(i);
            }
            let partial: Vec<ExchangeReport> = groups
                .into_par_iter()
                .map(|(_, idx)| check_group(&level, &idx, tol))
                .collect();
            for r in partial {
                report.merge(r);
            }
        }
        report
            .violations
            .sort_by(|a, b| (a.w.len(), &a.w, &a.w_prime).cmp(&(b.w.len(), &b.w, &b.w_prime)));
        report
    }

    /// Recurrence class of the finite chain; exact stationary vector.
    pub fn classify_recurrence(&self) -> Result<Recurrence> {
        if !self.tms.is_transitive() {
            return Err(Error::Reducible);
        }
        let n = self.tms.n_states();
        // rows 0..n-1: balance equations for t = 0..n-2; last row: normalization
        let mut a = vec![vec![ExactScalar::zero(); n]; n];
        let mut b = vec![ExactScalar::zero(); n];
        for t in 0..n - 1 {
            for s in 0..n {
                a[t][s] = self.p[s][t].clone();
            }
            a[t][t] = &a[t][t] - &ExactScalar::one();
        }
        a[n - 1] = vec![ExactScalar::one(); n];
        b[n - 1] = ExactScalar::one();
        let stationary = solve_linear(a, b).ok_or(Error::Reducible)?;
        Ok(Recurrence::PositiveRecurrent { stationary })
    }
}

fn check_group(level: &[(Vec<Symbol>, ExactScalar)], idx: &[usize], tol: &ExactScalar) -> ExchangeReport {
    let mut report = ExchangeReport::empty();
    let g = idx.len() as u64;
    report.pairs_checked = g * g.saturating_sub(1) / 2;
    if g < 2 {
        return report;
    }
    let mut lo = &level[idx[0]].1;
    let mut hi = lo;
    for &i in &idx[1..] {
        let v = &level[i].1;
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    report.max_discrepancy = hi - lo;
    if report.max_discrepancy > *tol {
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let (wi, vi) = &level[i];
                let (wj, vj) = &level[j];
                if (vi - vj).abs() > *tol {
                    let (first, second) = if wi <= wj { (i, j) } else { (j, i) };
                    report.violations.push(Violation {
                        w: Word::from(level[first].0.as_slice()),
                        w_prime: Word::from(level[second].0.as_slice()),
                        value: level[first].1.clone(),
                        value_prime: level[second].1.clone(),
                    });
                }
            }
        }
    }
    report
}

/// Exact Gaussian elimination; `None` if the system is singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<ExactScalar>>, mut b: Vec<ExactScalar>) -> Option<Vec<ExactScalar>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                if !a[col][c].is_zero() {
                    a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                }
            }
            b[r] = &b[r] - &(&f * &b[col]);
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub w: Word,
    pub w_prime: Word,
    pub value: ExactScalar,
    pub value_prime: ExactScalar,
}

/// Result of [`MarkovMeasure::verify_exchangeability`]. `violations` is
/// ordered by `(|w|, w, w')` and is empty iff `max_discrepancy <= tol`.
#[derive(Clone, Debug)]
pub struct ExchangeReport {
    pub pairs_checked: u64,
    pub max_discrepancy: ExactScalar,
    pub violations: Vec<Violation>,
}

impl ExchangeReport {
    fn empty() -> Self {
        ExchangeReport {
            pairs_checked: 0,
            max_discrepancy: ExactScalar::zero(),
            violations: Vec::new(),
        }
    }

    fn merge(&mut self, other: ExchangeReport) {
        self.pairs_checked += other.pairs_checked;
        if other.max_discrepancy > self.max_discrepancy {
            self.max_discrepancy = other.max_discrepancy;
        }
        self.violations.extend(other.violations);
    }
}

/// Recurrence verdict for a finite (truncated) chain. Says nothing about the
/// countable chain a truncation came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Recurrence {
    PositiveRecurrent { stationary: Vec<ExactScalar> },
}

/// The measure with `π_s = z^{|s|}` on the walk `|s_{k+1} - s_k| <= 1`,
/// restricted to states `-L..=L`. Symbol `i` stands for state `i - L`.
/// Rows at `±L` keep the same proportions over their surviving neighbours.
#[derive(Clone, Debug)]
pub struct RandomWalk {
    z: ExactScalar,
    radius: usize,
    measure: MarkovMeasure,
}

impl RandomWalk {
    pub fn new(z: ExactScalar, radius: usize) -> Result<Self> {
        if !z.is_positive() || z >= ExactScalar::one() {
            return Err(Error::OutOfRange(format!("z = {z} must lie in (0, 1)")));
        }
        if radius < 2 {
            return Err(Error::OutOfRange(format!(
                "truncation radius {radius} must be at least 2"
            )));
        }
        let n = 2 * radius + 1;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u8::from(i.abs_diff(j) <= 1)).collect())
            .collect();
        let tms = Tms::new(rows)?;
        let pi = (0..n)
            .map(|i| z.pow((i as i64 - radius as i64).unsigned_abs() as u32))
            .collect();
        let measure = MarkovMeasure::from_initial(tms, pi)?;
        Ok(RandomWalk { z, radius, measure })
    }

    pub fn measure(&self) -> &MarkovMeasure {
        &self.measure
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn symbol(&self, state: i64) -> Result<Symbol> {
        if state.unsigned_abs() as usize > self.radius {
            return Err(Error::OutOfRange(format!(
                "state {state} outside -{0}..={0}",
                self.radius
            )));
        }
        Ok((state + self.radius as i64) as Symbol)
    }

    pub fn state(&self, s: Symbol) -> i64 {
        s as i64 - self.radius as i64
    }

    /// `p_{s, s+i}` of the chain.
    pub fn transition(&self, state: i64, step: i64) -> Result<ExactScalar> {
        let (a, b) = (self.symbol(state)?, self.symbol(state + step)?);
        Ok(self.measure.p[a as usize][b as usize].clone())
    }

    /// Invariant weights of the untruncated chain: `1/(1+z+z²)` at 0 and
    /// `z^{2|t|-1}/(2z+1)` elsewhere.
    pub fn invariant_weight(&self, t: i64) -> ExactScalar {
        let one = ExactScalar::one();
        if t == 0 {
            (&one + &self.z + self.z.pow(2)).recip()
        } else {
            self.z.pow(2 * t.unsigned_abs() as u32 - 1) / (&self.z * &ExactScalar::from_int(2) + one)
        }
    }

    /// `(cP)_t` for the invariant weights restricted to the truncation.
    pub fn pushed_weight(&self, t: i64) -> Result<ExactScalar> {
        let target = self.symbol(t)?;
        let n = 2 * self.radius + 1;
        Ok((0..n)
            .filter(|&s| self.measure.tms.allowed(s as Symbol, target))
            .map(|s| self.invariant_weight(self.state(s as Symbol)) * &self.measure.p[s][target as usize])
            .sum())
    }
}

/// JSON form of a measure: `{"tms": <object or path>, "pi": [..], "P": [[..]]?}`.
#[derive(Clone, Debug, Deserialize)]
pub struct MeasureFile {
    pub tms: serde_json::Value,
    pub pi: Vec<String>,
    #[serde(rename = "P", default)]
    pub p: Option<Vec<Vec<String>>>,
}

impl MeasureFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Resolves the measure; a string `tms` is a path relative to `base`.
    pub fn build(&self, base: &Path) -> Result<MarkovMeasure> {
        let tms = match &self.tms {
            serde_json::Value::String(p) => Tms::load(base.join(p))?,
            v => Tms::from_json(&v.to_string())?,
        };
        let pi = self
            .pi
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<ExactScalar>>>()?;
        match &self.p {
            None => MarkovMeasure::from_initial(tms, pi),
            Some(rows) => {
                let p = rows
                    .iter()
                    .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<ExactScalar>>>())
                    .collect::<Result<Vec<_>>>()?;
                MarkovMeasure::from_parts(tms, pi, p)
            }
        }
    }
}
