//! Conformal product measures `μ_{J,H}` on β-shifts: the eigenvalue λ with
//! `Σ B_n λ^n = 1`, cylinder values `λ^n H̃(w)`, and exhaustive verifiers.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::beta::{BetaSystem, Tight};
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::words::{count_vector, CountVector, Symbol, Word};

/// Largest truncation the doubling loop will try.
const MAX_TRUNCATION: usize = 4096;

/// `μ_{J,H}` with a certified bracket `λ_lo <= λ <= λ_hi`.
#[derive(Clone, Debug)]
pub struct ConformalMeasure {
    system: Arc<BetaSystem>,
    weights: BTreeMap<Symbol, ExactScalar>,
    n_trunc: usize,
    /// `blocks[n - 1] = B_n`, the total weight of return words of length `n`.
    blocks: Vec<ExactScalar>,
    /// Weight of admissible non-full words of length `n_trunc`.
    residual: ExactScalar,
    lambda_lo: ExactScalar,
    lambda_hi: ExactScalar,
}

/// A measure value known to lie in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureValue {
    pub lo: ExactScalar,
    pub hi: ExactScalar,
    pub exact: bool,
}

impl MeasureValue {
    fn bracket(lo: ExactScalar, hi: ExactScalar) -> Self {
        let exact = lo == hi;
        MeasureValue { lo, hi, exact }
    }

    pub fn width(&self) -> ExactScalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> ExactScalar {
        (&self.lo + &self.hi) * ExactScalar::ratio(1, 2)
    }
}

struct Blocks {
    blocks: Vec<ExactScalar>,
    residual: ExactScalar,
    return_words: u128,
}

fn weight_blocks(b: &BetaSystem, weights: &BTreeMap<Symbol, ExactScalar>, n: usize) -> Result<Blocks> {
    let omega = b.omega_prefix(n + 1)?;
    let mut live: BTreeMap<Tight, ExactScalar> = BTreeMap::new();
    live.insert(Tight::default(), ExactScalar::one());
    let mut blocks = Vec::with_capacity(n);
    let mut return_words = 0u128;
    let mut counts: BTreeMap<Tight, u128> = BTreeMap::new();
    counts.insert(Tight::default(), 1);
    for _ in 0..n {
        let mut next: BTreeMap<Tight, ExactScalar> = BTreeMap::new();
        let mut next_counts: BTreeMap<Tight, u128> = BTreeMap::new();
        let mut block = ExactScalar::zero();
        for (t, v) in &live {
            let c = counts[t];
            for (&a, h) in weights {
                let Some(t2) = t.step(a, &omega) else { continue };
                let wv = v * h;
                if t2.is_full() {
                    block = block + wv;
                    return_words = return_words.saturating_add(c);
                } else {
                    let e = next_counts.entry(t2.clone()).or_insert(0);
                    *e = e.saturating_add(c);
                    let slot = next.entry(t2).or_insert_with(ExactScalar::zero);
                    *slot = &*slot + &wv;
                }
            }
        }
        blocks.push(block);
        live = next;
        counts = next_counts;
    }
    Ok(Blocks {
        blocks,
        residual: live.into_values().sum(),
        return_words,
    })
}

/// `Σ_{n=1}^N c_n λ^n + r λ^N`, ready for repeated comparison against 1.
enum Series {
    /// Integer numerators over a common denominator.
    Rational {
        num: Vec<BigInt>,
        rest: BigInt,
        den: BigInt,
    },
    Generic {
        coeffs: Vec<ExactScalar>,
        rest: ExactScalar,
    },
}

impl Series {
    fn new(coeffs: &[ExactScalar], rest: &ExactScalar) -> Series {
        let rats: Option<Vec<BigRational>> = coeffs
            .iter()
            .chain(std::iter::once(rest))
            .map(|c| c.as_rational().cloned())
            .collect();
        match rats {
            Some(rats) => {
                let den = rats.iter().fold(BigInt::one(), |d, r| d.lcm(r.denom()));
                let mut num: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&den / r.denom())).collect();
                let rest = num.pop().unwrap();
                Series::Rational { num, rest, den }
            }
            None => Series::Generic {
                coeffs: coeffs.to_vec(),
                rest: rest.clone(),
            },
        }
    }

    /// True iff the series at `λ` is at least 1.
    fn reaches_one(&self, lambda: &BigRational) -> bool {
        match self {
            Series::Rational { num, rest, den } => {
                // λ = m / q; compare Σ c_n m^n q^{N-n} + r m^N against den · q^N
                let (m, q) = (lambda.numer(), lambda.denom());
                let n = num.len();
                let mut acc = BigInt::zero();
                let mut qpow = BigInt::one();
                for c in num.iter().rev() {
                    acc = acc * m + c * &qpow;
                    qpow *= q;
                }
                let total = acc * m + rest * num_traits::pow(m.clone(), n);
                total >= den * qpow
            }
            Series::Generic { coeffs, rest } => {
                let l = ExactScalar::from(lambda.clone());
                let mut acc = ExactScalar::zero();
                for c in coeffs.iter().rev() {
                    acc = (acc + c) * &l;
                }
                acc = acc + rest * &l.pow(coeffs.len() as u32);
                acc >= ExactScalar::one()
            }
        }
    }

    /// Dyadic `(lo, hi)` with `lo < root <= hi` and `hi - lo <= eps`.
    fn root(&self, eps: &BigRational) -> (BigRational, BigRational) {
        let two = BigRational::from_integer(2.into());
        let mut lo = BigRational::zero();
        let mut hi = BigRational::one();
        while !self.reaches_one(&hi) {
            lo = hi.clone();
            hi = &hi * &two;
        }
        while &hi - &lo > *eps {
            let mid = (&lo + &hi) / &two;
            if self.reaches_one(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }
}

impl ConformalMeasure {
    /// Solves for λ, doubling the truncation from `n_trunc` until the bracket
    /// is narrower than `tol`. `h[i]` is the weight of digit `j[i]`.
    pub fn solve(
        system: Arc<BetaSystem>,
        j: &[Symbol],
        h: &[ExactScalar],
        n_trunc: usize,
        tol: &ExactScalar,
    ) -> Result<ConformalMeasure> {
        if j.len() != h.len() {
            return Err(Error::InvalidArgument(format!(
                "{} digits but {} weights",
                j.len(),
                h.len()
            )));
        }
        if n_trunc == 0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        Word::from(j).check_alphabet(system.max_digit() as usize + 1)?;
        if let Some(i) = h.iter().position(|x| !x.is_positive()) {
            return Err(Error::NonPositiveWeight(i));
        }
        let weights: BTreeMap<Symbol, ExactScalar> = j.iter().copied().zip(h.iter().cloned()).collect();
        if weights.len() < 2 {
            return Err(Error::SingletonAlphabet);
        }
        let tol_r = tol
            .to_rational()
            .filter(|t| t.is_positive())
            .ok_or_else(|| Error::InvalidArgument(format!("tolerance {tol} must be a positive number")))?;
        let eps = &tol_r / BigRational::from_integer(16.into());

        let first = weight_blocks(&system, &weights, n_trunc)?;
        if first.return_words <= 1 {
            return Err(Error::SingletonSystem);
        }
        let mut n = n_trunc;
        let mut blk = first;
        loop {
            let upper = Series::new(&blk.blocks, &ExactScalar::zero());
            let lower = Series::new(&blk.blocks, &blk.residual);
            let (_, hi) = upper.root(&eps);
            let (lo, _) = lower.root(&eps);
            if &hi - &lo < tol_r {
                return Ok(ConformalMeasure {
                    system,
                    weights,
                    n_trunc: n,
                    blocks: blk.blocks,
                    residual: blk.residual,
                    lambda_lo: lo.into(),
                    lambda_hi: hi.into(),
                });
            }
            if 2 * n > MAX_TRUNCATION.max(n_trunc) {
                return Err(Error::NoConvergence(n));
            }
            n *= 2;
            blk = weight_blocks(&system, &weights, n)?;
        }
    }

    pub fn system(&self) -> &BetaSystem {
        &self.system
    }

    pub fn digits(&self) -> Vec<Symbol> {
        self.weights.keys().copied().collect()
    }

    pub fn weight(&self, s: Symbol) -> Option<&ExactScalar> {
        self.weights.get(&s)
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn blocks(&self) -> &[ExactScalar] {
        &self.blocks
    }

    pub fn residual(&self) -> &ExactScalar {
        &self.residual
    }

    pub fn lambda_lo(&self) -> &ExactScalar {
        &self.lambda_lo
    }

    pub fn lambda_hi(&self) -> &ExactScalar {
        &self.lambda_hi
    }

    /// `1 - Σ_{n<=N} B_n λ_lo^n`, an upper bound for the mass of cylinders
    /// not yet resolved into return words at truncation `N`.
    pub fn normalization_shortfall(&self) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for b in self.blocks.iter().rev() {
            acc = (acc + b) * &self.lambda_lo;
        }
        ExactScalar::one() - acc
    }

    /// `H̃(w) = Π H(w_k)`; `None` if some letter is outside `J`.
    pub fn weight_of(&self, w: &[Symbol]) -> Option<ExactScalar> {
        w.iter()
            .try_fold(ExactScalar::one(), |acc, s| self.weights.get(s).map(|h| acc * h))
    }

    /// `μ([w]) = λ^{|w|} H̃(w)` for concatenations of return words. Other
    /// admissible words need `depth`: the return-word extensions of `w` up
    /// to that length are summed and the unresolved remainder is bounded.
    pub fn cylinder_measure(&self, w: &[Symbol], depth: Option<usize>) -> Result<MeasureValue> {
        let Some(hw) = self.weight_of(w) else {
            self.system.is_admissible(w)?;
            return Ok(MeasureValue::bracket(ExactScalar::zero(), ExactScalar::zero()));
        };
        let (factors, residue) = self.system.factorize(w)?;
        let n = w.len() as u32;
        if residue.is_empty() {
            return Ok(MeasureValue::bracket(
                self.lambda_lo.pow(n) * &hw,
                self.lambda_hi.pow(n) * &hw,
            ));
        }
        let depth = depth.ok_or_else(|| Error::NotFactorizable(Word::from(w)))?;
        if depth < w.len() {
            return Err(Error::InvalidArgument(format!(
                "depth {depth} is shorter than the word"
            )));
        }
        let head_len: usize = factors.iter().map(|f| f.len()).sum();
        let head = self.weight_of(&w[..head_len]).unwrap();
        let (coeffs, rest) = self.extension_sums(&residue, depth - head_len)?;
        let eval = |l: &ExactScalar, with_rest: bool| {
            let mut acc = ExactScalar::zero();
            for c in coeffs.iter().rev() {
                acc = (acc + c) * l;
            }
            if with_rest {
                acc = acc + &rest * &l.pow(coeffs.len() as u32);
            }
            l.pow(head_len as u32) * &head * acc
        };
        Ok(MeasureValue {
            lo: eval(&self.lambda_lo, false),
            hi: eval(&self.lambda_hi, true),
            exact: false,
        })
    }

    /// For a word `p` with no full prefix: `coeffs[m-1]` is the total weight
    /// of return words of length `m <= len` extending `p`, and `rest` the
    /// weight of live extensions of length `len`.
    fn extension_sums(&self, p: &[Symbol], len: usize) -> Result<(Vec<ExactScalar>, ExactScalar)> {
        let omega = self.system.omega_prefix(len + 1)?;
        let mut t = Tight::default();
        for &a in p {
            t = t.step(a, &omega).ok_or_else(|| Error::Inadmissible(Word::from(p)))?;
        }
        let mut coeffs = vec![ExactScalar::zero(); p.len()];
        let mut live: BTreeMap<Tight, ExactScalar> = BTreeMap::new();
        live.insert(t, self.weight_of(p).unwrap());
        for _ in p.len()..len {
            let mut next: BTreeMap<Tight, ExactScalar> = BTreeMap::new();
            let mut block = ExactScalar::zero();
            for (t, v) in &live {
                for (&a, h) in &self.weights {
                    let Some(t2) = t.step(a, &omega) else { continue };
                    if t2.is_full() {
                        block = block + v * h;
                    } else {
                        let slot = next.entry(t2).or_insert_with(ExactScalar::zero);
                        *slot = &*slot + &(v * h);
                    }
                }
            }
            coeffs.push(block);
            live = next;
        }
        Ok((coeffs, live.into_values().sum()))
    }

    fn factorizable_words(&self, n: usize) -> Result<Vec<Word>> {
        let digits = self.digits();
        let mut out = Vec::new();
        for w in self.system.enumerate_admissible(n, Some(&digits))? {
            if self.system.is_factorizable(&w)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Checks `μ([j·w]) = λ H(j) μ([w])` at both ends of the bracket for
    /// every admissible `j·w` over `J` with `[j]` full and `|j·w| <= n_max`.
    pub fn verify_conformality(&self, n_max: usize, tol: &ExactScalar) -> Result<ConformalityReport> {
        let digits = self.digits();
        let mut report = ConformalityReport {
            checked: 0,
            skipped: 0,
            max_discrepancy: ExactScalar::zero(),
            violations: Vec::new(),
        };
        for n in 2..=n_max {
            for u in self.system.enumerate_admissible(n, Some(&digits))? {
                if !self.system.fullness(&u[..1])?.full {
                    continue;
                }
                if !self.system.is_factorizable(&u)? {
                    report.skipped += 1;
                    continue;
                }
                report.checked += 1;
                let h = &self.weights[&u[0]];
                let mu = self.cylinder_measure(&u, None)?;
                let rest = self.cylinder_measure(&u[1..], None)?;
                let d_lo = (&mu.lo - &(&self.lambda_lo * h * &rest.lo)).abs();
                let d_hi = (&mu.hi - &(&self.lambda_hi * h * &rest.hi)).abs();
                let d = if d_lo > d_hi { d_lo } else { d_hi };
                if d > report.max_discrepancy {
                    report.max_discrepancy = d.clone();
                }
                if d > *tol {
                    report.violations.push(u);
                }
            }
        }
        Ok(report)
    }

    /// Checks `μ([w]) = μ([w'])` for all `w ⋈ w'` with `|w| <= n_max`. When
    /// `J` is every digit and `H` is constant, also compares each cylinder
    /// with the Lebesgue length of its digit cell.
    pub fn verify_exchangeability(&self, n_max: usize, tol: &ExactScalar) -> Result<BetaExchangeReport> {
        let lebesgue = self.digits() == self.system.alphabet() && {
            let mut hs = self.weights.values();
            let first = hs.next().unwrap();
            hs.all(|h| h == first)
        };
        let mut report = BetaExchangeReport {
            pairs_checked: 0,
            max_discrepancy: ExactScalar::zero(),
            violations: Vec::new(),
            lebesgue_checked: 0,
            lebesgue_max_discrepancy: ExactScalar::zero(),
            lebesgue_violations: Vec::new(),
        };
        for n in 1..=n_max {
            let mut groups: BTreeMap<CountVector, Vec<(Word, MeasureValue)>> = BTreeMap::new();
            for w in self.factorizable_words(n)? {
                let mu = self.cylinder_measure(&w, None)?;
                if lebesgue {
                    let len = self.system.digit_cell_length(&w)?;
                    report.lebesgue_checked += 1;
                    let below = &mu.lo - &len;
                    let above = &len - &mu.hi;
                    let d = if below > above { below } else { above };
                    if d > report.lebesgue_max_discrepancy {
                        report.lebesgue_max_discrepancy = d.clone();
                    }
                    if d > *tol {
                        report.lebesgue_violations.push(w.clone());
                    }
                }
                groups.entry(count_vector(&w)).or_default().push((w, mu));
            }
            for group in groups.values() {
                for (i, (w, a)) in group.iter().enumerate() {
                    for (w2, b) in &group[i + 1..] {
                        report.pairs_checked += 1;
                        let d_lo = (&a.lo - &b.lo).abs();
                        let d_hi = (&a.hi - &b.hi).abs();
                        let d = if d_lo > d_hi { d_lo } else { d_hi };
                        if d > report.max_discrepancy {
                            report.max_discrepancy = d.clone();
                        }
                        if d > *tol {
                            report.violations.push((w.clone(), w2.clone()));
                        }
                    }
                }
            }
        }
        Ok(report)
    }
}

#[derive(Clone, Debug)]
pub struct ConformalityReport {
    pub checked: u64,
    /// Words `j·w` with `[j]` full that are not concatenations of return words.
    pub skipped: u64,
    pub max_discrepancy: ExactScalar,
    pub violations: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct BetaExchangeReport {
    pub pairs_checked: u64,
    pub max_discrepancy: ExactScalar,
    pub violations: Vec<(Word, Word)>,
    /// Zero unless `J` is every digit and `H` is constant.
    pub lebesgue_checked: u64,
    /// Largest distance from a digit-cell length to its measure bracket.
    pub lebesgue_max_discrepancy: ExactScalar,
    pub lebesgue_violations: Vec<Word>,
}
