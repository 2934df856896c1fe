//! β-expansions: greedy digits, the Parry sequence ω, admissibility, full
//! cylinders, the first-full-prefix time ψ and the jump transformation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::relations::EpPoint;
use crate::scalar::{ExactScalar, Quadratic};
use crate::words::{count_vector, Symbol, Word};

/// Distance to an integer below which a big-float digit is ambiguous.
const TIE_BITS: u32 = 32;
/// Guard bits reserved before the per-digit precision budget starts.
const GUARD_BITS: usize = 64;
/// Orbit length searched for a cycle of `T^k(1)` when ω is needed as a point.
const SETTLE_LIMIT: usize = 1024;

/// How much of ω is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaShape {
    /// ω is the eventually periodic sequence `preperiod (period)^∞`.
    EventuallyPeriodic { preperiod: Word, period: Word },
    /// No termination or cycle seen among the first `depth` digits.
    PurelyComputed(usize),
}

#[derive(Debug)]
struct OrbitCache {
    /// `orbit[k] = T^k(1)`, with `orbit[0] = 1`.
    orbit: Vec<ExactScalar>,
    /// `digits[k] = ⌊β · orbit[k]⌋`, the digits of `π_β(1)`.
    digits: Vec<Symbol>,
    seen: HashMap<String, usize>,
    shape: OmegaShape,
    /// Orbit index `q` with `T^q(1) = 0`, if the expansion of 1 terminates.
    terminates_at: Option<usize>,
}

/// A non-integer `β > 1` with a lazily extended, append-only cache of the
/// orbit of 1. Safe to share between threads.
#[derive(Debug)]
pub struct BetaSystem {
    beta: ExactScalar,
    spec: String,
    max_digit: Symbol,
    cache: RwLock<OrbitCache>,
}

impl Clone for BetaSystem {
    fn clone(&self) -> Self {
        BetaSystem::new(self.beta.clone(), self.spec.clone()).expect("already validated")
    }
}

/// `K_N(w)` and whether the cylinder is full.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FullnessVerdict {
    pub k: usize,
    pub full: bool,
}

/// Value of ψ on a finite word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Psi {
    Determined(usize),
    /// No prefix of the word, of the given length, is full.
    Undetermined(usize),
}

/// Suffix lengths of the word read so far that equal a prefix of ω, in
/// increasing order. Empty exactly when the word read so far is full.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Tight(Vec<usize>);

impl Tight {
    /// Appends `a`; `None` if the result is inadmissible. `omega` must be
    /// longer than every tight length.
    pub(crate) fn step(&self, a: Symbol, omega: &[Symbol]) -> Option<Tight> {
        let mut next = Vec::new();
        for n in std::iter::once(0).chain(self.0.iter().copied()) {
            let o = omega[n];
            if a > o {
                return None;
            }
            if a == o {
                next.push(n + 1);
            }
        }
        Some(Tight(next))
    }

    pub(crate) fn k(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    pub(crate) fn is_full(&self) -> bool {
        self.0.is_empty()
    }
}

fn int_part(x: &BigInt) -> Result<Symbol> {
    x.to_u32()
        .ok_or_else(|| Error::OutOfRange(format!("digit {x} does not fit")))
}

impl BetaSystem {
    pub fn new(beta: ExactScalar, spec: impl Into<String>) -> Result<Self> {
        if beta <= ExactScalar::one() {
            return Err(Error::NotGreaterThanOne);
        }
        if beta.fract().is_zero() {
            return Err(Error::IntegerBeta);
        }
        let max_digit = int_part(&beta.floor())?;
        let cache = OrbitCache {
            orbit: vec![ExactScalar::one()],
            digits: Vec::new(),
            seen: HashMap::new(),
            shape: OmegaShape::PurelyComputed(0),
            terminates_at: None,
        };
        Ok(BetaSystem {
            beta,
            spec: spec.into(),
            max_digit,
            cache: RwLock::new(cache),
        })
    }

    /// Parses `golden`, `quad:a,b,c` (larger real root of `ax²+bx+c`),
    /// `dec:<decimal>@<bits>`, `rat:<p/q>`, or any scalar literal.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let beta = if spec == "golden" {
            quadratic_root(1, -1, -1)?
        } else if let Some(rest) = spec.strip_prefix("quad:") {
            let c: Vec<i64> = rest
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::InvalidBetaSpec(spec.to_string())))
                .collect::<Result<_>>()?;
            if c.len() != 3 {
                return Err(Error::InvalidBetaSpec(format!("{spec}: expected three coefficients")));
            }
            quadratic_root(c[0], c[1], c[2])?
        } else if let Some(rest) = spec.strip_prefix("dec:") {
            let (digits, bits) = rest
                .split_once('@')
                .ok_or_else(|| Error::InvalidBetaSpec(format!("{spec}: missing @bits")))?;
            let bits: usize = bits
                .parse()
                .map_err(|_| Error::InvalidBetaSpec(format!("{spec}: bad precision")))?;
            ExactScalar::float_from_str(digits, bits).map_err(|e| Error::InvalidBetaSpec(e.to_string()))?
        } else if let Some(rest) = spec.strip_prefix("rat:") {
            rest.parse().map_err(|e: Error| Error::InvalidBetaSpec(e.to_string()))?
        } else {
            spec.parse()
                .map_err(|_| Error::InvalidBetaSpec(format!("{spec}: unrecognized beta")))?
        };
        BetaSystem::new(beta, spec)
    }

    pub fn beta(&self) -> &ExactScalar {
        &self.beta
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// `[β]`, the largest digit.
    pub fn max_digit(&self) -> Symbol {
        self.max_digit
    }

    pub fn alphabet(&self) -> Vec<Symbol> {
        (0..=self.max_digit).collect()
    }

    /// Number of digits a big-float β can produce reliably.
    pub fn digit_budget(&self) -> Option<usize> {
        let bits = self.beta.precision()?;
        let per_digit = (self.beta.to_f64().log2().ceil() as usize).max(1);
        Some(bits.saturating_sub(GUARD_BITS) / per_digit)
    }

    fn check_budget(&self, n: usize) -> Result<()> {
        match self.digit_budget() {
            Some(b) if n > b => Err(Error::PrecisionExhausted(format!(
                "{n} digits requested, {b} available at this precision"
            ))),
            _ => Ok(()),
        }
    }

    /// One step of the greedy map: `(⌊βx⌋, {βx})`.
    fn step(&self, x: &ExactScalar) -> Result<(Symbol, ExactScalar)> {
        let y = &self.beta * x;
        let d = y.floor();
        let frac = &y - &ExactScalar::from_bigint(d.clone());
        if !y.is_exact() && !frac.is_zero() {
            let eps = ExactScalar::ratio(1, 2).pow(TIE_BITS);
            if frac < eps || (&ExactScalar::one() - &frac) < eps {
                return Err(Error::PrecisionExhausted(format!(
                    "digit of {y} is within 2^-{TIE_BITS} of a tie"
                )));
            }
        }
        Ok((int_part(&d)?, frac))
    }

    /// Extends the orbit of 1 until `orbit[n]` is known or ω is settled.
    fn extend(&self, n: usize) -> Result<()> {
        {
            let c = self.cache.read().unwrap();
            if c.orbit.len() > n || matches!(c.shape, OmegaShape::EventuallyPeriodic { .. }) {
                return Ok(());
            }
        }
        let mut c = self.cache.write().unwrap();
        while c.orbit.len() <= n && !matches!(c.shape, OmegaShape::EventuallyPeriodic { .. }) {
            let k = c.orbit.len() - 1;
            self.check_budget(k + 1)?;
            let (d, x) = self.step(&c.orbit[k])?;
            c.digits.push(d);
            let idx = k + 1;
            if x.is_zero() {
                let mut per = c.digits.clone();
                *per.last_mut().unwrap() -= 1;
                c.terminates_at = Some(idx);
                c.shape = shape_of(Vec::new(), per);
            } else if x.is_exact() {
                let key = x.to_string();
                if let Some(&m) = c.seen.get(&key) {
                    let pre = c.digits[..m].to_vec();
                    let per = c.digits[m..].to_vec();
                    c.shape = shape_of(pre, per);
                } else {
                    c.seen.insert(key, idx);
                }
            }
            c.orbit.push(x);
            if let OmegaShape::PurelyComputed(_) = c.shape {
                c.shape = OmegaShape::PurelyComputed(idx);
            }
        }
        Ok(())
    }

    /// First `n` digits of the greedy expansion of 1.
    pub fn digits_of_one(&self, n: usize) -> Result<Word> {
        let mut out = Vec::with_capacity(n);
        self.extend(n)?;
        let c = self.cache.read().unwrap();
        for i in 0..n {
            let d = if i < c.digits.len() {
                c.digits[i]
            } else if let Some(q) = c.terminates_at {
                debug_assert!(i >= q);
                0
            } else {
                let (pre, per) = ep_parts(&c.shape);
                let (m, p) = (pre.len(), per.len());
                // π(1) = ω here, because the expansion does not terminate
                if i < m {
                    pre[i]
                } else {
                    per[(i - m) % p]
                }
            };
            out.push(d);
        }
        Ok(Word::new(out))
    }

    /// First `n` symbols of ω.
    pub fn omega_prefix(&self, n: usize) -> Result<Word> {
        self.extend(n)?;
        let c = self.cache.read().unwrap();
        match &c.shape {
            OmegaShape::EventuallyPeriodic { preperiod, period } => {
                let (m, p) = (preperiod.len(), period.len());
                Ok(Word::new(
                    (0..n)
                        .map(|i| if i < m { preperiod[i] } else { period[(i - m) % p] })
                        .collect(),
                ))
            }
            OmegaShape::PurelyComputed(_) => Ok(Word::from(&c.digits[..n])),
        }
    }

    /// Current knowledge of ω, after searching a bounded stretch of the orbit
    /// of 1 for termination or a cycle.
    pub fn omega_shape(&self) -> OmegaShape {
        let limit = self.digit_budget().map_or(SETTLE_LIMIT, |b| b.min(SETTLE_LIMIT));
        // a precision failure simply leaves ω as computed so far
        let _ = self.extend(limit);
        self.cache.read().unwrap().shape.clone()
    }

    /// ω as a point, when it is known to be eventually periodic.
    pub fn omega_point(&self) -> Option<EpPoint> {
        match self.omega_shape() {
            OmegaShape::EventuallyPeriodic { preperiod, period } => EpPoint::new(preperiod, period).ok(),
            OmegaShape::PurelyComputed(_) => None,
        }
    }

    /// `T^k(1)`, with `T^0(1) = 1`. Beyond the termination index this is 0.
    pub fn orbit_of_one(&self, k: usize) -> Result<ExactScalar> {
        self.extend(k)?;
        let c = self.cache.read().unwrap();
        if k < c.orbit.len() {
            return Ok(c.orbit[k].clone());
        }
        if c.terminates_at.is_some() {
            return Ok(ExactScalar::zero());
        }
        let (pre, per) = ep_parts(&c.shape);
        let (m, p) = (pre.len(), per.len());
        Ok(c.orbit[m + (k - m) % p].clone())
    }

    /// Numeric value of the shifted Parry sequence `ω_{k+1} ω_{k+2} ⋯`.
    pub fn omega_tail_value(&self, k: usize) -> Result<ExactScalar> {
        self.extend(k)?;
        let q = self.cache.read().unwrap().terminates_at;
        match q {
            Some(q) => self.orbit_of_one(k % q),
            None => self.orbit_of_one(k),
        }
    }

    /// First `n` greedy digits of `x ∈ [0, 1)`.
    pub fn beta_expand(&self, x: &ExactScalar, n: usize) -> Result<Word> {
        if x.signum() == std::cmp::Ordering::Less || *x >= ExactScalar::one() {
            return Err(Error::OutOfRange(format!("{x} is not in [0, 1)")));
        }
        self.check_budget(n)?;
        let mut x = x.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            if x.is_zero() {
                out.push(0);
                continue;
            }
            let (d, next) = self.step(&x)?;
            out.push(d);
            x = next;
        }
        Ok(Word::new(out))
    }

    /// `Σ w_k β^{-k}`.
    pub fn word_value(&self, w: &[Symbol]) -> ExactScalar {
        let inv = self.beta.recip();
        let mut acc = ExactScalar::zero();
        for &d in w.iter().rev() {
            acc = (acc + ExactScalar::from_int(d as i64)) * &inv;
        }
        acc
    }

    fn check_digits(&self, w: &[Symbol]) -> Result<()> {
        Word::from(w).check_alphabet(self.max_digit as usize + 1)
    }

    fn scan(&self, w: &[Symbol]) -> Result<Option<Vec<Tight>>> {
        self.check_digits(w)?;
        let omega = self.omega_prefix(w.len() + 1)?;
        let mut states = Vec::with_capacity(w.len());
        let mut t = Tight::default();
        for &a in w {
            match t.step(a, &omega) {
                Some(next) => t = next,
                None => return Ok(None),
            }
            states.push(t.clone());
        }
        Ok(Some(states))
    }

    /// Every suffix of `w` is lexicographically `⪯` the ω-prefix of the same
    /// length, so `w` extends to a point of the β-shift.
    pub fn is_admissible(&self, w: &[Symbol]) -> Result<bool> {
        Ok(self.scan(w)?.is_some())
    }

    /// Every suffix of `w` is strictly below the ω-prefix of the same length.
    /// Equivalent to admissible and full.
    pub fn is_admissible_strict(&self, w: &[Symbol]) -> Result<bool> {
        Ok(match self.scan(w)? {
            Some(states) => states.last().map_or(true, Tight::is_full),
            None => false,
        })
    }

    /// `K_N(w)`: the longest suffix of `w` equal to the ω-prefix of its length.
    pub fn fullness(&self, w: &[Symbol]) -> Result<FullnessVerdict> {
        let states = self.scan(w)?.ok_or_else(|| Error::Inadmissible(Word::from(w)))?;
        let k = states.last().map_or(0, Tight::k);
        Ok(FullnessVerdict { k, full: k == 0 })
    }

    /// Length of the shortest full prefix of `w`.
    pub fn psi(&self, w: &[Symbol]) -> Result<Psi> {
        let states = self.scan(w)?.ok_or_else(|| Error::Inadmissible(Word::from(w)))?;
        Ok(match states.iter().position(Tight::is_full) {
            Some(i) => Psi::Determined(i + 1),
            None => Psi::Undetermined(w.len()),
        })
    }

    /// Splits `w` after its shortest full prefix.
    pub fn jump_apply(&self, w: &[Symbol]) -> Result<(Word, Word)> {
        match self.psi(w)? {
            Psi::Determined(n) => Ok((Word::from(&w[..n]), Word::from(&w[n..]))),
            Psi::Undetermined(n) => Err(Error::Undetermined(n)),
        }
    }

    /// Greedy ψ-factorization: the return words read off `w`, and the
    /// trailing residue that has no full prefix.
    pub fn factorize(&self, w: &[Symbol]) -> Result<(Vec<Word>, Word)> {
        let states = self.scan(w)?.ok_or_else(|| Error::Inadmissible(Word::from(w)))?;
        let mut factors = Vec::new();
        let mut start = 0;
        for (i, t) in states.iter().enumerate() {
            if t.is_full() {
                factors.push(Word::from(&w[start..=i]));
                start = i + 1;
            }
        }
        Ok((factors, Word::from(&w[start..])))
    }

    /// `w` is an admissible concatenation of return words.
    pub fn is_factorizable(&self, w: &[Symbol]) -> Result<bool> {
        Ok(match self.scan(w)? {
            Some(states) => states.last().map_or(true, Tight::is_full),
            None => false,
        })
    }

    /// `w ⋈ w'`: equal length, equal letter counts, both concatenations of
    /// return words.
    pub fn is_bowtie(&self, w: &[Symbol], w2: &[Symbol]) -> Result<bool> {
        if w.len() != w2.len() || count_vector(w) != count_vector(w2) {
            return Ok(false);
        }
        Ok(self.is_factorizable(w)? && self.is_factorizable(w2)?)
    }

    fn digit_set(&self, j: Option<&[Symbol]>) -> Result<Vec<Symbol>> {
        let mut j: Vec<Symbol> = match j {
            Some(j) => j.to_vec(),
            None => self.alphabet(),
        };
        j.sort_unstable();
        j.dedup();
        self.check_digits(&j)?;
        if j.len() < 2 {
            return Err(Error::SingletonAlphabet);
        }
        Ok(j)
    }

    /// Return words of length `n` over `J`: admissible, full, with no full
    /// proper prefix. Lexicographic order.
    pub fn enumerate_return_words(&self, n: usize, j: Option<&[Symbol]>) -> Result<Vec<Word>> {
        let j = self.digit_set(j)?;
        let omega = self.omega_prefix(n + 1)?;
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(n);
        fn dfs(j: &[Symbol], omega: &[Symbol], n: usize, t: &Tight, word: &mut Vec<Symbol>, out: &mut Vec<Word>) {
            for &a in j {
                let Some(next) = t.step(a, omega) else { continue };
                word.push(a);
                if word.len() == n {
                    if next.is_full() {
                        out.push(Word::from(word.as_slice()));
                    }
                } else if !next.is_full() {
                    dfs(j, omega, n, &next, word, out);
                }
                word.pop();
            }
        }
        if n > 0 {
            dfs(&j, &omega, n, &Tight::default(), &mut word, &mut out);
        }
        Ok(out)
    }

    /// All admissible words of length `n` over `J`, in lexicographic order.
    pub fn enumerate_admissible(&self, n: usize, j: Option<&[Symbol]>) -> Result<Vec<Word>> {
        let j = match j {
            Some(j) => {
                let mut j = j.to_vec();
                j.sort_unstable();
                j.dedup();
                self.check_digits(&j)?;
                j
            }
            None => self.alphabet(),
        };
        let omega = self.omega_prefix(n + 1)?;
        let mut level = vec![(Vec::new(), Tight::default())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (w, t) in &level {
                for &a in &j {
                    if let Some(t2) = t.step(a, &omega) {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push((w2, t2));
                    }
                }
            }
            level = next;
        }
        Ok(level.into_iter().map(|(w, _)| Word::new(w)).collect())
    }

    /// Number of admissible words of length `n` over all digits.
    pub fn count_admissible(&self, n: usize) -> Result<BigUint> {
        let omega = self.omega_prefix(n + 1)?;
        let mut states: BTreeMap<Tight, BigUint> = BTreeMap::new();
        states.insert(Tight::default(), BigUint::one());
        for _ in 0..n {
            let mut next: BTreeMap<Tight, BigUint> = BTreeMap::new();
            for (t, c) in &states {
                for a in 0..=self.max_digit {
                    if let Some(t2) = t.step(a, &omega) {
                        *next.entry(t2).or_insert_with(BigUint::zero) += c;
                    }
                }
            }
            states = next;
        }
        Ok(states.values().sum())
    }

    /// Lebesgue length of the set of `x ∈ [0,1)` whose first `|w|` digits are
    /// `w`: `β^{-n}` times the value of `ω_{K+1} ω_{K+2} ⋯`.
    pub fn digit_cell_length(&self, w: &[Symbol]) -> Result<ExactScalar> {
        let v = self.fullness(w)?;
        let tail = if v.full {
            ExactScalar::one()
        } else {
            self.omega_tail_value(v.k)?
        };
        Ok(self.beta.recip().pow(w.len() as u32) * tail)
    }

    /// Tail of `x` equals ω (x lies in the exceptional set). Only decidable
    /// when ω is eventually periodic; otherwise reports false.
    pub fn in_gamma(&self, x: &EpPoint) -> bool {
        match self.omega_point() {
            Some(omega) => (0..=x.orbit_size()).any(|n| x.shift(n) == omega),
            None => false,
        }
    }

    /// `x_k^∞ ⪯ ω` for all `k`.
    pub fn point_is_admissible(&self, x: &EpPoint) -> Result<bool> {
        self.check_digits(x.preperiod())?;
        self.check_digits(x.period())?;
        let omega = self.omega_point();
        for n in 0..x.orbit_size() {
            let s = x.shift(n);
            let len = match &omega {
                Some(o) => s.completeness_bound(o) + 1,
                None => self.cache.read().unwrap().digits.len(),
            };
            let om = self.omega_prefix(len)?;
            match s.prefix(len).symbols().cmp(om.symbols()) {
                std::cmp::Ordering::Greater => return Ok(false),
                std::cmp::Ordering::Equal if omega.is_none() => {
                    return Err(Error::PrecisionExhausted(
                        "point agrees with every computed digit of omega".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(true)
    }

    /// Cut positions `ψ_1(x) < ψ_2(x) < ⋯` of the jump transformation that
    /// are `<= upto`.
    pub fn jump_cuts(&self, x: &EpPoint, upto: usize) -> Result<Vec<usize>> {
        if self.in_gamma(x) {
            return Err(Error::InGamma);
        }
        let w = x.prefix(upto);
        let states = self.scan(&w)?.ok_or(Error::Inadmissible(w))?;
        Ok(states
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_full())
            .map(|(i, _)| i + 1)
            .collect())
    }

    /// `ψ(x)` for an eventually periodic point outside the exceptional set.
    pub fn psi_point(&self, x: &EpPoint) -> Result<usize> {
        let bound = self.psi_search_bound(x);
        self.jump_cuts(x, bound)?
            .first()
            .copied()
            .ok_or(Error::Undetermined(bound))
    }

    /// `(ψ(x), S x)`.
    pub fn jump_point(&self, x: &EpPoint) -> Result<(usize, EpPoint)> {
        let n = self.psi_point(x)?;
        Ok((n, x.shift(n)))
    }

    fn psi_search_bound(&self, x: &EpPoint) -> usize {
        let om = match self.omega_point() {
            Some(o) => o.orbit_size(),
            None => 0,
        };
        8 * (x.orbit_size() + om + 2) + 64
    }

    /// Largest value of ψ along the orbit of `x`.
    pub fn max_psi_on_orbit(&self, x: &EpPoint) -> Result<usize> {
        (0..x.orbit_size()).try_fold(0, |m, n| Ok(m.max(self.psi_point(&x.shift(n))?)))
    }

    /// Least common cut `N = ψ_k(x) = ψ_l(y) <= bound` with `T^N x = T^N y`
    /// (and equal letter counts of the consumed prefixes when `counts`).
    pub fn jump_grand_tail(&self, x: &EpPoint, y: &EpPoint, bound: usize, counts: bool) -> Result<Option<JumpWitness>> {
        let cx = self.jump_cuts(x, bound)?;
        let cy = self.jump_cuts(y, bound)?;
        for (k, &n) in cx.iter().enumerate() {
            let Ok(l) = cy.binary_search(&n) else { continue };
            if x.shift(n) == y.shift(n) && (!counts || count_vector(&x.prefix(n)) == count_vector(&y.prefix(n))) {
                return Ok(Some(JumpWitness { k: k + 1, l: l + 1, n }));
            }
        }
        Ok(None)
    }

    /// A search bound for [`jump_grand_tail`](Self::jump_grand_tail) that
    /// covers every tail-equivalence visible within the completeness bound.
    pub fn jump_search_bound(&self, x: &EpPoint, y: &EpPoint) -> Result<usize> {
        let psi = self.max_psi_on_orbit(x)?.max(self.max_psi_on_orbit(y)?);
        Ok(2 * x.completeness_bound(y) + 4 * psi + 8)
    }
}

/// `S^k x = S^l y = T^n x = T^n y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JumpWitness {
    pub k: usize,
    pub l: usize,
    pub n: usize,
}

fn shape_of(pre: Vec<Symbol>, per: Vec<Symbol>) -> OmegaShape {
    let p = EpPoint::new(pre, per).expect("period is nonempty");
    OmegaShape::EventuallyPeriodic {
        preperiod: p.preperiod().clone(),
        period: p.period().clone(),
    }
}

fn ep_parts(shape: &OmegaShape) -> (&Word, &Word) {
    match shape {
        OmegaShape::EventuallyPeriodic { preperiod, period } => (preperiod, period),
        OmegaShape::PurelyComputed(_) => unreachable!("digits beyond the computed orbit require a settled shape"),
    }
}

/// Larger real root of `ax² + bx + c`.
fn quadratic_root(a: i64, b: i64, c: i64) -> Result<ExactScalar> {
    if a == 0 {
        return Err(Error::InvalidBetaSpec("leading coefficient is zero".into()));
    }
    let (a, b, c) = if a < 0 { (-a, -b, -c) } else { (a, b, c) };
    let disc = BigInt::from(b) * b - BigInt::from(4) * a * c;
    if disc < BigInt::zero() {
        return Err(Error::InvalidBetaSpec("no real root".into()));
    }
    let two_a = BigInt::from(2 * a);
    Quadratic::new(
        BigRational::new(BigInt::from(-b), two_a.clone()),
        BigRational::new(BigInt::one(), two_a),
        disc,
    )
}

impl FromStr for BetaSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BetaSystem::parse(s)
    }
}

impl fmt::Display for BetaSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.beta)
    }
}
