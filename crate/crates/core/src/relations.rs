//! Eventually periodic points and bounded decision procedures for the tail,
//! grand-tail and exchangeable relations between them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::words::{count_vector, CountVector, Symbol, Word};

/// The sequence `(preperiod, period, period, ...)`, kept in canonical form:
/// the period is primitive and the preperiod is as short as possible. Two
/// canonical points are equal as sequences iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpPoint {
    preperiod: Word,
    period: Word,
}

impl EpPoint {
    pub fn new(preperiod: impl Into<Word>, period: impl Into<Word>) -> Result<Self> {
        let (preperiod, period) = (preperiod.into(), period.into());
        if period.is_empty() {
            return Err(Error::InvalidArgument(
                "period of an eventually periodic point must be nonempty".into(),
            ));
        }
        Ok(canonical(preperiod.into_inner(), period.into_inner()))
    }

    /// Purely periodic point.
    pub fn periodic(period: impl Into<Word>) -> Result<Self> {
        EpPoint::new(Word::empty(), period)
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// Symbol at 0-based position `i`.
    pub fn symbol_at(&self, i: usize) -> Symbol {
        let n = self.preperiod.len();
        if i < n {
            self.preperiod[i]
        } else {
            self.period[(i - n) % self.period.len()]
        }
    }

    /// The first `k` symbols.
    pub fn prefix(&self, k: usize) -> Word {
        Word::new((0..k).map(|i| self.symbol_at(i)).collect())
    }

    /// Applies the shift `k` times.
    pub fn shift(&self, k: usize) -> EpPoint {
        let n = self.preperiod.len();
        if k <= n {
            return canonical(self.preperiod[k..].to_vec(), self.period.to_vec());
        }
        let r = (k - n) % self.period.len();
        let mut per = self.period[r..].to_vec();
        per.extend_from_slice(&self.period[..r]);
        canonical(Vec::new(), per)
    }

    /// Number of distinct points in the forward orbit.
    pub fn orbit_size(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// A shift count beyond which tail agreement of `self` and `other` can no
    /// longer first appear: `|pre_x| + |pre_y| + lcm(|per_x|, |per_y|)`.
    pub fn completeness_bound(&self, other: &EpPoint) -> usize {
        let (a, b) = (self.period.len(), other.period.len());
        self.preperiod.len() + other.preperiod.len() + a / gcd(a, b) * b
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn canonical(mut pre: Vec<Symbol>, mut per: Vec<Symbol>) -> EpPoint {
    let n = per.len();
    if let Some(p) = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| per[i] == per[i - p])) {
        per.truncate(p);
    }
    while let Some(&last) = pre.last() {
        if last != *per.last().unwrap() {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    EpPoint {
        preperiod: Word::new(pre),
        period: Word::new(per),
    }
}

impl fmt::Display for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.preperiod, self.period)
    }
}

impl FromStr for EpPoint {
    type Err = Error;

    /// `"pre:period"`, e.g. `"0,1:2"` or `":1,0"`.
    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("point {s:?} must have the form pre:period")))?;
        EpPoint::new(pre.parse::<Word>()?, per.parse::<Word>()?)
    }
}

/// Outcome of a bounded relation search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationVerdict {
    /// `T^k x` and `T^l y` agree (and the weights match, for weighted modes).
    Related {
        k: usize,
        l: usize,
    },
    NotRelatedWithinBound,
}

impl RelationVerdict {
    pub fn is_related(&self) -> bool {
        matches!(self, RelationVerdict::Related { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationMode {
    /// `T^k x = T^k y`.
    Tail,
    /// `T^k x = T^l y`.
    Grand,
}

/// Least `k <= k_max` with `T^k x = T^k y`.
pub fn tail_equivalent(x: &EpPoint, y: &EpPoint, k_max: usize) -> RelationVerdict {
    (0..=k_max)
        .find(|&k| x.shift(k) == y.shift(k))
        .map_or(RelationVerdict::NotRelatedWithinBound, |k| RelationVerdict::Related {
            k,
            l: k,
        })
}

/// Witness `(k, l)` of `T^k x = T^l y`, minimal in the order `(k + l, k)`.
pub fn grand_tail_equivalent(x: &EpPoint, y: &EpPoint, k_max: usize, l_max: usize) -> RelationVerdict {
    weighted_relation(x, y, |_| CountVector::zero(), RelationMode::Grand, k_max, l_max)
}

/// Relation generated by the shift together with an additive weight: the
/// consumed prefixes must carry equal weight. `weight` receives the prefix of
/// length `k` (resp. `l`) and must be additive under concatenation.
pub fn weighted_relation<F>(
    x: &EpPoint,
    y: &EpPoint,
    weight: F,
    mode: RelationMode,
    k_max: usize,
    l_max: usize,
) -> RelationVerdict
where
    F: Fn(&[Symbol]) -> CountVector,
{
    let matches = |k: usize, l: usize| x.shift(k) == y.shift(l) && weight(&x.prefix(k)) == weight(&y.prefix(l));
    match mode {
        RelationMode::Tail => {
            (0..=k_max.min(l_max))
                .find(|&k| matches(k, k))
                .map_or(RelationVerdict::NotRelatedWithinBound, |k| RelationVerdict::Related {
                    k,
                    l: k,
                })
        }
        RelationMode::Grand => {
            for total in 0..=k_max + l_max {
                let lo = total.saturating_sub(l_max);
                for k in lo..=total.min(k_max) {
                    if matches(k, total - k) {
                        return RelationVerdict::Related { k, l: total - k };
                    }
                }
            }
            RelationVerdict::NotRelatedWithinBound
        }
    }
}

/// The exchangeable relation: tail relation weighted by letter counts.
pub fn exchangeable(x: &EpPoint, y: &EpPoint, k_max: usize) -> RelationVerdict {
    weighted_relation(x, y, count_vector, RelationMode::Tail, k_max, k_max)
}
