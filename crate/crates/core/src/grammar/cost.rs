use num_rational::Ratio;
use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// Non-negative rational cost, or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Ratio<u64>),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Ratio::new_raw(0, 1));
    pub const ONE: Cost = Cost::Finite(Ratio::new_raw(1, 1));

    pub fn integer(n: u64) -> Cost {
        Cost::Finite(Ratio::from_integer(n))
    }

    pub fn ratio(numer: u64, denom: u64) -> Cost {
        Cost::Finite(Ratio::new(numer, denom))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        *self == Cost::ZERO
    }
}

impl Default for Cost {
    fn default() -> Self {
        Cost::ZERO
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Infinite => write!(f, "inf"),
            Cost::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Cost::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadCost(pub String);

impl FromStr for Cost {
    type Err = BadCost;

    /// Accepts `inf`, integers, `p/q` fractions and finite decimals.
    fn from_str(s: &str) -> Result<Cost, BadCost> {
        let bad = || BadCost(s.to_string());
        if s == "inf" {
            return Ok(Cost::Infinite);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.parse().map_err(|_| bad())?;
            let q: u64 = q.parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Cost::ratio(p, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u64 = int.parse().map_err(|_| bad())?;
            let denom = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            return Ok(Cost::ratio(int * denom + frac, denom));
        }
        s.parse::<u64>().map(Cost::integer).map_err(|_| bad())
    }
}
