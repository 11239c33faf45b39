use std::fmt;

use num_bigint::BigUint;

/// Exact non-negative count. Stays in a machine word until it overflows,
/// then switches to arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Count(Repr);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(u64),
    // Invariant: always > u64::MAX, so equal values share a representation.
    Big(BigUint),
}

impl Count {
    pub fn zero() -> Self {
        Count(Repr::Small(0))
    }

    pub fn one() -> Self {
        Count(Repr::Small(1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(x) => BigUint::from(*x),
            Repr::Big(x) => x.clone(),
        }
    }

    /// The value as a `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.0 {
            Repr::Small(x) => Some(x),
            Repr::Big(_) => None,
        }
    }

    pub fn add_assign(&mut self, other: &Count) {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(s) = a.checked_add(*b) {
                self.0 = Repr::Small(s);
                return;
            }
        }
        *self = Count::from(self.to_biguint() + other.to_biguint());
    }

    pub fn mul(&self, other: &Count) -> Count {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(p) = a.checked_mul(*b) {
                return Count(Repr::Small(p));
            }
        }
        Count::from(self.to_biguint() * other.to_biguint())
    }
}

impl From<u64> for Count {
    fn from(x: u64) -> Self {
        Count(Repr::Small(x))
    }
}

impl From<BigUint> for Count {
    fn from(x: BigUint) -> Self {
        match u64::try_from(&x) {
            Ok(small) => Count(Repr::Small(small)),
            Err(_) => Count(Repr::Big(x)),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(x) => write!(f, "{x}"),
            Repr::Big(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotes_on_overflow() {
        let mut a = Count::from(u64::MAX);
        a.add_assign(&Count::one());
        assert_eq!(a.to_string(), "18446744073709551616");
        assert_eq!(a.to_u64(), None);
        let sq = a.mul(&a);
        assert_eq!(sq.to_biguint(), BigUint::from(2u8).pow(128));
        assert_eq!(Count::from(BigUint::from(5u8)), Count::from(5));
        assert!(Count::zero().is_zero());
    }
}
