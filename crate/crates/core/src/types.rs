//! Shared primitive types.

use serde::{Deserialize, Serialize};
use std::fmt;

/// An account, contract, or pool identifier. Token contracts are identified by
/// their own address, so the same type names tokens, pools, and wallets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(pub String);

impl Address {
    pub fn new(s: impl Into<String>) -> Self {
        Address(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Address {
    fn from(s: &str) -> Self {
        Address(s.to_string())
    }
}

impl From<String> for Address {
    fn from(s: String) -> Self {
        Address(s)
    }
}

/// An exact non-negative fraction, used wherever a fee or a fee threshold must
/// compare without floating-point rounding: `num / den`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    /// A ratio `num / den`. Panics on a zero denominator.
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "ratio denominator must be nonzero");
        Ratio { num, den }
    }

    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };

    /// Basis points: `bps / 10_000`.
    pub fn from_bps(bps: u32) -> Self {
        Ratio {
            num: bps as u128,
            den: 10_000,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `amount * (1 - self)`, rounded down. Callers keep `self <= 1`.
    pub fn complement_of(&self, amount: u128) -> u128 {
        let kept = self.den.saturating_sub(self.num);
        amount * kept / self.den
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.num * other.den == other.num * self.den
    }
}

/// Zero with a valid denominator; the derived form would produce 0/0.
impl Default for Ratio {
    fn default() -> Self {
        Ratio::ZERO
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Serde codec for 128-bit amounts as decimal strings.
///
/// Tagged and flattened containers buffer their fields through serde's
/// internal `Content` type, which has no 128-bit variant; strings pass
/// through unharmed. Plain JSON integers are still accepted on input.
pub mod dec_string {
    use serde::{de, Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = u128;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a decimal string or unsigned integer")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<u128, E> {
                s.parse()
                    .map_err(|_| E::custom(format!("invalid amount: {s:?}")))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<u128, E> {
                Ok(u128::from(v))
            }

            fn visit_u128<E: de::Error>(self, v: u128) -> Result<u128, E> {
                Ok(v)
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_orders_by_cross_multiplication() {
        assert!(Ratio::new(29, 100) < Ratio::new(30, 100));
        assert!(Ratio::new(31, 100) > Ratio::new(30, 100));
        assert_eq!(Ratio::new(1, 2), Ratio::new(50, 100));
        assert!(Ratio::from_bps(3500) > Ratio::from_bps(3000));
    }

    #[test]
    fn complement_is_floored() {
        // 500 * (1 - 0.30) = 350 exactly; 1000 * (1 - 1/3) floors to 666.
        assert_eq!(Ratio::new(30, 100).complement_of(500), 350);
        assert_eq!(Ratio::new(1, 3).complement_of(1000), 666);
        assert_eq!(Ratio::ZERO.complement_of(777), 777);
    }
}
