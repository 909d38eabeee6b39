//! Exact rational parameters.
//!
//! Gate parameters are parsed from `"a/b"` or integer strings only; decimal
//! input is rejected so that nothing near a boundary is silently rounded.

use alloc::format;
use alloc::string::String;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"a/b"`, `"a"` or `"-a/b"`. Decimal notation is an error.
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::InvalidArgument(String::from("empty rational")));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::InvalidArgument(format!(
            "'{t}' is not an exact rational (write it as a/b)"
        )));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i128 = num
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad numerator in '{t}'")))?;
    let d: i128 = den
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad denominator in '{t}'")))?;
    if d.is_zero() {
        return Err(Error::InvalidArgument(format!("zero denominator in '{t}'")));
    }
    Ok(Rational::new(n, d))
}

pub fn to_f64(x: &Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `a/b` form used in reports; integers print without a denominator.
pub fn format(x: &Rational) -> String {
    if *x.denom() == 1 {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(feature = "serde")]
pub mod serde_str {
    //! Serialize rationals as `"a/b"` strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> core::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(feature = "serde")]
pub mod serde_str_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        x: &Option<Rational>,
        s: S,
    ) -> core::result::Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&format(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> core::result::Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("4/3").unwrap(), rat(4, 3));
        assert_eq!(parse(" -9/10 ").unwrap(), rat(-9, 10));
        assert_eq!(parse("12").unwrap(), int(12));
        assert_eq!(parse("200/99").unwrap(), rat(200, 99));
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        assert!(parse("1.5").is_err());
        assert!(parse("2e3").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("").is_err());
        assert!(parse("a/b").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format(&rat(-48, 100)), "-12/25");
        assert_eq!(format(&rat(6, 3)), "2");
    }
}
