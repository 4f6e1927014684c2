//! JSON forms of constructions and exact parsing of user-supplied numbers.
//!
//! Rationals are stored as `{"num": "...", "den": "..."}` with decimal integer
//! strings, so files survive any JSON reader without precision loss. Loading a
//! construction rebuilds it from its parameters and recertifies it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    AnnuliConstruction, AnnuliConstructionParams, BoxConstruction, BoxConstructionParams,
    Construction,
};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const CONSTRUCTION_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalRepr {
    fn from(q: &BigRational) -> Self {
        RationalRepr {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalRepr> for BigRational {
    type Error = Error;

    fn try_from(r: &RationalRepr) -> Result<Self> {
        let num: BigInt = r
            .num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {:?}", r.num)))?;
        let den: BigInt = r
            .den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {:?}", r.den)))?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    }
}

/// Parses `"p/q"` or an integer `"p"`. Decimals and exponents are rejected so
/// that nothing is silently rounded on the way in.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "{s:?} is not an exact rational; write it as p/q"
        )));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    BigRational::try_from(&RationalRepr {
        num: num.to_string(),
        den: den.to_string(),
    })
    .map_err(|_| Error::Parse(format!("{s:?} is not a rational of the form p/q")))
}

/// Parses `"x1,x2,…"` with each coordinate in `p/q` form.
pub fn parse_point(s: &str) -> Result<Point> {
    let coords = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    Ok(Point::new(coords))
}

fn reprs(v: &[BigRational]) -> Vec<RationalRepr> {
    v.iter().map(RationalRepr::from).collect()
}

fn rationals(v: &[RationalRepr]) -> Result<Vec<BigRational>> {
    v.iter().map(BigRational::try_from).collect()
}

#[derive(Serialize, Deserialize)]
struct BoxParamsRepr {
    d: usize,
    epsilon: RationalRepr,
    growth: RationalRepr,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct AnnuliParamsRepr {
    d: usize,
    epsilon0: RationalRepr,
    growth: RationalRepr,
    start_index: usize,
    count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ConstructionRepr {
    Boxes {
        schema_version: u32,
        params: BoxParamsRepr,
        radii: Vec<RationalRepr>,
        sides: Vec<RationalRepr>,
        offsets: Vec<RationalRepr>,
    },
    Annuli {
        schema_version: u32,
        params: AnnuliParamsRepr,
        radii: Vec<RationalRepr>,
    },
}

pub fn construction_to_json(c: &Construction) -> String {
    let repr = match c {
        Construction::Boxes(b) => {
            let p = b.params();
            ConstructionRepr::Boxes {
                schema_version: CONSTRUCTION_SCHEMA_VERSION,
                params: BoxParamsRepr {
                    d: p.d,
                    epsilon: (&p.epsilon).into(),
                    growth: (&p.growth).into(),
                    count: p.count,
                },
                radii: reprs(b.radii()),
                sides: reprs(b.sides()),
                offsets: reprs(b.offsets()),
            }
        }
        Construction::Annuli(a) => {
            let p = a.params();
            ConstructionRepr::Annuli {
                schema_version: CONSTRUCTION_SCHEMA_VERSION,
                params: AnnuliParamsRepr {
                    d: p.d,
                    epsilon0: (&p.epsilon0).into(),
                    growth: (&p.growth).into(),
                    start_index: p.start_index,
                    count: p.count,
                },
                radii: reprs(a.radii()),
            }
        }
    };
    serde_json::to_string_pretty(&repr).expect("constructions serialize")
}

/// Loads a construction; the stored sequences must match a fresh, certified rebuild.
pub fn construction_from_json(s: &str) -> Result<Construction> {
    match serde_json::from_str::<ConstructionRepr>(s)? {
        ConstructionRepr::Boxes {
            schema_version,
            params,
            radii,
            sides,
            offsets,
        } => {
            check_version(schema_version)?;
            let params = BoxConstructionParams {
                d: params.d,
                epsilon: (&params.epsilon).try_into()?,
                growth: (&params.growth).try_into()?,
                count: params.count,
            };
            Ok(Construction::Boxes(BoxConstruction::from_parts(
                params,
                rationals(&radii)?,
                rationals(&sides)?,
                rationals(&offsets)?,
            )?))
        }
        ConstructionRepr::Annuli {
            schema_version,
            params,
            radii,
        } => {
            check_version(schema_version)?;
            let params = AnnuliConstructionParams {
                d: params.d,
                epsilon0: (&params.epsilon0).try_into()?,
                growth: (&params.growth).try_into()?,
                start_index: params.start_index,
                count: params.count,
            };
            Ok(Construction::Annuli(AnnuliConstruction::from_parts(
                params,
                rationals(&radii)?,
            )?))
        }
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != CONSTRUCTION_SCHEMA_VERSION {
        return Err(Error::SchemaVersion(v));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_annuli, build_boxes};
    use crate::exact::{int, rat};

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/100").unwrap(), rat(1, 100));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("0.01").is_err());
        assert!(parse_rational("1e-2").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(
            parse_point("1/2,3").unwrap(),
            Point::new(vec![rat(1, 2), int(3)])
        );
    }

    #[test]
    fn construction_round_trip() {
        let boxes = Construction::Boxes(build_boxes(BoxConstructionParams::relaxed(2, 4)).unwrap());
        let s = construction_to_json(&boxes);
        assert!(s.contains("\"kind\": \"boxes\""));
        assert!(s.contains("\"schema_version\": 1"));
        assert_eq!(construction_from_json(&s).unwrap(), boxes);

        let annuli =
            Construction::Annuli(build_annuli(AnnuliConstructionParams::new(3, 5)).unwrap());
        let s = construction_to_json(&annuli);
        assert_eq!(construction_from_json(&s).unwrap(), annuli);
        assert_eq!(
            construction_to_json(&construction_from_json(&s).unwrap()),
            s
        );
    }

    #[test]
    fn tampered_files_are_rejected() {
        let boxes = Construction::Boxes(build_boxes(BoxConstructionParams::relaxed(2, 3)).unwrap());
        let s = construction_to_json(&boxes);
        let bumped = s.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        assert!(matches!(
            construction_from_json(&bumped),
            Err(Error::SchemaVersion(9))
        ));
        // Shrink the growth factor below 100d/ε.
        let weak = s.replacen("\"num\": \"20200\"", "\"num\": \"20000\"", 1);
        assert_ne!(weak, s);
        assert!(construction_from_json(&weak).is_err());
    }
}
