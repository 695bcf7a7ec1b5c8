//! Number formatting shared by the CSV and JSON writers: 17 significant
//! digits so that every float round-trips exactly.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig17(v, s),
        None => s.serialize_none(),
    }
}

struct Sig(f64);

impl Serialize for Sig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        sig17(&self.0, s)
    }
}

pub fn sig17_vec<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for v in x {
        seq.serialize_element(&Sig(*v))?;
    }
    seq.end()
}

pub fn sig17_map<S: Serializer>(x: &std::collections::BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(x.len()))?;
    for (k, v) in x {
        map.serialize_entry(k, &Sig(*v))?;
    }
    map.end()
}

/// Deserializes a number that may have been written as `null` (non-finite).
pub fn f64_or_nan<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v: Option<f64> = serde::Deserialize::deserialize(d)?;
    Ok(v.unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, serde::Deserialize)]
    struct P {
        #[serde(serialize_with = "sig17")]
        a: f64,
        #[serde(serialize_with = "sig17_vec")]
        b: Vec<f64>,
    }

    #[test]
    fn roundtrip_exact() {
        let p = P { a: 0.1 + 0.2, b: vec![-1e-300, 12345.678901234567, 1.0 / 3.0] };
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("3.0000000000000004e-1"));
        let q: P = serde_json::from_str(&s).unwrap();
        assert_eq!(q.a, p.a);
        assert_eq!(q.b, p.b);
    }
}
