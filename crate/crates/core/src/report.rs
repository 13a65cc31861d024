//! Serialization shape shared by every emitted record: complex values appear
//! as `{"re": .., "im": ..}` objects in JSON and as a pair of `_re`/`_im`
//! columns in CSV, so that records stay greppable and spreadsheet-friendly.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// `#[serde(serialize_with = ..)]` hook writing a complex number as an
/// `re`/`im` object.
pub fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

struct Wire(Complex64);

impl Serialize for Wire {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_complex(&self.0, s)
    }
}

/// Map variant of [`serialize_complex`] for named parameter sets.
pub fn serialize_complex_map<S: Serializer>(
    m: &BTreeMap<String, Complex64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, &v)| (k, Wire(v))))
}

/// The two CSV cells of a complex value, in `re`, `im` order.
pub fn csv_complex(z: Complex64) -> [String; 2] {
    [format!("{:.17e}", z.re), format!("{:.17e}", z.im)]
}
