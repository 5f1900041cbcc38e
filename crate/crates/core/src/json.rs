//! JSON wire formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. An element is
//!
//! ```json
//! {"shape": [2, 1], "blocks": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[0,2]]]]}
//! ```
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! together with correctly rounded parsing makes `parse ∘ serialize` the
//! identity on finite doubles, bit for bit.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::algebra::{CMat, Element, Shape, C64};
use crate::error::{Error, Result};

/// Compact formatter that prints floats with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub type ComplexWire = [f64; 2];
pub type MatrixWire = Vec<Vec<ComplexWire>>;

pub fn complex_to_wire(z: C64) -> ComplexWire {
    [z.re, z.im]
}

pub fn complex_from_wire(w: ComplexWire) -> C64 {
    C64::new(w[0], w[1])
}

pub fn matrix_to_wire(m: &CMat) -> MatrixWire {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|s| complex_to_wire(m[(r, s)])).collect())
        .collect()
}

pub fn matrix_from_wire(rows: &MatrixWire) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Malformed("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(n, m, |r, s| complex_from_wire(rows[r][s])))
}

pub fn vector_to_wire(v: &crate::algebra::CVec) -> Vec<ComplexWire> {
    v.iter().map(|&z| complex_to_wire(z)).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ElementWire {
    shape: Vec<usize>,
    blocks: Vec<MatrixWire>,
}

impl TryFrom<ElementWire> for Element {
    type Error = Error;

    fn try_from(w: ElementWire) -> Result<Self> {
        let shape = Shape::new(w.shape)?;
        let blocks = w.blocks.iter().map(matrix_from_wire).collect::<Result<Vec<_>>>()?;
        Element::new(shape, blocks)
    }
}

impl From<Element> for ElementWire {
    fn from(e: Element) -> Self {
        ElementWire {
            shape: e.shape().dims().to_vec(),
            blocks: e.blocks().iter().map(matrix_to_wire).collect(),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementWire::from(self.clone()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ElementWire::deserialize(deserializer)?;
        Element::try_from(wire).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Shape {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.dims().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dims = Vec::<usize>::deserialize(deserializer)?;
        Shape::new(dims).map_err(serde::de::Error::custom)
    }
}
