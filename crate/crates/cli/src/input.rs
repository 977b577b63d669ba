//! Input schemas and their conversion to library types.

use std::path::Path;

use num_complex::Complex64;
use scalekit::bl_apps::{BLDatum, MatroidPair};
use scalekit::invariant_core::{TorusVector, WeightSystem};
use scalekit::matrix_scaling::NonNegMatrix;
use scalekit::numerics::rational::to_f64;
use scalekit::numerics::{bit_length, parse_rational, ComplexMatrix, Rational, TensorTuple};
use scalekit::operator_scaling::MatrixTuple;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Number, Value};

use crate::error::CliError;

/// A parsed input file together with an optional `"flavor"` field.
pub struct Document {
    pub flavor: Option<String>,
    body: Value,
}

impl Document {
    pub fn read(path: Option<&Path>) -> Result<Self, CliError> {
        let text = match path {
            Some(p) if p.as_os_str() != "-" => {
                std::fs::read_to_string(p).map_err(|source| CliError::Read {
                    path: p.display().to_string(),
                    source,
                })?
            }
            _ => std::io::read_to_string(std::io::stdin()).map_err(|source| CliError::Read {
                path: "<stdin>".into(),
                source,
            })?,
        };
        let mut body: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))?;
        let flavor = match body.as_object_mut().and_then(|o| o.remove("flavor")) {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(_) => return Err(CliError::Schema("\"flavor\" must be a string".into())),
        };
        Ok(Self { flavor, body })
    }

    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        T::deserialize(&self.body).map_err(|e| CliError::Schema(e.to_string()))
    }
}

/// A real entry: a rational string such as `"3/4"` or a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Number(Number),
}

impl Scalar {
    /// Exact value; floats are read as their shortest decimal form.
    pub fn rational(&self) -> Result<Rational, CliError> {
        let text = match self {
            Scalar::Text(s) => s.clone(),
            Scalar::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
                (Some(i), _, _) => i.to_string(),
                (_, Some(u), _) => u.to_string(),
                (_, _, Some(f)) => f.to_string(),
                _ => return Err(CliError::Schema(format!("unreadable number {n}"))),
            },
        };
        parse_rational(&text).map_err(|e| CliError::Schema(e.to_string()))
    }
}

/// A complex entry `[re, im]`, or a bare real.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([Scalar; 2]),
    Real(Scalar),
}

impl Entry {
    fn parts(&self) -> Result<(Rational, Rational), CliError> {
        match self {
            Entry::Pair([re, im]) => Ok((re.rational()?, im.rational()?)),
            Entry::Real(x) => Ok((x.rational()?, Rational::from_integer(0.into()))),
        }
    }
}

/// Complex values with the maximal bit length over real and imaginary parts.
fn complex_values(entries: &[Entry]) -> Result<(Vec<Complex64>, u64), CliError> {
    let mut bits = 1;
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let (re, im) = e.parts()?;
        bits = bits.max(bit_length(&re)).max(bit_length(&im));
        out.push(Complex64::new(to_f64(&re), to_f64(&im)));
    }
    Ok((out, bits))
}

fn check_len(what: &str, got: usize, want: usize) -> Result<(), CliError> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::Schema(format!(
            "{what} has length {got}, expected {want}"
        )))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    pub n: usize,
    pub entries: Vec<Vec<Scalar>>,
}

impl MatrixInput {
    pub fn build(&self) -> Result<NonNegMatrix, CliError> {
        check_len("entries", self.entries.len(), self.n)?;
        let rows = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                check_len(&format!("row {}", i + 1), row.len(), self.n)?;
                row.iter()
                    .map(Scalar::rational)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NonNegMatrix::from_rationals(rows)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleInput {
    pub m: usize,
    pub n: usize,
    pub matrices: Vec<Vec<Vec<Entry>>>,
}

impl TupleInput {
    pub fn build(&self) -> Result<MatrixTuple, CliError> {
        check_len("matrices", self.matrices.len(), self.m)?;
        let mut bits = 1;
        let mut mats = Vec::with_capacity(self.m);
        for (k, rows) in self.matrices.iter().enumerate() {
            check_len(&format!("matrix {}", k + 1), rows.len(), self.n)?;
            let mut data = Vec::with_capacity(self.n * self.n);
            for row in rows {
                check_len(&format!("a row of matrix {}", k + 1), row.len(), self.n)?;
                let (vals, b) = complex_values(row)?;
                bits = bits.max(b);
                data.extend(vals);
            }
            mats.push(ComplexMatrix::from_vec(self.n, self.n, data)?);
        }
        Ok(MatrixTuple::new(mats)?.with_bit_complexity(bits))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorInput {
    pub m: usize,
    pub shape: Vec<usize>,
    pub entries: Vec<Entry>,
}

impl TensorInput {
    /// The tensor tuple and the bit complexity of its entries.
    pub fn build(&self) -> Result<(TensorTuple, u64), CliError> {
        let len = self.m * self.shape.iter().product::<usize>();
        check_len("entries", self.entries.len(), len)?;
        let (data, bits) = complex_values(&self.entries)?;
        Ok((TensorTuple::new(self.m, self.shape.clone(), data)?, bits))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub ni: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Scalar>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BLInput {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub p: Vec<Scalar>,
}

fn real_rows(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<f64>>, CliError> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.rational().map(|q| to_f64(&q))).collect())
        .collect()
}

impl BLInput {
    pub fn build(&self) -> Result<BLDatum, CliError> {
        let maps = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, blk)| {
                check_len(&format!("block {}", i + 1), blk.b.len(), blk.ni)?;
                real_rows(&blk.b)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = self
            .p
            .iter()
            .map(Scalar::rational)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BLDatum::new(self.n, maps, p)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForsterInput {
    pub vectors: Vec<Vec<Scalar>>,
}

impl ForsterInput {
    pub fn build(&self) -> Result<Vec<Vec<f64>>, CliError> {
        real_rows(&self.vectors)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatroidInput {
    pub v: Vec<Vec<Scalar>>,
    pub w: Vec<Vec<Scalar>>,
    pub x: Vec<Scalar>,
}

impl MatroidInput {
    pub fn build(&self) -> Result<(MatroidPair, Vec<Rational>), CliError> {
        let pair = MatroidPair::new(real_rows(&self.v)?, real_rows(&self.w)?)?;
        let x = self
            .x
            .iter()
            .map(Scalar::rational)
            .collect::<Result<Vec<_>, _>>()?;
        Ok((pair, x))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusInput {
    pub n: usize,
    pub weights: Vec<Vec<i64>>,
    #[serde(default)]
    pub coefficients: Option<Vec<Entry>>,
}

impl TorusInput {
    pub fn build(&self) -> Result<(WeightSystem, TorusVector), CliError> {
        let ws = WeightSystem::new(self.n, self.weights.clone())?;
        let v = match &self.coefficients {
            None => TorusVector::full(ws.m()),
            Some(c) => {
                check_len("coefficients", c.len(), ws.m())?;
                TorusVector::new(complex_values(c)?.0)
            }
        };
        Ok((ws, v))
    }
}
