//! Model files: JSON descriptions of `H`, a connection, `K`, a Dirac
//! structure, a generalized metric and a Lie algebroid.
//!
//! All tensor indices in the file are 1-based, matching the coordinate names
//! `x1 … xn`. Scalar values are expression strings or integers.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::algebroid::{AlgebroidConnection, AlgebroidModel};
use crate::connection::{Block, GenConnection};
use crate::courant::CourantModel;
use crate::dirac::DiracStructure;
use crate::error::{Error, Result};
use crate::ktensors::KConnection;
use crate::linalg::Matrix;
use crate::parse::parse_scalar;
use crate::rational::RationalFunction;
use crate::ricci::GeneralizedMetric;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    indices: Vec<usize>,
    value: RawScalar,
}

type RawBlock = Vec<RawEntry>;
type RawMatrix = Vec<Vec<RawScalar>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    #[serde(rename = "Gamma_TT")]
    gamma_tt: Option<RawBlock>,
    #[serde(rename = "Gamma_TsTs")]
    gamma_tsts: Option<RawBlock>,
    #[serde(rename = "Gamma_TTs")]
    gamma_tts: Option<RawBlock>,
    #[serde(rename = "Gamma_TsT")]
    gamma_tst: Option<RawBlock>,
    #[serde(rename = "V_TT")]
    v_tt: Option<RawBlock>,
    #[serde(rename = "V_TTs")]
    v_tts: Option<RawBlock>,
    #[serde(rename = "V_TsT")]
    v_tst: Option<RawBlock>,
    #[serde(rename = "V_TsTs")]
    v_tsts: Option<RawBlock>,
}

impl RawConnection {
    fn blocks(&self) -> [(Block, &Option<RawBlock>); 8] {
        [
            (Block::GammaTT, &self.gamma_tt),
            (Block::GammaTsTs, &self.gamma_tsts),
            (Block::GammaTTs, &self.gamma_tts),
            (Block::GammaTsT, &self.gamma_tst),
            (Block::VTT, &self.v_tt),
            (Block::VTTs, &self.v_tts),
            (Block::VTsT, &self.v_tst),
            (Block::VTsTs, &self.v_tsts),
        ]
    }

    fn is_empty(&self) -> bool {
        self.blocks().iter().all(|(_, b)| b.is_none())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirac {
    #[serde(rename = "type")]
    kind: Option<String>,
    pi: Option<RawMatrix>,
    #[serde(rename = "rho_T")]
    rho_t: Option<RawMatrix>,
    #[serde(rename = "rho_Tstar")]
    rho_tstar: Option<RawMatrix>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    g: RawMatrix,
    #[serde(rename = "B")]
    b: Option<RawMatrix>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebroid {
    rank: usize,
    rho: RawMatrix,
    #[serde(default)]
    f: RawBlock,
    #[serde(rename = "Gamma")]
    gamma: Option<RawBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    n: usize,
    #[serde(rename = "H", default)]
    h: RawBlock,
    #[serde(rename = "Gamma_TT")]
    gamma_tt: Option<RawBlock>,
    #[serde(rename = "Gamma_TsTs")]
    gamma_tsts: Option<RawBlock>,
    #[serde(rename = "Gamma_TTs")]
    gamma_tts: Option<RawBlock>,
    #[serde(rename = "Gamma_TsT")]
    gamma_tst: Option<RawBlock>,
    #[serde(rename = "V_TT")]
    v_tt: Option<RawBlock>,
    #[serde(rename = "V_TTs")]
    v_tts: Option<RawBlock>,
    #[serde(rename = "V_TsT")]
    v_tst: Option<RawBlock>,
    #[serde(rename = "V_TsTs")]
    v_tsts: Option<RawBlock>,
    connection: Option<RawConnection>,
    #[serde(rename = "K")]
    k: Option<RawBlock>,
    dirac: Option<RawDirac>,
    metric: Option<RawMetric>,
    algebroid: Option<RawAlgebroid>,
    seed: Option<u64>,
}

/// A Lie algebroid with an optional connection on it.
#[derive(Debug, Clone)]
pub struct AlgebroidData {
    pub model: AlgebroidModel,
    pub connection: Option<AlgebroidConnection>,
}

/// A validated model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub n: usize,
    pub courant: CourantModel,
    pub connection: Option<GenConnection>,
    pub k: Option<KConnection>,
    pub dirac: Option<DiracStructure>,
    pub metric: Option<GeneralizedMetric>,
    pub algebroid: Option<AlgebroidData>,
    pub seed: Option<u64>,
}

impl ModelFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("model JSON: {e}")))?;
        Loader { n: raw.n }.load(raw)
    }

    pub fn require_connection(&self) -> Result<&GenConnection> {
        self.connection.as_ref().ok_or_else(|| missing("connection blocks"))
    }

    pub fn require_k(&self) -> Result<&KConnection> {
        self.k.as_ref().ok_or_else(|| missing("K"))
    }

    pub fn require_dirac(&self) -> Result<&DiracStructure> {
        self.dirac.as_ref().ok_or_else(|| missing("dirac"))
    }

    pub fn require_metric(&self) -> Result<&GeneralizedMetric> {
        self.metric.as_ref().ok_or_else(|| missing("metric"))
    }

    pub fn require_algebroid(&self) -> Result<&AlgebroidData> {
        self.algebroid.as_ref().ok_or_else(|| missing("algebroid"))
    }

    /// `K` from the file, or zero when absent.
    pub fn k_or_zero(&self) -> KConnection {
        self.k.clone().unwrap_or_else(|| KConnection::zero(self.n))
    }
}

fn missing(what: &str) -> Error {
    Error::Invalid(format!("model has no {what} block"))
}

struct Loader {
    n: usize,
}

impl Loader {
    fn load(&self, raw: RawModel) -> Result<ModelFile> {
        let n = self.n;
        if n == 0 || n > 9 {
            return Err(Error::Invalid(format!("n = {n} is out of range 1..=9")));
        }
        let mut courant = CourantModel::new(n);
        for (idx, v) in self.entries("H", &raw.h, 3, n)? {
            if courant.h(idx[0], idx[1], idx[2]) != RationalFunction::zero() {
                return Err(Error::Invalid(format!("H: component {} given twice up to order", one_based(&idx))));
            }
            courant.set_h(idx[0], idx[1], idx[2], v).map_err(|e| Error::Invalid(format!("H: {e}")))?;
        }

        let top = RawConnection {
            gamma_tt: raw.gamma_tt,
            gamma_tsts: raw.gamma_tsts,
            gamma_tts: raw.gamma_tts,
            gamma_tst: raw.gamma_tst,
            v_tt: raw.v_tt,
            v_tts: raw.v_tts,
            v_tst: raw.v_tst,
            v_tsts: raw.v_tsts,
        };
        let conn_raw = match (raw.connection, top.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Invalid("connection blocks given both at top level and under \"connection\"".into()))
            }
            (Some(c), true) => Some(c),
            (None, false) => Some(top),
            (None, true) => None,
        };
        let connection = conn_raw.map(|c| self.connection(&c)).transpose()?;

        let k = raw
            .k
            .map(|entries| -> Result<KConnection> {
                let mut k = KConnection::zero(n);
                for (idx, v) in self.entries("K", &entries, 3, n)? {
                    k.set(idx[0], idx[1], idx[2], v)?;
                }
                Ok(k)
            })
            .transpose()?;

        let dirac = raw.dirac.map(|d| self.dirac(&d)).transpose()?;
        let metric = raw
            .metric
            .map(|m| -> Result<GeneralizedMetric> {
                let g = self.matrix("metric.g", &m.g, n, n)?;
                let b = match &m.b {
                    Some(b) => self.matrix("metric.B", b, n, n)?,
                    None => crate::linalg::zeros(n, n),
                };
                GeneralizedMetric::new(g, b).map_err(|e| Error::Invalid(format!("metric: {e}")))
            })
            .transpose()?;
        let algebroid = raw.algebroid.map(|a| self.algebroid(&a)).transpose()?;

        Ok(ModelFile { n, courant, connection, k, dirac, metric, algebroid, seed: raw.seed })
    }

    fn scalar(&self, what: &str, s: &RawScalar) -> Result<RationalFunction> {
        match s {
            RawScalar::Int(i) => Ok(RationalFunction::from_int(*i)),
            RawScalar::Text(t) => parse_scalar(t, Some(self.n)).map_err(|e| Error::Invalid(format!("{what}: {e}"))),
        }
    }

    /// Converts entries to 0-based indices, rejecting out-of-range and
    /// duplicate index tuples.
    fn entries(&self, what: &str, raw: &[RawEntry], arity: usize, bound: usize) -> Result<Vec<(Vec<usize>, RationalFunction)>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(raw.len());
        for e in raw {
            if e.indices.len() != arity {
                return Err(Error::Invalid(format!("{what}: expected {arity} indices, got {:?}", e.indices)));
            }
            if e.indices.iter().any(|&i| i == 0 || i > bound) {
                return Err(Error::Invalid(format!("{what}: indices {:?} outside 1..={bound}", e.indices)));
            }
            let idx: Vec<usize> = e.indices.iter().map(|i| i - 1).collect();
            if !seen.insert(idx.clone()) {
                return Err(Error::Invalid(format!("{what}: indices {:?} given twice", e.indices)));
            }
            let v = self.scalar(&format!("{what}{:?}", e.indices), &e.value)?;
            out.push((idx, v));
        }
        Ok(out)
    }

    fn matrix(&self, what: &str, raw: &RawMatrix, rows: usize, cols: usize) -> Result<Matrix> {
        if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid(format!("{what}: expected a {rows}×{cols} matrix")));
        }
        raw.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| self.scalar(&format!("{what}[{}][{}]", i + 1, j + 1), s))
                    .collect()
            })
            .collect()
    }

    fn connection(&self, raw: &RawConnection) -> Result<GenConnection> {
        let mut c = GenConnection::zero_generalized(self.n);
        for (block, entries) in raw.blocks() {
            if let Some(entries) = entries {
                for (idx, v) in self.entries(block.name(), entries, 3, self.n)? {
                    c.set_block(block, idx[0], idx[1], idx[2], v)?;
                }
            }
        }
        Ok(c)
    }

    fn dirac(&self, raw: &RawDirac) -> Result<DiracStructure> {
        let n = self.n;
        let wrap = |e: Error| Error::Invalid(format!("dirac: {e}"));
        match (raw.kind.as_deref(), &raw.pi, &raw.rho_t, &raw.rho_tstar) {
            (Some("tangent"), None, None, None) => Ok(DiracStructure::tangent(n)),
            (Some("poisson"), Some(pi), None, None) => {
                DiracStructure::poisson(&self.matrix("dirac.pi", pi, n, n)?).map_err(wrap)
            }
            (None, None, Some(rt), Some(rs)) => {
                let rt = self.matrix("dirac.rho_T", rt, n, n)?;
                let rs = self.matrix("dirac.rho_Tstar", rs, n, n)?;
                DiracStructure::new(rt, rs).map_err(wrap)
            }
            _ => Err(Error::Invalid(
                "dirac: expected {\"type\": \"tangent\"}, {\"type\": \"poisson\", \"pi\": ...} or {\"rho_T\": ..., \"rho_Tstar\": ...}"
                    .into(),
            )),
        }
    }

    fn algebroid(&self, raw: &RawAlgebroid) -> Result<AlgebroidData> {
        let (n, r) = (self.n, raw.rank);
        if r == 0 || r > 9 {
            return Err(Error::Invalid(format!("algebroid: rank {r} is out of range 1..=9")));
        }
        let mut model = AlgebroidModel::new(n, r);
        let rho = self.matrix("algebroid.rho", &raw.rho, n, r)?;
        for (mu, row) in rho.into_iter().enumerate() {
            for (alpha, v) in row.into_iter().enumerate() {
                model.set_rho(mu, alpha, v)?;
            }
        }
        for (idx, v) in self.entries("algebroid.f", &raw.f, 3, r)? {
            if idx[1] == idx[2] && !v.is_zero() {
                return Err(Error::Invalid(format!("algebroid.f: {} must vanish (antisymmetry)", one_based(&idx))));
            }
            if idx[1] < idx[2] || v.is_zero() {
                model.set_f(idx[0], idx[1], idx[2], v)?;
            } else if model.f(idx[0], idx[2], idx[1]).is_zero() {
                model.set_f(idx[0], idx[2], idx[1], -&v)?;
            } else if *model.f(idx[0], idx[2], idx[1]) != -&v {
                return Err(Error::Invalid(format!("algebroid.f: {} contradicts antisymmetry", one_based(&idx))));
            }
        }
        let connection = raw
            .gamma
            .as_ref()
            .map(|entries| -> Result<AlgebroidConnection> {
                let mut c = AlgebroidConnection::zero(r);
                for (idx, v) in self.entries("algebroid.Gamma", entries, 3, r)? {
                    c.set(idx[0], idx[1], idx[2], v)?;
                }
                Ok(c)
            })
            .transpose()?;
        Ok(AlgebroidData { model, connection })
    }
}

fn one_based(idx: &[usize]) -> String {
    let v: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", v.join(", "))
}
