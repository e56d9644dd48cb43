//! Problem files: JSON documents whose polynomial fields are expression
//! strings and whose matrices hold integers or `"p/q"` strings.

use std::path::Path;

use serde_json::Value;
use thiserror::Error;
use wdvv_core::algebra::{parse_rational, ConstSymMatrix, Poly, PolyMatrix, Rational};
use wdvv_core::exprlang::parse_polynomial;
use wdvv_core::frobenius::Potential;
use wdvv_core::hamop::FlatHamOp;
use wdvv_core::submanifold::PsiSystem;

/// Anything wrong with the input rather than with the mathematics.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{pointer}: parse error at column {column}: {message}")]
    Parse {
        pointer: String,
        column: usize,
        message: String,
    },
    #[error("{pointer}: matrix is singular or not symmetric")]
    Singular { pointer: String },
    #[error("command `{command}` does not accept a `{kind}` problem")]
    Kind { command: String, kind: &'static str },
    #[error("{0}")]
    Invalid(String),
}

fn schema(pointer: &str, message: impl Into<String>) -> InputError {
    InputError::Schema {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Debug)]
pub struct GridInput {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct LoopInput {
    pub corner: Vec<f64>,
    /// Zero-based coordinate indices spanning the loop.
    pub plane: (usize, usize),
    pub side: f64,
}

#[derive(Clone, Debug)]
pub struct EmbeddingInput {
    pub potential: Potential,
    pub c: Option<Rational>,
    pub base: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub delta: Option<f64>,
    pub tolerance: Option<f64>,
    pub grid: Option<GridInput>,
    pub lp: Option<LoopInput>,
}

#[derive(Clone, Debug)]
pub enum FlowSource {
    /// Structural flows of a ψ-system; densities come from its hierarchy.
    System(PsiSystem),
    Matrix(PolyMatrix),
}

#[derive(Clone, Debug)]
pub struct SimulationInput {
    pub n: usize,
    pub source: FlowSource,
    pub densities: Vec<Poly>,
    pub m: Option<usize>,
    pub length: Option<f64>,
    pub amplitude: Option<f64>,
    pub phases: Option<Vec<f64>>,
    pub background: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum Problem {
    Potential(Potential),
    PsiSystem(PsiSystem),
    HamOp(FlatHamOp),
    Embedding(Box<EmbeddingInput>),
    Simulation(Box<SimulationInput>),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Potential(_) => "potential",
            Problem::PsiSystem(_) => "psi_system",
            Problem::HamOp(_) => "hamop",
            Problem::Embedding(_) => "embedding",
            Problem::Simulation(_) => "simulation",
        }
    }
}

pub fn load_problem(path: &Path) -> Result<Problem, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_problem(&text)
}

pub fn parse_problem(text: &str) -> Result<Problem, InputError> {
    let v: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    let doc = Doc { root: &v };
    let kind = doc.string("/kind")?;
    match kind.as_str() {
        "potential" => Ok(Problem::Potential(doc.potential("")?)),
        "psi_system" => Ok(Problem::PsiSystem(doc.psi_system("")?)),
        "hamop" => Ok(Problem::HamOp(doc.hamop()?)),
        "embedding" => Ok(Problem::Embedding(Box::new(doc.embedding()?))),
        "simulation" => Ok(Problem::Simulation(Box::new(doc.simulation()?))),
        other => Err(schema("/kind", format!("unknown kind `{other}`"))),
    }
}

struct Doc<'a> {
    root: &'a Value,
}

impl<'a> Doc<'a> {
    fn get(&self, pointer: &str) -> Option<&'a Value> {
        self.root.pointer(pointer).filter(|v| !v.is_null())
    }

    fn req(&self, pointer: &str) -> Result<&'a Value, InputError> {
        self.get(pointer).ok_or_else(|| schema(pointer, "missing field"))
    }

    fn string(&self, pointer: &str) -> Result<String, InputError> {
        self.req(pointer)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| schema(pointer, "expected a string"))
    }

    fn usize(&self, pointer: &str) -> Result<usize, InputError> {
        self.req(pointer)?
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| schema(pointer, "expected a nonnegative integer"))
    }

    fn opt_usize(&self, pointer: &str) -> Result<Option<usize>, InputError> {
        self.get(pointer).map(|_| self.usize(pointer)).transpose()
    }

    fn float(&self, pointer: &str) -> Result<f64, InputError> {
        let v = self.req(pointer)?;
        let x = match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => parse_rational(s).map(|r| rational_to_f64(&r)),
            _ => None,
        };
        x.filter(|x| x.is_finite())
            .ok_or_else(|| schema(pointer, "expected a finite number"))
    }

    fn opt_float(&self, pointer: &str) -> Result<Option<f64>, InputError> {
        self.get(pointer).map(|_| self.float(pointer)).transpose()
    }

    fn float_vec(&self, pointer: &str, len: usize) -> Result<Vec<f64>, InputError> {
        let arr = self.array(pointer)?;
        if arr.len() != len {
            return Err(schema(pointer, format!("expected {len} entries, got {}", arr.len())));
        }
        (0..len).map(|i| self.float(&format!("{pointer}/{i}"))).collect()
    }

    fn opt_float_vec(&self, pointer: &str, len: usize) -> Result<Option<Vec<f64>>, InputError> {
        self.get(pointer).map(|_| self.float_vec(pointer, len)).transpose()
    }

    fn array(&self, pointer: &str) -> Result<&'a Vec<Value>, InputError> {
        self.req(pointer)?
            .as_array()
            .ok_or_else(|| schema(pointer, "expected an array"))
    }

    fn rational(&self, pointer: &str) -> Result<Rational, InputError> {
        let v = self.req(pointer)?;
        let r = match v {
            Value::Number(n) => n.as_i64().and_then(|i| parse_rational(&i.to_string())),
            Value::String(s) => parse_rational(s),
            _ => None,
        };
        r.ok_or_else(|| schema(pointer, "expected an integer or a \"p/q\" string"))
    }

    fn opt_rational(&self, pointer: &str) -> Result<Option<Rational>, InputError> {
        self.get(pointer).map(|_| self.rational(pointer)).transpose()
    }

    fn sym_matrix(&self, pointer: &str, dim: usize) -> Result<ConstSymMatrix, InputError> {
        let rows = self.array(pointer)?;
        if rows.len() != dim {
            return Err(schema(pointer, format!("expected {dim} rows, got {}", rows.len())));
        }
        if dim == 0 {
            return Ok(ConstSymMatrix::identity(0));
        }
        let mut entries = Vec::with_capacity(dim);
        for i in 0..dim {
            let rp = format!("{pointer}/{i}");
            let row = self.array(&rp)?;
            if row.len() != dim {
                return Err(schema(&rp, format!("expected {dim} entries, got {}", row.len())));
            }
            entries.push(
                (0..dim)
                    .map(|j| self.rational(&format!("{rp}/{j}")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        ConstSymMatrix::new(entries).map_err(|_| InputError::Singular {
            pointer: pointer.to_string(),
        })
    }

    fn poly(&self, pointer: &str, n: usize) -> Result<Poly, InputError> {
        let text = self.string(pointer)?;
        parse_polynomial(&text, n).map_err(|e| InputError::Parse {
            pointer: pointer.to_string(),
            column: e.position + 1,
            message: e.message,
        })
    }

    fn poly_list(&self, pointer: &str, n: usize) -> Result<Vec<Poly>, InputError> {
        let arr = self.array(pointer)?;
        (0..arr.len()).map(|i| self.poly(&format!("{pointer}/{i}"), n)).collect()
    }

    fn poly_matrix(&self, pointer: &str, n: usize) -> Result<PolyMatrix, InputError> {
        let rows = self.array(pointer)?;
        if rows.len() != n {
            return Err(schema(pointer, format!("expected {n} rows, got {}", rows.len())));
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let rp = format!("{pointer}/{i}");
            let row = self.poly_list(&rp, n)?;
            if row.len() != n {
                return Err(schema(&rp, format!("expected {n} entries, got {}", row.len())));
            }
            out.push(row);
        }
        PolyMatrix::from_rows(out).map_err(|e| schema(pointer, e.to_string()))
    }

    fn dim(&self, prefix: &str) -> Result<usize, InputError> {
        let p = format!("{prefix}/n");
        let n = self.usize(&p)?;
        if n == 0 {
            return Err(schema(&p, "dimension must be positive"));
        }
        Ok(n)
    }

    fn potential(&self, prefix: &str) -> Result<Potential, InputError> {
        let n = self.dim(prefix)?;
        let eta = self.sym_matrix(&format!("{prefix}/eta"), n)?;
        let phi = self.poly(&format!("{prefix}/phi"), n)?;
        Potential::new(eta, phi).map_err(|e| InputError::Invalid(e.to_string()))
    }

    fn psi_system(&self, prefix: &str) -> Result<PsiSystem, InputError> {
        let n = self.dim(prefix)?;
        let eta = self.sym_matrix(&format!("{prefix}/eta"), n)?;
        let psi = self.poly_list(&format!("{prefix}/psi"), n)?;
        let mu = self.sym_matrix(&format!("{prefix}/mu"), psi.len())?;
        PsiSystem::new(eta, mu, psi).map_err(|e| InputError::Invalid(e.to_string()))
    }

    fn hamop(&self) -> Result<FlatHamOp, InputError> {
        let n = self.dim("")?;
        let g = self.sym_matrix("/g", n)?;
        let count = self.array("/affinors")?.len();
        let affinors = (0..count)
            .map(|k| self.poly_matrix(&format!("/affinors/{k}"), n))
            .collect::<Result<Vec<_>, _>>()?;
        let mu = self.sym_matrix("/mu", count)?;
        FlatHamOp::new(g, mu, affinors).map_err(|e| InputError::Invalid(e.to_string()))
    }

    fn embedding(&self) -> Result<EmbeddingInput, InputError> {
        let potential = self.potential("")?;
        let n = potential.n();
        let grid = match self.get("/grid") {
            Some(_) => Some(GridInput {
                origin: self.float_vec("/grid/origin", n)?,
                spacing: self.float("/grid/spacing")?,
                count: self.usize("/grid/count")?,
            }),
            None => None,
        };
        let lp = match self.get("/loop") {
            Some(_) => {
                let plane = self.array("/loop/plane")?;
                if plane.len() != 2 {
                    return Err(schema("/loop/plane", "expected two coordinate indices"));
                }
                let a = one_based(self.usize("/loop/plane/0")?, n, "/loop/plane/0")?;
                let b = one_based(self.usize("/loop/plane/1")?, n, "/loop/plane/1")?;
                Some(LoopInput {
                    corner: self.float_vec("/loop/corner", n)?,
                    plane: (a, b),
                    side: self.float("/loop/side")?,
                })
            }
            None => None,
        };
        Ok(EmbeddingInput {
            potential,
            c: self.opt_rational("/c")?,
            base: self.opt_float_vec("/base", n)?,
            step: self.opt_float("/step")?,
            delta: self.opt_float("/delta")?,
            tolerance: self.opt_float("/tolerance")?,
            grid,
            lp,
        })
    }

    fn simulation(&self) -> Result<SimulationInput, InputError> {
        let (n, source) = match (self.get("/system"), self.get("/flow")) {
            (Some(_), None) => {
                let s = self.psi_system("/system")?;
                (s.n(), FlowSource::System(s))
            }
            (None, Some(_)) => {
                let n = self.dim("")?;
                (n, FlowSource::Matrix(self.poly_matrix("/flow", n)?))
            }
            _ => return Err(schema("", "exactly one of `system` and `flow` is required")),
        };
        let densities = match self.get("/densities") {
            Some(_) => self.poly_list("/densities", n)?,
            None => Vec::new(),
        };
        Ok(SimulationInput {
            n,
            source,
            densities,
            m: self.opt_usize("/grid/m")?,
            length: self.opt_float("/grid/length")?,
            amplitude: self.opt_float("/initial/amplitude")?,
            phases: self.opt_float_vec("/initial/phases", n)?,
            background: self.opt_float_vec("/initial/background", n)?,
            dt: self.opt_float("/dt")?,
            t_end: self.opt_float("/t_end")?,
        })
    }
}

fn one_based(k: usize, n: usize, pointer: &str) -> Result<usize, InputError> {
    if k == 0 || k > n {
        return Err(schema(pointer, format!("coordinate index must be in 1..={n}")));
    }
    Ok(k - 1)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
