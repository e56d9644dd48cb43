//! Numeric realization of a Frobenius potential as a submanifold of a
//! `2N`-dimensional pseudo-Euclidean space.
//!
//! The frame `(r, n, R = ∂r/∂u, Nn = ∂n/∂u)` obeys
//!
//! ```text
//! ∂_j R_i  =  c η^{kl} Φ_ijk Nn_l
//! ∂_j Nn_i = −η^{kl} Φ_ijk R_l
//! ```
//!
//! which is integrated with classical RK4 along piecewise-linear paths.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{ConstSymMatrix, FloatPoly, Rational, Signature};
use crate::frobenius::{structure_constants, Potential};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizationError {
    #[error("deformation parameter c must be nonzero")]
    ZeroC,
    #[error("expected a point with {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("step must be positive and finite")]
    BadStep,
    #[error("non-finite state on segment {segment} of the path")]
    NonFinite { segment: usize },
    #[error("loop is not closed: endpoints differ by {gap}")]
    OpenLoop { gap: f64 },
}

/// Frame data at one point, flattened: `r`, `n`, then the columns of `R` and
/// of `Nn`, each of length `2N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub u: Vec<f64>,
    pub state: Vec<f64>,
}

impl Frame {
    fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn r(&self) -> &[f64] {
        let m = 2 * self.dim();
        &self.state[..m]
    }

    pub fn n(&self) -> &[f64] {
        let m = 2 * self.dim();
        &self.state[m..2 * m]
    }

    /// Column `∂r/∂u^i`.
    pub fn r_col(&self, i: usize) -> &[f64] {
        let m = 2 * self.dim();
        &self.state[2 * m + i * m..2 * m + (i + 1) * m]
    }

    /// Column `∂n/∂u^i`.
    pub fn n_col(&self, i: usize) -> &[f64] {
        let (d, m) = (self.dim(), 2 * self.dim());
        &self.state[2 * m + (d + i) * m..2 * m + (d + i + 1) * m]
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddingProblem {
    potential: Potential,
    c: Rational,
    c_f64: f64,
    ambient: ConstSymMatrix,
    ambient_f64: Vec<Vec<f64>>,
    /// `c^l_ij` in floats, indexed `[i][j][l]`.
    coeffs: Vec<Vec<Vec<FloatPoly>>>,
    base: Frame,
}

/// `r = n = 0`, `R = [I; 0]`, `Nn = [0; I]` at `u0`, with ambient metric
/// `blockdiag(η, η/c)` so that all Gram conditions hold exactly there.
pub fn default_initial_frame(p: &Potential, c: &Rational, u0: &[f64]) -> Result<EmbeddingProblem, RealizationError> {
    if c.is_zero() {
        return Err(RealizationError::ZeroC);
    }
    let n = p.n();
    if u0.len() != n {
        return Err(RealizationError::Dimension {
            expected: n,
            got: u0.len(),
        });
    }
    let normal = p.eta().scaled(&c.recip()).expect("c is nonzero");
    let ambient = p.eta().direct_sum(&normal);
    let sc = structure_constants(p);
    let coeffs = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| sc.get(&[l, i, j]).to_float()).collect())
                .collect()
        })
        .collect();
    let m = 2 * n;
    let mut state = vec![0.0; 2 * m + 2 * n * m];
    for i in 0..n {
        state[2 * m + i * m + i] = 1.0;
        state[2 * m + (n + i) * m + n + i] = 1.0;
    }
    Ok(EmbeddingProblem {
        potential: p.clone(),
        c: c.clone(),
        c_f64: num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN),
        ambient_f64: ambient.to_f64(),
        ambient,
        coeffs,
        base: Frame {
            u: u0.to_vec(),
            state,
        },
    })
}

impl EmbeddingProblem {
    pub fn n(&self) -> usize {
        self.potential.n()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn ambient(&self) -> &ConstSymMatrix {
        &self.ambient
    }

    pub fn ambient_signature(&self) -> Signature {
        self.ambient.signature()
    }

    pub fn base(&self) -> &Frame {
        &self.base
    }

    fn rhs(&self, u: &[f64], du: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.n();
        let m = 2 * n;
        let r_off = 2 * m;
        let n_off = 2 * m + n * m;
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            for a in 0..m {
                out[a] += du[i] * y[r_off + i * m + a];
                out[m + a] += du[i] * y[n_off + i * m + a];
            }
        }
        // b[i][l] = Σ_j du^j c^l_ij(u)
        for i in 0..n {
            for l in 0..n {
                let mut b = 0.0;
                for (j, dj) in du.iter().enumerate() {
                    let p = &self.coeffs[i][j][l];
                    if *dj != 0.0 && !p.is_zero() {
                        b += dj * p.eval(u);
                    }
                }
                if b == 0.0 {
                    continue;
                }
                for a in 0..m {
                    out[r_off + i * m + a] += self.c_f64 * b * y[n_off + l * m + a];
                    out[n_off + i * m + a] -= b * y[r_off + l * m + a];
                }
            }
        }
    }

    /// RK4 along the straight segment from `from.u` to `to`, with at least
    /// `ceil(length / step)` steps.
    pub fn integrate_segment(&self, from: &Frame, to: &[f64], step: f64) -> Frame {
        let du: Vec<f64> = to.iter().zip(&from.u).map(|(b, a)| b - a).collect();
        let length = du.iter().map(|x| x * x).sum::<f64>().sqrt();
        let steps = ((length / step).ceil() as usize).max(1);
        let h = 1.0 / steps as f64;
        let dim = from.state.len();
        let mut y = from.state.clone();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
        let mut tmp = vec![0.0; dim];
        let point = |t: f64| -> Vec<f64> { from.u.iter().zip(&du).map(|(a, d)| a + t * d).collect() };
        for s in 0..steps {
            let t = s as f64 * h;
            self.rhs(&point(t), &du, &y, &mut k1);
            for q in 0..dim {
                tmp[q] = y[q] + 0.5 * h * k1[q];
            }
            let mid = point(t + 0.5 * h);
            self.rhs(&mid, &du, &tmp, &mut k2);
            for q in 0..dim {
                tmp[q] = y[q] + 0.5 * h * k2[q];
            }
            self.rhs(&mid, &du, &tmp, &mut k3);
            for q in 0..dim {
                tmp[q] = y[q] + h * k3[q];
            }
            self.rhs(&point(t + h), &du, &tmp, &mut k4);
            for q in 0..dim {
                y[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
            }
        }
        Frame {
            u: to.to_vec(),
            state: y,
        }
    }

    /// Integrates through the vertices of `path`, starting from `start`
    /// (which must sit at `path[0]`). Returns the frame at every vertex.
    pub fn integrate_path_from(&self, start: &Frame, path: &[Vec<f64>], step: f64) -> Result<Vec<Frame>, RealizationError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(RealizationError::BadStep);
        }
        let n = self.n();
        if let Some(p) = path.iter().find(|p| p.len() != n) {
            return Err(RealizationError::Dimension {
                expected: n,
                got: p.len(),
            });
        }
        let mut frames = vec![start.clone()];
        for (segment, to) in path.iter().enumerate().skip(1) {
            let next = self.integrate_segment(frames.last().expect("nonempty"), to, step);
            if next.state.iter().any(|v| !v.is_finite()) {
                return Err(RealizationError::NonFinite { segment: segment - 1 });
            }
            frames.push(next);
        }
        Ok(frames)
    }

    /// Integrates from the base point through `path` (whose first vertex is
    /// prepended by the base point when it differs).
    pub fn integrate_along_path(&self, path: &[Vec<f64>], step: f64) -> Result<Vec<Frame>, RealizationError> {
        let mut full = vec![self.base.u.clone()];
        full.extend(path.iter().filter(|p| **p != self.base.u).cloned());
        self.integrate_path_from(&self.base, &full, step)
    }

    fn g(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.ambient_f64.iter().enumerate() {
            for (j, gij) in row.iter().enumerate() {
                if *gij != 0.0 {
                    s += a[i] * gij * b[j];
                }
            }
        }
        s
    }

    /// Largest deviation of `(RᵀGR − η, RᵀG·Nn, NnᵀG·Nn − η/c)` at a frame.
    pub fn gram_residuals(&self, f: &Frame) -> [f64; 3] {
        let n = self.n();
        let eta = self.potential.eta().to_f64();
        let mut out = [0.0f64; 3];
        for i in 0..n {
            for j in 0..n {
                let a = (self.g(f.r_col(i), f.r_col(j)) - eta[i][j]).abs();
                let b = self.g(f.r_col(i), f.n_col(j)).abs();
                let c = (self.g(f.n_col(i), f.n_col(j)) - eta[i][j] / self.c_f64).abs();
                out[0] = out[0].max(a);
                out[1] = out[1].max(b);
                out[2] = out[2].max(c);
            }
        }
        out
    }

    /// Max over `(i, j, β)` of `|G(∂_j R_i, Nn_β) − Φ_βij(u)|`, with `∂_j R_i`
    /// from central differences over `±delta` along `u^j`.
    pub fn second_form_error(&self, f: &Frame, delta: f64, step: f64) -> f64 {
        let n = self.n();
        let third: Vec<FloatPoly> = self
            .potential
            .third_derivatives()
            .entries()
            .iter()
            .map(|p| p.to_float())
            .collect();
        let mut worst = 0.0f64;
        for j in 0..n {
            let shifted = |sign: f64| {
                let mut u = f.u.clone();
                u[j] += sign * delta;
                self.integrate_segment(f, &u, step.min(delta))
            };
            let (plus, minus) = (shifted(1.0), shifted(-1.0));
            for i in 0..n {
                let d2r: Vec<f64> = plus
                    .r_col(i)
                    .iter()
                    .zip(minus.r_col(i))
                    .map(|(a, b)| (a - b) / (2.0 * delta))
                    .collect();
                for beta in 0..n {
                    let exact = third[(beta * n + i) * n + j].eval(&f.u);
                    worst = worst.max((self.g(&d2r, f.n_col(beta)) - exact).abs());
                }
            }
        }
        worst
    }

    /// Frames on the grid `origin + spacing·k`, `k ∈ {0..count}^N`, each
    /// reached from the base point along coordinate axes in order.
    pub fn sample_grid(&self, grid: &GridSpec, step: f64) -> Result<EmbeddingSample, RealizationError> {
        let n = self.n();
        if grid.origin.len() != n {
            return Err(RealizationError::Dimension {
                expected: n,
                got: grid.origin.len(),
            });
        }
        let start = self.integrate_along_path(std::slice::from_ref(&grid.origin), step)?.pop().expect("nonempty");
        let mut layer = vec![start];
        for axis in 0..n {
            let mut next = Vec::with_capacity(layer.len() * grid.count);
            for f in &layer {
                let mut path = vec![f.u.clone()];
                for k in 1..grid.count {
                    let mut u = f.u.clone();
                    u[axis] += grid.spacing * k as f64;
                    path.push(u);
                }
                next.extend(self.integrate_path_from(f, &path, step)?);
            }
            layer = next;
        }
        // `layer` is ordered with the last axis varying slowest; reorder so
        // that the first axis varies slowest.
        let total = layer.len();
        let mut frames = Vec::with_capacity(total);
        for flat in 0..total {
            let mut idx = vec![0; n];
            let mut rest = flat;
            for a in (0..n).rev() {
                idx[a] = rest % grid.count;
                rest /= grid.count;
            }
            let mut pos = 0;
            for a in (0..n).rev() {
                pos = pos * grid.count + idx[a];
            }
            frames.push(layer[pos].clone());
        }
        Ok(EmbeddingSample {
            grid: grid.clone(),
            step,
            frames,
        })
    }
}

/// Rectangular grid `origin + spacing·k` with `count` nodes per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct EmbeddingSample {
    pub grid: GridSpec,
    pub step: f64,
    pub frames: Vec<Frame>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormsReport {
    pub tolerance: f64,
    /// Worst residual of each check `(a)`..`(d)` over the grid.
    pub worst: [f64; 4],
    /// Grid nodes where any check exceeds the tolerance.
    pub violations: Vec<usize>,
}

impl FormsReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Gram checks `(a)`–`(c)` and the second-form check `(d)` at every node.
/// `delta` is the finite-difference offset used for `(d)`.
pub fn verify_fundamental_forms(e: &EmbeddingProblem, sample: &EmbeddingSample, tol: f64, delta: f64) -> FormsReport {
    let mut worst = [0.0f64; 4];
    let mut violations = Vec::new();
    for (k, f) in sample.frames.iter().enumerate() {
        let [a, b, c] = e.gram_residuals(f);
        let d = e.second_form_error(f, delta, sample.step);
        let vals = [a, b, c, d];
        for q in 0..4 {
            worst[q] = worst[q].max(vals[q]);
        }
        if vals.iter().any(|v| !(*v <= tol)) {
            violations.push(k);
        }
    }
    FormsReport {
        tolerance: tol,
        worst,
        violations,
    }
}

/// Max-norm of the state change after integrating around a closed loop.
pub fn loop_closure_test(e: &EmbeddingProblem, lp: &[Vec<f64>], step: f64) -> Result<f64, RealizationError> {
    let (first, last) = (lp.first(), lp.last());
    if let (Some(a), Some(b)) = (first, last) {
        let gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if gap > 1e-12 {
            return Err(RealizationError::OpenLoop { gap });
        }
    }
    let start = e.integrate_along_path(&lp[..1], step)?.pop().expect("nonempty");
    let end = e.integrate_path_from(&start, lp, step)?.pop().expect("nonempty");
    Ok(start
        .state
        .iter()
        .zip(&end.state)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Axis-aligned square loop of side `side` in the `(a, b)` coordinate plane,
/// starting and ending at `corner`.
pub fn square_loop(corner: &[f64], a: usize, b: usize, side: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![corner.to_vec()];
    for (da, db) in [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)] {
        let mut p = corner.to_vec();
        p[a] += da * side;
        p[b] += db * side;
        pts.push(p);
    }
    pts
}
