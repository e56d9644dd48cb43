//! Finite-difference simulation of `u_t = A(u) u_x` on a periodic grid:
//! fourth-order central differences in space, classical RK4 in time.

use thiserror::Error;

use crate::algebra::{FloatPoly, Poly};
use crate::hamop::HydroFlow;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("state has {got} components per node, flow expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("state has {got} nodes, grid has {expected}")]
    NodeCount { expected: usize, got: usize },
    #[error("time step and end time must be positive and finite")]
    BadTime,
    #[error("solution exceeded the blow-up threshold at t = {time}")]
    BlowUp { time: f64 },
}

/// Uniform periodic grid of `m` nodes on `[0, length)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    m: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(m: usize, length: f64) -> Result<Self, SimError> {
        if m < 16 {
            return Err(SimError::GridTooSmall(m));
        }
        Ok(Grid1D { m, length })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.m as f64
    }

    pub fn x(&self, node: usize) -> f64 {
        node as f64 * self.dx()
    }
}

/// Field values `values[node][component]` at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub values: Vec<Vec<f64>>,
    pub time: f64,
}

impl FieldState {
    /// `u^i(x) = amplitude · sin(2πx/length + phase_i)`, plus an optional
    /// constant background per component.
    pub fn sine(grid: &Grid1D, amplitude: f64, phases: &[f64], background: &[f64]) -> FieldState {
        let k = 2.0 * std::f64::consts::PI / grid.length;
        let values = (0..grid.m)
            .map(|node| {
                phases
                    .iter()
                    .enumerate()
                    .map(|(i, ph)| background.get(i).copied().unwrap_or(0.0) + amplitude * (k * grid.x(node) + ph).sin())
                    .collect()
            })
            .collect();
        FieldState { values, time: 0.0 }
    }

    pub fn constant(grid: &Grid1D, value: &[f64]) -> FieldState {
        FieldState {
            values: vec![value.to_vec(); grid.m],
            time: 0.0,
        }
    }

    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record a state every this many steps (the final state is always kept).
    pub record_every: usize,
    /// Halt when any `|u|` exceeds this value.
    pub blowup_threshold: f64,
    /// Strength in `[0, 1]` of a sixth-order low-pass filter applied after
    /// each step. Off by default; it destroys exact conservation.
    pub smoothing: Option<f64>,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        SimConfig {
            dt,
            t_end,
            record_every: 1,
            blowup_threshold: 1e6,
            smoothing: None,
        }
    }
}

/// Flow matrix compiled for fast evaluation.
struct CompiledFlow {
    n: usize,
    a: Vec<FloatPoly>,
    zero: Vec<bool>,
}

impl CompiledFlow {
    fn new(flow: &HydroFlow) -> Self {
        let a: Vec<FloatPoly> = flow.a.entries().iter().map(Poly::to_float).collect();
        let zero = a.iter().map(FloatPoly::is_zero).collect();
        CompiledFlow { n: flow.n(), a, zero }
    }

    fn rhs(&self, grid: &Grid1D, u: &[Vec<f64>], out: &mut [Vec<f64>]) {
        let (m, n) = (grid.m, self.n);
        let inv = 1.0 / (12.0 * grid.dx());
        for node in 0..m {
            let at = |o: isize| &u[(node as isize + o).rem_euclid(m as isize) as usize];
            let (p2, p1, m1, m2) = (at(2), at(1), at(-1), at(-2));
            let ux: Vec<f64> = (0..n)
                .map(|j| (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) * inv)
                .collect();
            for i in 0..n {
                let mut acc = 0.0;
                for (j, uxj) in ux.iter().enumerate() {
                    let k = i * n + j;
                    if !self.zero[k] {
                        acc += self.a[k].eval(&u[node]) * uxj;
                    }
                }
                out[node][i] = acc;
            }
        }
    }
}

fn smooth(u: &mut [Vec<f64>], strength: f64) {
    let m = u.len();
    let old = u.to_vec();
    let w = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
    for node in 0..m {
        for i in 0..old[node].len() {
            let mut d6 = 0.0;
            for (o, wo) in w.iter().enumerate() {
                d6 += wo * old[(node + m + o - 3) % m][i];
            }
            u[node][i] += strength / 64.0 * d6;
        }
    }
}

/// Step size suggested for stability: `dx / (10 · max_x ‖A(u)‖_∞)`.
pub fn cfl_advice(flow: &HydroFlow, state: &FieldState, grid: &Grid1D) -> f64 {
    let c = CompiledFlow::new(flow);
    let mut worst = 0.0f64;
    for u in &state.values {
        for i in 0..c.n {
            let row: f64 = (0..c.n).map(|j| c.a[i * c.n + j].eval(u).abs()).sum();
            worst = worst.max(row);
        }
    }
    if worst == 0.0 {
        f64::INFINITY
    } else {
        grid.dx() / (10.0 * worst)
    }
}

/// Evolves `init` to `cfg.t_end`. The step is shrunk slightly so that a whole
/// number of steps lands on `t_end`.
pub fn simulate_flow(flow: &HydroFlow, init: &FieldState, grid: &Grid1D, cfg: &SimConfig) -> Result<Vec<FieldState>, SimError> {
    let n = flow.n();
    if init.values.len() != grid.m {
        return Err(SimError::NodeCount {
            expected: grid.m,
            got: init.values.len(),
        });
    }
    if let Some(v) = init.values.iter().find(|v| v.len() != n) {
        return Err(SimError::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    if !(cfg.dt > 0.0 && cfg.dt.is_finite() && cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(SimError::BadTime);
    }
    let compiled = CompiledFlow::new(flow);
    let steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let dt = if steps == 0 { 0.0 } else { cfg.t_end / steps as f64 };
    let m = grid.m;
    let mut u = init.values.clone();
    let zeros = vec![vec![0.0; n]; m];
    let (mut k1, mut k2, mut k3, mut k4) = (zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone());
    let mut tmp = zeros;
    let mut out = vec![FieldState {
        values: u.clone(),
        time: init.time,
    }];
    let every = cfg.record_every.max(1);
    for step in 1..=steps {
        compiled.rhs(grid, &u, &mut k1);
        axpy(&mut tmp, &u, 0.5 * dt, &k1);
        compiled.rhs(grid, &tmp, &mut k2);
        axpy(&mut tmp, &u, 0.5 * dt, &k2);
        compiled.rhs(grid, &tmp, &mut k3);
        axpy(&mut tmp, &u, dt, &k3);
        compiled.rhs(grid, &tmp, &mut k4);
        for node in 0..m {
            for i in 0..n {
                u[node][i] += dt / 6.0 * (k1[node][i] + 2.0 * k2[node][i] + 2.0 * k3[node][i] + k4[node][i]);
            }
        }
        if let Some(s) = cfg.smoothing {
            smooth(&mut u, s);
        }
        let time = init.time + step as f64 * dt;
        if u.iter().flatten().any(|v| !(v.abs() <= cfg.blowup_threshold)) {
            return Err(SimError::BlowUp { time });
        }
        if step % every == 0 || step == steps {
            out.push(FieldState {
                values: u.clone(),
                time,
            });
        }
    }
    Ok(out)
}

fn axpy(out: &mut [Vec<f64>], y: &[Vec<f64>], a: f64, x: &[Vec<f64>]) {
    for ((o, yy), xx) in out.iter_mut().zip(y).zip(x) {
        for ((oi, yi), xi) in o.iter_mut().zip(yy).zip(xx) {
            *oi = yi + a * xi;
        }
    }
}

/// `∫ density(u(x)) dx` by the periodic rectangle rule.
pub fn functional_value(density: &Poly, state: &FieldState, grid: &Grid1D) -> f64 {
    let f = density.to_float();
    state.values.iter().map(|u| f.eval(u)).sum::<f64>() * grid.dx()
}

/// Per density, `max_t |H(t) − H(0)| / max(1, |H(0)|)`.
pub fn conservation_report(trajectory: &[FieldState], densities: &[Poly], grid: &Grid1D) -> Vec<f64> {
    densities
        .iter()
        .map(|d| {
            let Some(first) = trajectory.first() else {
                return 0.0;
            };
            let h0 = functional_value(d, first, grid);
            let scale = h0.abs().max(1.0);
            trajectory
                .iter()
                .map(|s| (functional_value(d, s, grid) - h0).abs() / scale)
                .fold(0.0, f64::max)
        })
        .collect()
}
