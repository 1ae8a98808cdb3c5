use super::{Fragmentation, ModelSpec};
use crate::error::{domain, Error, Result};
use crate::profiles::SizeGrid;

/// Upwind finite-volume discretization of the stationary operator
///
/// `n_i -> -v_i (tau n_i)' - v_i tau beta n_i + 2 int_x^inf tau beta b(y, x) sum_l kappa_li v_l n_l(y) dy`
///
/// on a uniform grid. Vectors are stored type-major: entry `i * nodes + j` is
/// type `i` at node `x_j`.
///
/// When `tau(0) > 0` the boundary condition `tau(0) n(0) = 0` pins node 0 to
/// zero: its row and column are dropped, and the uniform-fragmentation
/// daughters that would land on it go to node 1 so that divisions conserve
/// numbers exactly. When `tau(0) = 0` node 0 is an ordinary cell with no
/// inflow.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: SizeGrid,
    dx: f64,
    m: usize,
    nk: usize,
    traits: Vec<f64>,
    /// `mix[l * m + i] = kappa_li v_l`.
    mix: Vec<f64>,
    /// Outflow rate `a_ij = v_i (tau_j / dx + tau_j beta_j)`.
    out_rate: Vec<f64>,
    /// Transport flux coefficient `b_ij = v_i tau_j / dx` from node j to j+1.
    flux: Vec<f64>,
    /// `tau beta` at the nodes.
    tau_beta: Vec<f64>,
    /// `tau beta / x` at the nodes, zero at `x = 0`.
    tau_beta_over_x: Vec<f64>,
    omega: Vec<f64>,
    frag: Fragmentation,
    dirichlet: bool,
    shift: f64,
    rate_hint: f64,
}

impl DiscreteOperator {
    pub fn discretize(model: &ModelSpec, grid: &SizeGrid) -> Result<Self> {
        let dx = grid
            .step()
            .ok_or_else(|| domain("grid", "the discrete operator needs a uniform grid"))?;
        let nk = grid.len();
        if model.frag == Fragmentation::Mitosis && (nk - 1) % 2 != 0 {
            return Err(domain(
                "grid",
                format!("mitosis needs an even number of cells, found {}", nk - 1),
            ));
        }
        let m = model.traits.len();
        let traits = model.traits.values().to_vec();
        let x = grid.nodes();
        let tau: Vec<f64> = x.iter().map(|&x| model.growth.eval(x)).collect();
        let tau_beta: Vec<f64> = x
            .iter()
            .zip(&tau)
            .map(|(&x, t)| t * model.division.eval(x))
            .collect();
        let tau_beta_over_x: Vec<f64> = x
            .iter()
            .zip(&tau_beta)
            .map(|(&x, tb)| if x > 0.0 { tb / x } else { 0.0 })
            .collect();
        let mut mix = vec![0.0; m * m];
        for l in 0..m {
            for i in 0..m {
                mix[l * m + i] = model.kernel.get(l, i) * traits[l];
            }
        }
        let mut out_rate = vec![0.0; m * nk];
        let mut flux = vec![0.0; m * nk];
        for i in 0..m {
            for j in 0..nk {
                flux[i * nk + j] = traits[i] * tau[j] / dx;
                out_rate[i * nk + j] = flux[i * nk + j] + traits[i] * tau_beta[j];
            }
        }
        let dirichlet = tau[0] > 0.0;
        let j0 = dirichlet as usize;
        let shift = (0..m)
            .flat_map(|i| (j0..nk).map(move |j| (i, j)))
            .map(|(i, j)| out_rate[i * nk + j])
            .fold(0.0, f64::max);
        // Growth rate of a homogeneous population with the geometric-mean trait
        // and unit-size rates; only a starting point for root brackets.
        let geo = (traits.iter().map(|v| v.ln()).sum::<f64>() / m as f64).exp();
        let rate_hint = geo * model.growth.eval(1.0) * model.division.eval(1.0);
        if !shift.is_finite() {
            return Err(Error::Inconsistency("non-finite rates on the grid".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            dx,
            m,
            nk,
            traits,
            mix,
            out_rate,
            flux,
            tau_beta,
            tau_beta_over_x,
            omega: grid.weights(),
            frag: model.frag,
            dirichlet,
            shift,
            rate_hint,
        })
    }

    pub fn grid(&self) -> &SizeGrid {
        &self.grid
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn types(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> usize {
        self.nk
    }

    /// Length of a state vector, `M * (K + 1)`.
    pub fn len(&self) -> usize {
        self.m * self.nk
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn traits(&self) -> &[f64] {
        &self.traits
    }

    /// Trapezoid weights of the grid.
    pub fn weights(&self) -> &[f64] {
        &self.omega
    }

    /// Whether node 0 is pinned to zero.
    pub fn pins_origin(&self) -> bool {
        self.dirichlet
    }

    /// First active node.
    pub fn first_node(&self) -> usize {
        self.dirichlet as usize
    }

    /// `c = max (v tau beta + v tau / dx)`: `L + c Id` maps nonnegative
    /// vectors to nonnegative vectors.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Rough magnitude of the Malthus parameter.
    pub fn rate_hint(&self) -> f64 {
        self.rate_hint
    }

    /// Largest transport rate `v tau / dx` and largest division rate
    /// `v tau beta` over active nodes.
    pub fn rate_bounds(&self) -> (f64, f64) {
        let j0 = self.first_node();
        let mut transport: f64 = 0.0;
        let mut division: f64 = 0.0;
        for i in 0..self.m {
            for j in j0..self.nk {
                let f = self.flux[i * self.nk + j];
                transport = transport.max(f);
                division = division.max(self.out_rate[i * self.nk + j] - f);
            }
        }
        (transport, division)
    }

    /// `g = Gamma n`: daughters born per unit time and size.
    pub fn gain(&self, n: &[f64], g: &mut [f64]) {
        let (m, nk) = (self.m, self.nk);
        let mut s = vec![0.0; nk];
        for i in 0..m {
            s.iter_mut().for_each(|x| *x = 0.0);
            for l in 0..m {
                let w = self.mix[l * m + i];
                if w != 0.0 {
                    let nl = &n[l * nk..(l + 1) * nk];
                    for (sk, nv) in s.iter_mut().zip(nl) {
                        *sk += w * nv;
                    }
                }
            }
            if self.dirichlet {
                s[0] = 0.0;
            }
            self.fragment(&s, &mut g[i * nk..(i + 1) * nk]);
        }
    }

    /// Distribution of daughters of a mother source `s` over the nodes.
    fn fragment(&self, s: &[f64], g: &mut [f64]) {
        let nk = self.nk;
        match self.frag {
            Fragmentation::Mitosis => {
                for j in 0..nk {
                    g[j] = if 2 * j < nk {
                        4.0 * self.tau_beta[2 * j] * s[2 * j]
                    } else {
                        0.0
                    };
                }
            }
            Fragmentation::Uniform => {
                // Trapezoid in the mother size: weight omega_k, halved at y = x.
                let mut tail = 0.0;
                for j in (0..nk).rev() {
                    let here = self.omega[j] * self.tau_beta_over_x[j] * s[j];
                    g[j] = 2.0 * (tail + 0.5 * here);
                    tail += here;
                }
                if self.dirichlet {
                    g[1] += self.omega[0] / self.omega[1] * g[0];
                }
            }
        }
        if self.dirichlet {
            g[0] = 0.0;
        }
    }

    /// `Gamma^T psi`.
    pub fn gain_transpose(&self, psi: &[f64], out: &mut [f64]) {
        let (m, nk) = (self.m, self.nk);
        let mut r = vec![0.0; m * nk];
        for i in 0..m {
            self.fragment_transpose(&psi[i * nk..(i + 1) * nk], &mut r[i * nk..(i + 1) * nk]);
        }
        for l in 0..m {
            let o = &mut out[l * nk..(l + 1) * nk];
            o.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..m {
                let w = self.mix[l * m + i];
                if w != 0.0 {
                    for (ok, rv) in o.iter_mut().zip(&r[i * nk..(i + 1) * nk]) {
                        *ok += w * rv;
                    }
                }
            }
            if self.dirichlet {
                o[0] = 0.0;
            }
        }
    }

    fn fragment_transpose(&self, psi: &[f64], r: &mut [f64]) {
        let nk = self.nk;
        r.iter_mut().for_each(|x| *x = 0.0);
        match self.frag {
            Fragmentation::Mitosis => {
                for j in self.first_node()..nk {
                    if 2 * j < nk {
                        r[2 * j] = 4.0 * self.tau_beta[2 * j] * psi[j];
                    }
                }
            }
            Fragmentation::Uniform => {
                let folded0 = if self.dirichlet {
                    self.omega[0] / self.omega[1] * psi[1]
                } else {
                    psi[0]
                };
                let at = |j: usize| if j == 0 { folded0 } else { psi[j] };
                let mut below = 0.0;
                for k in 0..nk {
                    let q = below + 0.5 * at(k);
                    r[k] = 2.0 * self.omega[k] * self.tau_beta_over_x[k] * q;
                    below += at(k);
                }
            }
        }
    }

    /// `out = L n`.
    pub fn apply(&self, n: &[f64], out: &mut [f64]) {
        self.gain(n, out);
        let nk = self.nk;
        let j0 = self.first_node();
        for i in 0..self.m {
            let base = i * nk;
            for j in j0..nk {
                let mut t = -self.out_rate[base + j] * n[base + j];
                if j > j0 {
                    t += self.flux[base + j - 1] * n[base + j - 1];
                }
                out[base + j] += t;
            }
        }
    }

    /// `out = L^T psi`.
    pub fn apply_transpose(&self, psi: &[f64], out: &mut [f64]) {
        self.gain_transpose(psi, out);
        let nk = self.nk;
        let j0 = self.first_node();
        for i in 0..self.m {
            let base = i * nk;
            for j in j0..nk {
                let mut t = -self.out_rate[base + j] * psi[base + j];
                if j + 1 < nk {
                    t += self.flux[base + j] * psi[base + j + 1];
                }
                out[base + j] += t;
            }
        }
    }

    /// `out = (lambda + transport + loss)^{-1} s`, a forward sweep per type.
    pub fn solve_transport(&self, lambda: f64, s: &[f64], out: &mut [f64]) {
        let nk = self.nk;
        let j0 = self.first_node();
        for i in 0..self.m {
            let base = i * nk;
            let mut prev = 0.0;
            for j in j0..nk {
                let inflow = if j > j0 { self.flux[base + j - 1] * prev } else { 0.0 };
                prev = (s[base + j] + inflow) / (lambda + self.out_rate[base + j]);
                out[base + j] = prev;
            }
            if j0 == 1 {
                out[base] = 0.0;
            }
        }
    }

    /// Transposed sweep of [`DiscreteOperator::solve_transport`].
    pub fn solve_transport_transpose(&self, lambda: f64, t: &[f64], out: &mut [f64]) {
        let nk = self.nk;
        let j0 = self.first_node();
        for i in 0..self.m {
            let base = i * nk;
            let mut next = 0.0;
            for j in (j0..nk).rev() {
                let carry = if j + 1 < nk { self.flux[base + j] * next } else { 0.0 };
                next = (t[base + j] + carry) / (lambda + self.out_rate[base + j]);
                out[base + j] = next;
            }
            if j0 == 1 {
                out[base] = 0.0;
            }
        }
    }

    /// `sum_ij omega_j f_ij`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let nk = self.nk;
        (0..self.m)
            .map(|i| {
                f[i * nk..(i + 1) * nk]
                    .iter()
                    .zip(&self.omega)
                    .map(|(a, w)| a * w)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `sum_ij omega_j |f_ij|`.
    pub fn integrate_abs(&self, f: &[f64]) -> f64 {
        let nk = self.nk;
        (0..self.m)
            .map(|i| {
                f[i * nk..(i + 1) * nk]
                    .iter()
                    .zip(&self.omega)
                    .map(|(a, w)| a.abs() * w)
                    .sum::<f64>()
            })
            .sum()
    }
}
