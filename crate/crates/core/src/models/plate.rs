//! Square Kirchhoff plate clamped on one edge, meshed with 12-DOF
//! non-conforming rectangles (w, θx = ∂w/∂y, θy = -∂w/∂x per node) under
//! uniform pressure.
//!
//! The bending stiffness is `D (K_a + ν K_b)` with `D = E t³ / (12 (1 - ν²))`,
//! so `K_a`, `K_b` and the load vector are assembled once per mesh.

use std::io::Write;
use std::path::Path;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Mat12 = SMatrix<f64, 12, 12>;
type Vec12 = SVector<f64, 12>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlateQoi {
    /// Largest |w| over the active nodes.
    MaxDeflection,
    /// |w| at the middle node of the edge opposite the clamp.
    FreeEdgeMid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateConfig {
    pub side_length: f64,
    pub elements_per_side: usize,
    /// Uniform pressure in Pa.
    pub pressure: f64,
    pub qoi: PlateQoi,
}

impl Default for PlateConfig {
    fn default() -> Self {
        Self { side_length: 1.0, elements_per_side: 10, pressure: 100.0, qoi: PlateQoi::MaxDeflection }
    }
}

/// Polynomial basis `[1, x, y, x², xy, y², x³, x²y, xy², y³, x³y, xy³]`
/// and its derivatives.
fn poly(x: f64, y: f64) -> [f64; 12] {
    [1.0, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y, x * x * x * y, x * y * y * y]
}

fn poly_dx(x: f64, y: f64) -> [f64; 12] {
    [0.0, 1.0, 0.0, 2.0 * x, y, 0.0, 3.0 * x * x, 2.0 * x * y, y * y, 0.0, 3.0 * x * x * y, y * y * y]
}

fn poly_dy(x: f64, y: f64) -> [f64; 12] {
    [0.0, 0.0, 1.0, 0.0, x, 2.0 * y, 0.0, x * x, 2.0 * x * y, 3.0 * y * y, x * x * x, 3.0 * x * y * y]
}

fn poly_dxx(x: f64, y: f64) -> [f64; 12] {
    [0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 6.0 * x, 2.0 * y, 0.0, 0.0, 6.0 * x * y, 0.0]
}

fn poly_dyy(x: f64, y: f64) -> [f64; 12] {
    [0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 2.0 * x, 6.0 * y, 0.0, 6.0 * x * y]
}

fn poly_dxy(x: f64, y: f64) -> [f64; 12] {
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0 * x, 2.0 * y, 0.0, 3.0 * x * x, 3.0 * y * y]
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Element matrices for an `a × b` rectangle with nodes at
/// (0,0), (a,0), (a,b), (0,b).
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    /// Stiffness for the constitutive part `diag(1, 1, 1/2)` (times `D`).
    pub ka: Mat12,
    /// Stiffness for the part multiplying `ν`.
    pub kb: Mat12,
    /// Consistent load for unit pressure.
    pub load: Vec12,
}

pub fn element_matrices(a: f64, b: f64) -> Result<ElementMatrices> {
    let corners = [(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)];
    let mut c = Mat12::zeros();
    for (n, &(x, y)) in corners.iter().enumerate() {
        let (p, px, py) = (poly(x, y), poly_dx(x, y), poly_dy(x, y));
        for k in 0..12 {
            c[(3 * n, k)] = p[k];
            c[(3 * n + 1, k)] = py[k];
            c[(3 * n + 2, k)] = -px[k];
        }
    }
    let c_inv = c
        .try_inverse()
        .ok_or_else(|| Error::Internal(format!("singular element interpolation for {a} x {b}")))?;

    let mut ka = Mat12::zeros();
    let mut kb = Mat12::zeros();
    let mut load = Vec12::zeros();
    for &(gx, wx) in &GAUSS4 {
        for &(gy, wy) in &GAUSS4 {
            let (x, y) = (0.5 * a * (gx + 1.0), 0.5 * b * (gy + 1.0));
            let weight = wx * wy * 0.25 * a * b;
            // curvatures (-w_xx, -w_yy, -2 w_xy) as rows of B
            let bxx = SVector::<f64, 12>::from(poly_dxx(x, y)).transpose() * c_inv * -1.0;
            let byy = SVector::<f64, 12>::from(poly_dyy(x, y)).transpose() * c_inv * -1.0;
            let bxy = SVector::<f64, 12>::from(poly_dxy(x, y)).transpose() * c_inv * -2.0;
            ka += (bxx.transpose() * bxx + byy.transpose() * byy + bxy.transpose() * bxy * 0.5) * weight;
            kb += (bxx.transpose() * byy + byy.transpose() * bxx - bxy.transpose() * bxy * 0.5) * weight;
            let n = SVector::<f64, 12>::from(poly(x, y)).transpose() * c_inv;
            load += n.transpose() * weight;
        }
    }
    Ok(ElementMatrices { ka, kb, load })
}

/// Symmetric band matrix stored by rows: `band[i][k] = K[i][i - k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, band: vec![0.0; n * (bw + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// `K[i][j]` for `j <= i`.
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.band[self.idx(i, j)]
        }
    }

    fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.band[k] += v;
    }

    /// `alpha * self + beta * other` (same shape).
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let band = self.band.iter().zip(&other.band).map(|(x, y)| alpha * x + beta * y).collect();
        Self { n: self.n, bw: self.bw, band }
    }

    /// Solves `K x = rhs` by band Cholesky.
    pub fn cholesky_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: rhs.len() });
        }
        let (n, bw) = (self.n, self.bw);
        let mut l = self.band.clone();
        let at = |i: usize, j: usize| i * (bw + 1) + (i - j);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = l[at(i, j)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= l[at(i, k)] * x[k];
            }
            x[i] = s / l[at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= l[at(k, i)] * x[k];
            }
            x[i] = s / l[at(i, i)];
        }
        Ok(x)
    }
}

/// Mesh, assembled parameter-free matrices and load for one configuration.
#[derive(Debug, Clone)]
pub struct PlateModel {
    cfg: PlateConfig,
    nodes_per_side: usize,
    /// Active equation number of each (node, dof), `None` when clamped.
    dof_map: Vec<Option<usize>>,
    ka: BandMatrix,
    kb: BandMatrix,
    unit_load: Vec<f64>,
}

/// Nodal response of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateField {
    /// `(x, y)` per node.
    pub coords: Vec<(f64, f64)>,
    /// `(w, θx, θy)` per node; clamped nodes are zero.
    pub dofs: Vec<[f64; 3]>,
    pub clamped: Vec<bool>,
}

impl PlateModel {
    pub fn new(cfg: PlateConfig) -> Result<Self> {
        let ne = cfg.elements_per_side;
        if ne < 2 {
            return Err(Error::domain(format!("plate mesh needs at least 2x2 elements, got {ne}")));
        }
        if !(cfg.side_length > 0.0) || !cfg.pressure.is_finite() {
            return Err(Error::domain("plate side length must be positive and pressure finite"));
        }
        let nn = ne + 1;
        let h = cfg.side_length / ne as f64;
        // nodes numbered column by column along y; the clamp is the x = 0 column
        let node = |i: usize, j: usize| i * nn + j;
        let mut dof_map = vec![None; 3 * nn * nn];
        let mut next = 0;
        for i in 1..nn {
            for j in 0..nn {
                for d in 0..3 {
                    dof_map[3 * node(i, j) + d] = Some(next);
                    next += 1;
                }
            }
        }
        let el = element_matrices(h, h)?;
        let elements = (0..ne).flat_map(|ex| (0..ne).map(move |ey| (ex, ey)));
        let element_dofs = |ex: usize, ey: usize| -> [Option<usize>; 12] {
            let ns = [node(ex, ey), node(ex + 1, ey), node(ex + 1, ey + 1), node(ex, ey + 1)];
            let mut out = [None; 12];
            for (a, n) in ns.iter().enumerate() {
                for d in 0..3 {
                    out[3 * a + d] = dof_map[3 * n + d];
                }
            }
            out
        };
        let bw = elements
            .clone()
            .map(|(ex, ey)| {
                let ds: Vec<usize> = element_dofs(ex, ey).iter().flatten().copied().collect();
                ds.iter().max().unwrap_or(&0) - ds.iter().min().unwrap_or(&0)
            })
            .max()
            .unwrap_or(0);
        let mut ka = BandMatrix::zeros(next, bw);
        let mut kb = BandMatrix::zeros(next, bw);
        let mut unit_load = vec![0.0; next];
        for (ex, ey) in elements {
            let ds = element_dofs(ex, ey);
            for (p, gp) in ds.iter().enumerate() {
                let Some(gp) = *gp else { continue };
                unit_load[gp] += el.load[p];
                for (q, gq) in ds.iter().enumerate() {
                    let Some(gq) = *gq else { continue };
                    if gq <= gp {
                        ka.add_lower(gp, gq, el.ka[(p, q)]);
                        kb.add_lower(gp, gq, el.kb[(p, q)]);
                    }
                }
            }
        }
        Ok(Self { cfg, nodes_per_side: nn, dof_map, ka, kb, unit_load })
    }

    pub fn config(&self) -> &PlateConfig {
        &self.cfg
    }

    pub fn active_dofs(&self) -> usize {
        self.unit_load.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.ka.bandwidth()
    }

    /// Global stiffness for the given material and thickness.
    pub fn stiffness(&self, e: f64, t: f64, nu: f64) -> Result<BandMatrix> {
        if !(e > 0.0 && t > 0.0) || !(nu > 0.0 && nu < 0.5) {
            return Err(Error::domain(format!("plate inputs need E, t > 0 and 0 < nu < 0.5 (got {e}, {t}, {nu})")));
        }
        let d = e * t.powi(3) / (12.0 * (1.0 - nu * nu));
        Ok(self.ka.combine(d, &self.kb, d * nu))
    }

    pub fn displacements(&self, e: f64, t: f64, nu: f64) -> Result<Vec<f64>> {
        let k = self.stiffness(e, t, nu)?;
        let f: Vec<f64> = self.unit_load.iter().map(|v| v * self.cfg.pressure).collect();
        k.cholesky_solve(&f)
    }

    pub fn solve_field(&self, e: f64, t: f64, nu: f64) -> Result<PlateField> {
        let u = self.displacements(e, t, nu)?;
        let nn = self.nodes_per_side;
        let h = self.cfg.side_length / (nn - 1) as f64;
        let mut field = PlateField { coords: Vec::new(), dofs: Vec::new(), clamped: Vec::new() };
        for i in 0..nn {
            for j in 0..nn {
                let n = i * nn + j;
                field.coords.push((i as f64 * h, j as f64 * h));
                let get = |d: usize| self.dof_map[3 * n + d].map_or(0.0, |g| u[g]);
                field.dofs.push([get(0), get(1), get(2)]);
                field.clamped.push(self.dof_map[3 * n].is_none());
            }
        }
        Ok(field)
    }

    /// Quantity of interest in metres.
    pub fn solve(&self, e: f64, t: f64, nu: f64) -> Result<f64> {
        let u = self.displacements(e, t, nu)?;
        let nn = self.nodes_per_side;
        let qoi = match self.cfg.qoi {
            PlateQoi::MaxDeflection => (0..nn * nn)
                .filter_map(|n| self.dof_map[3 * n])
                .map(|g| u[g].abs())
                .fold(0.0, f64::max),
            PlateQoi::FreeEdgeMid => {
                let n = (nn - 1) * nn + nn / 2;
                self.dof_map[3 * n].map_or(0.0, |g| u[g].abs())
            }
        };
        if !qoi.is_finite() {
            return Err(Error::NonFinite("plate deflection".into()));
        }
        Ok(qoi)
    }

    /// Writes `x,y,clamped,w,theta_x,theta_y` per node.
    pub fn write_field_csv(&self, path: &Path, e: f64, t: f64, nu: f64) -> Result<()> {
        let field = self.solve_field(e, t, nu)?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,y,clamped,w,theta_x,theta_y")?;
        for ((xy, d), c) in field.coords.iter().zip(&field.dofs).zip(&field.clamped) {
            writeln!(out, "{},{},{},{:e},{:e},{:e}", xy.0, xy.1, *c as u8, d[0], d[1], d[2])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One-off evaluation; prefer [`PlateModel`] when solving repeatedly.
pub fn plate_solve(e: f64, t: f64, nu: f64, cfg: &PlateConfig) -> Result<f64> {
    PlateModel::new(*cfg)?.solve(e, t, nu)
}
