//! Two-mass suspension model driven by a road bump.
//!
//! State `x = (x_us - x0, ẋ_us, x_s - x_us, ẋ_s)`, input `ẋ0`. The `4/m`
//! factors mean the masses are full-car values shared over four corners.

use nalgebra::{Matrix4, SMatrix, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Blow-up guard on the state norm.
pub const UNSTABLE_NORM: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RoadProfile {
    /// `x0 = h sin(π t / T)` for `t < T = length / speed`, then flat.
    HalfSineBump { height: f64, length: f64, speed: f64 },
    /// Flat road; the car stays at rest.
    Flat,
}

impl RoadProfile {
    fn duration(&self) -> f64 {
        match *self {
            Self::HalfSineBump { length, speed, .. } => length / speed,
            Self::Flat => 0.0,
        }
    }

    /// `x0(t)`.
    pub fn displacement(&self, t: f64) -> f64 {
        match *self {
            Self::HalfSineBump { height, .. } => {
                let big_t = self.duration();
                if (0.0..big_t).contains(&t) {
                    height * (std::f64::consts::PI * t / big_t).sin()
                } else {
                    0.0
                }
            }
            Self::Flat => 0.0,
        }
    }

    /// `ẋ0` on the smooth piece containing `mid`, evaluated at `t`; this keeps
    /// the jumps at the start and end of the bump on step boundaries.
    fn velocity_piece(&self, mid: f64, t: f64) -> f64 {
        match *self {
            Self::HalfSineBump { height, .. } => {
                let big_t = self.duration();
                if (0.0..big_t).contains(&mid) {
                    let w = std::f64::consts::PI / big_t;
                    height * w * (w * t).cos()
                } else {
                    0.0
                }
            }
            Self::Flat => 0.0,
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        match *self {
            Self::HalfSineBump { height, length, speed } => {
                Self::HalfSineBump { height: height * factor, length, speed }
            }
            Self::Flat => Self::Flat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Zero-error state transition for inputs linear within each step.
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuarterCarConfig {
    pub m_s: f64,
    pub m_us: f64,
    pub c_t: f64,
    pub road: RoadProfile,
    pub duration: f64,
    pub timestep: f64,
    /// Stroke threshold in metres.
    pub x_c: f64,
    pub integrator: Integrator,
    /// When set, the bump height is rescaled so the stroke at the mean inputs
    /// equals this fraction of `x_c`.
    pub target_stroke_ratio: Option<f64>,
}

impl Default for QuarterCarConfig {
    fn default() -> Self {
        Self {
            m_s: 1460.0,
            m_us: 160.0,
            c_t: 0.0,
            road: RoadProfile::HalfSineBump { height: 0.05, length: 5.0, speed: 10.0 },
            duration: 5.0,
            timestep: 1e-3,
            x_c: 0.03,
            integrator: Integrator::Exact,
            target_stroke_ratio: None,
        }
    }
}

impl QuarterCarConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.m_s) && pos(self.m_us)) {
            return Err(Error::domain(format!("masses must be positive (m_s={}, m_us={})", self.m_s, self.m_us)));
        }
        if !(self.c_t >= 0.0) || !pos(self.timestep) || !pos(self.x_c) {
            return Err(Error::domain("c_t must be >= 0, timestep and x_c positive"));
        }
        if let RoadProfile::HalfSineBump { height, length, speed } = self.road {
            if !height.is_finite() || !pos(length) || !pos(speed) {
                return Err(Error::domain("bump needs finite height and positive length and speed"));
            }
        }
        if !(self.duration >= 5.0) || self.duration < self.road.duration() {
            return Err(Error::domain(format!(
                "duration {} must be >= 5 s and cover the bump transit",
                self.duration
            )));
        }
        if self.timestep > 0.1 * self.road.duration().max(0.1) {
            return Err(Error::domain(format!("timestep {} too coarse for the road profile", self.timestep)));
        }
        if let Some(r) = self.target_stroke_ratio {
            if !pos(r) {
                return Err(Error::domain(format!("target_stroke_ratio must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// Copy with the bump scaled so the peak stroke at `(c_s, k_s, k_t)` is
    /// `ratio · x_c`.
    pub fn auto_scaled(&self, c_s: f64, k_s: f64, k_t: f64, ratio: f64) -> Result<Self> {
        let base = Self { target_stroke_ratio: None, ..*self };
        let stroke = simulate(c_s, k_s, k_t, &base)?.max_stroke;
        if !(stroke > 0.0) {
            return Err(Error::domain("cannot auto-scale a profile that produces no stroke"));
        }
        Ok(Self { road: self.road.scaled(ratio * self.x_c / stroke), ..base })
    }
}

pub fn system_matrices(c_s: f64, k_s: f64, k_t: f64, cfg: &QuarterCarConfig) -> (Matrix4<f64>, Vector4<f64>) {
    let (ms, mus, c_t) = (cfg.m_s, cfg.m_us, cfg.c_t);
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -4.0 * k_t / mus, -4.0 * (c_s + c_t) / mus, 4.0 * k_s / mus, 4.0 * c_s / mus,
        0.0, -1.0, 0.0, 1.0,
        0.0, 4.0 * c_s / ms, -4.0 * k_s / ms, -4.0 * c_s / ms,
    );
    let b = Vector4::new(-1.0, 4.0 * c_t / mus, 0.0, 0.0);
    (a, b)
}

/// Kinetic plus spring energy per corner.
pub fn energy(x: &Vector4<f64>, k_s: f64, k_t: f64, cfg: &QuarterCarConfig) -> f64 {
    0.5 * (cfg.m_us / 4.0) * x[1] * x[1]
        + 0.5 * (cfg.m_s / 4.0) * x[3] * x[3]
        + 0.5 * k_t * x[0] * x[0]
        + 0.5 * k_s * x[2] * x[2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector4<f64>>,
    pub max_stroke: f64,
}

fn check_inputs(c_s: f64, k_s: f64, k_t: f64) -> Result<()> {
    if !(c_s >= 0.0 && k_s > 0.0 && k_t > 0.0) || !(c_s + k_s + k_t).is_finite() {
        return Err(Error::domain(format!("quarter-car inputs need c_s >= 0, k_s, k_t > 0 (got {c_s}, {k_s}, {k_t})")));
    }
    Ok(())
}

fn simulate_inner(c_s: f64, k_s: f64, k_t: f64, cfg: &QuarterCarConfig, keep: bool) -> Result<Trajectory> {
    check_inputs(c_s, k_s, k_t)?;
    cfg.validate()?;
    let (a, b) = system_matrices(c_s, k_s, k_t, cfg);
    let dt = cfg.timestep;
    let steps = (cfg.duration / dt).round() as usize;

    // exp of [[A dt, B dt, 0], [0, 0, 1], [0, 0, 0]] carries the state and an
    // input u0 + s (u1 - u0), s in [0, 1], across one step
    let exact = if cfg.integrator == Integrator::Exact {
        let mut m = SMatrix::<f64, 6, 6>::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(&(a * dt));
        m.fixed_view_mut::<4, 1>(0, 4).copy_from(&(b * dt));
        m[(4, 5)] = 1.0;
        let e = m.exp();
        let phi: Matrix4<f64> = e.fixed_view::<4, 4>(0, 0).into();
        let g0: Vector4<f64> = e.fixed_view::<4, 1>(0, 4).into();
        let g1: Vector4<f64> = e.fixed_view::<4, 1>(0, 5).into();
        Some((phi, g0, g1))
    } else {
        None
    };
    let rhs = |x: &Vector4<f64>, u: f64| a * x + b * u;

    let mut x = Vector4::zeros();
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), max_stroke: 0.0 };
    if keep {
        traj.times.push(0.0);
        traj.states.push(x);
    }
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let mid = t0 + 0.5 * dt;
        let u0 = cfg.road.velocity_piece(mid, t0);
        let u1 = cfg.road.velocity_piece(mid, t0 + dt);
        x = match exact {
            Some((phi, g0, g1)) => phi * x + g0 * u0 + g1 * (u1 - u0),
            None => {
                let um = cfg.road.velocity_piece(mid, mid);
                let k1 = rhs(&x, u0);
                let k2 = rhs(&(x + k1 * (0.5 * dt)), um);
                let k3 = rhs(&(x + k2 * (0.5 * dt)), um);
                let k4 = rhs(&(x + k3 * dt), u1);
                x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
            }
        };
        let norm = x.norm();
        if !(norm <= UNSTABLE_NORM) {
            return Err(Error::Unstable { norm, time: t0 + dt });
        }
        traj.max_stroke = traj.max_stroke.max(x[2].abs());
        if keep {
            traj.times.push(t0 + dt);
            traj.states.push(x);
        }
    }
    Ok(traj)
}

/// Full state history on the time grid.
pub fn simulate(c_s: f64, k_s: f64, k_t: f64, cfg: &QuarterCarConfig) -> Result<Trajectory> {
    simulate_inner(c_s, k_s, k_t, cfg, true)
}

/// `g = 1 - max_t |x_s - x_us| / x_c`.
///
/// `cfg.target_stroke_ratio` is ignored here; apply
/// [`QuarterCarConfig::auto_scaled`] first.
pub fn quarter_car_solve(c_s: f64, k_s: f64, k_t: f64, cfg: &QuarterCarConfig) -> Result<f64> {
    let stroke = simulate_inner(c_s, k_s, k_t, cfg, false)?.max_stroke;
    Ok(1.0 - stroke / cfg.x_c)
}
