//! Control protocols: ground-population trajectories `q(x)` on `x ∈ [0, 1]`.
//!
//! A protocol fixes the endpoint populations, a duration, and a shape.
//! Slow-driving accounting requires *admissible* shapes: monotone, with
//! vanishing first derivative at both ends. The smoothstep is the smooth
//! reference ramp; the cosine branch is the variational optimum of the
//! dissipation functional (it has non-zero endpoint slopes and must be
//! capped by cubic Hermite segments of width `1/k` to become admissible).

use crate::error::{Error, Result};

/// Populations are confined to this interval to keep `ln(q/(1-q))` finite.
pub const Q_MIN: f64 = 1e-6;
/// Upper counterpart of [`Q_MIN`].
pub const Q_MAX: f64 = 1.0 - 1e-6;
/// Largest allowed cap-smoothing parameter.
pub const K_MAX: usize = 200;
/// Mesh intervals used by the admissibility check.
const ADMISSIBILITY_INTERVALS: usize = 10_000;

/// Functional form of a protocol on the rescaled coordinate `x ∈ [0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolShape {
    /// Cubic ramp `q0 + (q1-q0)(3x² - 2x³)`: zero endpoint slopes.
    Smoothstep,
    /// Variational optimum branch `q(x) = (1 + cos θ(x))/2` with `θ` linear.
    Cosine,
    /// Cosine branch with Hermite caps of width `1/k` enforcing flat ends.
    SmoothedCosine { k: usize },
    /// User-supplied samples on a uniform mesh (finite-difference calculus).
    Mesh(Vec<f64>),
}

/// Population trajectory with endpoints, duration, and shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProtocol {
    q0: f64,
    q1: f64,
    tau: f64,
    shape: ProtocolShape,
}

fn check_population(q: f64) -> Result<f64> {
    if (Q_MIN..=Q_MAX).contains(&q) {
        Ok(q)
    } else {
        Err(Error::InvalidProtocol(format!(
            "population {q} outside [{Q_MIN:e}, 1-{Q_MIN:e}]"
        )))
    }
}

/// Angle whose cosine branch passes through the population `q`.
fn theta_of(q: f64) -> f64 {
    (2.0 * q - 1.0).clamp(-1.0, 1.0).acos()
}

impl ControlProtocol {
    pub fn new(q0: f64, q1: f64, tau: f64, shape: ProtocolShape) -> Result<Self> {
        check_population(q0)?;
        check_population(q1)?;
        if tau <= 0.0 {
            return Err(Error::InvalidProtocol(format!("duration must be > 0, got {tau}")));
        }
        match &shape {
            ProtocolShape::SmoothedCosine { k } => {
                if *k < 3 || *k > K_MAX {
                    return Err(Error::InvalidProtocol(format!(
                        "smoothing parameter k={k} outside [3, {K_MAX}]"
                    )));
                }
            }
            ProtocolShape::Mesh(samples) => {
                if samples.len() < 3 {
                    return Err(Error::InvalidProtocol(
                        "mesh shape needs at least 3 samples".into(),
                    ));
                }
                for &q in samples {
                    check_population(q)?;
                }
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if (first - q0).abs() > 1e-12 || (last - q1).abs() > 1e-12 {
                    return Err(Error::InvalidProtocol(
                        "mesh samples do not match declared endpoints".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(Self { q0, q1, tau, shape })
    }

    pub fn smoothstep(q0: f64, q1: f64, tau: f64) -> Result<Self> {
        Self::new(q0, q1, tau, ProtocolShape::Smoothstep)
    }

    pub fn cosine(q0: f64, q1: f64, tau: f64) -> Result<Self> {
        Self::new(q0, q1, tau, ProtocolShape::Cosine)
    }

    pub fn smoothed_cosine(q0: f64, q1: f64, tau: f64, k: usize) -> Result<Self> {
        Self::new(q0, q1, tau, ProtocolShape::SmoothedCosine { k })
    }

    pub fn from_mesh(samples: Vec<f64>, tau: f64) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidProtocol("mesh shape needs at least 3 samples".into()));
        }
        let q0 = samples[0];
        let q1 = samples[samples.len() - 1];
        Self::new(q0, q1, tau, ProtocolShape::Mesh(samples))
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.q0, self.q1)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn shape(&self) -> &ProtocolShape {
        &self.shape
    }

    /// Same trajectory run over a different duration.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.q0, self.q1, tau, self.shape.clone())
    }

    /// Time-reversed protocol: `q_rev(x) = q(1-x)`.
    pub fn reversed(&self) -> Self {
        let shape = match &self.shape {
            ProtocolShape::Mesh(samples) => {
                let mut rev = samples.clone();
                rev.reverse();
                ProtocolShape::Mesh(rev)
            }
            other => other.clone(),
        };
        Self { q0: self.q1, q1: self.q0, tau: self.tau, shape }
    }

    /// Population at rescaled time `x ∈ [0, 1]`.
    pub fn value(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let q = match &self.shape {
            ProtocolShape::Smoothstep => {
                let s = x * x * (3.0 - 2.0 * x);
                self.q0 + (self.q1 - self.q0) * s
            }
            ProtocolShape::Cosine => {
                let (t0, t1) = (theta_of(self.q0), theta_of(self.q1));
                0.5 * (1.0 + (t0 + (t1 - t0) * x).cos())
            }
            ProtocolShape::SmoothedCosine { k } => self.smoothed_eval(x, *k).0,
            ProtocolShape::Mesh(samples) => {
                let n = samples.len() - 1;
                let pos = x * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                let frac = pos - i as f64;
                samples[i] * (1.0 - frac) + samples[i + 1] * frac
            }
        };
        q.clamp(Q_MIN, Q_MAX)
    }

    /// First derivative `dq/dx`.
    pub fn derivative(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.shape {
            ProtocolShape::Smoothstep => (self.q1 - self.q0) * 6.0 * x * (1.0 - x),
            ProtocolShape::Cosine => {
                let (t0, t1) = (theta_of(self.q0), theta_of(self.q1));
                let w = t1 - t0;
                -0.5 * w * (t0 + w * x).sin()
            }
            ProtocolShape::SmoothedCosine { k } => self.smoothed_eval(x, *k).1,
            ProtocolShape::Mesh(samples) => mesh_derivative(samples, x),
        }
    }

    /// Second derivative `d²q/dx²`.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.shape {
            ProtocolShape::Smoothstep => (self.q1 - self.q0) * (6.0 - 12.0 * x),
            ProtocolShape::Cosine => {
                let (t0, t1) = (theta_of(self.q0), theta_of(self.q1));
                let w = t1 - t0;
                -0.5 * w * w * (t0 + w * x).cos()
            }
            ProtocolShape::SmoothedCosine { k } => self.smoothed_eval(x, *k).2,
            ProtocolShape::Mesh(samples) => mesh_second_derivative(samples, x),
        }
    }

    /// Value, first and second derivative of the capped cosine.
    fn smoothed_eval(&self, x: f64, k: usize) -> (f64, f64, f64) {
        let h = 1.0 / k as f64;
        let core = ControlProtocol {
            q0: self.q0,
            q1: self.q1,
            tau: self.tau,
            shape: ProtocolShape::Cosine,
        };
        if x < h {
            // cap on [0, h]: value q0 and zero slope at 0, Hermite-matched at h
            hermite(x / h, h, self.q0, 0.0, core.value(h), core.derivative(h))
        } else if x > 1.0 - h {
            hermite(
                (x - (1.0 - h)) / h,
                h,
                core.value(1.0 - h),
                core.derivative(1.0 - h),
                self.q1,
                0.0,
            )
        } else {
            (core.value(x), core.derivative(x), core.second_derivative(x))
        }
    }

    /// Checks the slow-driving admissibility conditions on a fine mesh:
    /// flat endpoints (first mesh difference below 1e-6) and single-signed
    /// increments.
    pub fn validate_admissible(&self) -> Result<()> {
        let n = ADMISSIBILITY_INTERVALS;
        let q: Vec<f64> = (0..=n).map(|i| self.value(i as f64 / n as f64)).collect();
        let d_head = (q[1] - q[0]).abs();
        let d_tail = (q[n] - q[n - 1]).abs();
        if d_head > 1e-6 || d_tail > 1e-6 {
            return Err(Error::InvalidProtocol(format!(
                "endpoint slopes too large (first differences {d_head:.2e}, {d_tail:.2e})"
            )));
        }
        let dir = (self.q1 - self.q0).signum();
        for w in q.windows(2) {
            if dir * (w[1] - w[0]) < -1e-12 {
                return Err(Error::InvalidProtocol(
                    "protocol is not monotone between its endpoints".into(),
                ));
            }
        }
        Ok(())
    }

    /// Uniform samples `q(i/(n-1))`, `i = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.value(i as f64 / (n - 1) as f64)).collect()
    }
}

/// Cubic Hermite value/derivatives on a cap of width `h`, local coordinate
/// `s ∈ [0,1]`; `p0, m0` and `p1, m1` are the endpoint values and slopes
/// (slopes in `x` units).
fn hermite(s: f64, h: f64, p0: f64, m0: f64, p1: f64, m1: f64) -> (f64, f64, f64) {
    let (s2, s3) = (s * s, s * s * s);
    let value = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * h * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * h * m1;
    let deriv = ((6.0 * s2 - 6.0 * s) * p0 + (6.0 * s - 6.0 * s2) * p1) / h
        + (3.0 * s2 - 4.0 * s + 1.0) * m0
        + (3.0 * s2 - 2.0 * s) * m1;
    let second = ((12.0 * s - 6.0) * p0 + (6.0 - 12.0 * s) * p1) / (h * h)
        + ((6.0 * s - 4.0) * m0 + (6.0 * s - 2.0) * m1) / h;
    (value, deriv, second)
}

fn mesh_derivative(samples: &[f64], x: f64) -> f64 {
    let n = samples.len() - 1;
    let h = 1.0 / n as f64;
    let i = ((x * n as f64).round() as usize).min(n);
    if i == 0 {
        (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h)
    } else if i == n {
        (3.0 * samples[n] - 4.0 * samples[n - 1] + samples[n - 2]) / (2.0 * h)
    } else {
        (samples[i + 1] - samples[i - 1]) / (2.0 * h)
    }
}

fn mesh_second_derivative(samples: &[f64], x: f64) -> f64 {
    let n = samples.len() - 1;
    let h = 1.0 / n as f64;
    let i = ((x * n as f64).round() as usize).clamp(1, n - 1);
    (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / (h * h)
}
