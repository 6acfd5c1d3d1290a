//! One-step update maps for every algorithm plus the iteration driver.

mod run;
mod steps;

pub use run::{run, StopCriteria, Termination, Trace, TraceRow, DIVERGENCE_NORM};
pub use steps::*;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::oracle::{CgBudget, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Two-timescale gradient descent ascent.
    Gda,
    /// Leader step followed by `k` follower ascent steps.
    GdaK,
    /// Total gradient descent for the leader, ascent for the follower.
    Tgda,
    /// Follow the ridge.
    Fr,
    /// Leader gradient descent, follower Newton.
    Gdn,
    /// Complete Newton: total Newton for the leader, Newton for the follower.
    Cn,
    /// GDN with Polyak momentum on the leader.
    GdnMomentum,
    /// Total gradient descent for the leader, Newton for the follower.
    TgdNewton,
    /// Total Newton on the total gradient.
    CnTotal,
    /// Total Newton leader with a first-order corrected follower Newton step.
    EvtushenkoCn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Gda,
        Algorithm::GdaK,
        Algorithm::Tgda,
        Algorithm::Fr,
        Algorithm::Gdn,
        Algorithm::Cn,
        Algorithm::GdnMomentum,
        Algorithm::TgdNewton,
        Algorithm::CnTotal,
        Algorithm::EvtushenkoCn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Gda => "GDA",
            Algorithm::GdaK => "GDA_K",
            Algorithm::Tgda => "TGDA",
            Algorithm::Fr => "FR",
            Algorithm::Gdn => "GDN",
            Algorithm::Cn => "CN",
            Algorithm::GdnMomentum => "GDN_MOMENTUM",
            Algorithm::TgdNewton => "TGD_NEWTON",
            Algorithm::CnTotal => "CN_TOTAL",
            Algorithm::EvtushenkoCn => "EVTUSHENKO_CN",
        }
    }

    /// Follower evaluated at the new leader for GDN-style and GDA-k methods,
    /// at the old leader otherwise.
    pub fn default_mode(self) -> Mode {
        match self {
            Algorithm::Gdn | Algorithm::Cn | Algorithm::GdnMomentum | Algorithm::GdaK => Mode::Alternating,
            _ => Mode::Simultaneous,
        }
    }

    pub fn uses_alpha_l(self) -> bool {
        matches!(
            self,
            Algorithm::Gda
                | Algorithm::GdaK
                | Algorithm::Tgda
                | Algorithm::Fr
                | Algorithm::Gdn
                | Algorithm::GdnMomentum
                | Algorithm::TgdNewton
        )
    }

    pub fn uses_alpha_f(self) -> bool {
        matches!(self, Algorithm::Gda | Algorithm::GdaK | Algorithm::Tgda | Algorithm::Fr)
    }

    /// Leader takes a total-Newton step.
    pub fn newton_leader(self) -> bool {
        matches!(self, Algorithm::Cn | Algorithm::CnTotal | Algorithm::EvtushenkoCn)
    }

    /// Follower takes a Newton step.
    pub fn newton_follower(self) -> bool {
        matches!(
            self,
            Algorithm::Gdn
                | Algorithm::Cn
                | Algorithm::GdnMomentum
                | Algorithm::TgdNewton
                | Algorithm::CnTotal
                | Algorithm::EvtushenkoCn
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Case-insensitive; `-` and `_` are interchangeable. `2TS_GDA` names GDA.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        if key == "2TS_GDA" {
            return Ok(Algorithm::Gda);
        }
        Algorithm::ALL.into_iter().find(|a| a.as_str() == key).ok_or_else(|| {
            let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.as_str()).collect();
            format!("unknown algorithm `{s}`; expected one of {}", names.join(", "))
        })
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Follower derivatives taken at `x_t`.
    Simultaneous,
    /// Follower derivatives taken at `x_{t+1}`.
    Alternating,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simultaneous => "simultaneous",
            Mode::Alternating => "alternating",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simultaneous" | "sim" => Ok(Mode::Simultaneous),
            "alternating" | "alt" => Ok(Mode::Alternating),
            _ => Err(format!("unknown mode `{s}`; expected simultaneous or alternating")),
        }
    }
}

/// Algorithm choice and its hyperparameters. Fields an algorithm does not
/// use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub algorithm: Algorithm,
    /// `None` selects [`Algorithm::default_mode`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(rename = "alpha_L", default)]
    pub alpha_l: f64,
    #[serde(rename = "alpha_F", default)]
    pub alpha_f: f64,
    #[serde(default = "one_usize")]
    pub k: usize,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "one")]
    pub gamma_x: f64,
    #[serde(default = "one")]
    pub gamma_y: f64,
    #[serde(default)]
    pub lambda_x: f64,
    #[serde(default)]
    pub lambda_y: f64,
    #[serde(default)]
    pub cg: CgBudget,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

impl SolverSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            mode: None,
            alpha_l: 0.0,
            alpha_f: 0.0,
            k: 1,
            beta: 0.0,
            gamma_x: 1.0,
            gamma_y: 1.0,
            lambda_x: 0.0,
            lambda_y: 0.0,
            cg: CgBudget::default(),
        }
    }

    pub fn with_steps(mut self, alpha_l: f64, alpha_f: f64) -> Self {
        self.alpha_l = alpha_l;
        self.alpha_f = alpha_f;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_cg(mut self, cg: CgBudget) -> Self {
        self.cg = cg;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or_else(|| self.algorithm.default_mode())
    }

    /// Every range violation, each prefixed by its key under `solver.`.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, key: &str, rule: &str, value: String| {
            if !ok {
                errs.push(format!("solver.{key}: {rule} (got {value})"));
            }
        };
        let alg = self.algorithm;
        check(self.alpha_l.is_finite() && self.alpha_l >= 0.0, "alpha_L", "must be >= 0", self.alpha_l.to_string());
        check(self.alpha_f.is_finite() && self.alpha_f >= 0.0, "alpha_F", "must be >= 0", self.alpha_f.to_string());
        if alg.uses_alpha_l() && self.alpha_l >= 0.0 {
            check(self.alpha_l > 0.0, "alpha_L", &format!("must be > 0 for {alg}"), self.alpha_l.to_string());
        }
        if alg.uses_alpha_f() && self.alpha_f >= 0.0 {
            check(self.alpha_f > 0.0, "alpha_F", &format!("must be > 0 for {alg}"), self.alpha_f.to_string());
        }
        if alg == Algorithm::GdaK {
            check(self.k >= 1, "k", "must be >= 1 for GDA_K", self.k.to_string());
        }
        check((0.0..1.0).contains(&self.beta), "beta", "must be in [0, 1)", self.beta.to_string());
        for (key, v) in [("gamma_x", self.gamma_x), ("gamma_y", self.gamma_y)] {
            check(v > 0.0 && v <= 1.0, key, "must be in (0, 1]", v.to_string());
        }
        for (key, v) in [("lambda_x", self.lambda_x), ("lambda_y", self.lambda_y)] {
            check(v.is_finite() && v >= 0.0, key, "must be >= 0", v.to_string());
        }
        check(self.cg.max_iter_x >= 1, "cg.max_iter_x", "must be >= 1", self.cg.max_iter_x.to_string());
        check(self.cg.max_iter_y >= 1, "cg.max_iter_y", "must be >= 1", self.cg.max_iter_y.to_string());
        check(self.cg.tol.is_finite() && self.cg.tol >= 0.0, "cg.tol", "must be >= 0", self.cg.tol.to_string());
        errs
    }
}

/// Iterate plus the previous iterate for momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub z: Point,
    pub z_prev: Point,
}

impl StepState {
    /// Zero initial velocity: `z_prev = z`.
    pub fn new(z: Point) -> Self {
        Self { z_prev: z.clone(), z }
    }
}

/// A new state and the CG work spent producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub state: StepState,
    pub cg_iters_x: usize,
    pub cg_iters_y: usize,
    /// Some inner solve reported a (nearly) singular system.
    pub near_singular: bool,
}
