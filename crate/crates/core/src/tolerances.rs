//! Named numerical thresholds, all overridable with `NAME=VALUE`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Tolerances {
    pub frame: f64,
    pub nondeg: f64,
    pub so3: f64,
    pub pde: f64,
    pub recon: f64,
    pub sing: f64,
    pub dep: f64,
    pub ratio: f64,
    pub theta: f64,
    pub theta_dir: f64,
    pub front: f64,
    pub lemma: f64,
    /// `x ≠ 0` means `|x| > crit`.
    pub crit: f64,
    /// `x = 0` means `|x| < hyp`.
    pub hyp: f64,
    pub hess: f64,
    pub rank: f64,
    pub ker: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            frame: 1e-9,
            nondeg: 1e-9,
            so3: 1e-9,
            pde: 1e-8,
            recon: 1e-6,
            sing: 1e-8,
            dep: 1e-8,
            ratio: 1e-6,
            theta: 1e-8,
            theta_dir: 1e-6,
            front: 1e-8,
            lemma: 1e-6,
            crit: 1e-7,
            hyp: 1e-7,
            hess: 1e-6,
            rank: 1e-8,
            ker: 1e-8,
        }
    }
}

pub const TOLERANCE_NAMES: &[&str] = &[
    "frame", "nondeg", "so3", "pde", "recon", "sing", "dep", "ratio", "theta", "theta_dir", "front", "lemma",
    "crit", "hyp", "hess", "rank", "ker",
];

impl Tolerances {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "frame" => &mut self.frame,
            "nondeg" => &mut self.nondeg,
            "so3" => &mut self.so3,
            "pde" => &mut self.pde,
            "recon" => &mut self.recon,
            "sing" => &mut self.sing,
            "dep" => &mut self.dep,
            "ratio" => &mut self.ratio,
            "theta" => &mut self.theta,
            "theta_dir" => &mut self.theta_dir,
            "front" => &mut self.front,
            "lemma" => &mut self.lemma,
            "crit" => &mut self.crit,
            "hyp" => &mut self.hyp,
            "hess" => &mut self.hess,
            "rank" => &mut self.rank,
            "ker" => &mut self.ker,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Input(format!("tolerance {name} must be positive, got {value}")));
        }
        let slot = self.slot(name).ok_or_else(|| {
            Error::Input(format!("unknown tolerance `{name}` (known: {})", TOLERANCE_NAMES.join(", ")))
        })?;
        *slot = value;
        Ok(())
    }

    /// Applies one `NAME=VALUE` override.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("expected NAME=VALUE, got `{assignment}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad tolerance value in `{assignment}`")))?;
        self.set(name.trim(), value)
    }

    pub fn curve_checks(&self) -> crate::curves::CurveChecks {
        crate::curves::CurveChecks { frame_tol: self.frame, nondeg_tol: self.nondeg }
    }

    pub fn theta_options(&self) -> crate::framedsurf::ThetaOptions {
        crate::framedsurf::ThetaOptions {
            theta_tol: self.theta,
            theta_dir_tol: self.theta_dir,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_validate() {
        let mut t = Tolerances::default();
        t.apply("crit=1e-5").unwrap();
        assert_eq!(t.crit, 1e-5);
        assert!(t.apply("crit").is_err());
        assert!(t.apply("nope=1").is_err());
        assert!(t.apply("hyp=-1").is_err());
        assert!(t.apply("hyp=abc").is_err());
    }
}
