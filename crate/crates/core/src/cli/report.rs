//! Pipeline report: counts, proof attempts and certified cusps.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::continuation::{Flag, Triangulation};
use crate::detect::{DetectSummary, FlagCounts};
use crate::prove::{CuspCertificate, Stability};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofAttempt {
    /// Source triangle; absent for an explicit seed point.
    pub triangle: Option<usize>,
    pub flag: Option<Flag>,
    pub seed: Vec<f64>,
    pub valid: bool,
    /// Certificate file relative to the output directory.
    pub certificate: Option<String>,
    /// Triangle of an earlier attempt that certified the same cusp.
    pub duplicate_of: Option<usize>,
    /// First failing stage, if any.
    pub failure: Option<String>,
}

impl ProofAttempt {
    pub fn new(
        triangle: Option<usize>,
        flag: Option<Flag>,
        seed: &[f64],
        cert: Option<&CuspCertificate>,
        error: Option<String>,
    ) -> Self {
        let failure = error.or_else(|| {
            let s = &cert?.stages;
            [&s.newton, &s.nk, &s.spectrum, &s.normal_form].into_iter().find_map(|st| match st {
                crate::prove::Stage::Failed { reason } => Some(reason.clone()),
                _ => None,
            })
        });
        ProofAttempt {
            triangle,
            flag,
            seed: seed.to_vec(),
            valid: cert.is_some_and(|c| c.valid),
            certificate: None,
            duplicate_of: None,
            failure,
        }
    }

    pub fn label(&self) -> String {
        match (self.triangle, self.flag) {
            (Some(id), Some(f)) => format!("triangle {id} ({f:?})"),
            (Some(id), None) => format!("triangle {id}"),
            _ => "seed point".to_string(),
        }
    }

    pub fn line(&self) -> String {
        let what = if !self.valid {
            format!("FAILED: {}", self.failure.as_deref().unwrap_or("no certificate"))
        } else if let Some(d) = self.duplicate_of {
            format!("certified (same cusp as triangle {d})")
        } else {
            "certified".to_string()
        };
        format!("  {}: {what}", self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspSummary {
    pub triangle: Option<usize>,
    pub x: Vec<f64>,
    pub lambda: [f64; 2],
    pub r: f64,
    pub c_mid: f64,
    pub c_rad: f64,
    pub stability: Option<Stability>,
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub continue_s: f64,
    pub detect_s: f64,
    pub prove_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub model: String,
    pub nodes: usize,
    pub simplices: usize,
    pub euler_characteristic: i64,
    pub max_residual: f64,
    pub counts: FlagCounts,
    pub attempts: Vec<ProofAttempt>,
    pub cusps: Vec<CuspSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl PipelineReport {
    pub fn new(
        tri: &Triangulation,
        summary: &DetectSummary,
        attempts: Vec<ProofAttempt>,
        distinct: &[(ProofAttempt, CuspCertificate)],
        timings: Option<Timings>,
    ) -> Self {
        let cusps = distinct
            .iter()
            .map(|(a, cert)| {
                let c = cert.c.as_ref().expect("valid certificate has c");
                CuspSummary {
                    triangle: a.triangle,
                    x: cert.state(),
                    lambda: cert.lambda(),
                    r: cert.bounds.as_ref().expect("valid certificate has bounds").r,
                    c_mid: c.mid,
                    c_rad: c.rad,
                    stability: c.stability,
                    certificate: a.certificate.clone(),
                }
            })
            .collect();
        PipelineReport {
            model: tri.model.clone(),
            nodes: tri.nodes.len(),
            simplices: tri.simplices.len(),
            euler_characteristic: tri.euler_characteristic(),
            max_residual: tri.max_residual(),
            counts: summary.counts.clone(),
            attempts,
            cusps,
            timings,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let r: PipelineReport = serde_json::from_str(s).map_err(|e| CliError::Input(format!("report: {e}")))?;
        r.validate()?;
        Ok(r)
    }

    /// Flag counts add up to the simplex count, and every CUSP triangle has
    /// a recorded proof attempt.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.counts;
        if c.cusp + c.no_cusp + c.undetermined != self.simplices {
            return Err(CliError::Input("report: flag counts do not add up to the simplex count".into()));
        }
        let attempted = self.attempts.iter().filter(|a| a.flag == Some(Flag::Cusp)).count();
        if attempted != c.cusp {
            return Err(CliError::Input(format!("report: {} CUSP triangles but {attempted} attempts", c.cusp)));
        }
        Ok(())
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let c = &self.counts;
        let _ = writeln!(s, "model            {}", self.model);
        let _ = writeln!(s, "nodes            {}", self.nodes);
        let _ = writeln!(s, "simplices        {}", self.simplices);
        let _ = writeln!(s, "Euler char.      {}", self.euler_characteristic);
        let _ = writeln!(s, "max residual     {:.1e}", self.max_residual);
        let _ = writeln!(s, "CUSP             {}", c.cusp);
        let _ = writeln!(s, "UNDETERMINED     {}", c.undetermined);
        let _ = writeln!(s, "NO_CUSP          {}", c.no_cusp);
        let valid = self.attempts.iter().filter(|a| a.valid).count();
        let _ = writeln!(s, "proof attempts   {} ({valid} certified)", self.attempts.len());
        let _ = writeln!(s, "distinct cusps   {}", self.cusps.len());
        for (k, cusp) in self.cusps.iter().enumerate() {
            let _ = writeln!(
                s,
                "  [{}] lambda = ({:.15}, {:.15})  r = {:.1e}  c = {:.15e} +- {:.1e}  {}",
                k + 1,
                cusp.lambda[0],
                cusp.lambda[1],
                cusp.r,
                cusp.c_mid,
                cusp.c_rad,
                match cusp.stability {
                    Some(Stability::Stable) => "stable",
                    Some(Stability::Unstable) => "unstable",
                    None => "sign unknown",
                }
            );
        }
        s
    }
}
