//! Experimental-configuration counts and gate-complexity classes.

use serde::{Deserialize, Serialize};

use crate::error::{QptError, Result};

pub const MAX_RESOURCE_QUBITS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "SQPT")]
    Sqpt,
    #[serde(rename = "AAPT_JSM")]
    AaptJsm,
    #[serde(rename = "AAPT_MUB")]
    AaptMub,
    #[serde(rename = "AAPT_POVM")]
    AaptPovm,
    #[serde(rename = "DCQD")]
    Dcqd,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Sqpt, Scheme::AaptJsm, Scheme::AaptMub, Scheme::AaptPovm, Scheme::Dcqd];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sqpt => "SQPT",
            Scheme::AaptJsm => "AAPT_JSM",
            Scheme::AaptMub => "AAPT_MUB",
            Scheme::AaptPovm => "AAPT_POVM",
            Scheme::Dcqd => "DCQD",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = QptError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "sqpt" => Ok(Scheme::Sqpt),
            "aapt_jsm" | "jsm" => Ok(Scheme::AaptJsm),
            "aapt_mub" | "mub" => Ok(Scheme::AaptMub),
            "aapt_povm" | "povm" => Ok(Scheme::AaptPovm),
            "dcqd" => Ok(Scheme::Dcqd),
            other => Err(QptError::Argument(format!("unknown scheme {other:?}"))),
        }
    }
}

/// `settings` measurement settings with `nu` outcomes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NuGroup {
    pub nu: u64,
    pub settings: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceRow {
    pub scheme: Scheme,
    pub hilbert_dim: u64,
    pub n_inputs: u64,
    pub n_meas_per_input: u64,
    pub n_exp: u64,
    pub gates_per_meas: String,
    /// Gate class evaluated at `n` with unit constant; not a physical count.
    pub gates_per_meas_units: u64,
    pub overall: String,
    pub overall_units: u64,
    pub nu: Vec<NuGroup>,
}

impl ResourceRow {
    pub fn nu_label(&self) -> String {
        self.nu.iter().map(|g| format!("{} (x{})", g.nu, g.settings)).collect::<Vec<_>>().join(" + ")
    }
}

pub fn resource_table(n: u32) -> Result<Vec<ResourceRow>> {
    if n == 0 || n > MAX_RESOURCE_QUBITS {
        return Err(QptError::Size(format!("resource table covers 1..={MAX_RESOURCE_QUBITS} qubits, got {n}")));
    }
    let nn = u64::from(n);
    let p4 = 4u64.pow(n);
    let p16 = 16u64.pow(n);
    let p2 = 2u64.pow(n);
    let row = |scheme, hilbert_dim, n_inputs: u64, n_meas: u64, gpm: &str, gpm_u, overall: &str, ov_u, nu| ResourceRow {
        scheme,
        hilbert_dim,
        n_inputs,
        n_meas_per_input: n_meas,
        n_exp: n_inputs * n_meas,
        gates_per_meas: gpm.to_string(),
        gates_per_meas_units: gpm_u,
        overall: overall.to_string(),
        overall_units: ov_u,
        nu,
    };
    Ok(vec![
        row(Scheme::Sqpt, p2, p4, p4, "O(n)", nn, "O(n 16^n)", nn * p16, vec![NuGroup { nu: 1, settings: p4 }]),
        row(Scheme::AaptJsm, p4, 1, p16, "O(n)", nn, "O(n 16^n)", nn * p16, vec![NuGroup { nu: 1, settings: p16 }]),
        row(
            Scheme::AaptMub,
            p4,
            1,
            p4 + 1,
            "O(n^2) [O(n^3) nearest-neighbor]",
            nn * nn,
            "O(n^2 4^n) [O(n^3 4^n) nearest-neighbor]",
            nn * nn * p4,
            vec![NuGroup { nu: p4 - 1, settings: p4 }, NuGroup { nu: p4, settings: 1 }],
        ),
        row(Scheme::AaptPovm, p16, 1, 1, "O(4^{2n})", p16, "O(4^{2n})", p16, vec![NuGroup { nu: p16, settings: 1 }]),
        row(Scheme::Dcqd, p4, p4, 1, "O(n)", nn, "O(n 4^n)", nn * p4, vec![NuGroup { nu: p4, settings: p4 }]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_counts() {
        let t = resource_table(1).unwrap();
        let exp: Vec<u64> = t.iter().map(|r| r.n_exp).collect();
        assert_eq!(exp, vec![16, 16, 5, 1, 4]);
    }

    #[test]
    fn larger_registers() {
        let t3 = resource_table(3).unwrap();
        assert_eq!((t3[0].n_exp, t3[4].n_exp), (4096, 64));
        let t4 = resource_table(4).unwrap();
        assert_eq!((t4[0].n_exp, t4[4].n_exp), (65536, 256));
        assert_eq!(resource_table(2).unwrap()[2].n_exp, 17);
        assert!(resource_table(11).is_err());
    }

    #[test]
    fn mub_outcomes_cover_the_process() {
        for n in 1..=4 {
            let t = resource_table(n).unwrap();
            let total: u64 = t[2].nu.iter().map(|g| g.nu * g.settings).sum();
            // (4^n + 1)(4^n − 1) + 1 = 16^n
            assert_eq!(total, 16u64.pow(n));
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("jsm".parse::<Scheme>().unwrap(), Scheme::AaptJsm);
    }
}
