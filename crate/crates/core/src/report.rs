use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// The computed answer disagrees with a stated closed form that is itself
    /// internally inconsistent; reported, not treated as a bug.
    Deviation,
    Fail,
}

/// One named identity and its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub axiom: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(axiom: impl Into<String>) -> Check {
        Check { axiom: axiom.into(), status: Status::Pass, witness: None }
    }

    /// A passing check that still carries a witness (e.g. a noncommutativity example).
    pub fn pass_with(axiom: impl Into<String>, witness: impl Into<String>) -> Check {
        Check { axiom: axiom.into(), status: Status::Pass, witness: Some(witness.into()) }
    }

    pub fn fail(axiom: impl Into<String>, witness: impl Into<String>) -> Check {
        Check { axiom: axiom.into(), status: Status::Fail, witness: Some(witness.into()) }
    }

    pub fn deviation(axiom: impl Into<String>, witness: impl Into<String>) -> Check {
        Check { axiom: axiom.into(), status: Status::Deviation, witness: Some(witness.into()) }
    }

    /// Pass when `witness` is `None`, fail with it otherwise.
    pub fn from_witness(axiom: impl Into<String>, witness: Option<String>) -> Check {
        match witness {
            None => Check::pass(axiom),
            Some(w) => Check::fail(axiom, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Worst status in a list; `Pass` for an empty list.
pub fn overall(checks: &[Check]) -> Status {
    checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
}
