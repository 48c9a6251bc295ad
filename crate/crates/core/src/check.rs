//! Residual records shared by every verification routine.

use rug::Float;

/// One identity compared numerically: `|lhs - rhs| <= tolerance`.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub id: String,
    pub description: String,
    pub lhs: Float,
    pub rhs: Float,
    pub residual: Float,
    pub tolerance: Float,
    pub pass: bool,
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn compare(
        id: impl Into<String>,
        description: impl Into<String>,
        lhs: Float,
        rhs: Float,
        tolerance: Float,
    ) -> Self {
        let prec = lhs.prec().max(rhs.prec());
        let residual = Float::with_val(prec, &lhs - &rhs).abs();
        let pass = residual.is_finite() && residual <= tolerance;
        IdentityCheck {
            id: id.into(),
            description: description.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Record for a check that could not be evaluated.
    pub fn failed(id: impl Into<String>, description: impl Into<String>, note: String) -> Self {
        let nan = Float::with_val(64, rug::float::Special::Nan);
        IdentityCheck {
            id: id.into(),
            description: description.into(),
            lhs: nan.clone(),
            rhs: nan.clone(),
            residual: nan,
            tolerance: Float::new(64),
            pass: false,
            note: Some(note),
        }
    }
}

/// Passes iff every record passes (and there is at least one).
pub fn all_pass(checks: &[IdentityCheck]) -> bool {
    !checks.is_empty() && checks.iter().all(|c| c.pass)
}
