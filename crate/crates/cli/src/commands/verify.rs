use std::fmt::Write as _;

use eqnn_core::verify::{auc_suite, gradient_suite, symmetry_suite, SuiteReport};

use crate::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    pub seed: u64,
    /// Random configurations per model family in the gradient suite.
    pub gradient_configs: usize,
    pub auc_instances: usize,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        VerifyArgs {
            seed: 0,
            gradient_configs: 50,
            auc_instances: 100,
        }
    }
}

/// Runs the symmetry, gradient and AUC suites. The report lists every
/// check; any failure turns into [`CliError::VerificationFailed`] after the
/// report has been handed to `emit`.
pub fn cmd_verify(args: &VerifyArgs, emit: &mut dyn FnMut(&str)) -> CliResult<SuiteReport> {
    let mut report = SuiteReport::default();
    for (name, suite) in [
        ("symmetry", symmetry_suite(args.seed)?),
        (
            "gradients",
            gradient_suite(args.seed, args.gradient_configs)?,
        ),
        ("auc", auc_suite(args.seed, args.auc_instances)?),
    ] {
        let mut text = String::new();
        writeln!(text, "[{name}]").unwrap();
        for c in &suite.checks {
            let relation = if c.expect_mismatch { ">" } else { "<=" };
            writeln!(
                text,
                "  {}  {}  (deviation {:.3e} {relation} {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.deviation,
                c.tolerance
            )
            .unwrap();
        }
        emit(&text);
        report.extend(suite);
    }
    let failed = report.failures().count();
    let total = report.checks.len();
    emit(&format!("{} of {total} checks passed", total - failed));
    if failed > 0 {
        return Err(CliError::VerificationFailed { failed, total });
    }
    Ok(report)
}
