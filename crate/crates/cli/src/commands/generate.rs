use std::path::PathBuf;

use eqnn_core::datasets::sample_stream;
use eqnn_core::{DatasetKind, Stream};

use crate::{fsutil, CliError, CliResult};

#[derive(Clone, Debug)]
pub struct GenerateArgs {
    pub dataset: DatasetKind,
    pub n: usize,
    pub seed: u64,
    /// `Train` or `Test`: the same streams a run with this seed draws from.
    pub stream: Stream,
    pub out: PathBuf,
}

/// Samples the dataset, writes `x1,x2,label`, and reports the class balance.
pub fn cmd_generate(args: &GenerateArgs) -> CliResult<String> {
    if !matches!(args.stream, Stream::Train | Stream::Test) {
        return Err(CliError::Config("stream must be train or test".into()));
    }
    let data = sample_stream(args.dataset, args.n, args.seed, args.stream)?;
    fsutil::write_with(&args.out, |buf| data.write_csv(buf))?;
    let [c0, c1] = data.class_counts();
    Ok(format!(
        "wrote {} {} points to {}: class 0 = {c0}, class 1 = {c1} ({:.4} class 1)",
        args.n,
        args.dataset,
        args.out.display(),
        c1 as f64 / args.n as f64
    ))
}
