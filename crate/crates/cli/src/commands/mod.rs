//! One function per subcommand. Each returns a short human-readable summary
//! and leaves its artifacts on disk.

mod generate;
mod plot;
mod sweep;
mod table1;
mod train;
mod verify;

pub use generate::{cmd_generate, GenerateArgs};
pub use plot::{cmd_plot, PlotArgs, PlotKind};
pub use sweep::{aggregate, cmd_sweep, run_cells, CellResult, SweepRow};
pub use table1::{cmd_table1, Table1Args};
pub use train::{cmd_train, TrainSummary};
pub use verify::{cmd_verify, VerifyArgs};
