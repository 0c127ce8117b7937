//! One module per subcommand family; each function resolves its config,
//! runs the library, writes artifacts, and ends with a run manifest.

pub mod data;
pub mod experiment;
pub mod model;

use std::path::Path;

/// Paths in config echoes are rendered as given on the command line.
pub fn display(path: &Path) -> String {
    path.display().to_string()
}
