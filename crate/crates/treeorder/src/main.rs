use std::process::ExitCode;

fn main() -> ExitCode {
    treeorder::cli::run()
}
