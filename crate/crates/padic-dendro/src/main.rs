use std::process::ExitCode;

fn main() -> ExitCode {
    padic_dendro::cli::main()
}
