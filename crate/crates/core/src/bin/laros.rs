fn main() -> std::process::ExitCode {
    laros::cli::run(std::env::args_os())
}
