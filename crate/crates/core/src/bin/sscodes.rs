fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(sscodes::cli::run(std::env::args_os()))
}
