fn main() {
    std::process::exit(lorentz_bounds::cli::run(std::env::args_os()));
}
