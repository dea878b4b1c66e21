fn main() {
    std::process::exit(gsv_core::cli::run(std::env::args_os()));
}
