fn main() {
    env_logger::init();
    std::process::exit(resonance_bvp::cli::main_with_args(std::env::args_os()));
}
