fn main() {
    std::process::exit(goe_core::cli::dispatch(std::env::args_os()));
}
