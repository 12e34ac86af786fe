fn main() {
    std::process::exit(wishfade_cli::run(std::env::args_os()));
}
