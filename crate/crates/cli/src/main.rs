fn main() {
    std::process::exit(jastrow1d_cli::run(std::env::args_os()));
}
