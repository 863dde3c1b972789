fn main() {
    std::process::exit(kernel_entropy::cli::run(std::env::args_os()));
}
