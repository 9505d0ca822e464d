fn main() {
    std::process::exit(cc_sparsify::experiments::cli_main(std::env::args_os()));
}
