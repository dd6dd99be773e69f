fn main() {
    std::process::exit(meshfree_ebc::cli::main_with_args(std::env::args_os()));
}
