fn main() {
    std::process::exit(pipeflow::cli_dispatch(std::env::args_os()));
}
