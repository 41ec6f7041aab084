fn main() {
    std::process::exit(channel_select::cli::main_with_args(std::env::args_os()));
}
