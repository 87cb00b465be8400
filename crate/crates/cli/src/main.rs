fn main() {
    std::process::exit(roadtopo_cli::run(std::env::args_os()));
}
