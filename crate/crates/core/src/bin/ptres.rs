fn main() {
    std::process::exit(point_resonances::cli::run(std::env::args_os()));
}
