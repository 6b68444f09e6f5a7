fn main() {
    std::process::exit(k3degen::run(std::env::args()));
}
