fn main() {
    std::process::exit(pwpn::run(std::env::args().collect()));
}
