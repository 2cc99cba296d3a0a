fn main() {
    std::process::exit(qrep::run());
}
