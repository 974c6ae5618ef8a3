fn main() {
    std::process::exit(torasc::run());
}
