fn main() {
    std::process::exit(jch::main_with(std::env::args_os()));
}
