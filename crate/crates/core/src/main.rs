fn main() {
    std::process::exit(porous_channel::cli::main_exit());
}
