fn main() {
    std::process::exit(voiceguard::cli::main_entry());
}
