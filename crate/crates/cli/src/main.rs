fn main() {
    std::process::exit(ris_cli::runner::main_entry());
}
