fn main() {
    std::process::exit(furstenberg::cli::main_entry());
}
