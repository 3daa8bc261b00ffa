fn main() {
    match spex::cli::run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_budget() { 2 } else { 1 });
        }
    }
}
