fn main() {
    std::process::exit(meddialog_cli::run(std::env::args_os()));
}
