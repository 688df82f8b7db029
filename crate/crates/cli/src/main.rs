use std::io::Write;

fn main() {
    let r = grzlab_cli::run(std::env::args_os());
    print!("{}", r.stdout);
    eprint!("{}", r.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(r.code);
}
