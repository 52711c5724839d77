use std::io::Write;

fn main() {
    let out = lbq_cli::cli::execute(std::env::args_os());
    let _ = if out.usage {
        std::io::stderr().write_all(out.output.as_bytes())
    } else {
        std::io::stdout().write_all(out.output.as_bytes())
    };
    std::process::exit(out.code);
}
