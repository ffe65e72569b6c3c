use std::process::ExitCode;

use multicascade::cli;

fn main() -> ExitCode {
    let cfg = match cli::parse_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => return exit_with(&e),
    };
    let threads = match cli::thread_cap() {
        Ok(t) => t,
        Err(e) => return exit_with(&e),
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match cli::execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn exit_with(e: &cli::ConfigError) -> ExitCode {
    let code = e.exit_code();
    if code == 0 {
        print!("{e}");
    } else {
        eprint!("{e}");
        if !e.to_string().ends_with('\n') {
            eprintln!();
        }
    }
    ExitCode::from(code as u8)
}
