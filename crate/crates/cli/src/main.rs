use std::process::ExitCode;

fn main() -> ExitCode {
    match csme_cli::run(std::env::args_os()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match e.downcast_ref::<clap::Error>() {
                Some(ce) if !ce.use_stderr() => {
                    // --help and --version
                    print!("{ce}");
                    return ExitCode::SUCCESS;
                }
                Some(ce) => eprint!("{ce}"),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::FAILURE
        }
    }
}
