use std::process::ExitCode;

use clap::Parser;
use uavbeam_cli::{run, Cli, CliError, Output};

fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            print!("{}", out.report);
            for f in &out.files {
                let path = dir.join(&f.name);
                std::fs::write(&path, &f.contents)?;
                println!("wrote {}", path.display());
            }
        }
        None if out.files_are_primary => {
            eprint!("{}", out.report);
            for f in &out.files {
                print!("{}", f.contents);
            }
        }
        None => print!("{}", out.report),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|out| {
        emit(&cli, &out)?;
        out.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
