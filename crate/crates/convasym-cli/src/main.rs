use std::process::ExitCode;

use clap::Parser;
use convasym_cli::commands::{self, Cli, CliError, Command, Format, OutputArgs};
use convasym_cli::record::OutputRecord;
use convasym_cli::verify;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Conv(args) => emit(commands::cmd_conv(args)?, &args.output),
        Command::Rate(args) => emit(commands::cmd_rate(args)?, &args.output),
        Command::Saddle(args) => emit(commands::cmd_saddle(args)?, &args.output),
        Command::Sample(args) => emit(commands::cmd_sample(args)?, &args.output),
        Command::Verify(args) => {
            let (rec, failed) = verify::cmd_verify(args)?;
            emit(rec, &args.output)?;
            if failed > 0 {
                return Err(CliError::Verification(failed));
            }
            Ok(())
        }
    }
}

fn emit(rec: OutputRecord, out: &OutputArgs) -> Result<(), CliError> {
    let text = match out.format {
        Format::Csv => rec.to_csv(),
        Format::Json => rec.to_json(),
    };
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
