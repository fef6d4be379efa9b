mod args;
mod commands;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::{Cli, Format};
use commands::Rows;

#[derive(Serialize)]
struct Meta<'a> {
    version: &'static str,
    config: &'a Cli,
}

#[derive(Serialize)]
struct Report<'a, T> {
    meta: Meta<'a>,
    data: &'a [T],
}

fn write_rows<T: Serialize>(cli: &Cli, rows: &[T], out: &mut dyn Write) -> io::Result<()> {
    match cli.format {
        Format::Json => {
            let report = Report {
                meta: Meta {
                    version: env!("CARGO_PKG_VERSION"),
                    config: cli,
                },
                data: rows,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()
        }
    }
}

fn emit(cli: &Cli, rows: &Rows) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match rows {
        Rows::Roots(r) => write_rows(cli, r, &mut out),
        Rows::Spectrum(r) => write_rows(cli, r, &mut out),
        Rows::Energy(r) => write_rows(cli, r, &mut out),
        Rows::Limit(r) => write_rows(cli, r, &mut out),
        Rows::Calibration(r) => write_rows(cli, r, &mut out),
        Rows::Ebar(r) => write_rows(cli, r, &mut out),
    }?;
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let rows = match commands::run(&cli.command, cli.quad_tol) {
        Ok(rows) => rows,
        Err(e) if e.is_usage() => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            let diagnostic = serde_json::json!({
                "error": {
                    "kind": e.kind(),
                    "message": e.to_string(),
                    "config": &cli,
                }
            });
            eprintln!("{diagnostic}");
            return ExitCode::from(2);
        }
    };

    if let Err(e) = emit(&cli, &rows) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
