use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use levilu_bench::cli::ReportFormat;
use levilu_bench::{report_exit_code, run_pipeline, Args, BenchError, BenchReport};

fn write_report(report: &BenchReport, args: &Args) -> Result<(), BenchError> {
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| BenchError::Output(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    match args.report {
        ReportFormat::Json => {
            report
                .write_json(&mut out)
                .map_err(|e| BenchError::Output(e.to_string()))?;
            writeln!(out).map_err(|e| BenchError::Output(e.to_string()))?;
        }
        ReportFormat::Csv => report
            .write_csv(&mut out)
            .map_err(|e| BenchError::Output(e.to_string()))?,
    }
    out.flush().map_err(|e| BenchError::Output(e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = run_pipeline(&args).and_then(|report| {
        write_report(&report, &args)?;
        Ok(report)
    });
    let code = match result {
        Ok(report) => {
            let code = report_exit_code(&report, args.require_convergence);
            if !report.determinism.digests_match {
                eprintln!("error: factor digests differ across worker counts");
            } else if code != 0 {
                eprintln!("error: the Krylov solve did not converge");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
