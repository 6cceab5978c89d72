use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kitaev_cli::{
    curve_from_table, fit_log_slope, read_csv, run_compare, run_scan, write_table, CliError, Method, Parity, Result,
    ScanAxis, ScanRange, ScanSpec, Table,
};
use kitaev_core::entropy::{block_entropy_at, block_entropy_curve_with, entanglement_spectrum, schmidt_spectrum_at};
use kitaev_core::oracle::{ed_ground, full_spectrum_degeneracy, DEGENERACY_TOL};
use kitaev_core::{ground_degeneracy, ground_energy, mode_eigenvalues, ChainParams};

#[derive(Parser)]
#[command(name = "kitaev", version, about = "Ground state and block entanglement of the alternating-bond Kitaev chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Chain {
    /// Ring length, a positive multiple of 4
    #[arg(long, short = 'n')]
    n_sites: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    jx: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    jy: f64,
    /// Transverse field
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    h_field: f64,
}

impl Chain {
    fn params(&self) -> Result<ChainParams> {
        ChainParams::new(self.n_sites, self.jx, self.jy, self.h_field).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact ground energy; optionally per-mode energies and an ED cross-check
    Energy {
        #[command(flatten)]
        chain: Chain,
        /// Print the single-mode energies of every momentum quartet
        #[arg(long)]
        modes: bool,
        /// Also diagonalize exactly (N <= 16)
        #[arg(long)]
        oracle: bool,
    },
    /// Largest eigenvalues of the block reduced density matrix
    Spectrum {
        #[command(flatten)]
        chain: Chain,
        #[arg(long)]
        block_size: usize,
        #[arg(long, default_value_t = 16)]
        top_k: usize,
        #[arg(long, value_enum, default_value_t = Method::Correlation)]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Ground-state degeneracy: closed form and dense diagonalization (N <= 10)
    Degeneracy {
        #[command(flatten)]
        chain: Chain,
        #[arg(long, default_value_t = DEGENERACY_TOL)]
        tol: f64,
    },
    /// Entropy of the first L sites, in bits
    Entropy {
        #[command(flatten)]
        chain: Chain,
        #[arg(long)]
        block_size: usize,
        #[arg(long, value_enum, default_value_t = Method::Correlation)]
        method: Method,
    },
    /// Entropy along one parameter axis, written as CSV
    Scan {
        #[command(flatten)]
        chain: Chain,
        #[arg(long, value_enum)]
        axis: ScanAxis,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Parity::All)]
        parity: Parity,
        /// Block length held fixed on the h_field and jy_over_jx axes
        #[arg(long)]
        block_size: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Correlation)]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fast entropies against exact diagonalization (N <= 14); exit 1 on mismatch
    Compare {
        #[command(flatten)]
        chain: Chain,
        /// Block lengths, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        block_size: Vec<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit E = slope * log2(L) + intercept over a block_len curve
    Fit {
        /// block_len scan CSV; computed from the chain flags when absent
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, short = 'n')]
        n_sites: Option<usize>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        jx: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        jy: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        h_field: f64,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value_t = Parity::Even)]
        parity: Parity,
    },
}

fn emit(table: &Table, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => {
            let mut f = io::BufWriter::new(std::fs::File::create(path)?);
            write_table(&mut f, table)?;
            f.flush()?;
            Ok(())
        }
        None => write_table(io::stdout().lock(), table),
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    let mut out = io::stdout().lock();
    match cmd {
        Command::Energy { chain, modes, oracle } => {
            let p = chain.params()?;
            writeln!(out, "ground_energy = {:.16e}", ground_energy(&p))?;
            if modes {
                let mut t = Table::new(&["q", "eps1", "eps2", "lambda1", "lambda2", "lambda3", "lambda4"], &[false; 7]);
                t.rows = p
                    .mode_momenta()
                    .into_iter()
                    .map(|q| {
                        let m = mode_eigenvalues(&p, q);
                        vec![m.q, m.eps1, m.eps2, m.lambdas[0], m.lambdas[1], m.lambdas[2], m.lambdas[3]]
                    })
                    .collect();
                write_table(&mut out, &t)?;
            }
            if oracle {
                let g = ed_ground(&p).map_err(|e| CliError::Usage(e.to_string()))?;
                writeln!(out, "oracle_energy = {:.16e}", g.energy)?;
                writeln!(out, "difference = {:.3e}", ground_energy(&p) - g.energy)?;
            }
        }
        Command::Spectrum { chain, block_size, top_k, method, output } => {
            let p = chain.params()?;
            let s = schmidt_spectrum_at(&p, block_size, method.into()).map_err(|e| CliError::Usage(e.to_string()))?;
            let spec = entanglement_spectrum(&s, top_k).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut t = Table::new(&["rank", "lambda"], &[true, false]);
            t.rows = spec.lambdas.iter().enumerate().map(|(i, &l)| vec![(i + 1) as f64, l]).collect();
            emit(&t, output.as_ref())?;
            eprintln!("captured weight {:.16e}", spec.total_captured);
        }
        Command::Degeneracy { chain, tol } => {
            let p = chain.params()?;
            if p.h_field() == 0.0 {
                writeln!(out, "closed_form_even = {}", ground_degeneracy(p.n_sites())?)?;
            } else {
                writeln!(out, "closed_form_even = 1")?;
            }
            let d = full_spectrum_degeneracy(&p, tol).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "ground_energy = {:.16e}", d.ground_energy)?;
            writeln!(out, "even = {}", d.even)?;
            writeln!(out, "odd = {}", d.odd)?;
            writeln!(out, "total = {}", d.total)?;
        }
        Command::Entropy { chain, block_size, method } => {
            let p = chain.params()?;
            let e = block_entropy_at(&p, block_size, method.into()).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "{e:.16e}")?;
        }
        Command::Scan { chain, axis, from, to, step, parity, block_size, method, output } => {
            let spec = ScanSpec {
                axis,
                params: chain.params()?,
                range: ScanRange::Stepped { start: from, stop: to, step },
                parity,
                block_len: block_size,
                method: method.into(),
            };
            match output {
                Some(path) => {
                    run_scan(&spec, &path)?;
                }
                None => {
                    spec.validate()?;
                    let rows = kitaev_cli::compute_scan(&spec)?;
                    write_table(&mut out, &kitaev_cli::scan_table(&spec, &rows))?;
                }
            }
        }
        Command::Compare { chain, block_size, output } => {
            let report = run_compare(&chain.params()?, &block_size, output.as_deref())?;
            eprintln!("max_abs_diff = {:.3e}", report.max_abs_diff());
            eprintln!("energy_mismatch = {:.3e}", report.energy_mismatch);
            if report.degenerate {
                eprintln!("warning: h = 0, ground state is degenerate; differences are not meaningful");
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Fit { input, n_sites, jx, jy, h_field, from, to, parity } => {
            let curve = match (input, n_sites) {
                (Some(path), _) => curve_from_table(&read_csv(&path)?)?,
                (None, Some(n)) => {
                    let p = Chain { n_sites: n, jx, jy, h_field }.params()?;
                    if to >= n {
                        return Err(CliError::Usage(format!("fit window must end below N = {n}")));
                    }
                    let lens: Vec<usize> = (from.max(1)..=to).filter(|&l| parity.admits(l)).collect();
                    block_entropy_curve_with(&p, &lens, Method::Correlation.into())?
                }
                (None, None) => return Err(CliError::Usage("fit needs --input or --n-sites".into())),
            };
            let f = fit_log_slope(&curve, (from, to), parity)?;
            writeln!(out, "slope = {:.16e}", f.slope)?;
            writeln!(out, "intercept = {:.16e}", f.intercept)?;
            writeln!(out, "r_squared = {:.16e}", f.r_squared)?;
            writeln!(out, "points = {}", f.points)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
