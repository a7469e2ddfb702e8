//! Command-line front end: parses arguments, reads the input document(s),
//! delegates to [`tvbkit::cli::run`] and prints the report.

use clap::{Parser, Subcommand};
use tvbkit::cli::{run, CommandOptions};

#[derive(Parser)]
#[command(name = "tvbkit", about = "Exact positivity computations for toric vector bundles")]
struct Cli {
    /// Emit the report as stable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Proceed even when no certificate backs the computation.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the bundle data and print the divisor class basis.
    Validate { file: String },
    /// Report sparsity, uniformity, monomiality and the CI test.
    Classify { file: String },
    /// Effective monoid generators and the pseudo-effective cone.
    Eff {
        file: String,
        /// Optional class "a1,...,ad;b" to test for (pseudo-)effectivity.
        #[arg(long)]
        class: Option<String>,
    },
    /// Nef cone; with --class also nefness and ampleness of that class.
    Nef {
        file: String,
        #[arg(long)]
        class: Option<String>,
    },
    /// Basepoint-freeness of a class, with failing sites on failure.
    Bpf {
        file: String,
        #[arg(long)]
        class: String,
    },
    /// Hilbert basis of the nef cone.
    HilbertNef { file: String },
    /// Nef Hilbert basis elements that are not basepoint-free.
    FujitaScan { file: String },
    /// Newton-Okounkov data for a full flag given as an ordered basis.
    Nobody {
        file: String,
        /// Ordered basis "i1,i2,..." of the matroid defining the flag.
        #[arg(long)]
        flag: String,
        #[arg(long)]
        class: Option<String>,
    },
    /// Anticanonical class of a complete-intersection Cox ring.
    Anticanonical { file: String },
    /// Validate and classify a diagonal (Kaneyama-type) bundle.
    Kaneyama { file: String },
    /// Emit tangent-bundle data for the fan in the document.
    Tangent { file: String },
    /// Compare the bundle with an extension candidate.
    Extend {
        file: String,
        /// Document describing the extension bundle.
        #[arg(long)]
        with: String,
    },
}

fn read(path: &str) -> String {
    match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            std::process::exit(1);
        }
    }
}

fn main() {
    if let Ok(threads) = std::env::var("TVBKIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let mut opts = CommandOptions { force: cli.force, ..Default::default() };
    let (name, file) = match &cli.command {
        Command::Validate { file } => ("validate", file),
        Command::Classify { file } => ("classify", file),
        Command::Eff { file, class } => {
            opts.class = class.clone();
            ("eff", file)
        }
        Command::Nef { file, class } => {
            opts.class = class.clone();
            ("nef", file)
        }
        Command::Bpf { file, class } => {
            opts.class = Some(class.clone());
            ("bpf", file)
        }
        Command::HilbertNef { file } => ("hilbert-nef", file),
        Command::FujitaScan { file } => ("fujita-scan", file),
        Command::Nobody { file, flag, class } => {
            opts.flag = Some(flag.clone());
            opts.class = class.clone();
            ("nobody", file)
        }
        Command::Anticanonical { file } => ("anticanonical", file),
        Command::Kaneyama { file } => ("kaneyama", file),
        Command::Tangent { file } => ("tangent", file),
        Command::Extend { file, with } => {
            opts.with_document = Some(read(with));
            ("extend", file)
        }
    };
    let text = read(file);
    match run(name, &text, &opts) {
        Ok(outcome) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&outcome.json).unwrap());
            } else {
                print!("{}", outcome.text);
            }
            std::process::exit(outcome.exit);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
