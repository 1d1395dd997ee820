use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use h3nr::classfield::LocalData;
use h3nr::cohomres::{cohomology_group, cup_coker_2_2_4, Resolution};
use h3nr::decomp::dec_generators;
use h3nr::glattice::{flasque_resolution, norm_one_lattice, regular_lattice, sym2, GLattice};
use h3nr::groups::{parse_group_spec, FinAbGroup, Group};
use h3nr::h3nr::{brauer_nr, unramified_h3, verify_all, Arithmetic, GroupJson, H3Report, VerifyOptions, VerifyReport};
use h3nr::Error;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "h3nr", version, about = "Unramified cohomology of norm-one tori of abelian extensions")]
struct Cli {
    /// Output format; JSON is stable, text is for reading.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Cokernel of the cup product H2(G,Z) x H2(G,Z) -> H4(G,Z).
    CupCoker {
        #[arg(long, value_parser = parse_group)]
        group: FinAbGroup,
    },
    /// Unramified H3 of the norm-one torus, by odd primary parts.
    H3nr {
        #[arg(long, value_parser = parse_group)]
        group: FinAbGroup,
        /// Local degrees as JSON, e.g. '{"n":9,"local_degrees":[3,3]}'.
        #[arg(long, conflicts_with = "h3")]
        local: Option<String>,
        /// H3(G,K*) given directly by its cyclic factors, e.g. 3 or 3,3.
        #[arg(long, value_parser = parse_group)]
        h3: Option<FinAbGroup>,
    },
    /// Group cohomology H^d(G, L) for one of the standard lattices.
    Cohomology {
        #[arg(long, value_parser = parse_group)]
        group: FinAbGroup,
        #[arg(long, value_enum)]
        coeff: Coeff,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
        degree: u8,
    },
    /// S2(T)^G / Dec for the flasque lattice T.
    Dec {
        #[arg(long, value_parser = parse_group)]
        group: FinAbGroup,
    },
    /// Run the consistency checks over all abelian groups up to an order.
    Verify {
        #[arg(long)]
        max_order: u64,
        /// Also run the group-independent checks on S3, D4, Q8 and A4.
        #[arg(long)]
        include_table_groups: bool,
        /// Corrupt the N-sequence before checking it (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Unramified Brauer group H1(G, T), cross-checked against Sha2(G, W).
    Brauer {
        #[arg(long, value_parser = parse_group)]
        group: FinAbGroup,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coeff {
    NormOne,
    Regular,
    #[value(name = "flasque-T")]
    FlasqueT,
    #[value(name = "sym2-T")]
    Sym2T,
}

impl Coeff {
    fn name(self) -> &'static str {
        match self {
            Coeff::NormOne => "norm-one",
            Coeff::Regular => "regular",
            Coeff::FlasqueT => "flasque-T",
            Coeff::Sym2T => "sym2-T",
        }
    }
}

#[derive(Serialize)]
struct CohomologyOut<'a> {
    group: &'a [u64],
    coeff: &'static str,
    lattice_rank: usize,
    degree: usize,
    cohomology: GroupJson,
}

#[derive(Serialize)]
struct DecOut<'a> {
    group: &'a [u64],
    lattice_rank: usize,
    invariant_rank: usize,
    generators: usize,
    quotient: GroupJson,
}

#[derive(Serialize)]
struct BrauerOut<'a> {
    group: &'a [u64],
    brauer: GroupJson,
}

fn parse_group(s: &str) -> Result<FinAbGroup, String> {
    parse_group_spec(s).map_err(|e| e.to_string())
}

enum Failure {
    Invalid(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Verification(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}

fn emit(format: Format, value: &impl Serialize, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(value).expect("serializable output")),
        Format::Text => println!("{}", text()),
    }
}

fn factors(g: &FinAbGroup) -> String {
    let f = g.invariant_factors();
    if f.is_empty() {
        "trivial group".into()
    } else {
        f.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" + ")
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::CupCoker { group } => {
            let c = cup_coker_2_2_4(group)?;
            emit(fmt, &GroupJson::from(&c), || format!("coker(H2 x H2 -> H4) for {} = {c}", factors(group)));
        }
        Command::H3nr { group, local, h3 } => {
            let arithmetic = match (local, h3) {
                (Some(s), _) => Arithmetic::Local(LocalData::from_json(s)?),
                (None, Some(a)) => Arithmetic::Supplied(a.to_fg()),
                (None, None) => Arithmetic::Omitted,
            };
            let report = unramified_h3(group, &arithmetic)?;
            emit(fmt, &report, || report_text(&report));
        }
        Command::Cohomology { group, coeff, degree } => {
            let g = Arc::new(Group::abelian(group)?);
            let lattice = coefficient_lattice(&g, *coeff)?;
            let d = *degree as usize;
            let res = Resolution::product(&g, d + 1)?;
            let h = cohomology_group(&res, &lattice, d)?;
            let out = CohomologyOut {
                group: group.invariant_factors(),
                coeff: coeff.name(),
                lattice_rank: lattice.rank(),
                degree: d,
                cohomology: GroupJson::from(&h),
            };
            emit(fmt, &out, || format!("H^{d}({}, {}) = {h}", factors(group), coeff.name()));
        }
        Command::Dec { group } => {
            let g = Arc::new(Group::abelian(group)?);
            let fr = flasque_resolution(&g)?;
            let dec = dec_generators(fr.t())?;
            let q = dec.quotient();
            let out = DecOut {
                group: group.invariant_factors(),
                lattice_rank: fr.t().rank(),
                invariant_rank: dec.invariant_rank(),
                generators: dec.generator_count(),
                quotient: GroupJson::from(&q),
            };
            emit(fmt, &out, || format!("S2(T)^G / Dec for {} = {q}", factors(group)));
        }
        Command::Verify {
            max_order,
            include_table_groups,
            inject_fault,
        } => {
            let report = verify_all(&VerifyOptions {
                max_order: *max_order,
                include_table_groups: *include_table_groups,
                inject_fault: *inject_fault,
            });
            emit(fmt, &report, || verify_text(&report));
            if !report.all_passed {
                return Ok(ExitCode::from(EXIT_VERIFICATION));
            }
        }
        Command::Brauer { group } => {
            let b = brauer_nr(group)?;
            let out = BrauerOut {
                group: group.invariant_factors(),
                brauer: GroupJson::from(&b),
            };
            emit(fmt, &out, || format!("unramified Brauer group for {} = {b}", factors(group)));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn coefficient_lattice(g: &Arc<Group>, coeff: Coeff) -> Result<GLattice, Error> {
    Ok(match coeff {
        Coeff::NormOne => norm_one_lattice(g)?.0,
        Coeff::Regular => regular_lattice(g),
        Coeff::FlasqueT => flasque_resolution(g)?.t().clone(),
        Coeff::Sym2T => sym2(flasque_resolution(g)?.t()),
    })
}

fn report_text(r: &H3Report) -> String {
    let mut lines = vec![format!(
        "G = {} (order {}), arithmetic summand: {}",
        r.group.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" + "),
        r.order,
        serde_json::to_value(r.arithmetic_source).expect("serializable").as_str().unwrap_or("?"),
    )];
    for p in &r.p_parts {
        lines.push(format!("  {}-part: {}", p.p, p.summand.expression));
    }
    match &r.full {
        Some(full) => lines.push(format!("  whole group: {}", full.expression)),
        None => lines.push(format!("  2-part: {}", r.two_part_status)),
    }
    lines.join("\n")
}

fn verify_text(r: &VerifyReport) -> String {
    let mut lines: Vec<String> = r
        .cells
        .iter()
        .map(|c| {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            format!("{mark} {:<28} {:<10} {}", c.check, c.group, c.detail)
        })
        .collect();
    lines.push(format!("{} passed, {} failed", r.passed, r.failed));
    lines.join("\n")
}
