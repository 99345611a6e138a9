use arithdyn::coprime::Rule;
use arithdyn::IntPoly;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

#[derive(Debug, Parser)]
#[command(
    name = "arithdyn",
    version,
    about = "Coprime sequences, private primes and growth certificates from integer polynomial orbits",
    after_help = "Polynomials are given as an expression in x (\"x^2-6x-1\") or as an ascending \
                  coefficient list (\"-1,-6,1\"). Integers in JSON output are decimal strings."
)]
pub struct Cli {
    /// Output format.
    #[arg(long, short = 'o', value_enum, default_value_t = Format::Json, global = true)]
    pub output: Format,

    /// Working precision in bits for interval computations.
    #[arg(long, env = "ARITHDYN_PRECISION", default_value_t = 128, global = true)]
    pub precision: u32,

    /// Trial-division bound used before Pollard rho.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    pub trial_bound: u64,

    /// Total Pollard rho iterations per factorization.
    #[arg(long, default_value_t = 10_000_000, global = true)]
    pub rho_iterations: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Preperiodic,
    Period1,
    Period2,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Rule {
        match r {
            RuleArg::Preperiodic => Rule::Preperiodic,
            RuleArg::Period1 => Rule::Period1,
            RuleArg::Period2 => Rule::Period2,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit x_0, f(x_0), ... and its cycle structure.
    Orbit(OrbitArgs),
    /// Classify the orbit of 0.
    Classify(PolyArg),
    /// Pairwise coprime sequence extracted from an orbit.
    Coprime(SeqArgs),
    /// Coprime sequence plus one private prime per term.
    Primes(PrimesArgs),
    /// Strong divisibility of the orbit of 0, or of an explicit term list.
    Divseq(DivseqArgs),
    /// Certified interval for the growth constant tau.
    Tau(TauArgs),
    /// Truncated series solving f(P(T)) = P(T^d), with optional residuals.
    Series(SeriesArgs),
    /// Mills-type prime chain in nested cube intervals.
    Mills(MillsArgs),
    /// Exhaustive search for exceptional chains x -> y -> d.
    SearchExceptions(SearchArgs),
    /// Classify every small map and check the family list.
    VerifyClassification(VerifyArgs),
}

fn parse_poly(s: &str) -> Result<IntPoly, String> {
    IntPoly::parse(s).map_err(|e| e.to_string())
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("not an integer: {s:?}"))
}

#[derive(Debug, Args)]
pub struct PolyArg {
    /// The map f.
    #[arg(long, short = 'p', value_parser = parse_poly, allow_hyphen_values = true)]
    pub poly: IntPoly,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Starting point x_0.
    #[arg(long, short = 's', value_parser = parse_int, default_value = "0", allow_hyphen_values = true)]
    pub start: BigInt,
    /// Number of terms, x_0 included.
    #[arg(long, short = 'n', default_value_t = 6)]
    pub count: usize,
    /// Iterations scanned for a repeated term.
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Starting point of the wandering orbit.
    #[arg(long, short = 's', value_parser = parse_int, allow_hyphen_values = true)]
    pub start: BigInt,
    /// Number of terms.
    #[arg(long, short = 'n', default_value_t = 6)]
    pub count: usize,
    /// Override the rule picked from the orbit of 0.
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
}

#[derive(Debug, Args)]
pub struct PrimesArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    /// Also report primitive prime divisors of the raw orbit terms x_1..x_count.
    #[arg(long)]
    pub primitive: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["poly", "terms"])))]
pub struct DivseqArgs {
    /// Map whose orbit of 0 is checked.
    #[arg(long, short = 'p', value_parser = parse_poly, allow_hyphen_values = true)]
    pub poly: Option<IntPoly>,
    /// Comma-separated terms x_1, x_2, ... checked instead of an orbit.
    #[arg(long, value_parser = parse_int, value_delimiter = ',', allow_hyphen_values = true)]
    pub terms: Option<Vec<BigInt>>,
    /// Largest index checked.
    #[arg(long, default_value_t = 10)]
    pub upto: usize,
    /// Trace the Euclidean index reduction for gcd(x_M, x_N).
    #[arg(long, num_args = 2, value_names = ["M", "N"], requires = "poly")]
    pub reduce: Option<Vec<usize>>,
    /// Check the gcd growth bound on the orbit of this start instead.
    #[arg(long, value_parser = parse_int, requires = "poly", allow_hyphen_values = true)]
    pub gcd_bound: Option<BigInt>,
    /// Bracketing index for the tau estimates of the gcd bound.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    #[arg(long, short = 's', value_parser = parse_int, allow_hyphen_values = true)]
    pub start: BigInt,
    /// Index whose term brackets tau.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Decimal digits printed for the interval ends.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub poly: PolyArg,
    /// Truncation order: coefficients c_1 down to c_{1-k}.
    #[arg(long, short = 'k', default_value_t = 3)]
    pub k: usize,
    /// Compare the truncation against the orbit of this start.
    #[arg(long, value_parser = parse_int, allow_hyphen_values = true)]
    pub start: Option<BigInt>,
    /// First index of the residual check.
    #[arg(long, default_value_t = 1, requires = "start")]
    pub n_from: usize,
    /// Last index of the residual check.
    #[arg(long, default_value_t = 5, requires = "start")]
    pub n_to: usize,
}

#[derive(Debug, Args)]
pub struct MillsArgs {
    /// First prime p_0.
    #[arg(long, short = 's', value_parser = parse_int, default_value = "2")]
    pub start: BigInt,
    /// Number of primes, p_0 included.
    #[arg(long, short = 'n', default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Largest |a| scanned.
    #[arg(long, default_value_t = 10)]
    pub a_bound: i64,
    /// Largest |x| and |y| scanned.
    #[arg(long, default_value_t = 50)]
    pub x_bound: i64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub coeff_bound: u32,
    #[arg(long, default_value_t = 3)]
    pub degree_bound: u32,
}
