use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "growthcalc", version, about = "Legendre-transform calculus for growth functions")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Reuse reports stored under this directory when the arguments match.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Registry of named functions (TOML or JSON), merged over the built-in one.
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    /// Tolerance override for verification verdicts.
    #[arg(long, global = true, env = "GROWTHCALC_TOL")]
    pub tol: Option<f64>,
    /// Significant digits kept in reported numbers.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub digits: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weight sequences α(n) and their conditions.
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Growth functions u(r).
    #[command(name = "fn", subcommand)]
    Func(FnCommand),
    /// Legendre transform ℓ_u(t) = inf_{r>0} u(r)/r^t.
    Ell {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Dual Legendre function u*(r) = sup_{s>0} exp(2√(rs))/u(s).
    Dual {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// L-function L_u(r) = Σ ℓ_u(n) rⁿ.
    Lfn {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// L#-function L#_u(r) = Σ rⁿ / (ℓ_u(n) (n!)²).
    Lsharp {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Inverse Legendre transform θ_f(r) = sup_{t≥0} f(t) r^t of f = ℓ_u, next to u(r).
    Theta {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Equivalence c₁u(a₁r) ≤ v(r) ≤ c₂u(a₂r) of two functions.
    Equiv {
        /// Registry name or inline JSON family spec.
        #[arg(long)]
        u: String,
        /// Registry name or inline JSON family spec.
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 0.0)]
        r_min: f64,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
    },
    /// Run a verification suite for an inequality or identity of the calculus.
    Verify(VerifyArgs),
    /// Chaos polynomials on a nuclear scale.
    #[command(subcommand)]
    Holo(HoloCommand),
}

#[derive(Subcommand, Debug)]
pub enum SeqCommand {
    /// Generate Bell numbers of order k or the power-factorial sequence (n!)^β.
    Gen {
        #[command(flatten)]
        s: SeqGenArgs,
    },
    /// Check the growth and shape conditions on α(n).
    Check {
        #[command(flatten)]
        s: SeqSource,
        /// Condition to check (A1, A2, A2~, B1, B1~, B2, B2~, B3, C1, C2, C3); all when omitted.
        #[arg(long = "condition")]
        conditions: Vec<String>,
        /// Largest log-radius searched by the infimum conditions.
        #[arg(long, default_value_t = 50.0)]
        search_cap: f64,
    },
    /// Equivalence K₁c₁ⁿa(n) ≤ b(n) ≤ K₂c₂ⁿa(n) of two sequence files.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SeqGenArgs {
    /// bell or power-factorial.
    #[arg(long)]
    pub family: String,
    /// Bell order k.
    #[arg(long)]
    pub order: Option<u32>,
    /// Power-factorial exponent β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Largest index N.
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SeqSource {
    /// Sequence file; otherwise generated from --family.
    #[arg(long, conflicts_with = "family")]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum FnCommand {
    /// Evaluate log u(r).
    Eval {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        at: PointArgs,
    },
    /// Log-convexity variants, monotonicity and growth class of u.
    Classify {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value_t = 1e-6)]
        r_min: f64,
        #[arg(long, default_value_t = 1e6)]
        r_max: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
    },
}

/// A growth function: a built-in family with its parameters, or a registry name.
#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// ks, ksgen, expk, exp-poly, log-quadratic, power, series, or a registry name.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Iteration count for expk.
    #[arg(long)]
    pub k: Option<u32>,
    /// Exponent coefficients c₀,c₁,… for exp-poly.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// Log-quadratic coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub qa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub qb: Option<f64>,
    /// Power family (c + r)^p.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Sequence file for series.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// plain (Σ α(n) rⁿ), g-alpha (Σ α(n) rⁿ/n!) or g-inv-alpha (Σ rⁿ/(n! α(n))).
    #[arg(long, default_value = "plain")]
    pub kind: String,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Single evaluation point.
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Single radius.
    #[arg(long, conflicts_with_all = ["grid", "t"])]
    pub r: Option<f64>,
    /// Grid lo,hi,points (geometric for radii, linear for t).
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    pub suite: String,
    /// Function under test; each suite has a default.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Dilation a for the upper bound suite.
    #[arg(long)]
    pub a: Option<f64>,
    /// Convexity exponent k; detected when omitted.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Probe range lo,hi.
    #[arg(long, value_delimiter = ',')]
    pub range: Vec<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum HoloCommand {
    /// Norm embeddings, coefficient bounds and pointwise bounds for a chaos polynomial.
    Check(HoloArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoloCheck {
    /// ‖F‖_{u,q} ≤ (1 − e²‖i_{p,q}‖²_HS)^{-1/2} |||F|||_{u,p}
    KByG,
    /// |||F|||_{u,p-1} ≤ √e (2ρ² log 1/ρ)^{-1/2} ‖F‖_{u,p}
    GByK,
    /// |f_n|_q² ≤ K² (a e² ‖i_{p,q}‖²_HS)ⁿ ℓ_u(n)
    CoeffBound,
    /// |F(ξ)| ≤ √2 e K u(2e a² |ξ|²_{-p})^{1/2} at random ξ
    Pointwise,
    All,
}

#[derive(Args, Debug)]
pub struct HoloArgs {
    #[arg(long, value_enum, default_value_t = HoloCheck::All)]
    pub check: HoloCheck,
    /// Growth function: ks, ksgen, expk, or a registry name.
    #[arg(long, default_value = "ks")]
    pub family: String,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Chaos polynomial file; a seeded random one when omitted.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Scale eigenvalues λ_j.
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0])]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 2)]
    pub p: i32,
    #[arg(long, default_value_t = 0)]
    pub q: i32,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Coefficient constant K; measured and inflated when omitted.
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 16)]
    pub multistart: usize,
    /// Also check the series and level-shift bounds pointwise.
    #[arg(long)]
    pub series: bool,
}
