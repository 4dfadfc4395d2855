use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clusterforge::bounds::{check_independence, diffcomb_check, upper_bound_member, Generators};
use clusterforge::coxeter::CartanData;
use clusterforge::double_bruhat::{
    build_btilde, build_gamma_tilde, sl3_closed_forms, tp_criterion_check, verify_cell_identities, BruhatError, DoubleWord,
    IndexedWord,
};
use clusterforge::graphs::{acyclic_order, classify_finite_type, explore_exchange_graph, gamma};
use clusterforge::poly::{LaurentPoly, PolyJson, RatFunc};
use clusterforge::seeds::{matrix_from_json, ExchangeMatrix, Seed, SeedJson};
use clusterforge::tropical::{delta_witness, not_in_lower_bound_certificate, propagate_valuation, Valuation};
use serde_json::{json, Value};

type Error = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "clusterforge", version, about = "Exact computations with cluster-algebra seeds and double Bruhat cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate a seed along a sequence of directions.
    Mutate {
        #[command(flatten)]
        source: SeedSource,
        /// Directions, 1-based, comma or space separated.
        #[arg(long)]
        sequence: String,
    },
    /// Test whether the graph of the principal part has no oriented cycle.
    Acyclic {
        #[command(flatten)]
        source: SeedSource,
    },
    /// Classify the mutation class of the diagram as finite or infinite type.
    Classify {
        #[command(flatten)]
        source: SeedSource,
        #[arg(long, default_value_t = 100_000)]
        node_cap: usize,
    },
    /// Explore the exchange graph breadth first.
    Explore {
        #[command(flatten)]
        source: SeedSource,
        #[arg(long, default_value_t = 100_000)]
        max_seeds: usize,
    },
    /// Extended exchange matrix of a double reduced word.
    Btilde {
        #[arg(long = "type")]
        cartan: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Print only the DOT graph.
        #[arg(long)]
        dot: bool,
    },
    /// Check exchange relations among minors on sampled cell elements.
    VerifyCell {
        #[arg(long = "type")]
        cartan: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Check the positivity criterion on sampled totally positive elements.
    TpCheck {
        #[arg(long = "type")]
        cartan: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Number of clusters, reached breadth first, whose variables are tested.
        #[arg(long, default_value_t = 10)]
        clusters: usize,
    },
    /// Rewrite a polynomial in x_j, x'_j into standard monomials.
    Straighten {
        #[command(flatten)]
        source: SeedSource,
        /// Polynomial JSON over the labels, the primed labels and the frozen labels.
        #[arg(long)]
        poly: String,
    },
    /// Decide membership in the upper bound with divisibility certificates.
    UpperMember {
        #[command(flatten)]
        source: SeedSource,
        /// Numerator as polynomial JSON over the seed labels.
        #[arg(long)]
        poly: String,
        #[arg(long)]
        denominator: Option<String>,
    },
    /// Tropical valuations on the tree of rank-3 mutations.
    Tropical {
        #[command(flatten)]
        source: SeedSource,
        /// Values on the cluster variables.
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Emit the normalized witness of radius R, with `--nu` as starting values.
        #[arg(long)]
        delta: Option<usize>,
        /// Certify that this polynomial is not in the lower bound using `--nu`.
        #[arg(long)]
        certify: Option<String>,
    },
    /// Check the alternating subset identity for a set of the given size.
    Diffcomb {
        #[arg(long)]
        size: usize,
    },
    /// Root system data of a finite type.
    Roots {
        #[arg(long = "type")]
        cartan: String,
    },
    /// Check that standard monomials with entries in [-b, b] have distinct leading terms.
    Independence {
        #[command(flatten)]
        source: SeedSource,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
}

/// Where a seed comes from: a matrix, a seed file, or a double reduced word.
#[derive(Args)]
struct SeedSource {
    /// Matrix or seed JSON, inline or as a file path.
    #[arg(long, alias = "seed")]
    matrix: Option<String>,
    /// Number of columns when the matrix has frozen rows.
    #[arg(long)]
    n: Option<usize>,
    /// Attach one frozen pair per direction carrying each monomial of the exchange polynomial.
    #[arg(long)]
    generic: bool,
    #[arg(long = "type", requires = "word")]
    cartan: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    word: Option<String>,
}

struct Outcome {
    body: String,
    ok: bool,
}

impl Outcome {
    fn json(v: Value, ok: bool) -> Result<Self, Error> {
        Ok(Outcome { body: serde_json::to_string(&v)?, ok })
    }
}

fn read_json(arg: &str) -> Result<Value, Error> {
    let text = if Path::new(arg).is_file() { std::fs::read_to_string(arg)? } else { arg.to_string() };
    Ok(serde_json::from_str(&text)?)
}

fn load_seed(src: &SeedSource) -> Result<Seed, Error> {
    if let (Some(t), Some(w)) = (&src.cartan, &src.word) {
        let cartan = CartanData::from_type(t)?;
        let iw = IndexedWord::new(&w.parse::<DoubleWord>()?, &cartan)?;
        return Ok(build_btilde(&iw, &cartan).seed()?);
    }
    let Some(arg) = &src.matrix else {
        return Err("one of --matrix, --seed or --type/--word is required".into());
    };
    let value = read_json(arg)?;
    if value.is_object() {
        let j: SeedJson = serde_json::from_value(value)?;
        let seed = Seed::from_json(&j)?;
        return if src.generic { Ok(Seed::with_generic_coefficients(seed.matrix().principal())?) } else { Ok(seed) };
    }
    let rows: Vec<Vec<Value>> = serde_json::from_value(value)?;
    let rows = matrix_from_json(&rows)?;
    if src.generic {
        return Ok(Seed::with_generic_coefficients(rows)?);
    }
    let n = src.n.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
    Ok(Seed::initial(ExchangeMatrix::with_default_labels(n, rows)?))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Error>
where
    T::Err: std::error::Error + 'static,
{
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| Box::new(e) as Error))
        .collect()
}

fn directions(s: &str, n: usize) -> Result<Vec<usize>, Error> {
    parse_list::<usize>(s)?
        .into_iter()
        .map(|d| if (1..=n).contains(&d) { Ok(d - 1) } else { Err(format!("direction {d} outside 1..={n}").into()) })
        .collect()
}

fn poly_arg(arg: &str) -> Result<PolyJson, Error> {
    Ok(serde_json::from_value(read_json(arg)?)?)
}

fn rationals(s: &str) -> Result<Vec<num_rational::BigRational>, Error> {
    parse_list(s)
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Mutate { source, sequence } => {
            let seed = load_seed(&source)?;
            let dirs = directions(&sequence, seed.n())?;
            Outcome::json(serde_json::to_value(seed.mutate_sequence(&dirs)?.to_json())?, true)
        }
        Command::Acyclic { source } => {
            let b = load_seed(&source)?.matrix().clone();
            let order = acyclic_order(&b).map(|o| o.iter().map(|i| i + 1).collect::<Vec<_>>());
            let ok = order.is_some();
            Outcome::json(json!({ "acyclic": ok, "order": order, "dot": gamma(&b).to_dot() }), ok)
        }
        Command::Classify { source, node_cap } => {
            let b = load_seed(&source)?.matrix().clone();
            let verdict = classify_finite_type(&b, node_cap)?;
            let ok = matches!(verdict, clusterforge::graphs::Classification::Finite { .. });
            Outcome::json(serde_json::to_value(&verdict)?, ok)
        }
        Command::Explore { source, max_seeds } => {
            let seed = load_seed(&source)?;
            let r = explore_exchange_graph(&seed, max_seeds)?.report;
            Outcome::json(
                json!({
                    "clusters": r.clusters,
                    "variables": r.cluster_variables,
                    "exhausted": r.exhausted,
                    "max_depth": r.max_depth,
                }),
                true,
            )
        }
        Command::Btilde { cartan, word, dot } => {
            let cartan = CartanData::from_type(&cartan)?;
            let iw = IndexedWord::new(&word.parse()?, &cartan)?;
            let graph = build_gamma_tilde(&iw, &cartan).to_dot();
            if dot {
                return Ok(Outcome { body: graph, ok: true });
            }
            let bt = build_btilde(&iw, &cartan);
            let seed = bt.seed()?.to_json();
            Outcome::json(json!({ "btilde": bt, "seed": seed, "dot": graph }), true)
        }
        Command::VerifyCell { cartan, word, samples, rng_seed } => {
            let word: DoubleWord = word.parse()?;
            let forms = if cartan == "A2" && word.letters() == [1, 2, 1, -1, -2, -1] { sl3_closed_forms() } else { Vec::new() };
            let cartan = CartanData::from_type(&cartan)?;
            let iw = IndexedWord::new(&word, &cartan)?;
            match verify_cell_identities(&iw, &cartan, samples, rng_seed, &forms) {
                Ok(report) => Outcome::json(serde_json::to_value(report)?, true),
                Err(e @ BruhatError::IdentityFailed { .. }) => Outcome::json(json!({ "failure": e.to_string() }), false),
                Err(e) => Err(e.into()),
            }
        }
        Command::TpCheck { cartan, word, samples, rng_seed, clusters } => {
            let cartan = CartanData::from_type(&cartan)?;
            let iw = IndexedWord::new(&word.parse()?, &cartan)?;
            let seed = build_btilde(&iw, &cartan).seed()?;
            let explored = explore_exchange_graph(&seed, clusters)?.seeds;
            match tp_criterion_check(&iw, &cartan, samples, rng_seed, &explored) {
                Ok(report) => Outcome::json(serde_json::to_value(report)?, true),
                Err(e @ BruhatError::CriterionFailed { .. }) => Outcome::json(json!({ "failure": e.to_string() }), false),
                Err(e) => Err(e.into()),
            }
        }
        Command::Straighten { source, poly } => {
            let gens = Generators::new(&load_seed(&source)?);
            let p = gens.from_json(&poly_arg(&poly)?)?;
            let s = gens.straighten(&p);
            Outcome::json(json!({ "standard": s.to_json(), "laurent": gens.to_laurent(&s).to_json() }), true)
        }
        Command::UpperMember { source, poly, denominator } => {
            let seed = load_seed(&source)?;
            let ctx = seed.context();
            let num = LaurentPoly::from_json(&poly_arg(&poly)?, Some(ctx))?;
            let den = match denominator {
                Some(d) => LaurentPoly::from_json(&poly_arg(&d)?, Some(ctx))?,
                None => LaurentPoly::one(ctx),
            };
            let m = upper_bound_member(&RatFunc::new(num, den)?, &seed)?;
            let certs: Vec<Value> = m
                .certificates
                .iter()
                .map(|c| json!({ "direction": c.direction + 1, "power": c.power, "quotient": c.quotient.to_json() }))
                .collect();
            Outcome::json(json!({ "member": m.member, "reason": m.reason, "certificates": certs }), m.member)
        }
        Command::Tropical { source, nu, depth, delta, certify } => {
            let seed = load_seed(&source)?;
            let nu = rationals(&nu)?;
            if let Some(r) = delta {
                let w = delta_witness(seed.matrix(), r, &nu)?;
                return Outcome::json(
                    json!({
                        "minima": w.minima.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "strictly_decreasing": w.strictly_decreasing,
                        "negative_at": { "vertex": w.negative_at.0, "index": w.negative_at.1 + 1 },
                        "assignment": w.assignment.to_json_map(),
                    }),
                    w.strictly_decreasing,
                );
            }
            if let Some(p) = certify {
                let y = LaurentPoly::from_json(&poly_arg(&p)?, Some(seed.context()))?;
                let v = Valuation::on_cluster(&seed, &nu)?;
                return match not_in_lower_bound_certificate(&y, &seed, &v) {
                    Ok(c) => Outcome::json(serde_json::to_value(c)?, true),
                    Err(clusterforge::tropical::TropicalError::CertificateInvalid(why)) => {
                        Outcome::json(json!({ "valid": false, "reason": why }), false)
                    }
                    Err(e) => Err(e.into()),
                };
            }
            let tree = propagate_valuation(&seed, &nu, depth)?;
            Outcome::json(serde_json::to_value(tree.to_json_map())?, true)
        }
        Command::Diffcomb { size } => {
            let holds = diffcomb_check(size);
            Outcome::json(json!({ "size": size, "holds": holds }), holds)
        }
        Command::Roots { cartan } => {
            let c = CartanData::from_type(&cartan)?;
            let (_, longest) = c.longest_element();
            Outcome::json(
                json!({
                    "type": c.name(),
                    "rank": c.rank(),
                    "cartan": c.matrix(),
                    "symmetrizer": c.symmetrizer(),
                    "positive_roots": c.positive_roots(),
                    "longest_word": longest,
                    "coxeter_number": c.coxeter_number(),
                }),
                true,
            )
        }
        Command::Independence { source, bound } => {
            let seed = load_seed(&source)?;
            let r = check_independence(&seed, bound)?;
            let ok = r.is_independent();
            Outcome::json(serde_json::to_value(r)?, ok)
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("CF_THREADS") {
        let threads: usize = v.trim().parse().map_err(|_| format!("CF_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 64 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| run(cli.command));
    match result {
        Ok(out) => {
            let _ = writeln!(std::io::stdout().lock(), "{}", out.body);
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
