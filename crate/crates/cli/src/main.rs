use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use exsh::beta::{BetaSystem, OmegaShape, Psi};
use exsh::conformal::{ConformalMeasure, MeasureValue};
use exsh::markov::{MarkovMeasure, MeasureFile, RandomWalk, Recurrence};
use exsh::relations::{exchangeable, grand_tail_equivalent, tail_equivalent, EpPoint, RelationVerdict};
use exsh::tms::{AlphaCocycle, Aperiodicity, Tms};
use exsh::{ephemeral, Error, ExactScalar, Result, Symbol, Word};

/// Exact symbolic dynamics: Markov shifts, beta-shifts and their
/// exchangeable and conformal measures.
#[derive(Parser, Debug)]
#[command(name = "exsh", version)]
struct Cli {
    /// Output format; csv applies to tabular results.
    #[arg(long, value_enum, default_value_t = Out::Json, global = true)]
    out: Out,
    /// Worker threads for library-internal parallelism.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
    #[command(subcommand)]
    group: Group,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Out {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Finite topological Markov shifts.
    #[command(subcommand)]
    Tms(TmsCmd),
    /// Markov measures with first-symbol derivative.
    #[command(subcommand)]
    Markov(MarkovCmd),
    /// Beta-expansions and the beta-shift.
    #[command(subcommand)]
    Beta(BetaCmd),
    /// Conformal product measures on beta-shifts.
    #[command(subcommand)]
    Conformal(ConformalCmd),
    /// The ephemeral measure on the simple random walk.
    #[command(subcommand)]
    Ephemeral(EphemeralCmd),
    /// Relations between eventually periodic points ("pre:period").
    #[command(subcommand)]
    Relation(RelationCmd),
}

#[derive(Subcommand, Debug)]
enum TmsCmd {
    /// Structural properties of a transition matrix.
    Check {
        #[arg(long)]
        tms: PathBuf,
        /// Also test this word for admissibility.
        #[arg(long)]
        word: Option<Word>,
    },
    /// Lattice generated by periodic-orbit differences of the counting cocycle.
    Lattice {
        #[arg(long)]
        tms: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Symbol sent to zero by the counting cocycle.
        #[arg(long, default_value_t = 0)]
        reference: Symbol,
        /// Restrict to periodic points starting with this state.
        #[arg(long)]
        at: Option<Symbol>,
    },
    /// Periodic words of length n starting with a given state.
    Orbits {
        #[arg(long)]
        tms: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        state: Symbol,
    },
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Measure JSON: {"tms": <object or path>, "pi": [...], "P": [[...]]?}.
    #[arg(long, conflicts_with_all = ["tms", "pi"])]
    measure: Option<PathBuf>,
    #[arg(long)]
    tms: Option<PathBuf>,
    /// Initial weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<String>>,
    /// Explicit transition rows "a,b;c,d" instead of the derived ones.
    #[arg(long)]
    p: Option<String>,
}

#[derive(Subcommand, Debug)]
enum MarkovCmd {
    /// Transition matrix and derivative from initial weights.
    Build {
        #[command(flatten)]
        m: MeasureArgs,
    },
    /// Measure of a cylinder and the derivative on its first symbol.
    Eval {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long)]
        word: Word,
    },
    /// Exhaustive check of the exchangeability identities.
    VerifyExchange {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value = "0")]
        tol: ExactScalar,
    },
    /// Recurrence class and stationary vector of the finite chain.
    Recurrence {
        #[command(flatten)]
        m: MeasureArgs,
    },
    /// The random-walk measure pi_s = z^|s| truncated to -L..L.
    Walk {
        #[arg(long)]
        z: ExactScalar,
        #[arg(long)]
        radius: usize,
    },
}

#[derive(Args, Debug)]
struct BetaArg {
    /// golden | quad:a,b,c | dec:<decimal>@<bits> | rat:p/q
    #[arg(long)]
    beta: String,
}

#[derive(Subcommand, Debug)]
enum BetaCmd {
    /// Greedy digits of x in [0, 1).
    Expand {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        x: ExactScalar,
        #[arg(long)]
        n: usize,
    },
    /// Digits of 1 and the Parry sequence omega.
    Omega {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Admissibility of a finite word.
    Admissible {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        word: Word,
    },
    /// Return words (full, without full proper prefix) of length n.
    FullWords {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        n: usize,
        #[arg(long = "J", value_delimiter = ',')]
        j: Option<Vec<Symbol>>,
    },
    /// Length of the shortest full prefix.
    Psi {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        word: Word,
    },
    /// Greedy factorization into return words.
    Factorize {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        word: Word,
    },
    /// Equal counts and both words concatenations of return words.
    Bowtie {
        #[command(flatten)]
        b: BetaArg,
        #[arg(long)]
        word: Word,
        #[arg(long)]
        other: Word,
    },
}

#[derive(Args, Debug)]
struct ConformalArgs {
    #[command(flatten)]
    b: BetaArg,
    #[arg(long = "J", value_delimiter = ',')]
    j: Vec<Symbol>,
    #[arg(long = "H", value_delimiter = ',')]
    h: Vec<ExactScalar>,
    #[arg(long, default_value_t = 64)]
    n_trunc: usize,
    #[arg(long, default_value = "1e-9")]
    tol: ExactScalar,
}

#[derive(Subcommand, Debug)]
enum ConformalCmd {
    /// Eigenvalue bracket and block weights.
    Solve {
        #[command(flatten)]
        c: ConformalArgs,
    },
    /// Measure of a cylinder.
    Measure {
        #[command(flatten)]
        c: ConformalArgs,
        #[arg(long)]
        word: Word,
        /// Resolve non-factorizable words up to this length.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Conformality and exchangeability checks.
    Verify {
        #[command(flatten)]
        c: ConformalArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum EphemeralCmd {
    /// Walk prefix to code digits and remainder.
    Encode {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        word: Vec<i64>,
    },
    /// Code digits to walk prefix.
    Decode {
        #[arg(long, value_delimiter = ',')]
        code: Vec<u32>,
    },
    /// Measure of a code cylinder, or of a ramp cylinder.
    Measure {
        #[arg(long, value_delimiter = ',')]
        code: Vec<u32>,
        #[arg(long)]
        ramp: Option<u32>,
    },
}

#[derive(Args, Debug)]
struct PointPair {
    #[arg(long)]
    x: EpPoint,
    #[arg(long)]
    y: EpPoint,
    /// Largest shift searched; defaults to the completeness bound.
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum RelationCmd {
    /// T^k x = T^k y.
    Tail {
        #[command(flatten)]
        p: PointPair,
    },
    /// T^k x = T^l y.
    Grand {
        #[command(flatten)]
        p: PointPair,
    },
    /// Tail relation with equal letter counts.
    Exchange {
        #[command(flatten)]
        p: PointPair,
    },
    /// Common cut of the beta jump transformation.
    Jump {
        #[command(flatten)]
        p: PointPair,
        #[command(flatten)]
        b: BetaArg,
        /// Also require equal letter counts.
        #[arg(long)]
        counts: bool,
    },
}

/// Command output: inputs, result and an optional table for csv.
struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    fn new(command: &'static str, inputs: Value, result: Value) -> Self {
        Report {
            command,
            inputs,
            result,
            table: None,
        }
    }

    fn with_table(mut self, header: Vec<&str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header.into_iter().map(String::from).collect(), rows));
        self
    }

    fn with_table_owned(mut self, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

fn scalars(v: &[ExactScalar]) -> Value {
    Value::Array(v.iter().map(s).collect())
}

fn words(v: &[Word]) -> Value {
    Value::Array(v.iter().map(s).collect())
}

fn bracket(v: &MeasureValue) -> Value {
    json!({"lo": s(&v.lo), "hi": s(&v.hi), "exact": v.exact})
}

fn verdict(v: RelationVerdict) -> Value {
    match v {
        RelationVerdict::Related { k, l } => json!({"related": true, "k": k, "l": l}),
        RelationVerdict::NotRelatedWithinBound => json!({"related": false}),
    }
}

fn load_tms(path: &Path) -> Result<Tms> {
    Tms::load(path)
}

fn parse_rows(text: &str) -> Result<Vec<Vec<ExactScalar>>> {
    text.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse()).collect())
        .collect()
}

fn load_measure(m: &MeasureArgs) -> Result<(MarkovMeasure, Value)> {
    if let Some(path) = &m.measure {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let measure = MeasureFile::from_json(&text)?.build(base)?;
        return Ok((measure, json!({"measure": path.display().to_string()})));
    }
    let (Some(tms), Some(pi)) = (&m.tms, &m.pi) else {
        return Err(Error::InvalidArgument("give --measure, or --tms with --pi".into()));
    };
    let t = load_tms(tms)?;
    let weights = pi.iter().map(|x| x.parse()).collect::<Result<Vec<ExactScalar>>>()?;
    let mut inputs = json!({"tms": tms.display().to_string(), "pi": pi});
    let measure = match &m.p {
        Some(rows) => {
            inputs["P"] = s(rows);
            MarkovMeasure::from_parts(t, weights, parse_rows(rows)?)?
        }
        None => MarkovMeasure::from_initial(t, weights)?,
    };
    Ok((measure, inputs))
}

fn omega_shape(shape: &OmegaShape) -> Value {
    match shape {
        OmegaShape::EventuallyPeriodic { preperiod, period } => {
            json!({"kind": "EventuallyPeriodic", "preperiod": s(preperiod), "period": s(period)})
        }
        OmegaShape::PurelyComputed(depth) => json!({"kind": "PurelyComputed", "depth": depth}),
    }
}

fn conformal(c: &ConformalArgs) -> Result<(ConformalMeasure, Value)> {
    let b = Arc::new(BetaSystem::parse(&c.b.beta)?);
    let inputs = json!({
        "beta": c.b.beta,
        "J": c.j,
        "H": scalars(&c.h),
        "n_trunc": c.n_trunc,
        "tol": s(&c.tol),
    });
    Ok((ConformalMeasure::solve(b, &c.j, &c.h, c.n_trunc, &c.tol)?, inputs))
}

fn run_tms(cmd: TmsCmd) -> Result<Report> {
    Ok(match cmd {
        TmsCmd::Check { tms, word } => {
            let t = load_tms(&tms)?;
            let (finite, distinct_rows) = t.has_finite_images();
            let mut result = json!({
                "n_states": t.n_states(),
                "transitive": t.is_transitive(),
                "mixing": t.is_mixing(),
                "almost_onto": t.is_almost_onto(),
                "finite_images": {"finite": finite, "distinct_rows": distinct_rows},
            });
            if let Ok(d) = t.periodic_decomposition() {
                result["period"] = json!(d.period);
                result["classes"] = json!(d.classes);
            }
            let mut inputs = json!({"tms": tms.display().to_string()});
            if let Some(w) = word {
                result["admissible"] = json!(t.is_admissible(&w)?);
                inputs["word"] = s(&w);
            }
            Report::new("tms check", inputs, result)
        }
        TmsCmd::Lattice {
            tms,
            max_len,
            reference,
            at,
        } => {
            let t = load_tms(&tms)?;
            let phi = AlphaCocycle::counting(t.n_states(), reference)?;
            let lat = match at {
                Some(state) => t.cocycle_lattice_at(&phi, state, max_len)?,
                None => t.cocycle_lattice(&phi, max_len)?,
            };
            let aperiodic = match t.is_aperiodic(&phi, max_len)? {
                Aperiodicity::Full => json!("Full"),
                Aperiodicity::ProperAt(l) => json!({"ProperAt": l}),
            };
            let rows = lat
                .basis()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect();
            Report::new(
                "tms lattice",
                json!({"tms": tms.display().to_string(), "max_len": max_len, "reference": reference, "at": at}),
                json!({
                    "basis": lat.basis(),
                    "rank": lat.rank(),
                    "determinant": lat.determinant(),
                    "aperiodic": aperiodic,
                }),
            )
            .with_table(vec!["basis_vector"], rows)
        }
        TmsCmd::Orbits { tms, n, state } => {
            let t = load_tms(&tms)?;
            let orbits = t.periodic_orbits(n, state)?;
            let rows = orbits.iter().map(|w| vec![w.to_string()]).collect();
            Report::new(
                "tms orbits",
                json!({"tms": tms.display().to_string(), "n": n, "state": state}),
                json!({"orbits": words(&orbits), "count": orbits.len()}),
            )
            .with_table(vec!["word"], rows)
        }
    })
}

fn run_markov(cmd: MarkovCmd) -> Result<Report> {
    Ok(match cmd {
        MarkovCmd::Build { m } => {
            let (mu, inputs) = load_measure(&m)?;
            let mut header = vec!["state".to_string()];
            header.extend((0..mu.transition().len()).map(|j| format!("p{j}")));
            let p: Vec<Value> = mu.transition().iter().map(|r| scalars(r)).collect();
            let rows = mu
                .transition()
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = vec![i.to_string()];
                    row.extend(r.iter().map(|x| x.to_string()));
                    row
                })
                .collect();
            Report::new(
                "markov build",
                inputs,
                json!({"P": p, "h": scalars(mu.h()), "pi": scalars(mu.initial())}),
            )
            .with_table_owned(header, rows)
        }
        MarkovCmd::Eval { m, word } => {
            let (mu, mut inputs) = load_measure(&m)?;
            inputs["word"] = s(&word);
            let value = mu.cylinder_measure(&word)?;
            Report::new(
                "markov eval",
                inputs,
                json!({"measure": s(value), "derivative": s(mu.derivative_symbol(word[0]))}),
            )
        }
        MarkovCmd::VerifyExchange { m, n_max, tol } => {
            let (mu, mut inputs) = load_measure(&m)?;
            inputs["n_max"] = json!(n_max);
            inputs["tol"] = s(&tol);
            let r = mu.verify_exchangeability(n_max, &tol);
            let violations: Vec<Value> = r
                .violations
                .iter()
                .map(|v| json!({"w": s(&v.w), "w_prime": s(&v.w_prime), "value": s(&v.value), "value_prime": s(&v.value_prime)}))
                .collect();
            let rows = r
                .violations
                .iter()
                .map(|v| {
                    vec![
                        v.w.to_string(),
                        v.w_prime.to_string(),
                        v.value.to_string(),
                        v.value_prime.to_string(),
                    ]
                })
                .collect();
            Report::new(
                "markov verify-exchange",
                inputs,
                json!({
                    "pairs_checked": r.pairs_checked,
                    "max_discrepancy": s(&r.max_discrepancy),
                    "violations": violations,
                }),
            )
            .with_table(vec!["w", "w_prime", "value", "value_prime"], rows)
        }
        MarkovCmd::Recurrence { m } => {
            let (mu, inputs) = load_measure(&m)?;
            let Recurrence::PositiveRecurrent { stationary } = mu.classify_recurrence()?;
            Report::new(
                "markov recurrence",
                inputs,
                json!({"class": "PositiveRecurrent", "stationary": scalars(&stationary)}),
            )
        }
        MarkovCmd::Walk { z, radius } => {
            let rw = RandomWalk::new(z.clone(), radius)?;
            let l = radius as i64;
            let mut invariant = Map::new();
            let mut rows = Vec::new();
            let mut balanced = true;
            for t in -l..=l {
                let c = rw.invariant_weight(t);
                let pushed = rw.pushed_weight(t)?;
                if t.abs() <= l - 2 && pushed != c {
                    balanced = false;
                }
                rows.push(vec![t.to_string(), c.to_string(), pushed.to_string()]);
                invariant.insert(t.to_string(), s(&c));
            }
            let transitions = json!({
                "0": {"-1": s(rw.transition(0, -1)?), "0": s(rw.transition(0, 0)?), "1": s(rw.transition(0, 1)?)},
                "1": {"-1": s(rw.transition(1, -1)?), "0": s(rw.transition(1, 0)?), "1": s(rw.transition(1, 1)?)},
            });
            Report::new(
                "markov walk",
                json!({"z": s(&z), "radius": radius}),
                json!({"invariant": invariant, "transitions": transitions, "interior_balanced": balanced}),
            )
            .with_table(vec!["state", "c", "cP"], rows)
        }
    })
}

fn run_beta(cmd: BetaCmd) -> Result<Report> {
    Ok(match cmd {
        BetaCmd::Expand { b, x, n } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let digits = sys.beta_expand(&x, n)?;
            Report::new(
                "beta expand",
                json!({"beta": b.beta, "x": s(&x), "n": n}),
                json!({"digits": s(digits)}),
            )
        }
        BetaCmd::Omega { b, n } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let omega = sys.omega_prefix(n)?;
            let ones = sys.digits_of_one(n)?;
            Report::new(
                "beta omega",
                json!({"beta": b.beta, "n": n}),
                json!({
                    "beta": s(sys.beta()),
                    "max_digit": sys.max_digit(),
                    "omega_prefix": s(omega),
                    "digits_of_one": s(ones),
                    "shape": omega_shape(&sys.omega_shape()),
                }),
            )
        }
        BetaCmd::Admissible { b, word } => {
            let sys = BetaSystem::parse(&b.beta)?;
            Report::new(
                "beta admissible",
                json!({"beta": b.beta, "word": s(&word)}),
                json!({"admissible": sys.is_admissible(&word)?, "strict": sys.is_admissible_strict(&word)?}),
            )
        }
        BetaCmd::FullWords { b, n, j } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let found = sys.enumerate_return_words(n, j.as_deref())?;
            let rows = found.iter().map(|w| vec![w.to_string()]).collect();
            Report::new(
                "beta full-words",
                json!({"beta": b.beta, "n": n, "J": j}),
                json!({"words": words(&found), "count": found.len()}),
            )
            .with_table(vec!["word"], rows)
        }
        BetaCmd::Psi { b, word } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let result = match sys.psi(&word)? {
                Psi::Determined(n) => json!({"psi": n}),
                Psi::Undetermined(n) => json!({"psi": null, "undetermined": n}),
            };
            Report::new("beta psi", json!({"beta": b.beta, "word": s(&word)}), result)
        }
        BetaCmd::Factorize { b, word } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let (factors, residue) = sys.factorize(&word)?;
            let v = sys.fullness(&word)?;
            let rows = factors.iter().map(|w| vec![w.to_string()]).collect();
            Report::new(
                "beta factorize",
                json!({"beta": b.beta, "word": s(&word)}),
                json!({"factors": words(&factors), "residue": s(residue), "K": v.k, "full": v.full}),
            )
            .with_table(vec!["factor"], rows)
        }
        BetaCmd::Bowtie { b, word, other } => {
            let sys = BetaSystem::parse(&b.beta)?;
            Report::new(
                "beta bowtie",
                json!({"beta": b.beta, "word": s(&word), "other": s(&other)}),
                json!({"bowtie": sys.is_bowtie(&word, &other)?}),
            )
        }
    })
}

fn run_conformal(cmd: ConformalCmd) -> Result<Report> {
    Ok(match cmd {
        ConformalCmd::Solve { c } => {
            let (m, inputs) = conformal(&c)?;
            let blocks: Map<String, Value> = m
                .blocks()
                .iter()
                .enumerate()
                .map(|(i, b)| ((i + 1).to_string(), s(b)))
                .collect();
            let rows = m
                .blocks()
                .iter()
                .enumerate()
                .map(|(i, b)| vec![(i + 1).to_string(), b.to_string()])
                .collect();
            Report::new(
                "conformal solve",
                inputs,
                json!({
                    "lambda_lo": s(m.lambda_lo()),
                    "lambda_hi": s(m.lambda_hi()),
                    "blocks": blocks,
                    "n_trunc": m.n_trunc(),
                    "residual": s(m.residual()),
                    "shortfall": s(m.normalization_shortfall()),
                }),
            )
            .with_table(vec!["n", "B_n"], rows)
        }
        ConformalCmd::Measure { c, word, depth } => {
            let (m, mut inputs) = conformal(&c)?;
            inputs["word"] = s(&word);
            inputs["depth"] = json!(depth);
            let v = m.cylinder_measure(&word, depth)?;
            Report::new("conformal measure", inputs, bracket(&v))
        }
        ConformalCmd::Verify { c, n_max } => {
            let (m, mut inputs) = conformal(&c)?;
            inputs["n_max"] = json!(n_max);
            let conf = m.verify_conformality(n_max, &c.tol)?;
            let exch = m.verify_exchangeability(n_max, &c.tol)?;
            let mut rows: Vec<Vec<String>> = conf
                .violations
                .iter()
                .map(|w| vec!["conformality".into(), w.to_string(), String::new()])
                .collect();
            rows.extend(
                exch.violations
                    .iter()
                    .map(|(a, b)| vec!["exchangeability".into(), a.to_string(), b.to_string()]),
            );
            rows.extend(
                exch.lebesgue_violations
                    .iter()
                    .map(|w| vec!["lebesgue".into(), w.to_string(), String::new()]),
            );
            Report::new(
                "conformal verify",
                inputs,
                json!({
                    "conformality": {
                        "checked": conf.checked,
                        "skipped": conf.skipped,
                        "max_discrepancy": s(&conf.max_discrepancy),
                        "violations": words(&conf.violations),
                    },
                    "exchangeability": {
                        "pairs_checked": exch.pairs_checked,
                        "max_discrepancy": s(&exch.max_discrepancy),
                        "violations": exch.violations.iter().map(|(a, b)| json!([s(a), s(b)])).collect::<Vec<_>>(),
                        "lebesgue_checked": exch.lebesgue_checked,
                        "lebesgue_max_discrepancy": s(&exch.lebesgue_max_discrepancy),
                        "lebesgue_violations": words(&exch.lebesgue_violations),
                    },
                }),
            )
            .with_table(vec!["check", "w", "w_prime"], rows)
        }
    })
}

fn run_ephemeral(cmd: EphemeralCmd) -> Result<Report> {
    Ok(match cmd {
        EphemeralCmd::Encode { word } => {
            let (code, rest) = ephemeral::encode(&word)?;
            Report::new(
                "ephemeral encode",
                json!({"word": word}),
                json!({"code": code, "rest": rest}),
            )
        }
        EphemeralCmd::Decode { code } => {
            let walk = ephemeral::decode(&code)?;
            Report::new("ephemeral decode", json!({"code": code}), json!({"walk": walk}))
        }
        EphemeralCmd::Measure { code, ramp } => match ramp {
            None => Report::new(
                "ephemeral measure",
                json!({"code": code}),
                json!({"measure": s(ephemeral::nu_bar_cylinder(&code)?)}),
            ),
            Some(k) => {
                let (walk, v) = ephemeral::nu_bar_ramp(k, &code)?;
                Report::new(
                    "ephemeral measure",
                    json!({"code": code, "ramp": k}),
                    json!({"measure": s(v), "walk": walk}),
                )
            }
        },
    })
}

fn run_relation(cmd: RelationCmd) -> Result<Report> {
    let inputs = |p: &PointPair, bound: usize| json!({"x": s(&p.x), "y": s(&p.y), "bound": bound});
    Ok(match cmd {
        RelationCmd::Tail { p } => {
            let k = p.bound.unwrap_or_else(|| p.x.completeness_bound(&p.y));
            Report::new("relation tail", inputs(&p, k), verdict(tail_equivalent(&p.x, &p.y, k)))
        }
        RelationCmd::Grand { p } => {
            let k = p.bound.unwrap_or_else(|| p.x.completeness_bound(&p.y));
            Report::new(
                "relation grand",
                inputs(&p, k),
                verdict(grand_tail_equivalent(&p.x, &p.y, k, k)),
            )
        }
        RelationCmd::Exchange { p } => {
            let k = p.bound.unwrap_or_else(|| p.x.completeness_bound(&p.y));
            Report::new("relation exchange", inputs(&p, k), verdict(exchangeable(&p.x, &p.y, k)))
        }
        RelationCmd::Jump { p, b, counts } => {
            let sys = BetaSystem::parse(&b.beta)?;
            let k = match p.bound {
                Some(k) => k,
                None => sys.jump_search_bound(&p.x, &p.y)?,
            };
            let mut inp = inputs(&p, k);
            inp["beta"] = json!(b.beta);
            inp["counts"] = json!(counts);
            let result = match sys.jump_grand_tail(&p.x, &p.y, k, counts)? {
                Some(w) => json!({"related": true, "k": w.k, "l": w.l, "n": w.n}),
                None => json!({"related": false}),
            };
            Report::new("relation jump", inp, result)
        }
    })
}

fn run(cli: Cli) -> Result<Report> {
    match cli.group {
        Group::Tms(c) => run_tms(c),
        Group::Markov(c) => run_markov(c),
        Group::Beta(c) => run_beta(c),
        Group::Conformal(c) => run_conformal(c),
        Group::Ephemeral(c) => run_ephemeral(c),
        Group::Relation(c) => run_relation(c),
    }
}

fn write_csv(report: &Report) -> std::result::Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &report.table {
        Some((header, rows)) => {
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
        }
        None => {
            w.write_record(["key", "value"])?;
            if let Value::Object(map) = &report.result {
                for (k, v) in map {
                    let text = match v {
                        Value::String(x) => x.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), text.as_str()])?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn error_json(kind: &str, message: &str) -> String {
    json!({"error": {"kind": kind, "message": message}}).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    let out = cli.out;
    let outcome = std::panic::catch_unwind(move || run(cli));
    match outcome {
        Ok(Ok(report)) => {
            if out == Out::Csv {
                match write_csv(&report) {
                    Ok(text) => print!("{text}"),
                    Err(e) => {
                        println!("{}", error_json("Io", &e.to_string()));
                        return ExitCode::from(1);
                    }
                }
            } else {
                let doc = json!({"command": report.command, "inputs": report.inputs, "result": report.result});
                println!("{doc}");
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            println!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(1)
        }
        Err(_) => {
            println!("{}", error_json("Internal", "unexpected internal failure"));
            ExitCode::from(1)
        }
    }
}
