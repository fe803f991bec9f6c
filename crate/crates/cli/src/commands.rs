use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use nilwitness_core::algebraic::{
    frobenius_twist, heisenberg, is_k_bilinear, lazard_e, pseudo_quadratic_group, verify_literal_commutators,
    AlgebraicModel, BiAddMapSpec, PseudoQuadraticSpec, StructureConstants,
};
use nilwitness_core::cocycle::{g0_sigma, verify_cocycle_identity, verify_equivariance, CocycleSpec, SigmaSeq};
use nilwitness_core::extension::{
    omega_sigma_surjective, verify_class2_and_center, verify_q_embedding, Envelope, FiniteGroup, FiniteWindowGroup,
};
use nilwitness_core::field::Gf;
use nilwitness_core::group::verify_commutator_oracles;
use nilwitness_core::report::{CheckReport, ExponentWindow};
use nilwitness_core::typei::{
    blocks_in_window, center_index_exponent, classify_sigma, gram_rank, pairing, sweep, validate_schedule,
    witness_character, witness_pair, witness_sweep, CharacterSpec, GramReport,
};

use crate::input::{inline_or_file, parse_basis, parse_schedule, parse_witness, prime, seq_input, SeqInput};
use crate::{Cli, Command, ExtArgs, Format, GlobalArgs, GroupArgs, GroupKind, Scalars, SeqArgs, Suite};

enum Output {
    Json(Value),
    Gram(GramReport),
}

struct Outcome {
    output: Output,
    reports: Vec<CheckReport>,
    passed: bool,
}

impl Outcome {
    fn info(value: Value) -> Self {
        Outcome { output: Output::Json(value), reports: Vec::new(), passed: true }
    }

    fn checks(mut value: Value, reports: Vec<CheckReport>) -> Self {
        let passed = reports.iter().all(|r| r.passed);
        value["passed"] = json!(passed);
        value["reports"] = json!(reports);
        Outcome { output: Output::Json(value), reports, passed }
    }
}

pub fn run(cli: &Cli) -> Result<bool> {
    if cli.global.explain {
        eprintln!("{}", explain(&cli.command));
    }
    let outcome = match &cli.command {
        Command::Classify { seq } => classify(seq)?,
        Command::Grow { seq, chi, witness, schedule } => grow(seq, chi.as_deref(), witness.as_deref(), schedule)?,
        Command::Witness { seq, d, blocks } => witness(seq, *d, *blocks)?,
        Command::Verify { suite } => verify(suite, &cli.global)?,
        Command::Extend { ext } => extend(ext)?,
        Command::Bilinear { constants, twist, lazard } => bilinear(constants, *twist, *lazard)?,
    };
    if cli.global.verbose > 0 {
        for r in &outcome.reports {
            eprintln!("{r}");
            for note in &r.notes {
                eprintln!("  {note}");
            }
        }
    }
    emit(&cli.global, &outcome.output)?;
    Ok(outcome.passed)
}

fn emit(global: &GlobalArgs, output: &Output) -> Result<()> {
    let text = match (global.format, output) {
        (Format::Json, Output::Json(v)) => serde_json::to_string_pretty(v)? + "\n",
        (Format::Json, Output::Gram(g)) => serde_json::to_string_pretty(&serde_json::to_value(g)?)? + "\n",
        (Format::Csv, Output::Gram(g)) => g.to_csv(),
        (Format::Csv, Output::Json(_)) => bail!("csv output is only available for rank sweeps (grow)"),
    };
    match &global.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn explain(command: &Command) -> &'static str {
    match command {
        Command::Classify { .. } => {
            "Monomial commutation relations of type sigma give a type I group when, past some threshold c, \
             sigma is nonzero everywhere (criterion 1), or vanishes on the even integers and is nonzero on the odd ones \
             (criterion 2), or vanishes off dZ and is nonzero on dZ (criterion 3). If sigma_d != 0 while \
             sigma_{dn} = 0 for every n >= 2, the group is not type I. A 0/1 sequence s is classified through \
             the even-exponent subgroup, whose sigma equals s."
        }
        Command::Grow { .. } => {
            "At a central character chi, type I requires O/L to be finite, where O is the set of elements \
             commuting with an open subgroup U modulo ker(chi) and L is the radical of B(x, y) = chi(gamma(x, y)) on O. \
             The rank of B on windows [i_0, K_0] bounds dim O/L from below: ranks that settle are evidence of \
             finiteness, ranks that keep growing are evidence against."
        }
        Command::Witness { .. } => {
            "The character with coefficient sigma_d^{-1} at each -d-6nd pairs t^{-3nd} with t^{-3nd-d} to 1, \
             so every block is a hyperbolic plane for B and rank B >= 2M once the window holds M blocks."
        }
        Command::Verify { suite } => match suite {
            Suite::Cocycle { .. } => {
                "eta_s is a bi-additive 2-cocycle, omega(a+b, c) + omega(a, b) = omega(a, b+c) + omega(b, c), \
                 and it is shift equivariant, eta_s(tx, ty) = t eta_s(x, y)."
            }
            Suite::Commutator { .. } => {
                "For a < b with b - a even, [t^a, t^b] = s((b-a)/2) t^{(a+b)/2}; monomials whose exponents differ \
                 by an odd number commute. This is compared with omega(x, y) - omega(y, x) and with g h g^-1 h^-1."
            }
            Suite::Extension { .. } => EXTENSION,
            Suite::Bilinear { .. } => BILINEAR,
        },
        Command::Extend { .. } => EXTENSION,
        Command::Bilinear { .. } => BILINEAR,
    }
}

const EXTENSION: &str = "For Q = A_W x F_p with pairing c, the semidirect product E of the dual of A_W with Q \
    satisfies [E, E] <= C <= Z(E), and for every nontrivial sigma the map omega_sigma sends E onto the dual \
    of E/C, of order p^{2w}. Hence E is two-step nilpotent, type I, and contains Q as a normal subgroup.";

const BILINEAR: &str = "If the commutator map A x A -> N of a two-step nilpotent group is bilinear over the field k, \
    the group is type I. The check verifies gamma(lambda v, w) = lambda gamma(v, w) = gamma(v, lambda w) on basis \
    pairs for a generator lambda of k, which suffices by additivity.";

fn resolve_sigma(seq: &SeqArgs) -> Result<(Option<SigmaSeq>, SigmaSeq)> {
    Ok(match seq_input(seq)? {
        SeqInput::S(s) => {
            let sigma = g0_sigma(&s)?;
            (Some(s), sigma)
        }
        SeqInput::Sigma(sigma) => (None, sigma),
    })
}

fn classify(seq: &SeqArgs) -> Result<Outcome> {
    let (s, sigma) = resolve_sigma(seq)?;
    let verdict = classify_sigma(&sigma);
    Ok(Outcome::info(json!({
        "command": "classify",
        "input": if s.is_some() { "s" } else { "sigma" },
        "s": s,
        "sigma": sigma,
        "verdict": verdict,
        "summary": verdict.to_string(),
    })))
}

fn grow(seq: &SeqArgs, chi: Option<&str>, witness: Option<&[String]>, schedule: &str) -> Result<Outcome> {
    let (_, sigma) = resolve_sigma(seq)?;
    let schedule = parse_schedule(schedule)?;
    validate_schedule(&schedule)?;
    let report = match (chi, witness) {
        (Some(text), None) => {
            let chi = CharacterSpec::parse(sigma.modulus(), &inline_or_file(text)?).context("malformed character")?;
            sweep(&chi, &sigma, &schedule)?
        }
        (None, Some(tokens)) => {
            let (d, m) = parse_witness(tokens)?;
            witness_sweep(d, m, &sigma, &schedule)?
        }
        _ => bail!("give exactly one of --chi or --witness"),
    };
    Ok(Outcome { output: Output::Gram(report), reports: Vec::new(), passed: true })
}

fn witness(seq: &SeqArgs, d: u64, blocks: usize) -> Result<Outcome> {
    let (_, sigma) = resolve_sigma(seq)?;
    let chi = witness_character(d, blocks, &sigma)?;
    let p = sigma.modulus();
    let mut report = CheckReport::new("witness blocks pair to 1");
    let mut rows = Vec::new();
    for n in 1..=blocks {
        let (x, y) = witness_pair(p, d, n);
        let value = pairing(&chi, &sigma, &x, &y)?;
        report.record(value == 1, || format!("block {n}: chi([{x}, {y}]) = {value}"));
        rows.push(json!({ "n": n, "x": x.to_string(), "y": y.to_string(), "value": value }));
    }
    let d_i64 = d as i64;
    let i0 = -(3 * blocks as i64 + 1) * d_i64;
    debug_assert!(blocks_in_window(d, i0) >= blocks);
    let row = gram_rank(&chi, &sigma, i0)?;
    Ok(Outcome::checks(
        json!({ "command": "witness", "sigma": sigma, "d": d, "M": blocks, "character": chi, "blocks": rows, "gram": row }),
        vec![report],
    ))
}

fn window_group(ext: &ExtArgs) -> Result<FiniteWindowGroup> {
    let p = prime(ext.p)?;
    if let Some(text) = &ext.pairing {
        let g: FiniteWindowGroup = serde_json::from_str(&inline_or_file(text)?).context("malformed window group")?;
        return Ok(g);
    }
    if let Some(n) = ext.heisenberg_blocks {
        return Ok(FiniteWindowGroup::heisenberg_blocks(p, n)?);
    }
    let basis = parse_basis(&ext.window)?;
    let s = match &ext.s {
        Some(tokens) => crate::input::parse_seq(p, tokens)?,
        None => SigmaSeq::indicator(p, 1)?,
    };
    let chi = match &ext.chi {
        Some(text) => CharacterSpec::parse(p, &inline_or_file(text)?).context("malformed character")?,
        None => {
            let (lo, hi) = (*basis.iter().min().unwrap(), *basis.iter().max().unwrap());
            CharacterSpec::new(p, (lo..=hi).map(|m| (m, 1)))
        }
    };
    Ok(FiniteWindowGroup::from_cocycle(&CocycleSpec::eta(s)?, &chi, basis)?)
}

fn extend(ext: &ExtArgs) -> Result<Outcome> {
    let q = window_group(ext)?;
    let w = q.window_size();
    let p = q.modulus();
    let antisym: Vec<Vec<u32>> =
        (0..w).map(|i| (0..w).map(|j| p.sub(q.pairing().get(i, j), q.pairing().get(j, i))).collect()).collect();
    let e = Envelope::new(q.clone());
    let (_, exponent) = e.order();
    Ok(Outcome::info(json!({
        "command": "extend",
        "group": q,
        "window_size": w,
        "commutator_pairing": antisym,
        "center_index_exponent": center_index_exponent(&q),
        "envelope": { "p": p.get(), "order_exponent": exponent },
    })))
}

fn verify(suite: &Suite, global: &GlobalArgs) -> Result<Outcome> {
    match suite {
        Suite::Cocycle { seq, window, samples } => {
            let window = ExponentWindow::parse(window)?;
            let reports = match seq_input(seq)? {
                SeqInput::S(s) => vec![
                    verify_cocycle_identity(&CocycleSpec::eta(s.clone())?, window, *samples, global.seed)?,
                    verify_equivariance(&s, window, *samples, global.seed)?,
                ],
                SeqInput::Sigma(sigma) => {
                    vec![verify_cocycle_identity(&CocycleSpec::MonomialGamma(sigma), window, *samples, global.seed)?]
                }
            };
            Ok(Outcome::checks(
                json!({ "suite": "cocycle", "window": window.to_string(), "seed": global.seed }),
                reports,
            ))
        }
        Suite::Commutator { seq, window } => {
            let s = match seq_input(seq)? {
                SeqInput::S(s) => s,
                SeqInput::Sigma(_) => bail!("the commutator suite compares against eta_s; give --s"),
            };
            let window = ExponentWindow::parse(window)?;
            let report = verify_commutator_oracles(&s, window)?;
            Ok(Outcome::checks(json!({ "suite": "commutator", "window": window.to_string() }), vec![report]))
        }
        Suite::Extension { ext } => {
            let q = window_group(ext)?;
            let w = q.window_size();
            let p = q.modulus();
            let e = Envelope::new(q.clone());
            let mut reports = vec![verify_class2_and_center(&e), verify_q_embedding(&e)];
            let mut images = Vec::new();
            for sigma in 1..p.get() {
                let (report, image) = omega_sigma_surjective(&e, w, sigma)?;
                reports.push(report);
                images.push(image);
            }
            Ok(Outcome::checks(
                json!({ "suite": "extension", "group": q, "envelope_size": e.size(), "omega": images }),
                reports,
            ))
        }
        Suite::Bilinear { group } => verify_group(group),
    }
}

fn alternating_report(spec: &BiAddMapSpec) -> CheckReport {
    let mut r = CheckReport::new("alternating");
    r.record(spec.is_alternating(), || "gamma(v, v) != 0 for some basis vector".into());
    r
}

fn spec_summary(spec: &BiAddMapSpec) -> Value {
    json!({
        "p": spec.modulus().get(),
        "scalar_field": spec.scalar_order(),
        "dim_a_fp": spec.dim_a(),
        "dim_n_fp": spec.dim_n(),
    })
}

fn verify_group(args: &GroupArgs) -> Result<Outcome> {
    fn finish<M: AlgebraicModel>(
        model: &M,
        spec: &BiAddMapSpec,
        field: &Gf,
        twist: bool,
        extra: Value,
    ) -> Result<Outcome> {
        let checked = if twist { frobenius_twist(spec, field)? } else { spec.clone() };
        let reports = vec![is_k_bilinear(&checked), alternating_report(&checked), verify_literal_commutators(model)];
        let mut value = json!({
            "suite": "bilinear",
            "group": model.name(),
            "order": model.size(),
            "twisted": twist,
            "map": spec_summary(&checked),
        });
        if let (Value::Object(v), Value::Object(e)) = (&mut value, extra) {
            v.extend(e);
        }
        Ok(Outcome::checks(value, reports))
    }
    match args.group {
        GroupKind::Heisenberg => {
            let g = heisenberg(args.n, args.q)?;
            finish(&g, g.commutator_map(), g.field(), args.twist, json!({}))
        }
        GroupKind::Lazard => {
            let constants = match &args.constants {
                Some(text) => serde_json::from_str(&inline_or_file(text)?).context("malformed structure constants")?,
                None => StructureConstants::heisenberg_algebra(args.q),
            };
            let g = lazard_e(&constants)?;
            finish(&g, g.commutator_map(), g.field(), args.twist, json!({ "abelian": g.is_abelian() }))
        }
        GroupKind::PseudoQuadratic => {
            let spec: PseudoQuadraticSpec = match &args.hermitian {
                Some(text) => serde_json::from_str(&inline_or_file(text)?).context("malformed hermitian data")?,
                None => PseudoQuadraticSpec::standard(args.q, args.n)?,
            };
            let g = pseudo_quadratic_group(&spec).context("malformed hermitian data")?;
            let map = match args.over {
                Scalars::Base => g.commutator_map(),
                Scalars::Extension => g.commutator_map_over_extension(),
            };
            let over = match args.over {
                Scalars::Base => "base",
                Scalars::Extension => "extension",
            };
            finish(&g, map, g.extension_field(), args.twist, json!({ "over": over, "hermitian": spec }))
        }
    }
}

fn bilinear(constants: &str, twist: bool, lazard: bool) -> Result<Outcome> {
    let constants: StructureConstants =
        serde_json::from_str(&inline_or_file(constants)?).context("malformed structure constants")?;
    let spec = constants.to_spec()?;
    let checked = if twist { frobenius_twist(&spec, &Gf::with_order(constants.q)?)? } else { spec };
    let mut reports = vec![is_k_bilinear(&checked)];
    let mut value = json!({
        "command": "bilinear",
        "constants": constants,
        "twisted": twist,
        "map": spec_summary(&checked),
        "alternating": checked.is_alternating(),
    });
    if lazard {
        let g = lazard_e(&constants)?;
        reports.push(verify_literal_commutators(&g));
        value["abelian"] = json!(g.is_abelian());
    }
    Ok(Outcome::checks(value, reports))
}
