use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mcndgen_core::feasibility::filter;
use mcndgen_core::hkw::{count_negative, generate_scenarios, HkwOptions};
use mcndgen_core::io::{
    read_corr, read_hkwmat, read_moments, read_probs, read_std, write_corr, write_hkwmat, write_moments,
    write_stochastic_to, FormatId,
};
use mcndgen_core::model::{Family, RandomizationSelection, ScenarioMatrix};
use mcndgen_core::moments::{assemble_correlation, assemble_targets, BlockCorrelations, Distribution};
use mcndgen_core::prng::{Pcg32, DEFAULT_SEED, DEFAULT_STREAM};

use crate::config::{resolve_config, CliConfig, CliError, CommandSpec, FlagSpec, Source};
use crate::{echo, finish, read_text, stage, write_text, RunError};

const FLAGS: &[FlagSpec] = &[
    FlagSpec::value("I", None, "input instance"),
    FlagSpec::value("F", Some("S"), "input format code (S = STD)"),
    FlagSpec::value("O", None, "output file [default: input with .stoch extension]"),
    FlagSpec::value("S", Some("3"), "randomization mask: 1 demand, 2 arc cap, 4 com cap, 8 fixed, 16 var"),
    FlagSpec::switch("G", "generate targets instead of reading -MO/-CO"),
    FlagSpec::value("T", Some("U"), "distribution: U uniform, T triangular"),
    FlagSpec::value("A", Some("0.25"), "alpha (downward spread)"),
    FlagSpec::value("B", Some("0.25"), "beta (upward spread)"),
    FlagSpec::value("N", Some("100"), "scenario count"),
    FlagSpec::value("EM", Some("0.001"), "moment tolerance"),
    FlagSpec::value("EC", Some("0.001"), "correlation tolerance"),
    FlagSpec::value("V", Some("1"), "verbosity"),
    FlagSpec::value("MT", Some("10"), "max trials"),
    FlagSpec::value("MI", Some("100"), "max iterations per trial"),
    FlagSpec::value("seed", Some("42"), "generator seed"),
    FlagSpec::value("stream", Some("54"), "generator stream"),
    FlagSpec::value("P", None, "scenario probabilities [default: equiprobable]"),
    FlagSpec::value("MO", None, "moment targets (written with -G, read otherwise)"),
    FlagSpec::value("CO", None, "correlation target (written with -G, read otherwise)"),
    FlagSpec::value("HO", None, "write the generated scenario matrix"),
    FlagSpec::value("HI", None, "start from this scenario matrix"),
];

/// `X<p><q>` with family codes; `XAD` and `XDA` name the same block.
fn block_flag(raw: &str) -> Option<String> {
    let mut chars = raw.strip_prefix('X')?.chars();
    let a = Family::from_code(chars.next()?)?;
    let b = Family::from_code(chars.next()?)?;
    if chars.next().is_some() {
        return None;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Some(format!("X{}{}", lo.code(), hi.code()))
}

pub const STOGEN: CommandSpec = CommandSpec {
    name: "stogen",
    summary: "Generate moment-matched scenarios for an instance and keep the feasible ones.",
    flags: FLAGS,
    dynamic: Some(block_flag),
    dynamic_help: "-X<p><q> <v>       block correlation, p and q in D A B F C (e.g. -XDA -0.3) [default 0]",
};

fn blocks(c: &CliConfig) -> Result<BlockCorrelations, RunError> {
    let mut b = BlockCorrelations::new();
    for key in c.keys().filter(|k| k.starts_with('X')) {
        let mut codes = key[1..].chars();
        let (p, q) = (codes.next(), codes.next());
        let (Some(p), Some(q)) = (p.and_then(Family::from_code), q.and_then(Family::from_code)) else {
            continue;
        };
        let v: f64 = c.require(key)?;
        b.set(p, q, v)?;
    }
    Ok(b)
}

fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), RunError> {
    let c = resolve_config(&STOGEN, argv)?;
    let input: String = c.require("I")?;
    let code = c.str("F").unwrap_or("S");
    if FormatId::from_input_code(code).is_none() {
        return Err(CliError::Usage(format!("unknown input format code `{code}` (only S is defined)")).into());
    }
    let mask: u32 = c.require("S")?;
    let dist = match c.str("T").unwrap_or("U") {
        "U" => Distribution::Uniform,
        "T" => Distribution::Triangular,
        v => return Err(CliError::Usage(format!("invalid value `{v}` for -T (expected U or T)")).into()),
    };
    let alpha: f64 = c.require("A")?;
    let beta: f64 = c.require("B")?;
    let mut scenarios: usize = c.require("N")?;
    let verbosity: u32 = c.require("V")?;
    let opts_base = HkwOptions {
        moment_tol: c.require("EM")?,
        corr_tol: c.require("EC")?,
        max_trials: c.require("MT")?,
        max_iterations: c.require("MI")?,
        verbosity,
        ..HkwOptions::default()
    };
    let seed: u64 = c.parse("seed")?.unwrap_or(DEFAULT_SEED);
    let stream: u64 = c.parse("stream")?.unwrap_or(DEFAULT_STREAM);
    let generate_targets = c.flag("G")?;
    let output = match c.str("O") {
        Some(o) => o.to_string(),
        None => Path::new(&input).with_extension("stoch").to_string_lossy().into_owned(),
    };
    let blocks = blocks(&c)?;
    if verbosity >= 1 {
        echo(&c, err);
    }

    let base = read_std(&read_text(&input)?).map_err(|e| stage(format!("{input}: {e}")))?;
    let sel = RandomizationSelection::from_mask(mask, base.arc_count(), base.commodity_count())?;
    if sel.contains(Family::ComCapacity) && !base.uses_com_capacity() {
        return Err(stage("mask selects commodity capacities but the instance has none"));
    }
    let n = sel.variable_count();

    let (targets, r) = if generate_targets {
        let t = assemble_targets(&base, &sel, dist, alpha, beta)?;
        let r = assemble_correlation(&sel, &blocks)?;
        if let Some(p) = c.str("MO") {
            write_text(p, &write_moments(&t))?;
        }
        if let Some(p) = c.str("CO") {
            write_text(p, &write_corr(&r))?;
        }
        (t, r)
    } else {
        let p = c
            .str("MO")
            .ok_or_else(|| CliError::Usage("-MO is required unless targets are generated with -G".into()))?;
        let t = read_moments(&read_text(p)?).map_err(|e| stage(format!("{p}: {e}")))?;
        let r = match c.str("CO") {
            Some(p) => read_corr(&read_text(p)?).map_err(|e| stage(format!("{p}: {e}")))?,
            None => assemble_correlation(&sel, &blocks)?,
        };
        (t, r)
    };
    if targets.len() != n || r.dim() != n {
        return Err(stage(format!(
            "targets cover {} variables and the correlation {}, but mask {mask} selects {n}",
            targets.len(),
            r.dim()
        )));
    }

    let probs = match c.str("P") {
        Some(p) => {
            let probs = read_probs(&read_text(p)?).map_err(|e| stage(format!("{p}: {e}")))?;
            if c.source("N") == Some(&Source::Default) {
                scenarios = probs.len();
            } else if probs.len() != scenarios {
                return Err(stage(format!("{p} lists {} probabilities for {scenarios} scenarios", probs.len())));
            }
            Some(probs)
        }
        None => None,
    };
    let start_matrix = match c.str("HI") {
        Some(p) => {
            let m = read_hkwmat(&read_text(p)?).map_err(|e| stage(format!("{p}: {e}")))?;
            let m = match &probs {
                Some(pr) if pr.len() == m.scenario_count() => {
                    ScenarioMatrix::new(m.variable_count(), m.scenario_count(), m.values().to_vec(), pr.clone())?
                }
                _ => m,
            };
            Some(m)
        }
        None => None,
    };
    let opts = HkwOptions {
        scenario_count: scenarios,
        start_matrix,
        ..opts_base
    };

    let mut rng = Pcg32::new(seed, stream);
    let matrix = generate_scenarios(&targets, &r, &opts, probs.as_deref(), &mut rng)?;
    if let Some(p) = c.str("HO") {
        write_text(p, &write_hkwmat(&matrix))?;
    }
    let negative = count_negative(&matrix);
    if negative > 0 {
        let _ = writeln!(err, "warning: {negative} generated values are negative");
    }
    let (retained, report) = filter(&base, &sel, &matrix)?;

    let file = File::create(&output).map_err(|e| stage(format!("cannot write {output}: {e}")))?;
    let mut w = BufWriter::new(file);
    write_stochastic_to(&base, &sel, &retained, &mut w)?;
    w.flush().map_err(|e| stage(format!("cannot write {output}: {e}")))?;

    let _ = writeln!(
        out,
        "scenarios tested {}, rejected {}, retained {}; wrote {output}",
        report.tested,
        report.rejected,
        report.retained()
    );
    Ok(())
}

/// Run `stogen` with `argv` (program name excluded); returns the exit code.
pub fn run_stogen(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = run(argv, out, err);
    finish(&STOGEN, result, out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_flags_are_symmetric() {
        assert_eq!(block_flag("XDA").as_deref(), Some("XDA"));
        assert_eq!(block_flag("XAD").as_deref(), Some("XDA"));
        assert_eq!(block_flag("XCF").as_deref(), Some("XFC"));
        assert_eq!(block_flag("XDD").as_deref(), Some("XDD"));
        assert_eq!(block_flag("XDZ"), None);
        assert_eq!(block_flag("XDAA"), None);
        assert_eq!(block_flag("X"), None);
    }

    #[test]
    fn block_flag_command_decodes() {
        let argv: Vec<String> = "-I instB.std -F S -S 3 -G -T U -A 0.25 -B 0.3 -XDD 0.5 -XDA -0.3 -XAA 0.7"
            .split_whitespace()
            .map(String::from)
            .collect();
        let c = resolve_config(&STOGEN, &argv).unwrap();
        assert!(c.flag("G").unwrap());
        assert_eq!(c.parse::<f64>("B").unwrap(), Some(0.3));
        let b = blocks(&c).ok().unwrap();
        assert_eq!(b.get(Family::Demand, Family::Demand), 0.5);
        assert_eq!(b.get(Family::ArcCapacity, Family::Demand), -0.3);
        assert_eq!(b.get(Family::ArcCapacity, Family::ArcCapacity), 0.7);
        assert_eq!(b.get(Family::FixedCost, Family::FixedCost), 0.0);
    }
}
