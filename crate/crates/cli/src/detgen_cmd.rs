use std::io::Write;

use mcndgen_core::detgen::{generate, GenConfig, OdMode, Topology};
use mcndgen_core::io::{read_graph, write_graph, write_lp, write_mps, write_std};
use mcndgen_core::prng::{Pcg32, DEFAULT_SEED, DEFAULT_STREAM};

use crate::config::{resolve_config, CliConfig, CliError, CommandSpec, FlagSpec};
use crate::{echo, finish, read_text, stage, write_text, RunError};

const FLAGS: &[FlagSpec] = &[
    FlagSpec::value("o", Some("instance"), "output base name"),
    FlagSpec::repeatable("fmt", Some("std"), "output format: std, lp or mps"),
    FlagSpec::value("graphIn", None, "graph file for -topo file"),
    FlagSpec::value("graphOut", None, "write the generated graph here"),
    FlagSpec::value("seed", Some("42"), "generator seed"),
    FlagSpec::value("stream", Some("54"), "generator stream"),
    FlagSpec::value("topo", Some("random"), "random, grid, circular or file"),
    FlagSpec::value("gridX", Some("3"), "grid columns"),
    FlagSpec::value("gridY", Some("3"), "grid rows"),
    FlagSpec::value("nbNodes", Some("10"), "node count"),
    FlagSpec::value("nbCom", Some("10"), "commodity count"),
    FlagSpec::value("nbArcs", None, "extra random arcs [default 40 for random, 0 otherwise]"),
    FlagSpec::value("noParallel", Some("1"), "forbid parallel arcs (0|1)"),
    FlagSpec::value("odMode", Some("single"), "single, shared or random"),
    FlagSpec::value("srcMin", Some("1"), "min sources per commodity (random OD)"),
    FlagSpec::value("srcMax", Some("1"), "max sources per commodity (random OD)"),
    FlagSpec::value("snkMin", Some("1"), "min sinks per commodity (random OD)"),
    FlagSpec::value("snkMax", Some("1"), "max sinks per commodity (random OD)"),
    FlagSpec::value("demMin", Some("5"), "min demand"),
    FlagSpec::value("demMax", Some("25"), "max demand"),
    FlagSpec::value("fixMin", Some("100"), "min fixed cost"),
    FlagSpec::value("fixMax", Some("400"), "max fixed cost"),
    FlagSpec::value("varMin", Some("1"), "min variable cost"),
    FlagSpec::value("varMax", Some("10"), "max variable cost"),
    FlagSpec::value("capMin", Some("50"), "min arc capacity"),
    FlagSpec::value("capMax", Some("200"), "max arc capacity"),
    FlagSpec::value("bndMin", Some("10"), "min commodity capacity"),
    FlagSpec::value("bndMax", Some("50"), "max commodity capacity"),
    FlagSpec::value("capInt", Some("1"), "integral arc capacities (0|1)"),
    FlagSpec::value("bndInt", Some("1"), "integral commodity capacities (0|1)"),
    FlagSpec::value("useBnd", Some("0"), "emit commodity capacities (0|1)"),
    FlagSpec::value("rZeroFix", Some("0"), "share of retuned arcs with zero fixed cost"),
    FlagSpec::value("rFullCap", Some("0"), "share of retuned arcs with uncapacitated capacity"),
    FlagSpec::value("rZeroBnd", Some("0"), "share of retuned arc-commodity pairs with zero bound"),
    FlagSpec::value("rMaxBnd", Some("0"), "share of retuned arc-commodity pairs with full bound"),
    FlagSpec::value("adjFix", Some("1"), "fixed cost multiplier (>= 1)"),
    FlagSpec::value("adjCap", Some("1"), "capacity multiplier (in (0, 1])"),
    FlagSpec::value("tuneExtrasOnly", Some("0"), "retune only the extra random arcs (0|1)"),
    FlagSpec::value("V", Some("0"), "verbosity"),
];

pub const DETGEN: CommandSpec = CommandSpec {
    name: "detgen",
    summary: "Generate a deterministic fixed-charge network design instance.",
    flags: FLAGS,
    dynamic: None,
    dynamic_help: "",
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Std,
    Lp,
    Mps,
}

fn bad(key: &str, v: &str, allowed: &str) -> CliError {
    CliError::Usage(format!("invalid value `{v}` for -{key} (expected {allowed})"))
}

fn gen_config(c: &CliConfig) -> Result<GenConfig, CliError> {
    let topo = c.str("topo").unwrap_or("random");
    let topology = match topo {
        "random" => Topology::Random,
        "grid" => Topology::Grid,
        "circular" => Topology::Circular,
        "file" => Topology::File,
        v => return Err(bad("topo", v, "random, grid, circular or file")),
    };
    let od_mode = match c.str("odMode").unwrap_or("single") {
        "single" => OdMode::Single,
        "shared" => OdMode::Shared,
        "random" => OdMode::Random,
        v => return Err(bad("odMode", v, "single, shared or random")),
    };
    Ok(GenConfig {
        topology,
        grid_x: c.require("gridX")?,
        grid_y: c.require("gridY")?,
        node_count: c.require("nbNodes")?,
        commodity_count: c.require("nbCom")?,
        extra_random_arcs: match c.parse("nbArcs")? {
            Some(v) => v,
            None if topology == Topology::Random => GenConfig::default().extra_random_arcs,
            None => 0,
        },
        allow_parallel: !c.flag("noParallel")?,
        src_min: c.require("srcMin")?,
        src_max: c.require("srcMax")?,
        snk_min: c.require("snkMin")?,
        snk_max: c.require("snkMax")?,
        od_mode,
        dem_min: c.require("demMin")?,
        dem_max: c.require("demMax")?,
        fix_min: c.require("fixMin")?,
        fix_max: c.require("fixMax")?,
        var_min: c.require("varMin")?,
        var_max: c.require("varMax")?,
        cap_min: c.require("capMin")?,
        cap_max: c.require("capMax")?,
        bnd_min: c.require("bndMin")?,
        bnd_max: c.require("bndMax")?,
        cap_integer: c.flag("capInt")?,
        bnd_integer: c.flag("bndInt")?,
        use_com_capacity: c.flag("useBnd")?,
        ratio_zero_fix: c.require("rZeroFix")?,
        ratio_full_cap: c.require("rFullCap")?,
        ratio_zero_bnd: c.require("rZeroBnd")?,
        ratio_max_bnd: c.require("rMaxBnd")?,
        fix_multiplier: c.require("adjFix")?,
        cap_multiplier: c.require("adjCap")?,
        tune_extras_only: c.flag("tuneExtrasOnly")?,
    })
}

fn formats(c: &CliConfig) -> Result<Vec<OutFormat>, CliError> {
    let mut out = Vec::new();
    for v in c.values("fmt") {
        let f = match v.as_str() {
            "std" => OutFormat::Std,
            "lp" => OutFormat::Lp,
            "mps" => OutFormat::Mps,
            other => return Err(bad("fmt", other, "std, lp or mps")),
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), RunError> {
    let c = resolve_config(&DETGEN, argv)?;
    let config = gen_config(&c)?;
    let formats = formats(&c)?;
    let seed: u64 = c.parse("seed")?.unwrap_or(DEFAULT_SEED);
    let stream: u64 = c.parse("stream")?.unwrap_or(DEFAULT_STREAM);
    let verbosity: u32 = c.require("V")?;
    let base = c.str("o").unwrap_or("instance").to_string();
    if verbosity >= 1 {
        echo(&c, err);
    }

    let graph_in = match c.str("graphIn") {
        Some(path) => Some(read_graph(&read_text(path)?).map_err(|e| stage(format!("{path}: {e}")))?),
        None => None,
    };
    let mut rng = Pcg32::new(seed, stream);
    let inst = generate(&config, &mut rng, graph_in.as_ref())?;

    if let Some(path) = c.str("graphOut") {
        write_text(path, &write_graph(&inst.graph))?;
    }
    for f in formats {
        let (ext, text) = match f {
            OutFormat::Std => ("std", write_std(&inst)?),
            OutFormat::Lp => ("lp", write_lp(&inst)?),
            OutFormat::Mps => ("mps", write_mps(&inst)?),
        };
        let path = format!("{base}.{ext}");
        write_text(&path, &text)?;
        let _ = writeln!(
            out,
            "wrote {path} ({} nodes, {} arcs, {} commodities)",
            inst.node_count(),
            inst.arc_count(),
            inst.commodity_count()
        );
    }
    Ok(())
}

/// Run `detgen` with `argv` (program name excluded); returns the exit code.
pub fn run_detgen(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = run(argv, out, err);
    finish(&DETGEN, result, out, err)
}
