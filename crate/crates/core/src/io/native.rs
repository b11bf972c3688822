//! STD instance files and STOCH scenario files.
//!
//! ```text
//! |N| |A| |K| useB
//! tail head f u          (|A| lines)
//! origin destination d   (|K| lines)
//! c ... (|K| values)     (|A| lines)
//! b ... (|K| values)     (|A| lines, only when useB = 1)
//! ```
//!
//! A STOCH file repeats `SCENARIO t p` followed by a full STD body.

use std::io::Write;

use super::{mul_add, push_real, push_reals, Tokens};
use crate::error::{Error, Result};
use crate::model::{unflatten, validate, Arc, Commodity, DetInstance, Graph, RandomizationSelection, ScenarioMatrix};

const PROBS_TOL: f64 = 1e-9;

fn push_body(out: &mut String, inst: &DetInstance) {
    use std::fmt::Write;
    let nk = inst.commodity_count();
    writeln!(
        out,
        "{} {} {} {}",
        inst.node_count(),
        inst.arc_count(),
        nk,
        u8::from(inst.uses_com_capacity())
    )
    .expect("writing to a String");
    for (a, arc) in inst.graph.arcs.iter().enumerate() {
        write!(out, "{} {} ", arc.tail + 1, arc.head + 1).expect("writing to a String");
        push_reals(out, &[inst.fixed_cost[a], inst.capacity[a]]);
    }
    for c in &inst.commodities {
        write!(out, "{} {} ", c.origin + 1, c.destination + 1).expect("writing to a String");
        push_real(out, c.demand);
        out.push('\n');
    }
    if nk > 0 {
        for row in inst.var_cost.chunks(nk) {
            push_reals(out, row);
        }
        if let Some(b) = &inst.com_capacity {
            for row in b.chunks(nk) {
                push_reals(out, row);
            }
        }
    }
}

pub fn write_std(instance: &DetInstance) -> Result<String> {
    let problems = validate(instance);
    if !problems.is_empty() {
        let list: Vec<String> = problems.iter().map(|v| v.to_string()).collect();
        return Err(Error::Argument(format!("instance is not valid: {}", list.join("; "))));
    }
    let mut out = String::new();
    push_body(&mut out, instance);
    Ok(out)
}

/// `strict` rejects negative parameter values; scenario files may carry
/// realized values below zero and are read with `strict = false`.
fn read_body(t: &mut Tokens<'_>, strict: bool) -> Result<DetInstance> {
    let header = t.line();
    let n = t.usize("node count")?;
    let na = t.usize("arc count")?;
    let nk = t.usize("commodity count")?;
    let use_b = match t.usize("useB flag")? {
        0 => false,
        1 => true,
        v => return Err(Error::parse(header, format!("useB flag must be 0 or 1, found {v}"))),
    };
    if n == 0 {
        return Err(Error::parse(header, "instance has no nodes"));
    }
    let ak = na.checked_mul(nk);
    let needed = ak
        .and_then(|ak| ak.checked_mul(if use_b { 2 } else { 1 }))
        .and_then(|v| mul_add(na, 4, v))
        .and_then(|v| mul_add(nk, 3, v));
    t.require(needed, "instance body")?;

    let value = |t: &mut Tokens<'_>, what: &str| if strict { t.nonneg(what) } else { t.real(what) };

    let mut graph = Graph::new(n);
    let mut fixed_cost = Vec::with_capacity(na);
    let mut capacity = Vec::with_capacity(na);
    for _ in 0..na {
        let line = t.line();
        let tail = t.index("arc tail", n)?;
        let head = t.index("arc head", n)?;
        if tail == head {
            return Err(Error::parse(line, format!("self-loop at node {}", tail + 1)));
        }
        graph.arcs.push(Arc { tail, head });
        fixed_cost.push(value(t, "fixed cost")?);
        capacity.push(value(t, "arc capacity")?);
    }
    let mut commodities = Vec::with_capacity(nk);
    for _ in 0..nk {
        let line = t.line();
        let origin = t.index("commodity origin", n)?;
        let destination = t.index("commodity destination", n)?;
        if origin == destination {
            return Err(Error::parse(line, format!("commodity origin equals destination ({})", origin + 1)));
        }
        let demand = value(t, "demand")?;
        commodities.push(Commodity {
            origin,
            destination,
            demand,
        });
    }
    let ak = ak.expect("checked above");
    let mut var_cost = Vec::with_capacity(ak);
    for _ in 0..ak {
        var_cost.push(value(t, "variable cost")?);
    }
    let com_capacity = if use_b {
        let mut b = Vec::with_capacity(ak);
        for _ in 0..ak {
            b.push(value(t, "commodity capacity")?);
        }
        Some(b)
    } else {
        None
    };
    Ok(DetInstance {
        graph,
        commodities,
        fixed_cost,
        capacity,
        var_cost,
        com_capacity,
    })
}

pub fn read_std(text: &str) -> Result<DetInstance> {
    let mut t = Tokens::new(text);
    let inst = read_body(&mut t, true)?;
    t.expect_end()?;
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticBlock {
    /// 1-based scenario number as written in the header.
    pub number: usize,
    pub probability: f64,
    pub instance: DetInstance,
}

/// Stream one `SCENARIO t p` block per retained scenario.
pub fn write_stochastic_to<W: Write>(
    base: &DetInstance,
    selection: &RandomizationSelection,
    retained: &ScenarioMatrix,
    out: &mut W,
) -> Result<()> {
    let mut block = String::new();
    for t in 0..retained.scenario_count() {
        let inst = unflatten(base, selection, &retained.column(t))?;
        block.clear();
        block.push_str(&format!("SCENARIO {} ", t + 1));
        push_real(&mut block, retained.probabilities()[t]);
        block.push('\n');
        push_body(&mut block, &inst);
        out.write_all(block.as_bytes())?;
    }
    Ok(())
}

pub fn write_stochastic(
    base: &DetInstance,
    selection: &RandomizationSelection,
    retained: &ScenarioMatrix,
) -> Result<String> {
    let mut buf = Vec::new();
    write_stochastic_to(base, selection, retained, &mut buf)?;
    Ok(String::from_utf8(buf).expect("writers emit ASCII"))
}

pub fn read_stochastic(text: &str) -> Result<Vec<StochasticBlock>> {
    let mut t = Tokens::new(text);
    let mut blocks = Vec::new();
    let mut total = 0.0;
    while t.remaining() > 0 {
        let (line, tok) = t.next("SCENARIO")?;
        if tok != "SCENARIO" {
            return Err(Error::parse(line, format!("expected `SCENARIO`, found `{tok}`")));
        }
        let number = t.usize("scenario number")?;
        if number != blocks.len() + 1 {
            return Err(Error::parse(
                line,
                format!("scenario number {number} out of sequence (expected {})", blocks.len() + 1),
            ));
        }
        let probability = t.nonneg("scenario probability")?;
        if probability > 1.0 + PROBS_TOL {
            return Err(Error::parse(line, format!("probability {probability} exceeds 1")));
        }
        total += probability;
        let instance = read_body(&mut t, false)?;
        blocks.push(StochasticBlock {
            number,
            probability,
            instance,
        });
    }
    if blocks.is_empty() {
        return Err(Error::parse(1, "no scenarios in file"));
    }
    if (total - 1.0).abs() > PROBS_TOL {
        return Err(Error::parse(t.line(), format!("scenario probabilities sum to {total}, not 1")));
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{shaped, tiny};
    use crate::model::{flatten, Family};

    #[test]
    fn tiny_layout() {
        let text = write_std(&tiny(10.0, 5.0)).unwrap();
        assert_eq!(text, "2 1 1 0\n1 2 10 10\n1 2 5\n1\n");
        assert_eq!(read_std(&text).unwrap(), tiny(10.0, 5.0));
    }

    #[test]
    fn header_of_large_shape() {
        let text = write_std(&shaped(20, 315, 200)).unwrap();
        assert_eq!(text.lines().next(), Some("20 315 200 0"));
        assert_eq!(read_std(&text).unwrap(), shaped(20, 315, 200));
    }

    #[test]
    fn commodity_capacity_block() {
        let mut inst = shaped(4, 5, 3);
        inst.com_capacity = Some((0..15).map(|v| v as f64 + 0.5).collect());
        let text = write_std(&inst).unwrap();
        assert!(text.starts_with("4 5 3 1\n"));
        assert_eq!(text.lines().count(), 1 + 5 + 3 + 5 + 5);
        assert_eq!(read_std(&text).unwrap(), inst);
    }

    #[test]
    fn read_errors_carry_lines() {
        let bad = "2 1 1 0\n1 2 10 -10\n1 2 5\n1\n";
        assert!(matches!(read_std(bad), Err(Error::Parse { line: 2, .. })));
        let truncated = "2 1 1 0\n1 2 10 10\n1 2 5\n";
        assert!(matches!(read_std(truncated), Err(Error::Parse { .. })));
        let range = "2 1 1 0\n1 3 10 10\n1 2 5\n1\n";
        assert!(matches!(read_std(range), Err(Error::Parse { line: 2, .. })));
        let trailing = "2 1 1 0\n1 2 10 10\n1 2 5\n1 7\n";
        assert!(matches!(read_std(trailing), Err(Error::Parse { line: 4, .. })));
        let huge = "2 99999999999 99999999999 1\n";
        assert!(matches!(read_std(huge), Err(Error::Parse { .. })));
        let crlf = "2 1 1 0\r\n1 2 10 10\r\n1 2 5\r\n1\r\n";
        assert_eq!(read_std(crlf).unwrap(), tiny(10.0, 5.0));
    }

    #[test]
    fn write_rejects_invalid() {
        assert!(write_std(&tiny(-1.0, 5.0)).is_err());
    }

    #[test]
    fn stochastic_blocks() {
        let base = shaped(3, 4, 2);
        let sel = RandomizationSelection::for_instance(&[Family::Demand], &base);
        let col = flatten(&base, &sel).unwrap();
        let one = ScenarioMatrix::equiprobable(2, 1, col.clone()).unwrap();
        let text = write_stochastic(&base, &sel, &one).unwrap();
        assert_eq!(text, format!("SCENARIO 1 1\n{}", write_std(&base).unwrap()));

        let values = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let three = ScenarioMatrix::equiprobable(2, 3, values).unwrap();
        let text = write_stochastic(&base, &sel, &three).unwrap();
        let blocks = read_stochastic(&text).unwrap();
        assert_eq!(blocks.len(), 3);
        let base_text = write_std(&base).unwrap();
        let base_lines: Vec<&str> = base_text.lines().collect();
        for (t, b) in blocks.iter().enumerate() {
            assert_eq!(b.number, t + 1);
            assert_eq!(b.instance.commodities[0].demand, [1.0, 2.0, 3.0][t]);
            assert_eq!(b.instance.commodities[1].demand, [4.0, 5.0, 6.0][t]);
            let body = write_std(&b.instance).unwrap();
            let differing: Vec<usize> = body
                .lines()
                .zip(&base_lines)
                .enumerate()
                .filter(|(_, (a, b))| a != *b)
                .map(|(i, _)| i)
                .collect();
            // only the two commodity lines (after header + 4 arcs) may differ
            assert!(differing.iter().all(|&i| i == 5 || i == 6), "{differing:?}");
        }
    }

    #[test]
    fn stochastic_reader_checks() {
        let base = tiny(10.0, 5.0);
        let body = write_std(&base).unwrap();
        assert!(read_stochastic(&format!("SCENARIO 2 1\n{body}")).is_err());
        assert!(read_stochastic(&format!("SCENARIO 1 0.5\n{body}")).is_err());
        assert!(read_stochastic(&format!("SCENE 1 1\n{body}")).is_err());
        assert!(read_stochastic("").is_err());
        // realized values below zero are representable in scenario files
        let neg = "SCENARIO 1 1\n2 1 1 0\n1 2 10 10\n1 2 -5\n1\n";
        assert_eq!(read_stochastic(neg).unwrap()[0].instance.commodities[0].demand, -5.0);
    }
}
