//! Text formats: the edge list for networks and CSV for results.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a value
//! parsed back from any CSV field is bit-identical to the one written.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::SweepResult;
use crate::game::DiffusionTrace;
use crate::graph::{validate, MultiplexNetwork};

/// Edge list: header `n l`, then one `layer u v` line per edge with `u < v`,
/// sorted by layer then endpoints.
pub fn write_edge_list(net: &MultiplexNetwork) -> String {
    let mut out = format!("{} {}\n", net.nodes(), net.layers());
    for layer in 0..net.layers() {
        for (u, v) in net.edges(layer) {
            writeln!(out, "{layer} {u} {v}").unwrap();
        }
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<MultiplexNetwork> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n l` header".into(),
    })?;
    let header = parse_fields::<2>(header_line, header)?;
    let (nodes, layers) = (header[0], header[1]);
    if nodes == 0 || layers == 0 {
        return Err(Error::Parse {
            line: header_line,
            message: "node and layer counts must be positive".into(),
        });
    }
    let mut net = MultiplexNetwork::empty(nodes, layers);
    for (line, text) in lines {
        let [layer, u, v] = parse_fields::<3>(line, text)?;
        let bad = |message: String| Error::Parse { line, message };
        if layer >= layers {
            return Err(bad(format!("layer {layer} out of range (l = {layers})")));
        }
        if u >= nodes || v >= nodes {
            return Err(bad(format!("endpoint out of range (n = {nodes})")));
        }
        if u == v {
            return Err(bad(format!("self-loop on node {u}")));
        }
        if u > v {
            return Err(bad(format!("edge {u} {v} must be written with u < v")));
        }
        if !net.insert_edge(layer, u, v)? {
            return Err(bad(format!("duplicate edge {u} {v} in layer {layer}")));
        }
    }
    let report = validate(&net);
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidNetwork(v.to_string()));
    }
    Ok(net)
}

fn parse_fields<const N: usize>(line: usize, text: &str) -> Result<[usize; N]> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::Parse {
            line,
            message: format!("expected {N} fields, found {}", fields.len()),
        });
    }
    let mut out = [0usize; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f.parse().map_err(|_| Error::Parse {
            line,
            message: format!("'{f}' is not a non-negative integer"),
        })?;
    }
    Ok(out)
}

pub fn save_network(path: &Path, net: &MultiplexNetwork) -> Result<()> {
    fs::write(path, write_edge_list(net)).map_err(|e| Error::io(path, e))
}

pub fn load_network(path: &Path) -> Result<MultiplexNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_edge_list(&text)
}

pub fn trace_csv(trace: &DiffusionTrace) -> String {
    let mut out = String::from("step,adopters,fraction\n");
    for (step, &count) in trace.adopters_per_step.iter().enumerate() {
        let fraction = count as f64 / trace.nodes as f64;
        writeln!(out, "{step},{count},{fraction}").unwrap();
    }
    writeln!(out, "# terminal={}", trace.terminal_status).unwrap();
    out
}

/// Mean-field curve `q_m` next to the lower bound, row by row.
pub fn analytic_csv(q: &[f64], bound: &[f64]) -> Result<String> {
    if q.len() != bound.len() {
        return Err(Error::Shape {
            left: q.len(),
            right: bound.len(),
        });
    }
    let mut out = String::from("m,q_m,bound_m\n");
    for (m, (qm, bm)) in q.iter().zip(bound).enumerate() {
        writeln!(out, "{m},{qm},{bm}").unwrap();
    }
    Ok(out)
}

/// Sweep rows. Rule comparisons put the rule name in the `param` column and
/// the seed fraction in `value`.
pub fn sweep_csv(results: &[SweepResult]) -> String {
    let mut out = String::from(
        "param,value,mean_final_fraction,std_final_fraction,samples,mean_steps,complete_cascades,phase\n",
    );
    for r in results {
        let param = match r.parameter {
            crate::experiments::SweptParameter::Rule => r.rule.name(),
            other => other.name(),
        };
        for p in &r.points {
            writeln!(
                out,
                "{param},{},{},{},{},{},{},{}",
                p.value,
                p.mean_final_fraction,
                p.std_final_fraction,
                p.samples,
                p.mean_steps,
                p.complete_cascades,
                p.phase.map(|l| l.name()).unwrap_or("")
            )
            .unwrap();
        }
    }
    out
}

/// Write `content` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::TerminalStatus;
    use crate::graph::{generate_er_multiplex, GenParams};

    #[test]
    fn empty_network_round_trip() {
        let net = MultiplexNetwork::empty(4, 3);
        let text = write_edge_list(&net);
        assert_eq!(text, "4 3\n");
        assert_eq!(read_edge_list(&text).unwrap(), net);
    }

    #[test]
    fn generated_network_round_trip() {
        let net = generate_er_multiplex(&GenParams {
            nodes: 50,
            layers: 3,
            edge_prob: 0.2,
            rng_seed: 8,
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.txt");
        save_network(&path, &net).unwrap();
        assert_eq!(load_network(&path).unwrap(), net);
    }

    #[test]
    fn malformed_lines_are_rejected_with_line_numbers() {
        let cases = [
            ("3 2\n1 5 5\n", 2),
            ("6 2\n0 1 2\n1 5 5\n", 3),
            ("6 2\n0 1 x\n", 2),
            ("6 2\n0 1\n", 2),
            ("6 2\n2 0 1\n", 2),
            ("6 2\n0 0 9\n", 2),
            ("6 2\n0 3 1\n", 2),
            ("6 2\n0 1 3\n0 1 3\n", 3),
            ("6\n", 1),
        ];
        for (text, line) in cases {
            match read_edge_list(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(read_edge_list("").is_err());
    }

    #[test]
    fn trace_rows() {
        let trace = DiffusionTrace {
            nodes: 500,
            adopters_per_step: vec![125, 300, 500],
            terminal_status: TerminalStatus::CompleteCascade,
            steps_run: 2,
        };
        assert_eq!(
            trace_csv(&trace),
            "step,adopters,fraction\n0,125,0.25\n1,300,0.6\n2,500,1\n# terminal=complete_cascade\n"
        );
    }

    #[test]
    fn analytic_rows() {
        let csv = analytic_csv(&[0.25, 0.3], &[0.25, 0.325]).unwrap();
        assert_eq!(csv.lines().nth(1), Some("0,0.25,0.25"));
        assert!(analytic_csv(&[0.25], &[]).is_err());
    }

    #[test]
    fn floats_round_trip_through_csv() {
        for x in [0.1f64 + 0.2, 1.0 / 3.0, 1e-17, 0.999_999_999_999_965_6] {
            let s = format!("{x}");
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
