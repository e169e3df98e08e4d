//! The line-oriented splitting file format (`.gog`).
//!
//! ```text
//! # comments and blank lines are skipped
//! vertex <id> free <rank>
//! vertex <id> abelian <rank>
//! vertex <id> surface <o|n> <genus> <punctures>
//! vertex <id> rigid <strategy> gens=<g1,...> rels=<w1;...> periph=<w;...>
//! edge <id> from=<v> to=<u> rank=<r> tree=<0|1> [silver=<0|1>]
//!      alpha=<images> omega=<images>
//! ```
//!
//! Ids match `[a-z][a-z0-9]*`. Generator names are synthesized from the
//! vertex id: `v_x1..` (free), `v_m1..` (abelian), `v_p1.. v_a1 v_b1..` or
//! `v_v1..` (surface); rigid generators are the declared names prefixed
//! with `<id>_`. Boundary images are `;`-separated words over the endpoint
//! generators, with `(c1,c2,...)` as vector sugar for abelian endpoints.
//! Rigid strategies are `free`, `abelian`, `surface`, `external`, or
//! `graph:<relative-path>` (resolved against the including file).

use crate::error::GogError;
use crate::graph::{Edge, EdgeId, GraphOfGroups, VertexId};
use crate::group::{GroupClass, GroupHandle, RigidData, Strategy};
use crate::surface::SurfaceSig;
use crate::word::{sym, Sym, Word};
use std::collections::BTreeMap;
use std::path::Path;

fn err_at(line: usize, msg: impl Into<String>) -> GogError {
    GogError::ParseAt { line, msg: msg.into() }
}

/// Splits `key=value` fields where values may contain spaces (words) but
/// never `=`.
fn fields(tokens: &[&str], line: usize) -> Result<BTreeMap<String, String>, GogError> {
    let mut out = BTreeMap::new();
    let mut key: Option<String> = None;
    let mut value = String::new();
    for tok in tokens {
        if let Some(eq) = tok.find('=') {
            if let Some(k) = key.take() {
                out.insert(k, value.trim().to_string());
                value.clear();
            }
            key = Some(tok[..eq].to_string());
            value.push_str(&tok[eq + 1..]);
        } else if key.is_some() {
            value.push(' ');
            value.push_str(tok);
        } else {
            return Err(err_at(line, format!("unexpected token `{tok}`")));
        }
    }
    if let Some(k) = key {
        out.insert(k, value.trim().to_string());
    }
    Ok(out)
}

fn synth_gens(id: &VertexId, prefix: &str, count: usize) -> Vec<Sym> {
    (1..=count).map(|i| sym(&format!("{id}_{prefix}{i}"))).collect()
}

fn surface_gens(id: &VertexId, sig: &SurfaceSig) -> Vec<Sym> {
    let mut out = Vec::new();
    for i in 1..=sig.punctures {
        out.push(sym(&format!("{id}_p{i}")));
    }
    if sig.orientable {
        for j in 1..=sig.genus {
            out.push(sym(&format!("{id}_a{j}")));
            out.push(sym(&format!("{id}_b{j}")));
        }
    } else {
        for j in 1..=sig.genus {
            out.push(sym(&format!("{id}_v{j}")));
        }
    }
    out
}

/// Parses one image list: `;`-separated words, vectors in parentheses
/// rewritten over the target's generators.
fn parse_images(
    spec: &str,
    target: &GroupHandle,
    line: usize,
) -> Result<Vec<Word>, GogError> {
    let mut out = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(stripped) = part.strip_prefix('(') {
            let inner = stripped
                .strip_suffix(')')
                .ok_or_else(|| err_at(line, format!("unclosed vector `{part}`")))?;
            let coords: Result<Vec<i64>, _> =
                inner.split(',').map(|c| c.trim().parse::<i64>()).collect();
            let coords = coords.map_err(|_| err_at(line, format!("bad vector `{part}`")))?;
            if coords.len() != target.rank() {
                return Err(err_at(
                    line,
                    format!("vector length {} vs vertex rank {}", coords.len(), target.rank()),
                ));
            }
            out.push(target.vector_to_word(&coords));
        } else {
            let w = Word::parse(part).map_err(|e| err_at(line, e.to_string()))?;
            target
                .presentation()
                .check_word(&w)
                .map_err(|e| err_at(line, format!("image `{part}`: {e}")))?;
            out.push(w);
        }
    }
    Ok(out)
}

/// Parses a splitting file. `base` resolves `graph:` strategy references;
/// passing `None` rejects them.
pub fn parse_splitting(text: &str, base: Option<&Path>) -> Result<GraphOfGroups, GogError> {
    let mut g = GraphOfGroups::new();
    // two passes: vertices first so edge images can be checked
    let mut edge_lines: Vec<(usize, Vec<String>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "vertex" => {
                if tokens.len() < 3 {
                    return Err(err_at(line, "vertex needs an id and a class"));
                }
                let id = VertexId::new(tokens[1]).map_err(|e| err_at(line, e.to_string()))?;
                if g.vertices().contains_key(&id) {
                    return Err(err_at(line, format!("duplicate vertex id {id}")));
                }
                let handle = parse_vertex(&id, &tokens[2..], line, base)?;
                g.add_vertex(id, handle);
            }
            "edge" => {
                edge_lines.push((line, tokens[1..].iter().map(|s| s.to_string()).collect()));
            }
            other => return Err(err_at(line, format!("unknown directive `{other}`"))),
        }
    }
    for (line, tokens) in edge_lines {
        if tokens.is_empty() {
            return Err(err_at(line, "edge needs an id"));
        }
        let id = EdgeId::new(&tokens[0]).map_err(|e| err_at(line, e.to_string()))?;
        if g.edges().contains_key(&id) {
            return Err(err_at(line, format!("duplicate edge id {id}")));
        }
        let toks: Vec<&str> = tokens[1..].iter().map(|s| s.as_str()).collect();
        let f = fields(&toks, line)?;
        for key in f.keys() {
            if !["from", "to", "rank", "tree", "silver", "alpha", "omega"].contains(&key.as_str()) {
                return Err(err_at(line, format!("unknown edge field `{key}`")));
            }
        }
        let get = |k: &str| f.get(k).ok_or_else(|| err_at(line, format!("edge misses `{k}=`")));
        let from = VertexId::new(get("from")?).map_err(|e| err_at(line, e.to_string()))?;
        let to = VertexId::new(get("to")?).map_err(|e| err_at(line, e.to_string()))?;
        let rank: usize =
            get("rank")?.parse().map_err(|_| err_at(line, "rank must be a number"))?;
        let tree = match get("tree")?.as_str() {
            "0" => false,
            "1" => true,
            other => return Err(err_at(line, format!("tree must be 0 or 1, got `{other}`"))),
        };
        let silver = match f.get("silver").map(|s| s.as_str()) {
            None | Some("0") => false,
            Some("1") => true,
            Some(other) => return Err(err_at(line, format!("silver must be 0 or 1, got `{other}`"))),
        };
        let from_handle = g
            .vertices()
            .get(&from)
            .ok_or_else(|| err_at(line, format!("edge references missing vertex {from}")))?
            .clone();
        let to_handle = g
            .vertices()
            .get(&to)
            .ok_or_else(|| err_at(line, format!("edge references missing vertex {to}")))?
            .clone();
        let alpha = if rank == 0 {
            vec![]
        } else {
            parse_images(get("alpha")?, &from_handle, line)?
        };
        let omega = if rank == 0 { vec![] } else { parse_images(get("omega")?, &to_handle, line)? };
        if alpha.len() != rank || omega.len() != rank {
            return Err(err_at(
                line,
                format!("rank {} but {}/{} boundary images", rank, alpha.len(), omega.len()),
            ));
        }
        g.add_edge(id, Edge { from, to, rank, alpha, omega, tree, silver });
    }
    Ok(g)
}

fn parse_vertex(
    id: &VertexId,
    tokens: &[&str],
    line: usize,
    base: Option<&Path>,
) -> Result<GroupHandle, GogError> {
    match tokens[0] {
        "free" => {
            let rank: usize = tokens
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err_at(line, "free needs a rank"))?;
            Ok(GroupHandle::free_named(synth_gens(id, "x", rank)))
        }
        "abelian" => {
            let rank: usize = tokens
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err_at(line, "abelian needs a rank"))?;
            Ok(GroupHandle::abelian_named(synth_gens(id, "m", rank)))
        }
        "surface" => {
            if tokens.len() < 4 {
                return Err(err_at(line, "surface needs <o|n> <genus> <punctures>"));
            }
            let orientable = match tokens[1] {
                "o" => true,
                "n" => false,
                other => return Err(err_at(line, format!("orientability must be o or n, got `{other}`"))),
            };
            let genus = tokens[2].parse().map_err(|_| err_at(line, "bad genus"))?;
            let punctures = tokens[3].parse().map_err(|_| err_at(line, "bad puncture count"))?;
            let sig = SurfaceSig::new(orientable, genus, punctures);
            if !sig.is_supported_vertex() {
                return Err(err_at(line, format!("unsupported surface signature at {id}")));
            }
            GroupHandle::surface_named(sig, surface_gens(id, &sig))
                .map_err(|e| err_at(line, e.to_string()))
        }
        "rigid" => {
            if tokens.len() < 2 {
                return Err(err_at(line, "rigid needs a strategy"));
            }
            let f = fields(&tokens[2..], line)?;
            for key in f.keys() {
                if !["gens", "rels", "periph"].contains(&key.as_str()) {
                    return Err(err_at(line, format!("unknown rigid field `{key}`")));
                }
            }
            let gens_spec =
                f.get("gens").ok_or_else(|| err_at(line, "rigid needs gens=..."))?;
            let local: Vec<String> =
                gens_spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let gens: Vec<Sym> = local
                .iter()
                .map(|gname| {
                    Sym::new(&format!("{id}_{gname}")).map_err(|e| err_at(line, e.to_string()))
                })
                .collect::<Result<_, _>>()?;
            // words in the file use the local generator names
            let prefix_word = |spec: &str| -> Result<Word, GogError> {
                let w = Word::parse(spec).map_err(|e| err_at(line, e.to_string()))?;
                w.substitute(&|s: &Sym| {
                    if local.contains(&s.to_string()) {
                        Some(Word::gen(sym(&format!("{id}_{s}"))))
                    } else {
                        None
                    }
                })
                .map_err(|e| err_at(line, format!("{e} (rigid words use the local names)")))
            };
            let parse_list = |key: &str| -> Result<Vec<Word>, GogError> {
                match f.get(key) {
                    None => Ok(vec![]),
                    Some(spec) => spec
                        .split(';')
                        .map(|p| p.trim())
                        .filter(|p| !p.is_empty())
                        .map(prefix_word)
                        .collect(),
                }
            };
            let relators = parse_list("rels")?;
            let peripherals = parse_list("periph")?;
            let strategy = match tokens[1] {
                "free" => Strategy::Free,
                "abelian" => Strategy::Abelian,
                "surface" => Strategy::Surface,
                "external" => Strategy::External(BTreeMap::new()),
                spec if spec.starts_with("graph:") => {
                    let rel = &spec["graph:".len()..];
                    let Some(base) = base else {
                        return Err(err_at(
                            line,
                            "graph: strategy needs a base directory to resolve against",
                        ));
                    };
                    let path = base.join(rel);
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        err_at(line, format!("cannot read {}: {e}", path.display()))
                    })?;
                    let sub = parse_splitting(&text, path.parent())?;
                    Strategy::Graph(Box::new(sub))
                }
                other => return Err(err_at(line, format!("unknown rigid strategy `{other}`"))),
            };
            GroupHandle::rigid(gens, RigidData { relators, peripherals, strategy })
                .map_err(|e| err_at(line, e.to_string()))
        }
        other => Err(err_at(line, format!("unknown vertex class `{other}`"))),
    }
}

/// Canonical text form; `parse ∘ print` is the identity on parsed graphs.
pub fn print_splitting(g: &GraphOfGroups) -> String {
    let mut out = String::new();
    for (id, handle) in g.vertices() {
        match handle.class() {
            GroupClass::Free => out.push_str(&format!("vertex {id} free {}\n", handle.rank())),
            GroupClass::Abelian => {
                out.push_str(&format!("vertex {id} abelian {}\n", handle.rank()))
            }
            GroupClass::Surface(sig) => out.push_str(&format!(
                "vertex {id} surface {} {} {}\n",
                if sig.orientable { "o" } else { "n" },
                sig.genus,
                sig.punctures
            )),
            GroupClass::Rigid(data) => {
                let strip = |s: &Sym| -> String {
                    s.as_str()
                        .strip_prefix(&format!("{id}_"))
                        .unwrap_or(s.as_str())
                        .to_string()
                };
                let local_word = |w: &Word| -> String {
                    w.substitute(&|s: &Sym| Some(Word::gen(sym(&strip(s)))))
                        .map(|w| w.display())
                        .unwrap_or_else(|_| w.display())
                };
                let gens: Vec<String> = handle.gens().iter().map(strip).collect();
                out.push_str(&format!(
                    "vertex {id} rigid {} gens={}",
                    data.strategy.tag(),
                    gens.join(",")
                ));
                if !data.relators.is_empty() {
                    let rels: Vec<String> = data.relators.iter().map(&local_word).collect();
                    out.push_str(&format!(" rels={}", rels.join(";")));
                }
                if !data.peripherals.is_empty() {
                    let per: Vec<String> = data.peripherals.iter().map(&local_word).collect();
                    out.push_str(&format!(" periph={}", per.join(";")));
                }
                out.push('\n');
            }
        }
    }
    for (id, e) in g.edges() {
        let images = |ws: &[Word]| -> String {
            ws.iter().map(|w| w.display()).collect::<Vec<_>>().join(";")
        };
        out.push_str(&format!(
            "edge {id} from={} to={} rank={} tree={}{}",
            e.from,
            e.to,
            e.rank,
            u8::from(e.tree),
            if e.silver { " silver=1" } else { "" }
        ));
        if e.rank > 0 {
            out.push_str(&format!(" alpha={} omega={}", images(&e.alpha), images(&e.omega)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    const DOUBLE: &str = "\
# the standard double
vertex a free 2
vertex b free 2
edge e from=a to=b rank=1 tree=1 alpha=a_x1^2 a_x2^3 omega=b_x1^2 b_x2^3
";

    #[test]
    fn parses_the_double() {
        let g = parse_splitting(DOUBLE, None).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert!(g.validate().is_ok());
        let e = g.edge(&crate::graph::eid("e"));
        assert_eq!(e.alpha, vec![word("a_x1^2 a_x2^3")]);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = parse_splitting(DOUBLE, None).unwrap();
        let printed = print_splitting(&g);
        let again = parse_splitting(&printed, None).unwrap();
        assert_eq!(g, again);
        assert_eq!(print_splitting(&again), printed);
    }

    #[test]
    fn vector_sugar_for_abelian_targets() {
        let text = "\
vertex m abelian 2
vertex a free 2
edge e from=m to=a rank=1 tree=1 alpha=(1,0) omega=a_x1^2 a_x2^3
";
        let g = parse_splitting(text, None).unwrap();
        assert_eq!(g.edge(&crate::graph::eid("e")).alpha, vec![word("m_m1")]);
    }

    #[test]
    fn rejects_unknown_directives_and_fields() {
        assert!(matches!(
            parse_splitting("vortex a free 2\n", None),
            Err(GogError::ParseAt { line: 1, .. })
        ));
        let text = "vertex a free 1\nedge e from=a to=a rank=1 tree=0 color=red alpha=a_x1 omega=a_x1\n";
        let err = parse_splitting(text, None).unwrap_err();
        assert!(err.to_string().contains("color"));
    }

    #[test]
    fn rejects_non_spanning_tree_at_validation() {
        let text = "\
vertex a free 2
vertex b free 2
edge e from=a to=b rank=1 tree=0 alpha=a_x1 omega=b_x1
";
        let g = parse_splitting(text, None).unwrap();
        let err = g.validate().unwrap_err();
        assert!(err.to_string().contains("maximal subtree"));
    }

    #[test]
    fn rigid_vertices_use_local_names() {
        let text = "\
vertex r rigid free gens=x,y periph=x^2 y^3
vertex m abelian 1
edge e from=m to=r rank=1 tree=1 alpha=(1) omega=r_x^2 r_y^3
";
        let g = parse_splitting(text, None).unwrap();
        assert!(g.validate().is_ok());
        let printed = print_splitting(&g);
        assert!(printed.contains("gens=x,y"));
        assert!(printed.contains("periph=x^2 y^3"));
        assert_eq!(parse_splitting(&printed, None).unwrap(), g);
    }

    #[test]
    fn surface_vertices_and_signature_guard() {
        let ok = "vertex q surface o 0 4\n";
        let g = parse_splitting(ok, None).unwrap();
        assert_eq!(g.vertex(&crate::graph::vid("q")).rank(), 4);
        // the projective plane has torsion
        assert!(parse_splitting("vertex q surface n 1 0\n", None).is_err());
    }
}
