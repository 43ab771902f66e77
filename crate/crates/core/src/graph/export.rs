use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::Result;
use crate::graph::{AttrValue, Network, NetworkBuilder};

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn graphml_type(v: &AttrValue) -> &'static str {
    match v {
        AttrValue::Int(_) => "long",
        AttrValue::Float(_) => "double",
        AttrValue::Text(_) => "string",
    }
}

/// GraphML with one `<key>` per node attribute and a `weight` edge key.
pub fn to_graphml(net: &Network) -> String {
    let mut keys: BTreeMap<&str, &'static str> = BTreeMap::new();
    for i in 0..net.node_count() {
        for (k, v) in net.attrs_at(i) {
            let ty = graphml_type(v);
            keys.entry(k.as_str())
                .and_modify(|t| {
                    if *t != ty {
                        *t = if *t == "string" || ty == "string" { "string" } else { "double" };
                    }
                })
                .or_insert(ty);
        }
    }
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (k, ty) in &keys {
        let _ = writeln!(
            s,
            "  <key id=\"{0}\" for=\"node\" attr.name=\"{0}\" attr.type=\"{1}\"/>",
            xml_escape(k),
            ty
        );
    }
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    let _ = writeln!(
        s,
        "  <graph id=\"G\" edgedefault=\"{}\">",
        if net.is_directed() { "directed" } else { "undirected" }
    );
    for (i, id) in net.nodes().iter().enumerate() {
        let attrs = net.attrs_at(i);
        if attrs.is_empty() {
            let _ = writeln!(s, "    <node id=\"{}\"/>", xml_escape(id));
            continue;
        }
        let _ = writeln!(s, "    <node id=\"{}\">", xml_escape(id));
        for (k, v) in attrs {
            let _ = writeln!(
                s,
                "      <data key=\"{}\">{}</data>",
                xml_escape(k),
                xml_escape(&v.to_string())
            );
        }
        s.push_str("    </node>\n");
    }
    for (n, (u, v, w)) in net.edges().enumerate() {
        let _ = writeln!(
            s,
            "    <edge id=\"e{n}\" source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data></edge>",
            xml_escape(u),
            xml_escape(v)
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

/// Graphviz DOT; node attributes become quoted DOT attributes, edge weight is
/// emitted as `weight` and `label`. A `color`/`fillcolor` attribute passes through.
pub fn to_dot(net: &Network, name: &str) -> String {
    let (kw, arrow) = if net.is_directed() {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut s = format!("{kw} \"{}\" {{\n", dot_escape(name));
    for (i, id) in net.nodes().iter().enumerate() {
        let attrs: Vec<String> = net
            .attrs_at(i)
            .iter()
            .map(|(k, v)| format!("\"{}\"=\"{}\"", dot_escape(k), dot_escape(&v.to_string())))
            .collect();
        if attrs.is_empty() {
            let _ = writeln!(s, "  \"{}\";", dot_escape(id));
        } else {
            let _ = writeln!(s, "  \"{}\" [{}];", dot_escape(id), attrs.join(", "));
        }
    }
    for (u, v, w) in net.edges() {
        let _ = writeln!(
            s,
            "  \"{}\" {arrow} \"{}\" [weight=\"{w}\", label=\"{w}\"];",
            dot_escape(u),
            dot_escape(v)
        );
    }
    s.push_str("}\n");
    s
}

/// `u,v,weight` with a header row.
pub fn to_edge_csv(net: &Network) -> Result<String> {
    let mut w = crate::csvutil::writer();
    w.write_record(["u", "v", "weight"])?;
    for (u, v, wt) in net.edges() {
        w.write_record([u, v, &wt.to_string()])?;
    }
    crate::csvutil::finish(w)
}

/// Reads an edge list written by [`to_edge_csv`].
pub fn read_edge_csv<R: Read>(reader: R, directed: bool) -> Result<Network> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut b = NetworkBuilder::new(directed);
    for row in rdr.records() {
        let row = row?;
        let w: f64 = row.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
        b.add_edge(&row[0], &row[1], w);
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Network {
        let mut b = NetworkBuilder::new(false);
        b.add_edge("a", "b", 2.0)
            .add_edge("b", "c&d", 1.0)
            .set_attr("a", "geo", "Europe")
            .set_attr("a", "size", 4usize);
        b.build()
    }

    #[test]
    fn graphml_has_keys_and_escapes() {
        let g = to_graphml(&sample());
        assert!(g.contains("attr.name=\"geo\" attr.type=\"string\""));
        assert!(g.contains("attr.name=\"size\" attr.type=\"long\""));
        assert!(g.contains("c&amp;d"));
        assert!(g.contains("edgedefault=\"undirected\""));
        assert_eq!(g.matches("<edge ").count(), 2);
    }

    #[test]
    fn dot_shape() {
        let d = to_dot(&sample(), "collab");
        assert!(d.starts_with("graph \"collab\" {"));
        assert!(d.contains("\"a\" -- \"b\" [weight=\"2\", label=\"2\"];"));
        assert!(d.contains("\"geo\"=\"Europe\""));
        assert!(d.trim_end().ends_with('}'));
    }

    #[test]
    fn csv_roundtrip() {
        let n = sample();
        let csv = to_edge_csv(&n).unwrap();
        assert!(csv.starts_with("u,v,weight\n"));
        let back = read_edge_csv(csv.as_bytes(), false).unwrap();
        assert_eq!(back.edge_count(), 2);
        assert_eq!(back.weight("a", "b"), Some(2.0));
    }
}
