//! Solomon-format CVRPTW instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

/// A parsed instance. Node 0 is the depot; customers are `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub vehicle_limit: usize,
    pub capacity: f64,
    nodes: Vec<Node>,
    dist: Vec<f64>,
}

impl Instance {
    pub fn new(
        name: String,
        vehicle_limit: usize,
        capacity: f64,
        mut nodes: Vec<Node>,
    ) -> Result<Self> {
        if capacity.is_nan() || capacity <= 0.0 {
            return Err(Error::Format(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        nodes.sort_by_key(|n| n.id);
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::Format(format!(
                    "node ids must be contiguous from 0; missing {i}"
                )));
            }
            if n.ready > n.due {
                return Err(Error::Format(format!(
                    "node {}: ready time after due date",
                    n.id
                )));
            }
            if n.demand < 0.0 || n.service < 0.0 {
                return Err(Error::Format(format!(
                    "node {}: negative demand or service time",
                    n.id
                )));
            }
        }
        match nodes.first() {
            None => return Err(Error::Format("instance has no depot".into())),
            Some(d) if d.demand != 0.0 => {
                return Err(Error::Format("depot demand must be 0".into()))
            }
            _ => {}
        }
        let n = nodes.len();
        let mut dist = vec![0.0; n * n];
        for a in &nodes {
            for b in &nodes {
                dist[a.id * n + b.id] = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            }
        }
        Ok(Self {
            name,
            vehicle_limit,
            capacity,
            nodes,
            dist,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        parse_solomon(&fs::read_to_string(path)?)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn customers(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Unrounded Euclidean distance.
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.nodes.len() + b]
    }

    /// Renders in the Solomon layout accepted by [`parse_solomon`].
    pub fn to_solomon(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{}\n\nVEHICLE\nNUMBER     CAPACITY\n  {}         {}\n",
            self.name, self.vehicle_limit, self.capacity
        )
        .unwrap();
        writeln!(s, "CUSTOMER\nCUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n").unwrap();
        for n in &self.nodes {
            writeln!(
                s,
                "{:5} {:10} {:10} {:10} {:10} {:10} {:10}",
                n.id, n.x, n.y, n.demand, n.ready, n.due, n.service
            )
            .unwrap();
        }
        s
    }
}

fn number(tok: &str, line_no: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Format(format!("line {line_no}: non-numeric field {tok:?}")))
}

/// Parses the standard Solomon text layout. Blank lines and extra
/// whitespace are ignored.
pub fn parse_solomon(text: &str) -> Result<Instance> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let name = lines
        .first()
        .map(|(_, l)| l.to_string())
        .ok_or_else(|| Error::Format("empty instance".into()))?;

    let section = |label: &str| {
        lines
            .iter()
            .position(|(_, l)| l.eq_ignore_ascii_case(label))
            .ok_or_else(|| Error::Format(format!("missing section {label}")))
    };

    let v = section("VEHICLE")?;
    let mut rest = lines[v + 1..].iter();
    match rest.next() {
        Some((_, l)) if l.to_ascii_uppercase().starts_with("NUMBER") => {}
        _ => {
            return Err(Error::Format(
                "missing section VEHICLE header (NUMBER CAPACITY)".into(),
            ))
        }
    }
    let (line_no, values) = rest
        .next()
        .ok_or_else(|| Error::Format("missing section VEHICLE values".into()))?;
    let toks: Vec<&str> = values.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Format(format!(
            "line {line_no}: expected NUMBER and CAPACITY"
        )));
    }
    let number_of_vehicles = number(toks[0], *line_no)?;
    if number_of_vehicles < 0.0 || number_of_vehicles.fract() != 0.0 {
        return Err(Error::Format(format!(
            "line {line_no}: vehicle NUMBER must be a non-negative integer"
        )));
    }
    let capacity = number(toks[1], *line_no)?;

    let c = section("CUSTOMER")?;
    let mut rows = lines[c + 1..].iter().peekable();
    if rows
        .peek()
        .is_some_and(|(_, l)| l.to_ascii_uppercase().starts_with("CUST"))
    {
        rows.next();
    }
    let mut nodes = BTreeMap::new();
    for (line_no, l) in rows {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 7 {
            return Err(Error::Format(format!(
                "line {line_no}: expected 7 fields, got {}",
                toks.len()
            )));
        }
        let f = toks
            .iter()
            .map(|t| number(t, *line_no))
            .collect::<Result<Vec<f64>>>()?;
        if f[0] < 0.0 || f[0].fract() != 0.0 {
            return Err(Error::Format(format!(
                "line {line_no}: customer id must be a non-negative integer"
            )));
        }
        let id = f[0] as usize;
        let node = Node {
            id,
            x: f[1],
            y: f[2],
            demand: f[3],
            ready: f[4],
            due: f[5],
            service: f[6],
        };
        if nodes.insert(id, node).is_some() {
            return Err(Error::Format(format!("duplicate customer id {id}")));
        }
    }
    if nodes.is_empty() {
        return Err(Error::Format("CUSTOMER section has no rows".into()));
    }
    Instance::new(
        name,
        number_of_vehicles as usize,
        capacity,
        nodes.into_values().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "TOY3

VEHICLE
NUMBER     CAPACITY
  25         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME

    0      40         50          0          0       1236          0
    1      45         68         10        912        967         90

    2      45         70         30        825        870         90
    3      42         66         10         65        146         90
";

    #[test]
    fn parses_fixture() {
        let inst = parse_solomon(FIXTURE).unwrap();
        assert_eq!(inst.name, "TOY3");
        assert_eq!(inst.vehicle_limit, 25);
        assert_eq!(inst.capacity, 200.0);
        assert_eq!(inst.nodes().len(), 4);
        assert_eq!(inst.customers(), 3);
        assert_eq!(inst.node(2).demand, 30.0);
        assert_eq!(inst.node(3).due, 146.0);
    }

    #[test]
    fn duplicate_id() {
        let text = FIXTURE.replace("    3      42", "    2      42");
        let err = parse_solomon(&text).unwrap_err();
        assert!(
            matches!(err, Error::Format(ref m) if m.contains("duplicate")),
            "{err}"
        );
    }

    #[test]
    fn missing_sections() {
        let no_vehicle = FIXTURE.replace("VEHICLE", "VEHICLES");
        assert!(
            matches!(parse_solomon(&no_vehicle), Err(Error::Format(m)) if m.contains("VEHICLE"))
        );
        let no_customer = FIXTURE.replace("CUSTOMER\n", "");
        assert!(
            matches!(parse_solomon(&no_customer), Err(Error::Format(m)) if m.contains("CUSTOMER"))
        );
    }

    #[test]
    fn non_numeric_field() {
        let text = FIXTURE.replace("912", "9x2");
        assert!(matches!(parse_solomon(&text), Err(Error::Format(m)) if m.contains("line")));
    }

    #[test]
    fn gap_in_ids() {
        let text = FIXTURE.replace("    3      42", "    4      42");
        assert!(parse_solomon(&text).is_err());
    }

    #[test]
    fn round_trip() {
        let inst = parse_solomon(FIXTURE).unwrap();
        let again = parse_solomon(&inst.to_solomon()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn distances_unrounded() {
        let inst = parse_solomon(FIXTURE).unwrap();
        assert_eq!(inst.dist(0, 1), (25.0f64 + 324.0).sqrt());
        assert_eq!(inst.dist(1, 0), inst.dist(0, 1));
    }
}
