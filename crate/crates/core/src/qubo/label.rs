use std::fmt;
use std::str::FromStr;

/// Meaning of a QUBO variable. The text form is the label stored in the
/// model's decode map, e.g. `x[t=3,s=2]` or `slack[cap s=1,bit=0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarRole {
    Generic(usize),
    /// Cut side of a graph vertex.
    Vertex(usize),
    /// Whether a set-cover subset is chosen.
    Subset(usize),
    /// Whether an asset is selected.
    Asset(usize),
    /// Task `task` placed on station `station` (1-based).
    Task { task: usize, station: usize },
    /// Station `station` (1-based) is used.
    Station(usize),
    /// Bit `bit` of the binary-expanded slack for constraint `group`.
    Slack { group: String, bit: usize },
}

impl VarRole {
    pub fn is_slack(&self) -> bool {
        matches!(self, VarRole::Slack { .. })
    }
}

impl fmt::Display for VarRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRole::Generic(i) => write!(f, "b[{i}]"),
            VarRole::Vertex(i) => write!(f, "v[{i}]"),
            VarRole::Subset(i) => write!(f, "subset[{i}]"),
            VarRole::Asset(i) => write!(f, "asset[{i}]"),
            VarRole::Task { task, station } => write!(f, "x[t={task},s={station}]"),
            VarRole::Station(s) => write!(f, "y[s={s}]"),
            VarRole::Slack { group, bit } => write!(f, "slack[{group},bit={bit}]"),
        }
    }
}

impl FromStr for VarRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("unrecognised variable label `{s}`");
        let (head, rest) = s.split_once('[').ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let kv = |t: &str, key: &str| t.strip_prefix(key).ok_or_else(bad).and_then(num);
        match head {
            "b" => Ok(VarRole::Generic(num(body)?)),
            "v" => Ok(VarRole::Vertex(num(body)?)),
            "subset" => Ok(VarRole::Subset(num(body)?)),
            "asset" => Ok(VarRole::Asset(num(body)?)),
            "x" => {
                let (t, st) = body.split_once(',').ok_or_else(bad)?;
                Ok(VarRole::Task { task: kv(t, "t=")?, station: kv(st, "s=")? })
            }
            "y" => Ok(VarRole::Station(kv(body, "s=")?)),
            "slack" => {
                let (group, bit) = body.rsplit_once(",bit=").ok_or_else(bad)?;
                Ok(VarRole::Slack { group: group.to_string(), bit: num(bit)? })
            }
            _ => Err(bad()),
        }
    }
}
