//! Witness tree shapes with per-node valuations.
//!
//! Text format, one node per line (`#` starts a comment):
//!
//! ```text
//! # id parent updown childcount valuation
//! 0 - - 2 trivial
//! 1 0 up 0 leaf
//! 2 0 down 0 1,2,0
//! ```
//!
//! `updown` describes the edge to the parent: `up` when the child is the
//! younger endpoint. A valuation is `trivial`, `leaf` (original leaf) or
//! `ρ,A,B` for `(log j)^ρ / j^{Aγ + B(1-γ)}`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Trivial,
    /// Original leaf, valued `p = 1/(ω t^γ)`.
    Leaf,
    Contraction { rho: u32, a: u32, b: u32 },
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Trivial => f.write_str("trivial"),
            Valuation::Leaf => f.write_str("leaf"),
            Valuation::Contraction { rho, a, b } => write!(f, "{rho},{a},{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Orientation of the edge to the parent; `None` at the root.
    pub up: Option<bool>,
    pub valuation: Valuation,
    pub children: Vec<usize>,
}

/// A validated witness tree for threshold `r`. Node ids are `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTreeSpec {
    r: usize,
    root: usize,
    nodes: Vec<TreeNode>,
}

impl WitnessTreeSpec {
    /// Builds and validates a tree from `(parent, up, valuation)` triples
    /// listed by node id. Exactly one entry must have no parent.
    pub fn from_nodes(r: usize, entries: &[(Option<usize>, Option<bool>, Valuation)]) -> Result<Self> {
        let err = |msg: String| Err(Error::TreeSpec(msg));
        if r < 2 {
            return err(format!("threshold r={r} must be at least 2"));
        }
        if entries.is_empty() {
            return err("empty tree".into());
        }
        let mut nodes: Vec<TreeNode> = entries
            .iter()
            .enumerate()
            .map(|(id, &(parent, up, valuation))| TreeNode {
                id,
                parent,
                up,
                valuation,
                children: Vec::new(),
            })
            .collect();
        let mut root = None;
        for id in 0..nodes.len() {
            match (nodes[id].parent, nodes[id].up) {
                (None, None) => {
                    if root.replace(id).is_some() {
                        return err("more than one root".into());
                    }
                }
                (Some(p), Some(_)) => {
                    if p >= nodes.len() || p == id {
                        return err(format!("node {id} has invalid parent {p}"));
                    }
                    nodes[p].children.push(id);
                }
                _ => return err(format!("node {id}: parent and orientation must both be given or both be `-`")),
            }
        }
        let Some(root) = root else {
            return err("no root".into());
        };
        let spec = Self { r, root, nodes };
        if spec.preorder().len() != spec.nodes.len() {
            return err("parent links do not form a single tree".into());
        }
        for node in &spec.nodes {
            let c = node.children.len();
            match node.valuation {
                Valuation::Trivial if c != r => {
                    return err(format!("trivial node {} has {c} children, needs exactly {r}", node.id));
                }
                Valuation::Leaf if c != 0 => {
                    return err(format!("original leaf {} has children", node.id));
                }
                Valuation::Contraction { a, b, .. } => {
                    if a + b == 0 {
                        return err(format!("node {}: contraction exponent must be positive", node.id));
                    }
                    if c + ((a + b) as usize) < r {
                        return err(format!(
                            "node {} violates Property (A): c + A + B = {} < r = {r}",
                            node.id,
                            c + (a + b) as usize
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(spec)
    }

    /// Depth-`depth` tree in which every internal node is trivial with `r`
    /// children over up edges and the deepest level is original leaves.
    pub fn all_up(r: usize, depth: usize) -> Result<Self> {
        let mut entries = vec![(None, None, if depth == 0 { Valuation::Leaf } else { Valuation::Trivial })];
        let mut level = vec![0usize];
        for d in 1..=depth {
            let val = if d == depth { Valuation::Leaf } else { Valuation::Trivial };
            let mut next = Vec::with_capacity(level.len() * r);
            for &p in &level {
                for _ in 0..r {
                    next.push(entries.len());
                    entries.push((Some(p), Some(true), val));
                }
            }
            level = next;
        }
        Self::from_nodes(r, &entries)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids reachable from the root, parents before children.
    pub fn preorder(&self) -> Vec<usize> {
        self.preorder_from(self.root)
    }

    pub fn preorder_from(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }

    /// Edge count on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut best = 0;
        for id in self.preorder() {
            if let Some(p) = self.nodes[id].parent {
                depth[id] = depth[p] + 1;
                best = best.max(depth[id]);
            }
        }
        best
    }

    pub fn original_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.valuation == Valuation::Leaf).count()
    }

    pub fn parse(text: &str, r: usize) -> Result<Self> {
        let mut rows: Vec<(usize, (Option<usize>, Option<bool>, Valuation), usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::parse(lineno, format!("expected 5 fields, found {}", f.len())));
            }
            let num = |s: &str, what: &str| -> Result<usize> {
                s.parse().map_err(|e| Error::parse(lineno, format!("bad {what} {s:?}: {e}")))
            };
            let id = num(f[0], "id")?;
            let parent = if f[1] == "-" { None } else { Some(num(f[1], "parent")?) };
            let up = match f[2] {
                "-" => None,
                "up" => Some(true),
                "down" => Some(false),
                other => return Err(Error::parse(lineno, format!("bad orientation {other:?}"))),
            };
            let count = num(f[3], "child count")?;
            let valuation = match f[4] {
                "trivial" => Valuation::Trivial,
                "leaf" => Valuation::Leaf,
                triple => {
                    let parts: Vec<&str> = triple.split(',').collect();
                    if parts.len() != 3 {
                        return Err(Error::parse(lineno, format!("bad valuation {triple:?}")));
                    }
                    let p = |s: &str| -> Result<u32> {
                        s.parse().map_err(|e| Error::parse(lineno, format!("bad exponent {s:?}: {e}")))
                    };
                    Valuation::Contraction {
                        rho: p(parts[0])?,
                        a: p(parts[1])?,
                        b: p(parts[2])?,
                    }
                }
            };
            rows.push((id, (parent, up, valuation), count));
        }
        rows.sort_by_key(|row| row.0);
        for (k, row) in rows.iter().enumerate() {
            if row.0 != k {
                return Err(Error::TreeSpec(format!("node ids must be 0..{} without gaps", rows.len())));
            }
        }
        let entries: Vec<_> = rows.iter().map(|row| row.1).collect();
        let spec = Self::from_nodes(r, &entries)?;
        for (k, row) in rows.iter().enumerate() {
            if spec.nodes[k].children.len() != row.2 {
                return Err(Error::TreeSpec(format!(
                    "node {k} declares {} children but has {}",
                    row.2,
                    spec.nodes[k].children.len()
                )));
            }
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# id parent updown childcount valuation\n");
        for n in &self.nodes {
            let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
            let updown = match n.up {
                None => "-",
                Some(true) => "up",
                Some(false) => "down",
            };
            out.push_str(&format!("{} {parent} {updown} {} {}\n", n.id, n.children.len(), n.valuation));
        }
        out
    }
}
