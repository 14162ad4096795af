//! Vertex Color to String Pack.
//!
//! Each vertex becomes `flank ∥ incidence row ∥ flank`, where the flank is
//! the vertex's row of a self-aligning set and the incidence row has one
//! column per edge. Strings of non-adjacent vertices can sit on top of each
//! other; strings of adjacent vertices share an edge column and cannot. A
//! packing in which strings either coincide or overlap by at most the slack
//! `k` has `C` groups exactly when its span lies in
//! `[C(|s|-k) + k, C·|s|]`, which recovers the number of colors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::selfalign::self_aligning;
use super::{BitString, ReductionError, SelfAligningSet, StringPackInstance};

pub const DEFAULT_VERTEX_LIMIT: usize = 10;

/// Simple undirected graph on vertices `0..vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = ReductionError;

    fn try_from(f: GraphFile) -> Result<Self, Self::Error> {
        Graph::new(
            f.vertices,
            f.edges.into_iter().map(|[u, v]| (u, v)).collect(),
        )
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile {
            vertices: g.vertices,
            edges: g.edges.into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Edges keep their input order (it fixes the incidence columns) and are
    /// stored with the smaller endpoint first.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, ReductionError> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(ReductionError::Invalid(format!(
                    "edge ({u}, {v}) names a vertex outside 0..{vertices}"
                )));
            }
            if u == v {
                return Err(ReductionError::Invalid(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(ReductionError::Invalid(format!(
                    "duplicate edge ({u}, {v})"
                )));
            }
            out.push(e);
        }
        Ok(Self {
            vertices,
            edges: out,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.contains(&e)
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.adjacent(u, v)))
    }

    /// Row `v` of the vertex-edge incidence matrix.
    pub fn incidence_row(&self, v: usize) -> BitString {
        let mut row = BitString::zeros(self.edges.len());
        for (c, &(a, b)) in self.edges.iter().enumerate() {
            if a == v || b == v {
                row.set(c, true);
            }
        }
        row
    }
}

/// Chromatic number by trying `k = 1, 2, …` colors with backtracking.
pub fn vertex_color_brute(g: &Graph, limit: usize) -> Result<usize, ReductionError> {
    if g.vertices > limit {
        return Err(ReductionError::TooManyVertices {
            vertices: g.vertices,
            limit,
        });
    }
    if g.vertices == 0 {
        return Ok(0);
    }
    let adj: Vec<Vec<usize>> = (0..g.vertices)
        .map(|u| (0..g.vertices).filter(|&v| g.adjacent(u, v)).collect())
        .collect();
    let mut colors = vec![usize::MAX; g.vertices];
    Ok((1..=g.vertices)
        .find(|&k| color_with(&adj, k, 0, 0, &mut colors))
        .expect("n colors always suffice"))
}

fn color_with(adj: &[Vec<usize>], k: usize, v: usize, used: usize, colors: &mut [usize]) -> bool {
    if v == adj.len() {
        return true;
    }
    // A fresh color is only worth trying once, which breaks color symmetry.
    for c in 0..k.min(used + 1) {
        if adj[v].iter().all(|&u| colors[u] != c) {
            colors[v] = c;
            if color_with(adj, k, v + 1, used.max(c + 1), colors) {
                return true;
            }
        }
    }
    colors[v] = usize::MAX;
    false
}

/// String Pack encoding of a graph, with the parameters needed to read a
/// color count back from a packing span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringReduction {
    pub instance: StringPackInstance,
    pub flanks: SelfAligningSet,
    /// `k`, the permitted overlap between groups.
    pub slack: usize,
    /// `|s| = 2L + |E|`.
    pub string_length: usize,
    pub vertices: usize,
}

/// `l` defaults to `n⁴`. Fails if `l` leaves the flanks too short to force
/// grouping or to tell group counts apart by span.
pub fn graph_to_stringpack(
    g: &Graph,
    l: Option<usize>,
) -> Result<ColoringReduction, ReductionError> {
    let n = g.vertices;
    if n == 0 {
        return Err(ReductionError::Invalid("graph has no vertices".into()));
    }
    let rows = n.max(2);
    let l = l.unwrap_or(rows.pow(4));
    let flanks = self_aligning(rows, l)?;
    let flank_len = flanks.length();
    let k = flanks.slack();
    let pairs = n * (n - 1) / 2;

    // Shifts forbidden by prefix-on-prefix must meet those forbidden by
    // prefix-on-suffix.
    if flank_len < 2 * k + pairs + 1 {
        let needed = (2 * k + pairs + 1 - rows * rows - rows.pow(4)).div_ceil(rows);
        return Err(ReductionError::FlankTooShort {
            l,
            reason: format!(
                "L - k = {} < C(n,2) + k + 1 = {}",
                flank_len - k,
                pairs + k + 1
            ),
            suggested: needed,
        });
    }
    let string_length = 2 * flank_len + g.edges.len();
    if string_length + k <= k * n {
        return Err(ReductionError::FlankTooShort {
            l,
            reason: format!("|s| + k = {} <= k·n = {}", string_length + k, k * n),
            suggested: (k * n).div_ceil(2 * rows) + 1,
        });
    }

    let strings = (0..n)
        .map(|v| {
            let flank = flanks.row(v);
            BitString::concat([flank, &g.incidence_row(v), flank])
        })
        .collect();
    Ok(ColoringReduction {
        instance: StringPackInstance::new(strings)?,
        flanks,
        slack: k,
        string_length,
        vertices: n,
    })
}

/// The unique `C` with `C(|s|-k) + k <= span <= C·|s|`.
pub fn colors_from_span(
    span: usize,
    string_length: usize,
    slack: usize,
) -> Result<usize, ReductionError> {
    let malformed = || ReductionError::MalformedSpan {
        span,
        string_length,
        slack,
    };
    if string_length == 0 || slack >= string_length || span == 0 {
        return Err(malformed());
    }
    let c = span.div_ceil(string_length);
    if c * (string_length - slack) + slack > span {
        return Err(malformed());
    }
    Ok(c)
}

/// A packing where each group of strings shares one offset and each group
/// starts at least `|s| - k` after the previous one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPacking {
    pub groups: Vec<Vec<usize>>,
    /// Offset of each vertex's string.
    pub offsets: Vec<i64>,
    pub span: usize,
}

/// Pairwise collision cache: does string `b` at relative offset `d` hit `a`?
struct Collisions<'a> {
    strings: &'a [BitString],
    cache: HashMap<(usize, usize, i64), bool>,
}

impl Collisions<'_> {
    fn hit(&mut self, a: usize, b: usize, d: i64) -> bool {
        let strings = self.strings;
        *self
            .cache
            .entry((a, b, d))
            .or_insert_with(|| strings[a].collides_at(&strings[b], d))
    }
}

/// Place `groups` left to right, each at the smallest admissible offset.
/// Returns `None` if a group is not an independent set.
pub fn group_respecting_span(
    red: &ColoringReduction,
    g: &Graph,
    groups: &[Vec<usize>],
) -> Option<GroupPacking> {
    let mut cache = Collisions {
        strings: red.instance.strings(),
        cache: HashMap::new(),
    };
    place_groups(red, g, groups, &mut cache)
}

fn place_groups(
    red: &ColoringReduction,
    g: &Graph,
    groups: &[Vec<usize>],
    cache: &mut Collisions<'_>,
) -> Option<GroupPacking> {
    if groups
        .iter()
        .any(|grp| grp.is_empty() || !g.is_independent(grp))
    {
        return None;
    }
    let s = red.string_length as i64;
    let k = red.slack as i64;
    let mut offsets = vec![0i64; red.vertices];
    let mut placed: Vec<usize> = Vec::new();
    let mut prev: Option<i64> = None;
    for grp in groups {
        let earliest = prev.map_or(0, |p| p + s - k);
        let at = (earliest..)
            .find(|&o| {
                grp.iter().all(|&b| {
                    placed
                        .iter()
                        .all(|&a| o - offsets[a] >= s || !cache.hit(a, b, o - offsets[a]))
                })
            })
            .expect("an offset of |s| past every placed string is always free");
        for &v in grp {
            offsets[v] = at;
        }
        placed.extend_from_slice(grp);
        prev = Some(at);
    }
    let span = (prev.unwrap_or(0) + s) as usize;
    Some(GroupPacking {
        groups: groups.to_vec(),
        offsets,
        span,
    })
}

/// Shortest group-respecting packing over every partition of the vertices
/// into independent sets and every order of the groups.
pub fn min_group_respecting_span(red: &ColoringReduction, g: &Graph) -> GroupPacking {
    let mut cache = Collisions {
        strings: red.instance.strings(),
        cache: HashMap::new(),
    };
    let mut best: Option<GroupPacking> = None;
    for partition in independent_partitions(g) {
        for order in permutations(partition.len()) {
            let groups: Vec<Vec<usize>> = order.iter().map(|&i| partition[i].clone()).collect();
            if let Some(p) = place_groups(red, g, &groups, &mut cache) {
                if best.as_ref().is_none_or(|b| p.span < b.span) {
                    best = Some(p);
                }
            }
        }
    }
    best.expect("singleton groups always pack")
}

fn independent_partitions(g: &Graph) -> Vec<Vec<Vec<usize>>> {
    fn go(g: &Graph, v: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if v == g.vertices {
            out.push(current.clone());
            return;
        }
        for i in 0..current.len() {
            if current[i].iter().all(|&u| !g.adjacent(u, v)) {
                current[i].push(v);
                go(g, v + 1, current, out);
                current[i].pop();
            }
        }
        current.push(vec![v]);
        go(g, v + 1, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    go(g, 0, &mut Vec::new(), &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            current.push(x);
            go(rest, current, out);
            current.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}
