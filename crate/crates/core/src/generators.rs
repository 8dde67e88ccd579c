//! Seeded graph families. The same spec and seed always produce the same
//! graph, and therefore the same bytes through `io::write_graph`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{named, Graph, GraphBuilder};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    /// Hub plus `leaves` leaves.
    Star(usize),
    Grid { width: usize, height: usize },
    Gnp { n: usize, prob: f64 },
    /// Random stacked triangulation on `n ≥ 3` vertices (maximal planar).
    Apollonian(usize),
    /// Grid with one random diagonal per cell.
    TriangulatedGrid { width: usize, height: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Path(_) => "path",
            Family::Cycle(_) => "cycle",
            Family::Complete(_) => "complete",
            Family::Star(_) => "star",
            Family::Grid { .. } => "grid",
            Family::Gnp { .. } => "gnp",
            Family::Apollonian(_) => "apollonian",
            Family::TriangulatedGrid { .. } => "trigrid",
        }
    }

    /// Families whose every member is planar by construction.
    pub fn is_planar(&self) -> bool {
        match *self {
            Family::Path(_) | Family::Star(_) | Family::Grid { .. } => true,
            Family::Apollonian(_) | Family::TriangulatedGrid { .. } => true,
            Family::Cycle(_) => true,
            Family::Complete(n) => n <= 4,
            Family::Gnp { .. } => false,
        }
    }

    /// Parses `name` followed by its size parameters, e.g. `["grid", "4", "4"]`.
    pub fn parse(name: &str, args: &[&str]) -> Result<Self, GeneratorError> {
        let arity = match name {
            "path" | "cycle" | "complete" | "star" | "apollonian" => 1,
            "grid" | "gnp" | "trigrid" => 2,
            _ => return Err(GeneratorError::UnknownFamily(name.to_string())),
        };
        if args.len() != arity {
            return Err(GeneratorError::Arity { family: name.to_string(), expected: arity, found: args.len() });
        }
        let size = |i: usize| -> Result<usize, GeneratorError> {
            args[i].parse().map_err(|_| GeneratorError::BadParameter(args[i].to_string()))
        };
        Ok(match name {
            "path" => Family::Path(size(0)?),
            "cycle" => Family::Cycle(size(0)?),
            "complete" => Family::Complete(size(0)?),
            "star" => Family::Star(size(0)?),
            "apollonian" => Family::Apollonian(size(0)?),
            "grid" => Family::Grid { width: size(0)?, height: size(1)? },
            "trigrid" => Family::TriangulatedGrid { width: size(0)?, height: size(1)? },
            _ => {
                let prob = args[1].parse().map_err(|_| GeneratorError::BadParameter(args[1].to_string()))?;
                Family::Gnp { n: size(0)?, prob }
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Path(n) | Family::Cycle(n) | Family::Complete(n) | Family::Star(n) | Family::Apollonian(n) => {
                write!(f, "{} {n}", self.name())
            }
            Family::Grid { width, height } | Family::TriangulatedGrid { width, height } => {
                write!(f, "{} {width} {height}", self.name())
            }
            Family::Gnp { n, prob } => write!(f, "gnp {n} {prob}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("unknown generator family `{0}`")]
    UnknownFamily(String),
    #[error("`{family}` takes {expected} parameters, got {found}")]
    Arity { family: String, expected: usize, found: usize },
    #[error("invalid parameter `{0}`")]
    BadParameter(String),
    #[error("{family} needs size at least {min}, got {found}")]
    TooSmall { family: &'static str, min: usize, found: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    Probability(f64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub graph: Graph,
    pub planar: bool,
}

fn at_least(family: &'static str, found: usize, min: usize) -> Result<(), GeneratorError> {
    if found < min {
        return Err(GeneratorError::TooSmall { family, min, found });
    }
    Ok(())
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let family = spec.family;
    let graph = match family {
        Family::Path(n) => {
            at_least("path", n, 1)?;
            named::path(n)
        }
        Family::Cycle(n) => {
            at_least("cycle", n, 3)?;
            named::cycle(n)
        }
        Family::Complete(n) => {
            at_least("complete", n, 1)?;
            named::complete(n)
        }
        Family::Star(leaves) => {
            at_least("star", leaves, 1)?;
            named::star(leaves)
        }
        Family::Grid { width, height } => {
            at_least("grid", width.min(height), 1)?;
            named::grid(width, height)
        }
        Family::Gnp { n, prob } => {
            at_least("gnp", n, 1)?;
            if !(0.0..=1.0).contains(&prob) {
                return Err(GeneratorError::Probability(prob));
            }
            gnp(n, prob, &mut rng)
        }
        Family::Apollonian(n) => {
            at_least("apollonian", n, 3)?;
            apollonian(n, &mut rng)
        }
        Family::TriangulatedGrid { width, height } => {
            at_least("trigrid", width.min(height), 1)?;
            triangulated_grid(width, height, &mut rng)
        }
    };
    Ok(Generated { graph, planar: family.is_planar() })
}

fn gnp(n: usize, prob: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(prob) {
                b.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    b.build()
}

fn apollonian(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut b = GraphBuilder::new(n);
    for (u, v) in [(0, 1), (1, 2), (0, 2)] {
        b.add_edge(u, v).expect("fresh pair");
    }
    // both faces of the starting triangle
    let mut faces = vec![[0, 1, 2], [0, 1, 2]];
    for v in 3..n {
        let [a, c, d] = faces.swap_remove(rng.gen_range(0..faces.len()));
        for u in [a, c, d] {
            b.add_edge(u, v).expect("new vertex");
        }
        faces.extend([[a, c, v], [c, d, v], [a, d, v]]);
    }
    b.build()
}

fn triangulated_grid(width: usize, height: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut b = named::grid(width, height).to_builder();
    let id = |x: usize, y: usize| y * width + x;
    for y in 0..height.saturating_sub(1) {
        for x in 0..width.saturating_sub(1) {
            let (u, v) = if rng.gen_bool(0.5) {
                (id(x, y), id(x + 1, y + 1))
            } else {
                (id(x + 1, y), id(x, y + 1))
            };
            b.add_edge(u, v).expect("diagonal");
        }
    }
    b.build()
}

/// Seeded G(n, p) helper used by test corpora.
pub fn random_graph(n: usize, prob: f64, seed: u64) -> Graph {
    generate(&GeneratorSpec::new(Family::Gnp { n, prob }, seed)).expect("valid gnp parameters").graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_graph;

    fn gen(family: Family, seed: u64) -> Generated {
        generate(&GeneratorSpec::new(family, seed)).unwrap()
    }

    #[test]
    fn basic_families() {
        let p = gen(Family::Path(10), 0);
        assert_eq!((p.graph.vertex_count(), p.graph.edge_count(), p.planar), (10, 9, true));
        let g = gen(Family::Grid { width: 4, height: 4 }, 0);
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count(), g.graph.max_degree()), (16, 24, 4));
        assert!(g.planar);
        assert!(!gen(Family::Gnp { n: 5, prob: 0.5 }, 1).planar);
    }

    #[test]
    fn determinism() {
        let a = write_graph(&gen(Family::Gnp { n: 20, prob: 0.3 }, 7).graph);
        let b = write_graph(&gen(Family::Gnp { n: 20, prob: 0.3 }, 7).graph);
        assert_eq!(a, b);
        let c = write_graph(&gen(Family::Gnp { n: 20, prob: 0.3 }, 8).graph);
        assert_ne!(a, c);
    }

    #[test]
    fn planar_families_pass_euler() {
        for seed in 0..20 {
            let ap = gen(Family::Apollonian(3 + seed as usize * 3), seed);
            assert_eq!(ap.graph.edge_count(), 3 * ap.graph.vertex_count() - 6);
            assert!(ap.graph.euler_planar_bound());
            let tg = gen(Family::TriangulatedGrid { width: 2 + seed as usize, height: 3 }, seed);
            assert!(tg.planar && tg.graph.euler_planar_bound());
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            generate(&GeneratorSpec::new(Family::Path(0), 0)),
            Err(GeneratorError::TooSmall { .. })
        ));
        assert!(matches!(
            generate(&GeneratorSpec::new(Family::Gnp { n: 4, prob: 1.5 }, 0)),
            Err(GeneratorError::Probability(_))
        ));
        assert_eq!(Family::parse("grid", &["4", "5"]).unwrap(), Family::Grid { width: 4, height: 5 });
        assert!(Family::parse("grid", &["4"]).is_err());
        assert!(Family::parse("torus", &[]).is_err());
        assert_eq!(Family::parse("gnp", &["20", "0.3"]).unwrap().to_string(), "gnp 20 0.3");
    }
}
