//! JSON train-track files.
//!
//! ```json
//! {
//!   "vertices": 1,
//!   "edges": [{"name": "a", "from": 0, "to": 0}, {"name": "b", "from": 0, "to": 0}],
//!   "vertex_map": [0],
//!   "images": ["a", "ba"],
//!   "strata": [{"edges": ["a"], "class": "polynomial"}, {"edges": ["b"], "class": "polynomial"}],
//!   "base": 0,
//!   "marking": {"loops": ["a", "b"], "edge_words": ["a", "b"]},
//!   "inverse": {"vertex_map": [0], "images": ["a", "bA"]},
//!   "automorphism": ["a", "ba"]
//! }
//! ```
//!
//! Paths are written with edge names: adjacent when every name is a single
//! character, separated by spaces otherwise.  The inverse of a lowercase
//! single-letter edge is its uppercase letter; other names get a trailing
//! `'`.  `images[k]` is the image of the `k`-th edge; optional `pieces`
//! gives the lengths (`"p/q"`) of the pieces of each edge mapping to the
//! edges of its image.  Strata are listed bottom first and their class tags
//! must match the classes computed from the map.

use serde::{Deserialize, Serialize};

use ttfix_core::error::{Error, Result};
use ttfix_core::filtration::{Filtration, StratumClass};
use ttfix_core::graph::{EdgeId, EdgePath, Graph};
use ttfix_core::map::GraphMap;
use ttfix_core::poly::Rational;
use ttfix_core::rtt::Marking;
use ttfix_core::track::{TrackOptions, TrainTrack};
use ttfix_core::word::{parse_word, Automorphism, Word};

/// An edge (its positive orientation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    /// Name.
    pub name: String,
    /// Initial vertex.
    pub from: usize,
    /// Terminal vertex.
    pub to: usize,
}

/// A stratum: its edges and growth class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    /// Edge names.
    pub edges: Vec<String>,
    /// `"exponential"`, `"polynomial"` or `"zero"`.
    pub class: String,
}

/// The marking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingSpec {
    /// Loop at the base for every generator.
    pub loops: Vec<String>,
    /// Word of every edge.
    pub edge_words: Vec<String>,
}

/// The homotopy inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSpec {
    /// Vertex images.
    pub vertex_map: Vec<usize>,
    /// Edge images.
    pub images: Vec<String>,
}

/// A train-track file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackFile {
    /// Number of vertices.
    pub vertices: usize,
    /// Edges.
    pub edges: Vec<EdgeSpec>,
    /// Vertex images.
    pub vertex_map: Vec<usize>,
    /// Edge images.
    pub images: Vec<String>,
    /// Piece lengths (uniform when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<Vec<String>>>,
    /// Strata, bottom first.
    pub strata: Vec<StratumSpec>,
    /// Base vertex.
    pub base: usize,
    /// Marking.
    pub marking: MarkingSpec,
    /// Homotopy inverse.
    pub inverse: InverseSpec,
    /// Generator images of the represented automorphism (derived from the
    /// map when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<Vec<String>>,
}

fn class_name(c: StratumClass) -> &'static str {
    match c {
        StratumClass::Exponential => "exponential",
        StratumClass::Polynomial => "polynomial",
        StratumClass::Zero => "zero",
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

impl TrackFile {
    /// Parses JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    /// Pretty JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("track files always serialize")
    }

    /// The file describing a train track.
    pub fn from_track(tt: &TrainTrack) -> Self {
        let g = tt.graph();
        let f = &tt.f;
        let positive = |k: usize| (2 * k) as EdgeId;
        let edges = (0..g.pair_count())
            .map(|k| EdgeSpec { name: g.names()[k].clone(), from: g.alpha(positive(k)), to: g.omega(positive(k)) })
            .collect();
        let image = |m: &GraphMap, k: usize| {
            let p = EdgePath { start: m.vertex(g.alpha(positive(k))), edges: m.image(positive(k)) };
            if p.edges.is_empty() {
                String::new()
            } else {
                p.display(g)
            }
        };
        let uniform = f.images().iter().zip(f.all_pieces()).all(|(img, ps)| {
            ps.iter().all(|p| *p == Rational::new(1.into(), (img.len() as i64).into()))
        });
        let pieces = (!uniform)
            .then(|| f.all_pieces().iter().map(|ps| ps.iter().map(|p| p.to_string()).collect()).collect());
        let strata = tt
            .filt
            .strata()
            .iter()
            .map(|s| StratumSpec {
                edges: s.pairs.iter().map(|&k| g.names()[k].clone()).collect(),
                class: class_name(s.class).into(),
            })
            .collect();
        let hg = &tt.homotopy.g;
        TrackFile {
            vertices: g.vertex_count(),
            edges,
            vertex_map: f.vertex_map().to_vec(),
            images: (0..g.pair_count()).map(|k| image(f, k)).collect(),
            pieces,
            strata,
            base: tt.base,
            marking: MarkingSpec {
                loops: tt.marking.loops.iter().map(|l| l.display(g)).collect(),
                edge_words: tt.marking.edge_words.iter().map(Word::to_string).collect(),
            },
            inverse: InverseSpec {
                vertex_map: hg.vertex_map().to_vec(),
                images: (0..g.pair_count()).map(|k| image(hg, k)).collect(),
            },
            automorphism: Some(tt.phi.images().iter().map(Word::to_string).collect()),
        }
    }

    fn graph(&self) -> Result<Graph> {
        let g = Graph::new(
            self.vertices,
            self.edges.iter().map(|e| (e.from, e.to)).collect(),
            self.edges.iter().map(|e| e.name.clone()).collect(),
        )?;
        for e in g.edges() {
            let name = g.edge_name(e);
            if name.is_empty() || name.contains(char::is_whitespace) || g.edge_by_name(&name) != Some(e) {
                return Err(invalid(format!("edge name `{name}` is empty, contains spaces or is ambiguous")));
            }
        }
        Ok(g)
    }

    fn map(&self, g: &Graph, vmap: &[usize], images: &[String], pieces: Option<Vec<Vec<Rational>>>) -> Result<GraphMap> {
        if vmap.len() != g.vertex_count() || vmap.iter().any(|&v| v >= g.vertex_count()) {
            return Err(invalid("vertex map has the wrong size or range"));
        }
        if images.len() != g.pair_count() {
            return Err(invalid("one image per edge is required"));
        }
        let imgs = images
            .iter()
            .enumerate()
            .map(|(k, s)| {
                g.parse_path(vmap[g.alpha((2 * k) as EdgeId)], s)
                    .map(|p| p.edges)
                    .map_err(|e| invalid(format!("image of `{}`: {e}", g.names()[k])))
            })
            .collect::<Result<Vec<_>>>()?;
        GraphMap::new(g.clone(), vmap.to_vec(), imgs, pieces)
    }

    /// Builds and validates the train track.
    pub fn to_track(&self, options: TrackOptions) -> Result<TrainTrack> {
        let g = self.graph()?;
        let pieces = match &self.pieces {
            None => None,
            Some(ps) => Some(
                ps.iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| s.trim().parse::<Rational>().map_err(|_| invalid(format!("bad length `{s}`"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let f = self.map(&g, &self.vertex_map, &self.images, pieces)?;
        let inv = self.map(&g, &self.inverse.vertex_map, &self.inverse.images, None)?;
        let pair_of = |name: &str| -> Result<usize> {
            g.names().iter().position(|n| n == name).ok_or_else(|| invalid(format!("unknown edge `{name}` in strata")))
        };
        let strata: Vec<Vec<usize>> = self
            .strata
            .iter()
            .map(|s| s.edges.iter().map(|n| pair_of(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let filt = Filtration::from_strata(&f, strata.clone())?;
        for (i, (spec, s)) in self.strata.iter().zip(filt.strata()).enumerate() {
            if spec.class != class_name(s.class) {
                return Err(invalid(format!(
                    "stratum {} is tagged `{}` but is {}",
                    i + 1,
                    spec.class,
                    class_name(s.class)
                )));
            }
        }
        if self.base >= g.vertex_count() {
            return Err(invalid("base vertex out of range"));
        }
        let loops = self
            .marking
            .loops
            .iter()
            .map(|s| g.parse_path(self.base, s).map_err(|e| invalid(format!("marking loop `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let edge_words = self.marking.edge_words.iter().map(|s| parse_word(s)).collect::<Result<Vec<_>>>()?;
        if edge_words.len() != g.pair_count() {
            return Err(invalid("one marking word per edge is required"));
        }
        let marking = Marking { loops, edge_words };
        let phi = match &self.automorphism {
            None => None,
            Some(ws) => {
                let images = ws.iter().map(|s| parse_word(s)).collect::<Result<Vec<_>>>()?;
                Some(Automorphism::new(images.len(), images)?)
            }
        };
        TrainTrack::from_parts(f, Some(strata), self.base, marking, inv, phi, options)
    }
}

/// Loads a train track from JSON text.
pub fn parse_traintrack(text: &str, options: TrackOptions) -> Result<TrainTrack> {
    TrackFile::from_json(text)?.to_track(options)
}

/// JSON text of a train track.
pub fn serialize_traintrack(tt: &TrainTrack) -> String {
    TrackFile::from_track(tt).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ttfix_core::track::subdivide_at_exceptional;

    fn rose_track(images: &[&str], inverse: &[&str]) -> TrainTrack {
        let w = |s: &[&str]| s.iter().map(|x| parse_word(x).unwrap()).collect::<Vec<_>>();
        let phi = Automorphism::new(images.len(), w(images)).unwrap().with_inverse(w(inverse)).unwrap();
        TrainTrack::from_automorphism(&phi, TrackOptions::default()).unwrap()
    }

    fn same(a: &TrainTrack, b: &TrainTrack) {
        assert_eq!(a.f, b.f);
        assert_eq!(a.homotopy.g, b.homotopy.g);
        assert_eq!(a.base, b.base);
        assert_eq!(a.marking, b.marking);
        assert_eq!(a.phi.images(), b.phi.images());
        let pairs = |t: &TrainTrack| t.filt.strata().iter().map(|s| (s.pairs.clone(), s.class)).collect::<Vec<_>>();
        assert_eq!(pairs(a), pairs(b));
    }

    #[test]
    fn round_trip_on_roses() {
        for (img, inv) in [(&["a", "ba"][..], &["a", "bA"][..]), (&["ab", "a"][..], &["b", "Ba"][..])] {
            let tt = rose_track(img, inv);
            let text = serialize_traintrack(&tt);
            let back = parse_traintrack(&text, TrackOptions::default()).unwrap();
            same(&tt, &back);
        }
    }

    #[test]
    fn round_trip_after_subdivision() {
        let tt = rose_track(&["b", "Ba"], &["ab", "a"]);
        let sub = subdivide_at_exceptional(&tt).unwrap();
        let text = serialize_traintrack(&sub);
        let back = parse_traintrack(&text, TrackOptions::default()).unwrap();
        same(&sub, &back);
    }

    #[test]
    fn schema_violations_are_reported() {
        let tt = rose_track(&["a", "ba"], &["a", "bA"]);
        let mut file = TrackFile::from_track(&tt);
        file.strata[0].class = "exponential".into();
        assert!(matches!(file.to_track(TrackOptions::default()), Err(Error::Invalid(_))));
        let mut file = TrackFile::from_track(&tt);
        file.images[1] = "bq".into();
        assert!(matches!(file.to_track(TrackOptions::default()), Err(Error::Invalid(_))));
        assert!(matches!(TrackFile::from_json("{\"vertices\": 1,"), Err(Error::Parse { .. })));
        assert!(matches!(TrackFile::from_json("{\"vertices\": 1, \"bogus\": 2}"), Err(Error::Parse { .. })));
    }
}
