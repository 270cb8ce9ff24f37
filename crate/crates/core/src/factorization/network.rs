use std::collections::HashMap;

use num_complex::Complex64;

use super::{compose, h_blocks, link_t, reduce_links, BlockLayout, Link, LinkSpec, Port};
use crate::direct::{scattering_direct, ScatteringMatrix};
use crate::edge::Momentum;
use crate::error::{Error, Result};
use crate::graph::{star_decomposition, MetricGraph, StarDecomposition, VertexConditions};
use crate::linalg::{block_diag, permute_symmetric, CMat};

/// Scattering matrix of several linked pieces, indexed by the ports left
/// free.
#[derive(Debug, Clone)]
pub struct Composed {
    pub s: CMat,
    /// `ports[i]` is the piece ray carried by row and column `i`.
    pub ports: Vec<Port>,
    /// Smallest `σ_min(B_2p)` met while eliminating links; `+∞` without links.
    pub sigma_min: f64,
}

impl Composed {
    /// Rows and columns rearranged into the given port order.
    pub fn reordered(&self, ports: &[Port]) -> Result<CMat> {
        let index: HashMap<Port, usize> = self.ports.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let order = ports
            .iter()
            .map(|p| {
                index
                    .get(p)
                    .copied()
                    .ok_or_else(|| Error::InvalidLink(format!("port {p:?} is not free")))
            })
            .collect::<Result<Vec<_>>>()?;
        if order.len() != self.ports.len() {
            return Err(Error::DimensionMismatch {
                what: "port order",
                expected: self.ports.len(),
                found: order.len(),
            });
        }
        Ok(permute_symmetric(&self.s, &order))
    }

    /// Rows and columns ordered by `(piece, ray)`.
    pub fn sorted(self) -> Self {
        let mut ports = self.ports.clone();
        ports.sort();
        let s = self.reordered(&ports).expect("same port set");
        Self { s, ports, ..self }
    }
}

fn validate_links(sizes: &[usize], links: &[Link]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidLink("nothing to compose".into()));
    }
    let mut seen = HashMap::new();
    for (l, link) in links.iter().enumerate() {
        if !(link.length.is_finite() && link.length > 0.0) {
            return Err(Error::InvalidLink(format!("link {l}: length {} is not positive", link.length)));
        }
        for port in [link.a, link.b] {
            match sizes.get(port.piece) {
                None => {
                    return Err(Error::InvalidLink(format!(
                        "link {l}: piece {} does not exist",
                        port.piece
                    )))
                }
                Some(&m) if port.ray >= m => {
                    return Err(Error::InvalidLink(format!(
                        "link {l}: piece {} has no ray {}",
                        port.piece, port.ray
                    )))
                }
                _ => {}
            }
            if let Some(other) = seen.insert(port, l) {
                return Err(Error::InvalidLink(format!(
                    "port (piece {}, ray {}) used by links {other} and {l}",
                    port.piece, port.ray
                )));
            }
        }
    }
    Ok(())
}

fn check_pieces(pieces: &[CMat]) -> Result<Vec<usize>> {
    pieces
        .iter()
        .map(|s| {
            if s.nrows() == s.ncols() {
                Ok(s.nrows())
            } else {
                Err(Error::DimensionMismatch {
                    what: "piece scattering matrix (square)",
                    expected: s.nrows(),
                    found: s.ncols(),
                })
            }
        })
        .collect()
}

/// Eliminates links whose two ends are both rows of `s`.
fn eliminate(s: &CMat, ports: &[Port], links: &[&Link], k: Momentum) -> Result<Composed> {
    if links.is_empty() {
        return Ok(Composed {
            s: s.clone(),
            ports: ports.to_vec(),
            sigma_min: f64::INFINITY,
        });
    }
    let index: HashMap<Port, usize> = ports.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let firsts: Vec<usize> = links.iter().map(|l| index[&l.a]).collect();
    let seconds: Vec<usize> = links.iter().map(|l| index[&l.b]).collect();
    let free: Vec<usize> = (0..ports.len())
        .filter(|i| !firsts.contains(i) && !seconds.contains(i))
        .collect();
    let order: Vec<usize> = firsts.iter().chain(&seconds).chain(&free).copied().collect();
    let zetas: Vec<Complex64> = links.iter().map(|l| k.phase(l.length)).collect();
    let out = reduce_links(&permute_symmetric(s, &order), &zetas)?;
    Ok(Composed {
        s: out.s,
        ports: free.iter().map(|&i| ports[i]).collect(),
        sigma_min: out.sigma_min,
    })
}

fn piece_ports(piece: usize, m: usize) -> Vec<Port> {
    (0..m).map(|r| Port::new(piece, r)).collect()
}

/// Folds the pieces pairwise in the given order: the first piece in `order`
/// is joined to the second, the result to the third, and so on. Links inside
/// a single piece are eliminated before it is joined.
pub fn compose_many_ordered(
    pieces: &[CMat],
    links: &[Link],
    order: &[usize],
    k: Momentum,
) -> Result<Composed> {
    let sizes = check_pieces(pieces)?;
    validate_links(&sizes, links)?;
    let mut sorted_order = order.to_vec();
    sorted_order.sort_unstable();
    if sorted_order != (0..pieces.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidLink("fold order is not a permutation of the pieces".into()));
    }

    let internal = |piece: usize| -> Vec<&Link> {
        links
            .iter()
            .filter(|l| l.a.piece == piece && l.b.piece == piece)
            .collect()
    };
    let first = order[0];
    let mut current = eliminate(&pieces[first], &piece_ports(first, sizes[first]), &internal(first), k)?;
    let mut merged = vec![false; pieces.len()];
    merged[first] = true;

    for &next_piece in &order[1..] {
        let next = eliminate(
            &pieces[next_piece],
            &piece_ports(next_piece, sizes[next_piece]),
            &internal(next_piece),
            k,
        )?;
        let pos_current: HashMap<Port, usize> =
            current.ports.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let pos_next: HashMap<Port, usize> = next.ports.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut pairs = Vec::new();
        let mut lengths = Vec::new();
        for l in links {
            let oriented = if merged[l.a.piece] && l.b.piece == next_piece {
                Some((l.a, l.b))
            } else if merged[l.b.piece] && l.a.piece == next_piece {
                Some((l.b, l.a))
            } else {
                None
            };
            if let Some((here, there)) = oriented {
                pairs.push((pos_current[&here], pos_next[&there]));
                lengths.push(l.length);
            }
        }
        let spec = LinkSpec::new(pairs, lengths)?;
        let layout = BlockLayout::new(current.ports.len(), next.ports.len(), &spec)?;
        let joined = compose(&current.s, &next.s, &layout, &spec.phases(k))?;
        let ports = layout
            .free2()
            .iter()
            .map(|&r| next.ports[r])
            .chain(layout.free1().iter().map(|&r| current.ports[r]))
            .collect();
        current = Composed {
            s: joined.s,
            ports,
            sigma_min: current.sigma_min.min(next.sigma_min).min(joined.sigma_min),
        };
        merged[next_piece] = true;
    }
    Ok(current)
}

/// [`compose_many_ordered`] folding in piece order.
pub fn compose_many(pieces: &[CMat], links: &[Link], k: Momentum) -> Result<Composed> {
    let order: Vec<usize> = (0..pieces.len()).collect();
    compose_many_ordered(pieces, links, &order, k)
}

struct Network {
    s_m: CMat,
    zetas: Vec<Complex64>,
    free: Vec<Port>,
}

fn network(pieces: &[CMat], links: &[Link], k: Momentum) -> Result<Network> {
    let sizes = check_pieces(pieces)?;
    validate_links(&sizes, links)?;
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &m| {
            let start = *acc;
            *acc += m;
            Some(start)
        })
        .collect();
    let flat = |p: &Port| offsets[p.piece] + p.ray;
    let mut linked = vec![false; sizes.iter().sum()];
    for l in links {
        linked[flat(&l.a)] = true;
        linked[flat(&l.b)] = true;
    }
    let free: Vec<Port> = sizes
        .iter()
        .enumerate()
        .flat_map(|(piece, &m)| piece_ports(piece, m))
        .filter(|p| !linked[flat(p)])
        .collect();
    let order: Vec<usize> = links
        .iter()
        .map(|l| flat(&l.a))
        .chain(links.iter().map(|l| flat(&l.b)))
        .chain(free.iter().map(flat))
        .collect();
    let blocks: Vec<&CMat> = pieces.iter().collect();
    Ok(Network {
        s_m: permute_symmetric(&block_diag(&blocks), &order),
        zetas: links.iter().map(|l| k.phase(l.length)).collect(),
        free,
    })
}

/// Eliminates every link at once from the block-diagonal matrix of all
/// pieces. Free ports come out ordered by `(piece, ray)`.
pub fn compose_network(pieces: &[CMat], links: &[Link], k: Momentum) -> Result<Composed> {
    let net = network(pieces, links, k)?;
    let out = reduce_links(&net.s_m, &net.zetas)?;
    Ok(Composed {
        s: out.s,
        ports: net.free,
        sigma_min: out.sigma_min,
    })
}

/// The `B_2p` block of the one-shot elimination of all links.
pub fn network_b2p(pieces: &[CMat], links: &[Link], k: Momentum) -> Result<CMat> {
    let net = network(pieces, links, k)?;
    let n = net.s_m.nrows() - 2 * net.zetas.len();
    let (_, b) = h_blocks(&net.s_m, &link_t(&net.zetas, n))?;
    let l = 2 * net.zetas.len();
    Ok(b.view((0, 0), (l, l)).into_owned())
}

/// Scattering matrix of every star of a decomposition.
pub fn star_matrices(decomposition: &StarDecomposition, k: Momentum) -> Result<Vec<CMat>> {
    decomposition
        .stars
        .iter()
        .map(|star| scattering_direct(&star.graph, &star.conditions, k).map(ScatteringMatrix::into_entries))
        .collect()
}

/// `S(k)` of the whole graph by composing its stars, in the graph's own ray
/// order.
pub fn scattering_via_stars(
    graph: &MetricGraph,
    conditions: &VertexConditions,
    k: Momentum,
) -> Result<ScatteringMatrix> {
    let decomposition = star_decomposition(graph, conditions)?;
    scattering_from_decomposition(&decomposition, k)
}

pub(crate) fn scattering_from_decomposition(
    decomposition: &StarDecomposition,
    k: Momentum,
) -> Result<ScatteringMatrix> {
    let stars = star_matrices(decomposition, k)?;
    let composed = compose_many(&stars, &decomposition.links, k)?;
    Ok(ScatteringMatrix::new(k, composed.reordered(&decomposition.ray_ports)?))
}
