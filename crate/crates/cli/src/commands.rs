use qgscatter::factorization::compose_many;
use qgscatter::graph::star_decomposition;
use qgscatter::linalg::{max_abs_diff, unitarity_residual};
use qgscatter::sweep::map;
use qgscatter::{
    embedded_eigenvalue_scan, scattering_direct, scattering_via_stars, CMat, Error, Link, Momentum,
    Port,
};

use crate::input::GraphInput;
use crate::report::{
    CompareReport, CompareRow, EmbeddedReport, EmbeddedRow, MatrixReport, MatrixRow,
};
use crate::CliError;

fn momenta(ks: &[f64]) -> Result<Vec<Momentum>, CliError> {
    ks.iter()
        .map(|&k| Momentum::new(k).map_err(|e| CliError::from_error(&e)))
        .collect()
}

fn collect<T>(rows: Vec<Result<T, Error>>) -> Result<Vec<T>, CliError> {
    rows.into_iter()
        .map(|r| r.map_err(|e| CliError::from_error(&e)))
        .collect()
}

fn ok_row(k: f64, s: CMat, sigma_min: Option<f64>) -> MatrixRow {
    MatrixRow {
        k,
        status: "ok",
        sigma_min,
        unitarity: Some(unitarity_residual(&s)),
        s: Some(s),
    }
}

fn flagged_row(k: f64, status: &'static str, sigma_min: f64) -> MatrixRow {
    MatrixRow {
        k,
        status,
        sigma_min: Some(sigma_min),
        s: None,
        unitarity: None,
    }
}

pub fn smatrix(input: &GraphInput, ks: &[f64]) -> Result<MatrixReport, CliError> {
    let rows = map(&momenta(ks)?, |&k| match scattering_direct(&input.graph, &input.conditions, k) {
        Ok(s) => Ok(ok_row(k.k(), s.into_entries(), None)),
        Err(Error::Degenerate { sigma_min, .. }) => Ok(flagged_row(k.k(), "degenerate", sigma_min)),
        Err(e) => Err(e),
    });
    Ok(MatrixReport {
        command: "smatrix",
        ports: None,
        size: input.graph.ray_count(),
        rows: collect(rows)?,
    })
}

/// Free ports of the linked pieces, ordered by `(graph, ray)`.
fn free_ports(pieces: &[GraphInput], links: &[Link]) -> Vec<Port> {
    pieces
        .iter()
        .enumerate()
        .flat_map(|(g, p)| (0..p.graph.ray_count()).map(move |r| Port::new(g, r)))
        .filter(|p| !links.iter().any(|l| l.a == *p || l.b == *p))
        .collect()
}

pub fn compose(pieces: &[GraphInput], links: &[Link], ks: &[f64]) -> Result<MatrixReport, CliError> {
    let ports = free_ports(pieces, links);
    let rows = map(&momenta(ks)?, |&k| {
        let mut matrices = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match scattering_direct(&piece.graph, &piece.conditions, k) {
                Ok(s) => matrices.push(s.into_entries()),
                Err(Error::Degenerate { sigma_min, .. }) => {
                    return Ok(flagged_row(k.k(), "degenerate", sigma_min))
                }
                Err(e) => return Err(e),
            }
        }
        match compose_many(&matrices, links, k) {
            Ok(out) => {
                let sigma = out.sigma_min;
                Ok(ok_row(k.k(), out.reordered(&ports)?, Some(sigma)))
            }
            Err(Error::ConditionA { sigma_min }) => Ok(flagged_row(k.k(), "condition_a", sigma_min)),
            Err(e) => Err(e),
        }
    });
    Ok(MatrixReport {
        command: "compose",
        size: ports.len(),
        ports: Some(ports),
        rows: collect(rows)?,
    })
}

pub fn compare(input: &GraphInput, ks: &[f64], tolerance: f64) -> Result<CompareReport, CliError> {
    let decomposition =
        star_decomposition(&input.graph, &input.conditions).map_err(|e| CliError::from_error(&e))?;
    let rows = map(&momenta(ks)?, |&k| {
        let direct = match scattering_direct(&input.graph, &input.conditions, k) {
            Ok(s) => Some(s),
            Err(Error::Degenerate { .. }) => None,
            Err(e) => return Err(e),
        };
        let composed = match scattering_via_stars(&input.graph, &input.conditions, k) {
            Ok(s) => Some(s),
            Err(Error::ConditionA { .. }) => None,
            Err(e) => return Err(e),
        };
        let sigma_min = qgscatter::factorization::b2p_sigma_min(&decomposition, k)?;
        let deviation = match (&direct, &composed) {
            (Some(d), Some(c)) => Some(max_abs_diff(d.entries(), c.entries())),
            _ => None,
        };
        Ok(CompareRow {
            k: k.k(),
            direct: if direct.is_some() { "ok" } else { "degenerate" },
            composed: if composed.is_some() { "ok" } else { "condition_a" },
            deviation,
            sigma_min: Some(sigma_min),
        })
    });
    Ok(CompareReport {
        tolerance,
        rows: collect(rows)?,
    })
}

pub fn embedded(input: &GraphInput, ks: &[f64]) -> Result<EmbeddedReport, CliError> {
    let found = embedded_eigenvalue_scan(&input.graph, &input.conditions, ks)
        .map_err(|e| CliError::from_error(&e))?;
    Ok(EmbeddedReport {
        rows: found
            .into_iter()
            .map(|e| EmbeddedRow {
                k: e.k,
                sigma_min: e.sigma_min,
                kernel_dimension: e.kernel_dimension,
                kernel_sigma: e.kernel_sigma,
            })
            .collect(),
    })
}
