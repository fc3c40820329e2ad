use trace_shape_core::shape_opt::band_for_measure;
use trace_shape_core::symmetry::shipped_fields;
use trace_shape_core::young::{check_trace_compatibility, Compatibility};

use crate::config::{Command, DomainSpec, ExperimentConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub code: &'static str,
    pub message: String,
    /// Fatal findings stop `run` with a configuration error.
    pub fatal: bool,
}

pub const ALPHA_RANGE: &str = "alpha out of open range";
pub const COMPATIBILITY: &str = "trace embedding compatibility not verified";

fn finding(code: &'static str, message: String, fatal: bool) -> Finding {
    Finding { code, message, fatal }
}

fn solves_trace_problem(c: Command) -> bool {
    !matches!(c, Command::YoungCheck | Command::Symmetrize)
}

/// Dry-run checks of a parsed configuration; never solves.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Finding> {
    let mut out = Vec::new();
    let mesh = match cfg.domain.build() {
        Ok(m) => m,
        Err(e) => return vec![finding("domain", format!("cannot build domain: {e}"), true)],
    };

    let bound = match cfg.command {
        Command::Window | Command::SweepAlpha => Some(mesh.perimeter()),
        Command::Hole | Command::Blowup => Some(mesh.area()),
        _ => None,
    };
    if let Some(total) = bound {
        for &a in &cfg.alphas {
            if !(a > 0.0 && a < total) {
                out.push(finding(ALPHA_RANGE, format!("{ALPHA_RANGE}: alpha = {a} not in (0, {total})"), true));
            }
        }
    }

    if solves_trace_problem(cfg.command) {
        let verified = matches!(
            check_trace_compatibility(&cfg.g, cfg.h.expr(), cfg.dimension),
            Ok(r) if r.verdict == Compatibility::Compatible
        );
        if !verified {
            out.push(finding(
                COMPATIBILITY,
                format!("{COMPATIBILITY}: G = {}, H = {}, N = {}", cfg.g, cfg.h, cfg.dimension),
                false,
            ));
        }
    }

    match cfg.command {
        Command::Blowup => {
            if cfg.eps.windows(2).any(|w| w[1] >= w[0]) || cfg.eps.iter().any(|e| !(*e > 0.0)) {
                out.push(finding("eps", "eps must be positive and strictly decreasing".into(), true));
            } else if let Some(&a) = cfg.alphas.first() {
                for &eps in &cfg.eps {
                    if band_for_measure(&mesh, eps, a).is_err() {
                        out.push(finding("feasibility", format!("no band of area {a} starts at eps = {eps}"), false));
                    }
                }
            }
        }
        Command::Capacity => {
            let domain_radius = match cfg.domain {
                DomainSpec::Disk { radius, .. } => radius,
                DomainSpec::Square { side, .. } => 0.5 * side,
            };
            for &r in &cfg.radii {
                if r >= cfg.box_radius || r >= domain_radius {
                    out.push(finding("feasibility", format!("obstacle of radius {r} touches a boundary"), false));
                }
            }
        }
        Command::Symmetrize => {
            let known: Vec<&str> = shipped_fields(&mesh).into_iter().map(|(n, _)| n).collect();
            for f in cfg.fields.iter().filter(|f| !known.contains(&f.as_str())) {
                out.push(finding("fields", format!("unknown field '{f}'; known: {}", known.join(", ")), true));
            }
        }
        Command::Continuity if cfg.steps == 0 => {
            out.push(finding("steps", "continuity needs steps >= 1".into(), true));
        }
        _ => {}
    }
    out
}
