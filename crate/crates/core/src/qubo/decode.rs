use super::{Origin, QuboError, QuboModel, Result, VarRole};
use crate::problems::{
    eval_cut, eval_salbp, eval_setcover, portfolio_objective, Assignment, DomainSolution, Sense, Violation,
};

/// Map a bitstring back to the domain and evaluate it there. Feasibility
/// comes from the domain check; slack bits are ignored.
pub fn decode(q: &QuboModel, bits: &[bool]) -> Result<DomainSolution> {
    if bits.len() != q.n_vars() {
        return Err(QuboError::LengthMismatch { expected: q.n_vars(), found: bits.len() });
    }
    let on = |pred: &dyn Fn(&VarRole) -> Option<usize>| -> Vec<usize> {
        q.decode_map().iter().zip(bits).filter(|(_, &b)| b).filter_map(|(r, _)| pred(r)).collect()
    };
    Ok(match q.origin() {
        Origin::Raw => return Err(QuboError::NoDomain),
        Origin::MaxCut(g) => {
            let mut side = vec![false; g.n()];
            for v in on(&|r| if let VarRole::Vertex(v) = r { Some(*v) } else { None }) {
                side[v] = true;
            }
            let cut = eval_cut(g, &side)?;
            DomainSolution::new("maxcut", Assignment::Cut(side), -cut, Sense::Maximize, Vec::new())
        }
        Origin::SetCover(inst) => {
            let chosen = on(&|r| if let VarRole::Subset(j) = r { Some(*j) } else { None });
            eval_setcover(inst, &chosen)?
        }
        Origin::Portfolio(inst) => {
            let picked = on(&|r| if let VarRole::Asset(i) = r { Some(*i) } else { None });
            if picked.is_empty() {
                DomainSolution::new(
                    format!("portfolio_{}", inst.formulation.name()),
                    Assignment::Assets(Vec::new()),
                    0.0,
                    if matches!(inst.formulation, crate::problems::Formulation::Minvola { .. }) {
                        Sense::Minimize
                    } else {
                        Sense::Maximize
                    },
                    vec![Violation::new("cardinality", format!("0 assets selected, expected {}", inst.k))],
                )
            } else {
                let mut sel = vec![false; inst.n()];
                for i in picked {
                    sel[i] = true;
                }
                portfolio_objective(inst, &sel)?
            }
        }
        Origin::Salbp(inst) => {
            let mut plan = vec![Vec::new(); inst.n_tasks()];
            for (r, &b) in q.decode_map().iter().zip(bits) {
                if let (VarRole::Task { task, station }, true) = (r, b) {
                    plan[*task].push(*station);
                }
            }
            eval_salbp(inst, &plan)?
        }
    })
}

/// Inverse of [`decode`]: problem bits from the domain assignment, slack
/// bits set so that every satisfied inequality carries zero penalty.
/// Station-use bits of a SALBP plan are set exactly for occupied stations.
pub fn encode(q: &QuboModel, sol: &DomainSolution) -> Result<Vec<bool>> {
    let mut bits = vec![false; q.n_vars()];
    let mismatch = || QuboError::Unencodable(format!("{:?} does not fit a {} model", sol.assignment, q.problem()));
    for (i, role) in q.decode_map().iter().enumerate() {
        bits[i] = match (role, &sol.assignment) {
            (VarRole::Vertex(v), Assignment::Cut(side)) => *side.get(*v).ok_or_else(mismatch)?,
            (VarRole::Subset(j), Assignment::Subsets(chosen)) => chosen.contains(j),
            (VarRole::Asset(a), Assignment::Assets(chosen)) => chosen.contains(a),
            (VarRole::Task { task, station }, Assignment::Stations(plan)) => {
                plan.get(*task).ok_or_else(mismatch)?.contains(station)
            }
            (VarRole::Station(s), Assignment::Stations(plan)) => plan.iter().any(|st| st.contains(s)),
            (VarRole::Slack { .. }, _) => false,
            (VarRole::Generic(_), _) => return Err(QuboError::NoDomain),
            _ => return Err(mismatch()),
        };
    }
    for g in q.slack_groups() {
        let need = g.residual.eval(&bits).round();
        let value = need.clamp(0.0, g.range() as f64) as u64;
        let slack = g.bits_for(value).expect("clamped into range");
        for (&v, b) in g.vars.iter().zip(slack) {
            bits[v] = b;
        }
    }
    Ok(bits)
}
