//! Brute-force search for admissible vertical directions.
//!
//! In a homogeneous total space with curvature gap `R` and mixed-plane
//! curvature `cK`, a rotated frame with third column `(u1, u2, u3)` can only
//! be the adapted frame of a Riemannian submersion if the rotated curvature
//! components satisfy the residual system of an adapted frame with constant
//! data. That forces
//!
//! ```text
//!   u1^2 R + cK = u2^2 R + cK   (both mixed planes see sigma^2)
//!   u1 u2 R = 0                 (cross components vanish)
//!   u1^2 R + cK >= 0            (the common value is a square)
//! ```
//!
//! For `R != 0` the only solutions are the poles `u = (0, 0, +-1)`: the
//! vertical direction is rigid. For `R = 0` the system is vacuous and every
//! direction qualifies. The search scans a deterministic Fibonacci-sphere
//! grid and clusters the surviving directions, so rigidity shows up as
//! exactly two polar clusters.

/// Number of grid directions.
pub const SOLVER_GRID: usize = 10_000;
/// Feasibility tolerance for the constraint system.
pub const FEASIBILITY_TOL: f64 = 1e-3;
/// Chord-distance radius used to merge neighboring feasible directions.
pub const CLUSTER_RADIUS: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub enum SolverOutcome {
    /// Zero curvature gap: the constraint subsystem is vacuous and imposes
    /// no restriction on the vertical direction.
    NoRigidity,
    /// Cluster centers of the feasible directions, ordered from the north
    /// pole down.
    Clusters(Vec<[f64; 3]>),
}

/// Scans the unit sphere for directions satisfying the adapted-frame
/// constraint system with curvature gap `r_gap` and constant term
/// `constant_term` (the mixed-plane curvature).
pub fn vertical_direction_solver(r_gap: f64, constant_term: f64) -> SolverOutcome {
    if r_gap == 0.0 {
        return SolverOutcome::NoRigidity;
    }

    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let mut feasible: Vec<[f64; 3]> = Vec::new();
    for i in 0..SOLVER_GRID {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / SOLVER_GRID as f64;
        let radius = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * i as f64;
        let u = [radius * phi.cos(), radius * phi.sin(), z];
        let balanced = (u[0] * u[0] - u[1] * u[1]).abs() <= FEASIBILITY_TOL;
        let decoupled = (u[0] * u[1]).abs() <= FEASIBILITY_TOL;
        let sigma_sq = u[0] * u[0] * r_gap + constant_term;
        if balanced && decoupled && sigma_sq >= -FEASIBILITY_TOL {
            feasible.push(u);
        }
    }

    SolverOutcome::Clusters(cluster(&feasible))
}

/// Greedy breadth-first merge of directions within the cluster radius;
/// centers are normalized means, sorted north to south.
fn cluster(points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut assigned = vec![false; points.len()];
    let mut centers = Vec::new();
    for start in 0..points.len() {
        if assigned[start] {
            continue;
        }
        let mut queue = vec![start];
        let mut members = Vec::new();
        assigned[start] = true;
        while let Some(idx) = queue.pop() {
            members.push(idx);
            for (j, flag) in assigned.iter_mut().enumerate() {
                if !*flag && chord(&points[idx], &points[j]) <= CLUSTER_RADIUS {
                    *flag = true;
                    queue.push(j);
                }
            }
        }
        let mut mean = [0.0f64; 3];
        for &idx in &members {
            for (slot, c) in mean.iter_mut().zip(points[idx].iter()) {
                *slot += c;
            }
        }
        let norm = mean.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            centers.push(mean.map(|c| c / norm));
        } else {
            // Antipodally balanced cluster; keep the raw mean so it is
            // visible rather than silently dropped.
            centers.push(mean);
        }
    }
    centers.sort_by(|a, b| b[2].total_cmp(&a[2]));
    centers
}

fn chord(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
