//! Brute-force minimum-time value maps, used as ground truth.
//!
//! The pendulum oracle is structure-agnostic: label propagation over a grid
//! with the three constant controls applied over `dt` steps through the
//! exact flow (so every computed path is a genuine admissible trajectory
//! re-anchored at cell representatives). The sphere oracle enumerates the
//! proven extremal family on parameter grids and takes per-cell minima.

use rayon::prelude::*;

use crate::error::Result;
use crate::extremal::{v, AlphaParam};
use crate::pendulum::pen_flow;
use crate::planar::PlanarPoint;
use crate::so3::{self, generators, Sign, SpherePoint};

use std::f64::consts::PI;

/// A per-cell minimum arrival-time map with per-family channels.
#[derive(Debug, Clone)]
pub struct GridValueMap {
    pub origin_z1: f64,
    pub origin_z2: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub min_time: Vec<f64>,
    /// Argmin control tag: -1, 0, +1 (0 only for the pendulum oracle).
    pub tag: Vec<i8>,
    pub time_minus: Vec<f64>,
    pub time_bang_only: Vec<f64>,
    pub time_plus: Vec<f64>,
}

impl GridValueMap {
    fn new(origin_z1: f64, origin_z2: f64, h: f64, nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        GridValueMap {
            origin_z1,
            origin_z2,
            h,
            nx,
            ny,
            min_time: vec![f64::INFINITY; n],
            tag: vec![0; n],
            time_minus: vec![f64::INFINITY; n],
            time_bang_only: vec![f64::INFINITY; n],
            time_plus: vec![f64::INFINITY; n],
        }
    }

    pub fn cell_of(&self, z: &PlanarPoint) -> Option<usize> {
        let i = ((z.z1 - self.origin_z1) / self.h).floor();
        let j = ((z.z2 - self.origin_z2) / self.h).floor();
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some(j as usize * self.nx + i as usize)
    }

    pub fn center(&self, idx: usize) -> PlanarPoint {
        let i = idx % self.nx;
        let j = idx / self.nx;
        PlanarPoint::new(
            self.origin_z1 + (i as f64 + 0.5) * self.h,
            self.origin_z2 + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn value_at(&self, z: &PlanarPoint) -> Option<f64> {
        let idx = self.cell_of(z)?;
        let t = self.min_time[idx];
        t.is_finite().then_some(t)
    }

    /// Cells where both bang families arrive within `tol` of each other.
    pub fn cut_cells(&self, tol: f64) -> Vec<usize> {
        (0..self.min_time.len())
            .filter(|&i| {
                self.time_minus[i].is_finite()
                    && self.time_plus[i].is_finite()
                    && (self.time_minus[i] - self.time_plus[i]).abs() <= tol
            })
            .collect()
    }

    fn finalize_min(&mut self) {
        for i in 0..self.min_time.len() {
            let (tm, tp) = (self.time_minus[i], self.time_plus[i]);
            let (best, tag) = if tm <= tp { (tm, -1i8) } else { (tp, 1i8) };
            if best < self.min_time[i] {
                self.min_time[i] = best;
                self.tag[i] = tag;
            }
        }
    }
}

/// Shortest-arrival label propagation for the pendulum problem with source
/// `C(0, rho)` and controls `u` in `{-1, 0, +1}` applied over `dt` steps.
///
/// A state is `(cell, channel)` carrying an exact trajectory point, so
/// every computed path is a genuine admissible trajectory and arrival
/// labels are exact trajectory times. The two family channels are labeled
/// by the source half they departed from (the admissible feedback there is
/// `u_opt = -sgn(z2)`); a third channel propagates with the bang controls
/// only and serves as the bang-bang optimality check (`u = 0` never
/// strictly improves it). An expansion holds one control over consecutive
/// `dt` steps until the trajectory leaves the current cell, claiming every
/// cell the arc touches along the way (the arc is sampled inside each step,
/// so a step of about one cell length cannot shadow a clipped neighbor).
pub fn pendulum_grid_oracle(rho: f64, h: f64, dt: f64) -> Result<GridValueMap> {
    // propagate on a refined state grid, report on the requested one; the
    // dominance pruning error scales with the state-cell size
    const REFINE: usize = 2;
    let fine = propagate(rho, h / REFINE as f64, dt)?;
    let half = rho + 2.0 * h;
    let nx = (2.0 * half / h).ceil() as usize;
    let mut map = GridValueMap::new(-half, -half, h, nx, nx);
    for idx in 0..fine.min_time.len() {
        let c = fine.center(idx);
        if let Some(r) = map.cell_of(&c) {
            map.time_minus[r] = map.time_minus[r].min(fine.time_minus[idx]);
            map.time_plus[r] = map.time_plus[r].min(fine.time_plus[idx]);
            map.time_bang_only[r] = map.time_bang_only[r].min(fine.time_bang_only[idx]);
        }
    }
    map.finalize_min();
    // source cells are at time zero by definition
    for idx in 0..map.min_time.len() {
        let c = map.center(idx);
        if (c.norm() - rho).abs() <= 0.75 * h {
            map.min_time[idx] = 0.0;
            map.tag[idx] = if c.z2.abs() < 1e-12 {
                0
            } else if c.z2 > 0.0 {
                -1
            } else {
                1
            };
        }
    }
    Ok(map)
}

fn propagate(rho: f64, h: f64, dt: f64) -> Result<GridValueMap> {
    let half = rho + 2.0 * h;
    let nx = (2.0 * half / h).ceil() as usize;
    let mut map = GridValueMap::new(-half, -half, h, nx, nx);
    let n_cells = nx * nx;

    let n_states = n_cells * 3;
    let mut settled = vec![false; n_states];
    let mut tentative = vec![f64::INFINITY; n_states];
    let mut rep = vec![PlanarPoint::origin(); n_states];

    fn set_channel(map: &mut GridValueMap, ch: usize, idx: usize, t: f64) {
        match ch {
            0 => map.time_minus[idx] = t,
            1 => map.time_bang_only[idx] = t,
            _ => map.time_plus[idx] = t,
        }
    }

    let keep = move |z: &PlanarPoint| z.norm() <= rho + 2.0 * h;
    let controls = [-1.0, 0.0, 1.0];
    let horizon = PI + 0.5;

    // geometry-only cell lookup, free of the map borrow
    let (gx, gy, gnx, gny) = (map.origin_z1, map.origin_z2, map.nx, map.ny);
    let locate = move |z: &PlanarPoint| -> Option<usize> {
        let i = ((z.z1 - gx) / h).floor();
        let j = ((z.z2 - gy) / h).floor();
        if i < 0.0 || j < 0.0 || i >= gnx as f64 || j >= gny as f64 {
            return None;
        }
        Some(j as usize * gnx + i as usize)
    };

    // Walk with constant control for up to `max_walk` dt-steps, claiming
    // every visited cell at the exact trajectory time of an interior sample
    // point; the walk stops early once it has left its starting cell (the
    // re-anchoring of interior expansions). Seed walks run to the horizon,
    // which lays every single-bang trajectory down exactly and keeps the
    // propagation drift confined to multi-arc paths.
    const SUBSAMPLES: usize = 8;
    let walk_out = move |z0: PlanarPoint,
                         u: f64,
                         cell: usize,
                         max_walk: u32|
          -> Vec<(usize, PlanarPoint, f64)> {
        let mut claims: Vec<(usize, PlanarPoint, f64)> = Vec::new();
        let mut last_claim: Option<usize> = None;
        let mut z = z0;
        for j in 0..max_walk {
            let t_base = j as f64 * dt;
            let mut exited = false;
            for q in 1..=SUBSAMPLES {
                let tau = dt * q as f64 / SUBSAMPLES as f64;
                let p = pen_flow(z, u, tau);
                if !keep(&p) {
                    return claims;
                }
                match locate(&p) {
                    None => return claims,
                    Some(c) => {
                        if c != cell
                            && last_claim != Some(c)
                            && !claims.iter().any(|cl| cl.0 == c)
                        {
                            claims.push((c, p, t_base + tau));
                            last_claim = Some(c);
                        }
                        if c != cell && q == SUBSAMPLES {
                            exited = true;
                        }
                    }
                }
            }
            z = pen_flow(z, u, dt);
            if exited && max_walk <= 64 {
                return claims;
            }
        }
        claims
    };

    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    // f64 keys ordered through their IEEE bit pattern (all times are finite
    // and non-negative)
    let key = |t: f64| -> u64 { t.to_bits() };
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();

    let push = |heap: &mut BinaryHeap<Reverse<(u64, usize)>>,
                    tentative: &mut Vec<f64>,
                    rep: &mut Vec<PlanarPoint>,
                    state: usize,
                    t: f64,
                    z: PlanarPoint| {
        if t < tentative[state] {
            tentative[state] = t;
            rep[state] = z;
            heap.push(Reverse((key(t), state)));
        }
    };

    // Seeds: source-band cells projected onto the circle, walked out of
    // their cell with every control admissible for the channel. Channels 0
    // and 2 are the families by source half; channel 1 is the bang-only
    // variant seeded from both halves. Near the two feedback poles both
    // families are seeded.
    let mut sources: Vec<usize> = Vec::new();
    for idx in 0..n_cells {
        let c = map.center(idx);
        let r = c.norm();
        if (r - rho).abs() <= 0.75 * h && r > 0.0 {
            sources.push(idx);
            let on_circle = PlanarPoint::new(c.z1 * rho / r, c.z2 * rho / r);
            let horizon_steps = (horizon / dt).ceil() as u32;
            let mut seed = |ch: usize, u: f64| {
                for (cell, z, t) in walk_out(on_circle, u, idx, horizon_steps) {
                    push(&mut heap, &mut tentative, &mut rep, cell * 3 + ch, t, z);
                }
            };
            let upper = on_circle.z2 >= -0.75 * h;
            let lower = on_circle.z2 <= 0.75 * h;
            if upper {
                seed(0, -1.0);
                seed(0, 0.0);
                seed(1, -1.0);
            }
            if lower {
                seed(2, 1.0);
                seed(2, 0.0);
                seed(1, 1.0);
            }
        }
    }

    while let Some(Reverse((tkey, state))) = heap.pop() {
        let t = f64::from_bits(tkey);
        if settled[state] || t > tentative[state] || t > horizon {
            continue;
        }
        settled[state] = true;
        let cell = state / 3;
        let ch = state % 3;
        set_channel(&mut map, ch, cell, t);
        let z0 = rep[state];
        // the bang-only channel never coasts
        let admissible: &[f64] = if ch == 1 { &[-1.0, 1.0] } else { &controls };
        for &u in admissible {
            for (target_cell, z, dt_arc) in walk_out(z0, u, cell, 64) {
                let target = target_cell * 3 + ch;
                if !settled[target] {
                    push(&mut heap, &mut tentative, &mut rep, target, t + dt_arc, z);
                }
            }
        }
    }

    let _ = sources;
    map.finalize_min();
    Ok(map)
}

/// Resolution parameters of the extremal-family enumeration.
#[derive(Debug, Clone, Copy)]
pub struct SphereOracleConfig {
    /// Half-width of the rescaled planar window centered at the south pole.
    pub window: f64,
    /// Planar cell size.
    pub cell: f64,
    /// Number of first-arc samples over (0, pi].
    pub n_s_i: usize,
    /// Number of final-arc samples over (0, v(s_i)].
    pub n_s_f: usize,
}

impl SphereOracleConfig {
    pub fn default_for(alpha: &AlphaParam) -> Self {
        SphereOracleConfig {
            window: 2.0 * (1.0 + alpha.remainder()) + 1.0,
            cell: 0.02,
            n_s_i: 2000,
            n_s_f: 500,
        }
    }
}

/// Enumerates the bang-bang extremal family and records per-cell minimum
/// arrival times in the `M_alpha` chart near the south pole.
///
/// Arc counts run over `1 ..= k_max + 1`; the first-arc and final-arc
/// durations run over uniform grids. The family tag is the starting control.
pub fn sphere_family_oracle(alpha: &AlphaParam, config: &SphereOracleConfig) -> Result<GridValueMap> {
    let a = alpha.alpha();
    let gen = generators(a)?;
    let nx = (2.0 * config.window / config.cell).ceil() as usize;
    let mut map = GridValueMap::new(-config.window, -config.window, config.cell, nx, nx);
    let n_cells = nx * nx;
    let n_max = alpha.k_max() + 1;

    let run_family = |eps: Sign| -> Vec<f64> {
        let chunk = (config.n_s_i / rayon::current_num_threads().max(1)).max(32);
        let indices: Vec<usize> = (0..config.n_s_i).collect();
        indices
            .par_chunks(chunk)
            .map(|chunk_indices| {
                let mut local = vec![f64::INFINITY; n_cells];
                for &si_idx in chunk_indices {
                    let s_i = PI * (si_idx as f64 + 1.0) / config.n_s_i as f64;
                    let dur = v(s_i, a);
                    let mut base = so3::rodrigues_apply(
                        gen.bang(eps).axis(),
                        s_i,
                        SpherePoint::north().as_vector(),
                    );
                    // single full first arc
                    deposit(&map, &mut local, &base, a, s_i, config);
                    let mut elapsed = s_i;
                    for j in 2..=n_max {
                        let axis = gen.bang(eps.at_arc(j)).axis();
                        for sf_idx in 0..config.n_s_f {
                            let s_f = dur * (sf_idx as f64 + 1.0) / config.n_s_f as f64;
                            let p = so3::rodrigues_apply(axis, s_f, &base);
                            deposit(&map, &mut local, &p, a, elapsed + s_f, config);
                        }
                        base = so3::rodrigues_apply(axis, dur, &base);
                        elapsed += dur;
                    }
                }
                local
            })
            .reduce(
                || vec![f64::INFINITY; n_cells],
                |mut acc, local| {
                    for (a, l) in acc.iter_mut().zip(local) {
                        if l < *a {
                            *a = l;
                        }
                    }
                    acc
                },
            )
    };

    let time_plus = run_family(Sign::Plus);
    let time_minus = run_family(Sign::Minus);
    map.time_plus = time_plus;
    map.time_minus = time_minus;
    map.finalize_min();
    Ok(map)
}

fn deposit(
    map: &GridValueMap,
    local: &mut [f64],
    p: &nalgebra::Vector3<f64>,
    alpha: f64,
    time: f64,
    config: &SphereOracleConfig,
) {
    // only the chart near the south pole is mapped
    if p.z >= 0.0 {
        return;
    }
    let z = PlanarPoint::new(p.x / alpha, p.y / alpha);
    if z.z1.abs() > config.window || z.z2.abs() > config.window {
        return;
    }
    if let Some(idx) = map.cell_of(&z) {
        if time < local[idx] {
            local[idx] = time;
        }
    }
}
