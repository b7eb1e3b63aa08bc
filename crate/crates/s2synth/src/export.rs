//! Deterministic CSV and JSON serialization of the computed objects.
//!
//! Floating-point values in CSV are written with 17 significant digits so
//! that files round-trip bit-exactly; JSON goes through serde_json, whose
//! shortest-representation floats also round-trip exactly.

use crate::cutlocus::GammaCurve;
use crate::front::FrontCurve;
use crate::oracle::GridValueMap;
use crate::pendulum::{OverlapPoint, SynthesisSample};
use crate::so3::Sign;

/// 17-significant-digit rendering (1 leading + 16 fractional digits).
pub fn f17(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn front_csv(front: &FrontCurve) -> String {
    let mut out = String::from("branch,s,x1,x2,x3,t1,t2,t3\n");
    for (branch, samples) in [("+", &front.samples_plus), ("-", &front.samples_minus)] {
        for smp in samples.iter() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                branch,
                f17(smp.s),
                f17(smp.point.x1()),
                f17(smp.point.x2()),
                f17(smp.point.x3()),
                f17(smp.tangent.x),
                f17(smp.tangent.y),
                f17(smp.tangent.z),
            ));
        }
    }
    out
}

pub fn front_metadata(front: &FrontCurve) -> serde_json::Value {
    serde_json::json!({
        "alpha": front.alpha.alpha(),
        "r": front.alpha.remainder(),
        "k": front.k,
        "is_simple_closed": front.is_simple_closed,
        "is_optimal": front.is_optimal,
    })
}

pub fn gamma_csv(curve: &GammaCurve) -> String {
    let mut out = String::from("s,s_prime,t,z1,z2,residual,newton_iters\n");
    for sol in &curve.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            f17(sol.s),
            f17(sol.s_prime),
            f17(sol.t),
            f17(sol.point.z1),
            f17(sol.point.z2),
            f17(sol.residual),
            sol.newton_iters,
        ));
    }
    out
}

pub fn overlap_csv(points: &[OverlapPoint]) -> String {
    let mut out = String::from("s,s_prime,t,z1,z2\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            f17(p.s),
            f17(p.s_prime),
            f17(p.t),
            f17(p.z.z1),
            f17(p.z.z2),
        ));
    }
    out
}

pub fn synthesis_csv(rows: &[SynthesisSample]) -> String {
    let mut out = String::from("z1,z2,u_opt,min_time,on_cut_locus\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            f17(r.z1),
            f17(r.z2),
            r.u_opt,
            f17(r.min_time),
            r.on_cut_locus,
        ));
    }
    out
}

pub fn value_map_csv(map: &GridValueMap) -> String {
    let mut out = String::from("z1,z2,time,control\n");
    for idx in 0..map.min_time.len() {
        let t = map.min_time[idx];
        if !t.is_finite() {
            continue;
        }
        let c = map.center(idx);
        out.push_str(&format!(
            "{},{},{},{}\n",
            f17(c.z1),
            f17(c.z2),
            f17(t),
            map.tag[idx],
        ));
    }
    out
}

pub fn switching_csv(samples: &[crate::extremal::SwitchCurveSample]) -> String {
    let mut out = String::from("k,eps,s,x1,x2,x3,t1,t2,t3,arrival_time\n");
    for smp in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            smp.k,
            match smp.eps {
                Sign::Plus => 1,
                Sign::Minus => -1,
            },
            f17(smp.s),
            f17(smp.point.x1()),
            f17(smp.point.x2()),
            f17(smp.point.x3()),
            f17(smp.tangent.x),
            f17(smp.tangent.y),
            f17(smp.tangent.z),
            f17(smp.arrival_time),
        ));
    }
    out
}
