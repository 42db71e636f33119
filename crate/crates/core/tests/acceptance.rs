//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use common::{bound_state, rng, sea_direct};
use euler2c::bracket::poisson_bracket_richardson;
use euler2c::collision::{conic_crossing, risk_classify, RiskClass};
use euler2c::coords::{
    cartesian_to_delaunay, delaunay_to_cartesian, eval_h_elliptic, eval_h_p_chart, from_elliptic, g0_from_parts,
    g0_in_chart, hj_split, p_chart, to_elliptic, DelaunayElements,
};
use euler2c::dynamics::{eval_h, eval_sea, integrate, to_symmetric, Model, SymmetricParams, DEFAULT_GUARD};
use euler2c::integrals::{euler_g, euler_g0, euler_g_sym};
use euler2c::portrait::{equilibria, g0_hat, homoclinic, level_curve, HomoclinicBranch, MotionClass, PortraitSpec};
use euler2c::roots::brent;
use euler2c::secular::{compare_with_direct, u_avg, u_avg_series, u_bar_direct, u_fixed_points, ComparisonSetup, SecularPoint};
use euler2c::state::rotate_about;
use euler2c::{CartesianState, MassParams, Vec3};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// 1. Conservation along a two-centre run.
const C1_ENERGY: f64 = 1e-8;
const C1_EULER: f64 = 1e-6;

fn conservation() -> Outcome {
    let p = MassParams::two_centre(1.0, 0.1).map_err(|e| e.to_string())?;
    let s0 = CartesianState::new(Vec3::new(0.0, 0.9, 0.15), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
    let tr = integrate(&s0, &Model::TwoCentre(p), (0.0, 100.0), 1e-10, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    if tr.is_collision() {
        return Err("run hit the collision guard".into());
    }
    let d0 = tr.diagnostics[0];
    let de = tr.diagnostics.iter().map(|d| rel(d.energy, d0.energy)).fold(0.0, f64::max);
    let dg = tr.diagnostics.iter().map(|d| rel(d.euler_g, d0.euler_g)).fold(0.0, f64::max);
    check(de < C1_ENERGY && dg < C1_EULER, format!("energy drift {de:.2e} (< {C1_ENERGY:e}), G drift {dg:.2e} (< {C1_EULER:e})"))
}

// 2. {h, G} vanishes.
const C2_BRACKET: f64 = 1e-6;

fn commutation() -> Outcome {
    let p = MassParams::two_centre(1.0, 0.1).map_err(|e| e.to_string())?;
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = bound_state(&mut r, 1.0);
        let b = poisson_bracket_richardson(|q| eval_h(q, &p), |q| euler_g(q, &p), &s, 1e-4).map_err(|e| e.to_string())?;
        worst = worst.max(b.abs());
    }
    check(worst < C2_BRACKET, format!("max |{{h,G}}| = {worst:.2e} over 100 states (< {C2_BRACKET:e})"))
}

// 3. Chart consistency.
const C3_TOL: f64 = 1e-9;

fn charts() -> Outcome {
    let p = MassParams::two_centre(1.0, 0.1).map_err(|e| e.to_string())?;
    let mut r = rng(3);
    let (mut g0_err, mut del_err, mut ell_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut elliptic_tested = 0;
    for _ in 0..1000 {
        let s = bound_state(&mut r, 1.0);
        let d = cartesian_to_delaunay(&s, &p).and_then(|c| c.require_regular()).map_err(|e| e.to_string())?;
        let g0 = euler_g0(&s, 1.0).map_err(|e| e.to_string())?;
        g0_err = g0_err.max((g0_in_chart(&d, 1.0).map_err(|e| e.to_string())? - g0).abs() / g0.abs().max(1.0));
        del_err = del_err.max(delaunay_to_cartesian(&d, &p).map_err(|e| e.to_string())?.max_abs_diff(&s));
        let (y, x, sp) = to_symmetric(&s, &p);
        let pc = p_chart(&y, &x, &sp.x0).map_err(|e| e.to_string())?;
        if let Ok(es) = to_elliptic(&pc) {
            let back = from_elliptic(&es).map_err(|e| e.to_string())?;
            let e = [back.radial - pc.radial, back.phi_norm - pc.phi_norm, back.r - pc.r, back.phi - pc.phi, back.theta - pc.theta]
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            ell_err = ell_err.max(e);
            elliptic_tested += 1;
        }
    }
    check(
        g0_err < C3_TOL && del_err < C3_TOL && ell_err < C3_TOL && elliptic_tested > 900,
        format!("G0 chart {g0_err:.2e}, Delaunay roundtrip {del_err:.2e}, elliptic roundtrip {ell_err:.2e} ({elliptic_tested} states) (< {C3_TOL:e})"),
    )
}

// 4. Separation of the symmetric problem in elliptic coordinates.
const C4_SPLIT: f64 = 1e-8;
const C4_HAMILTONIAN: f64 = 1e-10;

fn separation() -> Outcome {
    let sp = SymmetricParams { x0: Vec3::new(0.5, 0.1, -0.2), m_plus: 1.0, m_minus: 0.3 };
    let s0 = CartesianState::new(Vec3::new(0.1, 0.9, 0.3), Vec3::new(-0.2, 1.2, 0.4), Vec3::zeros());
    let tr = integrate(&s0, &Model::Symmetric(sp), (0.0, 30.0), 1e-11, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let (mut split, mut vs_g, mut ham) = (0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    for s in &tr.samples {
        let (y, x) = (s.state.y, s.state.x);
        let pc = p_chart(&y, &x, &sp.x0).map_err(|e| e.to_string())?;
        let Ok(es) = to_elliptic(&pc) else { continue };
        let e = eval_h_elliptic(&es, sp.m_plus, sp.m_minus).map_err(|e| e.to_string())?;
        let (fm, fl) = hj_split(&es, e, sp.m_plus, sp.m_minus).map_err(|e| e.to_string())?;
        let gs = euler_g_sym(&y, &x, &sp).map_err(|e| e.to_string())?;
        split = split.max((fm - fl).abs());
        vs_g = vs_g.max((fm - gs).abs().max((fl - gs).abs()));
        ham = ham.max((e - eval_h_p_chart(&pc, sp.m_plus, sp.m_minus).map_err(|e| e.to_string())?).abs());
        n += 1;
    }
    check(
        split < C4_SPLIT && vs_g < C4_SPLIT && ham < C4_HAMILTONIAN && n > 100,
        format!("|F_mu - F_lambda| {split:.2e}, |F - G_sym| {vs_g:.2e} (< {C4_SPLIT:e}); |H_ell - H_P| {ham:.2e} (< {C4_HAMILTONIAN:e}); {n} samples"),
    )
}

// 5. Portrait exactness.
const C5_TOL: f64 = 1e-12;

fn portrait() -> Outcome {
    let (mut resid, mut eq_err) = (0.0f64, 0.0f64);
    let mut class_mismatch = 0;
    for i in 0..50 {
        let d = (i as f64 + 0.5) / 50.0;
        for j in 0..50 {
            let level = -d + (1.0 + d) * j as f64 / 50.0;
            let c = level_curve(&PortraitSpec::new(d, level, 1.0), 200).map_err(|e| e.to_string())?;
            let points: Vec<(f64, f64)> = c.branches.iter().flat_map(|b| b.points.iter().copied()).collect();
            for &(g, x) in &points {
                let w = (1.0 - x * x).max(0.0).sqrt();
                resid = resid.max((w * w - d * w * g.cos() - 1.0 + level).abs());
                // admissible arc: cos g <= level/delta
                if g.cos() > level / d + C5_TOL {
                    class_mismatch += 1;
                }
            }
            let expect = if level < d { MotionClass::Libration } else { MotionClass::Rotation };
            let covers_circle = points.iter().any(|p| p.0.cos() > 1.0 - 1e-9);
            let ok = match c.class {
                MotionClass::Libration => expect == MotionClass::Libration && !covers_circle,
                MotionClass::Separatrix => (level - d).abs() <= 1e-12,
                MotionClass::Rotation => expect == MotionClass::Rotation && covers_circle,
                _ => false,
            };
            if !ok {
                class_mismatch += 1;
            }
        }
        for e in equilibria(d).map_err(|e| e.to_string())? {
            eq_err = eq_err.max((g0_hat(d, e.g_over_lambda, e.g) - e.level).abs());
        }
        let levels: Vec<f64> = equilibria(d).map_err(|e| e.to_string())?.iter().map(|e| e.level).collect();
        eq_err = eq_err.max((levels[0] - d).abs()).max((levels[1] + d).abs()).max((levels[2] - 1.0 - d * d / 4.0).abs());
    }
    check(
        resid < C5_TOL && eq_err < C5_TOL && class_mismatch == 0,
        format!("level residual {resid:.2e}, equilibrium levels {eq_err:.2e} (< {C5_TOL:e}), classification mismatches {class_mismatch}"),
    )
}

// 6. Homoclinic solution.
const C6_LEVEL: f64 = 1e-9;
const C6_LIMIT: f64 = 1e-6;

fn homoclinic_orbit() -> Outcome {
    let (mut resid, mut limit) = (0.0f64, 0.0f64);
    for &d in &[0.1, 0.5, 0.9] {
        for k in 0..=2000 {
            let t = -10.0 + 0.01 * k as f64;
            let (big_g, g) = homoclinic(d, 1.0, t, 0.0, HomoclinicBranch::Flow).map_err(|e| e.to_string())?;
            resid = resid.max((g0_hat(d, big_g, g) - d).abs());
        }
        let sigma = (d * (2.0 - d)).sqrt();
        for sign in [-1.0, 1.0] {
            let (big_g, g) = homoclinic(d, 1.0, sign * 20.0 / sigma, 0.0, HomoclinicBranch::Flow).map_err(|e| e.to_string())?;
            limit = limit.max(big_g.abs()).max(g.abs());
        }
    }
    check(resid < C6_LEVEL && limit < C6_LIMIT, format!("level residual {resid:.2e} (< {C6_LEVEL:e}), |(G,g)| at sigma*Lambda*|t-t0| = 20: {limit:.2e} (< {C6_LIMIT:e})"))
}

// 7. Averaged potential: Kepler limit, series order, fixed points.
const C7_KEPLER: f64 = 1e-11;
const C7_RATIO: (f64, f64) = (12.0, 20.0);
const C7_FIXED: f64 = 0.10;

fn averaging() -> Outcome {
    let mut kepler = 0.0f64;
    for &(lam, th, g0, a) in &[(1.0, 0.0, 0.5, 1.0), (1.2, 0.3, 0.4, 1.44), (0.9, 0.5, 0.8, 2.0)] {
        let v = u_avg(&SecularPoint::new(0.0, lam, th, g0), a).map_err(|e| e.to_string())?.value;
        kepler = kepler.max((v + 1.0 / a).abs());
    }
    let resid = |ratio: f64| -> Result<f64, String> {
        let pt = SecularPoint::new(ratio, 1.0, 0.2, 0.5);
        let u = u_avg(&pt, 1.0).map_err(|e| e.to_string())?.value;
        Ok((u - u_avg_series(&pt, 1.0).map_err(|e| e.to_string())?).abs())
    };
    let shrink = resid(0.1)? / resid(0.05)?;
    let target = 5f64.sqrt() * 0.2;
    let mut devs = Vec::new();
    for &ratio in &[0.1, 0.05, 0.025] {
        let roots = u_fixed_points(ratio, 1.0, 0.2, 1.0).map_err(|e| e.to_string())?;
        let dev = roots.iter().map(|g0| rel(g0.sqrt(), target)).fold(f64::INFINITY, f64::min);
        devs.push(dev);
    }
    check(
        kepler < C7_KEPLER && (C7_RATIO.0..=C7_RATIO.1).contains(&shrink) && devs[1] < C7_FIXED && devs[0] > devs[1] && devs[1] > devs[2],
        format!(
            "r'=0 error {kepler:.2e} (< {C7_KEPLER:e}); series residual ratio {shrink:.2} (in [{}, {}]); fixed point deviation from sqrt(5)Theta {:.3}/{:.3}/{:.3} at r'/a = 0.1/0.05/0.025 (< {C7_FIXED} at 0.05, decreasing)",
            C7_RATIO.0, C7_RATIO.1, devs[0], devs[1], devs[2]
        ),
    )
}

// 8. The averaged potential depends on (G, g) only through G0.
const C8_VARIATION: f64 = 1e-8;

fn lemma() -> Outcome {
    let (rp, lam, m) = (0.3, 1.0, 1.0);
    let mut worst = 0.0f64;
    for &(th, g0) in &[(0.2, 0.6), (0.0, 0.5), (0.35, 0.3)] {
        let mut vals = Vec::new();
        let mut k = 0;
        while vals.len() < 20 && k < 200 {
            let g = 0.05 + 0.31 * k as f64;
            k += 1;
            let f = |gn: f64| Ok(g0_from_parts(rp, lam, th, gn, g, m)? - g0);
            let lo = th.abs().max(0.02) + 1e-9;
            let Ok(root) = brent(f, lo, lam - 1e-9, 1e-15, 200) else { continue };
            vals.push(u_bar_direct(rp, lam, th, root.x, g, m).map_err(|e| e.to_string())?);
        }
        if vals.len() < 20 {
            return Err(format!("only {} representatives found on G0 = {g0}", vals.len()));
        }
        let hi = vals.iter().copied().fold(f64::MIN, f64::max);
        let lo = vals.iter().copied().fold(f64::MAX, f64::min);
        worst = worst.max(hi - lo);
    }
    check(worst < C8_VARIATION, format!("max variation over 20 (G,g) per level, 3 levels: {worst:.2e} (< {C8_VARIATION:e})"))
}

// 9. First-order secular flow against direct integration.
const C9_REL: f64 = 0.05;

fn secular_vs_direct() -> Outcome {
    let cfg = ComparisonSetup {
        m: 1.0,
        eps: 1e-3,
        a: 1.0,
        rprime: 0.3,
        g_norm: 0.8,
        g: FRAC_PI_2,
        ell: 0.0,
        t_end: 200.0,
        tol: 1e-11,
        samples_per_orbit: 64,
    };
    let c = compare_with_direct(&cfg).map_err(|e| e.to_string())?;
    check(
        c.rel_err_g_final < C9_REL && c.rel_err_delta_g < C9_REL,
        format!(
            "g(T) rel err {:.2e}, secular drift {:.4e} vs direct {:.4e} (rel err {:.2e}) (< {C9_REL})",
            c.rel_err_g_final, c.delta_g_secular, c.delta_g_direct, c.rel_err_delta_g
        ),
    )
}

// 10. SEA: invariance of the planar set and the additive split.
const C10_THETA: f64 = 1e-8;
const C10_SPLIT: f64 = 1e-12;

fn sea_invariance() -> Outcome {
    let (eps, mu) = (1e-3, 1e-4);
    let p = MassParams::sea(eps, mu).map_err(|e| e.to_string())?;
    let axis = Vec3::new(0.3, -0.5, 0.8).normalize();
    let rot = |v: Vec3| rotate_about(&axis, &v, 0.7);
    // Earth circular and counter-rotating with respect to the asteroid
    let speed = p.m_prime().sqrt() / p.rho;
    let s0 = CartesianState::new(rot(Vec3::new(-0.85 * p.m, 0.1, 0.0)), rot(Vec3::new(0.2, 1.4, 0.0)), rot(Vec3::new(1.0, 0.0, 0.0)))
        .with_yprime(rot(Vec3::new(0.0, -speed, 0.0)));
    let chart = cartesian_to_delaunay(&s0, &p).map_err(|e| e.to_string())?.elements;
    let on_plane = chart.theta.abs() < 1e-12 && (chart.vartheta.min(TAU - chart.vartheta)) < 1e-9;
    let tr = integrate(&s0, &Model::Sea(p), (0.0, 50.0), 1e-11, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    if tr.is_collision() {
        return Err("SEA run hit the collision guard".into());
    }
    let (mut theta, mut split) = (0.0f64, 0.0f64);
    for s in &tr.samples {
        let st = &s.state;
        theta = theta.max((st.angular_momentum().dot(&st.xprime) / st.xprime.norm()).abs());
        let sp = eval_sea(st, &p).map_err(|e| e.to_string())?;
        let scale = sp.total.abs().max(1.0);
        split = split.max((sp.h0 + sp.rho_h1 + sp.rho2_f - sp.total).abs() / scale);
        split = split.max((sp.total - sea_direct(st, eps, mu)).abs() / scale);
    }
    let turned = tr.last().state.xprime.angle(&s0.xprime);
    check(
        on_plane && theta < C10_THETA && split < C10_SPLIT && turned > 1.0,
        format!("start (Theta, vartheta) = ({:.1e}, {:.1e}); max |Theta| {theta:.2e} (< {C10_THETA:e}); split re-sum {split:.2e} (< {C10_SPLIT:e}); Earth turned {turned:.2} rad", chart.theta, chart.vartheta),
    )
}

// 11. Collision classification against a distance oracle.
const C11_HIT: f64 = 1e-7;

fn min_distance(d: &DelaunayElements, p: &MassParams) -> Result<f64, String> {
    let dist = |ell: f64| -> f64 {
        let q = delaunay_to_cartesian(&DelaunayElements { ell, ..*d }, p).expect("regular elements");
        (q.x - q.xprime).norm()
    };
    let n = 4096;
    let h = TAU / n as f64;
    let samples: Vec<f64> = (0..n).map(|i| dist(i as f64 * h)).collect();
    let best = h * (0..n).min_by(|&i, &j| samples[i].total_cmp(&samples[j])).expect("non-empty") as f64;
    // golden-section refinement around the best sample
    let (mut lo, mut hi) = (best - h, best + h);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (x1, x2) = (hi - gr * (hi - lo), lo + gr * (hi - lo));
        if dist(x1) < dist(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    Ok(dist(0.5 * (lo + hi)))
}

fn collision_equivalence() -> Outcome {
    use rand::Rng;
    let p = MassParams::two_centre(1.0, 0.0).map_err(|e| e.to_string())?;
    let mut r = rng(11);
    let (mut agree, mut on_s) = (0, 0);
    for k in 0..100 {
        let lam = r.random_range(0.8..1.2);
        let a = lam * lam;
        let e = r.random_range(0.05..0.9);
        let g_norm = lam * (1.0f64 - e * e).sqrt();
        let mut d = DelaunayElements::planar(lam, g_norm, 0.0, r.random_range(0.0..TAU), 0.0);
        if k % 2 == 0 {
            // ellipse aimed through the second centre
            d.rprime = a * (1.0 - e) + r.random_range(0.0..1.0) * 2.0 * a * e;
            let c = conic_crossing(&d, 1.0).map_err(|e| e.to_string())?.ok_or("no crossing for an in-range r'")?;
            d.g = if r.random_bool(0.5) { PI - c.theta } else { PI + c.theta };
        } else {
            d.rprime = r.random_range(0.2..2.5) * a;
        }
        let risk = risk_classify(&d, 1.0, 0.0).map_err(|e| e.to_string())?;
        let hit = min_distance(&d, &p)? < C11_HIT * a;
        on_s += hit as usize;
        agree += ((risk.classification == RiskClass::AtRisk) == hit) as usize;
    }
    check(agree == 100 && on_s >= 40, format!("{agree}/100 agree with the distance oracle ({on_s} in S, hit threshold {C11_HIT:e} a)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("conservation", conservation),
        ("commutation", commutation),
        ("chart consistency", charts),
        ("elliptic separation", separation),
        ("portrait exactness", portrait),
        ("homoclinic", homoclinic_orbit),
        ("averaging", averaging),
        ("level-set averaging", lemma),
        ("secular vs direct", secular_vs_direct),
        ("SEA invariance", sea_invariance),
        ("collision equivalence", collision_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({secs:.2}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
