//! The seeded identity and inequality suite: every §-level entropic identity,
//! distance inequality and reconstruction lemma as a testable predicate over
//! random desk-scale states. Exits loudly on the first violation.

use crate::channel::{apply, ChannelSpec};
use crate::error::Result;
use crate::info::distance::{fidelity, reconstruct_extension, trace_distance, uhlmann_fidelity};
use crate::info::entropy::{
    check_trip_identity, coherent, cond_mutual, fannes_bound, h, mutual,
};
use crate::info::opdist::{op_distance, op_distance_on_input, OpDistanceMode, OpDistanceOptions};
use crate::layout::SystemLayout;
use crate::linalg::{CMatrix, C64};
use crate::random::{random_close_pair, random_isometry, random_mixed_state, random_pure_state};
use crate::state::StateSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: &str, worst: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            worst,
            tolerance,
            passed: worst <= tolerance,
        });
    }
}

fn random_channel(din: usize, denv: usize, rng: &mut impl Rng) -> Result<ChannelSpec> {
    let v = random_isometry(din * denv, din, rng);
    let mut kraus = Vec::with_capacity(denv);
    for e in 0..denv {
        let mut k = CMatrix::zeros(din, din);
        for i in 0..din {
            for j in 0..din {
                k[(i, j)] = v[(i * denv + e, j)];
            }
        }
        kraus.push(k);
    }
    ChannelSpec::new_cptp(
        SystemLayout::single("IN", din)?,
        SystemLayout::single("OUT", din)?,
        kraus,
    )
}

/// Run the whole suite with `samples` states per check family.
pub fn run_identity_suite(samples: usize, seed: u64, tol_scale: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut suite = Suite { checks: Vec::new() };
    let tol = |t: f64| t * tol_scale;

    // ---- entropy identities on random tripartite states ----------------
    let mut trip_worst = 0.0f64;
    let mut cmi_worst = 0.0f64;
    for i in 0..samples {
        let dims: Vec<(&str, usize)> = if i % 2 == 0 {
            vec![("X", 2), ("A", 2), ("B", 2)]
        } else {
            vec![("X", 2), ("A", 3), ("B", 2)]
        };
        let layout = SystemLayout::new(dims)?;
        let s = random_mixed_state(layout, &mut rng)?;
        trip_worst = trip_worst.max(check_trip_identity(&s, &["X"], &["A"], &["B"])?);
        let cmi = cond_mutual(&s, &["A"], &["B"], &["X"])?;
        cmi_worst = cmi_worst.max(-cmi);
    }
    suite.record("chain-rule identity residual", trip_worst, tol(1e-9));
    suite.record("strong subadditivity (CMI ≥ 0)", cmi_worst, tol(1e-9));

    // classical-quantum ensembles: identity holds there too
    let mut cq_worst = 0.0f64;
    for _ in 0..samples.min(50) {
        let layout = SystemLayout::new(vec![("A", 2), ("B", 2)])?;
        let p: f64 = rng.gen_range(0.1..0.9);
        let s0 = random_mixed_state(layout.clone(), &mut rng)?;
        let s1 = random_mixed_state(layout, &mut rng)?;
        let d = 4;
        let mut m = CMatrix::zeros(2 * d, 2 * d);
        for (x, (w, sx)) in [(p, &s0), (1.0 - p, &s1)].iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    m[(x * d + i, x * d + j)] = sx.matrix()[(i, j)] * C64::new(*w, 0.0);
                }
            }
        }
        let cq = StateSpec::new_unchecked(
            SystemLayout::new(vec![("X", 2), ("A", 2), ("B", 2)])?,
            m,
        );
        cq_worst = cq_worst.max(check_trip_identity(&cq, &["X"], &["A"], &["B"])?);
    }
    suite.record("chain-rule identity on cq ensembles", cq_worst, tol(1e-9));

    // ---- pure-state dualities -------------------------------------------
    let mut dual_worst = 0.0f64;
    for _ in 0..samples {
        let layout = SystemLayout::new(vec![("A", 2), ("B", 2), ("E", 2)])?;
        let psi = random_pure_state(layout, &mut rng)?;
        let iab = mutual(&psi, &["A"], &["B"])?;
        let iae = mutual(&psi, &["A"], &["E"])?;
        let ha = h(&psi, &["A"])?;
        let icoh = coherent(&psi, &["A"], &["B"])?;
        dual_worst = dual_worst.max((0.5 * iab + 0.5 * iae - ha).abs());
        dual_worst = dual_worst.max((0.5 * iab - 0.5 * iae - icoh).abs());
    }
    suite.record("pure-state dualities", dual_worst, tol(1e-9));

    // ---- Fuchs–van de Graaf ----------------------------------------------
    let mut fvg_worst = 0.0f64;
    let mut fvg_pure_worst = 0.0f64;
    for i in 0..samples {
        let layout = SystemLayout::new(vec![("A", 2), ("B", 2)])?;
        let (a, b) = if i % 3 == 0 {
            (
                random_pure_state(layout.clone(), &mut rng)?,
                random_pure_state(layout, &mut rng)?,
            )
        } else {
            (
                random_mixed_state(layout.clone(), &mut rng)?,
                random_mixed_state(layout, &mut rng)?,
            )
        };
        let t_half = 0.5 * trace_distance(&a, &b)?;
        let f = fidelity(&a, &b)?;
        fvg_worst = fvg_worst.max((1.0 - f.sqrt()) - t_half);
        fvg_worst = fvg_worst.max(t_half - (1.0 - f).max(0.0).sqrt());
        if i % 3 == 0 {
            fvg_pure_worst = fvg_pure_worst.max((t_half - (1.0 - f).max(0.0).sqrt()).abs());
        }
    }
    suite.record("Fuchs–van de Graaf sandwich", fvg_worst, tol(1e-9));
    suite.record(
        "Fuchs–van de Graaf equality on pure pairs",
        fvg_pure_worst,
        tol(1e-9),
    );

    // ---- Fannes-form continuity bound -------------------------------------
    let mut fannes_worst = 0.0f64;
    for _ in 0..samples.max(500) {
        let layout = SystemLayout::new(vec![("A", 2), ("B", 2)])?;
        let eps = rng.gen_range(1e-4..0.1);
        let (a, b) = random_close_pair(layout, eps, &mut rng)?;
        let t = trace_distance(&a, &b)?;
        let delta = (coherent(&a, &["A"], &["B"])? - coherent(&b, &["A"], &["B"])?).abs();
        let bound = fannes_bound(4, t.max(1e-12))?;
        fannes_worst = fannes_worst.max(delta - bound);
    }
    suite.record("continuity bound never violated", fannes_worst, 0.0);

    // ---- monotonicity of trace distance under channels --------------------
    let mut mono_worst = 0.0f64;
    for i in 0..samples.min(100) {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let layout = SystemLayout::single("IN", d)?;
        let a = random_mixed_state(layout.clone(), &mut rng)?;
        let b = random_mixed_state(layout, &mut rng)?;
        let c = random_channel(d, 2, &mut rng)?;
        let before = trace_distance(&a, &b)?;
        let after = trace_distance(&apply(&c, &a, &["IN"])?, &apply(&c, &b, &["IN"])?)?;
        mono_worst = mono_worst.max(after - before);
    }
    suite.record("trace distance monotonicity", mono_worst, tol(1e-9));

    // ---- purification round trips -----------------------------------------
    let mut purify_worst = 0.0f64;
    let mut spectra_worst = 0.0f64;
    for i in 0..samples.min(100) {
        let dims = match i % 3 {
            0 => vec![("A", 2)],
            1 => vec![("A", 2), ("B", 2)],
            _ => vec![("A", 2), ("B", 4)],
        };
        let layout = SystemLayout::new(dims)?;
        let s = random_mixed_state(layout, &mut rng)?;
        let p = s.purify("REF")?;
        let keep: Vec<&str> = s.layout().labels().iter().map(|l| l.as_str()).collect();
        let back = p.partial_trace(&keep)?;
        purify_worst = purify_worst.max(trace_distance(&back, &s)?);
        // two purifications differ by a reference isometry: the reference
        // restriction's spectrum equals the state's spectrum either way
        let u = crate::random::random_unitary(p.layout().dim_of("REF")?, &mut rng);
        let rot = ChannelSpec::new_cptp(
            SystemLayout::single("REF", u.rows())?,
            SystemLayout::single("REF2", u.rows())?,
            vec![u],
        )?;
        let p2 = apply(&rot, &p, &["REF"])?;
        let s_spec = s.eigenvalues()?;
        for (purification, reflabel) in [(&p, "REF"), (&p2, "REF2")] {
            let rspec = purification.partial_trace(&[reflabel])?.eigenvalues()?;
            for (x, y) in s_spec.iter().zip(&rspec) {
                spectra_worst = spectra_worst.max((x - y).abs());
            }
        }
    }
    suite.record("purification restriction round trip", purify_worst, tol(1e-9));
    suite.record("purification Schmidt spectra", spectra_worst, tol(1e-9));

    // ---- stinespring consistency on a matrix-unit basis --------------------
    let mut stine_worst = 0.0f64;
    for _ in 0..samples.min(40) {
        let c = random_channel(2, 3, &mut rng)?;
        let v = c.stinespring("E")?;
        let ne = c.kraus().len();
        for j in 0..2 {
            for k in 0..2 {
                let mut direct = CMatrix::zeros(2, 2);
                for n in c.kraus() {
                    direct = direct.add(&CMatrix::outer(&n.column(j), &n.column(k)));
                }
                let big = CMatrix::outer(&v.matrix().column(j), &v.matrix().column(k));
                let mut reduced = CMatrix::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for e in 0..ne {
                            acc += big[(a * ne + e, b * ne + e)];
                        }
                        reduced[(a, b)] = acc;
                    }
                }
                stine_worst = stine_worst.max(reduced.sub(&direct).max_abs());
            }
        }
    }
    suite.record("isometric dilation consistency", stine_worst, tol(1e-9));

    // ---- Uhlmann alignment -------------------------------------------------
    let mut uhl_worst = 0.0f64;
    for i in 0..samples.min(40) {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let layout = SystemLayout::single("A", d)?;
        let a = random_mixed_state(layout.clone(), &mut rng)?;
        let b = random_mixed_state(layout, &mut rng)?;
        uhl_worst = uhl_worst.max((fidelity(&a, &b)? - uhlmann_fidelity(&a, &b)?).abs());
    }
    suite.record("Uhlmann maximum overlap", uhl_worst, tol(1e-6));

    // ---- nearby-extension reconstruction -----------------------------------
    let mut pomoc_worst = 0.0f64;
    for eps in [0.01, 0.1] {
        for _ in 0..samples.min(20) {
            let big = SystemLayout::new(vec![("A", 2), ("B", 2)])?;
            let sigma_ext = random_mixed_state(big, &mut rng)?;
            let sigma = sigma_ext.partial_trace(&["A"])?;
            let (rho, _) = {
                let layout = SystemLayout::single("A", 2)?;
                let noise = random_mixed_state(layout, &mut rng)?;
                let dist = trace_distance(&sigma, &noise)?;
                let t = if dist > 0.0 { (eps / dist).min(1.0) } else { 0.0 };
                let m = sigma
                    .matrix()
                    .scale(C64::new(1.0 - t, 0.0))
                    .add(&noise.matrix().scale(C64::new(t, 0.0)));
                (StateSpec::new_unchecked(sigma.layout().clone(), m), t)
            };
            let actual_eps = trace_distance(&rho, &sigma)?;
            let rho_ext = reconstruct_extension(&rho, &sigma_ext)?;
            let dist = trace_distance(&rho_ext, &sigma_ext)?;
            pomoc_worst = pomoc_worst.max(dist - 2.0 * actual_eps.max(1e-15).sqrt());
            // the restriction of the reconstruction must be ρ itself
            let restr = rho_ext.partial_trace(&["A"])?;
            pomoc_worst = pomoc_worst.max(trace_distance(&restr, &rho)? - 1e-9);
        }
    }
    suite.record("nearby-extension reconstruction", pomoc_worst, tol(1e-9));

    // ---- operation distance properties -------------------------------------
    let od_opts = OpDistanceOptions { restarts: 6, refine_iters: 40, seed: seed ^ 0x5a5a };
    let mut props_worst = 0.0f64;
    for _ in 0..samples.min(10) {
        let m1 = random_channel(2, 2, &mut rng)?;
        let n1 = random_channel(2, 2, &mut rng)?;
        let m2 = random_channel(2, 2, &mut rng)?;
        let n2 = random_channel(2, 2, &mut rng)?;
        let w1 = random_mixed_state(SystemLayout::single("IN", 2)?, &mut rng)?;
        let w2 = random_mixed_state(SystemLayout::single("IN", 2)?, &mut rng)?;
        // tensor subadditivity on canonical purifications
        let d1 = op_distance(&m1, &n1, &OpDistanceMode::Relative(w1.clone()), &od_opts)?;
        let d2 = op_distance(&m2, &n2, &OpDistanceMode::Relative(w2.clone()), &od_opts)?;
        let mm = tensor_channels(&m1, &m2)?;
        let nn = tensor_channels(&n1, &n2)?;
        let ww = w1
            .relabel(&[("IN", "IN1")])?
            .tensor(&w2.relabel(&[("IN", "IN2")])?)?;
        let dd = op_distance(&mm, &nn, &OpDistanceMode::Relative(ww), &od_opts)?;
        props_worst = props_worst.max(dd - d1 - d2);
        // composition subadditivity
        let a1 = random_channel(2, 2, &mut rng)?;
        let b1 = random_channel(2, 2, &mut rng)?;
        let a2 = random_channel(2, 2, &mut rng)?;
        let b2 = random_channel(2, 2, &mut rng)?;
        let omega = random_mixed_state(SystemLayout::single("IN", 2)?, &mut rng)?;
        let lhs = op_distance(
            &a1.compose(&a2)?,
            &b1.compose(&b2)?,
            &OpDistanceMode::Relative(omega.clone()),
            &od_opts,
        )?;
        let stage1 = op_distance(&a1, &b1, &OpDistanceMode::Relative(omega.clone()), &od_opts)?;
        let mid = apply(&a1, &omega, &["IN"])?.relabel(&[("OUT", "IN")])?;
        let stage2 = op_distance(&a2, &b2, &OpDistanceMode::Relative(mid), &od_opts)?;
        props_worst = props_worst.max(lhs - stage1 - stage2);
    }
    suite.record("operation distance subadditivity", props_worst, tol(1e-9));

    // restriction monotonicity: the distance relative to a full test state
    // never exceeds the distance relative to its restriction
    let mut restr_worst = 0.0f64;
    for _ in 0..samples.min(6) {
        let m = tensor_channels(&random_channel(2, 2, &mut rng)?, &random_channel(2, 2, &mut rng)?)?;
        let n = tensor_channels(&random_channel(2, 2, &mut rng)?, &random_channel(2, 2, &mut rng)?)?;
        let full = random_mixed_state(SystemLayout::new(vec![("IN1", 2), ("IN2", 2)])?, &mut rng)?;
        let part = full.partial_trace(&["IN1"])?;
        let d_full = op_distance(&m, &n, &OpDistanceMode::Relative(full), &od_opts)?;
        let d_part = op_distance(&m, &n, &OpDistanceMode::Relative(part), &od_opts)?;
        restr_worst = restr_worst.max(d_full - d_part);
    }
    suite.record("operation distance extension monotonicity", restr_worst, tol(1e-6));

    // ---- Helstrom consistency ----------------------------------------------
    let mut hel_worst = 0.0f64;
    for _ in 0..samples.min(5) {
        let layout = SystemLayout::single("A", 2)?;
        let a = random_mixed_state(layout.clone(), &mut rng)?;
        let b = random_mixed_state(layout, &mut rng)?;
        let bound = 0.5 + 0.25 * trace_distance(&a, &b)?;
        let mut best = 0.5f64;
        for _ in 0..10_000 {
            // random projective qubit measurement via a Bloch direction
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let (st, ct) = (theta.sin(), theta.cos());
            let proj = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => C64::new((1.0 + ct) / 2.0, 0.0),
                (1, 1) => C64::new((1.0 - ct) / 2.0, 0.0),
                (0, 1) => C64::from_polar(st / 2.0, -phi),
                (1, 0) => C64::from_polar(st / 2.0, phi),
                _ => unreachable!(),
            });
            let pa = proj.mul(a.matrix()).trace().re;
            let pb = proj.mul(b.matrix()).trace().re;
            let success = 0.5 * pa + 0.5 * (1.0 - pb);
            best = best.max(success.max(1.0 - success));
        }
        hel_worst = hel_worst.max(best - bound);
    }
    suite.record("Helstrom bound vs brute-force POVM", hel_worst, tol(1e-6));

    let passed = suite.checks.iter().all(|c| c.passed);
    Ok(SuiteReport { seed, samples, checks: suite.checks, passed })
}

fn tensor_channels(a: &ChannelSpec, b: &ChannelSpec) -> Result<ChannelSpec> {
    let mut kraus = Vec::with_capacity(a.kraus().len() * b.kraus().len());
    for ka in a.kraus() {
        for kb in b.kraus() {
            kraus.push(ka.kron(kb));
        }
    }
    ChannelSpec::new_cptp(
        SystemLayout::new(vec![("IN1", 2), ("IN2", 2)])?,
        SystemLayout::new(vec![("OUT1", 2), ("OUT2", 2)])?,
        kraus,
    )
}
