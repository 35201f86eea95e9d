//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotsurf::bicomplex::{group_axiom_check, GroupGrid};
use rotsurf::commands::{cmd_group_check, GroupCheckConfig};
use rotsurf::numeric::{gaussian_curvature_numeric, gram_schmidt_frame, LAPLACIAN_STEP};
use rotsurf::surface::rotate;
use rotsurf::{
    laplacian_numeric, numeric_jets, parse_bicomplex, parse_expr, parse_interval,
    parse_profile_spec, second_kind_fit, Bicomplex, Error, FnImmersion, GaussSampleSet, Interval,
    Kind, LaplacianSource, Params, RotationSurface, Thresholds,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval { lo, hi }
}

fn surface(spec: &str) -> RotationSurface {
    RotationSurface::new(parse_profile_spec(spec).expect(spec)).expect(spec)
}

/// `n` uniform points with `s` kept `margin` inside the range.
fn random_points(surf: &RotationSurface, n: usize, margin: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let r = surf.s_range();
    (0..n)
        .map(|_| {
            (
                rng.gen_range(r.lo + margin..r.hi - margin),
                rng.gen_range(0.0..2.0 * std::f64::consts::PI),
            )
        })
        .collect()
}

fn flat_fit(spec: &str, n: usize, f_expected: f64) -> Outcome {
    let surf = surface(spec);
    let set = GaussSampleSet::from_grid(&surf, n, n, LaplacianSource::default()).map_err(|e| e.to_string())?;
    let fit = second_kind_fit(&set, &Thresholds::default()).map_err(|e| e.to_string())?;
    let f_dev = fit
        .f_samples
        .iter()
        .map(|f| (f - f_expected).abs())
        .fold(0.0, f64::max);
    let c = fit.c.norm();
    ensure(fit.kind == Kind::First, || format!("kind = {:?}", fit.kind))?;
    ensure(f_dev <= 1e-4, || format!("max |f - {f_expected}| = {f_dev:e}"))?;
    ensure(c <= 1e-5, || format!("|C| = {c:e}"))?;
    Ok(format!("kind=first, max|f-{f_expected}|={f_dev:.2e}, |C|={c:.2e}, {} samples", set.len()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let detail = flat_fit("family:circle(lambda=1,b0=1,d=0)", 32, 4.0)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("{detail}, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    flat_fit("family:circle(lambda=2,b0=0.5,d=0)", 16, 1.0)
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = [
        "family:circle(lambda=2,b0=0.5,d=0.3)",
        "family:logspiral(mu=0.5)",
        "family:logspiral(mu=1)",
        "family:logspiral(mu=2)",
        "family:line(p=1,q=0.5,u=0.6,v=0.8)",
    ];
    let mut worst_err: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for spec in specs {
        let surf = surface(spec);
        let pts = random_points(&surf, 50, 0.01, &mut rng);
        let max_err = |h: f64| -> Result<f64, String> {
            let mut m: f64 = 0.0;
            for &(s, t) in &pts {
                let num = laplacian_numeric(&surf, s, t, h).map_err(|e| e.to_string())?;
                let closed = surf.laplacian_gauss_closed_fixed(s, t).map_err(|e| e.to_string())?;
                m = m.max((num - closed).norm());
            }
            Ok(m)
        };
        let e1 = max_err(LAPLACIAN_STEP)?;
        let e2 = max_err(LAPLACIAN_STEP / 2.0)?;
        let ratio = e1 / e2;
        ensure(e1 <= 1e-4, || format!("{spec}: max error {e1:e}"))?;
        ensure(ratio >= 3.0, || format!("{spec}: halving ratio {ratio:.3}"))?;
        worst_err = worst_err.max(e1);
        worst_ratio = worst_ratio.min(ratio);
    }
    Ok(format!("max error {worst_err:.2e} at h=1e-3, min halving ratio {worst_ratio:.2}"))
}

fn criterion_4() -> Outcome {
    let mu = 1.0;
    let surf = surface("family:logspiral(mu=1,s0=1)");
    let mut worst: f64 = 0.0;
    for s in surf.s_range().linspace(50) {
        let inv = surf.invariants(s).map_err(|e| e.to_string())?;
        let a = inv.a;
        ensure((inv.b - mu * a).abs() <= 1e-12 && (inv.c - mu * a).abs() <= 1e-12, || {
            format!("b, c != mu a at s={s}")
        })?;
        let expected = [4.0 * mu * mu * a * a, 2.0 * mu * a * a, 0.0, 0.0, -2.0 * mu * a * a, 0.0];
        let got = surf.laplacian_gauss_closed(s).map_err(|e| e.to_string())?;
        for (g, e) in got.0.iter().zip(expected) {
            worst = worst.max((g - e).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("coefficient deviation {worst:e}"))?;
    let set = GaussSampleSet::from_grid(&surf, 12, 12, LaplacianSource::default()).map_err(|e| e.to_string())?;
    let fit = second_kind_fit(&set, &Thresholds::default()).map_err(|e| e.to_string())?;
    ensure(fit.kind == Kind::None, || format!("kind = {:?}", fit.kind))?;
    Ok(format!("coefficient deviation {worst:.2e}, kind=none (residual {:.2e})", fit.residual))
}

fn criterion_5() -> Outcome {
    let specs = [
        "family:circle(lambda=1)",
        "family:circle(lambda=0.5,b0=2,d=1)",
        "family:logspiral(mu=0.5)",
        "family:logspiral(mu=1)",
        "family:logspiral(mu=2,s0=0.3)",
        "family:line(p=1,q=0,u=0,v=1)",
        "family:line(p=0.2,q=1,u=0.6,v=-0.8)",
    ];
    let mut worst: f64 = 0.0;
    for spec in specs {
        let surf = surface(spec);
        for s in surf.s_range().linspace(200) {
            let (g, c) = surf.gauss_codazzi_residual(s).map_err(|e| e.to_string())?;
            worst = worst.max(g).max(c);
        }
    }
    ensure(worst <= 1e-8, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e} over {} families x 200 samples", specs.len()))
}

fn criterion_6() -> Outcome {
    let mut k_closed: f64 = 0.0;
    let mut k_numeric: f64 = 0.0;
    for spec in [
        "family:circle(lambda=1,b0=1,d=0)",
        "family:circle(lambda=2,b0=0.5,d=0.4)",
        "family:logspiral(mu=0.5)",
        "family:logspiral(mu=1)",
        "family:logspiral(mu=2)",
    ] {
        let surf = surface(spec);
        let r = surf.s_range();
        let s_nodes = iv(r.lo + 0.01, r.hi - 0.01).linspace(16);
        for &s in &s_nodes {
            k_closed = k_closed.max(surf.gaussian_curvature(s).map_err(|e| e.to_string())?.abs());
            for t in iv(0.0, 6.0).linspace(8) {
                let j = numeric_jets(&surf, s, t, 1e-4).map_err(|e| e.to_string())?;
                let frame = gram_schmidt_frame(&j).map_err(|e| e.to_string())?;
                let k = gaussian_curvature_numeric(&j, &frame).map_err(|e| e.to_string())?;
                k_numeric = k_numeric.max(k.abs());
            }
        }
    }
    ensure(k_closed <= 1e-10, || format!("closed |K| = {k_closed:e}"))?;
    ensure(k_numeric <= 1e-6, || format!("numeric |K| = {k_numeric:e}"))?;

    let raw = FnImmersion::new(|s: f64, t: f64| {
        let e = (0.3 * s).exp();
        rotate(e * s.cos(), e * s.sin(), t)
    });
    let mut k_raw: f64 = 0.0;
    for s in iv(-1.0, 1.0).linspace(21) {
        for t in iv(0.0, 6.0).linspace(5) {
            let j = numeric_jets(&raw, s, t, 1e-4).map_err(|e| e.to_string())?;
            let frame = gram_schmidt_frame(&j).map_err(|e| e.to_string())?;
            k_raw = k_raw.max(gaussian_curvature_numeric(&j, &frame).map_err(|e| e.to_string())?.abs());
        }
    }
    ensure(k_raw <= 1e-5, || format!("raw Vranceanu |K| = {k_raw:e}"))?;
    Ok(format!(
        "closed |K| {k_closed:.2e}, numeric |K| {k_numeric:.2e}, raw Vranceanu |K| {k_raw:.2e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gram: f64 = 0.0;
    let mut eq8: f64 = 0.0;
    for spec in [
        "family:circle(lambda=2,b0=0.5,d=0.3)",
        "family:logspiral(mu=1)",
        "family:line(p=1,q=0.5,u=0.6,v=0.8)",
    ] {
        let surf = surface(spec);
        for (s, t) in random_points(&surf, 40, 0.01, &mut rng) {
            gram = gram.max(surf.closed_frame(s, t).map_err(|e| e.to_string())?.gram_deviation());
            let closed = surf.frame_derivatives_closed(s, t).map_err(|e| e.to_string())?;
            let numeric = surf.frame_derivatives_numeric(s, t, 1e-5).map_err(|e| e.to_string())?;
            for k in 0..2 {
                for a in 0..4 {
                    eq8 = eq8.max((closed[k][a] - numeric[k][a]).max_abs());
                }
            }
        }
    }
    ensure(gram <= 1e-12, || format!("Gram deviation {gram:e}"))?;
    ensure(eq8 <= 1e-5, || format!("frame derivative deviation {eq8:e}"))?;
    Ok(format!("Gram deviation {gram:.2e}, 8 frame-derivative identities within {eq8:.2e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut draw = || Bicomplex::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
    let mut worst: f64 = 0.0;
    let max_abs = |v: [f64; 4]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for _ in 0..1000 {
        let (x, y, z) = (draw(), draw(), draw());
        let gxy = (x * y).to_matrix();
        let prod = x.to_matrix() * y.to_matrix();
        worst = worst.max((gxy - prod).amax());
        worst = worst.max(max_abs(((x * y) * z - x * (y * z)).to_array()));
        worst = worst.max(max_abs((x * y - y * x).to_array()));
    }
    ensure(worst <= 1e-12, || format!("componentwise error {worst:e}"))?;
    let one_ij = parse_bicomplex("1+1ij").map_err(|e| e.to_string())?;
    ensure(matches!(one_ij.inverse(), Err(Error::ZeroDivisor(_))), || {
        "1+ij was inverted".into()
    })?;
    Ok(format!("1000 triples, max error {worst:.2e}; 1+ij reported as zero divisor"))
}

fn criterion_9() -> Outcome {
    let run = |spec: &str| cmd_group_check(&GroupCheckConfig::new(spec)).map_err(|e| e.to_string());
    let cl = run("clifford")?.group;
    let worst = cl
        .closure_residual
        .max(cl.inverse_residual)
        .max(cl.identity_residual);
    ensure(cl.pass && worst <= 1e-12, || format!("clifford: pass={} residual {worst:e}", cl.pass))?;
    let circle = run("circle(lambda=2)")?.group;
    ensure(!circle.closure_pass && circle.closure_residual >= 1.0, || {
        format!("circle(lambda=2) closure residual {:e}", circle.closure_residual)
    })?;
    let vr = run("vranceanu(k=0.3)")?;
    ensure(vr.group.pass, || "vranceanu(k=0.3) failed the group check".into())?;

    let mut hq: f64 = 0.0;
    for spec in [
        "family:circle(lambda=2,b0=0.5,d=0.3)",
        "family:logspiral(mu=1)",
        "family:line(p=1,q=0.5,u=0.6,v=0.8)",
        "family:vranceanu(k=0.3)",
    ] {
        let profile = parse_profile_spec(spec).map_err(|e| e.to_string())?;
        for s in profile.domain().linspace(25) {
            let (x, y) = profile.point(s).map_err(|e| e.to_string())?;
            for t in iv(-3.0, 3.0).linspace(25) {
                hq = hq.max(Bicomplex::from(rotate(x, y, t)).hyperquadric_residual());
            }
        }
    }
    let grid = GroupGrid {
        s_nodes: iv(-1.0, 1.0).linspace(5),
        t_nodes: iv(-3.0, 3.0).linspace(5),
    };
    let direct = group_axiom_check(&|s: f64, t: f64| Ok(Bicomplex::from(rotate(s.cos(), s.sin(), t))), &grid);
    ensure(direct.pass, || "direct Clifford group check failed".into())?;
    ensure(hq <= 1e-12, || format!("hyperquadric residual {hq:e}"))?;
    Ok(format!(
        "clifford residual {worst:.2e}, circle(2) closure {:.2e}, vranceanu pass, x1x4-x2x3 <= {hq:.2e}",
        circle.closure_residual
    ))
}

/// Random expression text over `s`, depth-limited.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "s".into(),
            1 => format!("{:.3}", rng.gen_range(0.1..3.0)),
            _ => format!("{:.2}*s", rng.gen_range(-2.0..2.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("sin({a})"),
        1 => format!("cos({a})"),
        2 => format!("exp({a}/4)"),
        3 => format!("ln(2+sin({a}))"),
        4 => format!("sqrt(1+({a})^2)"),
        5 => format!("-({a})"),
        6 => format!("({a})^{}", rng.gen_range(2..4)),
        op => {
            let b = random_expr(rng, depth - 1);
            match op {
                7 => format!("({a})+({b})"),
                8 => format!("({a})-({b})"),
                9 => format!("({a})*({b})"),
                _ => format!("({a})/(1.5+cos({b}))"),
            }
        }
    }
}

/// Fourth-order central difference of `f` at `s`, with the step chosen where
/// successive halvings agree best (rapidly oscillating expressions need
/// steps well below 1e-3).
fn central_diff(f: impl Fn(f64) -> f64, s: f64) -> f64 {
    let d = |h: f64| (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h);
    let est: Vec<f64> = (0..14).map(|k| d(1e-2 / 2f64.powi(k))).collect();
    let best = (0..est.len() - 1)
        .filter(|&k| est[k].is_finite() && est[k + 1].is_finite())
        .min_by(|&a, &b| {
            let da = (est[a] - est[a + 1]).abs();
            let db = (est[b] - est[b + 1]).abs();
            da.total_cmp(&db)
        });
    best.map_or(f64::NAN, |k| est[k + 1])
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let params = Params::new();
    let mut worst: f64 = 0.0;
    let mut tried = 0;
    let mut checked = 0;
    while checked < 100 {
        tried += 1;
        ensure(tried < 10_000, || "could not generate 100 expressions".into())?;
        let text = random_expr(&mut rng, 4);
        let expr = parse_expr(&text).map_err(|e| format!("`{text}` failed to parse: {e}"))?;
        let s0 = rng.gen_range(-1.0..1.0);
        let Ok(jet) = expr.eval_jet(s0, &params) else { continue };
        let channel = |k: usize| {
            let expr = &expr;
            let params = &params;
            move |s: f64| expr.eval_jet(s, params).map(|j| j.as_array()[k]).unwrap_or(f64::NAN)
        };
        let got = jet.as_array();
        for (k, &d) in got.iter().enumerate().skip(1) {
            let fd = central_diff(channel(k - 1), s0);
            ensure(fd.is_finite(), || format!("`{text}` not finite near s={s0}"))?;
            let rel = (fd - d).abs() / d.abs().max(1.0);
            ensure(rel <= 1e-6, || {
                format!("`{text}` d{k} at s={s0}: jet {d} vs fd {fd} (rel {rel:e})")
            })?;
            worst = worst.max(rel);
        }
        checked += 1;
    }

    let malformed = [
        "", "(", ")", "s+", "*s", "sin(", "sin s", "1..2", "s^^2", "foo(s)", "s)", "2 3",
        "sin()", "ln(s", "1e", "@", "s+-", "((s)", "\u{0}", "NaN(s)",
    ];
    let profiles = [
        "", "family:", "family:circle(", "family:circle(lambda=)", "family:nope(a=1)",
        "expr:x=s", "expr:x=s;y=s", "expr:x=s;y=s;s=1", "expr:x=s;y=(;s=0:1", "family:line(u=2,v=0)",
        "family:circle(lambda=0)", "family:circle(lambda=1,,)", "family:vranceanu(k=1,k=2)",
    ];
    let literals = ["", "1+", "i+i+", "1ij2", "--1", "1+2k", "ij+", "1e+"];
    let intervals = ["", "1", "1:", ":1", "2:1", "a:b", "0:nan"];
    let mut structured = 0;
    let outcome = catch_unwind(|| {
        let mut n = 0;
        for m in malformed {
            n += parse_expr(m).is_err() as usize;
        }
        for p in profiles {
            n += parse_profile_spec(p).is_err() as usize;
        }
        for l in literals {
            n += parse_bicomplex(l).is_err() as usize;
        }
        for i in intervals {
            n += parse_interval(i).is_err() as usize;
        }
        let mut fuzz = ChaCha8Rng::seed_from_u64(1010);
        let alphabet: Vec<char> = "s0123456789.+-*/^()ijk:;=,e pilnxyfamycrc\u{e9}".chars().collect();
        for _ in 0..5000 {
            let len = fuzz.gen_range(0..24);
            let text: String = (0..len).map(|_| alphabet[fuzz.gen_range(0..alphabet.len())]).collect();
            let _ = parse_expr(&text).map(|e| e.eval_jet(0.3, &Params::new()));
            let _ = parse_profile_spec(&format!("expr:{text}"));
            let _ = parse_profile_spec(&format!("family:{text}"));
            let _ = parse_bicomplex(&text);
            let _ = parse_interval(&text);
        }
        n
    });
    match outcome {
        Ok(n) => structured += n,
        Err(_) => return Err("a parser panicked".into()),
    }
    let total = malformed.len() + profiles.len() + literals.len() + intervals.len();
    ensure(structured == total, || format!("{structured}/{total} malformed inputs rejected"))?;
    Ok(format!(
        "100 expressions ({tried} drawn), max relative jet error {worst:.2e}; {total} malformed inputs rejected, 5000 fuzz strings without panic"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Clifford torus constants", criterion_1),
        ("scaling law f = 4 b0^2", criterion_2),
        ("Laplacian oracle equivalence", criterion_3),
        ("log-spiral coefficients", criterion_4),
        ("Gauss-Codazzi identities", criterion_5),
        ("flatness", criterion_6),
        ("frame and frame-derivative identities", criterion_7),
        ("bicomplex isomorphism", criterion_8),
        ("group structure", criterion_9),
        ("parser and jets", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
