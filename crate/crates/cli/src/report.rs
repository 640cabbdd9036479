//! Report builders: a JSON value plus a plain-text table for each subcommand.

use edgeshift::genfun;
use edgeshift::langmodel::{oracle_table, Budget, ShiftSpec};
use edgeshift::measures::{self, Cylinder, MeasureError, MeasureRoute, ParryMeasure};
use edgeshift::ratfield::format_rational;
use edgeshift::scalar::rational_to_f64;
use edgeshift::specfile::SpecFile;
use edgeshift::spectral::{self, RootSource, SpectralOptions, SpectralReport};
use edgeshift::verify::{self, Status, VerifyOptions};
use edgeshift::{QRatFun, Rational};
use serde_json::{json, Map, Value};

use crate::exit::CliError;

pub struct Report {
    pub json: Value,
    pub table: String,
}

/// 15 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    json!(r)
}

fn float_text(x: f64) -> String {
    match float(x) {
        Value::Null => "nan".into(),
        v => v.to_string(),
    }
}

fn exact(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn ratfun(f: &QRatFun) -> Value {
    json!({ "num": f.num(), "den": f.den(), "text": ratfun_text(f) })
}

fn ratfun_text(f: &QRatFun) -> String {
    format!("({}) / ({})", f.num(), f.den())
}

fn envelope(command: &str, doc: &SpecFile, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("spec".into(), serde_json::to_value(doc).expect("spec serializes"));
    m.insert(command.into(), body);
    Value::Object(m)
}

fn words(spec: &ShiftSpec, ws: &[edgeshift::words::Word]) -> Vec<String> {
    ws.iter().map(|w| spec.render(w.symbols())).collect()
}

pub fn enumerate(doc: &SpecFile, spec: &ShiftSpec, max_n: usize, budget: &Budget) -> Result<Report, CliError> {
    let t = oracle_table(spec, max_n, budget)?;
    let rnames: Vec<String> = spec.repeated().iter().map(|(w, _)| spec.render(w.symbols())).collect();
    let fnames = words(spec, spec.forbidden());
    let rows: Vec<Value> = (0..=max_n)
        .map(|n| {
            json!({
                "n": n,
                "f": t.f[n].to_string(),
                "g": t.g.iter().map(|g| g[n].to_string()).collect::<Vec<_>>(),
                "fa": t.fa.iter().map(|a| a[n].to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut table = String::from("n\tf");
    for r in &rnames {
        table += &format!("\tg[{r}]");
    }
    for a in &fnames {
        table += &format!("\tf_a[{a}]");
    }
    table.push('\n');
    for n in 0..=max_n {
        table += &format!("{n}\t{}", t.f[n]);
        for g in &t.g {
            table += &format!("\t{}", g[n]);
        }
        for a in &t.fa {
            table += &format!("\t{}", a[n]);
        }
        table.push('\n');
    }
    let body = json!({ "repeated": rnames, "forbidden": fnames, "rows": rows });
    Ok(Report { json: envelope("enumerate", doc, body), table })
}

pub fn genfun(doc: &SpecFile, spec: &ShiftSpec, max_n: usize) -> Result<Report, CliError> {
    let sol = genfun::solve(spec)?;
    let series = sol.f.series_coeffs(max_n)?;
    let mode = match sol.mode {
        genfun::SystemMode::Reduced => "reduced",
        genfun::SystemMode::NonReduced => "general",
    };
    let body = json!({
        "mode": mode,
        "F": ratfun(&sol.f),
        "G": sol.g.iter().map(ratfun).collect::<Vec<_>>(),
        "Fa": sol.fa.iter().map(ratfun).collect::<Vec<_>>(),
        "R_of_z": sol.r_of_z.as_ref().map(ratfun),
        "series": series.iter().map(exact).collect::<Vec<_>>(),
    });
    let mut table = format!("mode\t{mode}\nF(z)\t{}\n", ratfun_text(&sol.f));
    for (j, g) in sol.g.iter().enumerate() {
        table += &format!("G[{j}](z)\t{}\n", ratfun_text(g));
    }
    for (i, a) in sol.fa.iter().enumerate() {
        table += &format!("Fa[{i}](z)\t{}\n", ratfun_text(a));
    }
    if let Some(r) = &sol.r_of_z {
        table += &format!("R(z)\t{}\n", ratfun_text(r));
    }
    let s: Vec<String> = series.iter().map(format_rational).collect();
    table += &format!("series\t{}\n", s.join(", "));
    Ok(Report { json: envelope("genfun", doc, body), table })
}

fn vector(v: &[Rational], exact_ok: bool) -> Value {
    json!({
        "float": v.iter().map(|x| float(rational_to_f64(x))).collect::<Vec<_>>(),
        "exact": if exact_ok { json!(v.iter().map(format_rational).collect::<Vec<_>>()) } else { Value::Null },
    })
}

pub fn perron(doc: &SpecFile, spec: &ShiftSpec, opts: &SpectralOptions) -> Result<Report, CliError> {
    let r = spectral::analyze(spec, opts)?;
    let labels = words(spec, &r.adjacency.labels);
    let c = &r.certificate;
    let exact_ok = c.exact.is_some();
    let vectors = r.vectors.as_ref().map(|v| json!({ "U": vector(&v.u, exact_ok), "V": vector(&v.v, exact_ok) }));
    let norm = r.normalization.as_ref().map(|n| {
        json!({
            "dot": float(n.dot),
            "formula": float(n.formula),
            "agree": n.agree,
            "exact": n.exact.as_ref().map(|(d, f)| json!([format_rational(d), format_rational(f)])),
        })
    });
    let witness = r.property_p.as_ref().map(|w| {
        json!({ "X": spec.render(w.x.symbols()), "Y": spec.render(w.y.symbols()), "Z": spec.render(w.z.symbols()), "W": spec.render(w.w.symbols()) })
    });
    let body = json!({
        "labels": labels,
        "A": r.adjacency.entries.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "irreducible": r.irreducible,
        "theta": {
            "float": float(r.theta),
            "exact": c.exact.as_ref().map(exact),
            "lo": exact(&c.lo),
            "hi": exact(&c.hi),
            "source": match r.source { RootSource::ReducedR => "z-q+R(z)", RootSource::SystemDenominator => "denominator of F(z)" },
            "power_iteration": float(r.theta_power),
            "route_gap": float(r.route_agreement),
        },
        "components": r.components.iter().map(|k| json!({ "labels": words(spec, &k.members), "theta": float(k.theta) })).collect::<Vec<_>>(),
        "vectors": vectors,
        "residuals": r.residuals.map(|(a, b)| json!({ "right": float(a), "left": float(b) })),
        "normalization": norm,
        "property_p": { "certified": r.property_p.is_some(), "witness": witness },
        "entropy": float(r.entropy),
    });
    Ok(Report { json: envelope("perron", doc, body), table: perron_table(spec, &r) })
}

fn perron_table(spec: &ShiftSpec, r: &SpectralReport) -> String {
    let mut t = format!("theta\t{}", float_text(r.theta));
    if let Some(e) = &r.certificate.exact {
        t += &format!("\t(exact {})", format_rational(e));
    }
    t += &format!("\nentropy\t{}\nirreducible\t{}\n", float_text(r.entropy), r.irreducible);
    t += "label\tA row";
    if r.vectors.is_some() {
        t += "\tU\tV";
    }
    t.push('\n');
    for (i, lab) in r.adjacency.labels.iter().enumerate() {
        let row: Vec<String> = r.adjacency.entries[i].iter().map(|x| x.to_string()).collect();
        t += &format!("{}\t{}", spec.render(lab.symbols()), row.join(" "));
        if let Some(v) = &r.vectors {
            t += &format!("\t{}\t{}", float_text(rational_to_f64(&v.u[i])), float_text(rational_to_f64(&v.v[i])));
        }
        t.push('\n');
    }
    if let Some(n) = &r.normalization {
        t += &format!("U^T V\t{}\tformula\t{}\n", float_text(n.dot), float_text(n.formula));
    }
    t += &format!("property (P)\t{}\n", if r.property_p.is_some() { "certified" } else { "unknown" });
    t
}

enum Pipeline {
    Exact(ParryMeasure<Rational>),
    Float(ParryMeasure<f64>),
}

pub fn measure(
    doc: &SpecFile,
    spec: &ShiftSpec,
    cylinder: &str,
    routes: &[MeasureRoute],
    assume_p: bool,
    opts: &SpectralOptions,
) -> Result<Report, CliError> {
    let rep = spectral::analyze(spec, opts)?;
    let c = Cylinder::parse(spec, &rep.adjacency, cylinder)?;
    let pipe = match ParryMeasure::<Rational>::from_report(spec, &rep) {
        Ok(mut m) => {
            m.assume_property_p = assume_p;
            Pipeline::Exact(m)
        }
        Err(MeasureError::Irrational) => {
            let mut m = ParryMeasure::<f64>::from_report(spec, &rep)?;
            m.assume_property_p = assume_p;
            Pipeline::Float(m)
        }
        Err(e) => return Err(e.into()),
    };
    let mut values = Vec::new();
    let mut table = format!("cylinder\t{}\nlifts\t{}\n", c.render(spec, &rep.adjacency), measures::preimage_count(&c, &rep.adjacency)?);
    let mut got = Vec::new();
    for &route in routes {
        let v = match &pipe {
            Pipeline::Exact(m) => m.cylinder(&c, route).map(|q| (rational_to_f64(&q), Some(q))),
            Pipeline::Float(m) => m.cylinder(&c, route).map(|x| (x, None)),
        };
        match v {
            Ok((x, q)) => {
                values.push(json!({ "route": route.name(), "float": float(x), "exact": q.as_ref().map(exact) }));
                table += &format!("{}\t{}", route.name(), float_text(x));
                if let Some(q) = &q {
                    table += &format!("\t{}", format_rational(q));
                }
                table.push('\n');
                got.push(x);
            }
            Err(MeasureError::PropertyPUnknown) if routes.len() > 1 => {
                let msg = MeasureError::PropertyPUnknown.to_string();
                values.push(json!({ "route": route.name(), "unavailable": msg }));
                table += &format!("{}\tunavailable: {msg}\n", route.name());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let gap = if got.is_empty() {
        0.0
    } else {
        got.iter().cloned().fold(f64::MIN, f64::max) - got.iter().cloned().fold(f64::MAX, f64::min)
    };
    table += &format!("route gap\t{}\n", float_text(gap));
    let body = json!({
        "cylinder": c.render(spec, &rep.adjacency),
        "edges": c.len(),
        "lifts": measures::preimage_count(&c, &rep.adjacency)?.to_string(),
        "exact_pipeline": matches!(pipe, Pipeline::Exact(_)),
        "property_p": rep.property_p.is_some(),
        "values": values,
        "route_gap": float(gap),
    });
    Ok(Report { json: envelope("measure", doc, body), table })
}

pub fn escape(doc: &SpecFile, spec: &ShiftSpec, word: &str, max_n: usize, budget: &Budget) -> Result<Report, CliError> {
    let a = spectral::build_adjacency(spec)?;
    let hole = Cylinder::parse(spec, &a, word)?;
    let r = measures::escape_rate(spec, &hole, max_n, budget)?;
    let body = json!({
        "hole": hole.render(spec, &a),
        "word": spec.render(r.word.symbols()),
        "multiplicity": r.multiplicity.to_string(),
        "h": r.h.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "tau": r.tau.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "lambda": float(r.lambda),
        "ln_lambda": float(r.lambda.ln()),
        "theta": float(r.theta),
        "rate": float(r.rate),
        "theta_w": float(r.theta_w),
        "ln_theta_w": float(r.theta_w.ln()),
        "identity": r.identity,
    });
    let mut table = format!("hole\t{}\nword\t{} (multiplicity {})\nn\th_W(n)\ttau_w(n)\n", hole.render(spec, &a), spec.render(r.word.symbols()), r.multiplicity);
    for n in 0..r.tau.len() {
        let h = r.h.get(n).map_or(String::from("-"), |x| x.to_string());
        table += &format!("{n}\t{h}\t{}\n", r.tau[n]);
    }
    table += &format!("lambda_W\t{}\ntheta\t{}\nrate\t{}\ntheta_w\t{}\n", float_text(r.lambda), float_text(r.theta), float_text(r.rate), float_text(r.theta_w));
    if let Some(ok) = r.identity {
        table += &format!("h_W(n-p+1) = tau_w(n)\t{ok}\n");
    }
    Ok(Report { json: envelope("escape", doc, body), table })
}

pub fn verify(doc: &SpecFile, spec: &ShiftSpec, opts: &VerifyOptions) -> Result<(Report, bool), CliError> {
    let rep = verify::verify(spec, doc.expected.as_ref(), opts)?;
    let status = |s: Status| match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "skipped",
    };
    let mut table = String::new();
    for c in &rep.checks {
        table += &format!("{}\t{}\t{}\n", c.name, status(c.status), c.detail);
    }
    let passed = rep.passed();
    table += &format!("overall\t{}\n", if passed { "pass" } else { "FAIL" });
    let body = json!({ "passed": passed, "checks": rep.checks });
    Ok((Report { json: envelope("verify", doc, body), table }, passed))
}
