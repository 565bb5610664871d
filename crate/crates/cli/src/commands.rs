use std::f64::consts::PI;
use std::fmt::Write as _;

use cascadix::cascade::{
    certify_classification, classify, enumerate_all, enumerate_contributions_with, CascadeType, CertificationReport,
    Completeness, Pruning,
};
use cascadix::fredholm::{
    index_morse_bott, morse_bott_breakdown, split_floer_index, vertical_problem, weighted_breakdown, Decoration, End,
    IndexBreakdown, PuncturedProblem, Weight,
};
use cascadix::grading::{coset_label, enumerate_generators, parse_generator, Generator};
use cascadix::morse::{complex_homology, differential, load_morse_file};
use cascadix::orientation::{fibre_sum_orientation, quotient_orientation, OrientedSpace};
use cascadix::pearl::{cascade_dimension, pearl_dimension, Dimension};
use cascadix::profile::{check_admissible, orbit_level, parse_profile};
use cascadix::setup::{format_rational, load_setup, SetupDescriptor};
use cascadix::spectrum::{
    cz_perturbed, discretize_spectrum, spectrum_window, AsymptoticOperator, PerturbationSide, SpectralPoint,
};
use cascadix::{Error, Rational};
use num_traits::ToPrimitive;

use crate::formats::{map_matrix, read_json, CascadeFile, DimFile, DimRequest, IndexFile, OrientFile};
use crate::table::{sig12, Format, Table};
use crate::CliError;

type Out = Result<String, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

fn load(path: &str) -> Result<SetupDescriptor, CliError> {
    load_setup(path).map_err(|e| Error::from(e).into())
}

fn class(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn q(r: &Rational) -> String {
    format_rational(r)
}

pub fn validate(path: &str) -> Out {
    let s = load(path)?;
    let mut out = String::from("monotone triple OK\n");
    let _ = writeln!(out, "name: {}", s.name.as_deref().unwrap_or("(unnamed)"));
    let _ = writeln!(out, "n: {}", s.n);
    let _ = writeln!(out, "tau_X: {}  K: {}  T0: {}", q(&s.tau_x), q(&s.k_const), q(&s.t0));
    let _ = writeln!(out, "tau_X - K: {}", q(&s.tau_sigma()));
    let _ = writeln!(out, "grading slope 2(tau_X - K)/K: {}", q(&s.grading_slope()));
    let _ = writeln!(
        out,
        "lattice ranks: Sigma {}, X {}",
        s.lattice_sigma.rank(),
        s.lattice_x.rank()
    );
    let chern = s
        .effective_min_chern_sigma()
        .map_or("infinite".to_string(), |m| m.to_string());
    let _ = writeln!(out, "minimal Chern number of Sigma: {chern}");
    let _ = writeln!(
        out,
        "critical points: {} on Sigma, {} on W",
        s.morse_sigma.len(),
        s.morse_w.len()
    );
    Ok(out)
}

fn generator_row(g: &Generator) -> Vec<String> {
    vec![
        g.name(),
        g.kind_label().into(),
        g.multiplicity().map_or(String::new(), |k| k.to_string()),
        g.morse_index().to_string(),
        q(&g.grading),
        q(&coset_label(&g.grading)),
    ]
}

fn generator_table(gens: &[Generator]) -> Table {
    let mut t = Table::new(["generator", "kind", "k", "index", "grading", "coset"]);
    for g in gens {
        t.push(generator_row(g));
    }
    t
}

pub fn grade(path: &str, k_max: u32, name: Option<&str>, f: Format) -> Out {
    let s = load(path)?;
    let gens = match name {
        Some(n) => vec![parse_generator(&s, n).map_err(Error::from)?],
        None => enumerate_generators(&s, k_max).map_err(Error::from)?,
    };
    Ok(generator_table(&gens).render(f))
}

fn parse_window(text: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("--window expects `min,max`, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("--window bound `{s}` is not a number")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn closed_form(op: AsymptoticOperator, p: &SpectralPoint) -> String {
    let k = p.fourier_mode;
    match op {
        AsymptoticOperator::ComplexLinear { .. } => {
            let k = (p.eigenvalue / (2.0 * PI)).round() as i64;
            match k {
                0 => "0".into(),
                1 => "2pi".into(),
                -1 => "-2pi".into(),
                _ => format!("{}pi", 2 * k),
            }
        }
        AsymptoticOperator::VerticalC { c } => {
            if c == 0.0 {
                let m = (p.eigenvalue / (2.0 * PI)).round() as i64;
                return match m {
                    0 => "0".into(),
                    1 => "2pi".into(),
                    -1 => "-2pi".into(),
                    _ => format!("{}pi", 2 * m),
                };
            }
            if k == 0 {
                return if p.eigenvalue == 0.0 { "0".into() } else { "-C".into() };
            }
            let pm = if p.eigenvalue < 0.0 { "-" } else { "+" };
            let kk = if k == 1 { String::new() } else { format!("{} ", k * k) };
            format!("(-C {pm} sqrt(C^2 + 16 {kk}pi^2))/2")
        }
    }
}

pub fn spectrum(c: Option<f64>, rank: Option<u32>, window: &str, discretize: Option<u32>, f: Format) -> Out {
    let (lo, hi) = parse_window(window)?;
    let op = match rank {
        Some(n) => AsymptoticOperator::complex_linear(n),
        None => AsymptoticOperator::vertical(c.unwrap_or(0.0)),
    }
    .map_err(Error::from)?;
    let points = spectrum_window(op, lo, hi).map_err(Error::from)?;
    let mut out = String::new();
    match f {
        Format::Text => {
            let _ = writeln!(out, "Eigenvalues of {op} in [{}, {}]", sig12(lo), sig12(hi));
            let mut t = Table::new(std::iter::once("eigenvalues".to_string()).chain(points.iter().map(|p| closed_form(op, p))));
            t.push(std::iter::once("value".to_string()).chain(points.iter().map(|p| sig12(p.eigenvalue))).collect());
            t.push(std::iter::once("multiplicities".to_string()).chain(points.iter().map(|p| p.multiplicity.to_string())).collect());
            t.push(std::iter::once("winding numbers".to_string()).chain(points.iter().map(|p| p.winding.to_string())).collect());
            out.push_str(&t.render(f));
            let _ = writeln!(
                out,
                "CZ(A + delta) = {}  CZ(A - delta) = {}  dim ker = {}",
                cz_perturbed(op, PerturbationSide::PlusSmall),
                cz_perturbed(op, PerturbationSide::MinusSmall),
                op.kernel_dim()
            );
        }
        Format::Csv => {
            let mut t = Table::new(["eigenvalue", "closed_form", "multiplicity", "winding", "fourier_mode"]);
            for p in &points {
                t.push(vec![
                    sig12(p.eigenvalue),
                    closed_form(op, p),
                    p.multiplicity.to_string(),
                    p.winding.to_string(),
                    p.fourier_mode.to_string(),
                ]);
            }
            out.push_str(&t.render(f));
        }
    }
    if let Some(cutoff) = discretize {
        let disc: Vec<SpectralPoint> = discretize_spectrum(op, cutoff)
            .map_err(Error::from)?
            .into_iter()
            .filter(|p| p.eigenvalue >= lo && p.eigenvalue <= hi)
            .collect();
        if f == Format::Text {
            let _ = writeln!(out, "\nFourier truncation, modes 0..={cutoff}");
        }
        let mut t = Table::new(["eigenvalue", "multiplicity", "winding", "fourier_mode", "error"]);
        for d in &disc {
            let err = points
                .iter()
                .map(|p| (p.eigenvalue - d.eigenvalue).abs())
                .fold(f64::INFINITY, f64::min);
            t.push(vec![
                sig12(d.eigenvalue),
                d.multiplicity.to_string(),
                d.winding.to_string(),
                d.fourier_mode.to_string(),
                format!("{err:.1e}"),
            ]);
        }
        out.push_str(&t.render(f));
    }
    Ok(out)
}

fn decoration_label(d: Decoration) -> String {
    match d {
        Decoration::Weighted(Weight::Decay) => "decay".into(),
        Decoration::Weighted(Weight::Growth) => "growth".into(),
        Decoration::KernelSubspace { dim } => format!("V dim {dim}"),
    }
}

fn breakdown_table(b: &IndexBreakdown) -> Table {
    let mut t = Table::new(["puncture", "sign", "operator", "decoration", "cz", "correction", "contribution"]);
    for (i, term) in b.terms.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            term.sign.to_string(),
            term.operator.to_string(),
            decoration_label(term.decoration),
            term.cz.to_string(),
            term.correction.to_string(),
            term.contribution.to_string(),
        ]);
    }
    t
}

fn describe_problem(out: &mut String, label: &str, p: &PuncturedProblem, f: Format) {
    let mb = morse_bott_breakdown(p);
    let _ = writeln!(
        out,
        "{label}: rank {}, chi {}, relative c1 {}",
        mb.rank, mb.euler_characteristic, mb.rel_c1
    );
    match weighted_breakdown(p) {
        Ok(w) => {
            let _ = writeln!(out, "weighted index: {}", w.total);
            out.push_str(&breakdown_table(&w).render(f));
        }
        Err(e) => {
            let _ = writeln!(out, "weighted index: n/a ({e})");
        }
    }
    let _ = writeln!(out, "index via equivalent subspaces: {}", mb.total);
    out.push_str(&breakdown_table(&mb).render(f));
}

fn parse_end(s: &str, c: f64) -> Result<End, CliError> {
    match s.trim() {
        "ham" | "hamiltonian" => Ok(End::Hamiltonian { c }),
        "reeb" => Ok(End::Reeb),
        other => Err(usage(format!("unknown end `{other}` (ham or reeb)"))),
    }
}

pub fn index(file: Option<&str>, vertical: Option<&str>, augs: usize, c: f64, f: Format) -> Out {
    let mut out = String::new();
    match (file, vertical) {
        (Some(path), _) => match read_json::<IndexFile>(path).map_err(failure)? {
            IndexFile::Single(p) => {
                let p = p.build()?;
                describe_problem(&mut out, "problem", &p, f);
            }
            IndexFile::Split { vertical, horizontal } => {
                let v = vertical.build()?;
                let h = horizontal.build()?;
                describe_problem(&mut out, "vertical", &v, f);
                describe_problem(&mut out, "horizontal", &h, f);
                let split = split_floer_index(&v, &h).map_err(Error::from)?;
                let _ = writeln!(out, "split Floer index: {split}");
            }
        },
        (None, Some(ends)) => {
            let (plus, minus) = ends
                .split_once(',')
                .ok_or_else(|| usage("--vertical expects `plus,minus`"))?;
            let (plus, minus) = (parse_end(plus, c)?, parse_end(minus, c)?);
            let weighted = vertical_problem(plus, minus, augs, false).map_err(Error::from)?;
            let mb = vertical_problem(plus, minus, augs, true).map_err(Error::from)?;
            describe_problem(&mut out, "vertical, weighted ends", &weighted, f);
            let _ = writeln!(out, "vertical, Morse-Bott ends: index {}", index_morse_bott(&mb));
            out.push_str(&breakdown_table(&morse_bott_breakdown(&mb)).render(f));
        }
        (None, None) => return Err(usage("index needs --file or --vertical")),
    }
    Ok(out)
}

fn dimension_text(d: &Dimension, f: Format) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "formula: {}", d.formula);
    let mut t = Table::new(["term", "value"]);
    for (name, v) in &d.terms {
        t.push(vec![name.clone(), v.to_string()]);
    }
    out.push_str(&t.render(f));
    let _ = writeln!(out, "dimension: {}", d.value);
    out
}

pub fn dim(setup: &str, spec: &str, f: Format) -> Out {
    let s = load(setup)?;
    let file: DimFile = read_json(spec).map_err(failure)?;
    let d = match file.build(&s).map_err(failure)? {
        DimRequest::Pearl(p) => pearl_dimension(&s, &p).map_err(Error::from)?,
        DimRequest::Cascade { kind, upper, lower } => {
            let upper = parse_generator(&s, &upper).map_err(Error::from)?;
            let lower = parse_generator(&s, &lower).map_err(Error::from)?;
            cascade_dimension(kind, &upper, &lower).map_err(Error::from)?
        }
    };
    Ok(dimension_text(&d, f))
}

fn levels_field(t: &CascadeType) -> (String, String) {
    let classes: Vec<String> = t.levels.iter().map(|l| class(&l.class_a)).collect();
    let mut augs = Vec::new();
    for (i, l) in t.levels.iter().enumerate() {
        for a in &l.augmentations {
            augs.push(format!("L{}:{}x{}", i + 1, class(&a.class_b), a.multiplicity));
        }
    }
    (classes.join(" "), augs.join(" "))
}

pub fn catalog_table(cascades: &[CascadeType]) -> Table {
    let mut t = Table::new([
        "target",
        "source",
        "target_grading",
        "source_grading",
        "case",
        "N",
        "N0",
        "N1",
        "k",
        "multiplicities",
        "classes_a",
        "augmentations",
        "sphere_b",
        "identity",
        "budget",
    ]);
    for c in cascades {
        let (classes, augs) = levels_field(c);
        let mults: Vec<String> = c.multiplicities.iter().map(u32::to_string).collect();
        t.push(vec![
            c.target.name(),
            c.source.name(),
            q(&c.target.grading),
            q(&c.source.grading),
            c.case.to_string(),
            c.n().to_string(),
            c.budget.n0.to_string(),
            c.budget.n1.to_string(),
            c.budget.k.to_string(),
            mults.join(" "),
            classes,
            augs,
            c.sphere_b.as_deref().map(class).unwrap_or_default(),
            q(&c.identity),
            format!("{}<={}", q(&c.budget.total), c.budget.bound),
        ]);
    }
    t
}

fn completeness_lines(c: &[Completeness]) -> String {
    let parts: Vec<String> = c.iter().map(Completeness::to_string).collect();
    format!("search: {}\n", parts.join("; "))
}

fn certification_text(r: &CertificationReport, f: Format) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", r.verdict());
    let mut t = Table::new(["case", "types"]);
    for (case, n) in &r.case_counts {
        t.push(vec![case.clone(), n.to_string()]);
    }
    out.push_str(&t.render(f));
    let _ = writeln!(
        out,
        "budget pruning agrees with exhaustive search: {}",
        if r.pruning_sound { "yes" } else { "NO" }
    );
    for c in &r.counterexamples {
        let _ = writeln!(out, "counterexample: {c}");
    }
    out.push_str(&completeness_lines(&r.completeness));
    out
}

pub struct EnumerateArgs<'a> {
    pub setup: &'a str,
    pub target: Option<&'a str>,
    pub all_targets: bool,
    pub evaluate: Option<&'a str>,
    pub k_max: u32,
    pub class_bound: i64,
    pub exhaustive: bool,
    pub certify: bool,
    pub format: Format,
}

pub fn enumerate(a: EnumerateArgs<'_>) -> Out {
    let s = load(a.setup)?;
    let f = a.format;
    let pruning = if a.exhaustive { Pruning::Exhaustive } else { Pruning::Budget };
    let mut out = String::new();
    if let Some(path) = a.evaluate {
        let spec = read_json::<CascadeFile>(path).map_err(failure)?.build(&s)?;
        let t = classify(&s, spec).map_err(Error::from)?;
        out.push_str(&catalog_table(std::slice::from_ref(&t)).render(f));
        if f == Format::Text {
            let gammas: Vec<String> = t.budget.reeb_indices.iter().map(q).collect();
            let _ = writeln!(
                out,
                "budget terms: fibre {} + N1 {} + k {} + slack {} + reeb [{}] = {} (bound {})",
                t.budget.fibre,
                t.budget.n1,
                t.budget.k,
                t.budget.slack,
                gammas.join(", "),
                q(&t.budget.total),
                t.budget.bound
            );
            let _ = writeln!(out, "label: {}", t.case);
        }
        if !t.case.is_feasible() {
            return Err(failure(format!("{out}cascade: {}", t.case)));
        }
        return Ok(out);
    }
    let (cascades, completeness) = match (a.target, a.all_targets) {
        (Some(name), _) => {
            let target = parse_generator(&s, name).map_err(Error::from)?;
            let e = enumerate_contributions_with(&s, &target, a.k_max, a.class_bound, pruning).map_err(Error::from)?;
            (e.cascades, e.completeness)
        }
        (None, true) => {
            let c = enumerate_all(&s, a.k_max, a.class_bound, pruning).map_err(Error::from)?;
            (c.cascades, c.completeness)
        }
        (None, false) => return Err(usage("enumerate needs --target, --all-targets or --evaluate")),
    };
    out.push_str(&catalog_table(&cascades).render(f));
    if f == Format::Text {
        out.push_str(&completeness_lines(&completeness));
    }
    if a.certify {
        let r = certify_classification(&s, a.k_max, a.class_bound).map_err(Error::from)?;
        if f == Format::Text {
            out.push('\n');
            out.push_str(&certification_text(&r, f));
        }
        if !r.certified() {
            return Err(failure(format!("{out}cascade: {}", r.verdict())));
        }
    }
    Ok(out)
}

fn space_text(label: &str, s: &OrientedSpace<Rational>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{label}: dimension {}, sign {}", s.dim(), s.sign);
    for (i, col) in s.basis.columns().iter().enumerate() {
        let entries: Vec<String> = col.iter().map(q).collect();
        let _ = writeln!(out, "  basis {}: ({})", i + 1, entries.join(", "));
    }
    out
}

pub fn orient(path: &str, f: Format) -> Out {
    let file: OrientFile = read_json(path).map_err(failure)?;
    let (label, space) = match file {
        OrientFile::FibreSum { v1, v2, w, f1, f2 } => {
            let (v1, v2, w) = (v1.build().map_err(failure)?, v2.build().map_err(failure)?, w.build().map_err(failure)?);
            let f1 = map_matrix(&f1, w.ambient_dim(), v1.ambient_dim()).map_err(failure)?;
            let f2 = map_matrix(&f2, w.ambient_dim(), v2.ambient_dim()).map_err(failure)?;
            let k = fibre_sum_orientation(&v1, &v2, &w, &f1, &f2).map_err(Error::from)?;
            ("kernel of f1 - f2", k)
        }
        OrientFile::Quotient { total, sub } => {
            let (total, sub) = (total.build().map_err(failure)?, sub.build().map_err(failure)?);
            ("quotient representative", quotient_orientation(&total, &sub).map_err(Error::from)?)
        }
    };
    Ok(match f {
        Format::Text => space_text(label, &space),
        Format::Csv => {
            let mut t = Table::new(["vector", "entries", "sign"]);
            for (i, col) in space.basis.columns().iter().enumerate() {
                let entries: Vec<String> = col.iter().map(q).collect();
                t.push(vec![(i + 1).to_string(), entries.join(" "), space.sign.to_string()]);
            }
            if space.dim() == 0 {
                t.push(vec![String::new(), String::new(), space.sign.to_string()]);
            }
            t.render(f)
        }
    })
}

pub fn morse(path: &str, f: Format) -> Out {
    let file = load_morse_file(path).map_err(Error::from)?;
    let data = file.complex();
    let complex = differential(&data).map_err(Error::from)?;
    let mut out = String::new();
    if f == Format::Text {
        if let Some(name) = file.name() {
            let _ = writeln!(out, "{name}");
        }
        for (d, gens) in &complex.generators {
            let _ = writeln!(out, "C_{d}: {}", gens.join(" "));
        }
        for (d, m) in &complex.boundary {
            if m.is_empty() || m[0].is_empty() {
                continue;
            }
            let _ = writeln!(out, "d_{d}:");
            for row in m {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
                let _ = writeln!(out, "  [{} ]", cells.join(""));
            }
        }
        let _ = writeln!(out, "d^2 = 0 verified");
    }
    let h = complex_homology(&complex);
    let mut t = Table::new(["degree", "generators", "betti", "torsion", "homology"]);
    for g in &h {
        let tors: Vec<String> = g.torsion.iter().map(i64::to_string).collect();
        t.push(vec![
            g.degree.to_string(),
            complex.rank_in(g.degree).to_string(),
            g.betti.to_string(),
            tors.join(" "),
            g.to_string(),
        ]);
    }
    out.push_str(&t.render(f));
    Ok(out)
}

fn section(out: &mut String, title: &str) {
    let _ = writeln!(out, "\n## {title}\n");
}

pub fn report(path: &str, k_max: u32, class_bound: i64, profile: &str, f: Format) -> Out {
    let s = load(path)?;
    let profile = parse_profile(profile).map_err(Error::from)?;
    let mut out = format!("# Report: {}\n", s.name.as_deref().unwrap_or(path));
    section(&mut out, "Setup");
    out.push_str(&validate(path)?);

    section(&mut out, "Generators");
    let gens = enumerate_generators(&s, k_max).map_err(Error::from)?;
    out.push_str(&generator_table(&gens).render(f));

    section(&mut out, "Actions");
    let admissible = check_admissible(profile.as_ref(), 4096);
    let _ = writeln!(out, "profile {}: {admissible}", profile.describe());
    let t0 = s.t0.to_f64().unwrap_or(f64::NAN);
    let mut t = Table::new(["k", "rho_k", "b_k", "action", "C"]);
    for k in 1..=k_max {
        let lvl = orbit_level(profile.as_ref(), k, t0).map_err(Error::from)?;
        t.push(vec![
            k.to_string(),
            sig12(lvl.rho_k),
            sig12(lvl.b_k),
            sig12(lvl.action),
            sig12(lvl.vertical_c),
        ]);
    }
    out.push_str(&t.render(f));

    section(&mut out, "Cascades");
    let cert = certify_classification(&s, k_max, class_bound).map_err(Error::from)?;
    out.push_str(&catalog_table(&cert.catalog).render(f));

    section(&mut out, "Certification");
    out.push_str(&certification_text(&cert, f));
    Ok(out)
}

pub fn selftest(seed: u64, count: usize) -> Out {
    let checks = crate::selftest::run(seed, count);
    let mut out = String::new();
    let mut failed = 0;
    for (name, result) in &checks {
        match result {
            Ok(detail) => {
                let _ = writeln!(out, "PASS  {name}: {detail}");
            }
            Err(why) => {
                failed += 1;
                let _ = writeln!(out, "FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        return Err(failure(format!("{out}selftest: {failed} check(s) failed")));
    }
    Ok(out)
}
