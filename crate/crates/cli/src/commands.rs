use std::f64::consts::PI;

use serde_json::{json, Value};
use threebody::dynamics::{
    trace, uniform_grid, CoherentStateSpec, LatticeEnvelope, Profile, TraceOptions,
};
use threebody::exact_diag::exact_diag_with_bound;
use threebody::model::{derive_couplings, hz_to_joules, CouplingSet, PhysicalParams, HBAR};
use threebody::renorm::{
    beta_closed_form, beta_partials, counterterm, raw_second_order_shift,
    renormalized_second_order_shift,
};

use crate::args::{BetaArgs, CouplingArgs, EdArgs, RevivalArgs, SweepArgs};
use crate::output::{num, opt, Cell, Report, Table};

/// Bad input; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<threebody::Error> for UsageError {
    fn from(e: threebody::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Report, UsageError>;

pub fn beta(args: &BetaArgs) -> CmdResult {
    let partials = beta_partials(args.cutoff)?;
    let closed = beta_closed_form();
    let mut table = Table::new(&["shell", "beta_partial", "residual"]);
    for (shell, &b) in partials.iter().enumerate().skip(1) {
        table.push(vec![shell.into(), b.into(), (closed - b).into()]);
    }
    let last = partials[args.cutoff as usize];
    let json = json!({
        "cutoff": args.cutoff,
        "beta_partial": partials[1..].iter().map(|&b| num(b)).collect::<Vec<_>>(),
        "beta_closed_form": num(closed),
        "residual": num(closed - last),
    });
    Ok(Report {
        table,
        json,
        warnings: vec![],
        notes: vec![],
    })
}

struct Resolved {
    couplings: CouplingSet,
    params: Option<PhysicalParams>,
    beta: f64,
}

fn resolve(a: &CouplingArgs) -> Result<Resolved, UsageError> {
    if !(a.omega_khz > 0.0 && a.omega_khz.is_finite()) {
        return Err(UsageError(format!(
            "--omega-khz must be positive, got {}",
            a.omega_khz
        )));
    }
    let omega = 2.0 * PI * a.omega_khz * 1e3;
    let beta = a.beta.unwrap_or_else(beta_closed_form);
    let u3_intrinsic = hz_to_joules(a.u3_intrinsic_hz);
    let (mut couplings, params) = match a.xi {
        Some(xi) => (
            CouplingSet::from_xi(xi, HBAR * omega, beta, u3_intrinsic),
            None,
        ),
        None => {
            let mut p =
                PhysicalParams::for_species(&a.species, omega, a.ascat_nm.map(|nm| nm * 1e-9))?
                    .with_u3_intrinsic(u3_intrinsic);
            if a.effective_range {
                if let Some(nm) = a.re_nm {
                    p = p.with_effective_range(nm * 1e-9);
                }
                p = p.with_effective_scattering_length()?;
            }
            (derive_couplings(&p, beta), Some(p))
        }
    };
    if let Some(hz) = a.u3_hz {
        couplings = couplings.with_u3(hz_to_joules(hz));
    }
    Ok(Resolved {
        couplings,
        params,
        beta,
    })
}

fn warnings(c: &CouplingSet, n: f64) -> Vec<String> {
    c.warnings(n).iter().map(|w| w.to_string()).collect()
}

fn coupling_json(r: &Resolved, species: &str) -> Value {
    let c = &r.couplings;
    json!({
        "species": r.params.map(|_| species),
        "sigma_nm": opt(r.params.map(|p| p.sigma() * 1e9)),
        "a_scat_nm": opt(r.params.map(|p| p.a_scat * 1e9)),
        "xi": num(c.xi),
        "beta": num(r.beta),
        "hbar_omega_hz": num(c.hbar_omega_hz()),
        "u2_hz": num(c.u2_hz()),
        "u3_hz": num(c.u3_hz()),
        "delta_u3_hz": num(-r.beta * c.xi * c.xi * c.hbar_omega_hz() + 0.0),
        "t2_ms": opt(c.t2().map(|t| t * 1e3)),
        "t3_ms": opt(c.t3().map(|t| t * 1e3)),
    })
}

pub fn couplings(args: &CouplingArgs) -> CmdResult {
    let r = resolve(args)?;
    let c = &r.couplings;
    let mut notes = Vec::new();
    if c.t2().is_none() {
        notes.push("no collapse: the two-body energy vanishes");
    }
    if c.t3().is_none() {
        notes.push("no three-body revival: the three-body energy vanishes");
    }
    let mut json = coupling_json(&r, &args.species);
    json["notes"] = json!(notes);

    let header = [
        "sigma_nm",
        "a_scat_nm",
        "xi",
        "beta",
        "hbar_omega_hz",
        "u2_hz",
        "u3_hz",
        "delta_u3_hz",
        "t2_ms",
        "t3_ms",
    ];
    let mut table = Table::new(&header);
    let cell = |key: &str| match json[key].as_f64() {
        Some(v) => Cell::Float(v),
        None if key.starts_with('t') => Cell::Float(f64::INFINITY),
        None => Cell::Text(String::new()),
    };
    table.push(header.iter().map(|k| cell(k)).collect());
    Ok(Report {
        table,
        json,
        warnings: warnings(c, 2.0),
        notes: notes.iter().map(|n| n.to_string()).collect(),
    })
}

pub fn revival(args: &RevivalArgs) -> CmdResult {
    let r = resolve(&args.couplings)?;
    let c = r.couplings;
    let spec = CoherentStateSpec::new(args.nbar, args.tail_tol)?;
    let t_max = match (args.tmax_ms, args.tmax_over_t2) {
        (Some(ms), _) => ms * 1e-3,
        (None, ratio) => {
            let t2 = c
                .t2()
                .ok_or_else(|| UsageError("no two-body revival time; give --tmax-ms".into()))?;
            ratio.unwrap_or(6.0) * t2
        }
    };
    let grid = uniform_grid(t_max, args.steps)?;
    let envelope = if args.inhom_eps != 0.0 {
        let env = LatticeEnvelope {
            diameter_sites: args.diameter,
            eps: args.inhom_eps,
            profile: Profile::Parabolic,
            scale_u3: !args.no_scale_u3,
        };
        env.validate()?;
        Some(env)
    } else {
        None
    };
    let tr = trace(
        &grid,
        &spec,
        &c,
        TraceOptions {
            closed_form: args.closed_form,
            envelope,
        },
    )?;

    let mut header = vec!["t_ms", "visibility"];
    if tr.closed_form.is_some() {
        header.push("closed_form");
    }
    if tr.averaged.is_some() {
        header.push("averaged");
    }
    let mut table = Table::new(&header);
    for (i, &t) in tr.times.iter().enumerate() {
        let mut row = vec![Cell::Float(t * 1e3), Cell::Float(tr.visibility[i])];
        if let Some(cf) = &tr.closed_form {
            row.push(cf[i].into());
        }
        if let Some(av) = &tr.averaged {
            row.push(av[i].into());
        }
        table.push(row);
    }

    let series = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>();
    let mut parameters = coupling_json(&r, &args.couplings.species);
    parameters["nbar"] = num(args.nbar);
    parameters["n_max"] = json!(spec.n_max);
    parameters["inhom_eps"] = num(args.inhom_eps);
    parameters["diameter"] = json!(args.diameter);
    let mut json = json!({
        "parameters": parameters,
        "t_ms": tr.times.iter().map(|&t| num(t * 1e3)).collect::<Vec<_>>(),
        "visibility": series(&tr.visibility),
    });
    if let Some(cf) = &tr.closed_form {
        json["closed_form"] = json!(series(cf));
    }
    if let Some(av) = &tr.averaged {
        json["averaged"] = json!(series(av));
    }
    Ok(Report {
        table,
        json,
        warnings: warnings(&c, args.nbar),
        notes: vec![],
    })
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    if args.steps < 2 {
        return Err(UsageError(format!(
            "--steps must be at least 2, got {}",
            args.steps
        )));
    }
    if args.xi_max.partial_cmp(&args.xi_min) != Some(std::cmp::Ordering::Greater) {
        return Err(UsageError("--xi-max must exceed --xi-min".into()));
    }
    let beta = args.beta.unwrap_or_else(beta_closed_form);
    let last = (args.steps - 1) as f64;
    let mut table = Table::new(&["xi", "u2_over_hbar_omega", "u3_over_hbar_omega"]);
    let mut rows = Vec::new();
    let mut warn = Vec::new();
    for i in 0..args.steps {
        let f = i as f64 / last;
        let xi = args.xi_min * (1.0 - f) + args.xi_max * f;
        let c = CouplingSet::from_xi(xi, 1.0, beta, 0.0);
        // + 0.0 folds −0 into 0
        let (u2, u3) = (c.u2 + 0.0, c.u3 + 0.0);
        table.push(vec![xi.into(), u2.into(), u3.into()]);
        rows.push(
            json!({"xi": num(xi), "u2_over_hbar_omega": num(u2), "u3_over_hbar_omega": num(u3)}),
        );
        if warn.is_empty() {
            warn = warnings(&c, 0.0);
        }
    }
    Ok(Report {
        table,
        json: json!({"beta": num(beta), "rows": rows}),
        warnings: warn,
        notes: vec![],
    })
}

pub fn ed(args: &EdArgs) -> CmdResult {
    let n = args.n;
    let residual = |xi: f64| -> Result<(f64, f64, f64, f64, usize, f64), UsageError> {
        let sol = exact_diag_with_bound(n, args.cutoff, xi, args.max_dimension)?;
        let first = xi * (n as f64) * (n as f64 - 1.0) / 2.0;
        let second = raw_second_order_shift(n, args.cutoff, xi, 1.0)? + 0.0;
        Ok((
            sol.energy - first - second,
            sol.energy,
            first,
            second,
            sol.dimension,
            sol.ground_overlap,
        ))
    };
    let xi = args.xi;
    let (res, energy, first, second, dimension, overlap) = residual(xi)?;
    let (res_half, ..) = residual(0.5 * xi)?;
    let ratio = if res_half != 0.0 {
        res / res_half
    } else {
        f64::NAN
    };
    let renormalized = renormalized_second_order_shift(n, args.cutoff, xi, 1.0)?;
    let a = counterterm(args.cutoff, xi, 1.0)?;

    let fields: [(&str, Cell); 15] = [
        ("n", n.into()),
        ("cutoff", args.cutoff.into()),
        ("xi", xi.into()),
        ("dimension", dimension.into()),
        ("ground_overlap", overlap.into()),
        ("ed_energy", energy.into()),
        ("first_order", first.into()),
        ("second_order", second.into()),
        ("prediction", (first + second).into()),
        ("residual", res.into()),
        ("residual_over_xi3", (res / xi.powi(3)).into()),
        ("residual_half_xi", res_half.into()),
        ("scaling_ratio", ratio.into()),
        ("renormalized_second_order", renormalized.into()),
        ("counterterm", a.into()),
    ];
    let mut table = Table::new(&fields.iter().map(|(k, _)| *k).collect::<Vec<_>>());
    table.push(fields.iter().map(|(_, v)| v.clone()).collect());
    let mut json = serde_json::Map::new();
    for (k, v) in &fields {
        let value = match v {
            Cell::Float(x) => num(*x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        };
        json.insert(k.to_string(), value);
    }
    let c = CouplingSet::from_xi(xi, 1.0, 0.0, 0.0);
    Ok(Report {
        table,
        json: Value::Object(json),
        warnings: warnings(&c, n as f64),
        notes: vec![],
    })
}
