use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minsurf::analysis::{analyze, classify_algebraic, unicity_scan};
use minsurf::builder::{homology_cycles, integrate_surface, periods, total_curvature, Cycle, GridSpec, TotalCurvatureOptions};
use minsurf::catalog::{self, CatalogParams};
use minsurf::covering::{lifted_bounds, CoverSpec};
use minsurf::io::{parse_complex, surface_from_value, surface_to_value};
use minsurf::mesh::{write_obj, write_ply};
use minsurf::nevanlinna::{area_ratio_check, t_characteristic_voss};
use minsurf::{Complex64, Error, Result, SpherePoint, WeierstrassSurface};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "minsurf", version, about = "Gauss map analysis of pseudo-algebraic minimal surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    /// Parameter a of the three-ended family
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Parameter t of the three-ended family
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Exponent j of the Costa-type family
    #[arg(long)]
    j: Option<u32>,
    /// Case (1 or 2) of the Costa-type family
    #[arg(long)]
    case: Option<u8>,
    /// sigma as "re,im"
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Voss points as "re,im;re,im[;re,im]"
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis report with bound verdicts
    Analyze {
        /// Surface JSON file or @catalog-name
        surface: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Named surfaces
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Integrate the surface on a polar grid and write OBJ (or PLY by extension)
    Mesh {
        surface: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 0.1)]
        rmin: f64,
        #[arg(long, default_value_t = 1.0)]
        rmax: f64,
        #[arg(long, default_value_t = 32)]
        nr: usize,
        #[arg(long, default_value_t = 64)]
        ntheta: usize,
        /// Basepoint "re,im" (default: first grid vertex)
        #[arg(long, allow_hyphen_values = true)]
        basepoint: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Associated family angle in radians
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Real periods over cycles (default: generators around the punctures)
    Periods {
        surface: String,
        #[arg(long)]
        cycle: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Push the topology through an unbranched cover and recheck the bounds
    Covering {
        surface: String,
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Values sharing preimages for two Gauss maps on one basic domain
    Unicity { first: String, second: String },
    /// Characteristic function of the Gauss map
    Nevanlinna {
        #[command(subcommand)]
        which: NevanlinnaCommand,
    },
    /// Total curvature, or divergence when the periods do not vanish
    Totalcurv {
        surface: String,
        #[arg(long)]
        truncate: Option<f64>,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Subcommand)]
enum NevanlinnaCommand {
    /// Voss' surface with three ends
    Voss3 {
        /// JSON array of three sphere points (default [[0,0],[1,0],"inf"])
        #[arg(long)]
        punctures: Option<PathBuf>,
        #[arg(long, default_value = "0.5,0.7,0.9")]
        r: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_c(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parameter(format!("cannot parse {t:?} as a number")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parameter(format!("expected \"re,im\", got {s:?}"))),
    }
}

impl ParamArgs {
    fn to_params(&self) -> Result<CatalogParams> {
        Ok(CatalogParams {
            a: self.a,
            t: self.t,
            j: self.j,
            case: self.case,
            sigma: self.sigma.as_deref().map(parse_c).transpose()?,
            points: self.points.as_deref().map(|p| p.split(';').map(parse_c).collect::<Result<Vec<_>>>()).transpose()?,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))
}

fn load(src: &str, params: &ParamArgs) -> Result<WeierstrassSurface> {
    if src.starts_with('@') {
        catalog::make(src, &params.to_params()?)
    } else {
        let v: Value = serde_json::from_str(&read(Path::new(src))?)?;
        // `catalog show` output wraps the surface
        match v.get("surface") {
            Some(inner) => surface_from_value(inner),
            None => surface_from_value(&v),
        }
    }
}

// A closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { surface, json, text, params } => {
            let s = load(&surface, &params)?;
            let rep = analyze(&s)?;
            let diag = classify_algebraic(&rep);
            if json && !text {
                print_json(&json!({"report": rep, "algebraic_case": diag}))?;
            } else {
                let mut t = rep.to_text();
                t += &format!("{}\n", diag.message);
                for c in &diag.clauses {
                    t += &format!("[{}] {:<26} {}\n", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
                }
                emit(&t)?;
            }
            Ok(u8::from(!(rep.pass() && diag.pass())))
        }
        Command::Catalog { action: CatalogAction::List } => {
            let mut t = String::new();
            for e in catalog::ENTRIES.iter() {
                let p = if e.parameters.is_empty() { String::new() } else { format!("  [{}]", e.parameters) };
                t += &format!("@{:<14} {}{}\n", e.name, e.description, p);
            }
            emit(&t)?;
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Show { name, params } } => {
            let s = catalog::make(&name, &params.to_params()?)?;
            let mut v = json!({"name": name.trim_start_matches('@'), "surface": surface_to_value(&s)?});
            if let Some(g) = catalog::golden(&name) {
                v["golden"] = serde_json::to_value(g)?;
            }
            print_json(&v)?;
            Ok(0)
        }
        Command::Mesh { surface, center, rmin, rmax, nr, ntheta, basepoint, out, theta, params } => {
            let mut s = load(&surface, &params)?;
            if let Some(t) = theta {
                s = s.associated(t);
            }
            let center = parse_c(&center)?;
            let grid = GridSpec::Polar { center, rmin, rmax, nr, ntheta };
            let base = match basepoint {
                Some(b) => parse_c(&b)?,
                None => center + rmin,
            };
            let m = integrate_surface(&s, base, &grid)?;
            let mut f = fs::File::create(&out)?;
            if out.extension().is_some_and(|e| e == "ply") {
                write_ply(&m, &mut f)?;
            } else {
                write_obj(&m, &mut f)?;
            }
            f.flush()?;
            print_json(&json!({
                "out": out.display().to_string(),
                "vertices": m.vertices.len(),
                "faces": m.faces.len(),
                "patch_residual": m.patch_residual,
                "seam_mismatch": m.seam_mismatch,
                "harmonicity_residual": m.harmonicity_residual(),
                "isothermal_residual": m.isothermal_residual(),
            }))?;
            Ok(0)
        }
        Command::Periods { surface, cycle, params } => {
            let s = load(&surface, &params)?;
            let cycles: Vec<Cycle> = match cycle {
                Some(p) => {
                    let v: Value = serde_json::from_str(&read(&p)?)?;
                    if v.is_array() && v.as_array().is_some_and(|a| a.first().is_some_and(|x| x.is_object())) {
                        serde_json::from_value(v)?
                    } else {
                        vec![serde_json::from_value(v)?]
                    }
                }
                None => homology_cycles(&s),
            };
            let res = periods(&s, &cycles)?;
            print_json(&json!({"cycles": cycles, "periods": res}))?;
            Ok(0)
        }
        Command::Covering { surface, spec, params } => {
            let s = load(&surface, &params)?;
            let spec: CoverSpec = serde_json::from_str(&read(&spec)?)?;
            let rep = analyze(&s)?;
            let lifted = lifted_bounds(&rep, &spec)?;
            print_json(&lifted)?;
            Ok(u8::from(!lifted.pass))
        }
        Command::Unicity { first, second } => {
            let none = ParamArgs::default();
            let u = unicity_scan(&load(&first, &none)?, &load(&second, &none)?)?;
            print_json(&u)?;
            Ok(u8::from(!u.pass))
        }
        Command::Nevanlinna { which: NevanlinnaCommand::Voss3 { punctures, r, out } } => {
            let pts: Vec<SpherePoint> = match punctures {
                Some(p) => {
                    let v: Value = serde_json::from_str(&read(&p)?)?;
                    let a = v.as_array().ok_or_else(|| Error::InvalidData("punctures must be a JSON array".into()))?;
                    a.iter()
                        .map(|x| match x.as_str() {
                            Some("inf") => Ok(SpherePoint::Infinity),
                            _ => parse_complex(x).map(SpherePoint::Finite),
                        })
                        .collect::<Result<_>>()?
                }
                None => vec![SpherePoint::finite(0.0, 0.0), SpherePoint::finite(1.0, 0.0), SpherePoint::Infinity],
            };
            let pts: [SpherePoint; 3] = pts.try_into().map_err(|_| Error::Parameter("exactly three punctures are needed".into()))?;
            let radii = r
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parameter(format!("bad radius {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let samples = t_characteristic_voss(pts, &radii)?;
            if let Some(out) = out {
                fs::write(out, samples.to_csv())?;
            }
            let finite: Vec<SpherePoint> = pts.iter().copied().filter(|p| !p.is_infinite()).collect();
            let voss = if finite.len() == 2 && pts.iter().any(|p| p.is_infinite()) {
                minsurf::catalog::make_voss(&[finite[0].as_finite().unwrap(), finite[1].as_finite().unwrap()]).ok()
            } else {
                None
            };
            let areas = voss.map(|s| area_ratio_check(&s)).transpose()?;
            print_json(&json!({"samples": samples, "areas": areas}))?;
            Ok(u8::from(!samples.monotone))
        }
        Command::Totalcurv { surface, truncate, params } => {
            let s = load(&surface, &params)?;
            let t = total_curvature(&s, TotalCurvatureOptions { truncate })?;
            print_json(&t)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
