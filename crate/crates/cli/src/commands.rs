use cgvm_core::jsa::{self, real_dominant};
use cgvm_core::phasematch::{
    group_index_mismatch, solve_cgvm, solve_cgvm_temperature, AxisPairing,
};
use cgvm_core::squeezing::{self, pulse_energy, squeezing_spectrum_with};
use cgvm_core::units::{thz_from_omega, MM, PS2_PER_M, UM};
use cgvm_core::{
    length_scan, phase_mismatch, poling_period, pulse_duration, schmidt_decompose,
    taylor_dispersion, walkoff_time, CrystalModel, Error, OpticalAxis, PdcConfig, PdcType,
    PhaseReference, SqueezingResult,
};
use serde::Serialize;

use crate::args::{CgvmArgs, DispersionArgs, JsaArgs, ModesArgs, ScanArgs};
use crate::config::{Format, Resolved};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Sink};

const FS: f64 = 1e-15;
/// Coarse scan used to find sign changes of the group-index mismatch.
const CGVM_SCAN_SAMPLES: usize = 400;

pub struct Context {
    pub run: Resolved,
    pub sink: Sink,
}

impl Context {
    fn emit(&self, line: impl AsRef<str>) {
        println!("{}", line.as_ref());
    }

    fn written(&self, path: std::path::PathBuf) {
        self.emit(format!("wrote {}", path.display()));
    }
}

/// Centres of `n` equal bins spanning `[lo, hi]`.
fn bin_centres(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|k| lo + (k as f64 + 0.5) * h).collect()
}

fn frequencies_thz(center_omega: f64, grid: &cgvm_core::FrequencyGrid) -> Vec<f64> {
    grid.omegas()
        .into_iter()
        .map(|w| thz_from_omega(center_omega + w))
        .collect()
}

// ---------------------------------------------------------------- dispersion

#[derive(Serialize)]
struct DispersionRow {
    lambda_um: f64,
    axis: OpticalAxis,
    n: f64,
    group_index: f64,
    gvd_ps2_per_m: f64,
}

#[derive(Serialize)]
struct DispersionReport<'a> {
    crystal: &'a str,
    temperature_c: f64,
    rows: Vec<DispersionRow>,
}

pub fn dispersion(ctx: &Context, args: &DispersionArgs) -> CliResult<()> {
    let crystal = &ctx.run.crystal;
    let (vlo, vhi) = crystal.valid_range_um();
    let lo = args.lambda_min_um.unwrap_or(vlo);
    let hi = args.lambda_max_um.unwrap_or(vhi);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::usage(format!(
            "empty wavelength range [{lo}, {hi}] µm"
        )));
    }
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let t = args.temperature_c.unwrap_or(ctx.run.pdc.temperature_c);
    let axes: Vec<OpticalAxis> = if args.axes.is_empty() {
        crystal.axes().collect()
    } else {
        args.axes.clone()
    };

    let mut rows = Vec::with_capacity(axes.len() * args.samples);
    for &axis in &axes {
        for lambda in bin_centres(lo, hi, args.samples) {
            rows.push(DispersionRow {
                lambda_um: lambda,
                axis,
                n: crystal.refractive_index(axis, lambda, t)?,
                group_index: crystal.group_index(axis, lambda, t)?,
                gvd_ps2_per_m: crystal.gvd(axis, lambda, t)?,
            });
        }
    }
    let path = match ctx.sink.format {
        Format::Csv => {
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.lambda_um.into(),
                        r.axis.label().into(),
                        r.n.into(),
                        r.group_index.into(),
                        r.gvd_ps2_per_m.into(),
                    ]
                })
                .collect();
            ctx.sink.csv(
                "dispersion.csv",
                Some(&["lambda_um", "axis", "n", "group_index", "gvd_ps2_per_m"]),
                &table,
            )?
        }
        Format::Json => ctx.sink.json(
            "dispersion.json",
            &DispersionReport {
                crystal: crystal.name(),
                temperature_c: t,
                rows,
            },
        )?,
    };
    ctx.written(path);
    Ok(())
}

// ---------------------------------------------------------------------- cgvm

#[derive(Serialize)]
struct CgvmPoint {
    temperature_c: f64,
    signal_wavelength_um: f64,
    pump_wavelength_um: f64,
    poling_period_um: f64,
}

#[derive(Serialize)]
struct CgvmReport<'a> {
    crystal: &'a str,
    pump_axis: OpticalAxis,
    signal_axis: OpticalAxis,
    target_um: Option<f64>,
    points: Vec<CgvmPoint>,
}

fn pair(v: &[f64], what: &str) -> CliResult<(f64, f64)> {
    match *v {
        [lo, hi] if lo.is_finite() && hi.is_finite() && lo < hi => Ok((lo, hi)),
        _ => Err(CliError::usage(format!(
            "{what} must be LO,HI with LO < HI"
        ))),
    }
}

/// Sub-brackets of the signal range (pump at λ/2 also in range) where
/// the group-index mismatch changes sign.
fn cgvm_brackets(
    crystal: &CrystalModel,
    pairing: AxisPairing,
    t: f64,
) -> CliResult<Vec<(f64, f64)>> {
    let (vlo, vhi) = crystal.valid_range_um();
    let lo = vlo.max(2.0 * vlo);
    if lo >= vhi {
        return Err(Error::NoCgvm(format!(
            "no signal wavelength with its pump inside [{vlo}, {vhi}] µm"
        ))
        .into());
    }
    let xs = bin_centres(lo, vhi, CGVM_SCAN_SAMPLES);
    let g: Vec<f64> = xs
        .iter()
        .map(|&x| group_index_mismatch(crystal, pairing, x, t))
        .collect::<cgvm_core::Result<_>>()?;
    let found: Vec<(f64, f64)> = (1..xs.len())
        .filter(|&i| g[i - 1].signum() != g[i].signum() || g[i] == 0.0)
        .map(|i| (xs[i - 1], xs[i]))
        .collect();
    if found.is_empty() {
        return Err(Error::NoCgvm(format!(
            "m_{}(λ/2) − m_{}(λ) keeps one sign over [{lo}, {vhi}] µm at {t} °C",
            pairing.pump, pairing.signal
        ))
        .into());
    }
    Ok(found)
}

fn cgvm_point(
    crystal: &CrystalModel,
    pairing: AxisPairing,
    t: f64,
    lambda_s: f64,
) -> CliResult<CgvmPoint> {
    let kind = if pairing.pump == pairing.signal {
        PdcType::Type0
    } else {
        PdcType::TypeI
    };
    let cfg = PdcConfig::new(
        std::sync::Arc::new(crystal.clone()),
        kind,
        pairing.pump,
        pairing.signal,
        lambda_s / 2.0,
        t,
        1.0 * MM,
    )?;
    Ok(CgvmPoint {
        temperature_c: t,
        signal_wavelength_um: lambda_s,
        pump_wavelength_um: lambda_s / 2.0,
        poling_period_um: poling_period(&cfg)?,
    })
}

pub fn cgvm(ctx: &Context, args: &CgvmArgs) -> CliResult<()> {
    let crystal = &*ctx.run.crystal;
    let pairing = AxisPairing::new(
        args.pump_axis.unwrap_or(ctx.run.pump_axis()),
        args.signal_axis.unwrap_or(ctx.run.signal_axis()),
    );
    let mut t = args.temperature_c.unwrap_or(ctx.run.pdc.temperature_c);
    let user_bracket = args
        .bracket_um
        .as_deref()
        .map(|b| pair(b, "--bracket-um"))
        .transpose()?;
    let t_bracket = pair(&args.temperature_bracket_c, "--temperature-bracket-c")?;

    let points = match args.target_um {
        None => {
            let brackets = match user_bracket {
                Some(b) => vec![b],
                None => cgvm_brackets(crystal, pairing, t)?,
            };
            brackets
                .into_iter()
                .map(|b| cgvm_point(crystal, pairing, t, solve_cgvm(crystal, pairing, t, b)?))
                .collect::<CliResult<Vec<_>>>()?
        }
        Some(target) => {
            if !(target.is_finite() && target > 0.0) {
                return Err(CliError::usage(format!("--target-um {target} must be > 0")));
            }
            // follow the matched wavelength nearest the target
            let bracket = match user_bracket {
                Some(b) => b,
                None => {
                    let nearest = |b: &(f64, f64)| (0.5 * (b.0 + b.1) - target).abs();
                    let all = cgvm_brackets(crystal, pairing, t)?;
                    let best = all
                        .iter()
                        .copied()
                        .min_by(|a, b| nearest(a).total_cmp(&nearest(b)));
                    let (a, b) = best.expect("non-empty");
                    // widen so the root can move with temperature
                    let half = 0.25 * target;
                    let (vlo, vhi) = crystal.valid_range_um();
                    (
                        (0.5 * (a + b) - half).max(2.0 * vlo + 1e-9),
                        (0.5 * (a + b) + half).min(vhi - 1e-9),
                    )
                }
            };
            t = solve_cgvm_temperature(crystal, pairing, target, t_bracket, bracket)?;
            vec![cgvm_point(
                crystal,
                pairing,
                t,
                solve_cgvm(crystal, pairing, t, bracket)?,
            )?]
        }
    };

    for p in &points {
        ctx.emit(format!(
            "cgvm pump={} signal={} temperature_c={} signal_um={} pump_um={} poling_period_um={}",
            pairing.pump,
            pairing.signal,
            p.temperature_c,
            p.signal_wavelength_um,
            p.pump_wavelength_um,
            p.poling_period_um
        ));
    }
    let path = match ctx.sink.format {
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = points
                .iter()
                .map(|p| {
                    vec![
                        pairing.pump.label().into(),
                        pairing.signal.label().into(),
                        p.temperature_c.into(),
                        p.signal_wavelength_um.into(),
                        p.pump_wavelength_um.into(),
                        p.poling_period_um.into(),
                    ]
                })
                .collect();
            ctx.sink.csv(
                "cgvm.csv",
                Some(&[
                    "pump_axis",
                    "signal_axis",
                    "temperature_c",
                    "signal_wavelength_um",
                    "pump_wavelength_um",
                    "poling_period_um",
                ]),
                &rows,
            )?
        }
        Format::Json => ctx.sink.json(
            "cgvm.json",
            &CgvmReport {
                crystal: crystal.name(),
                pump_axis: pairing.pump,
                signal_axis: pairing.signal,
                target_um: args.target_um,
                points,
            },
        )?,
    };
    ctx.written(path);
    Ok(())
}

// -------------------------------------------------------------------- poling

#[derive(Serialize)]
struct PolingReport {
    pdc_type: PdcType,
    pump_axis: OpticalAxis,
    signal_axis: OpticalAxis,
    pump_wavelength_um: f64,
    signal_wavelength_um: f64,
    temperature_c: f64,
    length_mm: f64,
    poling_period_um: f64,
    residual_mismatch_rad_per_m: f64,
    group_delay_mismatch_fs_per_mm: f64,
    pump_gvd_ps2_per_m: f64,
    signal_gvd_ps2_per_m: f64,
    walkoff_fs: f64,
    hyperbola_offset_thz: Option<f64>,
    pulse_duration_fs: f64,
}

impl PolingReport {
    fn rows(&self) -> Vec<Vec<Cell>> {
        let kind = match self.pdc_type {
            PdcType::Type0 => "type-0",
            PdcType::TypeI => "type-I",
        };
        let mut rows: Vec<Vec<Cell>> = vec![
            vec!["pdc_type".into(), kind.into()],
            vec!["pump_axis".into(), self.pump_axis.label().into()],
            vec!["signal_axis".into(), self.signal_axis.label().into()],
            vec!["pump_wavelength_um".into(), self.pump_wavelength_um.into()],
            vec![
                "signal_wavelength_um".into(),
                self.signal_wavelength_um.into(),
            ],
            vec!["temperature_c".into(), self.temperature_c.into()],
            vec!["length_mm".into(), self.length_mm.into()],
            vec!["poling_period_um".into(), self.poling_period_um.into()],
            vec![
                "residual_mismatch_rad_per_m".into(),
                self.residual_mismatch_rad_per_m.into(),
            ],
            vec![
                "group_delay_mismatch_fs_per_mm".into(),
                self.group_delay_mismatch_fs_per_mm.into(),
            ],
            vec!["pump_gvd_ps2_per_m".into(), self.pump_gvd_ps2_per_m.into()],
            vec![
                "signal_gvd_ps2_per_m".into(),
                self.signal_gvd_ps2_per_m.into(),
            ],
            vec!["walkoff_fs".into(), self.walkoff_fs.into()],
        ];
        if let Some(o) = self.hyperbola_offset_thz {
            rows.push(vec!["hyperbola_offset_thz".into(), o.into()]);
        }
        rows.push(vec![
            "pulse_duration_fs".into(),
            self.pulse_duration_fs.into(),
        ]);
        rows
    }
}

pub fn poling(ctx: &Context) -> CliResult<()> {
    let cfg = ctx.run.pdc_config()?;
    let pump = ctx.run.pump_pulse()?;
    let taylor = taylor_dispersion(&cfg)?;
    let report = PolingReport {
        pdc_type: cfg.pdc_type(),
        pump_axis: cfg.pump_axis(),
        signal_axis: cfg.signal_axis(),
        pump_wavelength_um: cfg.pump_wavelength_um(),
        signal_wavelength_um: cfg.signal_wavelength_um(),
        temperature_c: cfg.temperature_c(),
        length_mm: cfg.length_m() / MM,
        poling_period_um: poling_period(&cfg)?,
        residual_mismatch_rad_per_m: phase_mismatch(&cfg, 0.0, 0.0)?,
        group_delay_mismatch_fs_per_mm: taylor.dk1 * MM / FS,
        pump_gvd_ps2_per_m: taylor.kp2 / PS2_PER_M,
        signal_gvd_ps2_per_m: taylor.ks2 / PS2_PER_M,
        walkoff_fs: walkoff_time(&cfg)? / FS,
        // Ω_d as a linear frequency; undefined without a hyperbolic regime
        hyperbola_offset_thz: taylor
            .hyperbola(0.0)
            .ok()
            .map(|_| taylor.omega_d / (2.0 * std::f64::consts::PI) / 1e12),
        pulse_duration_fs: pulse_duration(&pump) / FS,
    };
    ctx.emit(format!(
        "poling_period_um={} walkoff_fs={}",
        report.poling_period_um, report.walkoff_fs
    ));
    let path = match ctx.sink.format {
        Format::Csv => ctx
            .sink
            .csv("poling.csv", Some(&["quantity", "value"]), &report.rows())?,
        Format::Json => ctx.sink.json("poling.json", &report)?,
    };
    ctx.written(path);
    Ok(())
}

// ----------------------------------------------------------------------- jsa

#[derive(Serialize)]
struct JsaMeta {
    pump_wavelength_um: f64,
    signal_wavelength_um: f64,
    temperature_c: f64,
    length_mm: f64,
    poling_period_um: f64,
    phase_reference: PhaseReference,
    grid_n: usize,
    extent_thz: f64,
    center_frequency_thz: f64,
    schmidt_number: f64,
    eta_jsa: f64,
    raw_norm: f64,
}

impl JsaMeta {
    fn rows(&self) -> Vec<Vec<Cell>> {
        let reference = match self.phase_reference {
            PhaseReference::CrystalCenter => "crystal-center",
            PhaseReference::EntranceFace => "entrance-face",
        };
        vec![
            vec!["pump_wavelength_um".into(), self.pump_wavelength_um.into()],
            vec![
                "signal_wavelength_um".into(),
                self.signal_wavelength_um.into(),
            ],
            vec!["temperature_c".into(), self.temperature_c.into()],
            vec!["length_mm".into(), self.length_mm.into()],
            vec!["poling_period_um".into(), self.poling_period_um.into()],
            vec!["phase_reference".into(), reference.into()],
            vec!["grid_n".into(), self.grid_n.into()],
            vec!["extent_thz".into(), self.extent_thz.into()],
            vec![
                "center_frequency_thz".into(),
                self.center_frequency_thz.into(),
            ],
            vec!["schmidt_number".into(), self.schmidt_number.into()],
            vec!["eta_jsa".into(), self.eta_jsa.into()],
            vec!["raw_norm".into(), self.raw_norm.into()],
        ]
    }
}

#[derive(Serialize)]
struct JsaReport {
    metadata: JsaMeta,
    frequencies_thz: Vec<f64>,
    abs: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

struct Computed {
    config: PdcConfig,
    jsa: cgvm_core::JsaGrid,
    decomp: cgvm_core::SchmidtDecomposition,
    eta: f64,
}

fn compute(ctx: &Context) -> CliResult<Computed> {
    let config = ctx.run.pdc_config()?;
    let pump = ctx.run.pump_pulse()?;
    let grid = ctx.run.grid_spec().resolve(&config, &pump)?;
    let jsa = jsa::compute_jsa_with(&config, &pump, &grid, ctx.run.pdc.phase_reference)?;
    let decomp = schmidt_decompose(&jsa)?;
    let eta = jsa::jsa_efficiency(&jsa, &decomp);
    Ok(Computed {
        config,
        jsa,
        decomp,
        eta,
    })
}

fn jsa_meta(c: &Computed) -> CliResult<JsaMeta> {
    Ok(JsaMeta {
        pump_wavelength_um: c.config.pump_wavelength_um(),
        signal_wavelength_um: c.config.signal_wavelength_um(),
        temperature_c: c.config.temperature_c(),
        length_mm: c.config.length_m() / MM,
        poling_period_um: poling_period(&c.config)?,
        phase_reference: match c.jsa.source {
            jsa::JsaSource::Pdc {
                phase_reference, ..
            } => phase_reference,
            jsa::JsaSource::DoubleGaussian { .. } => PhaseReference::CrystalCenter,
        },
        grid_n: c.jsa.grid.len(),
        extent_thz: thz_from_omega(c.jsa.grid.omega_max()),
        center_frequency_thz: thz_from_omega(c.jsa.center_omega),
        schmidt_number: c.decomp.schmidt_number,
        eta_jsa: c.eta,
        raw_norm: c.decomp.raw_norm,
    })
}

pub fn jsa_cmd(ctx: &Context, args: &JsaArgs) -> CliResult<()> {
    let c = compute(ctx)?;
    let meta = jsa_meta(&c)?;
    ctx.emit(format!(
        "schmidt_number={} eta_jsa={}",
        meta.schmidt_number, meta.eta_jsa
    ));
    let v = &c.jsa.values;
    let n = v.nrows();
    let matrix = |f: &dyn Fn(num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| f(v[(i, j)])).collect())
            .collect()
    };
    let freqs = frequencies_thz(c.jsa.center_omega, &c.jsa.grid);
    match ctx.sink.format {
        Format::Csv => {
            let to_rows = |m: Vec<Vec<f64>>| -> Vec<Vec<Cell>> {
                m.into_iter()
                    .map(|r| r.into_iter().map(Cell::from).collect())
                    .collect()
            };
            ctx.written(
                ctx.sink
                    .csv("jsa_abs.csv", None, &to_rows(matrix(&|z| z.norm())))?,
            );
            if args.complex {
                ctx.written(
                    ctx.sink
                        .csv("jsa_re.csv", None, &to_rows(matrix(&|z| z.re)))?,
                );
                ctx.written(
                    ctx.sink
                        .csv("jsa_im.csv", None, &to_rows(matrix(&|z| z.im)))?,
                );
            }
            let axis: Vec<Vec<Cell>> = freqs
                .iter()
                .enumerate()
                .map(|(i, &f)| vec![i.into(), f.into()])
                .collect();
            ctx.written(
                ctx.sink
                    .csv("jsa_axis.csv", Some(&["index", "f_thz"]), &axis)?,
            );
            ctx.written(ctx.sink.csv(
                "jsa_meta.csv",
                Some(&["quantity", "value"]),
                &meta.rows(),
            )?);
        }
        Format::Json => {
            let report = JsaReport {
                metadata: meta,
                frequencies_thz: freqs,
                abs: matrix(&|z| z.norm()),
                re: args.complex.then(|| matrix(&|z| z.re)),
                im: args.complex.then(|| matrix(&|z| z.im)),
            };
            ctx.written(ctx.sink.json("jsa.json", &report)?);
        }
    }
    Ok(())
}

// --------------------------------------------------------------------- modes

#[derive(Serialize)]
struct ModeExport {
    index: usize,
    s: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    abs: Vec<f64>,
}

#[derive(Serialize)]
struct ModesReport {
    schmidt_number: f64,
    grid_n: usize,
    frequencies_thz: Vec<f64>,
    singular_values: Vec<f64>,
    modes: Vec<ModeExport>,
}

pub fn modes(ctx: &Context, args: &ModesArgs) -> CliResult<()> {
    let c = compute(ctx)?;
    let count = args.count as usize;
    let rank = c.decomp.rank();
    if count > rank {
        return Err(CliError::usage(format!(
            "--count {count} exceeds the decomposition rank {rank}"
        )));
    }
    let freqs = frequencies_thz(c.jsa.center_omega, &c.jsa.grid);
    let exports: Vec<ModeExport> = (0..count)
        .map(|n| {
            let m = real_dominant(&c.decomp.mode(n));
            ModeExport {
                index: n,
                s: c.decomp.singular_values[n],
                re: m.iter().map(|z| z.re).collect(),
                im: m.iter().map(|z| z.im).collect(),
                abs: m.iter().map(|z| z.norm()).collect(),
            }
        })
        .collect();
    ctx.emit(format!(
        "schmidt_number={} s0={}",
        c.decomp.schmidt_number, c.decomp.singular_values[0]
    ));
    match ctx.sink.format {
        Format::Csv => {
            for m in &exports {
                let rows: Vec<Vec<Cell>> = (0..freqs.len())
                    .map(|i| {
                        vec![
                            freqs[i].into(),
                            m.re[i].into(),
                            m.im[i].into(),
                            m.abs[i].into(),
                        ]
                    })
                    .collect();
                let name = format!("mode_{}.csv", m.index);
                ctx.written(
                    ctx.sink
                        .csv(&name, Some(&["f_thz", "re", "im", "abs"]), &rows)?,
                );
            }
            let rows: Vec<Vec<Cell>> = c
                .decomp
                .singular_values
                .iter()
                .enumerate()
                .map(|(i, &s)| vec![i.into(), s.into(), (s * s).into()])
                .collect();
            ctx.written(ctx.sink.csv(
                "singular_values.csv",
                Some(&["index", "s", "s_squared"]),
                &rows,
            )?);
        }
        Format::Json => {
            let report = ModesReport {
                schmidt_number: c.decomp.schmidt_number,
                grid_n: c.jsa.grid.len(),
                frequencies_thz: freqs,
                singular_values: c.decomp.singular_values.clone(),
                modes: exports,
            };
            ctx.written(ctx.sink.json("modes.json", &report)?);
        }
    }
    Ok(())
}

// ------------------------------------------------------------ squeeze / scan

#[derive(Serialize)]
struct ModeSqueezing {
    index: usize,
    s: f64,
    r: f64,
    s_db: f64,
    mean_photons: f64,
}

#[derive(Serialize)]
struct SqueezeReport {
    length_mm: f64,
    schmidt_number: f64,
    eta_jsa: f64,
    eta_pdc_per_w: f64,
    peak_power_w: f64,
    pulse_duration_fs: f64,
    pulse_energy_nj: f64,
    beam_waist_um: f64,
    gain_pb: f64,
    r0: f64,
    s0_db: f64,
    pump_photons_per_pulse: f64,
    exceeds_validity: bool,
    modes: Vec<ModeSqueezing>,
}

fn warn_validity(r: &SqueezingResult) {
    if r.exceeds_validity {
        eprintln!(
            "warning[validity]: S0 = {:.3} dB at L = {} mm exceeds {} dB; the model is not quantitative there",
            r.s0_db(),
            r.length_m / MM,
            squeezing::VALIDITY_LIMIT_DB
        );
    }
}

pub fn squeeze(ctx: &Context) -> CliResult<()> {
    let config = ctx.run.pdc_config()?;
    let pump = ctx.run.pump_pulse()?;
    let r = squeezing_spectrum_with(&config, &pump, &ctx.run.grid_spec())?;
    warn_validity(&r);
    let report = SqueezeReport {
        length_mm: r.length_m / MM,
        schmidt_number: r.schmidt_number,
        eta_jsa: r.eta_jsa,
        eta_pdc_per_w: r.eta_pdc,
        peak_power_w: r.peak_power,
        pulse_duration_fs: r.pulse_duration / FS,
        pulse_energy_nj: pulse_energy(&pump) * 1e9,
        beam_waist_um: r.beam_waist / UM,
        gain_pb: r.gain,
        r0: r.r0(),
        s0_db: r.s0_db(),
        pump_photons_per_pulse: r.pump_photons_per_pulse,
        exceeds_validity: r.exceeds_validity,
        modes: (0..r.r.len())
            .map(|i| ModeSqueezing {
                index: i,
                s: r.singular_values[i],
                r: r.r[i],
                s_db: r.s_db[i],
                mean_photons: r.mean_photons[i],
            })
            .collect(),
    };
    ctx.emit(format!(
        "s0_db={} r0={} schmidt_number={} eta_jsa={}",
        report.s0_db, report.r0, report.schmidt_number, report.eta_jsa
    ));
    match ctx.sink.format {
        Format::Csv => {
            let summary: Vec<Vec<Cell>> = vec![
                vec!["length_mm".into(), report.length_mm.into()],
                vec!["schmidt_number".into(), report.schmidt_number.into()],
                vec!["eta_jsa".into(), report.eta_jsa.into()],
                vec!["eta_pdc_per_w".into(), report.eta_pdc_per_w.into()],
                vec!["peak_power_w".into(), report.peak_power_w.into()],
                vec!["pulse_duration_fs".into(), report.pulse_duration_fs.into()],
                vec!["pulse_energy_nj".into(), report.pulse_energy_nj.into()],
                vec!["beam_waist_um".into(), report.beam_waist_um.into()],
                vec!["gain_pb".into(), report.gain_pb.into()],
                vec!["r0".into(), report.r0.into()],
                vec!["s0_db".into(), report.s0_db.into()],
                vec![
                    "pump_photons_per_pulse".into(),
                    report.pump_photons_per_pulse.into(),
                ],
                vec!["exceeds_validity".into(), report.exceeds_validity.into()],
            ];
            ctx.written(
                ctx.sink
                    .csv("squeeze.csv", Some(&["quantity", "value"]), &summary)?,
            );
            let rows: Vec<Vec<Cell>> = report
                .modes
                .iter()
                .map(|m| {
                    vec![
                        m.index.into(),
                        m.s.into(),
                        m.r.into(),
                        m.s_db.into(),
                        m.mean_photons.into(),
                    ]
                })
                .collect();
            ctx.written(ctx.sink.csv(
                "squeeze_modes.csv",
                Some(&["index", "s", "r", "s_db", "mean_photons"]),
                &rows,
            )?);
        }
        Format::Json => ctx.written(ctx.sink.json("squeeze.json", &report)?),
    }
    Ok(())
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ScanRow {
    L_mm: f64,
    K: f64,
    eta_jsa: f64,
    eta_pdc_per_W: f64,
    r0: f64,
    S_db: f64,
    validity_flag: bool,
}

#[derive(Serialize)]
struct ScanReport {
    rows: Vec<ScanRow>,
}

pub fn scan(ctx: &Context, args: &ScanArgs) -> CliResult<()> {
    if let Some(bad) = args
        .lengths_mm
        .iter()
        .find(|l| !(l.is_finite() && **l > 0.0))
    {
        return Err(CliError::usage(format!(
            "--lengths-mm entry {bad} must be > 0"
        )));
    }
    let template = ctx.run.pdc_config()?;
    let pump = ctx.run.pump_pulse()?;
    let lengths: Vec<f64> = args.lengths_mm.iter().map(|l| l * MM).collect();
    let results = length_scan(&template, &pump, &lengths, &ctx.run.grid_spec())?;
    let rows: Vec<ScanRow> = results
        .iter()
        .zip(&args.lengths_mm)
        .map(|((_, r), &l_mm)| {
            warn_validity(r);
            ScanRow {
                L_mm: l_mm,
                K: r.schmidt_number,
                eta_jsa: r.eta_jsa,
                eta_pdc_per_W: r.eta_pdc,
                r0: r.r0(),
                S_db: r.s0_db(),
                validity_flag: r.exceeds_validity,
            }
        })
        .collect();
    for r in &rows {
        ctx.emit(format!("L_mm={} S_db={} K={}", r.L_mm, r.S_db, r.K));
    }
    match ctx.sink.format {
        Format::Csv => {
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.L_mm.into(),
                        r.K.into(),
                        r.eta_jsa.into(),
                        r.eta_pdc_per_W.into(),
                        r.r0.into(),
                        r.S_db.into(),
                        r.validity_flag.into(),
                    ]
                })
                .collect();
            ctx.written(ctx.sink.csv(
                "scan.csv",
                Some(&[
                    "L_mm",
                    "K",
                    "eta_jsa",
                    "eta_pdc_per_W",
                    "r0",
                    "S_db",
                    "validity_flag",
                ]),
                &table,
            )?);
        }
        Format::Json => ctx.written(ctx.sink.json("scan.json", &ScanReport { rows })?),
    }
    Ok(())
}
