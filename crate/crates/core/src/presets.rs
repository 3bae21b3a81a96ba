//! Built-in scenarios, one per reproduced figure.

use crate::array::BitDepth;
use crate::design::{ArraySpec, BeamDesign, BeamSpec, PhaseSpec};
use crate::error::{Error, Result};
use crate::footprint::{AmplitudeWindow, Aperture, Taper};
use crate::propagation::Mode;
use crate::scenario::{GridSpec, MetricSpec, NamedSource, Precision, Probe, Scenario, SourceSpec, UNITS_SENTINEL};
use crate::trajectory::{solve_parabola_through_point, Circle, Parabola, ParabolaUnknown};

const F0: f64 = 150e9;
const BETAS: [f64; 3] = [0.002, 0.01, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const PRESETS: &[PresetInfo] = &[
    PresetInfo { name: "fig1a", description: "ideal Airy beam on a curved trajectory" },
    PresetInfo { name: "fig1b", description: "exponentially tapered Airy beam on a curved trajectory" },
    PresetInfo { name: "fig1c", description: "ideal abruptly autofocusing Airy pair" },
    PresetInfo { name: "fig1d", description: "tapered abruptly autofocusing Airy pair" },
    PresetInfo { name: "fig3a", description: "conventional steered beam toward a receiver" },
    PresetInfo { name: "fig3b", description: "bending beam from a 1 m aperture, vertex at 10 m" },
    PresetInfo { name: "fig4", description: "blockage resilience sweep" },
    PresetInfo { name: "fig5", description: "dynamic blockage avoidance with three beams" },
    PresetInfo { name: "fig6a", description: "interference-free region of a parabolic beam" },
    PresetInfo { name: "fig6b", description: "interference-free region of a circular beam" },
    PresetInfo { name: "fig7a", description: "mirror-symmetric focusing at 10 m" },
    PresetInfo { name: "fig7b", description: "mirror-symmetric focusing at 15 m" },
    PresetInfo { name: "fig8a", description: "three simultaneous beams bending to one side" },
    PresetInfo { name: "fig8b", description: "three simultaneous beams bending to both sides" },
    PresetInfo { name: "fig9a", description: "footprint length 0.5 m" },
    PresetInfo { name: "fig9b", description: "footprint length 0.25 m" },
    PresetInfo { name: "fig9c", description: "footprint length 0.125 m" },
    PresetInfo { name: "fig10a", description: "exponentially tapered footprint" },
    PresetInfo { name: "fig10b", description: "Gaussian footprint centred at x = 0" },
    PresetInfo { name: "fig10c", description: "Gaussian footprint centred at x = -0.5 m" },
    PresetInfo { name: "fig10d", description: "peak power along the trajectory for three footprint shapes" },
    PresetInfo { name: "fig11", description: "k-content versus curvature and a 2-wavelength array" },
    PresetInfo { name: "fig12", description: "phase quantization efficiency" },
    PresetInfo { name: "figA", description: "random and periodic sub-array selection efficiency" },
    PresetInfo { name: "fig13", description: "bending versus operating frequency" },
    PresetInfo { name: "figB", description: "wideband excitation without beam split" },
];

pub fn list_presets() -> &'static [PresetInfo] {
    PRESETS
}

/// Scenario for `name`; an unknown name lists the valid ones.
pub fn preset(name: &str) -> Result<Scenario> {
    let s = match name {
        "fig1a" => airy_fig(name, 0.0, false),
        "fig1b" => airy_fig(name, 4.0, false),
        "fig1c" => airy_fig(name, 0.0, true),
        "fig1d" => airy_fig(name, 4.0, true),
        "fig3a" => fig3a(),
        "fig3b" => fig3b(),
        "fig4" => fig4(),
        "fig5" => fig5()?,
        "fig6a" => fig6a(),
        "fig6b" => fig6b(),
        "fig7a" => fig7(name, 10.0)?,
        "fig7b" => fig7(name, 15.0)?,
        "fig8a" => fig8a(),
        "fig8b" => fig8b(),
        "fig9a" => fig9(name, 0.5),
        "fig9b" => fig9(name, 0.25),
        "fig9c" => fig9(name, 0.125),
        "fig10a" | "fig10b" | "fig10c" | "fig10d" => fig10(name),
        "fig11" => fig11(),
        "fig12" => fig12(),
        "figA" => fig_a(),
        "fig13" => fig13(),
        "figB" => fig_b(),
        _ => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            return Err(Error::Validation {
                path: "preset".into(),
                message: format!("unknown preset `{name}`; valid names: {}", names.join(", ")),
            });
        }
    };
    s.validate()?;
    Ok(s)
}

fn describe(name: &str) -> String {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .map(|p| p.description.to_string())
        .unwrap_or_default()
}

fn base(name: &str, sources: Vec<NamedSource>, z_list_m: Vec<f64>, metrics: Vec<MetricSpec>) -> Scenario {
    Scenario {
        units: UNITS_SENTINEL.into(),
        name: name.into(),
        description: describe(name),
        frequencies_hz: vec![F0],
        mode: Mode::Line,
        sources,
        z_list_m,
        blockers: Vec::new(),
        probes: Vec::new(),
        metrics,
        grid: GridSpec::default(),
        seed: 1,
        precision: Precision::Single,
        write_slices: true,
    }
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

fn parabola(beta: f64, x0: f64, z0: f64) -> Parabola {
    Parabola {
        beta_per_m: beta,
        x0_m: x0,
        z0_m: z0,
    }
}

fn window(lx: f64, taper: Taper) -> AmplitudeWindow {
    AmplitudeWindow {
        taper,
        level_v_per_m: 1.0,
        aperture: Aperture {
            lx_m: lx,
            ly_m: f64::INFINITY,
            x_right_m: 0.0,
        },
    }
}

fn beam(phase: PhaseSpec) -> BeamSpec {
    BeamSpec {
        phase,
        mirror: false,
        weight: None,
        steer_y_rad: 0.0,
    }
}

fn parabolic(p: Parabola, paraxial: bool, extend: bool) -> PhaseSpec {
    PhaseSpec::Parabolic {
        parabola: p,
        paraxial,
        extend,
    }
}

fn design(name: &str, window: AmplitudeWindow, beams: Vec<BeamSpec>) -> NamedSource {
    NamedSource {
        name: name.into(),
        source: SourceSpec::Design(BeamDesign {
            window,
            beams,
            array: None,
        }),
    }
}

fn bending(name: &str, lx: f64, beta: f64) -> NamedSource {
    design(name, window(lx, Taper::Uniform), vec![beam(parabolic(parabola(beta, 0.0, 0.0), true, false))])
}

fn airy_fig(name: &str, alpha: f64, aaf: bool) -> Scenario {
    let (x0, z0) = if aaf { (-0.25, 5.0) } else { (0.0, 0.0) };
    let src = NamedSource {
        name: "airy".into(),
        source: SourceSpec::Airy {
            beta_per_m: 0.002,
            alpha_per_m: alpha,
            x0_m: x0,
            z0_m: z0,
            aaf,
            half_width_m: if alpha > 0.0 { 1.5 } else { 3.0 },
        },
    };
    let metrics = if aaf {
        vec![
            MetricSpec::OnAxis {
                x_m: 0.0,
                z_start_m: 10.0,
                z_stop_m: 20.0,
                count: 1001,
            },
            MetricSpec::CrossSection { z_m: 16.7 },
        ]
    } else {
        vec![MetricSpec::Track, MetricSpec::KContent { z_m: 0.0 }]
    };
    base(name, vec![src], range(1.0, 20.0, 1.0), metrics)
}

fn rx_probe(x: f64, z: f64) -> Probe {
    Probe {
        name: "rx".into(),
        x_m: x,
        z_m: z,
        y_m: 0.0,
        side_m: crate::analysis::PROBE_SIDE_M,
    }
}

fn conventional(name: &str) -> NamedSource {
    // aperture centre at x = −0.05 m aimed at the receiver (0.45, 15)
    design(
        name,
        window(0.1, Taper::Uniform),
        vec![beam(PhaseSpec::Linear {
            angle_rad: (0.5f64 / 15.0).atan(),
        })],
    )
}

fn fig3a() -> Scenario {
    let mut s = base(
        "fig3a",
        vec![conventional("conventional")],
        range(1.0, 16.0, 1.0),
        vec![MetricSpec::Probes, MetricSpec::CrossSection { z_m: 15.0 }],
    );
    s.probes.push(rx_probe(0.45, 15.0));
    s.grid.extra_x_m = (0.0, 0.6);
    s
}

fn fig3b() -> Scenario {
    base(
        "fig3b",
        vec![design(
            "bending",
            window(1.0, Taper::Uniform),
            vec![beam(parabolic(parabola(0.002, 0.0, 10.0), true, false))],
        )],
        range(1.0, 26.0, 1.0),
        vec![MetricSpec::Track, MetricSpec::TubePower { half_width_m: None }],
    )
}

fn fig4() -> Scenario {
    let mut s = base(
        "fig4",
        vec![bending("bending", 1.0, 0.002), conventional("conventional")],
        vec![5.0, 10.0, 15.0],
        vec![
            MetricSpec::Probes,
            MetricSpec::Blockage {
                probe: "rx".into(),
                los_from_m: (0.0, 0.0),
                widths_m: vec![0.1, 0.2, 0.3],
                z_positions_m: range(1.0, 14.0, 0.5),
            },
            MetricSpec::CrossSection { z_m: 15.0 },
        ],
    );
    s.probes.push(rx_probe(0.45, 15.0));
    s.grid.margin_m = Some(1.0);
    s
}

fn fig5() -> Result<Scenario> {
    let mut sources = Vec::new();
    for (i, (beta, x0)) in [(0.012, -0.02), (0.02, -0.2), (0.03, -0.4)].into_iter().enumerate() {
        let p = solve_parabola_through_point(0.45, 0.5, ParabolaUnknown::Z0 { beta_per_m: beta, x0_m: x0 })?;
        sources.push(design(
            &format!("beam{}", i + 1),
            window(1.0, Taper::Uniform),
            vec![beam(parabolic(p, false, false))],
        ));
    }
    let mut s = base("fig5", sources, range(0.05, 1.0, 0.05), vec![MetricSpec::Track, MetricSpec::Probes]);
    s.probes.push(rx_probe(0.45, 0.5));
    Ok(s)
}

fn fig6a() -> Scenario {
    base(
        "fig6a",
        vec![design(
            "parabolic",
            window(1.0, Taper::Uniform),
            vec![beam(parabolic(parabola(0.25, -0.25, 1.0), false, false))],
        )],
        range(0.1, 3.0, 0.1),
        vec![MetricSpec::Track, MetricSpec::CrossSection { z_m: 1.5 }],
    )
}

fn fig6b() -> Scenario {
    let mut s = base(
        "fig6b",
        vec![design(
            "circular",
            window(1.0, Taper::Uniform),
            vec![beam(PhaseSpec::Circular {
                circle: Circle {
                    radius_m: 1.0,
                    center_x_m: -2.0,
                },
                conjugate: true,
            })],
        )],
        range(0.1, 3.0, 0.1),
        vec![MetricSpec::CrossSection { z_m: 1.0 }],
    );
    s.grid.extra_x_m = (2.5, 0.5);
    s
}

fn fig7(name: &str, d_f: f64) -> Result<Scenario> {
    let beta = 0.002;
    let x0 = -0.15;
    // vertex placed with the peak offset neglected
    let z0 = crate::trajectory::z0_for_focal_distance(d_f, x0, beta, 0.0)?;
    let p = parabola(beta, x0, z0);
    let mut mirrored = beam(parabolic(p, false, true));
    mirrored.mirror = true;
    let mut w = window(1.0, Taper::Uniform);
    w.aperture = w.aperture.centered();
    let src = design("focusing", w, vec![beam(parabolic(p, false, true)), mirrored]);
    Ok(base(
        name,
        vec![src],
        range(1.0, d_f + 8.0, 1.0),
        vec![
            MetricSpec::OnAxis {
                x_m: 0.0,
                z_start_m: 1.0,
                z_stop_m: d_f + 8.0,
                count: 801,
            },
            MetricSpec::CrossSection { z_m: d_f },
        ],
    ))
}

fn fig8a() -> Scenario {
    let beams = [(0.005, 0.0, 10.0), (0.005, -0.25, 7.5), (0.005, -0.5, 5.0)]
        .into_iter()
        .map(|(b, x0, z0)| beam(parabolic(parabola(b, x0, z0), false, true)))
        .collect();
    base(
        "fig8a",
        vec![design("multibeam", window(1.0, Taper::Uniform), beams)],
        range(1.0, 20.0, 1.0),
        vec![MetricSpec::Track, MetricSpec::CrossSection { z_m: 10.0 }],
    )
}

fn fig8b() -> Scenario {
    // the second beam bends toward −x: mirror image of a vertex at x = −0.25 m
    let mut second = beam(parabolic(parabola(0.005, -0.25, 5.0), false, true));
    second.mirror = true;
    let beams = vec![
        beam(parabolic(parabola(0.005, -0.5, 10.0), false, true)),
        second,
        beam(parabolic(parabola(0.01, -0.5, 5.0), false, true)),
    ];
    let mut w = window(1.0, Taper::Uniform);
    w.aperture = w.aperture.centered();
    base(
        "fig8b",
        vec![design("multibeam", w, beams)],
        range(1.0, 20.0, 1.0),
        vec![MetricSpec::Track, MetricSpec::CrossSection { z_m: 10.0 }],
    )
}

fn fig9(name: &str, lx: f64) -> Scenario {
    let zm = crate::trajectory::z_max(lx, &parabola(0.002, 0.0, 0.0)).unwrap_or(16.0);
    base(
        name,
        vec![bending("bending", lx, 0.002)],
        range(0.5, 1.4 * zm, 0.5),
        vec![MetricSpec::Track, MetricSpec::TubePower { half_width_m: None }],
    )
}

fn fig10(name: &str) -> Scenario {
    let tapers = [
        ("exponential", Taper::Exponential { alpha_per_m: 4.0 }),
        (
            "gaussian_0",
            Taper::Gaussian {
                sigma_m: 0.4,
                x_center_m: 0.0,
            },
        ),
        (
            "gaussian_m0p5",
            Taper::Gaussian {
                sigma_m: 0.4,
                x_center_m: -0.5,
            },
        ),
    ];
    let pick: Vec<usize> = match name {
        "fig10a" => vec![0],
        "fig10b" => vec![1],
        "fig10c" => vec![2],
        _ => vec![0, 1, 2],
    };
    let sources = pick
        .into_iter()
        .map(|i| {
            design(
                tapers[i].0,
                window(1.0, tapers[i].1),
                vec![beam(parabolic(parabola(0.002, 0.0, 0.0), true, false))],
            )
        })
        .collect();
    base(
        name,
        sources,
        range(0.5, 25.0, 0.5),
        vec![MetricSpec::Track, MetricSpec::TubePower { half_width_m: None }],
    )
}

fn array_source(name: &str, lx: f64, beta: f64, array: ArraySpec) -> NamedSource {
    let mut s = bending(name, lx, beta);
    if let SourceSpec::Design(d) = &mut s.source {
        d.array = Some(array);
    }
    s
}

fn beta_tag(beta: f64) -> String {
    format!("beta{}", format!("{beta}").replace('.', "p"))
}

fn fig11() -> Scenario {
    let mut sources: Vec<NamedSource> = BETAS.iter().map(|&b| bending(&beta_tag(b), 0.5, b)).collect();
    sources.push(array_source(
        "beta0p002_d2lambda",
        0.5,
        0.002,
        ArraySpec {
            spacing_wavelengths: Some(2.0),
            ..ArraySpec::default()
        },
    ));
    base("fig11", sources, range(1.0, 16.0, 1.0), vec![MetricSpec::KContent { z_m: 0.0 }])
}

fn fig12() -> Scenario {
    base(
        "fig12",
        vec![array_source("beta0p002", 0.5, 0.002, ArraySpec::default())],
        vec![4.0, 8.0, 12.0],
        vec![MetricSpec::Quantization {
            bits: (1..=8).collect(),
        }],
    )
}

fn fig_a() -> Scenario {
    let sources = BETAS
        .iter()
        .map(|&b| {
            array_source(
                &beta_tag(b),
                0.5,
                b,
                ArraySpec {
                    spacing_wavelengths: Some(1.0),
                    bit_depth: BitDepth::Continuous,
                    ..ArraySpec::default()
                },
            )
        })
        .collect();
    let mut s = base(
        "figA",
        sources,
        vec![1.0],
        vec![MetricSpec::Subarray {
            fractions: vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5],
            realizations: 100,
            periodic_period: 2,
        }],
    );
    s.write_slices = false;
    s
}

fn fig13() -> Scenario {
    let mut s = base(
        "fig13",
        vec![bending("bending", 0.5, 0.002)],
        vec![15.8],
        vec![MetricSpec::Sweep {
            z_fraction_of_z_max: None,
        }],
    );
    s.frequencies_hz = vec![10e9, 20e9, 30e9, 50e9, 75e9, 100e9, 150e9, 200e9, 300e9];
    s.write_slices = false;
    s
}

fn fig_b() -> Scenario {
    let sources = BETAS.iter().map(|&b| bending(&beta_tag(b), 0.5, b)).collect();
    let mut s = base(
        "figB",
        sources,
        vec![1.0],
        vec![MetricSpec::Sweep {
            z_fraction_of_z_max: Some(1.0 / 1.5),
        }],
    );
    s.frequencies_hz = vec![145e9, 150e9, 155e9];
    s.write_slices = false;
    s
}
