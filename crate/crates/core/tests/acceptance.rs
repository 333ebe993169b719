//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line and
//! then asserts, so `cargo test --test acceptance -- --nocapture` gives a
//! one-line-per-criterion summary.

use std::collections::VecDeque;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use image::RgbaImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cinewisp::config::SceneConfig;
use cinewisp::demo::{demo_config, demo_scene, DEMO_HEIGHT, DEMO_WIDTH};
use cinewisp::diagnose::diagnose_frames;
use cinewisp::extraction::{
    rasterize_between, sharpen_tip, sketch_fill, sketch_fill_all, smooth_contour, split_contour, Side, Stroke,
};
use cinewisp::geometry::{vec2, Vec2};
use cinewisp::manifest::sha256_hex;
use cinewisp::meshing::delaunay::{max_circumcircle_violation, triangulate};
use cinewisp::meshing::{build_mesh, Anchor, Edge, MeshParams, WispClass, WispMesh};
use cinewisp::pipeline::{build_meshes, prepare, render_video_with_workers, Prepared};
use cinewisp::raster::{Mask, ScalarMap};
use cinewisp::scene::StillScene;
use cinewisp::simulation::{accumulate_force, simulate, spring_force, step, MeshState, SimState, TrajectoryDump};
use cinewisp::warping::tps_fit;

// Pinned tolerances.
const EXACT_REL: f64 = 1e-12;
const ANCHOR_ABS: f64 = 1e-12;
const PIN_STEPS: usize = 1000;
const ENERGY_STEPS: usize = 10_000;
const ENERGY_GROWTH: f64 = 2.0;
const ENERGY_MONOTONE_REL: f64 = 1e-9;
const TPS_CONFIGS: usize = 100;
const TPS_INTERP_PX: f64 = 1e-6;
const TPS_SIDE: f64 = 1e-8;
const TPS_AFFINE_WEIGHT: f64 = 1e-8;
const CIRCUMCIRCLE_TOL: f64 = 1e-9;
const POLY_RESIDUAL: f64 = 1e-8;
const HARD_PIXEL_LEVELS: i32 = 1;
const REST_FRAMES: usize = 90;
const QUANTIZATION_MSE: f64 = 1e-9;
const BUDGET_EXACT: Duration = Duration::from_secs(1);
const BUDGET_REST: Duration = Duration::from_secs(30);
const BUDGET_RUN: Duration = Duration::from_secs(120);

fn report(id: &str, ok: bool, detail: impl std::fmt::Display) {
    println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn rel_close(got: f64, want: f64) -> bool {
    if want == 0.0 {
        got.abs() <= EXACT_REL
    } else {
        (got - want).abs() <= EXACT_REL * want.abs()
    }
}

fn vec_close(got: Vec2, want: Vec2) -> bool {
    rel_close(got.x, want.x) && rel_close(got.y, want.y)
}

fn physics(k: f64, g: Vec2, c: f64, dt: f64) -> SceneConfig {
    SceneConfig {
        spring_constant: k,
        gravity: g,
        damping: c,
        dt,
        wind_v0: Vec2::zeros(),
        ..SceneConfig::default()
    }
}

fn spring(xi: Vec2, xj: Vec2, rest: f64) -> WispMesh {
    WispMesh::from_edges(vec![xi, xj], vec![Edge { a: 0, b: 1, rest_length: rest }], vec![])
}

fn scene() -> &'static StillScene {
    static SCENE: OnceLock<StillScene> = OnceLock::new();
    SCENE.get_or_init(|| demo_scene().expect("demo scene"))
}

fn still_config() -> SceneConfig {
    SceneConfig {
        gravity: Vec2::zeros(),
        wind_v0: Vec2::zeros(),
        frame_count: REST_FRAMES,
        ..demo_config()
    }
}

fn dump_of(p: &Prepared) -> TrajectoryDump {
    let text = p.trajectory.to_dump_text(&p.meshes);
    TrajectoryDump::parse(&text, std::path::Path::new("memory")).expect("dump parses")
}

#[test]
fn criterion_1_equation_exactness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    let o = vec2(0.0, 0.0);

    let m = spring(o, vec2(1.0, 0.0), 1.0);
    check("rest spring", vec_close(spring_force(0, &m.vertices, &m, 10.0), vec2(0.0, 0.0)));
    let m = spring(o, vec2(2.0, 0.0), 1.0);
    check("stretched spring", vec_close(spring_force(0, &m.vertices, &m, 10.0), vec2(10.0, 0.0)));
    let m = spring(o, vec2(0.5, 0.0), 1.0);
    check("compressed spring", vec_close(spring_force(0, &m.vertices, &m, 10.0), vec2(-5.0, 0.0)));
    // Off-axis: |d| = 5, rest 2, K = 3 gives 9 along (0.6, 0.8).
    let m = spring(vec2(1.0, 1.0), vec2(4.0, 5.0), 2.0);
    check("oblique spring", vec_close(spring_force(0, &m.vertices, &m, 3.0), vec2(5.4, 7.2)));

    let lone = WispMesh::from_edges(vec![vec2(3.0, 4.0)], vec![], vec![]);
    let s = MeshState::rest(&lone, Vec2::zeros());
    let c = physics(100.0, vec2(0.0, 9.8), 0.0, 0.01);
    check("gravity only", vec_close(accumulate_force(0, &s, &lone, &c), vec2(0.0, 9.8)));
    let rest = spring(o, vec2(3.0, 4.0), 5.0);
    let s = MeshState::rest(&rest, Vec2::zeros());
    let c = physics(100.0, Vec2::zeros(), 0.0, 0.01);
    check("equilibrium", vec_close(accumulate_force(0, &s, &rest, &c), Vec2::zeros()));
    let s = MeshState {
        positions: vec![vec2(3.0, 4.0)],
        velocities: vec![vec2(10.0, 0.0)],
    };
    let c = physics(100.0, Vec2::zeros(), 0.05, 0.01);
    check("damping", vec_close(accumulate_force(0, &s, &lone, &c), vec2(-0.5, 0.0)));

    let lone = WispMesh::from_edges(vec![o], vec![], vec![]);
    let c = physics(100.0, vec2(0.0, 9.8), 0.0, 0.1);
    let s = SimState::rest(std::slice::from_ref(&lone), None, Vec2::zeros());
    let n = step(&s, std::slice::from_ref(&lone), None, &c).expect("step");
    check("step velocity", vec_close(n.meshes[0].velocities[0], vec2(0.0, 0.98)));
    check("step position", vec_close(n.meshes[0].positions[0], vec2(0.0, 0.098)));
    // Spring step: free end at (2, 0), rest 1, K = 10, m = 2, dt = 0.1;
    // a = (-10, 0) / 2, v = (-0.5, 0), x = (1.95, 0).
    let mut sp = spring(o, vec2(2.0, 0.0), 1.0);
    sp.pinned[0] = true;
    let c = SceneConfig {
        mass: 2.0,
        ..physics(10.0, Vec2::zeros(), 0.0, 0.1)
    };
    let s = SimState::rest(std::slice::from_ref(&sp), None, Vec2::zeros());
    let n = step(&s, std::slice::from_ref(&sp), None, &c).expect("step");
    check("spring step velocity", vec_close(n.meshes[0].velocities[1], vec2(-0.5, 0.0)));
    check("spring step position", vec_close(n.meshes[0].positions[1], vec2(1.95, 0.0)));
    check("pinned end", n.meshes[0].positions[0] == o);

    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < BUDGET_EXACT;
    report(
        "1",
        ok,
        format!("equation substitutions, failures {failures:?}, {:.3} s", elapsed.as_secs_f64()),
    );
}

/// Pixels whose color is fully determined by one layer: the matte and
/// face are fully on or off and any hair pixel belongs to a wisp mask.
fn hard_pixels(scene: &StillScene, masks: &[Mask]) -> Vec<(u32, u32)> {
    let (w, h) = (scene.width(), scene.height());
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let a = *scene.hair_matte.get(x, y);
            if a == 0.0 || (a == 1.0 && masks.iter().any(|m| *m.get(x, y))) {
                out.push((x, y));
            }
        }
    }
    out
}

#[test]
fn criterion_2_rest_equilibrium() {
    let scene = scene();
    let start = Instant::now();
    let prepared = prepare(scene, &still_config()).expect("prepare");
    let frames = prepared.render_all().expect("render");
    let elapsed = start.elapsed();

    let identical = frames.iter().all(|f| f.as_raw() == frames[0].as_raw());
    let hard = hard_pixels(scene, &prepared.wisp_masks);
    let mut worst = 0;
    for &(x, y) in &hard {
        let a = frames[0].get_pixel(x, y).0;
        let b = scene.image.get_pixel(x, y).0;
        for c in 0..3 {
            worst = worst.max((a[c] as i32 - b[c] as i32).abs());
        }
    }
    let ok = frames.len() == REST_FRAMES
        && identical
        && worst <= HARD_PIXEL_LEVELS
        && elapsed < BUDGET_REST
        && (scene.width(), scene.height()) == (DEMO_WIDTH, DEMO_HEIGHT);
    report(
        "2",
        ok,
        format!(
            "{} frames identical: {identical}, max deviation {worst} levels over {} hard pixels, {} wisps, {:.1} s",
            frames.len(),
            hard.len(),
            scene.wisp_masks.len(),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_pinned_and_anchored() {
    let scene = scene();
    let config = demo_config();
    let (meshes, aux) = build_meshes(scene, &scene.wisp_masks, &config).expect("meshes");
    let aux = aux.expect("demo has unconnected wisps");

    // Rebind every unconnected wisp to the aux vertex nearest its anchored
    // vertex with unit weight.
    let mut meshes = meshes;
    let mut unit = Vec::new();
    for (k, m) in meshes.iter_mut().enumerate() {
        if let Some(a) = m.anchor {
            let p = m.vertices[a.vertex];
            let j = (0..aux.vertex_count())
                .min_by(|&i, &j| {
                    (aux.vertices[i] - p)
                        .norm()
                        .total_cmp(&(aux.vertices[j] - p).norm())
                })
                .expect("aux has vertices");
            m.anchor = Some(Anchor {
                vertex: a.vertex,
                aux_triangle: None,
                aux_vertices: [j, j, j],
                weights: [1.0, 0.0, 0.0],
            });
            unit.push((k, a.vertex, j));
        }
    }

    let mut state = SimState::rest(&meshes, Some(&aux), config.wind_v0);
    let mut pin_ok = true;
    let mut worst_anchor: f64 = 0.0;
    let mut aux_moved: f64 = 0.0;
    for _ in 0..PIN_STEPS {
        state = step(&state, &meshes, Some(&aux), &config).expect("step");
        for (m, s) in meshes.iter().zip(&state.meshes) {
            for i in 0..m.vertex_count() {
                if m.pinned[i] && s.positions[i] != m.vertices[i] {
                    pin_ok = false;
                }
            }
        }
        let aux_state = state.aux.as_ref().expect("aux state");
        for &(k, i, j) in &unit {
            let wisp_disp = state.meshes[k].positions[i] - meshes[k].vertices[i];
            let aux_disp = aux_state.positions[j] - aux.vertices[j];
            worst_anchor = worst_anchor.max((wisp_disp - aux_disp).amax());
            aux_moved = aux_moved.max(aux_disp.norm());
        }
    }
    let pinned: usize = meshes.iter().map(|m| m.pinned_count()).sum();
    let connected = meshes.iter().filter(|m| m.class == WispClass::ScalpConnected).count();
    let ok = pin_ok && pinned > 0 && !unit.is_empty() && aux_moved > 1.0 && worst_anchor <= ANCHOR_ABS;
    report(
        "3",
        ok,
        format!(
            "{pinned} pinned vertices in {connected} wisps static over {PIN_STEPS} steps: {pin_ok}; \
             {} unit anchors, max deviation {worst_anchor:.2e} px while aux moved {aux_moved:.1} px",
            unit.len()
        ),
    );
}

/// One pinned end, one free end with initial stretch; returns the
/// discrete energy before every step and after the last.
fn spring_energies(c: f64) -> Vec<f64> {
    let (k, m, rest, stretch) = (100.0, 1.0, 10.0, 3.0);
    let mut mesh = spring(vec2(0.0, 0.0), vec2(rest + stretch, 0.0), rest);
    mesh.pinned[0] = true;
    let config = SceneConfig {
        mass: m,
        ..physics(k, Vec2::zeros(), c, 0.5 * (m / k).sqrt())
    };
    let energy = |s: &MeshState| {
        let l = (s.positions[1] - s.positions[0]).norm();
        0.5 * m * s.velocities[1].norm_squared() + 0.5 * k * (l - rest) * (l - rest)
    };
    let mut s = SimState::rest(std::slice::from_ref(&mesh), None, Vec2::zeros());
    let mut out = vec![energy(&s.meshes[0])];
    for _ in 0..ENERGY_STEPS {
        s = step(&s, std::slice::from_ref(&mesh), None, &config).expect("step");
        out.push(energy(&s.meshes[0]));
    }
    out
}

#[test]
fn criterion_4a_undamped_energy_bounded() {
    let e = spring_energies(0.0);
    let peak = e.iter().cloned().fold(0.0, f64::max);
    let ratio = peak / e[0];
    report(
        "4a",
        ratio <= ENERGY_GROWTH,
        format!("c=0, peak/initial energy {ratio:.4} over {ENERGY_STEPS} steps"),
    );
}

#[test]
fn criterion_4b_damped_energy_non_increasing() {
    let e = spring_energies(0.05);
    let rises: Vec<usize> = e
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] * (1.0 + ENERGY_MONOTONE_REL))
        .map(|(i, _)| i + 1)
        .collect();
    let worst = e
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    report(
        "4b",
        rises.is_empty(),
        format!(
            "c=0.05, energy rose on {} of {ENERGY_STEPS} steps, worst relative rise {worst:.3e}, first at {:?}",
            rises.len(),
            rises.first()
        ),
    );
}

/// Random controls at least 2 px apart, not all on one line.
fn random_controls(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    loop {
        let n = rng.gen_range(4..40);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| vec2(rng.gen_range(0.0..512.0), rng.gen_range(0.0..770.0)))
            .collect();
        let spread = pts.iter().enumerate().all(|(i, p)| {
            pts[..i].iter().all(|q| (p - q).norm() >= 2.0)
        });
        let area = pts
            .iter()
            .skip(2)
            .map(|p| cinewisp::geometry::signed_area2(&pts[0], &pts[1], p).abs())
            .fold(0.0, f64::max);
        if spread && area > 100.0 {
            return pts;
        }
    }
}

#[test]
fn criterion_5_tps_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let (mut interp, mut side, mut radial) = (0.0f64, 0.0f64, 0.0f64);
    let mut degenerate = 0;
    for _ in 0..TPS_CONFIGS {
        let src = random_controls(&mut rng);
        let dst: Vec<Vec2> = src
            .iter()
            .map(|p| p + vec2(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)))
            .collect();
        let model = tps_fit(&src, &dst, 0.0).expect("fit");
        degenerate += model.is_degenerate() as usize;
        for (p, q) in src.iter().zip(&dst) {
            interp = interp.max((model.eval(*p) - q).norm());
        }
        for r in model.side_condition_residuals() {
            side = side.max(r.amax());
        }

        let a = nalgebra::Matrix2::new(
            rng.gen_range(0.8..1.2),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(0.8..1.2),
        );
        let b = vec2(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0));
        let affine: Vec<Vec2> = src.iter().map(|p| a * p + b).collect();
        let model = tps_fit(&src, &affine, 0.0).expect("affine fit");
        radial = radial.max(model.max_radial_weight());
    }
    let ok = interp <= TPS_INTERP_PX && side <= TPS_SIDE && radial <= TPS_AFFINE_WEIGHT && degenerate == 0;
    report(
        "5",
        ok,
        format!(
            "{TPS_CONFIGS} configs: interpolation {interp:.2e} px, side conditions {side:.2e}, \
             affine radial weights {radial:.2e}, fallbacks {degenerate}"
        ),
    );
}

#[test]
fn criterion_6_delaunay_and_euler_count() {
    let scene = scene();
    let config = demo_config();
    let (meshes, aux) = build_meshes(scene, &scene.wisp_masks, &config).expect("meshes");
    let mut worst: f64 = 0.0;
    let mut triangles = 0;
    for m in meshes.iter().chain(aux.iter()) {
        worst = worst.max(max_circumcircle_violation(&m.vertices, &m.triangles));
        triangles += m.triangles.len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let n = rng.gen_range(3..200);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| vec2(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
            .collect();
        let tris = triangulate(&pts);
        worst = worst.max(max_circumcircle_violation(&pts, &tris));
        triangles += tris.len();
    }
    // Regular lattice: every cell cocircular.
    let lattice: Vec<Vec2> = (0..100).map(|i| vec2((i % 10) as f64, (i / 10) as f64)).collect();
    let tris = triangulate(&lattice);
    worst = worst.max(max_circumcircle_violation(&lattice, &tris));

    let rect = Mask::new(60, 60, true);
    let mesh = build_mesh(
        &rect,
        &MeshParams {
            boundary_points: false,
            ..MeshParams::new(6)
        },
    )
    .expect("rectangle mesh");
    let lo = mesh.vertices.iter().fold(vec2(f64::MAX, f64::MAX), |a, p| a.inf(p));
    let hi = mesh.vertices.iter().fold(vec2(f64::MIN, f64::MIN), |a, p| a.sup(p));
    let on_hull = |p: &Vec2| p.x == lo.x || p.x == hi.x || p.y == lo.y || p.y == hi.y;
    let v = mesh.vertex_count();
    let b = mesh.vertices.iter().filter(|p| on_hull(p)).count();
    let euler = 2 * v - 2 - b;
    let ok = worst <= CIRCUMCIRCLE_TOL && v == 49 && b == 24 && mesh.triangles.len() == euler && euler == 72;
    report(
        "6",
        ok,
        format!(
            "worst circumcircle violation {worst:.2e} over {triangles} triangles; rectangle V={v} B={b} \
             T={} vs Euler {euler}",
            mesh.triangles.len()
        ),
    );
}

/// Straightforward flood fill used as the oracle for the sketch fill:
/// reserve every stroke's column first, then grow each stroke in order.
fn oracle_fill(w: usize, h: usize, columns: &[usize]) -> Vec<Vec<String>> {
    let mut owner = vec![vec![None; w]; h];
    for (k, &c) in columns.iter().enumerate() {
        for row in owner.iter_mut() {
            if row[c].is_none() {
                row[c] = Some(k);
            }
        }
    }
    for (k, &c) in columns.iter().enumerate() {
        let mut queue: VecDeque<(usize, usize)> = (0..h).filter(|&y| owner[y][c] == Some(k)).map(|y| (c, y)).collect();
        while let Some((x, y)) = queue.pop_front() {
            let mut next = vec![(x + 1, y), (x, y + 1)];
            if y > 0 {
                next.push((x, y - 1));
            }
            for (nx, ny) in next {
                if nx < w && ny < h && owner[ny][nx].is_none() {
                    owner[ny][nx] = Some(k);
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    (0..columns.len())
        .map(|k| {
            (0..h)
                .map(|y| (0..w).map(|x| if owner[y][x] == Some(k) { '#' } else { '.' }).collect())
                .collect()
        })
        .collect()
}

fn render(m: &Mask) -> Vec<String> {
    (0..m.height())
        .map(|y| (0..m.width()).map(|x| if *m.get(x, y) { '#' } else { '.' }).collect())
        .collect()
}

fn column_stroke(x: f64, h: u32) -> Stroke {
    Stroke::new(vec![vec2(x, 0.0), vec2(x, (h - 1) as f64)])
}

fn row_widths(m: &Mask) -> Vec<usize> {
    (0..m.height())
        .map(|y| (0..m.width()).filter(|&x| *m.get(x, y)).count())
        .filter(|&n| n > 0)
        .collect()
}

#[test]
fn criterion_7_extraction() {
    let mut failures = Vec::new();
    let matte = ScalarMap::new(5, 5, 1.0);

    let one = sketch_fill(&column_stroke(2.0, 5), &matte).expect("fill");
    if render(&one) != vec!["..###"; 5] || render(&one) != oracle_fill(5, 5, &[2])[0] || one.count() != 15 {
        failures.push("single stroke");
    }
    let edge = sketch_fill(&column_stroke(4.0, 5), &matte).expect("fill");
    if render(&edge) != vec!["....#"; 5] || render(&edge) != oracle_fill(5, 5, &[4])[0] {
        failures.push("rightmost stroke");
    }
    let two = sketch_fill_all(&[column_stroke(1.0, 5), column_stroke(3.0, 5)], &matte).expect("fill");
    let want = oracle_fill(5, 5, &[1, 3]);
    if render(&two[0]) != vec![".##.."; 5] || render(&two[1]) != vec!["...##"; 5] || render(&two[0]) != want[0] || render(&two[1]) != want[1] {
        failures.push("two strokes");
    }

    // Polynomials of degree <= 3 in y, sampled along a wisp.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for degree in 0..=3usize {
        for _ in 0..25 {
            let coeffs: Vec<f64> = (0..=degree)
                .map(|i| rng.gen_range(-1.0..1.0) * 10f64.powi(-(2 * i as i32)) * 50.0)
                .collect();
            let y0 = rng.gen_range(0.0..300.0);
            let samples: Vec<Vec2> = (0..60)
                .map(|i| {
                    let y = y0 + 3.0 * i as f64;
                    vec2(coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c), y)
                })
                .collect();
            let curve = smooth_contour(&samples, 3).expect("fit");
            for p in &samples {
                worst = worst.max((curve.eval(p.y) - p.x).abs());
            }
        }
    }
    if worst >= POLY_RESIDUAL {
        failures.push("polynomial residual");
    }

    let rect = Mask::from_fn(30, 30, |x, y| (5..15).contains(&x) && (4..24).contains(&y));
    let pair = split_contour(&rect).expect("split");
    let left = smooth_contour(&pair.row_samples(Side::Left), 3).expect("left");
    let right = smooth_contour(&pair.row_samples(Side::Right), 3).expect("right");
    let w = row_widths(&sharpen_tip(&rect, &left, &right, 0.15, 0.2));
    if w.len() != 20 || w[..17].iter().any(|&n| n != 10) || w[19] != 2 {
        failures.push("short tip endpoints");
    }
    // Tip of 10 rows below row 9: row j has width 10 * (1 - 0.8 j / 10).
    let w = row_widths(&sharpen_tip(&rect, &left, &right, 0.5, 0.2));
    let ramp: Vec<usize> = (0..=10).map(|j| (10.0 * (1.0 - 0.08 * j as f64)).round() as usize).collect();
    if w[9] != ramp[0] || w[14] != ramp[5] || w[14] != 6 || w[19] != ramp[10] {
        failures.push("half tip ramp");
    }
    let smoothed = rasterize_between(30, 30, 4, 23, &left, &right);
    if sharpen_tip(&rect, &left, &right, 0.3, 1.0) != smoothed {
        failures.push("unit ratio identity");
    }

    report(
        "7",
        failures.is_empty(),
        format!("sketch fill, smoothing residual {worst:.2e}, tip ramp; failures {failures:?}"),
    );
}

fn digests(frames: &[RgbaImage]) -> Vec<String> {
    frames.iter().map(|f| sha256_hex(f.as_raw())).collect()
}

#[test]
fn criterion_8_determinism_across_workers() {
    let scene = scene();
    let config = demo_config();
    let start = Instant::now();
    let one = render_video_with_workers(scene, &config, 1).expect("one worker");
    let t1 = start.elapsed();
    let start = Instant::now();
    let two = render_video_with_workers(scene, &config, 2).expect("two workers");
    let t2 = start.elapsed();
    let (a, b) = (digests(&one), digests(&two));
    let moving = one.iter().any(|f| f.as_raw() != one[0].as_raw());
    let ok = a.len() == config.frame_count && a == b && moving && t1 < BUDGET_RUN && t2 < BUDGET_RUN;
    report(
        "8",
        ok,
        format!(
            "{} frames, digests equal: {}, motion present: {moving}, {:.1} s with 1 worker, {:.1} s with 2",
            a.len(),
            a == b,
            t1.as_secs_f64(),
            t2.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_9_diagnostics() {
    let scene = scene();
    let still = prepare(scene, &SceneConfig { frame_count: 12, ..still_config() }).expect("still");
    let still_report = diagnose_frames(&still.render_all().expect("render"), &dump_of(&still)).expect("diagnose");
    let zero = still_report
        .short_term
        .iter()
        .chain(&still_report.long_term)
        .all(|&e| e <= QUANTIZATION_MSE);

    let moving = prepare(scene, &demo_config()).expect("moving");
    let frames = moving.render_all().expect("render");
    let r = diagnose_frames(&frames, &dump_of(&moving)).expect("diagnose");
    let t = frames.len();
    let complete = r.short_term.len() == t - 1 && r.long_term.len() == t - 1;
    let peak = r.max_displacement.iter().cloned().fold(0.0, f64::max);
    let mean = r.short_term.iter().sum::<f64>() / r.short_term.len() as f64;
    let ok = zero && complete && r.is_finite() && peak > 1.0;
    report(
        "9",
        ok,
        format!(
            "zero-motion errors within {QUANTIZATION_MSE:e}: {zero}; moving run {} pairs finite: {}, \
             mean short-term MSE {mean:.2}, peak displacement {peak:.1} px",
            r.short_term.len(),
            r.is_finite()
        ),
    );
}

#[test]
fn moving_run_matches_a_direct_simulation() {
    // The trajectory behind criterion 8 and 9 is the plain simulation of
    // the meshes the pipeline built.
    let scene = scene();
    let config = SceneConfig { frame_count: 6, ..demo_config() };
    let p = prepare(scene, &config).expect("prepare");
    let direct = simulate(&p.meshes, p.aux.as_ref(), &config).expect("simulate");
    assert_eq!(direct, p.trajectory);
}
