//! Occlusion geometry and the complete per-player vision map.
//!
//! Every other player's torso — a rotated rectangle seen top-down —
//! blocks part of the observer's view. A pairwise occlusion map is a
//! Gaussian ray cast from the observer through the occluder, scaled so
//! its angular width tracks the occluder's apparent width, masked to the
//! region beyond the occluder, and capped at `alpha`. Pairwise maps
//! combine multiplicatively and the result attenuates the field of view.

use std::f64::consts::{FRAC_PI_3, PI};

use crate::angles::{angle_to, wrap_diff, wrap_diff_bounded};
use crate::error::{Error, Result};
use crate::geom::{distance, Vec2};
use crate::grid::{PitchGrid, Surface, SurfaceKind};
use crate::state::{PlayerId, PlayerState};
use crate::vision::{wedge_columns, FovKernel, VisionParams};

/// Top-down torso rectangle of an occluding player.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyModel {
    pub shoulder_width_m: f64,
    pub torso_depth_m: f64,
}

impl Default for BodyModel {
    fn default() -> Self {
        BodyModel {
            shoulder_width_m: 0.5,
            torso_depth_m: 0.3,
        }
    }
}

impl BodyModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.shoulder_width_m > self.torso_depth_m && self.torso_depth_m > 0.0) {
            return Err(Error::Config(
                "body model requires shoulder_width_m > torso_depth_m > 0".into(),
            ));
        }
        Ok(())
    }

    /// Radius of the circle through the torso corners.
    pub fn circumradius_m(&self) -> f64 {
        let hw = self.shoulder_width_m / 2.0;
        let hd = self.torso_depth_m / 2.0;
        (hw * hw + hd * hd).sqrt()
    }
}

/// Tunables of the occlusion model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcclusionParams {
    /// Maximum probability of obstruction directly behind an occluder.
    pub alpha: f64,
    /// Standard deviation of the occlusion ray, radians.
    pub sigma_q_rad: f64,
    /// Pairs closer than this are skipped; the ray scale degenerates as
    /// the distance approaches zero and physical players cannot overlap.
    pub min_pair_distance_m: f64,
}

impl Default for OcclusionParams {
    fn default() -> Self {
        OcclusionParams {
            alpha: 0.9,
            sigma_q_rad: FRAC_PI_3,
            min_pair_distance_m: 0.3,
        }
    }
}

impl OcclusionParams {
    pub fn validate(&self, body: &BodyModel) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if self.sigma_q_rad <= 0.0 {
            return Err(Error::Config("sigma_q must be positive".into()));
        }
        if self.min_pair_distance_m <= body.circumradius_m() {
            return Err(Error::Config(format!(
                "min_pair_distance_m ({}) must exceed the torso circumradius ({:.4})",
                self.min_pair_distance_m,
                body.circumradius_m()
            )));
        }
        Ok(())
    }
}

/// Geometry of one observer/occluder pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairGeometry {
    pub observer: Vec2,
    pub occluder: Vec2,
    /// Distance between the two players, meters.
    pub delta_m: f64,
    /// Direction from observer through occluder.
    pub ray_angle: f64,
    /// Angle the occluder's torso subtends at the observer.
    pub apparent_width_rad: f64,
    /// Torso corner positions, in the fixed construction order.
    pub corners: [Vec2; 4],
    ray_unit: Vec2,
}

/// Torso corner positions for a player at `center` with shoulder angle
/// `theta_s`: the local corners `(+-w/2, +-d/2)` rotated and translated.
pub fn torso_corners(center: Vec2, theta_s: f64, body: &BodyModel) -> [Vec2; 4] {
    let hw = body.shoulder_width_m / 2.0;
    let hd = body.torso_depth_m / 2.0;
    let local = [
        Vec2::new(hw, hd),
        Vec2::new(-hw, hd),
        Vec2::new(-hw, -hd),
        Vec2::new(hw, -hd),
    ];
    let (s, c) = theta_s.sin_cos();
    local.map(|p| Vec2::new(c * p.x - s * p.y + center.x, s * p.x + c * p.y + center.y))
}

fn corner_pair_angle(a: Vec2, b: Vec2) -> f64 {
    let cos = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
    cos.acos()
}

/// Apparent angular width of an occluder's torso seen from `observer`:
/// the larger of the two angles subtended by opposite torso corners.
///
/// The shoulder angle is reduced modulo pi first; the rectangle is
/// symmetric under a half turn, and the exact reduction keeps the result
/// identical for `theta_s` and `theta_s + pi`.
pub fn apparent_width(
    observer: Vec2,
    occluder: Vec2,
    theta_s: f64,
    body: &BodyModel,
    min_pair_distance_m: f64,
) -> Result<f64> {
    let delta = distance(observer, occluder);
    if delta < min_pair_distance_m {
        return Err(Error::PlayersCoincident {
            distance: delta,
            minimum: min_pair_distance_m,
        });
    }
    let corners = torso_corners(occluder, theta_s.rem_euclid(PI), body);
    let v: Vec<Vec2> = corners.iter().map(|&c| c - observer).collect();
    let theta_13 = corner_pair_angle(v[0], v[2]);
    let theta_24 = corner_pair_angle(v[1], v[3]);
    Ok(theta_13.max(theta_24))
}

/// Build the full pair geometry, or fail for a near-coincident pair.
pub fn pair_geometry(
    observer: Vec2,
    occluder: Vec2,
    theta_s: f64,
    body: &BodyModel,
    params: &OcclusionParams,
) -> Result<PairGeometry> {
    let omega = apparent_width(observer, occluder, theta_s, body, params.min_pair_distance_m)?;
    let delta = distance(observer, occluder);
    let ray_angle = angle_to(observer, occluder)?;
    let ray_unit = (occluder - observer) * (1.0 / delta);
    Ok(PairGeometry {
        observer,
        occluder,
        delta_m: delta,
        ray_angle,
        apparent_width_rad: omega,
        corners: torso_corners(occluder, theta_s.rem_euclid(PI), body),
        ray_unit,
    })
}

/// Ray decay scale: distance over apparent width. Larger means a
/// narrower occlusion shadow.
pub fn occlusion_scale(geometry: &PairGeometry) -> f64 {
    geometry.delta_m / geometry.apparent_width_rad
}

/// Occlusion ray value at a continuous point, without the beyond mask.
/// The observer's own location evaluates to 1 (zero offset by
/// convention; the mask removes it in the assembled pair map).
pub fn occlusion_ray_at(geometry: &PairGeometry, params: &OcclusionParams, point: Vec2) -> f64 {
    let theta_q = match angle_to(geometry.observer, point) {
        Ok(a) => wrap_diff(a, geometry.ray_angle).abs(),
        Err(_) => 0.0,
    };
    let c_q = occlusion_scale(geometry);
    let r = theta_q / params.sigma_q_rad;
    (-(c_q * (r * r))).exp()
}

/// Beyond-occluder mask at a continuous point: 1 when the projection of
/// the point onto the observer-to-occluder ray strictly exceeds the pair
/// distance.
pub fn beyond_mask_at(geometry: &PairGeometry, point: Vec2) -> f64 {
    let d = point - geometry.observer;
    let proj = d.x * geometry.ray_unit.x + d.y * geometry.ray_unit.y;
    if proj > geometry.delta_m {
        1.0
    } else {
        0.0
    }
}

/// One pairwise occlusion value: ray times mask times alpha.
#[inline]
pub fn pair_occlusion_at(geometry: &PairGeometry, params: &OcclusionParams, point: Vec2) -> f64 {
    let d = point - geometry.observer;
    let proj = d.x * geometry.ray_unit.x + d.y * geometry.ray_unit.y;
    if proj <= geometry.delta_m {
        return 0.0;
    }
    let theta_q = match angle_to(geometry.observer, point) {
        Ok(a) => wrap_diff(a, geometry.ray_angle).abs(),
        Err(_) => 0.0,
    };
    let c_q = occlusion_scale(geometry);
    let r = theta_q / params.sigma_q_rad;
    let ray = (-(c_q * (r * r))).exp();
    ray * params.alpha
}

/// Occlusion ray surface over the whole pitch (mask applied separately).
pub fn occlusion_ray(
    player_i: &PlayerState,
    player_j: &PlayerState,
    grid: &PitchGrid,
    body: &BodyModel,
    params: &OcclusionParams,
) -> Result<Surface> {
    let geom = pair_geometry(
        player_i.position,
        player_j.position,
        player_j.shoulder_angle,
        body,
        params,
    )?;
    Ok(Surface::from_fn(*grid, SurfaceKind::Occlusion, |center| {
        occlusion_ray_at(&geom, params, center)
    }))
}

/// Binary beyond-occluder mask surface.
pub fn beyond_mask(observer: Vec2, occluder: Vec2, grid: &PitchGrid, params: &OcclusionParams) -> Result<Surface> {
    let delta = distance(observer, occluder);
    if delta < params.min_pair_distance_m {
        return Err(Error::PlayersCoincident {
            distance: delta,
            minimum: params.min_pair_distance_m,
        });
    }
    let ray_unit = (occluder - observer) * (1.0 / delta);
    Ok(Surface::from_fn(*grid, SurfaceKind::Occlusion, |center| {
        let d = center - observer;
        let proj = d.x * ray_unit.x + d.y * ray_unit.y;
        if proj > delta {
            1.0
        } else {
            0.0
        }
    }))
}

/// Pairwise occlusion surface for one occluder.
pub fn pair_occlusion(
    player_i: &PlayerState,
    player_j: &PlayerState,
    grid: &PitchGrid,
    body: &BodyModel,
    params: &OcclusionParams,
) -> Result<Surface> {
    let geom = pair_geometry(
        player_i.position,
        player_j.position,
        player_j.shoulder_angle,
        body,
        params,
    )?;
    Ok(Surface::from_fn(*grid, SurfaceKind::Occlusion, |center| {
        pair_occlusion_at(&geom, params, center)
    }))
}

/// A surface together with the occluders that were skipped because they
/// sat closer than the minimum pair distance.
#[derive(Clone, Debug)]
pub struct OccludedSurface {
    pub surface: Surface,
    pub skipped_pairs: Vec<PlayerId>,
}

/// Exponent beyond which a pairwise occlusion value is so small that
/// `1 - value` rounds to exactly 1.0 in f64, so the pair can be skipped
/// without changing the combined product in any bit.
const UNITY_FACTOR_EXPONENT: f64 = 38.5;

/// Build sorted pair geometries, reporting skipped (near-coincident)
/// occluders.
fn build_pairs(
    player_i: &PlayerState,
    others: &[&PlayerState],
    body: &BodyModel,
    params: &OcclusionParams,
) -> (Vec<PairGeometry>, Vec<PlayerId>) {
    let mut sorted: Vec<&PlayerState> = others.to_vec();
    sorted.sort_by(|a, b| a.player_id.cmp(&b.player_id));
    let mut geoms = Vec::with_capacity(sorted.len());
    let mut skipped = Vec::new();
    for other in sorted {
        match pair_geometry(
            player_i.position,
            other.position,
            other.shoulder_angle,
            body,
            params,
        ) {
            Ok(g) => geoms.push(g),
            Err(Error::PlayersCoincident { .. }) => skipped.push(other.player_id.clone()),
            Err(_) => skipped.push(other.player_id.clone()),
        }
    }
    (geoms, skipped)
}

#[inline]
fn combined_product(geoms: &[PairGeometry], params: &OcclusionParams, point: Vec2) -> f64 {
    let mut acc = 1.0f64;
    for g in geoms {
        let pair = pair_occlusion_at(g, params, point);
        acc *= 1.0 - pair;
    }
    acc
}

/// Combined visibility at a continuous point: the product over all
/// occluders of one minus their pairwise occlusion.
pub fn combined_visibility_at(
    player_i: &PlayerState,
    others: &[&PlayerState],
    body: &BodyModel,
    params: &OcclusionParams,
    point: Vec2,
) -> f64 {
    let (geoms, _) = build_pairs(player_i, others, body, params);
    combined_product(&geoms, params, point)
}

/// Combined visibility surface. With no occluders this is all ones.
pub fn combined_visibility(
    player_i: &PlayerState,
    others: &[&PlayerState],
    grid: &PitchGrid,
    body: &BodyModel,
    params: &OcclusionParams,
) -> OccludedSurface {
    let (geoms, skipped) = build_pairs(player_i, others, body, params);
    let surface = Surface::from_fn(*grid, SurfaceKind::Occlusion, |center| {
        combined_product(&geoms, params, center)
    });
    OccludedSurface {
        surface,
        skipped_pairs: skipped,
    }
}

/// Complete vision map at a continuous point: combined visibility times
/// field of view.
pub fn vision_map_at(
    player_i: &PlayerState,
    others: &[&PlayerState],
    vision_params: &VisionParams,
    body: &BodyModel,
    occ_params: &OcclusionParams,
    point: Vec2,
) -> Result<f64> {
    let kernel = FovKernel::new(player_i, vision_params)?;
    let fov = kernel.sample(point, vision_params).value;
    let (geoms, _) = build_pairs(player_i, others, body, occ_params);
    Ok(combined_product(&geoms, occ_params, point) * fov)
}

#[derive(Clone, Copy, Default)]
struct WedgeCell {
    index: u32,
    dx: f64,
    dy: f64,
    angle: f64,
    fov: f64,
}

/// Number of angular buckets used to index wedge cells by direction.
const ANGLE_BINS: usize = 256;

#[inline]
fn angle_bin(angle: f64) -> usize {
    let t = (angle + PI) * (ANGLE_BINS as f64 / std::f64::consts::TAU);
    (t as usize).min(ANGLE_BINS - 1)
}

/// Reusable per-thread buffers for the fused vision-map kernel: wedge
/// cells bucketed by direction, with the occlusion accumulator aligned
/// bucket-for-bucket.
struct Scratch {
    cells: Vec<Vec<WedgeCell>>,
    acc: Vec<Vec<f64>>,
}

impl Default for Scratch {
    fn default() -> Self {
        Scratch {
            cells: (0..ANGLE_BINS).map(|_| Vec::new()).collect(),
            acc: (0..ANGLE_BINS).map(|_| Vec::new()).collect(),
        }
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Scratch> = std::cell::RefCell::new(Scratch::default());
}

/// Visit the bins that may contain directions within `half_width` of
/// `center` (conservative superset, padded by one bin on each side).
#[inline]
fn for_angle_window(center: f64, half_width: f64, mut visit_bin: impl FnMut(usize)) {
    let bin_width = std::f64::consts::TAU / ANGLE_BINS as f64;
    let span_bins = (2.0 * half_width / bin_width).ceil() as usize + 2;
    if span_bins >= ANGLE_BINS {
        for b in 0..ANGLE_BINS {
            visit_bin(b);
        }
        return;
    }
    let start = angle_bin(crate::angles::normalize_angle(center - half_width));
    for k in 0..=span_bins {
        visit_bin((start + k) % ANGLE_BINS);
    }
}

/// Complete vision map surface for one player.
///
/// Computes the field of view once, then folds every occluder's ray into
/// the cells inside the wedge. Occluders whose shadow cone cannot reach
/// the wedge are skipped outright; per cell, factors that would round to
/// exactly 1.0 are skipped. Both shortcuts leave the result bit-identical
/// to the plain per-cell evaluation. The cell containing the player is
/// assigned its combined visibility (field of view 1).
pub fn vision_map(
    player_i: &PlayerState,
    others: &[&PlayerState],
    grid: &PitchGrid,
    vision_params: &VisionParams,
    body: &BodyModel,
    occ_params: &OcclusionParams,
) -> Result<OccludedSurface> {
    let kernel = FovKernel::new(player_i, vision_params)?;
    let fov_half = vision_params.fov_total_rad / 2.0;

    SCRATCH.with(|scratch| {
        let mut scratch = scratch.borrow_mut();
        let Scratch { cells, acc } = &mut *scratch;

        for bin in cells.iter_mut() {
            bin.clear();
        }
        for row in 0..grid.height_cells {
            let (lo, hi) = wedge_columns(&kernel, grid, row);
            for col in lo..=hi.min(grid.width_cells - 1) {
                let center = grid.cell_center(col, row);
                let s = kernel.sample(center, vision_params);
                if s.in_wedge {
                    cells[angle_bin(s.angle)].push(WedgeCell {
                        index: grid.index(col, row) as u32,
                        dx: s.dx,
                        dy: s.dy,
                        angle: s.angle,
                        fov: s.value,
                    });
                }
            }
        }

        let (geoms, skipped) = build_pairs(player_i, others, body, occ_params);
        for (bin, a) in cells.iter().zip(acc.iter_mut()) {
            a.clear();
            a.resize(bin.len(), 1.0f64);
        }
        for g in &geoms {
            let c_q = occlusion_scale(g);
            // Angular reach of this occluder's shadow before the factor
            // rounds to 1.0.
            let live = occ_params.sigma_q_rad * (UNITY_FACTOR_EXPONENT / c_q).sqrt();
            let gap = wrap_diff(g.ray_angle, player_i.head_angle).abs();
            if gap - fov_half >= live + 1e-9 {
                continue;
            }
            for_angle_window(g.ray_angle, live, |b| {
                for (cell, a) in cells[b].iter().zip(acc[b].iter_mut()) {
                    let proj = cell.dx * g.ray_unit.x + cell.dy * g.ray_unit.y;
                    if proj <= g.delta_m {
                        continue;
                    }
                    let theta_q = wrap_diff_bounded(cell.angle, g.ray_angle).abs();
                    if theta_q >= live {
                        continue;
                    }
                    let r = theta_q / occ_params.sigma_q_rad;
                    let ray = (-(c_q * (r * r))).exp();
                    let pair = ray * occ_params.alpha;
                    *a *= 1.0 - pair;
                }
            });
        }

        let mut values = vec![0.0f32; grid.cell_count()];
        for (bin, a) in cells.iter().zip(acc.iter()) {
            for (cell, acc_value) in bin.iter().zip(a.iter()) {
                values[cell.index as usize] = (acc_value * cell.fov) as f32;
            }
        }
        if let Some((col, row)) = grid.cell_containing(player_i.position) {
            let center = grid.cell_center(col, row);
            let own = combined_product(&geoms, occ_params, center);
            values[grid.index(col, row)] = (own * 1.0) as f32;
        }

        Ok(OccludedSurface {
            surface: Surface::from_values(*grid, SurfaceKind::Vision, values),
            skipped_pairs: skipped,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Team;
    use crate::vision::field_of_view;

    fn observer(pos: Vec2, head: f64) -> PlayerState {
        PlayerState::stationary("i", Team::Attacking, pos, head)
    }

    fn occluder(id: &str, pos: Vec2, shoulder: f64) -> PlayerState {
        PlayerState::stationary(id, Team::Defending, pos, 0.0).with_shoulder_angle(shoulder)
    }

    #[test]
    fn torso_corners_identity_rotation() {
        let body = BodyModel::default();
        let c = torso_corners(Vec2::ZERO, 0.0, &body);
        assert_eq!(c[0], Vec2::new(0.25, 0.15));
        assert_eq!(c[1], Vec2::new(-0.25, 0.15));
        assert_eq!(c[2], Vec2::new(-0.25, -0.15));
        assert_eq!(c[3], Vec2::new(0.25, -0.15));
    }

    #[test]
    fn torso_corners_quarter_turn() {
        let body = BodyModel::default();
        let c = torso_corners(Vec2::ZERO, std::f64::consts::FRAC_PI_2, &body);
        let expected = [
            Vec2::new(-0.15, 0.25),
            Vec2::new(-0.15, -0.25),
            Vec2::new(0.15, -0.25),
            Vec2::new(0.15, 0.25),
        ];
        for (got, want) in c.iter().zip(&expected) {
            assert!((got.x - want.x).abs() < 1e-12 && (got.y - want.y).abs() < 1e-12);
        }
    }

    #[test]
    fn torso_corners_translate() {
        let body = BodyModel::default();
        let d = Vec2::new(11.5, -3.25);
        let base = torso_corners(Vec2::new(2.0, 3.0), 0.7, &body);
        let moved = torso_corners(Vec2::new(2.0, 3.0) + d, 0.7, &body);
        for (a, b) in base.iter().zip(&moved) {
            assert!(((*a + d).x - b.x).abs() < 1e-12);
            assert!(((*a + d).y - b.y).abs() < 1e-12);
        }
    }

    #[test]
    fn apparent_width_half_turn_invariance_is_exact() {
        let body = BodyModel::default();
        let observer = Vec2::new(-7.0, 2.0);
        let target = Vec2::new(3.0, -1.0);
        // Angles with enough trailing zero bits that adding pi is exact.
        for k in [0u64, 77, 1023, 250_000, 3_000_000] {
            let theta = k as f64 * (1.0 / (1u64 << 20) as f64);
            let w0 = apparent_width(observer, target, theta, &body, 0.3).unwrap();
            let w1 = apparent_width(observer, target, theta + PI, &body, 0.3).unwrap();
            assert_eq!(w0.to_bits(), w1.to_bits());
        }
    }

    #[test]
    fn face_on_wider_than_side_on() {
        let body = BodyModel::default();
        let obs = Vec2::ZERO;
        for delta in [2.0, 5.0, 10.0, 30.0, 50.0] {
            let target = Vec2::new(delta, 0.0);
            // Shoulders perpendicular to the line of sight: face-on.
            let face = apparent_width(obs, target, std::f64::consts::FRAC_PI_2, &body, 0.3).unwrap();
            let side = apparent_width(obs, target, 0.0, &body, 0.3).unwrap();
            assert!(face > side, "delta {delta}: face {face} <= side {side}");
        }
    }

    #[test]
    fn apparent_width_far_field_halves_with_distance() {
        let body = BodyModel::default();
        for delta in [20.0, 30.0, 40.0] {
            let w1 = apparent_width(Vec2::ZERO, Vec2::new(delta, 0.0), 0.4, &body, 0.3).unwrap();
            let w2 = apparent_width(Vec2::ZERO, Vec2::new(2.0 * delta, 0.0), 0.4, &body, 0.3).unwrap();
            assert!((w1 / w2 - 2.0).abs() < 0.02, "ratio {} at delta {delta}", w1 / w2);
        }
    }

    #[test]
    fn coincident_pair_is_an_error() {
        let body = BodyModel::default();
        let err = apparent_width(Vec2::ZERO, Vec2::new(0.1, 0.0), 0.0, &body, 0.3);
        assert!(matches!(err, Err(Error::PlayersCoincident { .. })));
    }

    #[test]
    fn occlusion_scale_is_distance_over_width() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let g = pair_geometry(Vec2::ZERO, Vec2::new(10.0, 0.0), 0.0, &body, &params).unwrap();
        let c = occlusion_scale(&g);
        assert!((c - g.delta_m / g.apparent_width_rad).abs() == 0.0);
        // Doubling distance with the width held fixed doubles the scale.
        let mut g2 = g.clone();
        g2.delta_m *= 2.0;
        assert!((occlusion_scale(&g2) - 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn ray_peaks_on_axis_and_face_on_is_wider() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let on_ray = Vec2::new(20.0, 0.0);
        let off_ray = Vec2::new(20.0, 2.0);
        let side = pair_geometry(Vec2::ZERO, Vec2::new(10.0, 0.0), 0.0, &body, &params).unwrap();
        let face = pair_geometry(
            Vec2::ZERO,
            Vec2::new(10.0, 0.0),
            std::f64::consts::FRAC_PI_2,
            &body,
            &params,
        )
        .unwrap();
        assert_eq!(occlusion_ray_at(&side, &params, on_ray), 1.0);
        assert!(
            occlusion_ray_at(&face, &params, off_ray) > occlusion_ray_at(&side, &params, off_ray)
        );
    }

    #[test]
    fn beyond_mask_region() {
        let params = OcclusionParams::default();
        let grid = PitchGrid::standard();
        let obs = Vec2::new(-20.0, 0.5);
        let occ = Vec2::new(-10.0, 0.5);
        let mask = beyond_mask(obs, occ, &grid, &params).unwrap();
        let at = |p: Vec2| mask.get(grid.cell_containing(p).unwrap().0, grid.cell_containing(p).unwrap().1);
        // Midpoint between the players.
        assert_eq!(at(Vec2::new(-15.0, 0.5)), 0.0);
        // Five meters past the occluder along the ray.
        assert_eq!(at(Vec2::new(-5.0, 0.5)), 1.0);
        // Lateral to the occluder: projection equals delta exactly, so out.
        assert_eq!(at(Vec2::new(-10.0, 3.5)), 0.0);
    }

    #[test]
    fn pair_occlusion_caps_at_alpha_on_the_ray() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(-20.0, 0.5), 0.0);
        let j = occluder("j", Vec2::new(-10.0, 0.5), 0.0);
        let surface = pair_occlusion(&i, &j, &grid, &body, &params).unwrap();
        // Directly behind the occluder on the ray: exactly alpha.
        let (c, r) = grid.cell_containing(Vec2::new(0.0, 0.5)).unwrap();
        assert_eq!(surface.get(c, r), params.alpha as f32);
        // Between the players: zero.
        let (c, r) = grid.cell_containing(Vec2::new(-15.0, 0.5)).unwrap();
        assert_eq!(surface.get(c, r), 0.0);
        assert!(surface.values().iter().all(|&v| v <= params.alpha as f32));
    }

    #[test]
    fn combined_empty_is_all_ones() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::ZERO, 0.0);
        let out = combined_visibility(&i, &[], &grid, &body, &params);
        assert!(out.surface.values().iter().all(|&v| v == 1.0));
        assert!(out.skipped_pairs.is_empty());
    }

    #[test]
    fn combined_single_occluder_is_one_minus_pair() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let i = observer(Vec2::new(-20.0, 3.0), 0.0);
        let j = occluder("j", Vec2::new(-8.0, 1.0), 0.3);
        let geom = pair_geometry(i.position, j.position, j.shoulder_angle, &body, &params).unwrap();
        for point in [Vec2::new(5.0, 0.0), Vec2::new(0.5, -1.5), Vec2::new(-14.0, 2.0)] {
            let combined = combined_visibility_at(&i, &[&j], &body, &params, point);
            let pair = pair_occlusion_at(&geom, &params, point);
            assert_eq!(combined, 1.0 - pair);
        }
    }

    #[test]
    fn two_identical_occluders_square_the_factor() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let i = observer(Vec2::new(-20.0, 0.0), 0.0);
        let j1 = occluder("j1", Vec2::new(-10.0, 0.0), 0.2);
        let j2 = occluder("j2", Vec2::new(-10.0, 0.0), 0.2);
        let geom = pair_geometry(i.position, j1.position, j1.shoulder_angle, &body, &params).unwrap();
        for point in [Vec2::new(0.0, 0.5), Vec2::new(10.0, 3.0)] {
            let combined = combined_visibility_at(&i, &[&j1, &j2], &body, &params, point);
            let q = pair_occlusion_at(&geom, &params, point);
            assert!((combined - (1.0 - q) * (1.0 - q)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_shadowing() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(-30.0, 0.0), 0.0);
        let j1 = occluder("j1", Vec2::new(-20.0, 2.0), 0.4);
        let j2 = occluder("j2", Vec2::new(-15.0, -2.0), 1.2);
        let one = combined_visibility(&i, &[&j1], &grid, &body, &params).surface;
        let two = combined_visibility(&i, &[&j1, &j2], &grid, &body, &params).surface;
        for (a, b) in one.values().iter().zip(two.values()) {
            assert!(b <= a);
        }
    }

    #[test]
    fn order_of_occluders_does_not_matter() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(-30.0, 0.0), 0.0);
        let j1 = occluder("j1", Vec2::new(-20.0, 2.0), 0.4);
        let j2 = occluder("j2", Vec2::new(-12.0, -2.0), 1.2);
        let j3 = occluder("j3", Vec2::new(-5.0, 0.0), 0.0);
        let a = combined_visibility(&i, &[&j1, &j2, &j3], &grid, &body, &params).surface;
        let b = combined_visibility(&i, &[&j3, &j1, &j2], &grid, &body, &params).surface;
        assert_eq!(a, b);
    }

    #[test]
    fn coincident_occluder_is_skipped_and_reported() {
        let params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::ZERO, 0.0);
        let j = occluder("j", Vec2::new(0.1, 0.0), 0.0);
        let out = combined_visibility(&i, &[&j], &grid, &body, &params);
        assert_eq!(out.skipped_pairs, vec![PlayerId::new("j")]);
        assert!(out.surface.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn vision_map_without_occluders_equals_field_of_view() {
        let vision_params = VisionParams::default();
        let occ_params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(4.3, -2.1), 0.7)
            .with_velocity(Vec2::new(2.0, 1.0));
        let map = vision_map(&i, &[], &grid, &vision_params, &body, &occ_params).unwrap();
        let fov = field_of_view(&i, &grid, &vision_params).unwrap();
        assert_eq!(map.surface.values(), fov.values());
    }

    #[test]
    fn occluder_fully_behind_leaves_map_unchanged() {
        let vision_params = VisionParams::default();
        let occ_params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(10.0, 0.0), 0.0);
        let j = occluder("j", Vec2::new(20.0, 0.0), 0.0);
        // The occluder is ahead: it shadows the wedge. Behind instead:
        let j_behind = occluder("j", Vec2::new(0.0, 0.0), 0.0);
        let map = vision_map(&i, &[&j_behind], &grid, &vision_params, &body, &occ_params).unwrap();
        let fov = field_of_view(&i, &grid, &vision_params).unwrap();
        assert_eq!(map.surface.values(), fov.values());
        // Sanity: the occluder ahead does change the map.
        let map2 = vision_map(&i, &[&j], &grid, &vision_params, &body, &occ_params).unwrap();
        assert_ne!(map2.surface.values(), fov.values());
    }

    #[test]
    fn fused_map_matches_continuous_evaluation() {
        let vision_params = VisionParams::default();
        let occ_params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(-12.7, 5.3), 0.4).with_velocity(Vec2::new(1.5, -0.5));
        let j1 = occluder("j1", Vec2::new(-2.0, 6.0), 0.9);
        let j2 = occluder("j2", Vec2::new(5.0, 2.0), -0.6);
        let j3 = occluder("j3", Vec2::new(-14.0, 5.0), 0.0);
        let others = [&j1, &j2, &j3];
        let map = vision_map(&i, &others, &grid, &vision_params, &body, &occ_params).unwrap();
        let own = grid.cell_containing(i.position).unwrap();
        for row in (0..grid.height_cells).step_by(3) {
            for col in (0..grid.width_cells).step_by(3) {
                if (col, row) == own {
                    continue;
                }
                let expected = vision_map_at(
                    &i,
                    &others,
                    &vision_params,
                    &body,
                    &occ_params,
                    grid.cell_center(col, row),
                )
                .unwrap() as f32;
                assert_eq!(map.surface.get(col, row), expected, "cell ({col},{row})");
            }
        }
    }

    #[test]
    fn map_bounded_by_both_factors() {
        let vision_params = VisionParams::default();
        let occ_params = OcclusionParams::default();
        let body = BodyModel::default();
        let grid = PitchGrid::standard();
        let i = observer(Vec2::new(-12.0, 5.0), 0.0);
        let j = occluder("j", Vec2::new(-2.0, 5.0), 0.9);
        let map = vision_map(&i, &[&j], &grid, &vision_params, &body, &occ_params)
            .unwrap()
            .surface;
        let fov = field_of_view(&i, &grid, &vision_params).unwrap();
        let combined = combined_visibility(&i, &[&j], &grid, &body, &occ_params).surface;
        for ((&m, &f), &c) in map.values().iter().zip(fov.values()).zip(combined.values()) {
            assert!(m <= f.min(c) + f32::EPSILON);
        }
    }
}
