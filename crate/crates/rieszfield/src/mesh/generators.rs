//! Mesh generators for the built-in domains: unit interval, cylinder,
//! icosphere, and unit disk (optionally with circular holes).

use std::collections::HashMap;

use nalgebra::Point3;

use super::Mesh;
use crate::error::{Error, Result};

/// n equally spaced vertices on [0,1] along the x-axis.
pub fn generate_interval(n: usize) -> Result<Mesh> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "interval needs n >= 3 vertices, got {n}"
        )));
    }
    let h = 1.0 / (n - 1) as f64;
    let vertices = (0..n)
        .map(|i| Point3::new(i as f64 * h, 0.0, 0.0))
        .collect();
    Mesh::from_polyline(vertices)
}

/// Triangulated cylinder of radius 1 and axis length `length`, with
/// `n_circ` vertices per ring and `n_len` rings. The two end rings are the
/// boundary.
pub fn generate_cylinder(length: f64, n_circ: usize, n_len: usize) -> Result<Mesh> {
    if !(length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cylinder length must be > 0, got {length}"
        )));
    }
    if n_circ < 8 || n_len < 4 {
        return Err(Error::InvalidParameter(format!(
            "cylinder needs n_circ >= 8 and n_len >= 4, got {n_circ} / {n_len}"
        )));
    }
    let mut vertices = Vec::with_capacity(n_circ * n_len);
    for r in 0..n_len {
        let z = length * r as f64 / (n_len - 1) as f64;
        for j in 0..n_circ {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_circ as f64;
            vertices.push(Point3::new(theta.cos(), theta.sin(), z));
        }
    }
    let idx = |r: usize, j: usize| r * n_circ + (j % n_circ);
    let mut faces = Vec::with_capacity(2 * n_circ * (n_len - 1));
    for r in 0..n_len - 1 {
        for j in 0..n_circ {
            faces.push([idx(r, j), idx(r, j + 1), idx(r + 1, j)]);
            faces.push([idx(r + 1, j), idx(r, j + 1), idx(r + 1, j + 1)]);
        }
    }
    Mesh::from_triangles(vertices, faces)
}

/// Icosphere: icosahedron subdivided `subdivisions` times, vertices
/// projected onto the unit sphere. Vertex count is 10*4^s + 2.
pub fn generate_sphere(subdivisions: usize) -> Result<Mesh> {
    if subdivisions < 1 {
        return Err(Error::InvalidParameter(
            "sphere needs subdivisions >= 1".into(),
        ));
    }
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|p| normalize(Point3::new(p[0], p[1], p[2])))
    .collect();

    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for (e, (a, b)) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
                .into_iter()
                .enumerate()
            {
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let p = Point3::from((vertices[a].coords + vertices[b].coords) / 2.0);
                    vertices.push(normalize(p));
                    vertices.len() - 1
                });
            }
            new_faces.push([f[0], mid[0], mid[2]]);
            new_faces.push([f[1], mid[1], mid[0]]);
            new_faces.push([f[2], mid[2], mid[1]]);
            new_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = new_faces;
    }
    Mesh::from_triangles(vertices, faces)
}

fn normalize(p: Point3<f64>) -> Point3<f64> {
    Point3::from(p.coords / p.coords.norm())
}

/// Planar unit disk in the z=0 plane, optionally with circular holes
/// removed. `n_rings` sets the resolution: the lattice spacing is
/// 1/n_rings. Hole rims and the outer rim become the boundary.
///
/// Built on an equilateral triangular lattice clipped to the domain;
/// boundary vertices are then snapped onto the nearest circle so the rims
/// follow the true geometry.
pub fn generate_disk(n_rings: usize, holes: &[([f64; 2], f64)]) -> Result<Mesh> {
    if n_rings < 2 {
        return Err(Error::InvalidParameter(
            "disk needs n_rings >= 2".into(),
        ));
    }
    for (i, &(c, r)) in holes.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "hole {i} has non-positive radius {r}"
            )));
        }
        let dist = (c[0] * c[0] + c[1] * c[1]).sqrt();
        if dist + r >= 1.0 {
            return Err(Error::InvalidGeometry(format!(
                "hole {i} is not strictly inside the unit disk"
            )));
        }
        for (j, &(c2, r2)) in holes.iter().enumerate().skip(i + 1) {
            let d = ((c[0] - c2[0]).powi(2) + (c[1] - c2[1]).powi(2)).sqrt();
            if d <= r + r2 {
                return Err(Error::InvalidGeometry(format!(
                    "holes {i} and {j} overlap"
                )));
            }
        }
    }

    let h = 1.0 / n_rings as f64;
    let row_height = h * 3.0_f64.sqrt() / 2.0;
    let n_rows = (2.0 / row_height).ceil() as i64 + 2;
    let n_cols = (2.0 / h).ceil() as i64 + 2;

    let inside = |x: f64, y: f64| -> bool {
        if x * x + y * y >= 1.0 {
            return false;
        }
        holes
            .iter()
            .all(|&(c, r)| (x - c[0]).powi(2) + (y - c[1]).powi(2) > r * r)
    };

    // Lattice vertices inside the domain, indexed by (row, col).
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut positions: Vec<[f64; 2]> = Vec::new();
    for row in -n_rows..=n_rows {
        let y = row as f64 * row_height;
        let offset = if row.rem_euclid(2) == 1 { h / 2.0 } else { 0.0 };
        for col in -n_cols..=n_cols {
            let x = col as f64 * h + offset;
            if inside(x, y) {
                index.insert((row, col), positions.len());
                positions.push([x, y]);
            }
        }
    }

    // Two lattice triangles per (row, col) cell; keep those fully inside.
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut tri = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        if let (Some(&ia), Some(&ib), Some(&ic)) = (index.get(&a), index.get(&b), index.get(&c)) {
            faces.push([ia, ib, ic]);
        }
    };
    for row in -n_rows..n_rows {
        for col in -n_cols..n_cols {
            if row.rem_euclid(2) == 0 {
                tri((row, col), (row, col + 1), (row + 1, col));
                tri((row, col + 1), (row + 1, col + 1), (row + 1, col));
            } else {
                tri((row, col), (row, col + 1), (row + 1, col + 1));
                tri((row, col), (row + 1, col + 1), (row + 1, col));
            }
        }
    }
    if faces.is_empty() {
        return Err(Error::InvalidGeometry(
            "disk resolution too coarse for the requested holes".into(),
        ));
    }

    // Drop vertices not used by any kept triangle.
    let mut remap = vec![usize::MAX; positions.len()];
    let mut used_positions: Vec<[f64; 2]> = Vec::new();
    for f in &mut faces {
        for v in f.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = used_positions.len();
                used_positions.push(positions[*v]);
            }
            *v = remap[*v];
        }
    }

    // Find mesh-boundary vertices (on an edge with exactly one face) and
    // snap them onto the nearest domain circle.
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut on_rim = vec![false; used_positions.len()];
    for (&(a, b), &n) in &edge_count {
        if n == 1 {
            on_rim[a] = true;
            on_rim[b] = true;
        }
    }
    let snapped: Vec<[f64; 2]> = used_positions
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if on_rim[i] {
                snap_to_nearest_circle(p, holes, h)
            } else {
                p
            }
        })
        .collect();

    // Revert snaps that would crush a triangle or shorten an edge enough
    // to hurt mesh uniformity. Reverting one endpoint can expose another
    // short edge, so iterate to a fixed point (reverts are monotone).
    let min_area = 0.05 * 3.0_f64.sqrt() / 4.0 * h * h;
    let min_edge = 0.5 * h;
    let mut final_pos = snapped;
    loop {
        let mut changed = false;
        let revert = |v: usize, pos: &mut Vec<[f64; 2]>| -> bool {
            if pos[v] != used_positions[v] {
                pos[v] = used_positions[v];
                true
            } else {
                false
            }
        };
        for &(a, b) in edge_count.keys() {
            let dx = final_pos[a][0] - final_pos[b][0];
            let dy = final_pos[a][1] - final_pos[b][1];
            if (dx * dx + dy * dy).sqrt() < min_edge {
                let disp = |v: usize| {
                    let d = [
                        final_pos[v][0] - used_positions[v][0],
                        final_pos[v][1] - used_positions[v][1],
                    ];
                    (d[0] * d[0] + d[1] * d[1]).sqrt()
                };
                let (first, second) = if disp(a) >= disp(b) { (a, b) } else { (b, a) };
                changed |= revert(first, &mut final_pos) || revert(second, &mut final_pos);
            }
        }
        for f in &faces {
            let area = {
                let (a, b, c) = (final_pos[f[0]], final_pos[f[1]], final_pos[f[2]]);
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
            };
            if area < min_area {
                for &v in f {
                    changed |= revert(v, &mut final_pos);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let vertices = final_pos
        .into_iter()
        .map(|p| Point3::new(p[0], p[1], 0.0))
        .collect();
    Mesh::from_triangles(vertices, faces)
}

fn snap_to_nearest_circle(p: [f64; 2], holes: &[([f64; 2], f64)], h: f64) -> [f64; 2] {
    let mut best = p;
    let mut best_gap = f64::INFINITY;
    let norm = (p[0] * p[0] + p[1] * p[1]).sqrt();
    if norm > 0.0 {
        let gap = (1.0 - norm).abs();
        if gap < best_gap {
            best_gap = gap;
            best = [p[0] / norm, p[1] / norm];
        }
    }
    for &(c, r) in holes {
        let dx = p[0] - c[0];
        let dy = p[1] - c[1];
        let d = (dx * dx + dy * dy).sqrt();
        if d > 0.0 {
            let gap = (d - r).abs();
            if gap < best_gap {
                best_gap = gap;
                best = [c[0] + dx / d * r, c[1] + dy / d * r];
            }
        }
    }
    // Snapping much further than half a lattice cell would distort the
    // mesh (an incident edge can stretch by the snap distance).
    if best_gap > 0.45 * h {
        return p;
    }
    best
}

/// Ring count giving axial spacing close to the circumferential spacing,
/// so cylinder meshes stay uniform at default settings.
pub fn cylinder_default_rings(length: f64, n_circ: usize) -> usize {
    let rings = (length * n_circ as f64 / (2.0 * std::f64::consts::PI)).round() as usize + 1;
    rings.max(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_n3() {
        let m = generate_interval(3).unwrap();
        assert_eq!(m.n_vertices(), 3);
        assert_eq!(m.edges().len(), 2);
        let xs: Vec<f64> = m.vertices().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        assert!(m.is_boundary(0) && m.is_boundary(2) && !m.is_boundary(1));
        assert_eq!(m.dim(), 1);
    }

    #[test]
    fn interval_weights_telescope() {
        let m = generate_interval(101).unwrap();
        assert!((m.total_weight() - 1.0).abs() < 1e-12);
        assert!((m.vertex_weights()[0] - 0.005).abs() < 1e-15);
        assert!((m.vertex_weights()[50] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn interval_too_small() {
        assert_eq!(
            generate_interval(2).unwrap_err().category(),
            "invalid-parameter"
        );
    }

    #[test]
    fn cylinder_counts() {
        let m = generate_cylinder(1.0, 8, 4).unwrap();
        assert_eq!(m.n_vertices(), 32);
        assert_eq!(m.n_boundary_vertices(), 16);
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn cylinder_lateral_area() {
        let m = generate_cylinder(1.0, 32, 16).unwrap();
        let analytic = 2.0 * std::f64::consts::PI;
        assert!((m.total_weight() - analytic).abs() / analytic < 0.05);
    }

    #[test]
    fn cylinder_bad_params() {
        assert_eq!(
            generate_cylinder(0.0, 8, 4).unwrap_err().category(),
            "invalid-parameter"
        );
        assert_eq!(
            generate_cylinder(1.0, 7, 4).unwrap_err().category(),
            "invalid-parameter"
        );
    }

    #[test]
    fn sphere_subdivision_counts() {
        for s in 1..=3 {
            let m = generate_sphere(s).unwrap();
            assert_eq!(m.n_vertices(), 10 * 4usize.pow(s as u32) + 2);
            assert!(m.is_closed());
        }
    }

    #[test]
    fn sphere_area_converges() {
        let m = generate_sphere(3).unwrap();
        let analytic = 4.0 * std::f64::consts::PI;
        assert!((m.total_weight() - analytic).abs() / analytic < 0.02);
    }

    #[test]
    fn disk_with_holes_boundary() {
        let holes = [([0.4, 0.0], 0.15), ([-0.3, 0.3], 0.15), ([-0.1, -0.4], 0.15)];
        let m = generate_disk(40, &holes).unwrap();
        assert!(m.n_boundary_vertices() > 0);
        // Every boundary vertex sits on one of the four rims.
        for (v, p) in m.vertices().iter().enumerate() {
            if !m.is_boundary(v) {
                continue;
            }
            let r = (p.x * p.x + p.y * p.y).sqrt();
            let mut on_rim = (1.0 - r).abs() < 0.05;
            for &(c, hr) in &holes {
                let d = ((p.x - c[0]).powi(2) + (p.y - c[1]).powi(2)).sqrt();
                on_rim |= (d - hr).abs() < 0.05;
            }
            assert!(on_rim, "boundary vertex {v} off every rim");
        }
        let analytic = std::f64::consts::PI * (1.0 - 3.0 * 0.15_f64.powi(2));
        assert!((m.total_weight() - analytic).abs() / analytic < 0.05);
    }

    #[test]
    fn disk_plain_area_and_uniformity() {
        let m = generate_disk(40, &[]).unwrap();
        let analytic = std::f64::consts::PI;
        assert!((m.total_weight() - analytic).abs() / analytic < 0.05);
        assert!(m.edge_length_ratio() <= 3.0, "ratio {}", m.edge_length_ratio());
    }

    #[test]
    fn overlapping_holes_rejected() {
        let err = generate_disk(20, &[([0.2, 0.0], 0.2), ([0.0, 0.0], 0.2)]).unwrap_err();
        assert_eq!(err.category(), "invalid-geometry");
        let err = generate_disk(20, &[([0.9, 0.0], 0.2)]).unwrap_err();
        assert_eq!(err.category(), "invalid-geometry");
    }

    #[test]
    fn generator_uniformity() {
        assert!(generate_interval(101).unwrap().edge_length_ratio() <= 3.0);
        assert!(generate_sphere(3).unwrap().edge_length_ratio() <= 3.0);
        for length in [0.5, 1.0, 3.0] {
            let rings = cylinder_default_rings(length, 32);
            let m = generate_cylinder(length, 32, rings).unwrap();
            assert!(m.edge_length_ratio() <= 3.0, "length {length}: {}", m.edge_length_ratio());
        }
    }
}
