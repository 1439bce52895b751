//! ASCII OBJ and PLY output with 17 significant digits.

use std::io::{self, Write};

use crate::builder::SurfaceMesh;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_obj(mesh: &SurfaceMesh, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# {} vertices, {} faces", mesh.vertices.len(), mesh.faces.len())?;
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", num(v[0]), num(v[1]), num(v[2]))?;
    }
    for n in &mesh.normals {
        writeln!(out, "vn {} {} {}", num(n[0]), num(n[1]), num(n[2]))?;
    }
    for f in &mesh.faces {
        let idx: Vec<String> = f.iter().map(|i| format!("{0}//{0}", i + 1)).collect();
        writeln!(out, "f {}", idx.join(" "))?;
    }
    Ok(())
}

pub fn write_ply(mesh: &SurfaceMesh, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", mesh.vertices.len())?;
    for p in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(out, "property double {p}")?;
    }
    writeln!(out, "element face {}", mesh.faces.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        writeln!(out, "{} {} {} {} {} {}", num(v[0]), num(v[1]), num(v[2]), num(n[0]), num(n[1]), num(n[2]))?;
    }
    for f in &mesh.faces {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        writeln!(out, "{} {}", f.len(), idx.join(" "))?;
    }
    Ok(())
}

/// Minimal OBJ reader for vertex positions, used to check round trips.
pub fn read_obj_vertices(text: &str) -> Vec<[f64; 3]> {
    text.lines()
        .filter_map(|l| l.strip_prefix("v "))
        .filter_map(|l| {
            let v: Vec<f64> = l.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            (v.len() == 3).then(|| [v[0], v[1], v[2]])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{integrate_surface, GridSpec};
    use crate::rational::RationalFunction;
    use crate::sphere::SpherePoint;
    use crate::surface::WeierstrassSurface;
    use num_complex::Complex64;

    fn mesh() -> SurfaceMesh {
        let s = WeierstrassSurface::sphere(vec![SpherePoint::Infinity], RationalFunction::identity(), RationalFunction::constant(Complex64::new(1.0, 0.0)))
            .unwrap();
        let grid = GridSpec::Polar { center: Complex64::new(0.0, 0.0), rmin: 0.1, rmax: 1.0, nr: 5, ntheta: 6 };
        integrate_surface(&s, Complex64::new(0.0, 0.0), &grid).unwrap()
    }

    #[test]
    fn obj_round_trips_bit_exactly() {
        let m = mesh();
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(read_obj_vertices(&text), m.vertices);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), m.faces.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), m.vertices.len());
    }

    #[test]
    fn ply_header_counts() {
        let m = mesh();
        let mut buf = Vec::new();
        write_ply(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(&format!("element vertex {}", m.vertices.len())));
        let body = text.split("end_header\n").nth(1).unwrap();
        assert_eq!(body.lines().count(), m.vertices.len() + m.faces.len());
    }

    #[test]
    fn normals_match_cross_product() {
        let m = mesh();
        // vertex (2, 0) has neighbours along both grid directions
        let nt = m.param.nt;
        let at = |i: usize, j: usize| m.vertices[i * nt + j];
        let (a, b, c, d) = (at(1, 0), at(3, 0), at(2, nt - 1), at(2, 1));
        let xs = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let xt = [d[0] - c[0], d[1] - c[1], d[2] - c[2]];
        let cr = [xs[1] * xt[2] - xs[2] * xt[1], xs[2] * xt[0] - xs[0] * xt[2], xs[0] * xt[1] - xs[1] * xt[0]];
        let n = m.normals[2 * nt];
        let len = cr.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot: f64 = cr.iter().zip(n).map(|(a, b)| a * b).sum::<f64>() / len;
        assert!(dot > 0.99, "{dot}");
    }
}
