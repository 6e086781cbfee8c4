//! Minimal 3-vector helpers over `[f64; 3]`.

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, c: f64) -> Vec3 {
    [c * a[0], c * a[1], c * a[2]]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn normalized(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

/// Apply a 3x3 rotation matrix stored row-major.
#[inline]
pub fn mat_apply(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

/// Rotation taking the unit vector `axis` to `e3` (Rodrigues construction).
pub fn rotation_to_e3(axis: Vec3) -> [[f64; 3]; 3] {
    let a = normalized(axis).expect("axis must be nonzero");
    let e3 = [0.0, 0.0, 1.0];
    let c = dot(a, e3);
    let v = cross(a, e3);
    let s = norm(v);
    if s < 1e-14 {
        if c > 0.0 {
            return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        }
        // axis == -e3: rotate by pi about e1
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    }
    let k = scale(v, 1.0 / s);
    // R = I cos + [k]_x sin + kk^T (1 - cos)
    let mut r = [[0.0; 3]; 3];
    let kx = [
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ];
    for row in 0..3 {
        for col in 0..3 {
            let id = if row == col { 1.0 } else { 0.0 };
            r[row][col] = id * c + kx[row][col] * s + k[row] * k[col] * (1.0 - c);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_maps_axis_to_e3() {
        for axis in [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [0.3, -0.4, 0.5],
        ] {
            let a = normalized(axis).unwrap();
            let r = rotation_to_e3(a);
            let image = mat_apply(&r, a);
            assert!(dist(image, [0.0, 0.0, 1.0]) < 1e-12, "axis {axis:?} -> {image:?}");
            // orthogonality
            for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
                let w = mat_apply(&r, v);
                assert!((norm(w) - 1.0).abs() < 1e-12);
            }
        }
    }
}
