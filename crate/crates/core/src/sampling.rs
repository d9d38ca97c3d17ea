//! Seeded uniform sampling over boxes and sets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::BoundingBox;
use crate::scalar::Scalar;
use crate::sets::SetSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_in_box<T: Scalar, R: Rng>(rng: &mut R, bbox: &BoundingBox<T>) -> Vec<T> {
    bbox.lo()
        .iter()
        .zip(bbox.hi())
        .map(|(&l, &h)| {
            let u: f64 = rng.gen();
            l + (h - l) * T::lit(u)
        })
        .collect()
}

/// Rejection sampling from `set ∩ bbox`; `None` after `tries` misses.
///
/// Dual cones of halfspace cones are often lower-dimensional, so they are
/// drawn as scaled nonnegative combinations of the normals instead.
pub fn uniform_in_set<T: Scalar, R: Rng>(
    rng: &mut R,
    set: &SetSpec<T>,
    bbox: &BoundingBox<T>,
    tries: usize,
) -> Option<Vec<T>> {
    if let Some(gens) = cone_generators(set) {
        if bbox.contains(&vec![T::zero(); bbox.dim()]) {
            return (0..tries).find_map(|_| conic_draw(rng, &gens, bbox)).filter(|p| set.contains(p));
        }
    }
    (0..tries).map(|_| uniform_in_box(rng, bbox)).find(|p| set.contains(p))
}

fn cone_generators<T: Scalar>(set: &SetSpec<T>) -> Option<Vec<Vec<T>>> {
    match set {
        SetSpec::DualCone(k) => match k.as_ref() {
            SetSpec::Halfspaces { constraints, .. } if k.is_cone() => {
                Some(constraints.iter().map(|h| h.normal.clone()).collect())
            }
            _ => None,
        },
        _ => None,
    }
}

fn conic_draw<T: Scalar, R: Rng>(rng: &mut R, gens: &[Vec<T>], bbox: &BoundingBox<T>) -> Option<Vec<T>> {
    let mut d = vec![T::zero(); bbox.dim()];
    for g in gens {
        let w = T::lit(rng.gen::<f64>());
        d.iter_mut().zip(g).for_each(|(di, &gi)| *di = *di + w * gi);
    }
    let mut t_max = T::infinity();
    for ((&di, &lo), &hi) in d.iter().zip(bbox.lo()).zip(bbox.hi()) {
        if di > T::zero() {
            t_max = t_max.min(hi / di);
        } else if di < T::zero() {
            t_max = t_max.min(lo / di);
        }
    }
    if !t_max.is_finite() {
        return None;
    }
    let t = t_max * T::lit(rng.gen::<f64>());
    Some(d.into_iter().map(|v| v * t).collect())
}
