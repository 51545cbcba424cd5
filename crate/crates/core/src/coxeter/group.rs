use std::collections::{HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;

use super::roots::RootSystem;
use crate::algebra::ScalarMatrix;
use crate::error::{Error, Result};

fn check_bound(rs: &RootSystem, bound: u64) -> Result<()> {
    let order = rs.coxeter_type().order();
    if order > bound {
        return Err(Error::Capability(format!(
            "{} has order {order}, above the generation bound {bound}",
            rs.coxeter_type()
        )));
    }
    Ok(())
}

/// Closure of the exact simple reflections under multiplication, in
/// breadth-first order from the identity.
pub fn generate_group(rs: &RootSystem, bound: u64) -> Result<Vec<ScalarMatrix>> {
    check_bound(rs, bound)?;
    let gens = rs.simple_reflections_exact().ok_or_else(|| {
        Error::Capability(format!(
            "{} has no exact realization; use generate_group_f64",
            rs.coxeter_type()
        ))
    })?;
    let id = ScalarMatrix::identity(rs.dim());
    let mut seen: HashSet<ScalarMatrix> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = s.mul(&g)?;
            if seen.insert(h.clone()) {
                if seen.len() as u64 > bound {
                    return Err(Error::Capability(format!(
                        "group closure exceeded the bound {bound}"
                    )));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

/// Floating-point closure; elements are identified after rounding entries
/// to 1e-9.
pub fn generate_group_f64(rs: &RootSystem, bound: u64) -> Result<Vec<DMatrix<f64>>> {
    check_bound(rs, bound)?;
    let gens = rs.simple_reflections();
    let key = |m: &DMatrix<f64>| -> Vec<i64> {
        m.iter().map(|v| (v * 1e9).round() as i64).collect()
    };
    let n = rs.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(key(&id), 0);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = s * &g;
            let k = key(&h);
            if !seen.contains_key(&k) {
                seen.insert(k, order.len());
                if order.len() as u64 >= bound {
                    return Err(Error::Capability(format!(
                        "group closure exceeded the bound {bound}"
                    )));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_root_system, CoxeterType};

    #[test]
    fn small_group_orders() {
        let b2 = build_root_system(CoxeterType::B(2)).unwrap();
        assert_eq!(generate_group(&b2, 100).unwrap().len(), 8);
        let h3 = build_root_system(CoxeterType::H3).unwrap();
        assert_eq!(generate_group(&h3, 1000).unwrap().len(), 120);
        let i7 = build_root_system(CoxeterType::I2(7)).unwrap();
        assert_eq!(generate_group_f64(&i7, 100).unwrap().len(), 14);
        assert!(matches!(generate_group(&i7, 100), Err(Error::Capability(_))));
    }

    #[test]
    fn bound_is_enforced() {
        let h3 = build_root_system(CoxeterType::H3).unwrap();
        assert!(matches!(generate_group(&h3, 100), Err(Error::Capability(_))));
    }
}
