use nalgebra::SymmetricEigen;

use super::BlockMatrix;
use crate::ball::{Ball, Midpoint};
use crate::error::{Error, Result};

/// Shift attempts before giving up.
const MAX_SHIFTS: usize = 80;

/// `true` when `A - mu I` is positive definite for every matrix and shift
/// inside the balls, via an interval LDL^T factorization.
fn shifted_positive<M: Midpoint>(a: &BlockMatrix<M>, mu: &Ball<M>, bits: u32) -> bool {
    let n = a.dim();
    // l[i][k] for k < i; ui[k] = l[i][k] d[k] for the current row
    let mut l: Vec<Vec<Ball<M>>> = Vec::with_capacity(n);
    let mut d: Vec<Ball<M>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut li: Vec<Ball<M>> = Vec::with_capacity(i);
        let mut ui: Vec<Ball<M>> = Vec::with_capacity(i);
        for j in 0..i {
            let mut s = a.get(i, j).clone();
            for k in 0..j {
                s = s.sub_at(&ui[k].mul_at(&l[j][k], bits), bits);
            }
            // s = l_ij d_j
            let lij = match s.div_at(&d[j], bits) {
                Ok(x) => x,
                Err(_) => return false,
            };
            ui.push(s);
            li.push(lij);
        }
        let mut di = a.get(i, i).sub_at(mu, bits);
        for k in 0..i {
            di = di.sub_at(&ui[k].mul_at(&li[k], bits), bits);
        }
        if !di.is_positive() {
            return false;
        }
        l.push(li);
        d.push(di);
    }
    true
}

/// Enclosure of the smallest eigenvalue valid for every symmetric matrix
/// inside the block's entry balls.
///
/// The upper end is a Rayleigh quotient of an approximate eigenvector; the
/// lower end is a shift `mu` for which `A - mu I` is certified positive
/// definite.
pub fn min_eig<M: Midpoint>(a: &BlockMatrix<M>) -> Result<Ball<M>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::EigensolveFailure("empty block".into()));
    }
    let bits = a.get(0, 0).bits();
    let eig = SymmetricEigen::new(a.mid_matrix());
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    let v: Vec<Ball<M>> = eig.eigenvectors.column(idx).iter().map(|&x| Ball::from_f64(x, bits)).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigensolveFailure(format!("block D = {}: non-finite eigenvector", a.d)));
    }

    let mut num = Ball::<M>::zero_at(bits);
    let mut den = Ball::<M>::zero_at(bits);
    for i in 0..n {
        let mut row = Ball::<M>::zero_at(bits);
        for (j, vj) in v.iter().enumerate() {
            row = row.add_at(&a.get(i, j).mul_at(vj, bits), bits);
        }
        num = num.add_at(&row.mul_at(&v[i], bits), bits);
        den = den.add_at(&v[i].sqr(), bits);
    }
    let rho = num.div_at(&den, bits)?;
    let (_, upper) = rho.endpoints_big(bits + 8);

    let scale = (0..n).map(|i| a.get(i, i).mag_up()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let centre = Ball::<M>::new(rho.mid().clone(), 0.0);
    let mut delta = scale * 2f64.powi(-(bits as i32) + 8) + a.radius_norm();
    for _ in 0..MAX_SHIFTS {
        let mu = centre.sub_at(&Ball::from_f64(delta, bits), bits);
        if shifted_positive(a, &mu, bits) {
            let (_, lower) = mu.endpoints_big(bits + 8);
            return Ok(Ball::from_endpoints(&lower, &upper, bits));
        }
        delta *= 4.0;
        if delta > 4.0 * scale * n as f64 {
            break;
        }
    }
    Err(Error::EigensolveFailure(format!(
        "block D = {}: no certified shift below {}",
        a.d,
        rho.mid_f64()
    )))
}
