//! Chains of linear sections in projective space, with rank-one lattices generated by the
//! hyperplane class (by degree on curves).

use super::product::{product_e_certificate, simple_product_ef_certificate, HeSelectors};
use super::{shape, CertError, ChainCertificate, ChainStep, GridCertificate, Stratum};
use crate::ratcone::{ClassVector, Matrix};

fn one() -> ClassVector {
    ClassVector::from_ints(&[1])
}

fn scalar(v: i64) -> Matrix {
    Matrix::from_int_rows(&[vec![v]], 1).expect("1x1 literal")
}

fn to_point() -> Matrix {
    Matrix::zeros(0, 1)
}

/// `P^n > P^{n-1} > ... > P^0` by hyperplanes, carrying `multiple * H`.
pub fn linear_chain(n: u32, multiple: i64) -> Result<ChainCertificate, CertError> {
    if n == 0 {
        return Err(shape("linear chain", "ambient dimension must be positive"));
    }
    let steps = (0..=n)
        .rev()
        .map(|k| {
            if k == 0 {
                ChainStep {
                    stratum: Stratum::point("P^0"),
                    restriction: to_point(),
                    next_class: None,
                }
            } else {
                ChainStep {
                    stratum: Stratum::new(format!("P^{k}"), 1, vec![one()]),
                    restriction: scalar(1),
                    next_class: Some(one()),
                }
            }
        })
        .collect();
    Ok(ChainCertificate {
        root_rank: 1,
        steps,
        divisor: ClassVector::from_ints(&[multiple]),
    })
}

/// `P^n > L > L.H > ...` for a degree-`d` hypersurface `L`, stopping at `L` unless `full`,
/// carrying `multiple * H`.
pub fn hypersurface_chain(
    n: u32,
    d: u32,
    multiple: i64,
    full: bool,
) -> Result<ChainCertificate, CertError> {
    if n < 2 || d == 0 {
        return Err(shape(
            "hypersurface chain",
            "need ambient dimension at least 2 and positive degree",
        ));
    }
    let mut steps = vec![ChainStep {
        stratum: Stratum::new(format!("P^{n}"), 1, vec![one()]),
        restriction: scalar(1),
        next_class: Some(ClassVector::from_ints(&[i64::from(d)])),
    }];
    let last = if full { n } else { 1 };
    for k in 1..=last {
        let dim = n - k;
        let id = if k == 1 {
            format!("L_{d}")
        } else {
            format!("L_{d}.H^{}", k - 1)
        };
        let step = match dim {
            0 => ChainStep {
                stratum: Stratum::point(id),
                restriction: to_point(),
                next_class: None,
            },
            1 => ChainStep {
                stratum: Stratum::curve(id),
                restriction: scalar(i64::from(d)),
                next_class: Some(one()),
            },
            _ => ChainStep {
                stratum: Stratum::new(id, 1, vec![one()]),
                restriction: scalar(1),
                next_class: Some(one()),
            },
        };
        steps.push(step);
    }
    steps.last_mut().expect("nonempty").next_class = None;
    Ok(ChainCertificate {
        root_rank: 1,
        steps,
        divisor: ClassVector::from_ints(&[multiple]),
    })
}

/// Certificates for `H_1 + d H_2 - E` and `H_1 + d H_2 - E - F` on `P^{n1} x P^{n2}` blown up
/// along a point times a degree-`d` hypersurface, then along `P^{n1}` times a point of it.
pub fn tsukioka_certificates(
    n1: u32,
    n2: u32,
    d: u32,
) -> Result<(ChainCertificate, GridCertificate), CertError> {
    let first = linear_chain(n1, 1)?;
    let both = HeSelectors {
        first_nef: true,
        second_nef: true,
    };
    let e = product_e_certificate(
        &first,
        &hypersurface_chain(n2, d, i64::from(d), false)?,
        both,
    )?;
    let ef = simple_product_ef_certificate(
        &first,
        0,
        &hypersurface_chain(n2, d, i64::from(d), true)?,
        1,
        both,
    )?;
    Ok((e, ef))
}
