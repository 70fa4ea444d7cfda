//! Strong mappings from observables:
//! `⟨U|V⟩ = α((⋀_{a∈U} p_a) ∧ (⋁_{b∈V} p_b))` for fixed preimages `p_a`.

use super::{Csm, CsmDomain, CsmError, CsmForm};
use crate::effect::EffectAlgebra;
use crate::observable::{Observable, SEARCH_ATOM_LIMIT};
use crate::subset::all_subsets;

/// How the preimage `p_a ∈ α⁻¹(a)` is fixed for each `a ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PreimagePolicy {
    /// The first preimage in ascending mask order.
    #[default]
    First,
    /// One domain element per element of `S`, in `S` order.
    Explicit(Vec<u64>),
}

/// Every `x` with `α(x) = target`, in ascending mask order.
///
/// Returns an empty list when the domain has more than
/// [`SEARCH_ATOM_LIMIT`] atoms.
pub fn preimages<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    target: &A::Elem,
) -> Vec<u64> {
    let b = alpha.domain();
    if b.atoms() > SEARCH_ATOM_LIMIT {
        return Vec::new();
    }
    b.elements()
        .filter(|&x| alpha.eval(alg, x).as_ref() == Some(target))
        .collect()
}

fn not_in_range<A: EffectAlgebra>(alg: &A, e: &A::Elem) -> CsmError {
    CsmError::NotInRange(alg.describe(e))
}

fn resolve<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    domain: &CsmDomain<A::Elem>,
    policy: &PreimagePolicy,
) -> Result<Vec<u64>, CsmError> {
    match policy {
        PreimagePolicy::First => domain
            .elements()
            .iter()
            .map(|a| {
                preimages(alg, alpha, a)
                    .first()
                    .copied()
                    .ok_or_else(|| not_in_range(alg, a))
            })
            .collect(),
        PreimagePolicy::Explicit(choice) => {
            if choice.len() != domain.len() {
                return Err(CsmError::Observable(format!(
                    "{} preimages given for {} elements of S",
                    choice.len(),
                    domain.len()
                )));
            }
            let b = alpha.domain();
            for (a, &p) in domain.elements().iter().zip(choice) {
                if !b.contains(p) || alpha.eval(alg, p).as_ref() != Some(a) {
                    return Err(CsmError::Observable(format!(
                        "element {p:#x} is not a preimage of {}",
                        alg.describe(a)
                    )));
                }
            }
            Ok(choice.clone())
        }
    }
}

/// Builds the mapping from an observable whose range contains `S`.
///
/// `⋀∅` is the top of the observable's domain and `⋁∅` its bottom.
pub fn csm_from_observable<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    domain: CsmDomain<A::Elem>,
    policy: &PreimagePolicy,
) -> Result<Csm<A::Elem>, CsmError> {
    let p = resolve(alg, alpha, &domain, policy)?;
    from_preimages(alg, alpha, domain, &p)
}

fn from_preimages<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    domain: CsmDomain<A::Elem>,
    p: &[u64],
) -> Result<Csm<A::Elem>, CsmError> {
    let b = alpha.domain();
    let n = domain.len();
    let meets: Vec<u64> = all_subsets(n)
        .map(|u| u.iter().fold(b.top(), |acc, i| acc & p[i]))
        .collect();
    let joins: Vec<u64> = all_subsets(n)
        .map(|v| v.iter().fold(b.bottom(), |acc, i| acc | p[i]))
        .collect();
    let mut values = Vec::with_capacity(1 << (2 * n));
    for &m in &meets {
        for &j in &joins {
            let x = m & j;
            values.push(alpha.eval(alg, x).ok_or(CsmError::ObservableUndefined(x))?);
        }
    }
    let csm = Csm::from_table(alg, domain, values)?;
    Ok(Csm {
        form: CsmForm::ObservableDerived,
        ..csm
    })
}

/// Every combination of preimages for the elements of `S`, or
/// [`CsmError::TooManyChoices`] if there are more than `limit`.
pub fn all_preimage_choices<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    domain: &CsmDomain<A::Elem>,
    limit: usize,
) -> Result<Vec<Vec<u64>>, CsmError> {
    let per_element: Vec<Vec<u64>> = domain
        .elements()
        .iter()
        .map(|a| {
            let pre = preimages(alg, alpha, a);
            if pre.is_empty() {
                Err(not_in_range(alg, a))
            } else {
                Ok(pre)
            }
        })
        .collect::<Result<_, _>>()?;
    let total: u128 = per_element.iter().map(|v| v.len() as u128).product();
    if total > limit as u128 {
        return Err(CsmError::TooManyChoices(total));
    }
    let mut choices = vec![Vec::with_capacity(per_element.len())];
    for options in &per_element {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    Ok(choices)
}

/// [`csm_from_observable`] for every preimage choice, paired with the choice.
pub fn csm_from_observable_sweep<A: EffectAlgebra>(
    alg: &A,
    alpha: &Observable<A::Elem>,
    domain: &CsmDomain<A::Elem>,
    limit: usize,
) -> Result<Vec<(Vec<u64>, Csm<A::Elem>)>, CsmError> {
    all_preimage_choices(alg, alpha, domain, limit)?
        .into_iter()
        .map(|choice| {
            let csm = from_preimages(alg, alpha, domain.clone(), &choice)?;
            Ok((choice, csm))
        })
        .collect()
}
