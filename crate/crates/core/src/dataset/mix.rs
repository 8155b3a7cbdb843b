//! Mixing datasets at fixed ratios.

use rand::seq::{index, SliceRandom};

use super::format::{Dataset, DatasetHeader, MixInfo, Provenance};
use crate::error::{Error, Result};
use crate::rng;

/// Splits `total` by `ratios`: floors first, then the leftover units go to
/// the largest fractional parts (earlier inputs win ties).
pub fn quotas(ratios: &[f64], total: u64) -> Result<Vec<u64>> {
    if ratios.is_empty() {
        return Err(Error::Ratio("no ratios given".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::Ratio(format!("ratio {r} is not a non-negative number")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Ratio(format!("ratios sum to {sum}, not 1")));
    }
    let exact: Vec<f64> = ratios.iter().map(|r| r * total as f64).collect();
    let mut q: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = q.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned) as usize) {
        q[i] += 1;
    }
    Ok(q)
}

fn label(d: &Dataset) -> (String, u64) {
    match d.header.provenance.as_slice() {
        [p] => (p.policy.clone(), p.seed),
        _ => ("mix".to_string(), d.header.mix.as_ref().map_or(0, |m| m.seed)),
    }
}

/// Draws each input's quota uniformly without replacement, concatenates the
/// blocks in input order and shuffles the result.
pub fn mix(inputs: &[&Dataset], ratios: &[f64], total: u64, seed: u64) -> Result<Dataset> {
    if inputs.len() != ratios.len() {
        return Err(Error::Ratio(format!("{} inputs but {} ratios", inputs.len(), ratios.len())));
    }
    let quotas = quotas(ratios, total)?;
    for (i, (d, &q)) in inputs.iter().zip(&quotas).enumerate() {
        if (d.len() as u64) < q {
            return Err(Error::InsufficientData {
                input: i,
                available: d.len() as u64,
                quota: q,
            });
        }
    }
    let env_version = &inputs[0].header.env_version;
    if let Some(d) = inputs.iter().find(|d| &d.header.env_version != env_version) {
        return Err(Error::Format(format!(
            "inputs come from different environments: {env_version} and {}",
            d.header.env_version
        )));
    }
    let mut rng = rng::stream(seed, rng::STREAM_MIX);
    let mut records = Vec::with_capacity(total as usize);
    let mut provenance = Vec::with_capacity(inputs.len());
    for (d, &q) in inputs.iter().zip(&quotas) {
        let mut picked = index::sample(&mut rng, d.len(), q as usize).into_vec();
        picked.sort_unstable();
        records.extend(picked.into_iter().map(|i| d.records[i]));
        let (policy, seed) = label(d);
        provenance.push(Provenance { policy, count: q, seed });
    }
    records.shuffle(&mut rng);
    let mut header = DatasetHeader::new(env_version, total, provenance);
    header.mix = Some(MixInfo {
        seed,
        ratios: ratios.to_vec(),
    });
    Ok(Dataset { header, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ninety_seven_three_splits() {
        let r = [0.90, 0.07, 0.03];
        assert_eq!(quotas(&r, 200_000).unwrap(), vec![180_000, 14_000, 6_000]);
        assert_eq!(quotas(&r, 5_000).unwrap(), vec![4_500, 350, 150]);
    }

    #[test]
    fn remainders_always_sum_to_total() {
        for total in 0..200 {
            let q = quotas(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], total).unwrap();
            assert_eq!(q.iter().sum::<u64>(), total);
            assert!(q.iter().max().unwrap() - q.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn bad_ratios() {
        assert!(matches!(quotas(&[0.5, 0.4], 10), Err(Error::Ratio(_))));
        assert!(matches!(quotas(&[1.5, -0.5], 10), Err(Error::Ratio(_))));
        assert!(matches!(quotas(&[], 10), Err(Error::Ratio(_))));
        assert!(quotas(&[0.5, 0.5 + 1e-12], 10).is_ok());
    }
}
