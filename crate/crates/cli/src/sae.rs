//! Squared angular error scoring and greedy source matching.

/// SAE in dB between a true and an estimated direction vector:
/// `−20·log₁₀(arccos(|⟨h, ĥ⟩| / (‖h‖·‖ĥ‖)))`, with the cosine clamped to
/// `[−1, 1]`. Degenerate zero-norm estimates score `−∞` ("fail").
pub fn sae_db(truth: &[f64], estimate: &[f64]) -> f64 {
    let nt: f64 = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ne: f64 = estimate.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nt == 0.0 || ne == 0.0 {
        return f64::NEG_INFINITY;
    }
    let dot: f64 = truth.iter().zip(estimate.iter()).map(|(a, b)| a * b).sum();
    let cos = (dot.abs() / (nt * ne)).clamp(-1.0, 1.0);
    let angle = cos.acos();
    if angle == 0.0 {
        // numerically colinear: cap at the resolution of the arccos
        return -20.0 * (f64::EPSILON.sqrt()).log10();
    }
    -20.0 * angle.log10()
}

/// Greedy maximum-|correlation| assignment of estimated sources to ground
/// truth; returns per-truth SAE values.
pub fn match_and_score(truth: &[Vec<f64>], estimates: &[Vec<f64>]) -> Vec<f64> {
    let mut used = vec![false; estimates.len()];
    let mut out = Vec::with_capacity(truth.len());
    for t in truth {
        let nt: f64 = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut best: Option<(usize, f64)> = None;
        for (j, e) in estimates.iter().enumerate() {
            if used[j] {
                continue;
            }
            let ne: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            if ne == 0.0 || nt == 0.0 {
                continue;
            }
            let corr: f64 =
                t.iter().zip(e.iter()).map(|(a, b)| a * b).sum::<f64>().abs() / (nt * ne);
            if best.map(|(_, c)| corr > c).unwrap_or(true) {
                best = Some((j, corr));
            }
        }
        match best {
            Some((j, _)) => {
                used[j] = true;
                out.push(sae_db(t, &estimates[j]));
            }
            None => out.push(f64::NEG_INFINITY),
        }
    }
    out
}

/// Mean SAE, ignoring failed (−∞) entries only if at least one is finite.
pub fn msae_db(saes: &[f64]) -> f64 {
    if saes.is_empty() {
        return f64::NEG_INFINITY;
    }
    saes.iter().sum::<f64>() / saes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors_score_high() {
        let v = vec![0.3, -0.5, 1.0];
        assert!(sae_db(&v, &v) > 80.0);
        // sign flips do not matter
        let w: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!(sae_db(&v, &w) > 80.0);
    }

    #[test]
    fn orthogonal_vectors_score_low() {
        let a = vec![1.0, 0.0];
        let b = vec![0.0, 1.0];
        let sae = sae_db(&a, &b);
        // arccos(0) = π/2 ⇒ −20·log10(π/2) ≈ −3.92
        assert!((sae + 3.922).abs() < 0.01, "{sae}");
    }

    #[test]
    fn zero_estimate_fails() {
        assert_eq!(sae_db(&[1.0, 2.0], &[0.0, 0.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn greedy_matching_handles_permutation() {
        let t1 = vec![1.0, 0.0, 0.0];
        let t2 = vec![0.0, 1.0, 0.0];
        let scores = match_and_score(
            &[t1.clone(), t2.clone()],
            &[t2, t1],
        );
        assert!(scores.iter().all(|&s| s > 80.0), "{scores:?}");
    }
}
