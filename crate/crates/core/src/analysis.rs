//! Post-processing of propagation records: spectra, peaks, delays and
//! solver-to-solver comparison.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{ascending_order, Spectral};
use crate::pulse::Envelope;
use crate::record::PropagationRecord;

pub const DEFAULT_REL_THRESHOLD: f64 = 0.05;
pub const DEFAULT_MIN_PROMINENCE: f64 = 0.1;
/// Two neighbouring peaks count as separated when the minimum between them
/// drops below this fraction of the smaller peak.
pub const SEPARATION_RATIO: f64 = 0.1;

/// Power spectrum on an ascending frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
    pub d_omega: f64,
}

impl Spectrum {
    /// `sum power * d_omega`, equal to the envelope energy.
    pub fn total(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.d_omega
    }
}

/// `|Omega~(omega)|^2` normalized so that `sum S d_omega = sum |Omega|^2 d_tau`.
pub fn power_spectrum(envelope: &Envelope) -> Result<Spectrum> {
    let n = envelope.len();
    let d_tau = envelope.grid.d_tau;
    let spectral = Spectral::new(n, d_tau)?;
    let modes = spectral.to_modes(&envelope.values);
    // modes are (1/n) sum x_j e^{i w t}; the continuous transform is d_tau sum(...) / (2 pi)
    // and Parseval then reads int |x|^2 dt = 2 pi int |x~|^2 dw.
    let scale = (n as f64 * d_tau).powi(2) / (2.0 * PI);
    let (omega, power) = ascending_order(n)
        .map(|k| (spectral.omega(k), modes[k].norm_sqr() * scale))
        .unzip();
    Ok(Spectrum {
        omega,
        power,
        d_omega: spectral.d_omega(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    pub prominence: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    /// Sorted by ascending position.
    pub peaks: Vec<Peak>,
    /// Absolute height threshold that was applied.
    pub threshold: f64,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.position).collect()
    }
}

/// Topographic prominence of the local maximum at `i`.
fn prominence(signal: &[f64], i: usize) -> f64 {
    let h = signal[i];
    let mut left_min = h;
    for &v in signal[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &signal[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Local maxima of a non-negative trace above `rel_threshold * max` with
/// prominence of at least `min_prominence * max`. Plateaus report their
/// first sample; the two end samples are never peaks.
pub fn find_peaks(signal: &[f64], positions: &[f64], rel_threshold: f64, min_prominence: f64) -> PeakSet {
    assert_eq!(signal.len(), positions.len());
    let max = signal.iter().copied().fold(0.0, f64::max);
    let threshold = rel_threshold * max;
    let mut set = PeakSet {
        peaks: Vec::new(),
        threshold,
    };
    if signal.len() < 3 || max <= 0.0 {
        return set;
    }
    for i in 1..signal.len() - 1 {
        let v = signal[i];
        if !(v > signal[i - 1] && v > threshold) {
            continue;
        }
        // walk across a plateau
        let mut j = i;
        while j + 1 < signal.len() && signal[j + 1] == v {
            j += 1;
        }
        if j + 1 >= signal.len() || signal[j + 1] > v {
            continue;
        }
        let prom = prominence(signal, i);
        if prom >= min_prominence * max {
            set.peaks.push(Peak {
                position: positions[i],
                height: v,
                prominence: prom,
                index: i,
            });
        }
    }
    set
}

/// [`find_peaks`] with the default thresholds.
pub fn find_peaks_default(signal: &[f64], positions: &[f64]) -> PeakSet {
    find_peaks(signal, positions, DEFAULT_REL_THRESHOLD, DEFAULT_MIN_PROMINENCE)
}

/// Peaks of the intensity `|Omega(tau)|^2`.
pub fn intensity_peaks(envelope: &Envelope) -> PeakSet {
    let taus: Vec<f64> = envelope.grid.taus().collect();
    find_peaks_default(&envelope.intensity(), &taus)
}

/// Peaks of the power spectrum.
pub fn spectral_peaks(spectrum: &Spectrum) -> PeakSet {
    find_peaks_default(&spectrum.power, &spectrum.omega)
}

/// Separation in position of the outermost peaks.
pub fn subpulse_delay(peaks: &PeakSet) -> Result<f64> {
    match (peaks.peaks.first(), peaks.peaks.last()) {
        (Some(a), Some(b)) if peaks.len() >= 2 => Ok(b.position - a.position),
        _ => Err(Error::InsufficientPeaks(peaks.len())),
    }
}

/// True when there are at least two peaks and every neighbouring pair is
/// divided by a minimum below [`SEPARATION_RATIO`] of the smaller peak.
pub fn is_fully_separated(signal: &[f64], peaks: &PeakSet) -> bool {
    if peaks.len() < 2 {
        return false;
    }
    peaks.peaks.windows(2).all(|pair| {
        let valley = signal[pair[0].index..=pair[1].index]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        valley < SEPARATION_RATIO * pair[0].height.min(pair[1].height)
    })
}

/// First snapshot depth (`eta zeta / gamma`) at which the intensity has split
/// into fully separated peaks, if any.
pub fn separation_depth(record: &PropagationRecord) -> Option<f64> {
    record
        .snapshots
        .iter()
        .zip(record.depths())
        .find(|(env, _)| is_fully_separated(&env.intensity(), &intensity_peaks(env)))
        .map(|(_, d)| d)
}

/// Exit-face comparison of two records on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `||I_a - I_b|| / ||I_a||` with each intensity normalized to its own peak.
    pub l2_distance: f64,
    pub peaks_a: Vec<f64>,
    pub peaks_b: Vec<f64>,
    /// For each peak of `a`, position of the nearest peak of `b` minus its own.
    pub peak_offsets: Vec<f64>,
    pub max_peak_offset: f64,
}

impl Comparison {
    pub fn peak_counts_match(&self) -> bool {
        self.peaks_a.len() == self.peaks_b.len()
    }
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let max = v.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        v.into_iter().map(|x| x / max).collect()
    } else {
        v
    }
}

pub fn compare_records(a: &PropagationRecord, b: &PropagationRecord) -> Result<Comparison> {
    if a.grid.n_tau != b.grid.n_tau || a.grid.d_tau != b.grid.d_tau {
        return Err(Error::GridMismatch(format!(
            "time grids differ: {} x {} vs {} x {}",
            a.grid.n_tau, a.grid.d_tau, b.grid.n_tau, b.grid.d_tau
        )));
    }
    let (ea, eb) = (a.exit()?, b.exit()?);
    let ia = normalized(ea.intensity());
    let ib = normalized(eb.intensity());
    let num: f64 = ia.iter().zip(&ib).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = ia.iter().map(|x| x * x).sum();
    let l2_distance = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };

    let peaks_a = intensity_peaks(ea).positions();
    let peaks_b = intensity_peaks(eb).positions();
    let peak_offsets: Vec<f64> = peaks_a
        .iter()
        .filter_map(|pa| {
            peaks_b
                .iter()
                .map(|pb| pb - pa)
                .min_by(|x, y| x.abs().total_cmp(&y.abs()))
        })
        .collect();
    let max_peak_offset = if peaks_a.is_empty() != peaks_b.is_empty() {
        f64::INFINITY
    } else {
        peak_offsets.iter().map(|o| o.abs()).fold(0.0, f64::max)
    };
    Ok(Comparison {
        l2_distance,
        peaks_a,
        peaks_b,
        peak_offsets,
        max_peak_offset,
    })
}
