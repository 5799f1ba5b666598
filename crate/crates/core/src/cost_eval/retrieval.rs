// SPDX-License-Identifier: Apache-2.0

use super::{select_top_fraction, EvalError, EvalResult};

/// 500 of 5000 candidates go on to the full evaluation.
pub const DEFAULT_TOP_FRACTION: f64 = 0.1;

#[derive(Debug)]
pub struct RetrievalRecord {
    pub index: usize,
    pub fast: Result<EvalResult, EvalError>,
    /// Present only for candidates selected for the second stage.
    pub full: Option<Result<EvalResult, EvalError>>,
}

impl RetrievalRecord {
    pub fn selected(&self) -> bool {
        self.full.is_some()
    }

    /// Best available numbers: the full evaluation when it succeeded.
    pub fn final_result(&self) -> Option<&EvalResult> {
        match &self.full {
            Some(Ok(r)) => Some(r),
            _ => self.fast.as_ref().ok(),
        }
    }
}

/// Cheap evaluation of every candidate, then the expensive evaluation of
/// the fraction lying closest to the cheap Pareto frontier. Failing
/// candidates are recorded and skipped; they never abort the batch.
pub fn two_level_retrieval<T>(
    candidates: &[T],
    mut fast_eval: impl FnMut(&T) -> Result<EvalResult, EvalError>,
    mut full_eval: impl FnMut(&T) -> Result<EvalResult, EvalError>,
    fraction: f64,
) -> Result<Vec<RetrievalRecord>, EvalError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(EvalError::InvalidFraction(fraction));
    }
    let mut records: Vec<RetrievalRecord> = candidates
        .iter()
        .enumerate()
        .map(|(index, c)| RetrievalRecord {
            index,
            fast: fast_eval(c),
            full: None,
        })
        .collect();

    let ok: Vec<usize> = records
        .iter()
        .filter(|r| r.fast.is_ok())
        .map(|r| r.index)
        .collect();
    let points: Vec<(f64, f64)> = ok
        .iter()
        .map(|&k| {
            let r = records[k].fast.as_ref().expect("filtered");
            (r.area, r.delay)
        })
        .collect();
    if points.is_empty() {
        return Ok(records);
    }
    for sel in select_top_fraction(&points, fraction)? {
        let k = ok[sel];
        records[k].full = Some(full_eval(&candidates[k]));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_eval::EvalSource;

    fn fast(x: &(f64, f64)) -> Result<EvalResult, EvalError> {
        Ok(EvalResult::new(x.1, x.0, EvalSource::FastProxy))
    }

    #[test]
    fn ten_candidates_one_full_run() {
        let cands: Vec<(f64, f64)> = (0..10)
            .map(|k| (k as f64, (10 - k) as f64 + (k % 3) as f64))
            .collect();
        let mut full_calls = 0;
        let recs = two_level_retrieval(
            &cands,
            fast,
            |x| {
                full_calls += 1;
                Ok(EvalResult::new(x.1, x.0, EvalSource::External))
            },
            0.1,
        )
        .unwrap();
        assert_eq!(full_calls, 1);
        assert_eq!(recs.iter().filter(|r| r.selected()).count(), 1);
    }

    #[test]
    fn identical_stages_agree() {
        let cands: Vec<(f64, f64)> = (0..20)
            .map(|k| ((k * 7 % 11) as f64, (k * 5 % 13) as f64))
            .collect();
        let recs = two_level_retrieval(&cands, fast, fast, 0.25).unwrap();
        for r in recs.iter().filter(|r| r.selected()) {
            let a = r.fast.as_ref().unwrap();
            let b = r.full.as_ref().unwrap().as_ref().unwrap();
            assert!(a.same_metrics(b));
        }
    }

    #[test]
    fn failures_do_not_abort() {
        let cands = [(1.0, 1.0), (2.0, 0.5), (3.0, 3.0)];
        let recs = two_level_retrieval(
            &cands,
            |x| {
                if x.0 == 2.0 {
                    Err(EvalError::Parse("boom".into()))
                } else {
                    fast(x)
                }
            },
            |_| Err(EvalError::Parse("full boom".into())),
            1.0,
        )
        .unwrap();
        assert!(recs[1].fast.is_err() && !recs[1].selected());
        assert!(recs[0].selected() && recs[2].selected());
        assert!(recs[0].final_result().is_some());
    }
}
