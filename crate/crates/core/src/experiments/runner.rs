use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::catalog::ExperimentSpec;
use crate::engine::{run_simulation, InteractionRecord, RunLog, SimError};
use crate::Group;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub interaction_index: u64,
    pub mean_ug: f64,
    pub n: u64,
}

/// Mean UG per interaction index across all consumers and runs of a group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSeries {
    pub group: Group,
    pub points: Vec<SeriesPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub id: u32,
    pub base_seed: u64,
    /// Sorted by run number.
    pub logs: Vec<RunLog>,
    pub series: Vec<GroupSeries>,
}

impl ExperimentResult {
    /// One mean per run for `group`, over served interactions in `rounds`
    /// (all rounds if `None`). Runs with no such interaction are skipped.
    pub fn run_means(&self, group: Group, rounds: Option<RangeInclusive<u32>>) -> Vec<f64> {
        self.logs
            .iter()
            .filter_map(|log| run_mean(&log.records, group, rounds.clone()))
            .collect()
    }
}

pub fn run_mean(records: &[InteractionRecord], group: Group, rounds: Option<RangeInclusive<u32>>) -> Option<f64> {
    let (sum, n) = records
        .iter()
        .filter(|r| r.served && r.group == group)
        .filter(|r| rounds.as_ref().is_none_or(|range| range.contains(&r.round)))
        .fold((0.0, 0u64), |(s, n), r| (s + r.ug, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Runs `spec.nisr` simulations (or `runs` if given) with seeds
/// `base_seed + i`, on at most `parallelism` threads.
pub fn run_experiment(
    spec: &ExperimentSpec,
    runs: Option<u32>,
    base_seed: u64,
    parallelism: usize,
) -> Result<ExperimentResult, SimError> {
    let runs = runs.unwrap_or(spec.nisr);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("thread pool");
    let logs: Result<Vec<RunLog>, SimError> = pool.install(|| {
        (0..runs)
            .into_par_iter()
            .map(|i| run_simulation(&spec.config, base_seed.wrapping_add(i as u64), i))
            .collect()
    });
    let logs = logs?;
    Ok(ExperimentResult {
        id: spec.id,
        base_seed,
        series: aggregate(&logs),
        logs,
    })
}

/// Per-group series over all served interactions. The result does not
/// depend on the order of `logs`.
pub fn aggregate(logs: &[RunLog]) -> Vec<GroupSeries> {
    let mut ordered: Vec<&RunLog> = logs.iter().collect();
    ordered.sort_by_key(|l| (l.run, l.seed));
    let mut acc: [BTreeMap<u64, (f64, u64)>; 3] = Default::default();
    for log in ordered {
        for r in log.records.iter().filter(|r| r.served) {
            let e = acc[r.group as usize].entry(r.interaction_index).or_insert((0.0, 0));
            e.0 += r.ug;
            e.1 += 1;
        }
    }
    Group::ALL
        .into_iter()
        .zip(acc)
        .map(|(group, m)| GroupSeries {
            group,
            points: m
                .into_iter()
                .map(|(interaction_index, (sum, n))| SeriesPoint {
                    interaction_index,
                    mean_ug: sum / n as f64,
                    n,
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AgentId, Mode};

    fn rec(run: u32, consumer: u64, group: Group, idx: u64, ug: f64, served: bool) -> InteractionRecord {
        InteractionRecord {
            run,
            round: idx as u32,
            consumer: AgentId(consumer),
            group,
            interaction_index: idx,
            model_used: Mode::Pull,
            ug,
            served,
        }
    }

    fn log(run: u32, records: Vec<InteractionRecord>) -> RunLog {
        RunLog {
            run,
            seed: run as u64,
            records,
            census: vec![],
        }
    }

    #[test]
    fn brute_force_means() {
        let logs = vec![
            log(0, vec![rec(0, 1, Group::Fire, 1, 2.0, true), rec(0, 2, Group::Fire, 1, 4.0, true), rec(0, 3, Group::Ca, 1, 0.0, false)]),
            log(1, vec![rec(1, 1, Group::Fire, 1, 6.0, true), rec(1, 1, Group::Fire, 2, -1.0, true)]),
        ];
        let s = aggregate(&logs);
        assert_eq!(s[0].group, Group::Fire);
        assert_eq!(s[0].points[0], SeriesPoint { interaction_index: 1, mean_ug: 4.0, n: 3 });
        assert_eq!(s[0].points[1], SeriesPoint { interaction_index: 2, mean_ug: -1.0, n: 1 });
        assert!(s[1].points.is_empty(), "unserved records are excluded");
        let mut swapped = logs.clone();
        swapped.reverse();
        assert_eq!(aggregate(&swapped), s);
    }

    #[test]
    fn single_run_series_matches_run() {
        let l = log(0, vec![rec(0, 1, Group::Ca, 1, 3.0, true), rec(0, 1, Group::Ca, 2, 5.0, true)]);
        let s = aggregate(std::slice::from_ref(&l));
        let means: Vec<f64> = s[1].points.iter().map(|p| p.mean_ug).collect();
        assert_eq!(means, [3.0, 5.0]);
        assert_eq!(run_mean(&l.records, Group::Ca, None), Some(4.0));
        assert_eq!(run_mean(&l.records, Group::Ca, Some(2..=2)), Some(5.0));
        assert_eq!(run_mean(&l.records, Group::Fire, None), None);
    }
}
