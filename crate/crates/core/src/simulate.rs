//! Exact continuous-time SIR on a fixed network.
//!
//! Each S–I edge transmits at rate β and each infectious vertex recovers at
//! rate γ. The run starts from one uniformly chosen infectious vertex.
//!
//! The event-driven scheme draws the recovery time when a vertex becomes
//! infectious, and for every susceptible neighbour a candidate transmission
//! time. A candidate is queued only if it beats both the recovery and the
//! neighbour's earliest pending infection; superseded entries are skipped.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{explore, Network};
use crate::percolation::EpidemicParams;

fn default_cutoff() -> f64 {
    0.05
}

fn default_replicates() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// A run counts as an epidemic when `final_size > cutoff · N`.
    #[serde(default = "default_cutoff")]
    pub epidemic_cutoff_fraction: f64,
    #[serde(default)]
    pub record_events: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            replicates: 1,
            epidemic_cutoff_fraction: default_cutoff(),
            record_events: false,
        }
    }
}

impl SimConfig {
    pub fn new(seed: u64, replicates: usize) -> Self {
        Self {
            seed,
            replicates,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("replicates must be at least 1"));
        }
        let c = self.epidemic_cutoff_fraction;
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::param(format!(
                "epidemic_cutoff_fraction must lie in (0, 1), got {c}"
            )));
        }
        Ok(())
    }

    /// Independent stream for replicate `index`: same seed, stream number
    /// `index`.
    pub fn replicate_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Infection,
    Recovery,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Infection => "infection",
            EventKind::Recovery => "recovery",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub vertex: u32,
    /// Infecting neighbour; `None` for the index case and for recoveries.
    pub source: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub final_size: usize,
    #[serde(rename = "peak_I")]
    pub peak_infected: usize,
    pub duration: f64,
    pub epidemic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<Event>>,
}

pub const EVENT_CSV_HEADER: &str = "t,kind,vertex";

pub fn write_event_csv<W: std::io::Write>(events: &[Event], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{EVENT_CSV_HEADER}")?;
    for e in events {
        writeln!(out, "{},{},{}", e.time, e.kind.as_str(), e.vertex)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    vertex: u32,
    source: Option<u32>,
    kind: EventKind,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Min-heap on time; ties broken by vertex so runs are reproducible.
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| (other.kind as u8).cmp(&(self.kind as u8)))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    S,
    I,
    R,
}

fn check_network(net: &Network) -> Result<()> {
    if net.vertex_count() < 2 {
        return Err(Error::param("simulation needs at least 2 vertices"));
    }
    Ok(())
}

/// One SIR run. `cutoff` is the epidemic classification fraction.
pub fn gillespie_sir<R: Rng + ?Sized>(
    net: &Network,
    params: &EpidemicParams<f64>,
    cutoff: f64,
    record_events: bool,
    rng: &mut R,
) -> Result<SimOutcome> {
    params.validate()?;
    check_network(net)?;
    let n = net.vertex_count();
    let recovery = Exp::new(params.gamma).map_err(|e| Error::param(e.to_string()))?;
    let transmission = if params.beta > 0.0 {
        Some(Exp::new(params.beta).map_err(|e| Error::param(e.to_string()))?)
    } else {
        None
    };

    let mut state = vec![State::S; n];
    let mut pending = vec![f64::INFINITY; n];
    let mut queue = BinaryHeap::new();
    let mut log = record_events.then(Vec::new);

    let index_case = rng.gen_range(0..n);
    pending[index_case] = 0.0;
    queue.push(Pending {
        time: 0.0,
        vertex: index_case as u32,
        source: None,
        kind: EventKind::Infection,
    });

    let (mut infected, mut ever, mut peak, mut now) = (0usize, 0usize, 0usize, 0.0);
    while let Some(ev) = queue.pop() {
        let v = ev.vertex as usize;
        match ev.kind {
            EventKind::Infection => {
                if state[v] != State::S || ev.time != pending[v] {
                    continue;
                }
                now = ev.time;
                state[v] = State::I;
                infected += 1;
                ever += 1;
                peak = peak.max(infected);
                let recover_at = now + recovery.sample(rng);
                queue.push(Pending {
                    time: recover_at,
                    vertex: ev.vertex,
                    source: None,
                    kind: EventKind::Recovery,
                });
                if let Some(tr) = &transmission {
                    for &w in net.neighbors(v) {
                        let wu = w as usize;
                        if state[wu] != State::S {
                            continue;
                        }
                        let at = now + tr.sample(rng);
                        if at < recover_at && at < pending[wu] {
                            pending[wu] = at;
                            queue.push(Pending {
                                time: at,
                                vertex: w,
                                source: Some(ev.vertex),
                                kind: EventKind::Infection,
                            });
                        }
                    }
                }
            }
            EventKind::Recovery => {
                now = ev.time;
                state[v] = State::R;
                infected -= 1;
            }
        }
        if let Some(log) = log.as_mut() {
            log.push(Event {
                time: ev.time,
                kind: ev.kind,
                vertex: ev.vertex,
                source: ev.source,
            });
        }
    }

    Ok(SimOutcome {
        final_size: ever,
        peak_infected: peak,
        duration: now,
        epidemic: ever as f64 > cutoff * n as f64,
        events: log,
    })
}

/// Summary over replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub replicates: usize,
    pub epidemic_probability: f64,
    /// Binomial standard error of `epidemic_probability`.
    pub se: f64,
    /// Mean `final_size / N` over epidemic runs; `None` when there were none.
    pub major_mean_fraction: Option<f64>,
    /// Mean final size over all runs.
    pub mean_size: f64,
    /// `(final size, count)` in increasing size order.
    pub histogram: Vec<(usize, usize)>,
}

impl EnsembleSummary {
    pub fn from_sizes(sizes: &[usize], n: usize, cutoff: f64) -> Self {
        let reps = sizes.len();
        let threshold = cutoff * n as f64;
        let mut histogram = BTreeMap::new();
        let (mut epidemics, mut major_total, mut total) = (0usize, 0usize, 0usize);
        for &s in sizes {
            *histogram.entry(s).or_insert(0usize) += 1;
            total += s;
            if s as f64 > threshold {
                epidemics += 1;
                major_total += s;
            }
        }
        let p = epidemics as f64 / reps as f64;
        Self {
            replicates: reps,
            epidemic_probability: p,
            se: (p * (1.0 - p) / reps as f64).sqrt(),
            major_mean_fraction: (epidemics > 0)
                .then(|| major_total as f64 / (epidemics as f64 * n as f64)),
            mean_size: total as f64 / reps as f64,
            histogram: histogram.into_iter().collect(),
        }
    }
}

/// Independent Gillespie runs, one stream per replicate; the result does not
/// depend on thread scheduling.
pub fn run_ensemble(
    net: &Network,
    params: &EpidemicParams<f64>,
    cfg: &SimConfig,
) -> Result<EnsembleSummary> {
    let outcomes = run_replicates(net, params, cfg)?;
    let sizes: Vec<usize> = outcomes.iter().map(|o| o.final_size).collect();
    Ok(EnsembleSummary::from_sizes(
        &sizes,
        net.vertex_count(),
        cfg.epidemic_cutoff_fraction,
    ))
}

/// Every outcome, ordered by replicate index.
pub fn run_replicates(
    net: &Network,
    params: &EpidemicParams<f64>,
    cfg: &SimConfig,
) -> Result<Vec<SimOutcome>> {
    cfg.validate()?;
    params.validate()?;
    check_network(net)?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = cfg.replicate_rng(i);
            gillespie_sir(
                net,
                params,
                cfg.epidemic_cutoff_fraction,
                cfg.record_events,
                &mut rng,
            )
        })
        .collect()
}

/// Occupied-component size of a uniform vertex, repeated over replicates with
/// fresh edge occupations each time.
pub fn percolation_ensemble(net: &Network, t: f64, cfg: &SimConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param(format!("T must lie in [0, 1], got {t}")));
    }
    let n = net.vertex_count();
    if n == 0 {
        return Err(Error::param("network has no vertices"));
    }
    let sizes: Vec<usize> = (0..cfg.replicates)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |visited, i| {
                let mut rng = cfg.replicate_rng(i);
                visited.fill(false);
                let start = rng.gen_range(0..n);
                explore(net, t, start, visited, &mut rng)
            },
        )
        .collect();
    Ok(EnsembleSummary::from_sizes(&sizes, n, cfg.epidemic_cutoff_fraction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeSequence;
    use crate::netgen::configuration_model;

    fn params(beta: f64, gamma: f64) -> EpidemicParams<f64> {
        EpidemicParams::new(beta, gamma).unwrap()
    }

    fn regular(k: usize, n: usize, seed: u64) -> Network {
        let s = DegreeSequence::new(vec![k; n]).unwrap();
        configuration_model(&s, &mut ChaCha8Rng::seed_from_u64(seed), 10_000).unwrap()
    }

    #[test]
    fn no_transmission_means_size_one() {
        let net = regular(3, 100, 1);
        let cfg = SimConfig::new(4, 50);
        let outs = run_replicates(&net, &params(0.0, 1.0), &cfg).unwrap();
        assert!(outs.iter().all(|o| o.final_size == 1 && o.peak_infected == 1));
        let s = run_ensemble(&net, &params(0.0, 1.0), &cfg).unwrap();
        assert_eq!(s.epidemic_probability, 0.0);
        assert_eq!(s.major_mean_fraction, None);
        assert_eq!(s.histogram, vec![(1, 50)]);
    }

    #[test]
    fn single_edge_competing_exponentials() {
        let net = Network::from_edges(2, vec![(0, 1)]).unwrap();
        let outs = run_replicates(&net, &params(1.0, 1.0), &SimConfig::new(11, 10_000)).unwrap();
        let hits = outs.iter().filter(|o| o.final_size == 2).count();
        let p = hits as f64 / 1e4;
        let se = (0.25f64 / 1e4).sqrt();
        assert!((p - 0.5).abs() < 3.0 * se, "p = {p}");
    }

    #[test]
    fn event_log_replays_to_the_outcome() {
        let net = regular(4, 2000, 2);
        let cfg = SimConfig {
            seed: 9,
            replicates: 8,
            record_events: true,
            ..Default::default()
        };
        for out in run_replicates(&net, &params(1.0, 1.0), &cfg).unwrap() {
            let events = out.events.as_ref().unwrap();
            let mut state = vec![State::S; net.vertex_count()];
            let (mut inf, mut ever, mut peak) = (0usize, 0usize, 0usize);
            let mut last = 0.0;
            for (k, e) in events.iter().enumerate() {
                assert!(e.time >= last);
                last = e.time;
                let v = e.vertex as usize;
                match e.kind {
                    EventKind::Infection => {
                        assert!(state[v] == State::S);
                        match e.source {
                            None => assert_eq!(k, 0),
                            Some(src) => {
                                assert!(state[src as usize] == State::I);
                                assert!(net.neighbors(src as usize).contains(&e.vertex));
                            }
                        }
                        state[v] = State::I;
                        inf += 1;
                        ever += 1;
                        peak = peak.max(inf);
                    }
                    EventKind::Recovery => {
                        assert!(state[v] == State::I);
                        state[v] = State::R;
                        inf -= 1;
                    }
                }
            }
            assert_eq!(inf, 0);
            assert_eq!(ever, out.final_size);
            assert_eq!(peak, out.peak_infected);
            assert_eq!(last, out.duration);
            assert!(out.peak_infected <= out.final_size);
        }
    }

    #[test]
    fn ensembles_are_deterministic() {
        let net = regular(3, 3000, 5);
        let cfg = SimConfig::new(21, 40);
        let a = run_ensemble(&net, &params(1.5, 1.0), &cfg).unwrap();
        let b = run_ensemble(&net, &params(1.5, 1.0), &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = percolation_ensemble(&net, 0.6, &cfg).unwrap();
        let d = percolation_ensemble(&net, 0.6, &cfg).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn percolation_extremes() {
        let net = regular(3, 1000, 8);
        let zero = percolation_ensemble(&net, 0.0, &SimConfig::new(1, 30)).unwrap();
        assert_eq!(zero.histogram, vec![(1, 30)]);
        let pieces = Network::from_edges(10, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (7, 8)]).unwrap();
        let cfg = SimConfig {
            seed: 3,
            replicates: 20_000,
            epidemic_cutoff_fraction: 0.5,
            record_events: false,
        };
        let full = percolation_ensemble(&pieces, 1.0, &cfg).unwrap();
        assert!((full.epidemic_probability - 0.7).abs() < 3.0 * full.se + 1e-12);
        assert_eq!(full.major_mean_fraction, Some(0.7));
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 0).validate().is_err());
        let mut c = SimConfig::new(0, 1);
        c.epidemic_cutoff_fraction = 1.0;
        assert!(c.validate().is_err());
        let parsed: std::result::Result<SimConfig, _> =
            serde_json::from_str(r#"{"seed": 1, "replicas": 3}"#);
        assert!(parsed.is_err());
        let tiny = Network::from_edges(1, vec![]).unwrap();
        assert!(gillespie_sir(&tiny, &params(1.0, 1.0), 0.05, false, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn event_csv_layout() {
        let events = [
            Event { time: 0.0, kind: EventKind::Infection, vertex: 3, source: None },
            Event { time: 0.5, kind: EventKind::Recovery, vertex: 3, source: None },
        ];
        let mut buf = Vec::new();
        write_event_csv(&events, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,kind,vertex\n0,infection,3\n0.5,recovery,3\n");
    }
}
