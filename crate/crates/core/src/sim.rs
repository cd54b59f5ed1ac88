//! Discrete-event simulation of the realized M/M/N+M system with threshold
//! admission, used to cross-check the stationary formulas.
//!
//! Each admitted call that has to wait draws its patience deadline on
//! arrival. Abandonment events for calls that reach a server first are left
//! in the calendar and ignored when they fire. Output is analysed by batch
//! means after a warmup period.
//!
//! Random numbers come from ChaCha8 seeded with `seed`, with `stream`
//! selecting an independent substream per replication.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::SimError;
use crate::queue::{CostParams, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub servers: usize,
    pub threshold: Threshold,
    pub l: f64,
    pub costs: CostParams,
    pub horizon: f64,
    pub warmup: f64,
    pub batches: usize,
    pub seed: u64,
    pub stream: u64,
}

impl SimConfig {
    /// Horizon 10⁵, warmup 10%, 20 batches.
    pub fn new(servers: usize, threshold: Threshold, l: f64, costs: CostParams, seed: u64) -> Self {
        Self {
            servers,
            threshold,
            l,
            costs,
            horizon: 1e5,
            warmup: 1e4,
            batches: 20,
            seed,
            stream: 0,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.horizon.is_finite() && self.warmup >= 0.0 && self.horizon > self.warmup) {
            return Err(SimError::InvalidConfig(format!(
                "need horizon > warmup >= 0, got horizon={} warmup={}",
                self.horizon, self.warmup
            )));
        }
        if self.batches < 2 {
            return Err(SimError::InvalidConfig(format!(
                "need at least 2 batches, got {}",
                self.batches
            )));
        }
        if !(self.l.is_finite() && self.l >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "arrival rate must be non-negative, got {}",
                self.l
            )));
        }
        if let Threshold::Finite(t) = self.threshold {
            if t < self.servers {
                return Err(SimError::InvalidConfig(format!(
                    "threshold {t} is below staffing {}",
                    self.servers
                )));
            }
        }
        self.costs
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))
    }
}

/// Batch-means point estimate with a 95% Student-t half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub mean: f64,
    pub half_width: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub arrivals: u64,
    pub outsourced: u64,
    pub admitted: u64,
    pub served: u64,
    pub abandoned: u64,
    pub in_system_at_end: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub p_out: Interval,
    pub p_ab: Interval,
    pub q_bar: Interval,
    pub z: Interval,
    /// Totals over the whole run, warmup included.
    pub counts: EventCounts,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Arrival,
    Departure,
    Abandon(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: Kind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    arrivals: u64,
    outsourced: u64,
    abandoned: u64,
    queue_area: f64,
}

struct Calendar {
    heap: BinaryHeap<Reverse<Event>>,
    seq: u64,
}

impl Calendar {
    fn push(&mut self, time: f64, kind: Kind) {
        self.seq += 1;
        self.heap.push(Reverse(Event {
            time,
            seq: self.seq,
            kind,
        }));
    }
}

/// Run one replication.
pub fn simulate(cfg: &SimConfig) -> Result<SimEstimate, SimError> {
    cfg.validate()?;
    let zero = Interval {
        mean: 0.0,
        half_width: 0.0,
    };
    if cfg.l == 0.0 {
        let counts = EventCounts {
            arrivals: 0,
            outsourced: 0,
            admitted: 0,
            served: 0,
            abandoned: 0,
            in_system_at_end: 0,
        };
        return Ok(SimEstimate {
            p_out: zero,
            p_ab: zero,
            q_bar: zero,
            z: zero,
            counts,
        });
    }
    let expected_per_batch = cfg.l * (cfg.horizon - cfg.warmup) / cfg.batches as f64;
    if expected_per_batch < 10.0 {
        return Err(SimError::DegenerateHorizon {
            events: expected_per_batch as u64,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.stream);
    let inter = Exp::new(cfg.l).expect("positive rate");
    let service = Exp::new(cfg.costs.mu).expect("positive rate");
    let patience = Exp::new(cfg.costs.gamma).expect("positive rate");
    let cap = cfg.threshold.finite().unwrap_or(usize::MAX);
    let batch_len = (cfg.horizon - cfg.warmup) / cfg.batches as f64;

    let mut cal = Calendar {
        heap: BinaryHeap::new(),
        seq: 0,
    };
    let mut batches = vec![Batch::default(); cfg.batches];
    let mut waiting_flag: Vec<bool> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let (mut busy, mut waiting) = (0usize, 0usize);
    let mut counts = EventCounts {
        arrivals: 0,
        outsourced: 0,
        admitted: 0,
        served: 0,
        abandoned: 0,
        in_system_at_end: 0,
    };
    let mut now = 0.0;

    let batch_of = |t: f64| -> Option<usize> {
        if t < cfg.warmup {
            None
        } else {
            Some((((t - cfg.warmup) / batch_len) as usize).min(cfg.batches - 1))
        }
    };

    cal.push(inter.sample(&mut rng), Kind::Arrival);
    while let Some(Reverse(ev)) = cal.heap.pop() {
        let until = ev.time.min(cfg.horizon);
        // Spread the queue-length area over the batches the interval covers.
        let mut t = now;
        while t < until {
            let (b, end) = match batch_of(t) {
                None => (None, cfg.warmup.min(until)),
                Some(b) => {
                    let end = if b + 1 == cfg.batches {
                        until
                    } else {
                        (cfg.warmup + (b + 1) as f64 * batch_len).min(until)
                    };
                    (Some(b), end)
                }
            };
            if let Some(b) = b {
                batches[b].queue_area += waiting as f64 * (end - t);
            }
            if end <= t {
                break;
            }
            t = end;
        }
        now = until;
        if ev.time > cfg.horizon {
            break;
        }
        let slot = batch_of(ev.time);
        match ev.kind {
            Kind::Arrival => {
                counts.arrivals += 1;
                if let Some(b) = slot {
                    batches[b].arrivals += 1;
                }
                if busy + waiting >= cap {
                    counts.outsourced += 1;
                    if let Some(b) = slot {
                        batches[b].outsourced += 1;
                    }
                } else {
                    counts.admitted += 1;
                    if busy < cfg.servers {
                        busy += 1;
                        cal.push(ev.time + service.sample(&mut rng), Kind::Departure);
                    } else {
                        let id = waiting_flag.len();
                        waiting_flag.push(true);
                        queue.push_back(id);
                        waiting += 1;
                        cal.push(ev.time + patience.sample(&mut rng), Kind::Abandon(id));
                    }
                }
                cal.push(ev.time + inter.sample(&mut rng), Kind::Arrival);
            }
            Kind::Departure => {
                counts.served += 1;
                busy -= 1;
                while let Some(id) = queue.pop_front() {
                    if waiting_flag[id] {
                        waiting_flag[id] = false;
                        waiting -= 1;
                        busy += 1;
                        cal.push(ev.time + service.sample(&mut rng), Kind::Departure);
                        break;
                    }
                }
            }
            Kind::Abandon(id) => {
                if waiting_flag[id] {
                    waiting_flag[id] = false;
                    waiting -= 1;
                    counts.abandoned += 1;
                    if let Some(b) = slot {
                        batches[b].abandoned += 1;
                    }
                }
            }
        }
    }
    counts.in_system_at_end = (busy + waiting) as u64;

    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let c = &cfg.costs;
    let p_out: Vec<f64> = batches.iter().map(|b| ratio(b.outsourced, b.arrivals)).collect();
    let p_ab: Vec<f64> = batches.iter().map(|b| ratio(b.abandoned, b.arrivals)).collect();
    let q_bar: Vec<f64> = batches.iter().map(|b| b.queue_area / batch_len).collect();
    let z: Vec<f64> = batches
        .iter()
        .map(|b| (c.p * b.outsourced as f64 + c.a * b.abandoned as f64 + c.w * b.queue_area) / batch_len)
        .collect();
    Ok(SimEstimate {
        p_out: batch_interval(&p_out),
        p_ab: batch_interval(&p_ab),
        q_bar: batch_interval(&q_bar),
        z: batch_interval(&z),
        counts,
    })
}

fn batch_interval(values: &[f64]) -> Interval {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .expect("at least two batches")
        .inverse_cdf(0.975);
    Interval {
        mean,
        half_width: t * (var / n).sqrt(),
    }
}
