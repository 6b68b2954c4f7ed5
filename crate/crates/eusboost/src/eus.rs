//! Evolutionary undersampling: genetic search over majority-class subsets
//! maximizing a leave-one-out 1-NN geometric-mean fitness with a balance
//! penalty and, across boosting rounds, a Hamming-distance diversity bonus.

use std::cmp::Ordering;

use rand::Rng;

use crate::dataset::{ClassLabel, Dataset};
use crate::metrics::{self, ConfusionMatrix};
use crate::{Error, Result, Scalar};

/// Binary mask over the majority instances; bit j selects majority instance j
/// (in `partition_by_class` order). At least one bit must be set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chromosome {
    pub mask: Vec<bool>,
}

impl Chromosome {
    pub fn new(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn all_ones(len: usize) -> Self {
        Self { mask: vec![true; len] }
    }

    pub fn ones(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_valid(&self) -> bool {
        self.mask.iter().any(|b| *b)
    }

    fn normalized_hamming(&self, other: &Chromosome) -> f64 {
        let differing = self.mask.iter().zip(&other.mask).filter(|(a, b)| a != b).count();
        differing as f64 / self.mask.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EusConfig {
    pub population: usize,
    /// Balance penalty P on |1 - n_selected / n_minority|.
    pub penalty: f64,
    /// Diversity weight lambda mixing in the Hamming distance to prior masks.
    pub diversity_weight: f64,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means 1 / n_majority.
    pub mutation_rate: Option<f64>,
    pub max_evaluations: usize,
    pub elitism: usize,
}

impl Default for EusConfig {
    fn default() -> Self {
        Self {
            population: 50,
            penalty: 0.2,
            diversity_weight: 0.25,
            crossover_rate: 0.8,
            mutation_rate: None,
            max_evaluations: 5000,
            elitism: 1,
        }
    }
}

impl EusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidConfig("population must be >= 2".into()));
        }
        for (name, rate) in [
            ("crossover_rate", Some(self.crossover_rate)),
            ("mutation_rate", self.mutation_rate),
            ("diversity_weight", Some(self.diversity_weight)),
        ] {
            if let Some(r) = rate {
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::InvalidConfig(format!("{name} {r} outside [0, 1]")));
                }
            }
        }
        if self.max_evaluations < self.population {
            return Err(Error::InvalidConfig("max_evaluations must be >= population".into()));
        }
        Ok(())
    }
}

/// Dataset plus the masks selected in earlier boosting rounds.
pub struct EusContext<'a, F> {
    pub dataset: &'a Dataset<F>,
    pub prior_masks: &'a [Chromosome],
}

impl<'a, F: Scalar> EusContext<'a, F> {
    pub fn new(dataset: &'a Dataset<F>) -> Self {
        Self { dataset, prior_masks: &[] }
    }

    pub fn with_priors(dataset: &'a Dataset<F>, prior_masks: &'a [Chromosome]) -> Self {
        Self { dataset, prior_masks }
    }
}

fn squared_distance<F: Scalar>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        acc = acc + d * d;
    }
    acc
}

/// Leave-one-out 1-NN evaluation of the candidate set (all minority plus the
/// selected majority), summarized by the geometric mean. Distance ties break
/// toward the lower instance id.
pub fn loo_1nn_gm<F: Scalar>(ds: &Dataset<F>, chrom: &Chromosome) -> Result<f64> {
    let candidates = candidate_ids(ds, chrom)?;
    if candidates.len() < 2 {
        return Err(Error::CandidateSetTooSmall);
    }
    let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
    for &i in &candidates {
        let mut best: Option<(F, usize)> = None;
        for &j in &candidates {
            if j == i {
                continue;
            }
            let d = squared_distance(&ds.instance(i).features, &ds.instance(j).features);
            let closer = match &best {
                None => true,
                Some((bd, bj)) => d < *bd || (d == *bd && j < *bj),
            };
            if closer {
                best = Some((d, j));
            }
        }
        tally(&mut cm, ds.label(best.unwrap().1), ds.label(i));
    }
    metrics::geometric_mean(&cm)
}

fn candidate_ids<F: Scalar>(ds: &Dataset<F>, chrom: &Chromosome) -> Result<Vec<usize>> {
    let (minority, majority) = ds.partition_by_class();
    if chrom.mask.len() != majority.len() {
        return Err(Error::LengthMismatch { left: chrom.mask.len(), right: majority.len() });
    }
    if !chrom.is_valid() {
        return Err(Error::InvalidConfig("empty majority selection".into()));
    }
    let mut ids = minority;
    ids.extend(majority.iter().zip(&chrom.mask).filter_map(|(&id, &sel)| sel.then_some(id)));
    ids.sort_unstable();
    Ok(ids)
}

fn tally(cm: &mut ConfusionMatrix, predicted: ClassLabel, actual: ClassLabel) {
    match (actual, predicted) {
        (ClassLabel::Positive, ClassLabel::Positive) => cm.true_pos += 1,
        (ClassLabel::Positive, ClassLabel::Negative) => cm.false_neg += 1,
        (ClassLabel::Negative, ClassLabel::Positive) => cm.false_pos += 1,
        (ClassLabel::Negative, ClassLabel::Negative) => cm.true_neg += 1,
    }
}

/// Precomputed per-instance neighbor orderings, shared across the many
/// fitness evaluations of one GA run. Yields exactly the same leave-one-out
/// results as [`loo_1nn_gm`].
pub struct NeighborTable {
    sorted: Vec<Vec<u32>>,
}

impl NeighborTable {
    pub fn build<F: Scalar>(ds: &Dataset<F>) -> Self {
        let n = ds.n();
        let mut sorted = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<F> = (0..n)
                .map(|j| squared_distance(&ds.instance(i).features, &ds.instance(j).features))
                .collect();
            let mut ids: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i).collect();
            ids.sort_by(|&a, &b| {
                row[a as usize].partial_cmp(&row[b as usize]).unwrap().then(a.cmp(&b))
            });
            sorted.push(ids);
        }
        Self { sorted }
    }

    /// Leave-one-out counts over the instances flagged in `in_set`.
    fn loo_counts<F: Scalar>(&self, ds: &Dataset<F>, in_set: &[bool]) -> ConfusionMatrix {
        let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
        for i in 0..in_set.len() {
            if !in_set[i] {
                continue;
            }
            let neighbor = self.sorted[i]
                .iter()
                .find(|&&j| in_set[j as usize])
                .expect("candidate set has at least two members");
            tally(&mut cm, ds.label(*neighbor as usize), ds.label(i));
        }
        cm
    }
}

fn combined_fitness(
    base_gm: Option<f64>,
    n_selected: usize,
    n_min: usize,
    cfg: &EusConfig,
    priors: &[Chromosome],
    chrom: &Chromosome,
) -> f64 {
    let base = match base_gm {
        Some(gm) => gm - cfg.penalty * (1.0 - n_selected as f64 / n_min as f64).abs(),
        None => 0.0,
    };
    if priors.is_empty() {
        return base;
    }
    let diversity = priors
        .iter()
        .map(|p| chrom.normalized_hamming(p))
        .fold(f64::INFINITY, f64::min);
    (1.0 - cfg.diversity_weight) * base + cfg.diversity_weight * diversity
}

/// Fitness of a chromosome: GM of the LOO 1-NN evaluation minus the balance
/// penalty, blended with the diversity term when prior masks exist.
/// Degenerate evaluations score a base of 0 instead of erroring.
pub fn fitness<F: Scalar>(ctx: &EusContext<F>, chrom: &Chromosome, cfg: &EusConfig) -> f64 {
    let n_min = ctx.dataset.count(ClassLabel::Positive).max(1);
    let base_gm = loo_1nn_gm(ctx.dataset, chrom).ok();
    combined_fitness(base_gm, chrom.ones(), n_min, cfg, ctx.prior_masks, chrom)
}

/// Fitness ordering: higher fitness wins; ties go to fewer selected bits,
/// then the lexicographically smaller mask.
fn rank(a_fit: f64, a: &Chromosome, b_fit: f64, b: &Chromosome) -> Ordering {
    b_fit
        .partial_cmp(&a_fit)
        .unwrap()
        .then_with(|| a.ones().cmp(&b.ones()))
        .then_with(|| a.mask.cmp(&b.mask))
}

struct Evaluator<'a, F> {
    ds: &'a Dataset<F>,
    table: NeighborTable,
    minority_flags: Vec<bool>,
    majority_ids: Vec<usize>,
    n_min: usize,
    scratch: Vec<bool>,
}

impl<'a, F: Scalar> Evaluator<'a, F> {
    fn new(ds: &'a Dataset<F>) -> Result<Self> {
        let (minority, majority) = ds.partition_by_class();
        if minority.is_empty() {
            return Err(Error::DegenerateDataset { class: "positive" });
        }
        if majority.is_empty() {
            return Err(Error::DegenerateDataset { class: "negative" });
        }
        let mut minority_flags = vec![false; ds.n()];
        for &id in &minority {
            minority_flags[id] = true;
        }
        Ok(Self {
            ds,
            table: NeighborTable::build(ds),
            n_min: minority.len(),
            minority_flags,
            majority_ids: majority,
            scratch: vec![false; ds.n()],
        })
    }

    fn n_maj(&self) -> usize {
        self.majority_ids.len()
    }

    fn eval(&mut self, chrom: &Chromosome, cfg: &EusConfig, priors: &[Chromosome]) -> f64 {
        self.scratch.copy_from_slice(&self.minority_flags);
        for (bit, &id) in chrom.mask.iter().zip(&self.majority_ids) {
            if *bit {
                self.scratch[id] = true;
            }
        }
        let cm = self.table.loo_counts(self.ds, &self.scratch);
        let gm = metrics::geometric_mean(&cm).ok();
        combined_fitness(gm, chrom.ones(), self.n_min, cfg, priors, chrom)
    }
}

#[derive(Clone)]
struct Scored {
    chrom: Chromosome,
    fitness: f64,
}

/// Generational GA over majority masks. Returns the best chromosome ever
/// evaluated; deterministic given the RNG state.
pub fn evolve<F: Scalar, R: Rng>(
    ctx: &EusContext<F>,
    cfg: &EusConfig,
    rng: &mut R,
) -> Result<Chromosome> {
    cfg.validate()?;
    let mut ev = Evaluator::new(ctx.dataset)?;
    let n_maj = ev.n_maj();
    if n_maj == 1 {
        return Ok(Chromosome::all_ones(1));
    }
    let mutation = cfg.mutation_rate.unwrap_or(1.0 / n_maj as f64);
    let init_bias = (ev.n_min as f64 / n_maj as f64).min(1.0);

    let random_chrom = |rng: &mut R| {
        let mut mask: Vec<bool> = (0..n_maj).map(|_| rng.gen_bool(init_bias)).collect();
        if !mask.iter().any(|b| *b) {
            mask[rng.gen_range(0..n_maj)] = true;
        }
        Chromosome::new(mask)
    };

    let mut evaluations = 0usize;
    let mut population: Vec<Scored> = Vec::with_capacity(cfg.population);
    let mut pop_chroms = vec![Chromosome::all_ones(n_maj)];
    while pop_chroms.len() < cfg.population {
        pop_chroms.push(random_chrom(rng));
    }
    for chrom in pop_chroms {
        let fitness = ev.eval(&chrom, cfg, ctx.prior_masks);
        evaluations += 1;
        population.push(Scored { chrom, fitness });
    }

    let mut best = population
        .iter()
        .cloned()
        .min_by(|a, b| rank(a.fitness, &a.chrom, b.fitness, &b.chrom))
        .unwrap();

    while evaluations < cfg.max_evaluations {
        population.sort_by(|a, b| rank(a.fitness, &a.chrom, b.fitness, &b.chrom));
        let mut next: Vec<Scored> = population.iter().take(cfg.elitism).cloned().collect();
        while next.len() < cfg.population && evaluations < cfg.max_evaluations {
            let tournament = |rng: &mut R, pop: &[Scored]| -> Chromosome {
                let a = rng.gen_range(0..pop.len());
                let b = rng.gen_range(0..pop.len());
                let winner = if rank(pop[a].fitness, &pop[a].chrom, pop[b].fitness, &pop[b].chrom)
                    == Ordering::Less
                {
                    a
                } else {
                    b
                };
                pop[winner].chrom.clone()
            };
            let parent_a = tournament(rng, &population);
            let parent_b = tournament(rng, &population);
            let (mut child_a, mut child_b) = if rng.gen_bool(cfg.crossover_rate) {
                let mut a = Vec::with_capacity(n_maj);
                let mut b = Vec::with_capacity(n_maj);
                for j in 0..n_maj {
                    if rng.gen_bool(0.5) {
                        a.push(parent_a.mask[j]);
                        b.push(parent_b.mask[j]);
                    } else {
                        a.push(parent_b.mask[j]);
                        b.push(parent_a.mask[j]);
                    }
                }
                (Chromosome::new(a), Chromosome::new(b))
            } else {
                (parent_a, parent_b)
            };
            for child in [&mut child_a, &mut child_b] {
                for bit in child.mask.iter_mut() {
                    if rng.gen_bool(mutation) {
                        *bit = !*bit;
                    }
                }
                if !child.is_valid() {
                    child.mask[rng.gen_range(0..n_maj)] = true;
                }
            }
            for child in [child_a, child_b] {
                if next.len() >= cfg.population || evaluations >= cfg.max_evaluations {
                    break;
                }
                let fitness = ev.eval(&child, cfg, ctx.prior_masks);
                evaluations += 1;
                if rank(fitness, &child, best.fitness, &best.chrom) == Ordering::Less {
                    best = Scored { chrom: child.clone(), fitness };
                }
                next.push(Scored { chrom: child, fitness });
            }
        }
        population = next;
    }
    Ok(best.chrom)
}

/// Enumerates every non-empty mask (n_maj <= 16) and returns the fittest with
/// the same tie rules as [`evolve`].
pub fn exhaustive_best<F: Scalar>(
    ctx: &EusContext<F>,
    cfg: &EusConfig,
) -> Result<(Chromosome, f64)> {
    let mut ev = Evaluator::new(ctx.dataset)?;
    let n_maj = ev.n_maj();
    if n_maj > 16 {
        return Err(Error::ExhaustiveTooLarge(n_maj));
    }
    let mut best: Option<Scored> = None;
    for bits in 1u32..(1 << n_maj) {
        let chrom = Chromosome::new((0..n_maj).map(|j| bits & (1 << j) != 0).collect());
        let fitness = ev.eval(&chrom, cfg, ctx.prior_masks);
        let wins = match &best {
            None => true,
            Some(b) => rank(fitness, &chrom, b.fitness, &b.chrom) == Ordering::Less,
        };
        if wins {
            best = Some(Scored { chrom, fitness });
        }
    }
    let best = best.unwrap();
    Ok((best.chrom, best.fitness))
}

/// New dataset holding every minority instance plus the selected majority
/// instances; the returned id list maps each new instance back to its source.
pub fn materialize_subset<F: Scalar>(
    ds: &Dataset<F>,
    chrom: &Chromosome,
) -> Result<(Dataset<F>, Vec<usize>)> {
    let ids = candidate_ids(ds, chrom)?;
    Ok((ds.take(&ids), ids))
}
