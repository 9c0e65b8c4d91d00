use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AttributeSchema, ClassLabel, Dataset, ICMP_SHORT_NAMES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttrDist {
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub label: ClassLabel,
    pub count: usize,
    pub attrs: IndexMap<String, AttrDist>,
}

/// Synthetic-dataset description, also the JSON file format read by
/// `mibguard synth --spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub seed: u64,
}

/// Per-class record counts of the eight-class preset, in class-index order.
pub const PRESET_COUNTS: [usize; 8] = [600, 632, 960, 773, 573, 780, 480, 200];

impl SynthSpec {
    /// Eight classes with the preset record counts over the six ICMP
    /// variables. Every class occupies its own narrow band on iIE and on iOE,
    /// so the classes are separable; Normal sits near zero on all counters and
    /// IcmpEcho around 10k echo requests per window.
    pub fn eight_class(seed: u64) -> SynthSpec {
        // (iOU, iIU, iIE, iOE) as (mean, stddev)
        const PROFILE: [[(f64, f64); 4]; 8] = [
            [(1.0, 1.0), (1.0, 1.0), (2.0, 1.0), (2.0, 1.0)],
            [(5.0, 2.0), (5.0, 2.0), (10_000.0, 250.0), (10_000.0, 250.0)],
            [(5.0, 2.0), (5.0, 2.0), (1250.0, 8.0), (7500.0, 8.0)],
            [(3000.0, 200.0), (5.0, 2.0), (2500.0, 8.0), (6250.0, 8.0)],
            [(5.0, 2.0), (5.0, 2.0), (3750.0, 8.0), (5000.0, 8.0)],
            [(5.0, 2.0), (5.0, 2.0), (5000.0, 8.0), (3750.0, 8.0)],
            [(5.0, 2.0), (5.0, 2.0), (6250.0, 8.0), (2500.0, 8.0)],
            [(5.0, 2.0), (5.0, 2.0), (7500.0, 8.0), (1250.0, 8.0)],
        ];
        let classes = ClassLabel::ALL
            .iter()
            .zip(PROFILE.iter())
            .map(|(&label, p)| {
                let [ou, iu, ie, oe] = *p;
                let d = |(mean, stddev): (f64, f64)| AttrDist { mean, stddev };
                // message totals are roughly echoes plus unreachables
                let om = (oe.0 + ou.0, (oe.1 * oe.1 + ou.1 * ou.1).sqrt());
                let im = (ie.0 + iu.0, (ie.1 * ie.1 + iu.1 * iu.1).sqrt());
                let attrs = ICMP_SHORT_NAMES
                    .iter()
                    .zip([om, im, ou, iu, ie, oe])
                    .map(|(n, v)| (n.to_string(), d(v)))
                    .collect();
                ClassSpec {
                    label,
                    count: PRESET_COUNTS[label.index()],
                    attrs,
                }
            })
            .collect();
        SynthSpec { classes, seed }
    }

    fn schema(&self) -> Result<AttributeSchema> {
        let first = self
            .classes
            .first()
            .ok_or_else(|| Error::invalid("synthetic spec has no classes"))?;
        let names: Vec<&String> = first.attrs.keys().collect();
        for class in &self.classes {
            if class.attrs.len() != names.len() || names.iter().any(|n| !class.attrs.contains_key(*n)) {
                return Err(Error::invalid(format!(
                    "class {} must list the same attributes as {}",
                    class.label, first.label
                )));
            }
            for (name, dist) in &class.attrs {
                if !dist.mean.is_finite() || !dist.stddev.is_finite() || dist.stddev < 0.0 {
                    return Err(Error::invalid(format!(
                        "class {} attribute {name}: need finite mean and stddev >= 0",
                        class.label
                    )));
                }
            }
        }
        AttributeSchema::new(names.into_iter().cloned())
    }
}

fn truncated_normal<R: Rng>(rng: &mut R, dist: AttrDist) -> f64 {
    if dist.stddev == 0.0 {
        return dist.mean.max(0.0);
    }
    let normal = Normal::new(dist.mean, dist.stddev).expect("stddev validated");
    // rejection sampling; the cap only matters for means far below zero
    for _ in 0..10_000 {
        let x = normal.sample(rng);
        if x >= 0.0 {
            return x;
        }
    }
    0.0
}

/// Draws records class by class in spec order, attributes in schema order,
/// from normals truncated at zero.
pub fn synth_generate(spec: &SynthSpec) -> Result<Dataset> {
    let schema = spec.schema()?;
    let total: usize = spec.classes.iter().map(|c| c.count).sum();
    if total == 0 {
        return Err(Error::invalid("synthetic spec: all class counts are zero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for class in &spec.classes {
        let dists: Vec<AttrDist> = schema.names().iter().map(|n| class.attrs[n]).collect();
        for _ in 0..class.count {
            rows.push(dists.iter().map(|&d| truncated_normal(&mut rng, d)).collect());
            labels.push(class.label);
        }
    }
    Dataset::new(schema, rows, labels)
}
