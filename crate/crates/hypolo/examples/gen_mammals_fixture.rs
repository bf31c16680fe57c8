//! Generates `data/mammals_poincare.tsv`: a synthetic Poincaré-disk
//! embedding of a mammal taxonomy (1 root + 15 orders + 72 families +
//! 1092 species = 1180 inliers) corrupted by 11 non-mammal nouns.
//!
//! Layout follows the usual tree-embedding picture: depth maps to
//! hyperbolic radius (Euclidean norm tanh(rho/2)), each order owns an
//! angular wedge sized by its species count, families subdivide the
//! wedge, and species scatter inside the family sub-wedge. The eleven
//! non-mammal nouns sit in angular gaps the taxonomy does not occupy,
//! at mixed radii, so they are sparse relative to species-level density
//! without forming a cluster of their own.
//!
//! Run from the workspace root:
//!     cargo run --release --example gen_mammals_fixture

use std::f64::consts::TAU;
use std::path::Path;

use hypolo::datasets::{save_embedding, Dataset, Label};
use hypolo::geometry::DiskPoint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

/// Hyperbolic radius of each taxonomy level, before jitter.
const RHO_ORDER: f64 = 2.2;
const RHO_FAMILY: f64 = 4.4;
const RHO_SPECIES: f64 = 6.0;

/// Angular budget: one reserved sector models the direction of the rest
/// of the lexicon; guard gaps separate order wedges; outlier voids are
/// widened inter-family boundaries that host the planted non-mammals.
const RESERVED_SECTOR: f64 = 0.2;
const GUARD_GAP: f64 = 0.025;
const OUTLIER_VOID: f64 = 0.05;

/// (order index, boundary after this family index) pairs that get an
/// outlier void; 11 in total, spread over the eight largest orders.
const VOID_SITES: &[(usize, usize)] = &[
    (0, 2),
    (0, 5),
    (0, 8),
    (1, 3),
    (1, 6),
    (2, 1),
    (3, 3),
    (4, 4),
    (5, 3),
    (6, 2),
    (7, 1),
];

struct Order {
    name: &'static str,
    families: &'static [&'static str],
    species: usize,
}

const ORDERS: &[Order] = &[
    Order {
        name: "rodentia",
        families: &[
            "muridae",
            "cricetidae",
            "sciuridae",
            "heteromyidae",
            "dipodidae",
            "castoridae",
            "geomyidae",
            "erethizontidae",
            "caviidae",
            "chinchillidae",
            "octodontidae",
            "gliridae",
            "hystricidae",
        ],
        species: 260,
    },
    Order {
        name: "chiroptera",
        families: &[
            "vespertilionidae",
            "pteropodidae",
            "phyllostomidae",
            "molossidae",
            "rhinolophidae",
            "hipposideridae",
            "emballonuridae",
            "nycteridae",
            "natalidae",
            "mormoopidae",
        ],
        species: 170,
    },
    Order {
        name: "soricomorpha",
        families: &["soricidae", "talpidae", "solenodontidae", "nesophontidae"],
        species: 90,
    },
    Order {
        name: "primates",
        families: &[
            "cebidae",
            "cercopithecidae",
            "hominidae",
            "hylobatidae",
            "lemuridae",
            "lorisidae",
            "tarsiidae",
        ],
        species: 95,
    },
    Order {
        name: "carnivora",
        families: &[
            "felidae",
            "canidae",
            "ursidae",
            "mustelidae",
            "procyonidae",
            "herpestidae",
            "hyaenidae",
            "phocidae",
            "otariidae",
        ],
        species: 120,
    },
    Order {
        name: "artiodactyla",
        families: &[
            "bovidae",
            "cervidae",
            "suidae",
            "camelidae",
            "giraffidae",
            "hippopotamidae",
            "tayassuidae",
            "antilocapridae",
        ],
        species: 105,
    },
    Order {
        name: "cetacea",
        families: &[
            "delphinidae",
            "balaenopteridae",
            "phocoenidae",
            "ziphiidae",
            "physeteridae",
        ],
        species: 45,
    },
    Order {
        name: "diprotodontia",
        families: &["macropodidae", "phalangeridae", "potoroidae", "vombatidae"],
        species: 55,
    },
    Order {
        name: "lagomorpha",
        families: &["leporidae", "ochotonidae"],
        species: 35,
    },
    Order {
        name: "didelphimorphia",
        families: &["didelphidae"],
        species: 25,
    },
    Order {
        name: "dasyuromorphia",
        families: &["dasyuridae", "myrmecobiidae"],
        species: 20,
    },
    Order {
        name: "afrosoricida",
        families: &["tenrecidae", "chrysochloridae"],
        species: 20,
    },
    Order {
        name: "erinaceomorpha",
        families: &["erinaceidae"],
        species: 12,
    },
    Order {
        name: "macroscelidea",
        families: &["macroscelididae"],
        species: 10,
    },
    Order {
        name: "perissodactyla",
        families: &["equidae", "rhinocerotidae", "tapiridae"],
        species: 30,
    },
];

/// Non-mammal nouns planted as outliers: (name, rho, theta slot).
/// Angles are filled in relative to the computed gap layout below.
const OUTLIER_NAMES: [&str; 11] = [
    "ostrich",
    "kingfisher",
    "salmon",
    "iguana",
    "cobra",
    "bullfrog",
    "lobster",
    "honeybee",
    "oak",
    "fern",
    "granite",
];

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / 9007199254740992.0
}

fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform01(rng)
}

fn polar(rho: f64, theta: f64) -> DiskPoint {
    let r = (rho / 2.0).tanh();
    DiskPoint::new(r * theta.cos(), r * theta.sin()).expect("polar point is inside the disk")
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let total_species: usize = ORDERS.iter().map(|o| o.species).sum();
    let total_families: usize = ORDERS.iter().map(|o| o.families.len()).sum();
    assert_eq!(total_species, 1092, "species budget");
    assert_eq!(total_families, 72, "family budget");
    assert_eq!(ORDERS.len(), 15, "order budget");

    let usable = TAU - RESERVED_SECTOR - GUARD_GAP * ORDERS.len() as f64;

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut names = Vec::new();
    let mut push = |p: DiskPoint, label: Label, name: String| {
        points.push(p);
        labels.push(Some(label));
        names.push(Some(name));
    };

    push(polar(0.0, 0.0), Label::Inlier, "mammal".to_string());

    // Wedges start after the reserved sector, which is centered on 0.
    let mut theta = RESERVED_SECTOR / 2.0;
    let mut gap_centers = Vec::new();
    struct Wedge {
        start: f64,
        width: f64,
        order: usize,
    }
    let mut wedges = Vec::new();
    for (oi, order) in ORDERS.iter().enumerate() {
        gap_centers.push(theta + GUARD_GAP / 2.0);
        theta += GUARD_GAP;
        let width = usable * order.species as f64 / total_species as f64;
        wedges.push(Wedge { start: theta, width, order: oi });
        theta += width;
    }

    // Orders, then families, then species, so ids group by depth.
    for w in &wedges {
        let order = &ORDERS[w.order];
        let center = w.start + w.width / 2.0;
        let rho = RHO_ORDER + uniform_in(&mut rng, -0.1, 0.1);
        push(polar(rho, center), Label::Inlier, order.name.to_string());
    }

    // Species are split over each order's families by largest remainder
    // on jittered weights, so family sizes vary but totals are exact.
    let mut family_sizes: Vec<Vec<usize>> = Vec::new();
    for order in ORDERS {
        let weights: Vec<f64> =
            order.families.iter().map(|_| 0.6 + uniform01(&mut rng)).collect();
        let total_w: f64 = weights.iter().sum();
        let mut sizes: Vec<usize> = weights
            .iter()
            .map(|w| (w / total_w * order.species as f64).floor() as usize)
            .collect();
        let mut short = order.species - sizes.iter().sum::<usize>();
        let mut by_frac: Vec<usize> = (0..sizes.len()).collect();
        by_frac.sort_by(|&a, &b| {
            let fa = weights[a] / total_w * order.species as f64 - sizes[a] as f64;
            let fb = weights[b] / total_w * order.species as f64 - sizes[b] as f64;
            fb.partial_cmp(&fa).expect("finite fractions")
        });
        for &i in by_frac.iter().cycle().take(sizes.len() * 2) {
            if short == 0 {
                break;
            }
            sizes[i] += 1;
            short -= 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), order.species);
        family_sizes.push(sizes);
    }

    // Family hubs, each centered in a sub-wedge sized by species share.
    // At the selected boundaries an outlier void is inserted between the
    // two family slots; its center is remembered for outlier placement.
    struct FamilySlot {
        start: f64,
        width: f64,
        name: &'static str,
        count: usize,
    }
    let mut family_slots = Vec::new();
    let mut void_centers = Vec::new();
    for w in &wedges {
        let order = &ORDERS[w.order];
        let sizes = &family_sizes[w.order];
        let voids_here = VOID_SITES.iter().filter(|(oi, _)| *oi == w.order).count();
        let inner = w.width * 0.92 - OUTLIER_VOID * voids_here as f64;
        assert!(inner > 0.0, "order wedge {} too thin for its voids", order.name);
        let mut t = w.start + (w.width * 0.08) / 2.0;
        for (fi, &fam) in order.families.iter().enumerate() {
            let fw = inner * sizes[fi] as f64 / order.species as f64;
            family_slots.push(FamilySlot { start: t, width: fw, name: fam, count: sizes[fi] });
            t += fw;
            if VOID_SITES.contains(&(w.order, fi)) {
                void_centers.push(t + OUTLIER_VOID / 2.0);
                t += OUTLIER_VOID;
            }
        }
    }
    assert_eq!(void_centers.len(), OUTLIER_NAMES.len(), "one void per outlier");
    for slot in &family_slots {
        let rho = RHO_FAMILY + uniform_in(&mut rng, -0.15, 0.15);
        push(polar(rho, slot.start + slot.width / 2.0), Label::Inlier, slot.name.to_string());
    }

    // Species scatter in the central 80% of the family sub-wedge.
    for slot in &family_slots {
        let margin = slot.width * 0.1;
        for si in 0..slot.count {
            let ang = uniform_in(&mut rng, slot.start + margin, slot.start + slot.width - margin);
            let rho = RHO_SPECIES + uniform_in(&mut rng, -0.3, 0.3);
            push(polar(rho, ang), Label::Inlier, format!("{}_sp{si:03}", slot.name));
        }
    }

    // Outliers hug the taxonomy instead of drifting in empty space: a
    // point deep in the void between wedges has only other sparse points
    // as neighbors, which washes out its relative-density signal. Each
    // one sits at species radius in the center of a widened inter-family
    // boundary, so it is several species-spacings from anything while its
    // nearest neighbors are dense species clusters.
    let _ = &gap_centers;
    for (&th, name) in void_centers.iter().zip(OUTLIER_NAMES) {
        let rho = RHO_SPECIES + uniform_in(&mut rng, -0.2, 0.2);
        push(polar(rho, th), Label::Outlier, name.to_string());
    }

    let n = points.len();
    assert_eq!(n, 1191, "fixture row budget");
    let data = Dataset::from_parts(points, labels, names).expect("generated dataset is valid");
    save_embedding(&data, Path::new("data/mammals_poincare.tsv")).expect("fixture written");
    println!("wrote data/mammals_poincare.tsv ({n} rows)");
}
