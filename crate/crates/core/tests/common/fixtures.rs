//! Grammars and inputs transcribed from the worked examples.

use spma::{parse_grammar, parse_symbols, Grammar, PatternId, SpPattern};

pub const SENTENCE_GRAMMAR: &str = "\
Vr 6 f a v o u r #Vr
V 7 Vr #Vr s #V
VP 3 V #V NP #NP #VP
N 4 f o r t u n e #N
NP 2 N #N #NP
S 0 NP #NP VP #VP #S
N 5 b r a v e #N
NP 1 D #D N #N #NP
D 8 t h e #D
";

pub const SENTENCE: &str = "f o r t u n e f a v o u r s t h e b r a v e";

/// Matched columns of the parse, as (row label, position) groups.
pub fn sentence_parse_columns() -> Vec<Vec<(&'static str, usize)>> {
    let mut cols: Vec<Vec<(&'static str, usize)>> = Vec::new();
    let runs: [(usize, &str, usize, usize); 5] =
        [(0, "N4", 2, 7), (7, "Vr6", 2, 6), (13, "V7", 4, 1), (14, "D8", 2, 3), (17, "N5", 2, 5)];
    for (new_start, label, pos_start, len) in runs {
        for k in 0..len {
            cols.push(vec![("New", new_start + k), (label, pos_start + k)]);
        }
    }
    let links: [(&str, usize, &str, usize); 16] = [
        ("Vr6", 0, "V7", 2),
        ("Vr6", 8, "V7", 3),
        ("V7", 0, "VP3", 2),
        ("V7", 5, "VP3", 3),
        ("VP3", 4, "NP1", 0),
        ("VP3", 5, "NP1", 6),
        ("VP3", 0, "S0", 4),
        ("VP3", 6, "S0", 5),
        ("N4", 0, "NP2", 2),
        ("N4", 9, "NP2", 3),
        ("NP2", 0, "S0", 2),
        ("NP2", 4, "S0", 3),
        ("N5", 0, "NP1", 4),
        ("N5", 7, "NP1", 5),
        ("NP1", 2, "D8", 0),
        ("NP1", 3, "D8", 5),
    ];
    for (a, pa, b, pb) in links {
        cols.push(vec![(a, pa), (b, pb)]);
    }
    for c in &mut cols {
        c.sort();
    }
    cols.sort();
    cols
}

pub const MENU_GRAMMAR: &str = "\
MU ST #ST MC #MC PD #PD #MU       | Prepare meal
ST 0 mussels #ST                  | Starter: mussels
ST 1 soup #ST                     | Starter: soup
ST 2 avocado #ST                  | Starter: avocado
MC 0 lasagna #MC                  | Main course: lasagna
MC 1 beef #MC                     | Main course: beef
MC 2 nut-roast #MC                | Main course: nut roast
MC 3 kipper #MC                   | Main course: kipper
MC 4 salad #MC                    | Main course: salad
PD 0 ice cream #PD                | Pudding: ice cream
PD 1 apple-crumble #PD            | Pudding: apple crumble
PD 2 fresh-fruit #PD              | Pudding: fresh fruit
PD 3 tiramisu #PD                 | Pudding: tiramisu
";

pub const MENU_ORDER: &str = "MU 0 4 1 #MU";

/// Symbols of the best menu alignment, one per column, top to bottom.
pub const MENU_COLUMNS: &str = "MU ST 0 mussels #ST MC 4 salad #MC PD 1 apple-crumble #PD #MU";

pub const CAR_GRAMMAR: &str = "\
block blockhead blockbody #block
engine block #block engine-control-unit crankshaft #crankshaft pistons #pistons valves #valves #engine
wheels wheel1 wheel2 #wheels
mycar name George #name engine #engine wheels #wheels body #body #mycar
doors door1 door2 #doors
body windscreen roof seats #seats dashboard #dashboard doors #doors #body
seats seat1 seat2 #seats
crankshaft csbody counterweights #counterweights #crankshaft
";

pub const CAR_FEATURES: [&str; 6] = ["blockhead", "engine-control-unit", "csbody", "wheel1", "seat2", "door1"];

/// Feature -> the pattern that houses it.
pub const CAR_HOUSING: [(&str, &str); 6] = [
    ("blockhead", "block"),
    ("engine-control-unit", "engine"),
    ("csbody", "crankshaft"),
    ("wheel1", "wheels"),
    ("seat2", "seats"),
    ("door1", "doors"),
];

pub const PLANT_GRAMMAR: &str = "\
<species> acris <genus> Ranunculus <stem> hairy </stem> <leaves> compound palmately-cut </leaves> <sepals> not-reflexed </sepals> <petals> <colour> yellow </colour> </petals> <habitat> meadows </habitat> <common-name> Meadow Buttercup </common-name> </genus> </species>
<phylum> Plants <feeding> has-chlorophyll photosynthesises <feeding> <structure> </structure> <habitat> </habitat> <common-name> </common-name> <food-value> </food-value> </phylum>
<class> Angiospermae <phylum> Plants <structure> <shoot> <stem> </stem> <leaves> </leaves> <flowers> </flowers> </shoot> <root> </root> </structure> </phylum> </class>
<order> Ranunculales <class> Angiospermae </class> </order>
<family> Ranunculaceae <order> Ranunculales <flowers> <arrangement> regular all-parts-free </arrangement> <sepals> </sepals> <petals> <number> </number> <colour> </colour> </petals> <hermaphrodite> <stamens> numerous </stamens> <pistil> ovary style stigma </pistil> </hermaphrodite> </flowers> <food-value> poisonous </food-value> </order> </family>
<genus> Ranunculus <family> Ranunculaceae <petals> <number> five </number> </petals> </family> </genus>
";

pub const PLANT_FEATURES: [&str; 5] = [
    "has-chlorophyll",
    "<stem> hairy </stem>",
    "<petals> yellow </petals>",
    "<stamens> numerous </stamens>",
    "<habitat> meadows </habitat>",
];

pub const PLANT_CHAIN: [&str; 6] = ["<species>", "<genus>", "<family>", "<order>", "<class>", "<phylum>"];

pub fn grammar(text: &str) -> Grammar {
    parse_grammar(text).expect("fixture grammar parses")
}

pub fn new_pattern(text: &str) -> SpPattern {
    SpPattern::new_pattern(PatternId(u32::MAX), parse_symbols(text).expect("fixture symbols")).expect("non-empty")
}

pub fn fragments(parts: &[&str]) -> SpPattern {
    new_pattern(&parts.join(" "))
}
