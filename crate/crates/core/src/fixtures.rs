//! Bundled example corpora and a seeded synthetic corpus generator.
//!
//! The generator drives the property suites: every corpus it emits passes
//! [`validate_corpus`](crate::validate::validate_corpus), and the same
//! parameters always yield the same corpus. Randomness comes from ChaCha8
//! seeded with the 64-bit seed.

use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotation::{
    ActionTriple, AnnotationCorpus, Event, EventSegment, MacroEvent, NarrativeRole,
    PanelAnnotation, ShotType, Utterance,
};

/// The two monologue lines of the `Intro_1` event.
pub const INTRO_1_LINES: [&str; 2] = [
    "Before I knew it, it was May, the season when young leaves are the most beautiful.",
    "I had just started living on my own.",
];

fn action(agent: &str, verb: &str, object: Option<&str>) -> ActionTriple {
    ActionTriple {
        agent: agent.into(),
        verb: verb.into(),
        object: object.map(Into::into),
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| (*s).to_owned()).collect()
}

/// Nine-panel "Think of family" story with events `Intro_1` and `Intro_2`.
///
/// Character A appears in 0_0_0, 0_0_1, 0_1_1, 0_2_2; B in 0_0_1, 0_1_0,
/// 0_2_1. Actions in reading order are hold_hand, look_at_letter,
/// cook_rice, walk_away (cook_rice occurs twice).
pub fn paper_fixture() -> AnnotationCorpus {
    let mut c = AnnotationCorpus::empty("family_story");
    c.macro_events.push(MacroEvent {
        id: "think_of_family".into(),
        label: "Think of family".into(),
        description: "The narrator settles into living alone and thinks of home.".into(),
    });
    for (id, label, desc) in [
        (
            "intro_1",
            "Intro_1",
            "Spring arrives and the narrator has just moved out.",
        ),
        (
            "intro_2",
            "Intro_2",
            "A letter and a home-cooked dinner bring back family.",
        ),
    ] {
        c.events.push(Event {
            id: id.into(),
            macro_event_id: "think_of_family".into(),
            label: label.into(),
            description: desc.into(),
        });
    }
    for (id, event, role, desc) in [
        (
            "s1",
            "intro_1",
            NarrativeRole::Establisher,
            "Setting the season.",
        ),
        (
            "s2",
            "intro_2",
            NarrativeRole::Peak,
            "Reading the letter while dinner cooks.",
        ),
        (
            "s3",
            "intro_2",
            NarrativeRole::Release,
            "Leaving the table.",
        ),
    ] {
        c.segments.push(EventSegment {
            id: id.into(),
            event_id: event.into(),
            narrative_role: Some(role),
            description: desc.into(),
        });
    }

    let panel = |id: &str, seg: &str, order: u32, shot: ShotType, chars: &[&str]| {
        let mut p = PanelAnnotation::empty(id, seg, order);
        p.page_index = order / 3;
        p.shot_type = shot;
        p.image_path = Some(format!("images/{id}.jpg"));
        p.characters = strings(chars);
        p
    };

    let mut p = panel("0_0_0", "s1", 0, ShotType::LongShot, &["A"]);
    p.background = Some("riverside".into());
    p.objects = strings(&["tree"]);
    p.actions = vec![action("A", "hold_hand", Some("B"))];
    p.dialogues = vec![Utterance::dialogue("d0", INTRO_1_LINES[0], Some("A"))];
    p.event_description = Some("Young leaves along the river in May.".into());
    c.panels.push(p);

    let mut p = panel("0_0_1", "s1", 1, ShotType::MediumShot, &["A", "B"]);
    p.objects = strings(&["letter"]);
    p.actions = vec![action("A", "look_at_letter", Some("letter"))];
    p.dialogues = vec![Utterance::dialogue("d1", INTRO_1_LINES[1], Some("A"))];
    c.panels.push(p);

    let mut p = panel("0_0_2", "s1", 2, ShotType::None, &[]);
    p.captions = vec![Utterance::caption("c0", "May.")];
    c.panels.push(p);

    let mut p = panel("0_1_0", "s2", 3, ShotType::MediumLongShot, &["B"]);
    p.background = Some("kitchen".into());
    p.objects = strings(&["pot", "rice"]);
    p.actions = vec![action("B", "cook_rice", Some("pot"))];
    p.dialogues = vec![Utterance::dialogue(
        "d2",
        "Dinner is almost ready.",
        Some("B"),
    )];
    c.panels.push(p);

    let mut p = panel("0_1_1", "s2", 4, ShotType::CloseShot, &["A"]);
    p.dialogues = vec![Utterance::dialogue("d3", "It smells like home.", Some("A"))];
    c.panels.push(p);

    let mut p = panel("0_1_2", "s2", 5, ShotType::HighAngle, &[]);
    p.background = Some("kitchen".into());
    p.objects = strings(&["table"]);
    p.captions = vec![Utterance::caption("c1", "The evening grew quiet.")];
    c.panels.push(p);

    let mut p = panel("0_2_0", "s3", 6, ShotType::LongShot, &[]);
    p.background = Some("apartment".into());
    c.panels.push(p);

    let mut p = panel("0_2_1", "s3", 7, ShotType::MediumShot, &["B"]);
    p.objects = strings(&["rice"]);
    p.actions = vec![action("B", "cook_rice", Some("rice"))];
    c.panels.push(p);

    let mut p = panel("0_2_2", "s3", 8, ShotType::FullShot, &["A"]);
    p.actions = vec![action("A", "walk_away", None)];
    p.dialogues = vec![Utterance::dialogue("d4", "I'll call them tomorrow.", None)];
    c.panels.push(p);

    c
}

/// The 25 distinct verbs of [`lexical_fixture`]; `insert` is the first.
pub const LEXICAL_VERBS: [&str; 25] = [
    "insert",
    "give",
    "open_door",
    "close_window",
    "pick_up",
    "put_down",
    "read_book",
    "write_letter",
    "wash_dish",
    "sweep_floor",
    "fold_cloth",
    "pour_tea",
    "drink_tea",
    "eat_rice",
    "cut_vegetable",
    "boil_water",
    "hang_laundry",
    "water_plant",
    "feed_cat",
    "lock_door",
    "turn_on_light",
    "sit_down",
    "stand_up",
    "wave_hand",
    "sleep",
];

/// One macro-event ("Daily chores") whose five panels carry 25 distinct verbs.
pub fn lexical_fixture() -> AnnotationCorpus {
    let mut c = AnnotationCorpus::empty("chores_story");
    c.macro_events.push(MacroEvent {
        id: "daily_chores".into(),
        label: "Daily chores".into(),
        description: "An ordinary day at home.".into(),
    });
    c.events.push(Event {
        id: "morning".into(),
        macro_event_id: "daily_chores".into(),
        label: "Morning".into(),
        description: "Chores before noon.".into(),
    });
    c.segments.push(EventSegment {
        id: "chores".into(),
        event_id: "morning".into(),
        narrative_role: None,
        description: "Working through the list.".into(),
    });
    for (k, verbs) in LEXICAL_VERBS.chunks(5).enumerate() {
        let mut p = PanelAnnotation::empty(format!("1_0_{k}"), "chores", k as u32);
        p.shot_type = ShotType::MediumShot;
        p.characters = strings(&["A"]);
        p.actions = verbs.iter().map(|v| action("A", v, None)).collect();
        c.panels.push(p);
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub n_macro: usize,
    pub events_per_macro: RangeInclusive<usize>,
    pub segments_per_event: RangeInclusive<usize>,
    pub panels_per_segment: RangeInclusive<usize>,
    pub n_characters: usize,
    pub verbs_vocab: Vec<String>,
    pub dialogue_prob: f64,
    pub action_prob: f64,
    /// Shuffle the panel list after reading orders are assigned.
    pub shuffle_panels: bool,
}

const DEFAULT_VERBS: [&str; 12] = [
    "hold_hand",
    "look_at_letter",
    "cook_rice",
    "walk_away",
    "insert",
    "insert_into",
    "give",
    "hand_over",
    "run",
    "open_door",
    "smile",
    "cry",
];

const LINES: [&str; 10] = [
    "Good morning.",
    "good morning.",
    "Where are you going?",
    "I'll be back soon.",
    "Thank you!",
    "Thank you.",
    "It's raining again...",
    "Let's eat.",
    "Wait for me!",
    "See you tomorrow.",
];

impl GenParams {
    /// Defaults sized for the property suites: at most 3x4x4 = 48 panels
    /// per macro-event.
    pub fn new(seed: u64, n_macro: usize) -> Self {
        GenParams {
            seed,
            n_macro,
            events_per_macro: 1..=3,
            segments_per_event: 1..=4,
            panels_per_segment: 1..=4,
            n_characters: 4,
            verbs_vocab: strings(&DEFAULT_VERBS),
            dialogue_prob: 0.5,
            action_prob: 0.6,
            shuffle_panels: false,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        for (name, r) in [
            ("events_per_macro", &self.events_per_macro),
            ("segments_per_event", &self.segments_per_event),
            ("panels_per_segment", &self.panels_per_segment),
        ] {
            if r.is_empty() {
                return Err(format!("{name} is empty"));
            }
        }
        for (name, p) in [
            ("dialogue_prob", self.dialogue_prob),
            ("action_prob", self.action_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} = {p} is outside [0, 1]"));
            }
        }
        if self.n_macro == 0 {
            return Err("n_macro must be at least 1".into());
        }
        if self.verbs_vocab.is_empty() {
            return Err("verbs_vocab is empty".into());
        }
        Ok(())
    }
}

/// Surface variant of a normalized token: spaces for underscores and/or
/// different casing. Normalizes back to `token`.
fn surface_variant(rng: &mut ChaCha8Rng, token: &str) -> String {
    match rng.random_range(0..6) {
        0 => token.to_uppercase(),
        1 => token.replace('_', " "),
        2 => {
            let mut chars = token.chars();
            chars
                .next()
                .map(|c| c.to_uppercase().chain(chars).collect())
                .unwrap_or_default()
        }
        _ => token.to_owned(),
    }
}

/// Builds a synthetic corpus.
///
/// # Panics
///
/// Panics if `params.check()` fails.
pub fn generate(params: &GenParams) -> AnnotationCorpus {
    if let Err(e) = params.check() {
        panic!("invalid generator parameters: {e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut c = AnnotationCorpus::empty(format!("synthetic_{}", params.seed));
    let characters: Vec<String> = (0..params.n_characters).map(|i| format!("C{i}")).collect();
    let mut reading_order = 0u32;

    for m in 0..params.n_macro {
        let macro_id = format!("m{m}");
        c.macro_events.push(MacroEvent {
            id: macro_id.clone(),
            label: format!("Macro {m}"),
            description: format!("Synthetic arc {m}."),
        });
        for e in 0..rng.random_range(params.events_per_macro.clone()) {
            let event_id = format!("m{m}_e{e}");
            c.events.push(Event {
                id: event_id.clone(),
                macro_event_id: macro_id.clone(),
                label: format!("Event {m}.{e}"),
                description: String::new(),
            });
            for s in 0..rng.random_range(params.segments_per_event.clone()) {
                let segment_id = format!("{event_id}_s{s}");
                let role = [
                    None,
                    Some(NarrativeRole::Establisher),
                    Some(NarrativeRole::Peak),
                    Some(NarrativeRole::Release),
                    Some(NarrativeRole::Other),
                ]
                .choose(&mut rng)
                .copied()
                .flatten();
                c.segments.push(EventSegment {
                    id: segment_id.clone(),
                    event_id: event_id.clone(),
                    narrative_role: role,
                    description: String::new(),
                });
                for p in 0..rng.random_range(params.panels_per_segment.clone()) {
                    let panel = generate_panel(
                        &mut rng,
                        params,
                        &characters,
                        &segment_id,
                        m,
                        e,
                        s,
                        p,
                        reading_order,
                    );
                    c.panels.push(panel);
                    reading_order += 1;
                }
            }
        }
    }

    if params.shuffle_panels {
        c.panels.shuffle(&mut rng);
    }
    c
}

#[allow(clippy::too_many_arguments)]
fn generate_panel(
    rng: &mut ChaCha8Rng,
    params: &GenParams,
    characters: &[String],
    segment_id: &str,
    m: usize,
    e: usize,
    s: usize,
    p: usize,
    reading_order: u32,
) -> PanelAnnotation {
    let mut panel = PanelAnnotation::empty(format!("{m}_{e}_{s}_{p}"), segment_id, reading_order);
    panel.page_index = reading_order / 6;
    panel.shot_type = *ShotType::ALL.choose(rng).unwrap();
    if rng.random_bool(0.3) {
        panel.image_path = Some(format!("pages/{}.png", panel.page_index));
    }

    let n_chars = rng.random_range(0..=characters.len().min(3));
    let mut cast: Vec<String> = characters.choose_multiple(rng, n_chars).cloned().collect();
    if !cast.is_empty() && rng.random_bool(0.1) {
        // repeated label, differently cased
        let again = cast[0].to_lowercase();
        cast.push(again);
    }
    panel.characters = cast.clone();

    if !cast.is_empty() && rng.random_bool(params.action_prob) {
        for _ in 0..rng.random_range(1..=3) {
            let verb = params.verbs_vocab.choose(rng).unwrap().clone();
            let object = rng.random_bool(0.5).then(|| "thing".to_owned());
            panel.actions.push(ActionTriple {
                agent: cast.choose(rng).unwrap().clone(),
                verb: surface_variant(rng, &verb),
                object,
            });
        }
    }
    if rng.random_bool(0.4) {
        panel.objects.push(
            ["cup", "door", "letter", "umbrella"]
                .choose(rng)
                .unwrap()
                .to_string(),
        );
    }
    if rng.random_bool(params.dialogue_prob) {
        for k in 0..rng.random_range(1..=2) {
            let speaker = if !cast.is_empty() && rng.random_bool(0.7) {
                cast.choose(rng).cloned()
            } else {
                None
            };
            panel.dialogues.push(Utterance {
                id: format!("d{k}"),
                kind: crate::annotation::UtteranceKind::Dialogue,
                text: LINES.choose(rng).unwrap().to_string(),
                speaker,
            });
        }
    }
    if rng.random_bool(0.2) {
        panel.captions.push(Utterance::caption("c0", "Meanwhile."));
    }
    panel
}
