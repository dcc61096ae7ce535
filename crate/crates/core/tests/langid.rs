use apekit_core::filter::{LanguageClassifier, NgramClassifier};

const EN: &[&str] = &[
    "could you please tell me", "where the nearest station is", "I have never seen anything", "like this before in my life",
    "we should leave before it gets dark", "she said that he would come back", "this is the best thing", "that ever happened to us",
    "they were waiting for the bus", "do you want something to drink", "my brother works in a hospital", "what are you doing here tonight",
];
const DE: &[&str] = &[
    "könnten Sie mir bitte sagen", "wo der nächste Bahnhof ist", "ich habe noch nie so etwas", "in meinem Leben gesehen",
    "wir sollten gehen bevor es dunkel wird", "sie sagte dass er zurückkommen würde", "das ist das Beste", "was uns jemals passiert ist",
    "sie warteten auf den Bus", "möchtest du etwas trinken", "mein Bruder arbeitet im Krankenhaus", "was machst du heute Abend hier",
];

/// 100 sentences built by joining two fragments of one language.
fn planted() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    for (lang, frags) in [("en", EN), ("de", DE)] {
        for k in 0..50 {
            let a = frags[k % frags.len()];
            let b = frags[(k * 7 + 3) % frags.len()];
            out.push((lang, format!("{a} {b}")));
        }
    }
    out
}

#[test]
fn builtin_model_separates_english_and_german() {
    let clf = NgramClassifier::builtin();
    let data = planted();
    assert_eq!(data.len(), 100);
    let correct = data
        .iter()
        .filter(|(lang, text)| clf.identify(text).as_deref() == Some(*lang))
        .count();
    assert!(correct >= 95, "{correct}/100 correct");
}
