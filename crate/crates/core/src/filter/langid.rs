//! Language identification behind a small trait.
//!
//! [`NgramClassifier`] is a character n-gram Naive Bayes model. The default
//! instance is trained on short embedded samples of English, German, French and
//! Spanish; [`NgramClassifier::train`] builds one from arbitrary labelled text.
//! [`LookupClassifier`] adapts the output of an external tool stored as
//! `text<TAB>lang` lines.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Maps a text to a language code, or `None` when it cannot decide.
pub trait LanguageClassifier: Sync {
    fn identify(&self, text: &str) -> Option<String>;
}

impl<F> LanguageClassifier for F
where
    F: Fn(&str) -> Option<String> + Sync,
{
    fn identify(&self, text: &str) -> Option<String> {
        self(text)
    }
}

/// Answers the same code for every input.
#[derive(Debug, Clone)]
pub struct ConstantClassifier(pub String);

impl LanguageClassifier for ConstantClassifier {
    fn identify(&self, _text: &str) -> Option<String> {
        Some(self.0.clone())
    }
}

/// Returns the label recorded for the exact text; unknown texts fail.
#[derive(Debug, Clone, Default)]
pub struct LookupClassifier {
    labels: HashMap<String, String>,
}

impl LookupClassifier {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        LookupClassifier {
            labels: pairs.into_iter().collect(),
        }
    }

    /// Loads `text<TAB>lang` lines. The label is the last tab-separated column.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut labels = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let (text, lang) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::record(idx + 1, "lang", "expected `text<TAB>lang`"))?;
            labels.insert(text.to_string(), lang.trim().to_string());
        }
        Ok(LookupClassifier { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl LanguageClassifier for LookupClassifier {
    fn identify(&self, text: &str) -> Option<String> {
        self.labels.get(text).cloned()
    }
}

const MAX_ORDER: usize = 3;

/// Lowercased letters with a single space between words and at both ends.
fn normalized_chars(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphabetic() {
            out.push(c);
        } else if out.last() != Some(&' ') {
            out.push(' ');
        }
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

fn for_each_gram(chars: &[char], mut f: impl FnMut(&[char])) {
    for n in 1..=MAX_ORDER {
        for w in chars.windows(n) {
            if n == 1 && w[0] == ' ' {
                continue;
            }
            f(w);
        }
    }
}

#[derive(Debug, Clone)]
struct Profile {
    lang: String,
    counts: HashMap<String, u32>,
    total: [u64; MAX_ORDER],
}

/// Character 1..3-gram Naive Bayes language classifier.
#[derive(Debug, Clone)]
pub struct NgramClassifier {
    profiles: Vec<Profile>,
    vocab: [usize; MAX_ORDER],
}

impl NgramClassifier {
    /// Trains one profile per distinct label. Profiles keep first-seen label order.
    pub fn train<'a>(samples: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut profiles: Vec<Profile> = Vec::new();
        let mut vocab: [std::collections::HashSet<String>; MAX_ORDER] = Default::default();
        for (lang, text) in samples {
            let idx = match profiles.iter().position(|p| p.lang == lang) {
                Some(i) => i,
                None => {
                    profiles.push(Profile {
                        lang: lang.to_string(),
                        counts: HashMap::new(),
                        total: [0; MAX_ORDER],
                    });
                    profiles.len() - 1
                }
            };
            let profile = &mut profiles[idx];
            for_each_gram(&normalized_chars(text), |g| {
                let key: String = g.iter().collect();
                profile.total[g.len() - 1] += 1;
                vocab[g.len() - 1].insert(key.clone());
                *profile.counts.entry(key).or_insert(0) += 1;
            });
        }
        NgramClassifier {
            profiles,
            vocab: [vocab[0].len(), vocab[1].len(), vocab[2].len()],
        }
    }

    /// Classifier over the embedded English, German, French and Spanish samples.
    pub fn builtin() -> Self {
        Self::train(BUILTIN_SAMPLES.iter().map(|(l, t)| (*l, *t)))
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.iter().map(|p| p.lang.as_str())
    }

    /// Log-likelihood per language, in profile order.
    pub fn scores(&self, text: &str) -> Vec<(&str, f64)> {
        let chars = normalized_chars(text);
        self.profiles
            .iter()
            .map(|p| {
                let mut ll = 0.0;
                for_each_gram(&chars, |g| {
                    let order = g.len() - 1;
                    let key: String = g.iter().collect();
                    let count = p.counts.get(&key).copied().unwrap_or(0) as f64;
                    let denom = p.total[order] as f64 + self.vocab[order] as f64 + 1.0;
                    ll += ((count + 1.0) / denom).ln();
                });
                (p.lang.as_str(), ll)
            })
            .collect()
    }
}

impl Default for NgramClassifier {
    fn default() -> Self {
        Self::builtin()
    }
}

impl LanguageClassifier for NgramClassifier {
    fn identify(&self, text: &str) -> Option<String> {
        if !text.chars().any(char::is_alphabetic) {
            return None;
        }
        self.scores(text)
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(lang, _)| lang.to_string())
    }
}

const BUILTIN_SAMPLES: &[(&str, &str)] = &[
    ("en", "The weather was cold this morning, so we stayed inside and watched an old movie together. \
            I think she will come back tomorrow because she forgot her keys at our house. \
            Where are you going? Nobody told me that the meeting had been moved to Thursday. \
            He would never have said something like that if he knew the truth about his father. \
            We should leave now, otherwise we will miss the last train home. \
            Thank you so much for helping me with the children last night. \
            What happened to the money that was hidden under the floor? \
            They have been living in this small village for more than twenty years. \
            I don't know why you keep asking me the same question again and again. \
            Please wait here until the doctor is ready to see you. \
            She laughed when he tried to explain how the machine was supposed to work. \
            If you want something done right, you have to do it yourself. \
            The king ordered his soldiers to guard the bridge through the night. \
            Could you tell me which way leads to the station? \
            It is the most beautiful thing I have ever seen in my whole life. \
            My brother always wanted to become a pilot, but his eyes were not good enough. \
            Those were the best days of our lives, and we did not even realize it. \
            Listen carefully, because I am only going to say this once. \
            Everything will be fine as long as we stay together and trust each other. \
            Why didn't you call me when you arrived at the airport?"),
    ("de", "Das Wetter war heute Morgen kalt, deshalb sind wir drinnen geblieben und haben einen alten Film geschaut. \
            Ich glaube, sie kommt morgen zurück, weil sie ihre Schlüssel bei uns vergessen hat. \
            Wohin gehst du? Niemand hat mir gesagt, dass die Besprechung auf Donnerstag verschoben wurde. \
            Er hätte so etwas niemals gesagt, wenn er die Wahrheit über seinen Vater gekannt hätte. \
            Wir sollten jetzt gehen, sonst verpassen wir den letzten Zug nach Hause. \
            Vielen Dank, dass du mir gestern Abend mit den Kindern geholfen hast. \
            Was ist mit dem Geld passiert, das unter dem Boden versteckt war? \
            Sie wohnen schon seit mehr als zwanzig Jahren in diesem kleinen Dorf. \
            Ich weiß nicht, warum du mir immer wieder dieselbe Frage stellst. \
            Bitte warten Sie hier, bis der Arzt bereit ist, Sie zu sehen. \
            Sie lachte, als er versuchte zu erklären, wie die Maschine funktionieren sollte. \
            Wenn man etwas richtig machen will, muss man es selbst tun. \
            Der König befahl seinen Soldaten, die Brücke die ganze Nacht zu bewachen. \
            Können Sie mir sagen, welcher Weg zum Bahnhof führt? \
            Das ist das Schönste, was ich jemals in meinem ganzen Leben gesehen habe. \
            Mein Bruder wollte immer Pilot werden, aber seine Augen waren nicht gut genug. \
            Das waren die besten Tage unseres Lebens, und wir haben es nicht einmal gemerkt. \
            Hör gut zu, denn ich werde das nur einmal sagen. \
            Alles wird gut, solange wir zusammenbleiben und einander vertrauen. \
            Warum hast du mich nicht angerufen, als du am Flughafen angekommen bist?"),
    ("fr", "Il faisait froid ce matin, alors nous sommes restés à la maison pour regarder un vieux film ensemble. \
            Je pense qu'elle reviendra demain parce qu'elle a oublié ses clés chez nous. \
            Où vas-tu? Personne ne m'a dit que la réunion avait été déplacée à jeudi. \
            Il n'aurait jamais dit une chose pareille s'il avait connu la vérité sur son père. \
            Nous devrions partir maintenant, sinon nous allons rater le dernier train. \
            Merci beaucoup de m'avoir aidé avec les enfants hier soir. \
            Qu'est-ce qui est arrivé à l'argent qui était caché sous le plancher? \
            Ils vivent dans ce petit village depuis plus de vingt ans. \
            Je ne sais pas pourquoi tu me poses toujours la même question. \
            Attendez ici jusqu'à ce que le médecin soit prêt à vous recevoir. \
            Le roi a ordonné à ses soldats de garder le pont toute la nuit. \
            C'est la plus belle chose que j'aie jamais vue de toute ma vie."),
    ("es", "Hacía frío esta mañana, así que nos quedamos en casa y vimos una película vieja juntos. \
            Creo que ella volverá mañana porque olvidó sus llaves en nuestra casa. \
            ¿Adónde vas? Nadie me dijo que la reunión se había cambiado al jueves. \
            Él nunca habría dicho algo así si hubiera sabido la verdad sobre su padre. \
            Deberíamos irnos ahora, de lo contrario perderemos el último tren. \
            Muchas gracias por ayudarme con los niños anoche. \
            ¿Qué pasó con el dinero que estaba escondido debajo del suelo? \
            Llevan más de veinte años viviendo en este pequeño pueblo. \
            No sé por qué me sigues haciendo la misma pregunta una y otra vez. \
            Por favor, espere aquí hasta que el médico esté listo para atenderle. \
            El rey ordenó a sus soldados vigilar el puente durante toda la noche. \
            Es la cosa más hermosa que he visto en toda mi vida."),
];
