//! Porter stemming algorithm (the classic 1980 rule set).
//!
//! The stemmer operates on lowercase ASCII words; anything containing other
//! characters, and words shorter than three letters, are returned unchanged.

struct Stemmer {
    buf: Vec<u8>,
    /// Index of the last letter of the current word.
    k: usize,
    /// End of the stem when a candidate suffix has been matched.
    j: usize,
}

impl Stemmer {
    fn new(word: &[u8]) -> Self {
        Stemmer {
            buf: word.to_vec(),
            k: word.len() - 1,
            j: 0,
        }
    }

    fn is_consonant(&self, i: usize) -> bool {
        match self.buf[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Measure of buf[0..=j]: the number of vowel-consonant transitions in
    /// the [C](VC)^m[V] decomposition of the stem.
    fn measure(&self) -> usize {
        let mut n = 0;
        let mut i = 0;
        loop {
            if i > self.j {
                return n;
            }
            if !self.is_consonant(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > self.j {
                    return n;
                }
                if self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > self.j {
                    return n;
                }
                if !self.is_consonant(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.is_consonant(i))
    }

    /// buf[i-1..=i] is a double consonant.
    fn double_consonant(&self, i: usize) -> bool {
        i >= 1 && self.buf[i] == self.buf[i - 1] && self.is_consonant(i)
    }

    /// buf[i-2..=i] is consonant-vowel-consonant and the final consonant is
    /// not w, x or y. Used to detect stems like "hop" and "file".
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2) {
            return false;
        }
        !matches!(self.buf[i], b'w' | b'x' | b'y')
    }

    fn ends(&mut self, s: &[u8]) -> bool {
        if s.len() > self.k + 1 {
            return false;
        }
        let start = self.k + 1 - s.len();
        if &self.buf[start..=self.k] == s {
            self.j = start.wrapping_sub(1);
            if start == 0 {
                // Suffix equals the whole word; measure of the empty stem is 0.
                self.j = usize::MAX;
            }
            true
        } else {
            false
        }
    }

    /// Measure of the stem left of the matched suffix; 0 for an empty stem.
    fn stem_measure(&self) -> usize {
        if self.j == usize::MAX {
            0
        } else {
            self.measure()
        }
    }

    fn stem_has_vowel(&self) -> bool {
        if self.j == usize::MAX {
            false
        } else {
            self.vowel_in_stem()
        }
    }

    fn set_to(&mut self, s: &[u8]) {
        let start = if self.j == usize::MAX { 0 } else { self.j + 1 };
        self.buf.truncate(start);
        self.buf.extend_from_slice(s);
        self.k = self.buf.len() - 1;
    }

    fn replace_if_measure(&mut self, s: &[u8]) {
        if self.stem_measure() > 0 {
            self.set_to(s);
        }
    }

    /// Plurals and -ed / -ing.
    fn step_1ab(&mut self) {
        if self.buf[self.k] == b's' {
            if self.ends(b"sses") {
                self.k -= 2;
                self.buf.truncate(self.k + 1);
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.k >= 1 && self.buf[self.k - 1] != b's' {
                self.k -= 1;
                self.buf.truncate(self.k + 1);
            }
        }
        if self.ends(b"eed") {
            if self.stem_measure() > 0 {
                self.k -= 1;
                self.buf.truncate(self.k + 1);
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.stem_has_vowel() {
            self.set_to(b"");
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_consonant(self.k) {
                if !matches!(self.buf[self.k], b'l' | b's' | b'z') {
                    self.k -= 1;
                    self.buf.truncate(self.k + 1);
                }
            } else {
                self.j = self.k;
                if self.measure() == 1 && self.cvc(self.k) {
                    self.set_to_whole(b"e");
                }
            }
        }
    }

    /// Append without consuming a matched suffix (used after full truncation).
    fn set_to_whole(&mut self, s: &[u8]) {
        self.buf.extend_from_slice(s);
        self.k = self.buf.len() - 1;
    }

    /// Terminal y to i when there is another vowel in the stem.
    fn step_1c(&mut self) {
        if self.ends(b"y") && self.stem_has_vowel() {
            self.buf[self.k] = b'i';
        }
    }

    /// Double suffixes to single ones, e.g. -ization to -ize.
    fn step_2(&mut self) {
        if self.k == 0 {
            return;
        }
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
        ];
        for (suffix, replacement) in RULES {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    /// -ic-, -full, -ness and similar.
    fn step_3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        for (suffix, replacement) in RULES {
            if self.ends(suffix) {
                self.replace_if_measure(replacement);
                return;
            }
        }
    }

    /// Drop -ant, -ence and similar when the stem measure exceeds 1.
    fn step_4(&mut self) {
        const SUFFIXES: &[&[u8]] = &[
            b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
            b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
        ];
        for suffix in SUFFIXES {
            if self.ends(suffix) {
                if *suffix == b"ion"
                    && !(self.j != usize::MAX && matches!(self.buf[self.j], b's' | b't'))
                {
                    continue;
                }
                if self.stem_measure() > 1 {
                    self.set_to(b"");
                }
                return;
            }
        }
    }

    /// Remove a final -e and collapse a final double l.
    fn step_5(&mut self) {
        self.j = self.k;
        if self.buf[self.k] == b'e' {
            let m = self.measure();
            if m > 1 || (m == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
                self.buf.truncate(self.k + 1);
            }
        }
        self.j = self.k;
        if self.buf[self.k] == b'l' && self.double_consonant(self.k) && self.measure() > 1 {
            self.k -= 1;
            self.buf.truncate(self.k + 1);
        }
    }

    fn run(mut self) -> String {
        self.step_1ab();
        if self.k >= 1 {
            self.step_1c();
            self.step_2();
            self.step_3();
            self.step_4();
            self.step_5();
        }
        self.buf.truncate(self.k + 1);
        String::from_utf8(self.buf).expect("stemmer operates on ASCII")
    }
}

/// Stem a lowercase word with the Porter algorithm.
///
/// Identity on words shorter than three letters and on any token containing
/// characters outside `a-z` (numbers, punctuation, contractions).
pub fn porter_stem(token: &str) -> String {
    if token.len() < 3 || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    Stemmer::new(token.as_bytes()).run()
}
